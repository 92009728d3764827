//! Distributional transforms of functions with limits or polynomial growth
//! at ±∞, carried as a classical part plus symbolic δ⁽ᵏ⁾(s) and 1/(is)^{k+1}
//! terms.
//!
//! Coefficients are stored as real scales of a fixed complex unit so that
//! cancellations (sgn, arctan) are exact: a δ-term of order k with scale r
//! stands for πiᵏr·δ⁽ᵏ⁾(s), a power term of order k with scale r for
//! k!·r/(is)^{k+1}.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::func_model::{PiecewiseFunction, TailClass};
use crate::oscillatory::transform;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub const MAX_MONOMIAL_ORDER: usize = 20;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

fn i_pow(k: usize) -> Complex64 {
    [Complex64::new(1.0, 0.0), I, Complex64::new(-1.0, 0.0), -I][k % 4]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub order: usize,
    pub scale: f64,
}

impl DeltaTerm {
    /// πiᵏ·scale.
    pub fn coefficient(&self) -> Complex64 {
        i_pow(self.order) * std::f64::consts::PI * self.scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub order: usize,
    pub scale: f64,
}

impl PowerTerm {
    /// k!·scale.
    pub fn coefficient(&self) -> Complex64 {
        Complex64::new(factorial(self.order) * self.scale, 0.0)
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        self.coefficient() / (I * s).powi(self.order as i32 + 1)
    }
}

#[derive(Serialize)]
struct TermJson {
    order: usize,
    coefficient: Complex64,
}

fn ser_delta<S: Serializer>(t: &[DeltaTerm], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<TermJson> = t.iter().map(|d| TermJson { order: d.order, coefficient: d.coefficient() }).collect();
    v.serialize(s)
}

fn ser_power<S: Serializer>(t: &[PowerTerm], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<TermJson> = t.iter().map(|d| TermJson { order: d.order, coefficient: d.coefficient() }).collect();
    v.serialize(s)
}

/// ĝ(s) + Σ πiᵏ r_k δ⁽ᵏ⁾(s) + Σ k! q_k/(is)^{k+1}.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionalFT {
    /// Label for the classical part; `None` when it is absent.
    pub function_part_ref: Option<String>,
    #[serde(skip)]
    residual: Option<PiecewiseFunction>,
    #[serde(serialize_with = "ser_delta")]
    pub delta_terms: Vec<DeltaTerm>,
    #[serde(serialize_with = "ser_power")]
    pub power_terms: Vec<PowerTerm>,
}

impl DistributionalFT {
    pub fn zero() -> Self {
        DistributionalFT {
            function_part_ref: None,
            residual: None,
            delta_terms: Vec::new(),
            power_terms: Vec::new(),
        }
    }

    /// Transform of the constant c: 2πc·δ(s).
    pub fn constant(c: f64) -> Self {
        Self::from_scales(&[2.0 * c], &[])
    }

    fn from_scales(delta: &[f64], power: &[f64]) -> Self {
        let mut d = Self::zero();
        d.delta_terms = delta
            .iter()
            .enumerate()
            .filter(|(_, &r)| r != 0.0)
            .map(|(order, &scale)| DeltaTerm { order, scale })
            .collect();
        d.power_terms = power
            .iter()
            .enumerate()
            .filter(|(_, &r)| r != 0.0)
            .map(|(order, &scale)| PowerTerm { order, scale })
            .collect();
        d
    }

    pub fn residual(&self) -> Option<&PiecewiseFunction> {
        self.residual.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.residual.is_none() && self.delta_terms.is_empty() && self.power_terms.is_empty()
    }

    /// α·self + β·other.
    pub fn linear_combination(&self, alpha: f64, other: &DistributionalFT, beta: f64) -> Result<DistributionalFT> {
        let n = self
            .delta_terms
            .iter()
            .chain(&other.delta_terms)
            .map(|t| t.order + 1)
            .chain(self.power_terms.iter().chain(&other.power_terms).map(|t| t.order + 1))
            .max()
            .unwrap_or(0);
        let mut dl = vec![0.0; n];
        let mut pw = vec![0.0; n];
        for (w, d) in [(alpha, self), (beta, other)] {
            for t in &d.delta_terms {
                dl[t.order] += w * t.scale;
            }
            for t in &d.power_terms {
                pw[t.order] += w * t.scale;
            }
        }
        let mut out = Self::from_scales(&dl, &pw);
        let (r, label) = match (&self.residual, &other.residual) {
            (Some(a), Some(b)) => (Some(a.linear_combination(alpha, b, beta)?), Some("ĝ".to_string())),
            (Some(a), None) => (Some(a.scaled(alpha)?), self.function_part_ref.clone()),
            (None, Some(b)) => (Some(b.scaled(beta)?), other.function_part_ref.clone()),
            (None, None) => (None, None),
        };
        out.residual = r;
        out.function_part_ref = label;
        Ok(out)
    }
}

/// ĥₙ for hₙ(x) = H(x)xⁿ: πiⁿδ⁽ⁿ⁾(s) + n!/(is)^{n+1}.
pub fn transform_heaviside_monomial(n: usize) -> Result<DistributionalFT> {
    if n > MAX_MONOMIAL_ORDER {
        return Err(Error::Domain(format!("monomial order {n} exceeds {MAX_MONOMIAL_ORDER}")));
    }
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    Ok(DistributionalFT::from_scales(&c, &c))
}

/// Scales for H(x)p₊(x) + H(-x)p₋(x). The left tail reflects as
/// πiᵏδ⁽ᵏ⁾(s) - k!/(is)^{k+1} per monomial, so the δ scale is a₊ₖ + a₋ₖ and
/// the power scale a₊ₖ - a₋ₖ.
pub fn polynomial_tail_terms(plus: &[f64], minus: &[f64]) -> DistributionalFT {
    let n = plus.len().max(minus.len());
    let a = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    let dl: Vec<f64> = (0..n).map(|k| a(plus, k) + a(minus, k)).collect();
    let pw: Vec<f64> = (0..n).map(|k| a(plus, k) - a(minus, k)).collect();
    DistributionalFT::from_scales(&dl, &pw)
}

pub fn build(f: &PiecewiseFunction) -> Result<DistributionalFT> {
    let (tp, tm) = f.classify_tails()?;
    for t in [&tp, &tm] {
        if !matches!(
            t.class,
            TailClass::L1 | TailClass::BvZero | TailClass::BvLimit(_) | TailClass::PolynomialGrowth(_)
        ) {
            return Err(Error::Classification(format!("tail {:?} has no distributional transform", t.class)));
        }
    }
    let (g, rec) = f.subtract_asymptote()?;
    let mut d = polynomial_tail_terms(&rec.plus, &rec.minus);
    let trivial = g.pieces().iter().all(|p| p.expr.as_polynomial().is_some_and(|c| c.iter().all(|&x| x == 0.0)));
    if !trivial {
        d.residual = Some(g);
        d.function_part_ref = Some("ĝ".into());
    }
    Ok(d)
}

/// The classical part at s ≠ 0; with `fold` the power terms are added as
/// ordinary functions. δ-terms are never evaluated.
pub fn eval_function_part(d: &DistributionalFT, s: f64, fold: bool, tol: f64) -> Result<Complex64> {
    if s == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let mut v = match &d.residual {
        Some(g) => transform(g, s, tol)?.value,
        None => Complex64::new(0.0, 0.0),
    };
    if fold {
        v += d.power_terms.iter().map(|t| t.eval(s)).sum::<Complex64>();
    }
    Ok(v)
}

fn sig10(x: f64) -> String {
    let r: f64 = format!("{x:.9e}").parse().unwrap_or(x);
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

fn superscript(n: usize) -> String {
    const D: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| D[c.to_digit(10).unwrap() as usize]).collect()
}

/// Sign and magnitude text of a coefficient; complex values are bracketed.
fn coef_text(c: Complex64) -> (bool, String) {
    if c.im == 0.0 {
        (c.re < 0.0, sig10(c.re.abs()))
    } else if c.re == 0.0 {
        (c.im < 0.0, format!("{}i", sig10(c.im.abs())))
    } else {
        (false, format!("({}{}{}i)", sig10(c.re), if c.im < 0.0 { "-" } else { "+" }, sig10(c.im.abs())))
    }
}

/// Canonical text, e.g. `ĝ(s) + 3.141592654·δ(s) + 1/(i s)`.
pub fn render(d: &DistributionalFT) -> String {
    let mut parts: Vec<(bool, String)> = Vec::new();
    if let Some(r) = &d.function_part_ref {
        parts.push((false, format!("{r}(s)")));
    }
    for t in &d.delta_terms {
        let (neg, c) = coef_text(t.coefficient());
        let sym = if t.order == 0 { "δ(s)".to_string() } else { format!("δ⁽{}⁾(s)", superscript(t.order)) };
        parts.push((neg, format!("{c}·{sym}")));
    }
    for t in &d.power_terms {
        let (neg, c) = coef_text(t.coefficient());
        let pow = if t.order == 0 { String::new() } else { superscript(t.order + 1) };
        parts.push((neg, format!("{c}/(i s){pow}")));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (neg, p)) in parts.into_iter().enumerate() {
        match (k, neg) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Expr, Func};
    use crate::func_model::atoms::*;
    use std::f64::consts::PI;

    #[test]
    fn heaviside_monomials() {
        let h0 = transform_heaviside_monomial(0).unwrap();
        assert_eq!(h0.delta_terms[0].coefficient(), Complex64::new(PI, 0.0));
        assert_eq!(render(&h0), "3.141592654·δ(s) + 1/(i s)");
        let h1 = transform_heaviside_monomial(1).unwrap();
        assert_eq!(h1.delta_terms[0].coefficient(), Complex64::new(0.0, PI));
        assert_eq!(h1.power_terms[0].coefficient(), Complex64::new(1.0, 0.0));
        let h2 = render(&transform_heaviside_monomial(2).unwrap());
        assert!(h2.contains("δ⁽²⁾(s)") && h2.contains("2/(i s)³"), "{h2}");
        assert!(transform_heaviside_monomial(21).is_err());
    }

    #[test]
    fn sgn_cancels_delta() {
        let h = transform_heaviside_monomial(0).unwrap();
        let sgn = h.linear_combination(2.0, &DistributionalFT::constant(1.0), -1.0).unwrap();
        assert!(sgn.delta_terms.is_empty());
        assert_eq!(render(&sgn), "2/(i s)");
        let f = PiecewiseFunction::from_expr(sgn_atom()).unwrap();
        let d = build(&f).unwrap();
        assert!(d.delta_terms.is_empty());
        assert_eq!(d.power_terms, vec![PowerTerm { order: 0, scale: 2.0 }]);
    }

    fn sgn_atom() -> Expr {
        sgn()
    }

    #[test]
    fn arctan_build() {
        let f = PiecewiseFunction::from_expr(atan()).unwrap();
        let d = build(&f).unwrap();
        assert!(d.delta_terms.is_empty());
        for &s in &[1.0, -2.0, 0.5] {
            let v = eval_function_part(&d, s, true, 1e-10).unwrap();
            let want = -I * PI * (-s.abs()).exp() / s;
            assert!((v - want).norm() < 1e-7, "{s}: {v} {want}");
        }
        assert!(matches!(eval_function_part(&d, 0.0, true, 1e-8), Err(Error::ZeroFrequency)));
    }

    #[test]
    fn x2_tanh_reflection() {
        let e = Expr::X * Expr::X * Expr::apply(Func::Tanh, Expr::X);
        let decl = |m: f64| {
            crate::func_model::FunctionDef::single(e.clone())
                .tails(
                    Some(TailClass::PolynomialGrowth(vec![0.0, 0.0, 1.0])),
                    Some(TailClass::PolynomialGrowth(vec![0.0, 0.0, m])),
                )
                .build()
        };
        assert!(decl(1.0).is_err());
        let f = decl(-1.0).unwrap();
        let d = build(&f).unwrap();
        // x²tanh x ~ x² at +∞ and -x² at -∞
        assert!(d.delta_terms.is_empty(), "{d:?}");
        assert_eq!(d.power_terms, vec![PowerTerm { order: 2, scale: 2.0 }]);
        assert!(render(&d).contains("4/(i s)³"));
    }

    #[test]
    fn render_zero_and_pure_delta() {
        assert_eq!(render(&DistributionalFT::zero()), "0");
        let d = DistributionalFT::constant(1.0);
        assert_eq!(eval_function_part(&d, 1.0, false, 1e-8).unwrap(), Complex64::new(0.0, 0.0));
        let h = transform_heaviside_monomial(0).unwrap();
        let v = eval_function_part(&h, 2.0, true, 1e-8).unwrap();
        assert!((v - 1.0 / (2.0 * I)).norm() < 1e-15);
    }
}
