//! Named example functions with known transforms and inversion targets.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::cantor::cantor_char;
use crate::error::{Error, Result};
use crate::func_model::PiecewiseFunction;
use crate::parser::parse_function;
use crate::spectrum::ClosedForm;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which function a closed form transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransformOf {
    /// f itself (integrable or BV-to-zero tails, or principal value).
    Function,
    /// g = f - H(x)p₊(x) - H(-x)p₋(x).
    Residual,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedTransform {
    pub of: TransformOf,
    #[serde(skip)]
    pub eval: fn(f64) -> Complex64,
    /// Grid tolerance for comparisons against the numerical transform.
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestPoint {
    pub x: f64,
    pub expected: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub description: &'static str,
    pub transform: Option<ClosedTransform>,
    pub points: Vec<TestPoint>,
}

impl CatalogEntry {
    pub fn function(&self) -> Result<PiecewiseFunction> {
        parse_function(self.source)
    }

    /// The closed form as an evaluable spectrum for the inversion engine.
    pub fn spectrum(&self) -> Result<Option<(TransformOf, ClosedForm)>> {
        let Some(t) = self.transform else { return Ok(None) };
        let f = self.function()?;
        let feats = match t.of {
            TransformOf::Function => f.features(),
            TransformOf::Residual => f.subtract_asymptote()?.0.features(),
        };
        let f = t.eval;
        Ok(Some((t.of, ClosedForm::new(f, feats))))
    }
}

fn tp(x: f64, expected: f64, tol: f64) -> TestPoint {
    TestPoint { x, expected, tol }
}

fn zero(_: f64) -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn indicator_hat(s: f64) -> Complex64 {
    Complex64::new(if s == 0.0 { 2.0 } else { 2.0 * s.sin() / s }, 0.0)
}

fn arctan_residual_hat(s: f64) -> Complex64 {
    if s == 0.0 {
        // limit of iπ(1 - e^{-|s|})/s is ±iπ; the value at 0 itself is the
        // integral of an odd function
        return Complex64::new(0.0, 0.0);
    }
    I * PI * (1.0 - (-s.abs()).exp()) / s
}

fn cantor_hat(s: f64) -> Complex64 {
    if s == 0.0 {
        return Complex64::new(0.5, 0.0);
    }
    (cantor_char(s) - (-I * s).exp()) / (I * s)
}

fn pv_half_hat(s: f64) -> Complex64 {
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    -2.0 * I * s.signum() * s.abs().powf(-0.5) * (PI / 2.0).sqrt()
}

fn pv_three_halves_hat(s: f64) -> Complex64 {
    -2.0 * I * s.signum() * s.abs().sqrt() * (2.0 * PI).sqrt()
}

/// f̂ of arctan with the power term folded in: -iπe^{-|s|}/s.
pub fn arctan_folded(s: f64) -> Complex64 {
    -I * PI * (-s.abs()).exp() / s
}

pub fn catalog() -> Vec<CatalogEntry> {
    let c = (-1.0f64).exp();
    let log_ex = |x: f64| {
        if x <= 0.0 {
            0.0
        } else if x <= c {
            1.0 / x.ln()
        } else {
            -1.0 / (E * x).powi(2)
        }
    };
    let sin_sqrt = |x: f64| x.sqrt().sin() / x.powf(2.0 / 3.0);
    let x2tanh = |x: f64| x * x * x.tanh();
    vec![
        CatalogEntry {
            name: "step-a7",
            source: "on (-inf,0): 0 | on (0,inf): 1 at 0: 7",
            description: "unit step whose value at the jump is 7",
            transform: Some(ClosedTransform {
                of: TransformOf::Residual,
                eval: zero,
                tol: 1e-12,
            }),
            points: vec![tp(0.0, 0.5, 1e-6), tp(-1.0, 0.0, 1e-6), tp(2.0, 1.0, 1e-6)],
        },
        CatalogEntry {
            name: "heaviside",
            source: "on (-inf,inf): heaviside(x)",
            description: "H(x), with H(0) = 1/2",
            transform: Some(ClosedTransform {
                of: TransformOf::Residual,
                eval: zero,
                tol: 1e-12,
            }),
            points: vec![tp(0.0, 0.5, 1e-6), tp(-1.5, 0.0, 1e-6), tp(1.5, 1.0, 1e-6)],
        },
        CatalogEntry {
            name: "sgn",
            source: "on (-inf,inf): sgn(x)",
            description: "sgn(x) = 2H(x) - 1",
            transform: Some(ClosedTransform {
                of: TransformOf::Residual,
                eval: zero,
                tol: 1e-12,
            }),
            points: vec![tp(0.0, 0.0, 1e-6), tp(-1.0, -1.0, 1e-6), tp(1.0, 1.0, 1e-6)],
        },
        CatalogEntry {
            name: "indicator",
            source: "on (-inf,-1): 0 | on [-1,1]: 1 | on (1,inf): 0",
            description: "indicator of [-1, 1]",
            transform: Some(ClosedTransform {
                of: TransformOf::Function,
                eval: indicator_hat,
                tol: 1e-9,
            }),
            points: vec![tp(0.0, 1.0, 1e-5), tp(1.0, 0.5, 1e-5), tp(2.0, 0.0, 1e-5)],
        },
        CatalogEntry {
            name: "log-example",
            source: "on (-inf,0]: 0 | on (0,1/e): 1/log(x) | on [1/e,inf): -1/(e*x)^2",
            description: "0 for x <= 0, 1/log(x) on (0, 1/e], -1/(ex)^2 beyond; absolutely continuous, not Hölder at 0",
            transform: None,
            points: [-1.0, 0.1, c, 1.0, 2.0].iter().map(|&x| tp(x, log_ex(x), 1e-4)).collect(),
        },
        CatalogEntry {
            name: "cantor",
            source: "on (-inf,0): 0 | on [0,1]: cantor(x) | on (1,inf): 0",
            description: "Cantor–Lebesgue function on [0, 1], zero outside",
            transform: Some(ClosedTransform {
                of: TransformOf::Function,
                eval: cantor_hat,
                tol: 1e-8,
            }),
            points: vec![tp(0.25, 1.0 / 3.0, 1e-3), tp(0.5, 0.5, 1e-3), tp(0.75, 2.0 / 3.0, 1e-3)],
        },
        CatalogEntry {
            name: "sgnlog",
            source: "on (-inf,-e): -1/log(x) | on [-e,e]: 0 | on (e,inf): 1/log(x)",
            description: "sgn(x)/log|x| for |x| > e, 0 otherwise; BV with limit 0 but not integrable",
            transform: None,
            points: vec![tp(0.0, 0.0, 1e-3), tp(E, 0.5, 1e-3), tp(4.0, 1.0 / 4f64.ln(), 1e-3)],
        },
        CatalogEntry {
            name: "sin-sqrt",
            source: "on (-inf,1]: 0 | on (1,inf): sin(sqrt(x))/x^(2/3)",
            description: "sin(x^(1/2))/x^(2/3) for x > 1, 0 otherwise; conditionally integrable",
            transform: None,
            points: vec![tp(1.0, 0.5 * 1f64.sin(), 1e-3), tp(2.0, sin_sqrt(2.0), 1e-3), tp(0.0, 0.0, 1e-3)],
        },
        CatalogEntry {
            name: "arctan",
            source: "on (-inf,inf): atan(x) tail+ limit tail- limit",
            description: "arctan(x), limits ±π/2",
            transform: Some(ClosedTransform {
                of: TransformOf::Residual,
                eval: arctan_residual_hat,
                tol: 1e-7,
            }),
            points: [-2.0, 0.0, 0.5, 3.0].iter().map(|&x: &f64| tp(x, x.atan(), 1e-4)).collect(),
        },
        CatalogEntry {
            name: "arctan-residual",
            source: "on (-inf,inf): atan(x) - pi/2*sgn(x)",
            description: "arctan(x) - (π/2)sgn(x)",
            transform: Some(ClosedTransform {
                of: TransformOf::Function,
                eval: arctan_residual_hat,
                tol: 1e-7,
            }),
            points: [-2.0, 0.0, 1.0].iter().map(|&x: &f64| tp(x, x.atan() - PI / 2.0 * x.signum() * (x != 0.0) as i32 as f64, 1e-4)).collect(),
        },
        CatalogEntry {
            name: "poly-tanh",
            source: "on (-inf,inf): x^2*tanh(x) tail+ poly(0,0,1) tail- poly(0,0,-1)",
            description: "x^2 tanh(x); grows like x^2 at +inf and -x^2 at -inf",
            transform: None,
            points: [-2.0, -0.5, 0.5, 2.0].iter().map(|&x| tp(x, x2tanh(x), 1e-3)).collect(),
        },
        CatalogEntry {
            name: "pv-alpha-0.5",
            source: "on (-inf,inf): sgn(x)*abs(x)^(-1/2) odd(0, 1/2)",
            description: "sgn(x)|x|^(-1/2), odd about 0",
            transform: Some(ClosedTransform {
                of: TransformOf::Function,
                eval: pv_half_hat,
                tol: 1e-6,
            }),
            points: [-2.0, -1.0, 1.0, 2.0].iter().map(|&x: &f64| tp(x, x.signum() / x.abs().sqrt(), 1e-3)).collect(),
        },
        CatalogEntry {
            name: "pv-alpha-1.5",
            source: "on (-inf,inf): sgn(x)*abs(x)^(-3/2) odd(0, 1/2)",
            description: "sgn(x)|x|^(-3/2), odd about 0; only |t - c||f| is integrable near 0",
            transform: Some(ClosedTransform {
                of: TransformOf::Function,
                eval: pv_three_halves_hat,
                tol: 1e-6,
            }),
            points: Vec::new(),
        },
    ]
}

pub fn lookup(name: &str) -> Result<CatalogEntry> {
    catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Validation(format!("no catalog entry named '{name}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_parse_and_hit_their_points() {
        let cat = catalog();
        assert!(cat.len() >= 10);
        for e in &cat {
            let f = e.function().unwrap_or_else(|err| panic!("{}: {err}", e.name));
            for p in &e.points {
                let m = f.midpoint_value(p.x).unwrap();
                assert!((m - p.expected).abs() < 1e-9, "{} at {}: {m} vs {}", e.name, p.x, p.expected);
            }
        }
        assert!(lookup("pv-alpha-0.5").unwrap().function().unwrap().odd_symmetry().is_some());
        assert!(lookup("nope").is_err());
    }
}
