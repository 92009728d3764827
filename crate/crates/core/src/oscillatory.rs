//! Fourier transforms f̂(s) = ∫ e^{-ist} f(t) dt of piecewise functions.
//!
//! The real line is split into a compact core holding every breakpoint and
//! two tails. The core is integrated panel by panel (closed forms for
//! polynomial pieces, a ternary recursion for Cantor pieces); tails are
//! summed lobe by lobe, after one integration by parts when they are only
//! BV-to-zero.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::accel::{lobe_sum, LobeOptions};
use crate::error::{Error, Result};
use crate::expr::{Expr, Ramp};
use crate::func_model::{OddSymmetry, PiecewiseFunction, TailClass, TailSide};
use crate::quad::{integrate, integrate_points, integrate_to_infinity, QuadOptions, QuadResult};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailStrategy {
    /// Absolutely integrable tail, summed directly.
    L1,
    /// One integration by parts, then the df-integral by lobe summation.
    IbpDirichlet,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformPlan {
    pub core: (f64, f64),
    pub plus: TailStrategy,
    pub minus: TailStrategy,
    pub pv: Option<OddSymmetry>,
}

/// Tolerances for a transform evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TransformOptions {
    pub quad: QuadOptions,
    pub lobes: LobeOptions,
    /// Ternary depth of the ramp approximation on Cantor pieces.
    pub cantor_depth: Option<usize>,
}

impl TransformOptions {
    pub fn with_tol(tol: f64) -> Self {
        let t = tol.clamp(1e-14, 1e-3);
        TransformOptions {
            quad: QuadOptions {
                abs_tol: 0.1 * t,
                rel_tol: (0.1 * t).max(1e-12),
                max_intervals: 20_000,
            },
            lobes: LobeOptions {
                tol: 1e-2 * t,
                ..LobeOptions::default()
            },
            cantor_depth: None,
        }
    }
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self::with_tol(1e-8)
    }
}

/// Core interval and tail strategies for f.
pub fn plan(f: &PiecewiseFunction) -> Result<TransformPlan> {
    let feats = f.features();
    let mut edges: Vec<f64> = feats.clone();
    edges.extend(f.pieces()[1..].iter().map(|p| p.lo));
    if let Some(o) = f.odd_symmetry() {
        edges.push(o.center - o.radius);
        edges.push(o.center + o.radius);
    }
    let core = if edges.is_empty() {
        (-1.0, 1.0)
    } else {
        let lo = edges.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = edges.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo - 1.0, hi + 1.0)
    };
    let (tp, tm) = f.classify_tails()?;
    let strat = |c: &TailClass| match c {
        TailClass::L1 => TailStrategy::L1,
        TailClass::BvZero => TailStrategy::IbpDirichlet,
        _ => TailStrategy::Reject,
    };
    Ok(TransformPlan {
        core,
        plus: strat(&tp.class),
        minus: strat(&tm.class),
        pv: f.odd_symmetry().filter(|o| f.singularities().iter().any(|&c| (c - o.center).abs() < o.radius)),
    })
}

/// ∫ p(t) e^{-ist} dt over [a, b] for a polynomial p, via the antiderivative
/// -e^{-ist} Σ_k p^{(k)}(t)/(is)^{k+1}.
pub fn polynomial_oscillatory(coeffs: &[f64], a: f64, b: f64, s: f64) -> Complex64 {
    let is = I * s;
    let anti = |t: f64| {
        let mut d: Vec<f64> = coeffs.to_vec();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = is;
        while !d.is_empty() {
            let v = d.iter().rev().fold(0.0, |acc, &c| acc * t + c);
            acc += v / pow;
            d = d.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
            pow *= is;
        }
        -(-is * t).exp() * acc
    };
    anti(b) - anti(a)
}

fn ramp_depth(s: f64, len: f64, tol: f64) -> usize {
    // leaf error of the ramp surrogate behaves like 9^{-depth}
    let scale = (1.0 + s.abs()) * len.max(1e-3);
    let d = ((scale / tol).ln() / 9f64.ln()).ceil();
    (d.max(6.0) as usize).min(14)
}

/// ∫ e^{-ist} expr(t) dt over [lo, hi] for an expression with one Cantor atom.
fn cantor_span(expr: &Expr, lo: f64, hi: f64, s: f64, opts: &TransformOptions) -> Result<QuadResult> {
    let aff = expr.cantor_args()[0];
    let (u_a, u_b) = {
        let (x, y) = (aff.at(lo), aff.at(hi));
        (x.min(y), x.max(y))
    };
    let jac = 1.0 / aff.scale.abs();
    let depth = opts.cantor_depth.unwrap_or_else(|| ramp_depth(s, hi - lo, opts.quad.abs_tol.max(1e-13)));
    let plain = |u: f64| {
        let t = aff.inverse(u);
        (-I * s * t).exp() * expr.eval(t) * jac
    };
    let mut total = QuadResult::zero();
    // smooth parts outside the support
    for (x0, x1) in [(u_a, u_b.min(0.0)), (u_a.max(1.0), u_b)] {
        if x1 > x0 {
            total = total.combine(panelled(&plain, x0, x1, s * aff.scale.abs().recip(), &opts.quad)?);
        }
    }
    let (r0, r1) = (u_a.max(0.0), u_b.min(1.0));
    if r1 > r0 {
        let st = CantorWalk {
            expr,
            aff_scale: aff.scale,
            aff_shift: aff.shift,
            s,
            jac,
            r0,
            r1,
            depth,
            quad: QuadOptions {
                abs_tol: opts.quad.abs_tol * 1e-3,
                rel_tol: opts.quad.rel_tol,
                max_intervals: 200,
            },
        };
        total = total.combine(st.node(0.0, 1.0, 0.0, 1.0, 0)?);
        total.abs_error += 9f64.powi(-(depth as i32)) * (1.0 + s.abs()) * jac;
    }
    Ok(total)
}

struct CantorWalk<'a> {
    expr: &'a Expr,
    aff_scale: f64,
    aff_shift: f64,
    s: f64,
    jac: f64,
    r0: f64,
    r1: f64,
    depth: usize,
    quad: QuadOptions,
}

impl CantorWalk<'_> {
    fn t_of(&self, u: f64) -> f64 {
        (u - self.aff_shift) / self.aff_scale
    }

    fn node(&self, lo: f64, len: f64, c_lo: f64, w: f64, level: usize) -> Result<QuadResult> {
        let hi = lo + len;
        let (a, b) = (lo.max(self.r0), hi.min(self.r1));
        if b <= a {
            return Ok(QuadResult::zero());
        }
        if level >= self.depth {
            let ramp = Ramp {
                u0: lo,
                du: len,
                c0: c_lo,
                dc: w,
            };
            let h = |u: f64| {
                let t = self.t_of(u);
                (-I * self.s * t).exp() * self.expr.eval_ramp(t, &ramp) * self.jac
            };
            return integrate(h, a, b, &self.quad);
        }
        let third = len / 3.0;
        let mut r = self.node(lo, third, c_lo, 0.5 * w, level + 1)?;
        // the middle third is a flat step of the Cantor function
        let (m0, m1) = ((lo + third).max(a), (lo + 2.0 * third).min(b));
        if m1 > m0 {
            let flat = Ramp {
                u0: lo + third,
                du: third,
                c0: c_lo + 0.5 * w,
                dc: 0.0,
            };
            let h = |u: f64| {
                let t = self.t_of(u);
                (-I * self.s * t).exp() * self.expr.eval_ramp(t, &flat) * self.jac
            };
            r = r.combine(integrate(h, m0, m1, &self.quad)?);
        }
        Ok(r.combine(self.node(lo + 2.0 * third, third, c_lo + 0.5 * w, 0.5 * w, level + 1)?))
    }
}

/// GK over [a, b] with initial panels no longer than π/|s|.
fn panelled<F>(h: &F, a: f64, b: f64, s: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let n = ((s.abs() * (b - a) / PI).ceil() as usize).clamp(1, 100_000);
    let pts: Vec<f64> = (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect();
    integrate_points(h, &pts, opts)
}

const FILON_NODES: usize = 9;

/// Chebyshev nodes on [-1, 1] and the inverse of their Vandermonde matrix.
#[allow(clippy::needless_range_loop)]
fn filon_basis() -> &'static ([f64; FILON_NODES], [[f64; FILON_NODES]; FILON_NODES]) {
    static BASIS: OnceLock<([f64; FILON_NODES], [[f64; FILON_NODES]; FILON_NODES])> = OnceLock::new();
    BASIS.get_or_init(|| {
        let n = FILON_NODES;
        let mut u = [0.0; FILON_NODES];
        for (j, v) in u.iter_mut().enumerate() {
            *v = ((2 * j + 1) as f64 * PI / (2 * n) as f64).cos();
        }
        // Gauss-Jordan on [V | I]
        let mut a = vec![vec![0.0; 2 * n]; n];
        for i in 0..n {
            for k in 0..n {
                a[i][k] = u[i].powi(k as i32);
            }
            a[i][n + i] = 1.0;
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap()).unwrap();
            a.swap(col, piv);
            let d = a[col][col];
            for v in a[col].iter_mut() {
                *v /= d;
            }
            for r in 0..n {
                if r != col {
                    let m = a[r][col];
                    for c in 0..2 * n {
                        a[r][c] -= m * a[col][c];
                    }
                }
            }
        }
        let mut inv = [[0.0; FILON_NODES]; FILON_NODES];
        for i in 0..n {
            for k in 0..n {
                inv[i][k] = a[i][n + k];
            }
        }
        (u, inv)
    })
}

/// ∫_{-1}^{1} u^k e^{-iσu} du for k < FILON_NODES, by upward recurrence
/// (stable for |σ| well above the degree).
fn filon_moments(sigma: f64) -> [Complex64; FILON_NODES] {
    let is = I * sigma;
    let (em, ep) = ((-is).exp(), is.exp());
    let mut m = [Complex64::new(0.0, 0.0); FILON_NODES];
    for k in 0..FILON_NODES {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let boundary = (em - ep * sign) / (-is);
        m[k] = if k == 0 { boundary } else { boundary + m[k - 1] * (k as f64) / is };
    }
    m
}

/// One Filon panel: polynomial interpolation of f at Chebyshev nodes, with
/// the oscillatory factor integrated exactly.
fn filon_panel(expr: &Expr, a: f64, b: f64, s: f64) -> Result<Complex64> {
    let (u, inv) = filon_basis();
    let (c, hw) = (0.5 * (a + b), 0.5 * (b - a));
    let mut fv = [0.0; FILON_NODES];
    for (j, v) in fv.iter_mut().enumerate() {
        *v = expr.eval(c + hw * u[j]);
        if !v.is_finite() {
            return Err(Error::Singularity(c + hw * u[j]));
        }
    }
    let m = filon_moments(s * hw);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..FILON_NODES {
        let coef: f64 = (0..FILON_NODES).map(|j| inv[k][j] * fv[j]).sum();
        acc += m[k] * coef;
    }
    Ok(acc * hw * (-I * s * c).exp())
}

/// Adaptive bisection of Filon panels, falling back to Kronrod panels once
/// a panel holds fewer than a few oscillations.
fn filon_span(expr: &Expr, a: f64, b: f64, s: f64, tol: f64, depth: usize) -> Result<QuadResult> {
    if s.abs() * (b - a) < 40.0 || depth > 48 {
        let h = |t: f64| (-I * s * t).exp() * expr.eval(t);
        return panelled(&h, a, b, s, &QuadOptions { abs_tol: tol, rel_tol: 1e-13, max_intervals: 2000 });
    }
    let m = 0.5 * (a + b);
    let whole = filon_panel(expr, a, b, s)?;
    let (l, r) = (filon_panel(expr, a, m, s)?, filon_panel(expr, m, b, s)?);
    let diff = (whole - l - r).norm();
    if diff <= tol {
        return Ok(QuadResult {
            value: l + r,
            abs_error: diff,
            converged: true,
            diagnostics: 3,
        });
    }
    Ok(filon_span(expr, a, m, s, 0.5 * tol, depth + 1)?.combine(filon_span(expr, m, b, s, 0.5 * tol, depth + 1)?))
}

/// ∫_a^b e^{-ist} expr(t) dt for a single smooth piece.
fn span_integral(expr: &Expr, a: f64, b: f64, s: f64, opts: &TransformOptions) -> Result<QuadResult> {
    if let Some(c) = expr.as_polynomial() {
        if s.abs() * (b - a) >= 1.0 {
            return Ok(QuadResult::exact(polynomial_oscillatory(&c, a, b, s)));
        }
    }
    if expr.contains_cantor() {
        return cantor_span(expr, a, b, s, opts);
    }
    if s.abs() * (b - a) >= 40.0 {
        return filon_span(expr, a, b, s, opts.quad.abs_tol.max(1e-15), 0);
    }
    let h = |t: f64| (-I * s * t).exp() * expr.eval(t);
    panelled(&h, a, b, s, &opts.quad)
}

/// ∫_a^b e^{-ist} f(t) dt over a compact interval free of singular points.
pub fn finite_oscillatory(f: &PiecewiseFunction, a: f64, b: f64, s: f64) -> Result<QuadResult> {
    finite_oscillatory_with(f, a, b, s, &TransformOptions::default())
}

pub fn finite_oscillatory_with(f: &PiecewiseFunction, a: f64, b: f64, s: f64, opts: &TransformOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("finite_oscillatory needs a compact interval".into()));
    }
    if b <= a {
        return Ok(QuadResult::zero());
    }
    if let Some(&c) = f.singularities().iter().find(|&&c| c > a && c < b) {
        return Err(Error::Singularity(c));
    }
    let cuts = f.cuts(a, b);
    let mut total = QuadResult::zero();
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let Some(p) = f.piece_at(mid) else { continue };
        total = total.combine(span_integral(&p.expr, w[0], w[1], s, opts)?);
    }
    Ok(total)
}

/// Tail ∫ from `start` towards ±∞ (dir) of e^{-ist} f(t) dt.
fn tail_integral(f: &PiecewiseFunction, start: f64, side: TailSide, strategy: TailStrategy, s: f64, opts: &TransformOptions) -> Result<QuadResult> {
    let dir = side.sign();
    let piece = match side {
        TailSide::Plus => f.pieces().last().unwrap(),
        TailSide::Minus => &f.pieces()[0],
    };
    let expr = &piece.expr;
    if expr.as_polynomial().is_some_and(|c| c.iter().all(|&x| x == 0.0)) {
        return Ok(QuadResult::zero());
    }
    match strategy {
        TailStrategy::Reject => Err(Error::Hypothesis("tail is neither integrable nor BV to zero".into())),
        TailStrategy::L1 => {
            let h = |t: f64| (-I * s * t).exp() * expr.eval(t);
            if s == 0.0 {
                integrate_to_infinity(h, start, dir, &opts.quad)
            } else {
                lobe_sum(h, start, dir, PI / s.abs(), &opts.lobes)
            }
        }
        TailStrategy::IbpDirichlet => {
            if s == 0.0 {
                return Err(Error::Hypothesis("f̂(0) does not exist for a tail that is only BV to zero".into()));
            }
            let is = I * s;
            let boundary = (-is * start).exp() * expr.eval(start) / is * dir;
            let h = |t: f64| (-is * t).exp() * expr.deriv(t);
            let df = lobe_sum(h, start, dir, PI / s.abs(), &opts.lobes)?;
            let mut r = df.scale(1.0 / is);
            r.value += boundary;
            Ok(r)
        }
    }
}

/// f̂(s) with default tolerances.
pub fn transform(f: &PiecewiseFunction, s: f64, tol: f64) -> Result<QuadResult> {
    transform_with(f, s, &TransformOptions::with_tol(tol))
}

pub fn transform_with(f: &PiecewiseFunction, s: f64, opts: &TransformOptions) -> Result<QuadResult> {
    let p = plan(f)?;
    for st in [p.plus, p.minus] {
        if st == TailStrategy::Reject {
            return Err(Error::Hypothesis(
                "tails with nonzero limits or polynomial growth need the distributional transform".into(),
            ));
        }
    }
    let (a, b) = p.core;
    let mut total = QuadResult::zero();
    match p.pv {
        Some(o) => {
            let (l, r) = (o.center - o.radius, o.center + o.radius);
            total = total.combine(finite_oscillatory_with(f, a, l, s, opts)?);
            total = total.combine(pv_ball(f, o, s, opts)?);
            total = total.combine(finite_oscillatory_with(f, r, b, s, opts)?);
        }
        None => total = total.combine(finite_oscillatory_with(f, a, b, s, opts)?),
    }
    total = total.combine(tail_integral(f, b, TailSide::Plus, p.plus, s, opts)?);
    total = total.combine(tail_integral(f, a, TailSide::Minus, p.minus, s, opts)?);
    if !total.value.norm().is_finite() {
        return Err(Error::Divergent(format!("transform at s = {s} is not finite")));
    }
    Ok(total)
}

/// f̂(s) for a function with an odd-symmetry record, the integral over the
/// ball (c - δ, c + δ) taken as the principal value
/// e^{-isc}(-2i)∫_0^δ sin(su) f(c+u) du.
pub fn pv_transform(f: &PiecewiseFunction, s: f64) -> Result<QuadResult> {
    pv_transform_with(f, s, &TransformOptions::default())
}

pub fn pv_transform_with(f: &PiecewiseFunction, s: f64, opts: &TransformOptions) -> Result<QuadResult> {
    if f.odd_symmetry().is_none() {
        return Err(Error::NotOdd {
            center: f64::NAN,
            detail: "no odd-symmetry record".into(),
        });
    }
    transform_with(f, s, opts)
}

fn pv_ball(f: &PiecewiseFunction, o: OddSymmetry, s: f64, opts: &TransformOptions) -> Result<QuadResult> {
    let c = o.center;
    let mut cuts: Vec<f64> = vec![0.0];
    cuts.extend(f.features().iter().map(|&x| x - c).filter(|&u| u > 0.0 && u < o.radius));
    cuts.push(o.radius);
    let weighted = |u: f64| Complex64::new(u * f.value(c + u).abs(), 0.0);
    let w = integrate_points(weighted, &cuts, &opts.quad)
        .map_err(|_| Error::WeightedIntegrability(c))?;
    if !w.converged || !w.value.re.is_finite() {
        return Err(Error::WeightedIntegrability(c));
    }
    if s == 0.0 {
        return Ok(QuadResult::zero());
    }
    let mut pts = Vec::new();
    for win in cuts.windows(2) {
        let n = ((s.abs() * (win[1] - win[0]) / PI).ceil() as usize).clamp(1, 100_000);
        for k in 0..n {
            pts.push(win[0] + (win[1] - win[0]) * k as f64 / n as f64);
        }
    }
    pts.push(o.radius);
    let h = |u: f64| Complex64::new((s * u).sin() * f.value(c + u), 0.0);
    let r = integrate_points(h, &pts, &opts.quad)?;
    Ok(r.scale(-2.0 * I * (-I * s * c).exp()))
}

/// (1/2πi) ∫ e^{ips}/(s - ω) ds. For Im ω > 0 this is H(p)e^{ipω}; for real ω
/// the doubly symmetric principal value is sgn(p)e^{ipω}/2.
pub fn perron_kernel(p: f64, omega: Complex64) -> Result<QuadResult> {
    let lobes = LobeOptions {
        tol: 1e-10,
        ..LobeOptions::default()
    };
    let two_pi_i = 2.0 * PI * I;
    if omega.im == 0.0 {
        let d = dirichlet_integral(p)?;
        // PV ∫ e^{ipu}/u du = 2i ∫_0^∞ sin(pu)/u du
        let v = (I * p * omega.re).exp() * 2.0 * I * d.value / two_pi_i;
        return Ok(QuadResult { value: v, ..d });
    }
    if omega.im < 0.0 {
        return Err(Error::Hypothesis(format!("Im ω must be positive, got {omega}")));
    }
    let r = if p == 0.0 {
        let h = |s: f64| 2.0 * omega / (s * s - omega * omega);
        integrate_to_infinity(h, 0.0, 1.0, &QuadOptions::default())?
    } else {
        let h = |s: f64| (I * p * s).exp() / (s - omega) - (-I * p * s).exp() / (s + omega);
        // the first lobes are taken past the pole's neighbourhood before the series starts
        let start = (omega.norm() * 2.0 / (PI / p.abs())).ceil() * (PI / p.abs());
        let head = integrate(h, 0.0, start.max(PI / p.abs()), &QuadOptions::default())?;
        head.combine(lobe_sum(h, start.max(PI / p.abs()), 1.0, PI / p.abs(), &lobes)?)
    };
    Ok(r.scale(1.0 / two_pi_i))
}

/// ∫_0^∞ sin(px)/x dx = (π/2) sgn(p), by lobe summation.
pub fn dirichlet_integral(p: f64) -> Result<QuadResult> {
    if p == 0.0 {
        return Ok(QuadResult::zero());
    }
    let lobes = LobeOptions {
        tol: 1e-12,
        ..LobeOptions::default()
    };
    let h = |u: f64| Complex64::new(if u == 0.0 { 1.0 } else { u.sin() / u }, 0.0);
    Ok(lobe_sum(h, 0.0, 1.0, PI, &lobes)?.scale(Complex64::new(p.signum(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Affine, Func};
    use crate::func_model::atoms::*;
    use crate::func_model::FunctionDef;

    fn indicator() -> PiecewiseFunction {
        FunctionDef::default()
            .piece(f64::NEG_INFINITY, -1.0, Expr::Const(0.0))
            .piece(-1.0, 1.0, Expr::Const(1.0))
            .piece(1.0, f64::INFINITY, Expr::Const(0.0))
            .build()
            .unwrap()
    }

    #[test]
    fn indicator_transform() {
        let f = indicator();
        for &s in &[0.3, 1.0, 7.0, -2.5] {
            let r = finite_oscillatory(&f, -1.0, 1.0, s).unwrap();
            assert!((r.value - 2.0 * s.sin() / s).norm() < 1e-13);
            let r = transform(&f, s, 1e-10).unwrap();
            assert!((r.value - 2.0 * s.sin() / s).norm() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn decaying_tail_at_small_frequency() {
        let f = crate::parser::parse_function("on (-inf,0): 0 | on [0,inf): exp(-x)").unwrap();
        for &s in &[3e-4, 1e-5, -1e-7, 0.5] {
            let r = transform(&f, s, 1e-10).unwrap();
            let want = Complex64::new(1.0, s).inv();
            assert!((r.value - want).norm() < 1e-10, "s = {s}: {r:?}");
        }
    }

    #[test]
    fn linear_piece_closed_form() {
        let f = FunctionDef::default()
            .piece(f64::NEG_INFINITY, 0.0, Expr::Const(0.0))
            .piece(0.0, 1.0, Expr::X)
            .piece(1.0, f64::INFINITY, Expr::Const(0.0))
            .build()
            .unwrap();
        let r = finite_oscillatory(&f, 0.0, 1.0, PI).unwrap();
        let want = -I / PI - 2.0 / (PI * PI);
        assert!((r.value - want).norm() < 1e-14);
        // small s takes the quadrature path
        let s = 0.2;
        let r = finite_oscillatory(&f, 0.0, 1.0, s).unwrap();
        let oracle = integrate(|t| (-I * s * t).exp() * t, 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((r.value - oracle.value).norm() < 1e-14);
    }

    #[test]
    fn cantor_piece() {
        let f = FunctionDef::default()
            .piece(f64::NEG_INFINITY, 0.0, Expr::Const(0.0))
            .piece(0.0, 1.0, cantor())
            .piece(1.0, f64::INFINITY, Expr::Const(0.0))
            .build()
            .unwrap();
        let r = finite_oscillatory(&f, 0.0, 1.0, 0.0).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-9, "{r:?}");
        // (φ_C(s) - e^{-is})/(is) with the product formula
        for &s in &[1.0, 5.0, 30.0] {
            let r = finite_oscillatory(&f, 0.0, 1.0, s).unwrap();
            let want = (crate::cantor::cantor_char(s) - (-I * s).exp()) / (I * s);
            assert!((r.value - want).norm() < 1e-9, "s={s} {r:?} {want}");
        }
    }

    #[test]
    fn arctan_residual_transform() {
        let a = PiecewiseFunction::from_expr(atan()).unwrap();
        let (g, _) = a.subtract_asymptote().unwrap();
        for &s in &[0.1, -0.1, 1.0, -1.0, 5.0, -5.0] {
            let r = transform(&g, s, 1e-9).unwrap();
            let want = I * PI * (1.0 - (-s.abs()).exp()) / s;
            assert!((r.value - want).norm() < 1e-7, "s={s} {r:?} {want}");
        }
        assert!(matches!(transform(&g, 0.0, 1e-8), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn pv_alpha_half() {
        let e = sgn() * Expr::Pow(Box::new(Expr::kink(Func::Abs, Affine::new(1.0, 0.0))), -0.5);
        let f = FunctionDef::single(e).odd(0.0, 1.0).build().unwrap();
        let i_half = (PI / 2.0).sqrt();
        for &s in &[1.0, -1.0, 4.0, -4.0] {
            let r = transform(&f, s, 1e-9).unwrap();
            let want = -2.0 * I * s.signum() * s.abs().powf(-0.5) * i_half;
            assert!((r.value - want).norm() < 1e-7, "s={s} {r:?} {want}");
            assert!(r.value.re.abs() < 1e-10 * r.value.norm());
        }
    }

    #[test]
    fn kernels() {
        for &p in &[-3.0, -1.0, 0.0, 1.0, 3.0] {
            let d = dirichlet_integral(p).unwrap();
            assert!((d.value.re - PI / 2.0 * if p == 0.0 { 0.0 } else { p.signum() }).abs() < 1e-9);
        }
        for &w in &[Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)] {
            for &p in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
                let h = if p > 0.0 { 1.0 } else if p < 0.0 { 0.0 } else { 0.5 };
                let want = (I * p * w).exp() * h;
                let r = perron_kernel(p, w).unwrap();
                assert!((r.value - want).norm() < 1e-7, "p={p} ω={w} {r:?} {want}");
            }
        }
    }

    #[test]
    fn filon_matches_kronrod() {
        let e = Expr::Const(1.0) / (Expr::Const(1.0) + Expr::X * Expr::X);
        for &s in &[30.0, 400.0, 5000.0] {
            let f = filon_span(&e, 0.5, 3.0, s, 1e-13, 0).unwrap();
            let h = |t: f64| (-I * s * t).exp() * e.eval(t);
            let g = panelled(&h, 0.5, 3.0, s, &QuadOptions::default()).unwrap();
            assert!((f.value - g.value).norm() < 1e-12, "{s}: {:?} {:?}", f.value, g.value);
        }
    }
}
