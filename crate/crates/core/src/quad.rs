//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value of a numerical integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub converged: bool,
    /// Panels used, or series terms for lobe sums.
    pub diagnostics: usize,
}

impl QuadResult {
    pub fn exact(value: Complex64) -> Self {
        QuadResult {
            value,
            abs_error: 0.0,
            converged: true,
            diagnostics: 0,
        }
    }

    pub fn zero() -> Self {
        Self::exact(Complex64::new(0.0, 0.0))
    }

    /// Sum of two independent results.
    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            converged: self.converged && other.converged,
            diagnostics: self.diagnostics + other.diagnostics,
        }
    }

    pub fn scale(self, c: Complex64) -> QuadResult {
        QuadResult {
            value: self.value * c,
            abs_error: self.abs_error * c.norm(),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 20_000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    for (j, &x) in XGK.iter().enumerate() {
        if j == 7 {
            fv[7] = f(center);
        } else {
            fv[j] = f(center - half * x);
            fv[14 - j] = f(center + half * x);
        }
    }
    for (j, v) in fv.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            let x = if j <= 7 {
                center - half * XGK[j]
            } else {
                center + half * XGK[14 - j]
            };
            return Err(Error::Singularity(x));
        }
    }
    let mut kron = fv[7] * WGK[7];
    let mut gauss = fv[7] * WG[3];
    let mut res_abs = fv[7].norm() * WGK[7];
    for j in 0..7 {
        let pair = fv[j] + fv[14 - j];
        kron += pair * WGK[j];
        res_abs += (fv[j].norm() + fv[14 - j].norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut res_asc = (fv[7] - mean).norm() * WGK[7];
    for j in 0..7 {
        res_asc += ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm()) * WGK[j];
    }
    let h = half.abs();
    let err = rescale_error(((kron - gauss) * half).norm(), res_abs * h, res_asc * h);
    Ok(Panel {
        a,
        b,
        value: kron * half,
        error: err,
    })
}

/// One non-adaptive 15-point Kronrod panel.
pub fn gk15_panel<F>(f: F, a: f64, b: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let p = gk15(&f, a, b)?;
    Ok(QuadResult {
        value: p.value,
        abs_error: p.error,
        converged: true,
        diagnostics: 1,
    })
}

/// ∫_a^b f over a finite interval.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_points(f, &[a, b], opts)
}

/// ∫ f over [pts[0], pts[last]] with the given points as initial panel edges.
pub fn integrate_points<F>(f: F, pts: &[f64], opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if pts.len() < 2 {
        return Ok(QuadResult::zero());
    }
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let p = gk15(&f, w[0], w[1])?;
            total += p.value;
            total_err += p.error;
            heap.push(p);
        }
    }
    let mut count = heap.len();
    let mut stuck = Vec::new();
    let mut stuck_err = 0.0;
    while total_err - stuck_err > opts.abs_tol.max(opts.rel_tol * total.norm()) && count < opts.max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if mid <= worst.a || mid >= worst.b || width < 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) || width < 1e-250 {
            stuck_err += worst.error;
            stuck.push(worst);
            continue;
        }
        let left = gk15(&f, worst.a, mid)?;
        let right = gk15(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        count += 1;
    }
    // re-sum to shed accumulated cancellation in the running totals
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in heap.iter().chain(stuck.iter()) {
        value += p.value;
        err += p.error;
    }
    let tol = opts.abs_tol.max(opts.rel_tol * value.norm());
    Ok(QuadResult {
        value,
        abs_error: err,
        converged: err <= tol,
        diagnostics: count,
    })
}

/// ∫ f over [a, ∞) (direction = +1) or (-∞, a] (direction = -1), using the
/// map t = a ± u/(1-u). The integrand must be absolutely integrable.
pub fn integrate_to_infinity<F>(f: F, a: f64, direction: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let g = |u: f64| {
        let v = 1.0 - u;
        let t = a + direction * u / v;
        let jac = 1.0 / (v * v);
        let y = f(t);
        if jac.is_finite() && y.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            y * jac
        }
    };
    integrate_points(g, &[0.0, 0.5, 0.75, 0.875, 1.0], opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex64 {
        move |t| Complex64::new(f(t), 0.0)
    }

    #[test]
    fn polynomials_and_smooth() {
        let o = QuadOptions::default();
        let r = integrate(re(|t| t * t), 0.0, 1.0, &o).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-14);
        let r = integrate(re(f64::sin), 0.0, std::f64::consts::PI, &o).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn endpoint_singularity() {
        let o = QuadOptions::default();
        let r = integrate(re(|t| t.powf(-0.5)), 0.0, 1.0, &o).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-9, "{:?}", r);
    }

    #[test]
    fn semi_infinite() {
        let o = QuadOptions::default();
        let r = integrate_to_infinity(re(|t| (-t).exp()), 0.0, 1.0, &o).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
        let r = integrate_to_infinity(re(|t| 1.0 / (1.0 + t * t)), 0.0, -1.0, &o).unwrap();
        assert!((r.value.re - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }
}
