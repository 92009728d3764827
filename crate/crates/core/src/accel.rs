//! Series acceleration and half-period lobe summation for conditionally
//! convergent oscillatory integrals.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_points, QuadOptions, QuadResult};

/// Euler transformation of a sequence of partial sums by repeated averaging
/// of neighbours. Returns the estimate whose successive difference is
/// smallest, together with that difference.
pub fn euler_average(partials: &[Complex64]) -> (Complex64, f64) {
    match partials.len() {
        0 => return (Complex64::new(0.0, 0.0), f64::INFINITY),
        1 => return (partials[0], f64::INFINITY),
        _ => {}
    }
    let mut row: Vec<Complex64> = partials.to_vec();
    let mut last = *row.last().unwrap();
    let mut best = (last, f64::INFINITY);
    while row.len() > 1 {
        row = row.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
        let cur = *row.last().unwrap();
        let diff = (cur - last).norm();
        if diff <= best.1 {
            best = (cur, diff);
        }
        last = cur;
    }
    best
}

/// Iterated Aitken Δ² on a sequence; returns the final estimate and the
/// size of the last correction.
pub fn aitken(seq: &[Complex64]) -> (Complex64, f64) {
    let mut cur: Vec<Complex64> = seq.to_vec();
    let mut err = f64::INFINITY;
    while cur.len() >= 3 {
        let mut next = Vec::with_capacity(cur.len() - 2);
        for w in cur.windows(3) {
            let d1 = w[1] - w[0];
            let d2 = w[2] - w[1];
            let denom = d2 - d1;
            if denom.norm() <= 1e-300 || !denom.norm().is_finite() {
                next.push(w[2]);
            } else {
                next.push(w[2] - d2 * d2 / denom);
            }
        }
        let prev = *cur.last().unwrap();
        cur = next;
        err = (*cur.last().unwrap() - prev).norm();
    }
    (*cur.last().unwrap_or(&Complex64::new(0.0, 0.0)), err)
}

/// Options for [`lobe_sum`].
#[derive(Debug, Clone, Copy)]
pub struct LobeOptions {
    pub tol: f64,
    pub min_lobes: usize,
    pub max_lobes: usize,
    /// Partial sums fed to each Euler estimate.
    pub window: usize,
    pub quad: QuadOptions,
}

impl Default for LobeOptions {
    fn default() -> Self {
        LobeOptions {
            tol: 1e-11,
            min_lobes: 24,
            max_lobes: 6000,
            window: 24,
            quad: QuadOptions {
                abs_tol: 1e-14,
                rel_tol: 1e-12,
                max_intervals: 2000,
            },
        }
    }
}

/// ∫ h over [start, ∞) (direction +1) or (-∞, start] (direction -1), where h
/// oscillates with half-period `half_period`. The integral is split into
/// lobes of one half-period each and the alternating partial sums are
/// accelerated with the Euler transformation.
pub fn lobe_sum<F>(h: F, start: f64, direction: f64, half_period: f64, opts: &LobeOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(half_period.is_finite() && half_period > 0.0) {
        return Err(Error::Domain(format!("invalid half period {half_period}")));
    }
    let mut partials: Vec<Complex64> = Vec::new();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0;
    let mut prev_est: Option<Complex64> = None;
    let mut small_run = 0usize;
    for k in 0..opts.max_lobes {
        let t0 = start + direction * (k as f64) * half_period;
        let t1 = start + direction * ((k + 1) as f64) * half_period;
        let (a, b, sign) = if direction > 0.0 { (t0, t1, 1.0) } else { (t1, t0, 1.0) };
        let lobe = if k == 0 {
            // panels shrinking geometrically towards `start`, so mass on a
            // scale far below the half-period is still seen
            let mut d = half_period / 8.0;
            let mut pts = vec![start, start + direction * half_period];
            while d >= 1e-3 {
                pts.push(start + direction * d);
                d /= 8.0;
            }
            pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            integrate_points(&h, &pts, &opts.quad)?
        } else {
            integrate(&h, a, b, &opts.quad)?
        };
        quad_err += lobe.abs_error;
        sum += lobe.value * sign;
        partials.push(sum);

        if lobe.value.norm() <= 1e-3 * opts.tol {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if k + 1 >= opts.min_lobes && small_run >= 4 {
            return Ok(QuadResult {
                value: sum,
                abs_error: quad_err + opts.tol * 1e-3,
                converged: true,
                diagnostics: k + 1,
            });
        }
        if k + 1 >= opts.min_lobes && (k + 1) % 4 == 0 {
            let w = opts.window.min(partials.len());
            let (est, diff) = euler_average(&partials[partials.len() - w..]);
            if let Some(p) = prev_est {
                let change = (est - p).norm();
                let err = change.max(diff.min(change * 10.0));
                if err <= opts.tol.max(1e-13 * est.norm()) {
                    return Ok(QuadResult {
                        value: est,
                        abs_error: err + quad_err,
                        converged: true,
                        diagnostics: k + 1,
                    });
                }
            }
            prev_est = Some(est);
        }
    }
    let w = opts.window.min(partials.len());
    let (est, diff) = euler_average(&partials[partials.len() - w..]);
    Ok(QuadResult {
        value: est,
        abs_error: diff + quad_err,
        converged: false,
        diagnostics: opts.max_lobes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_on_alternating_harmonic() {
        // 1 - 1/2 + 1/3 - ... = ln 2
        let mut s = 0.0;
        let partials: Vec<Complex64> = (1..=30)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                Complex64::new(s, 0.0)
            })
            .collect();
        let (est, _) = euler_average(&partials);
        assert!((est.re - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn aitken_on_geometric() {
        let seq: Vec<Complex64> = (0..6)
            .map(|n| Complex64::new(1.0 - 0.5f64.powi(n), 0.0))
            .collect();
        let (est, _) = aitken(&seq);
        assert!((est.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sine_integral_by_lobes() {
        let r = lobe_sum(
            |t| Complex64::new(if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0),
            0.0,
            1.0,
            std::f64::consts::PI,
            &LobeOptions::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value.re - std::f64::consts::FRAC_PI_2).abs() < 1e-10, "{:?}", r);
    }

    #[test]
    fn slowly_decaying_log_amplitude() {
        // ∫_e^∞ sin(t)/log(t) dt against a brute-force long partial sum with averaging
        let r = lobe_sum(
            |t| Complex64::new(t.sin() / t.ln(), 0.0),
            std::f64::consts::E,
            1.0,
            std::f64::consts::PI,
            &LobeOptions::default(),
        )
        .unwrap();
        assert!(r.converged, "{:?}", r);
        assert!(r.abs_error < 1e-8);
    }
}
