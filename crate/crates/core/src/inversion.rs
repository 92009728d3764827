//! Pointwise Fourier inversion: (f(x-) + f(x+))/2 recovered as
//! (1/2π) lim ∫_{S<|s-a|<T} e^{ixs} f̂(s) ds.
//!
//! S and T move in interleaved stages (S halving four times per stage, T
//! doubling). Each outer value averages truncations shifted by half-periods
//! of the dominant frequencies |x - c|, and Aitken's Δ² is applied across
//! stages.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::func_model::{OddSymmetry, PiecewiseFunction, TailClass};
use crate::quad::{integrate, QuadOptions};
use crate::spectrum::{SampledTransform, Spectrum};

/// sin(uU)/u, equal to U at u = 0.
pub fn sinc_kernel(u: f64, big_u: f64) -> f64 {
    if u == 0.0 {
        big_u
    } else {
        (u * big_u).sin() / u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InnerMode {
    /// Integrate through s = a with no exclusion.
    None,
    AboutZero,
    AboutPoint(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OuterMode {
    Symmetric,
    /// T restricted to (2n+1)π/(2|x - c|).
    Sequence { center: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Acceleration {
    None,
    Averaging,
    Aitken,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PVLimitSpec {
    pub inner: InnerMode,
    pub outer: OuterMode,
    pub accel: Acceleration,
    pub max_stages: usize,
    pub tol: f64,
}

impl PVLimitSpec {
    pub fn symmetric(tol: f64) -> Self {
        PVLimitSpec {
            inner: InnerMode::AboutZero,
            outer: OuterMode::Symmetric,
            accel: Acceleration::Aitken,
            max_stages: 10,
            tol,
        }
    }

    pub fn sequence(center: f64, tol: f64) -> Self {
        PVLimitSpec {
            outer: OuterMode::Sequence { center },
            ..Self::symmetric(tol)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stage {
    pub stage: usize,
    pub s_inner: f64,
    pub t_outer: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionReport {
    pub x: f64,
    pub recovered: f64,
    pub target: Option<f64>,
    pub stages: Vec<Stage>,
    pub converged: bool,
    pub error_estimate: f64,
}

impl InversionReport {
    /// Rows `stage,S,T,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,S,T,re,im\n");
        for s in &self.stages {
            let _ = writeln!(out, "{},{:.17e},{:.17e},{:.17e},{:.17e}", s.stage, s.s_inner, s.t_outer, s.value.re, s.value.im);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    fn shifted(mut self, c: f64) -> Self {
        self.recovered += c;
        for s in &mut self.stages {
            s.value += c;
        }
        self
    }
}

/// Distinct nonzero frequencies |x - c|, smallest first.
fn frequencies(features: &[f64], x: f64) -> Vec<f64> {
    let mut w: Vec<f64> = features.iter().map(|c| (x - c).abs()).filter(|&w| w > 1e-9).collect();
    w.sort_by(|a, b| a.partial_cmp(b).unwrap());
    w.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.max(1.0));
    w
}

/// Offsets at which truncations are averaged: all sums of subsets of the
/// half-periods π/ω, each with equal weight.
fn averaging_offsets(freqs: &[f64]) -> Vec<f64> {
    let mut offs = vec![0.0];
    for &w in freqs.iter().take(4) {
        let p = PI / w;
        let more: Vec<f64> = offs.iter().map(|o| o + p).collect();
        offs.extend(more);
    }
    offs
}

struct Plan {
    a: f64,
    exclude: bool,
    u_mid: f64,
    t_of: Box<dyn Fn(usize) -> f64>,
    offsets: Vec<f64>,
    aitken: bool,
}

/// ∫ over S<|s-a|<T of e^{ixs}ĝ(s): the two mirrored pieces in u = |s - a|.
fn both_sides(g: &dyn Spectrum, x: f64, a: f64, u0: f64, u1: f64, tol: f64) -> Result<Complex64> {
    if u1 <= u0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = g.integrate_phase(x, a + u0, a + u1, tol)?;
    let l = g.integrate_phase(x, a - u1, a - u0, tol)?;
    Ok(r.value + l.value)
}

fn run(g: &dyn Spectrum, x: f64, plan: &Plan, max_stages: usize, tol: f64) -> Result<InversionReport> {
    let qtol = 1e-3 * tol;
    let two_pi = 2.0 * PI;
    let mut stages = Vec::new();
    // inner: [S, u_mid], S = u_mid·16^{-(k+1)}
    let mut inner = if plan.exclude {
        both_sides(g, x, plan.a, plan.u_mid / 16.0, plan.u_mid, qtol)?
    } else {
        both_sides(g, x, plan.a, 0.0, plan.u_mid, qtol)?
    };
    let mut s_cur = if plan.exclude { plan.u_mid / 16.0 } else { 0.0 };
    let mut inner_delta = f64::INFINITY;
    // outer: cumulative ∫ from u_mid to T_k
    let mut t_prev = plan.u_mid;
    let mut cumulative = Complex64::new(0.0, 0.0);
    let mut outer_seq: Vec<Complex64> = Vec::new();
    let mut accel_seq: Vec<Complex64> = Vec::new();
    let mut converged = false;
    let mut err = f64::INFINITY;
    for k in 0..max_stages {
        if k > 0 && plan.exclude {
            let s_next = s_cur / 16.0;
            let d = both_sides(g, x, plan.a, s_next, s_cur, qtol)?;
            inner += d;
            inner_delta = d.norm() / two_pi;
            s_cur = s_next;
        } else if k > 0 {
            inner_delta = 0.0;
        }
        let t = (plan.t_of)(k);
        cumulative += both_sides(g, x, plan.a, t_prev, t, qtol)?;
        t_prev = t;
        let mut offs = plan.offsets.clone();
        offs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut run_sum = cumulative;
        let mut last = t;
        let mut avg = Complex64::new(0.0, 0.0);
        for &o in &offs {
            run_sum += both_sides(g, x, plan.a, last, t + o, qtol)?;
            last = t + o;
            avg += run_sum;
        }
        avg /= offs.len() as f64;
        outer_seq.push(avg);
        let acc = if plan.aitken && outer_seq.len() >= 3 {
            let n = outer_seq.len();
            let (o0, o1, o2) = (outer_seq[n - 3], outer_seq[n - 2], outer_seq[n - 1]);
            let (d1, d2) = (o1 - o0, o2 - o1);
            let den = d2 - d1;
            if d2.norm() < d1.norm() && den.norm() > 1e-300 {
                o2 - d2 * d2 / den
            } else {
                o2
            }
        } else {
            avg
        };
        accel_seq.push(acc);
        let value = (inner + acc) / two_pi;
        stages.push(Stage {
            stage: k,
            s_inner: s_cur,
            t_outer: t,
            value,
        });
        if accel_seq.len() >= 2 {
            let n = accel_seq.len();
            let outer_delta = (accel_seq[n - 1] - accel_seq[n - 2]).norm() / two_pi;
            err = outer_delta + if inner_delta.is_finite() { inner_delta } else { 0.0 };
            if k >= 2 && outer_delta < 0.1 * tol && inner_delta < 0.1 * tol {
                converged = true;
                break;
            }
        }
    }
    let last = stages.last().map(|s| s.value).unwrap_or_default();
    Ok(InversionReport {
        x,
        recovered: last.re,
        target: None,
        stages,
        converged,
        error_estimate: err,
    })
}

fn check_converged(r: InversionReport) -> Result<InversionReport> {
    if r.converged {
        Ok(r)
    } else {
        let tail: Vec<String> = r
            .stages
            .iter()
            .rev()
            .take(3)
            .map(|s| format!("T={:.4e}: {:.10}", s.t_outer, s.value.re))
            .collect();
        Err(Error::NonConvergence(format!(
            "x = {}: stages did not settle (last: {}; estimate {:.3e})",
            r.x,
            tail.join(", "),
            r.error_estimate
        )))
    }
}

fn t_base(freqs: &[f64]) -> f64 {
    freqs.first().map_or(24.0, |w| (6.0 * PI / w).max(24.0))
}

fn sequence_t(x: f64, c: f64, t: f64) -> f64 {
    let w = (x - c).abs();
    let n = ((t * w / PI - 0.5) / 2.0).ceil().max(0.0);
    (2.0 * n + 1.0) * PI / (2.0 * w)
}

/// (1/2π) · the double limit, as configured by `spec`.
pub fn pv_invert(g: &dyn Spectrum, x: f64, spec: &PVLimitSpec) -> Result<InversionReport> {
    let freqs = frequencies(&g.features(), x);
    let (a, exclude) = match spec.inner {
        InnerMode::None => (0.0, false),
        InnerMode::AboutZero => (0.0, true),
        InnerMode::AboutPoint(a) => (a, true),
    };
    let t0 = t_base(&freqs);
    let (t_of, shift_freqs): (Box<dyn Fn(usize) -> f64>, Vec<f64>) = match spec.outer {
        OuterMode::Symmetric => (Box::new(move |k| t0 * 2f64.powi(k as i32)), freqs.clone()),
        OuterMode::Sequence { center } => {
            let w = (x - center).abs();
            if w == 0.0 {
                return Err(Error::Domain("the Tₙ sequence needs x ≠ c".into()));
            }
            let t0 = t0.max(6.0 * PI / w);
            (Box::new(move |k| sequence_t(x, center, t0 * 2f64.powi(k as i32))), vec![w])
        }
    };
    let offsets = match spec.accel {
        Acceleration::None => vec![0.0],
        _ => averaging_offsets(&shift_freqs),
    };
    let plan = Plan {
        a,
        exclude,
        u_mid: 1.0,
        t_of,
        offsets,
        aitken: spec.accel == Acceleration::Aitken,
    };
    check_converged(run(g, x, &plan, spec.max_stages, spec.tol)?)
}

/// (1/2π)∫_{S<|s|<Tₙ} e^{ixs} f̂(s) ds for the transform of a function
/// supported on the ball of `odd`, with x outside the closed ball. Stages
/// walk n up to `n_max` over n_max/8, n_max/4, n_max/2, n_max.
pub fn tn_limit(f_hat: &dyn Spectrum, x: f64, odd: OddSymmetry, n_max: usize, tol: f64) -> Result<InversionReport> {
    let c = odd.center;
    if (x - c).abs() <= odd.radius {
        return Err(Error::Domain(format!("x = {x} lies in [c - δ, c + δ] = [{}, {}]", c - odd.radius, c + odd.radius)));
    }
    let w = (x - c).abs();
    let ns: Vec<usize> = [8usize, 4, 2, 1].iter().map(|d| (n_max / d).max(1)).collect();
    let t_of = move |k: usize| (2.0 * ns[k.min(3)] as f64 + 1.0) * PI / (2.0 * w);
    let plan = Plan {
        a: 0.0,
        exclude: true,
        u_mid: 1.0_f64.min(0.5 * t_of(0)),
        t_of: Box::new(t_of),
        offsets: vec![0.0],
        aitken: false,
    };
    let mut r = run(f_hat, x, &plan, 4, tol)?;
    // the contract is about the value at n_max, not stage-to-stage settling
    r.converged = r.stages.len() == 4;
    r.target = Some(0.0);
    Ok(r)
}

/// Inversion of f at x, dispatched on its tail classes and PV record.
pub fn invert_pointwise(f: &PiecewiseFunction, x: f64, tol: f64) -> Result<InversionReport> {
    invert_pointwise_with(f, None, x, tol)
}

/// As [`invert_pointwise`], with an optional closed form for the transform
/// of the residual g = f - H(x)p₊(x) - H(-x)p₋(x).
pub fn invert_pointwise_with(f: &PiecewiseFunction, residual_hat: Option<&dyn Spectrum>, x: f64, tol: f64) -> Result<InversionReport> {
    if f.singularities().contains(&x) {
        return Err(Error::Domain(format!("x = {x} is a singular point")));
    }
    let odd = f.odd_symmetry().filter(|o| f.singularities().iter().any(|&c| (c - o.center).abs() < o.radius));
    if let Some(o) = odd {
        if (x - o.center).abs() <= o.radius {
            return Err(Error::Domain(format!("x = {x} lies in the principal-value ball about {}", o.center)));
        }
    }
    let (tp, tm) = f.classify_tails()?;
    let polynomial = [&tp, &tm].iter().any(|t| matches!(t.class, TailClass::BvLimit(_) | TailClass::PolynomialGrowth(_)));
    let (g, add_back) = if polynomial {
        let (g, rec) = f.subtract_asymptote()?;
        (g, rec.eval(x))
    } else {
        (f.clone(), 0.0)
    };
    let spec = match odd {
        Some(o) => PVLimitSpec::sequence(o.center, tol),
        None => PVLimitSpec::symmetric(tol),
    };
    let owned;
    let spectrum: &dyn Spectrum = match residual_hat {
        Some(s) => s,
        None => {
            owned = SampledTransform::new(g, 1e-3 * tol);
            &owned
        }
    };
    let mut r = pv_invert(spectrum, x, &spec)?.shifted(add_back);
    r.target = f.midpoint_value(x).ok();
    Ok(r)
}

/// Inversion at x ∈ (a, b) of the transform of f restricted to [a, b].
pub fn local_inversion(f: &PiecewiseFunction, a: f64, b: f64, x: f64, tol: f64) -> Result<InversionReport> {
    local_inversion_with(f, a, b, None, x, tol)
}

/// As [`local_inversion`], optionally with a known transform of the
/// restriction. Local parts are often only Hölder continuous, so the stage
/// budget is larger than for [`invert_pointwise`].
pub fn local_inversion_with(
    f: &PiecewiseFunction,
    a: f64,
    b: f64,
    local_hat: Option<&dyn Spectrum>,
    x: f64,
    tol: f64,
) -> Result<InversionReport> {
    if !(a < x && x < b) {
        return Err(Error::Domain(format!("x = {x} is not inside ({a}, {b})")));
    }
    let spec = PVLimitSpec {
        max_stages: 16,
        ..PVLimitSpec::symmetric(tol)
    };
    let owned;
    let spectrum: &dyn Spectrum = match local_hat {
        Some(s) => s,
        None => {
            owned = SampledTransform::new(f.masked(a, b, true)?, 1e-3 * tol);
            &owned
        }
    };
    let mut r = pv_invert(spectrum, x, &spec)?;
    r.target = f.midpoint_value(x).ok();
    Ok(r)
}

/// (1/2π)∫_A^B e^{ixs} f̂_out(s) ds where f_out is f outside [a, b]. By
/// Fubini this is (1/2π)∫ f_out(t) (e^{i(x-t)B} - e^{i(x-t)A})/(i(x-t)) dt,
/// which is what is evaluated.
pub fn remainder_decay(f: &PiecewiseFunction, a: f64, b: f64, x: f64, big_a: f64, big_b: f64) -> Result<Complex64> {
    if !(a < x && x < b) {
        return Err(Error::Domain(format!("x = {x} is not inside ({a}, {b})")));
    }
    let out = f.masked(a, b, false)?;
    let kernel = |t: f64| {
        let u = x - t;
        let k = ((Complex64::i() * u * big_b).exp() - (Complex64::i() * u * big_a).exp()) / (Complex64::i() * u);
        k * out.value(t)
    };
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_intervals: 50_000,
    };
    let w = big_a.abs().max(big_b.abs()).max(1.0);
    let mut total = Complex64::new(0.0, 0.0);
    let mut cuts: Vec<f64> = out.features();
    cuts.retain(|c| c.is_finite());
    let lo = cuts.iter().copied().fold(a, f64::min) - 1.0;
    let hi = cuts.iter().copied().fold(b, f64::max) + 1.0;
    cuts.extend([lo, hi]);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    for win in cuts.windows(2) {
        let n = ((w * (win[1] - win[0]) / PI).ceil() as usize).max(1);
        for j in 0..n {
            let p0 = win[0] + (win[1] - win[0]) * j as f64 / n as f64;
            let p1 = win[0] + (win[1] - win[0]) * (j + 1) as f64 / n as f64;
            total += integrate(kernel, p0, p1, &opts)?.value;
        }
    }
    // tails: the outside part is L¹ there, so a long but finite sweep suffices
    for (start, dir) in [(hi, 1.0), (lo, -1.0)] {
        let r = crate::quad::integrate_to_infinity(kernel, start, dir, &opts);
        if let Ok(r) = r {
            total += r.value;
        }
    }
    Ok(total / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::func_model::FunctionDef;
    use crate::spectrum::ClosedForm;

    #[test]
    fn sinc_values() {
        assert_eq!(sinc_kernel(0.0, 3.0), 3.0);
        assert!(sinc_kernel(PI, 1.0).abs() < 1e-15);
        assert!((sinc_kernel(1.0, PI / 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_spectrum() {
        let z = ClosedForm::new(|_| Complex64::new(0.0, 0.0), vec![]);
        let r = pv_invert(&z, 0.7, &PVLimitSpec::symmetric(1e-8)).unwrap();
        assert_eq!(r.recovered, 0.0);
    }

    #[test]
    fn arctan_residual_closed_form() {
        let g = ClosedForm::new(
            |s: f64| {
                if s == 0.0 {
                    Complex64::new(0.0, PI)
                } else {
                    Complex64::i() * PI * (1.0 - (-s.abs()).exp()) / s
                }
            },
            vec![0.0],
        );
        let r = pv_invert(&g, 1.0, &PVLimitSpec::symmetric(1e-6)).unwrap();
        assert!((r.recovered + PI / 4.0).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn indicator_midpoints() {
        let f = FunctionDef::default()
            .piece(f64::NEG_INFINITY, -1.0, Expr::Const(0.0))
            .piece(-1.0, 1.0, Expr::Const(1.0))
            .piece(1.0, f64::INFINITY, Expr::Const(0.0))
            .at(1.0, 7.0)
            .build()
            .unwrap();
        for &(x, want) in &[(1.0, 0.5), (0.3, 1.0), (-2.5, 0.0)] {
            let r = invert_pointwise(&f, x, 1e-5).unwrap();
            assert!((r.recovered - want).abs() < 1e-5, "{x}: {r:?}");
        }
    }
}
