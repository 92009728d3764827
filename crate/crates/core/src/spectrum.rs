//! Transforms as evaluable objects for the inversion engine: closed forms,
//! and numerically computed transforms sampled on a block-adaptive grid.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::Result;
use crate::func_model::PiecewiseFunction;
use crate::oscillatory::{pv_transform_with, transform_with, TransformOptions};
use crate::quad::{gk15_panel, integrate_points, QuadOptions, QuadResult};

/// A transform ĝ(s) of a real function, so ĝ(-s) = conj ĝ(s).
pub trait Spectrum: Send + Sync {
    fn eval(&self, s: f64) -> Result<Complex64>;

    /// Points whose jumps and kinks set the oscillation frequencies |x - c|
    /// of e^{ixs}ĝ(s).
    fn features(&self) -> Vec<f64>;

    /// ∫_lo^hi e^{ixs} ĝ(s) ds.
    fn integrate_phase(&self, x: f64, lo: f64, hi: f64, tol: f64) -> Result<QuadResult> {
        phase_quadrature(|s| self.eval(s), &self.features(), x, lo, hi, tol)
    }
}

/// Adaptive GK of e^{ixs}ĝ(s) with panels no longer than a half-period of the
/// fastest oscillation.
fn phase_quadrature<G>(g: G, features: &[f64], x: f64, lo: f64, hi: f64, tol: f64) -> Result<QuadResult>
where
    G: Fn(f64) -> Result<Complex64>,
{
    if hi <= lo {
        return Ok(QuadResult::zero());
    }
    let omega = features.iter().map(|c| (x - c).abs()).fold(x.abs(), f64::max) + 1.0;
    let n = (((hi - lo) * omega / PI).ceil() as usize).clamp(1, 1_000_000);
    let pts: Vec<f64> = (0..=n).map(|k| if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 }).collect();
    let failure = std::cell::Cell::new(None);
    let h = |s: f64| match g(s) {
        Ok(v) => (Complex64::i() * x * s).exp() * v,
        Err(e) => {
            failure.set(Some(e));
            Complex64::new(0.0, 0.0)
        }
    };
    let opts = QuadOptions {
        abs_tol: tol,
        rel_tol: 1e-12,
        max_intervals: (8 * n).max(2000),
    };
    let r = integrate_points(h, &pts, &opts)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

type SpectrumFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A transform known in closed form.
pub struct ClosedForm {
    f: Box<SpectrumFn>,
    features: Vec<f64>,
}

impl ClosedForm {
    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static, features: Vec<f64>) -> Self {
        ClosedForm { f: Box::new(f), features }
    }
}

impl Spectrum for ClosedForm {
    fn eval(&self, s: f64) -> Result<Complex64> {
        Ok((self.f)(s))
    }

    fn features(&self) -> Vec<f64> {
        self.features.clone()
    }
}

/// A numerical transform evaluated afresh at every frequency. Functions with
/// an odd-symmetry record are transformed as principal values.
pub struct DirectTransform {
    f: PiecewiseFunction,
    opts: TransformOptions,
}

impl DirectTransform {
    pub fn new(f: PiecewiseFunction, tol: f64) -> Self {
        DirectTransform {
            f,
            opts: TransformOptions::with_tol(tol),
        }
    }
}

impl Spectrum for DirectTransform {
    fn eval(&self, s: f64) -> Result<Complex64> {
        let r = if self.f.odd_symmetry().is_some() {
            pv_transform_with(&self.f, s, &self.opts)?
        } else {
            transform_with(&self.f, s, &self.opts)?
        };
        Ok(r.value)
    }

    fn features(&self) -> Vec<f64> {
        self.f.features()
    }
}

const BLOCK: f64 = 2.0;

/// Samples of ĝ(s)e^{ims} on [k·BLOCK - h, (k+1)·BLOCK + h] at spacing h.
struct Block {
    start: f64,
    h: f64,
    values: Vec<Complex64>,
}

fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

impl Block {
    fn nodes(&self) -> usize {
        self.values.len() - 3
    }

    /// values[j + 1] sits at start + j·h.
    fn interp(&self, s: f64) -> Complex64 {
        let u = (s - self.start) / self.h;
        let i = (u.floor() as isize).clamp(0, self.nodes() as isize - 1) as usize;
        let w = cubic_weights(u - i as f64);
        (0..4).map(|k| self.values[i + k] * w[k]).sum()
    }
}

/// Numerical transform of a piecewise function. Frequencies below
/// `direct_below` are evaluated directly; above it ĝ is sampled on blocks of
/// width 2 whose spacing is halved until cubic interpolation reproduces the
/// midpoints within `cache_tol`.
pub struct SampledTransform {
    f: PiecewiseFunction,
    opts: TransformOptions,
    center: f64,
    direct_below: f64,
    cache_tol: f64,
    blocks: RwLock<HashMap<i64, Arc<Block>>>,
}

impl SampledTransform {
    pub fn new(f: PiecewiseFunction, cache_tol: f64) -> Self {
        let feats = f.features();
        let center = if feats.is_empty() {
            0.0
        } else {
            let lo = feats.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = feats.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            0.5 * (lo + hi)
        };
        SampledTransform {
            f,
            opts: TransformOptions::with_tol(1e-11),
            center,
            direct_below: BLOCK,
            cache_tol,
            blocks: RwLock::new(HashMap::new()),
        }
    }

    pub fn function(&self) -> &PiecewiseFunction {
        &self.f
    }

    pub fn direct(&self, s: f64) -> Result<Complex64> {
        Ok(transform_with(&self.f, s, &self.opts)?.value)
    }

    fn radius(&self) -> f64 {
        self.f
            .features()
            .iter()
            .map(|c| (c - self.center).abs())
            .fold(0.0, f64::max)
            + 1.0
    }

    fn centred(&self, s: f64) -> Result<Complex64> {
        Ok(self.direct(s)? * (Complex64::i() * self.center * s).exp())
    }

    fn build_block(&self, k: i64) -> Result<Block> {
        let start = k as f64 * BLOCK;
        let mut n = ((BLOCK * self.radius() / 0.5).ceil() as usize).next_power_of_two().max(8);
        let mut h = BLOCK / n as f64;
        let mut values: Vec<Complex64> = (0..n + 3)
            .map(|j| self.centred(start + (j as f64 - 1.0) * h))
            .collect::<Result<_>>()?;
        loop {
            let coarse = Block { start, h, values };
            let mids: Vec<Complex64> = (0..n)
                .map(|j| self.centred(start + (j as f64 + 0.5) * h))
                .collect::<Result<_>>()?;
            let err = mids
                .iter()
                .enumerate()
                .map(|(j, m)| (coarse.interp(start + (j as f64 + 0.5) * h) - m).norm())
                .fold(0.0, f64::max);
            let mut fine = Vec::with_capacity(2 * n + 3);
            fine.push(self.centred(start - 0.5 * h)?);
            for (v, m) in coarse.values[1..=n].iter().zip(&mids) {
                fine.push(*v);
                fine.push(*m);
            }
            fine.push(coarse.values[n + 1]);
            fine.push(self.centred(start + BLOCK + 0.5 * h)?);
            values = fine;
            n *= 2;
            h *= 0.5;
            if err <= self.cache_tol || n >= 1 << 14 {
                return Ok(Block { start, h, values });
            }
        }
    }

    fn block(&self, k: i64) -> Result<Arc<Block>> {
        if let Some(b) = self.blocks.read().unwrap().get(&k) {
            return Ok(b.clone());
        }
        let b = Arc::new(self.build_block(k)?);
        self.blocks.write().unwrap().entry(k).or_insert_with(|| b.clone());
        Ok(b)
    }

    fn cached(&self, s: f64) -> Result<Complex64> {
        let b = self.block((s / BLOCK).floor() as i64)?;
        Ok(b.interp(s) * (-Complex64::i() * self.center * s).exp())
    }

    pub fn cached_blocks(&self) -> usize {
        self.blocks.read().unwrap().len()
    }

    /// ∫_lo^hi e^{ixs}ĝ(s) ds over lo ≥ direct_below, one Kronrod panel per
    /// node interval of the interpolant.
    fn phase_cached(&self, x: f64, lo: f64, hi: f64) -> Result<QuadResult> {
        let mut total = QuadResult::zero();
        let mut k = (lo / BLOCK).floor() as i64;
        while (k as f64) * BLOCK < hi {
            let b = self.block(k)?;
            let (b0, b1) = (b.start.max(lo), (b.start + BLOCK).min(hi));
            if b1 > b0 {
                let j0 = ((b0 - b.start) / b.h).floor() as usize;
                let j1 = ((b1 - b.start) / b.h).ceil() as usize;
                for j in j0..j1 {
                    let p0 = (b.start + j as f64 * b.h).max(b0);
                    let p1 = (b.start + (j + 1) as f64 * b.h).min(b1);
                    if p1 > p0 {
                        let h = |s: f64| (Complex64::i() * (x - self.center) * s).exp() * b.interp(s);
                        total = total.combine(gk15_panel(h, p0, p1)?);
                    }
                }
            }
            k += 1;
        }
        total.abs_error += self.cache_tol * (hi - lo);
        Ok(total)
    }
}

impl Spectrum for SampledTransform {
    fn eval(&self, s: f64) -> Result<Complex64> {
        if s.abs() < self.direct_below {
            self.direct(s)
        } else if s > 0.0 {
            self.cached(s)
        } else {
            Ok(self.cached(-s)?.conj())
        }
    }

    fn features(&self) -> Vec<f64> {
        self.f.features()
    }

    fn integrate_phase(&self, x: f64, lo: f64, hi: f64, tol: f64) -> Result<QuadResult> {
        if hi <= lo {
            return Ok(QuadResult::zero());
        }
        let d = self.direct_below;
        let feats = self.features();
        let mut total = QuadResult::zero();
        // s < 0 through ĝ(-u) = conj ĝ(u)
        if lo < -d {
            let r = self.phase_cached(x, d.max(-hi), -lo)?;
            total = total.combine(QuadResult { value: r.value.conj(), ..r });
        }
        let (m0, m1) = (lo.max(-d), hi.min(d));
        if m1 > m0 {
            total = total.combine(phase_quadrature(|s| self.direct(s), &feats, x, m0, m1, tol)?);
        }
        if hi > d {
            total = total.combine(self.phase_cached(x, lo.max(d), hi)?);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
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
    fn cache_matches_closed_form() {
        let g = SampledTransform::new(indicator(), 1e-10);
        let exact = |s: f64| 2.0 * s.sin() / s;
        for &s in &[-7.3, -1.2, 0.4, 1.5, 3.25, 9.9] {
            let v = g.eval(s).unwrap();
            assert!((v.re - exact(s)).abs() < 1e-9 && v.im.abs() < 1e-9, "{s}: {v}");
        }
        let x = 0.3;
        let cf = ClosedForm::new(move |s| Complex64::new(exact(s), 0.0), vec![-1.0, 1.0]);
        for &(lo, hi) in &[(-12.0, -3.0), (-0.5, 0.7), (2.0, 15.5), (-4.0, 4.0)] {
            let a = g.integrate_phase(x, lo, hi, 1e-12).unwrap().value;
            let b = cf.integrate_phase(x, lo, hi, 1e-12).unwrap().value;
            assert!((a - b).norm() < 1e-8, "[{lo},{hi}]: {a} {b}");
        }
    }
}
