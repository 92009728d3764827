//! Seeded random admissible functions for the property suites.
//!
//! A function has up to `max_breaks` breakpoints in `span`, finite pieces
//! built from one or two atoms, and exponentially decaying outer pieces, so
//! it is regulated, locally BV and integrable on ℝ.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{Affine, Expr, Func};
use crate::func_model::{FunctionDef, PiecewiseFunction};

#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub span: (f64, f64),
    pub max_breaks: usize,
    /// Allow Cantor atoms on finite pieces.
    pub cantor: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            span: (-2.0, 2.0),
            max_breaks: 5,
            cantor: true,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multiples of 1/64, so breakpoints are exact binary fractions.
fn grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let n = ((hi - lo) * 64.0) as i64;
    lo + rng.gen_range(1..n) as f64 / 64.0
}

fn coef(rng: &mut ChaCha8Rng) -> f64 {
    (rng.gen_range(-2.0..2.0f64) * 8.0).round() / 8.0
}

fn atom(rng: &mut ChaCha8Rng, lo: f64, hi: f64, cantor: bool) -> Expr {
    let c = coef(rng);
    let k = rng.gen_range(0.25..2.0f64);
    let kinds = if cantor { 7 } else { 6 };
    match rng.gen_range(0..kinds) {
        0 => Expr::Const(c),
        1 => Expr::polynomial(&[c, coef(rng), 0.5 * coef(rng)]),
        2 => Expr::Const(c) * Expr::apply(Func::Sin, Expr::Const(k) * Expr::X + Expr::Const(coef(rng))),
        3 => Expr::Const(c) * Expr::apply(Func::Exp, Expr::Const(0.5 * coef(rng)) * Expr::X),
        4 => Expr::Const(c) * Expr::apply(Func::Atan, Expr::Const(k) * Expr::X),
        5 => {
            let m = 0.5 * (lo + hi);
            Expr::Const(c) * Expr::kink(Func::Abs, Affine::new(1.0, -m))
        }
        _ => {
            // maps [lo, hi] onto [0, 1]
            let w = hi - lo;
            Expr::Const(c) * Expr::kink(Func::Cantor, Affine::new(1.0 / w, -lo / w))
        }
    }
}

/// A random function following `spec`.
pub fn random_function(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> PiecewiseFunction {
    let (a, b) = spec.span;
    let n = rng.gen_range(0..=spec.max_breaks);
    let mut cuts: Vec<f64> = (0..n).map(|_| grid(rng, a, b)).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    if cuts.is_empty() {
        cuts.push(grid(rng, a, b));
    }
    let first = cuts[0];
    let last = *cuts.last().unwrap();
    let mut def = FunctionDef::default().piece(
        f64::NEG_INFINITY,
        first,
        Expr::Const(coef(rng)) * Expr::apply(Func::Exp, Expr::X - Expr::Const(first)),
    );
    for w in cuts.windows(2) {
        let mut e = atom(rng, w[0], w[1], spec.cantor);
        if rng.gen_bool(0.5) {
            e = e + atom(rng, w[0], w[1], spec.cantor);
        }
        def = def.piece(w[0], w[1], e);
    }
    def = def.piece(
        last,
        f64::INFINITY,
        Expr::Const(coef(rng)) * Expr::apply(Func::Exp, Expr::Const(last) - Expr::X),
    );
    for &c in &cuts {
        if rng.gen_bool(0.5) {
            def = def.at(c, coef(rng));
        }
    }
    def.build().expect("generated pieces cover the line")
}

/// Jump locations of f, and a point that is not a feature.
pub fn probe_points(rng: &mut ChaCha8Rng, f: &PiecewiseFunction, spec: &RandomSpec) -> (Vec<f64>, f64) {
    let jumps: Vec<f64> = f.breakpoints().iter().filter(|bp| bp.is_jump()).map(|bp| bp.location).collect();
    let feats = f.features();
    loop {
        let x = rng.gen_range(spec.span.0..spec.span.1);
        if feats.iter().all(|c| (c - x).abs() > 1e-3) {
            return (jumps, x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_functions_are_reproducible() {
        let spec = RandomSpec::default();
        let (mut r1, mut r2) = (rng(7), rng(7));
        for _ in 0..20 {
            let f = random_function(&mut r1, &spec);
            let g = random_function(&mut r2, &spec);
            assert_eq!(f.def(), g.def());
            assert!(f.breakpoints().iter().filter(|bp| bp.is_jump()).count() <= spec.max_breaks);
            assert!(f.value(50.0).abs() < 1e-15 && f.value(-50.0).abs() < 1e-15);
        }
    }
}
