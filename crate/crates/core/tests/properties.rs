//! Seeded property suites over random admissible functions.

use std::f64::consts::PI;

use bvfourier::distrib::build;
use bvfourier::func_model::PiecewiseFunction;
use bvfourier::inversion::{invert_pointwise, sinc_kernel};
use bvfourier::oscillatory::transform;
use bvfourier::parser::parse_function;
use bvfourier::quad::{integrate, QuadOptions};
use bvfourier::random::{probe_points, random_function, rng, RandomSpec};
use bvfourier::stieltjes::{by_parts_rhs, hs_integral, product_rule, regulated_identity};
use num_complex::Complex64;
use proptest::prelude::*;

const LO: f64 = -2.5;
const HI: f64 = 2.5;

fn pair(seed: u64) -> (PiecewiseFunction, PiecewiseFunction) {
    let mut r = rng(seed);
    let spec = RandomSpec::default();
    (random_function(&mut r, &spec), random_function(&mut r, &spec))
}

fn plain(seed: u64) -> PiecewiseFunction {
    let spec = RandomSpec {
        cantor: false,
        ..RandomSpec::default()
    };
    random_function(&mut rng(seed), &spec)
}

fn jumps(f: &PiecewiseFunction) -> Vec<f64> {
    f.breakpoints().iter().filter(|bp| bp.is_jump()).map(|bp| bp.location).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parts_identity(seed in any::<u64>()) {
        let (phi, g) = pair(seed);
        let d = hs_integral(&phi, &g, LO, HI, None).unwrap().value;
        let p = by_parts_rhs(&phi, &g, LO, HI).unwrap().value;
        prop_assert!((d - p).norm() < 1e-9, "{d} vs {p}");
    }

    #[test]
    fn product_rule_holds(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let c = plain(seed ^ 0x9e37_79b9);
        prop_assume!(jumps(&b).iter().all(|x| !jumps(&c).contains(x)));
        let bc = b.product(&c).unwrap();
        let d = hs_integral(&a, &bc, LO, HI, None).unwrap().value;
        let p = product_rule(&a, &b, &c, LO, HI).unwrap().value;
        prop_assert!((d - p).norm() < 1e-9, "{d} vs {p}");
    }

    #[test]
    fn linear_in_both_slots(seed in any::<u64>(), alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
        let (p1, g1) = pair(seed);
        // the second functions have no Cantor atoms, so a mixed piece keeps a
        // single Cantor argument
        let p2 = plain(seed.wrapping_add(1));
        let g2 = plain(seed.wrapping_add(2));
        let hs = |p: &PiecewiseFunction, g: &PiecewiseFunction| hs_integral(p, g, LO, HI, None).unwrap().value;
        let mix = p1.linear_combination(alpha, &p2, beta).unwrap();
        let lhs = hs(&mix, &g1);
        let rhs = alpha * hs(&p1, &g1) + beta * hs(&p2, &g1);
        prop_assert!((lhs - rhs).norm() < 1e-10, "φ slot: {lhs} vs {rhs}");
        let mix = g1.linear_combination(alpha, &g2, beta).unwrap();
        let lhs = hs(&p1, &mix);
        let rhs = alpha * hs(&p1, &g1) + beta * hs(&p1, &g2);
        prop_assert!((lhs - rhs).norm() < 1e-10, "g slot: {lhs} vs {rhs}");
    }

    #[test]
    fn tag_rule_ignores_point_values(seed in any::<u64>(), v in -3.0..3.0f64) {
        let (phi, g) = pair(seed);
        let js = jumps(&g);
        prop_assume!(!js.is_empty());
        let c = js[0];
        let mut def = g.def().clone();
        def.points.retain(|&(x, _)| x != c);
        def.points.push((c, v));
        let moved = def.build().unwrap();
        let a = hs_integral(&phi, &g, LO, HI, None).unwrap().value;
        let b = hs_integral(&phi, &moved, LO, HI, None).unwrap().value;
        prop_assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        let pa = by_parts_rhs(&phi, &moved, LO, HI).unwrap().value;
        prop_assert!((pa - b).norm() < 1e-9);
    }

    #[test]
    fn additive_over_smooth_split(seed in any::<u64>(), m in -2.0..2.0f64) {
        let (phi, g) = pair(seed);
        prop_assume!(g.features().iter().all(|c| (c - m).abs() > 1e-6));
        let whole = hs_integral(&phi, &g, LO, HI, None).unwrap().value;
        let left = hs_integral(&phi, &g, LO, m, None).unwrap().value;
        let right = hs_integral(&phi, &g, m, HI, None).unwrap().value;
        prop_assert!((whole - left - right).norm() < 1e-10);
    }

    #[test]
    fn midpoint_is_mean_of_limits(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = RandomSpec::default();
        let f = random_function(&mut r, &spec);
        let (mut xs, smooth) = probe_points(&mut r, &f, &spec);
        xs.push(smooth);
        for x in xs {
            let (l, rr) = f.one_sided_limits(x).unwrap();
            prop_assert_eq!(f.midpoint_value(x).unwrap(), (l + rr) / 2.0);
        }
    }

    #[test]
    fn variation_splits_and_bounds(seed in any::<u64>(), c in -2.0..2.0f64) {
        let f = pair(seed).0;
        let v = f.total_variation(LO, HI).unwrap();
        let split = f.total_variation(LO, c).unwrap() + f.total_variation(c, HI).unwrap();
        prop_assert!((v - split).abs() < 1e-10, "{v} vs {split}");
        prop_assert!(v + 1e-12 >= (f.value(HI) - f.value(LO)).abs());
    }

    #[test]
    fn regulated_identity_recovers_midpoints(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = RandomSpec::default();
        let f = random_function(&mut r, &spec);
        let (mut xs, smooth) = probe_points(&mut r, &f, &spec);
        xs.push(smooth);
        for x in xs {
            let want = f.midpoint_value(x).unwrap();
            let v = regulated_identity(&f, Complex64::new(0.0, 1.0), x, None).unwrap().value;
            prop_assert!((v - want).norm() < 1e-7, "x = {x}: {v} vs {want}");
        }
    }

    #[test]
    fn transform_conjugate_symmetry(seed in any::<u64>(), s in 0.25..20.0f64) {
        let f = plain(seed);
        let p = transform(&f, s, 1e-10).unwrap();
        let m = transform(&f, -s, 1e-10).unwrap();
        let bound = 2.0 * (p.abs_error + m.abs_error) + 1e-12;
        prop_assert!((m.value - p.value.conj()).norm() <= bound, "{} vs {}", m.value, p.value);
    }

    #[test]
    fn transform_is_linear(seed in any::<u64>(), s in 0.25..20.0f64, alpha in -2.0..2.0f64) {
        let f = plain(seed);
        let g = plain(seed.wrapping_add(7));
        let mix = f.linear_combination(alpha, &g, 1.0).unwrap();
        let lhs = transform(&mix, s, 1e-10).unwrap();
        let rhs = alpha * transform(&f, s, 1e-10).unwrap().value + transform(&g, s, 1e-10).unwrap().value;
        prop_assert!((lhs.value - rhs).norm() < 1e-8, "{} vs {rhs}", lhs.value);
    }

    #[test]
    fn sgn_like_steps_have_no_delta(c in -3.0..3.0f64) {
        let f = parse_function(&format!("on (-inf,{c}): -1 | on ({c},inf): 1")).unwrap();
        let d = build(&f).unwrap();
        prop_assert!(d.delta_terms.is_empty());
    }

    #[test]
    fn left_monomial_parity(n in 0usize..=5, a in -3.0..3.0f64) {
        prop_assume!(a.abs() > 1e-3);
        // a·H(-x)xⁿ is the reflection of a(-1)ⁿ·H(x)xⁿ: πiⁿδ⁽ⁿ⁾ keeps its
        // sign, n!/(is)^{n+1} flips
        let mut coefs = vec!["0".to_string(); n + 1];
        coefs[n] = format!("{a}");
        let src = format!("on (-inf,0): {a}*x^{n} | on [0,inf): 0 tail- poly({})", coefs.join(","));
        let d = build(&parse_function(&src).unwrap()).unwrap();
        let ipow = [Complex64::new(1.0, 0.0), Complex64::i(), Complex64::new(-1.0, 0.0), -Complex64::i()][n % 4];
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let delta: Vec<_> = d.delta_terms.iter().filter(|t| t.scale != 0.0).collect();
        let power: Vec<_> = d.power_terms.iter().filter(|t| t.scale != 0.0).collect();
        prop_assert_eq!(delta.len(), 1);
        prop_assert_eq!(power.len(), 1);
        prop_assert_eq!(delta[0].order, n);
        prop_assert!((delta[0].coefficient() - ipow * PI * a).norm() < 1e-12);
        prop_assert!((power[0].coefficient() - Complex64::new(-fact * a, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sinc_integral_is_bounded(alpha in 0.0..200.0f64, len in 0.0..200.0f64) {
        let opts = QuadOptions::default();
        let v = integrate(|s: f64| Complex64::new(sinc_kernel(s, 1.0), 0.0), alpha, alpha + len, &opts).unwrap();
        prop_assert!(v.value.re.abs() <= 4.0);
    }
}

#[test]
fn inversion_recovers_jump_midpoint_not_point_value() {
    // the point value 7 at the jump must not come back
    let f = parse_function("on (-inf,0): 0 | on (0,1): 1 | on (1,inf): 0 at 0: 7").unwrap();
    let r = invert_pointwise(&f, 0.0, 1e-6).unwrap();
    assert!((r.recovered - 0.5).abs() < 1e-5, "{}", r.recovered);
}
