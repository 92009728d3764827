//! Henstock–Stieltjes integrals ∫ φ dg for the representable class, computed
//! by decomposing dg into an absolutely continuous density, point masses and
//! Cantor-type singular components.

use num_complex::Complex64;
use serde::Serialize;

use crate::accel::{lobe_sum, LobeOptions};
use crate::error::{Error, Result};
use crate::cantor::{walk_integral, WALK_DEPTH};
use crate::expr::{Affine, Side};
use crate::func_model::{interior_point, PiecewiseFunction};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions, QuadResult};

pub use crate::cantor::cantor_integral;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Ternary depth for singular parts.
pub const SINGULAR_DEPTH: usize = 40;

/// φ(t) = coef · Π bases(t) · e^{-iωt} · H(cutoff - t).
#[derive(Debug, Clone)]
pub struct Integrand<'a> {
    pub bases: Vec<&'a PiecewiseFunction>,
    pub coef: Complex64,
    pub omega: Complex64,
    pub cutoff: Option<f64>,
}

impl<'a> Integrand<'a> {
    pub fn one() -> Self {
        Integrand {
            bases: Vec::new(),
            coef: Complex64::new(1.0, 0.0),
            omega: Complex64::new(0.0, 0.0),
            cutoff: None,
        }
    }

    pub fn of(f: &'a PiecewiseFunction) -> Self {
        Self::one().times(f)
    }

    pub fn times(mut self, f: &'a PiecewiseFunction) -> Self {
        self.bases.push(f);
        self
    }

    /// Multiplies by e^{-iωt}.
    pub fn weight(mut self, omega: Complex64) -> Self {
        self.omega += omega;
        self
    }

    pub fn scale(mut self, c: Complex64) -> Self {
        self.coef *= c;
        self
    }

    /// Multiplies by H(x - t).
    pub fn cut(mut self, x: f64) -> Self {
        self.cutoff = Some(x);
        self
    }

    pub fn at(&self, t: f64, side: Side) -> Complex64 {
        let h = match self.cutoff {
            None => 1.0,
            Some(x) if t < x => 1.0,
            Some(x) if t > x => 0.0,
            Some(_) => match side {
                Side::Left => 1.0,
                Side::Right => 0.0,
                Side::Point => 0.5,
            },
        };
        if h == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let b: f64 = self.bases.iter().map(|f| f.limit(t, side)).product();
        self.coef * (-I * self.omega * t).exp() * (b * h)
    }

    pub fn value(&self, t: f64) -> Complex64 {
        self.at(t, Side::Point)
    }

    pub fn features(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.bases.iter().flat_map(|f| f.features()).collect();
        for f in &self.bases {
            v.extend(f.pieces()[1..].iter().map(|p| p.lo));
        }
        v.extend(self.cutoff);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    fn upper(&self, b: f64) -> f64 {
        self.cutoff.map_or(b, |x| b.min(x))
    }

    /// Oscillation half-period of the exponential weight, if any.
    fn half_period(&self) -> Option<f64> {
        (self.omega.re != 0.0).then(|| std::f64::consts::PI / self.omega.re.abs())
    }

    /// Whether the weight decays exponentially towards ±∞ (dir = ±1).
    fn decays_towards(&self, dir: f64) -> bool {
        // |e^{-iωt}| = e^{Im ω · t}
        self.omega.im * dir < 0.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HsOptions {
    pub quad: QuadOptions,
    pub lobes: LobeOptions,
    pub depth: usize,
}

impl Default for HsOptions {
    fn default() -> Self {
        HsOptions {
            quad: QuadOptions::default(),
            lobes: LobeOptions::default(),
            depth: SINGULAR_DEPTH,
        }
    }
}

fn sorted_cuts(a: f64, b: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v = vec![a, b];
    v.extend(extra.into_iter().filter(|&c| c > a && c < b));
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v.dedup();
    v
}

/// ∫ h over (lo, hi) where either end may be infinite.
fn integrate_span<F>(h: F, lo: f64, hi: f64, phi: &Integrand, maps: &[Affine], opts: &HsOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if lo.is_finite() && hi.is_finite() {
        return walk_integral(&h, lo, hi, maps, WALK_DEPTH, &opts.quad);
    }
    let mid = interior_point(lo, hi);
    let mut total = QuadResult::zero();
    if lo.is_finite() {
        total = total.combine(integrate(&h, lo, mid, &opts.quad)?);
    }
    if hi.is_finite() {
        total = total.combine(integrate(&h, mid, hi, &opts.quad)?);
    }
    for (inf, dir) in [(hi, 1.0), (lo, -1.0)] {
        if inf.is_finite() {
            continue;
        }
        let r = match phi.half_period() {
            Some(hp) if !phi.decays_towards(dir) => lobe_sum(&h, mid, dir, hp, &opts.lobes)?,
            _ => integrate_to_infinity(&h, mid, dir, &opts.quad)
                .map_err(|e| Error::Divergent(format!("tail integrand is not integrable: {e}")))?,
        };
        if !r.converged || !r.value.norm().is_finite() || r.abs_error > 1e-6 * (1.0 + r.value.norm()) {
            return Err(Error::Divergent(format!(
                "tail integral towards {} does not converge (error {:.3e})",
                if dir > 0.0 { "+inf" } else { "-inf" },
                r.abs_error
            )));
        }
        total = total.combine(r);
    }
    Ok(total)
}

/// Affine arguments of the Cantor atoms active at t in φ and g.
fn cantor_maps(phi: &Integrand, g: Option<&PiecewiseFunction>, t: f64) -> Vec<Affine> {
    let mut maps: Vec<Affine> = phi
        .bases
        .iter()
        .copied()
        .chain(g)
        .filter_map(|f| f.piece_at(t))
        .flat_map(|p| p.expr.cantor_args())
        .collect();
    maps.dedup();
    maps
}

/// ∫_a^b φ dt as an ordinary (Lebesgue) integral.
pub fn plain_integral(phi: &Integrand, a: f64, b: f64, opts: &HsOptions) -> Result<QuadResult> {
    let b = phi.upper(b);
    if !(b > a) {
        return Ok(QuadResult::zero());
    }
    let cuts = sorted_cuts(a, b, phi.features());
    let mut total = QuadResult::zero();
    for w in cuts.windows(2) {
        let maps = cantor_maps(phi, None, interior_point(w[0], w[1]));
        total = total.combine(integrate_span(|t| phi.value(t), w[0], w[1], phi, &maps, opts)?);
    }
    Ok(total)
}

fn check_range(g: &PiecewiseFunction, a: f64, b: f64) -> Result<()> {
    if !(a < b) {
        return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
    }
    if let Some(&c) = g.singularities().iter().find(|&&c| c >= a && c <= b) {
        return Err(Error::NotBv(format!("integrator is unbounded near {c}")));
    }
    Ok(())
}

/// Jump contributions Σ φ(c)·Δg(c) under the tag rule; at a the mass is
/// g(a+) - g(a), at b it is g(b) - g(b-).
fn jump_sum(phi: &Integrand, g: &PiecewiseFunction, a: f64, b: f64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for bp in g.jumps(a, b) {
        let c = bp.location;
        let mass = if c == a {
            bp.right_limit - bp.point_value
        } else if c == b {
            bp.point_value - bp.left_limit
        } else {
            bp.right_limit - bp.left_limit
        };
        if mass != 0.0 {
            total += phi.value(c) * mass;
        }
    }
    total
}

/// The absolutely continuous part ∫ φ g' dt over [a, b].
fn ac_part(phi: &Integrand, g: &PiecewiseFunction, a: f64, b: f64, opts: &HsOptions) -> Result<QuadResult> {
    let b = phi.upper(b);
    if !(b > a) {
        return Ok(QuadResult::zero());
    }
    let mut extra = phi.features();
    extra.extend(g.cuts(a, b));
    let cuts = sorted_cuts(a, b, extra);
    let mut total = QuadResult::zero();
    for w in cuts.windows(2) {
        let mid = interior_point(w[0], w[1]);
        if g.piece_at(mid).is_some_and(|p| p.expr.as_polynomial().is_some_and(|c| c.len() <= 1)) {
            continue;
        }
        let h = |t: f64| {
            let d = g.density(t);
            if d == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                phi.value(t) * d
            }
        };
        let maps = cantor_maps(phi, Some(g), mid);
        total = total.combine(integrate_span(h, w[0], w[1], phi, &maps, opts)?);
    }
    Ok(total)
}

/// ∫_a^b φ dg with explicit options.
pub fn hs_integral_with(phi: &Integrand, g: &PiecewiseFunction, a: f64, b: f64, opts: &HsOptions) -> Result<QuadResult> {
    check_range(g, a, b)?;
    let mut r = ac_part(phi, g, a, b, opts)?;
    r.value += jump_sum(phi, g, a, b);
    let ub = phi.upper(b);
    if ub > a {
        let rough: Vec<Affine> = phi
            .bases
            .iter()
            .flat_map(|f| f.pieces().iter().filter(|p| p.hi > a && p.lo < ub))
            .flat_map(|p| p.expr.cantor_args())
            .collect();
        let breaks: Vec<f64> = phi
            .bases
            .iter()
            .flat_map(|f| f.breakpoints().iter().map(|bp| bp.location))
            .filter(|&c| c > a && c < ub)
            .collect();
        r.value += g.singular_integral(|t| phi.value(t), a, ub, opts.depth, &rough, &breaks)?;
        r.abs_error += if g.cantor_components(a, ub).is_empty() {
            0.0
        } else {
            1e-12
        };
    }
    Ok(r)
}

/// ∫_a^b φ(t) w(t) dg(t) with optional weight w(t) = e^{-iωt}.
pub fn hs_integral(phi: &PiecewiseFunction, g: &PiecewiseFunction, a: f64, b: f64, weight: Option<Complex64>) -> Result<QuadResult> {
    let mut p = Integrand::of(phi);
    if let Some(w) = weight {
        p = p.weight(w);
    }
    hs_integral_with(&p, g, a, b, &HsOptions::default())
}

/// One jump of a measure: location, total mass and the two sub-jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpMass {
    pub location: f64,
    pub mass: f64,
    pub left_sub: f64,
    pub right_sub: f64,
}

/// A Cantor-type component: support in t and total signed mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularComponent {
    pub lo: f64,
    pub hi: f64,
    pub scale: f64,
}

/// The decomposition of dg into density, jumps and singular parts.
#[derive(Debug, Clone)]
pub struct StieltjesMeasure<'a> {
    pub generator: &'a PiecewiseFunction,
    pub jumps: Vec<JumpMass>,
    pub singular: Vec<SingularComponent>,
}

impl StieltjesMeasure<'_> {
    pub fn density(&self, t: f64) -> f64 {
        self.generator.density(t)
    }

    /// ∫_a^b dg.
    pub fn measure(&self, a: f64, b: f64) -> Result<f64> {
        let r = hs_integral_with(&Integrand::one(), self.generator, a, b, &HsOptions::default())?;
        Ok(r.value.re)
    }

    /// Σ|jumps| + ∫|g'| + singular variation over [a, b].
    pub fn variation(&self, a: f64, b: f64) -> Result<f64> {
        self.generator.total_variation(a, b)
    }
}

pub fn measure_of(g: &PiecewiseFunction) -> Result<StieltjesMeasure<'_>> {
    if let Some(&c) = g.singularities().first() {
        return Err(Error::NotBv(format!("unbounded near {c}")));
    }
    let jumps = g
        .jumps(f64::NEG_INFINITY, f64::INFINITY)
        .iter()
        .map(|b| JumpMass {
            location: b.location,
            mass: b.right_limit - b.left_limit,
            left_sub: b.point_value - b.left_limit,
            right_sub: b.right_limit - b.point_value,
        })
        .collect();
    let mut singular = Vec::new();
    for (_, _, lo, hi) in g.cantor_components(f64::NEG_INFINITY, f64::INFINITY) {
        let scale = g.singular_integral(|_| Complex64::new(1.0, 0.0), lo, hi, SINGULAR_DEPTH, &[], &[])?.re;
        singular.push(SingularComponent { lo, hi, scale });
    }
    Ok(StieltjesMeasure {
        generator: g,
        jumps,
        singular,
    })
}

/// φ(b)g(b) - φ(a)g(a) - ∫g dφ + Σ[φ(c)-φ(c-)][g(c)-g(c-)] - Σ[φ(c)-φ(c+)][g(c)-g(c+)].
pub fn by_parts_rhs(phi: &PiecewiseFunction, g: &PiecewiseFunction, a: f64, b: f64) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration by parts needs a finite interval".into()));
    }
    let swapped = hs_integral(g, phi, a, b, None)?;
    let mut value = Complex64::new(phi.value(b) * g.value(b) - phi.value(a) * g.value(a), 0.0) - swapped.value;
    let mut points: Vec<f64> = phi
        .jumps(a, b)
        .iter()
        .chain(g.jumps(a, b).iter())
        .map(|bp| bp.location)
        .collect();
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    points.dedup();
    for c in points {
        let (pc, gc) = (phi.value(c), g.value(c));
        if c > a {
            value += (pc - phi.limit(c, Side::Left)) * (gc - g.limit(c, Side::Left));
        }
        if c < b {
            value -= (pc - phi.limit(c, Side::Right)) * (gc - g.limit(c, Side::Right));
        }
    }
    Ok(QuadResult { value, ..swapped })
}

/// ∫_a^b A d[BC] computed as ∫ AB dC + ∫ AC dB.
pub fn product_rule(
    a_fn: &PiecewiseFunction,
    b_fn: &PiecewiseFunction,
    c_fn: &PiecewiseFunction,
    a: f64,
    b: f64,
) -> Result<QuadResult> {
    let bj = b_fn.jumps(a, b);
    for cj in c_fn.jumps(a, b) {
        if bj.iter().any(|x| x.location == cj.location) {
            return Err(Error::CommonDiscontinuity(cj.location));
        }
    }
    let opts = HsOptions::default();
    let ab = Integrand::of(a_fn).times(b_fn);
    let ac = Integrand::of(a_fn).times(c_fn);
    Ok(hs_integral_with(&ab, c_fn, a, b, &opts)?.combine(hs_integral_with(&ac, b_fn, a, b, &opts)?))
}

/// ∫_a^b A dB = ∫ A B' dt for absolutely continuous B.
pub fn ac_reduction(a_fn: &PiecewiseFunction, b_fn: &PiecewiseFunction, a: f64, b: f64) -> Result<QuadResult> {
    check_range(b_fn, a, b)?;
    if let Some(j) = b_fn.jumps(a, b).first() {
        return Err(Error::NotAc(format!("jump at {}", j.location)));
    }
    if !b_fn.cantor_components(a, b).is_empty() {
        return Err(Error::NotAc("singular component present".into()));
    }
    ac_part(&Integrand::of(a_fn), b_fn, a, b, &HsOptions::default())
}

/// Right-hand side of the regulated representation
/// ∫ H(x-t) e^{iω(x-t)} [df(t) - iω f(t) dt], plus f(a)e^{iω(x-a)} on a finite interval.
pub fn regulated_identity(f: &PiecewiseFunction, omega: Complex64, x: f64, finite: Option<(f64, f64)>) -> Result<QuadResult> {
    let (a, b) = match finite {
        None => {
            if omega.im <= 0.0 {
                return Err(Error::Hypothesis(format!("Im ω must be positive, got {omega}")));
            }
            (f64::NEG_INFINITY, f64::INFINITY)
        }
        Some((a, b)) => {
            if !(a < x && x < b) {
                return Err(Error::Domain(format!("x = {x} must lie inside ({a}, {b})")));
            }
            (a, b)
        }
    };
    let phase = (I * omega * x).exp();
    let opts = HsOptions::default();
    let kernel = Integrand::one().scale(phase).weight(omega).cut(x);
    let mut r = hs_integral_with(&kernel, f, a, b, &opts)?;
    if omega != Complex64::new(0.0, 0.0) {
        let dt = Integrand::of(f).scale(-I * omega * phase).weight(omega).cut(x);
        r = r.combine(plain_integral(&dt, a, b, &opts)?);
    }
    if finite.is_some() {
        r.value += (I * omega * (x - a)).exp() * f.value(a);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Affine, Expr, Func};
    use crate::func_model::atoms::*;
    use crate::func_model::FunctionDef;

    fn pf(e: Expr) -> PiecewiseFunction {
        PiecewiseFunction::from_expr(e).unwrap()
    }

    fn step(a: f64) -> PiecewiseFunction {
        FunctionDef::default()
            .piece(f64::NEG_INFINITY, 0.0, Expr::Const(0.0))
            .piece(0.0, f64::INFINITY, Expr::Const(1.0))
            .at(0.0, a)
            .build()
            .unwrap()
    }

    #[test]
    fn step_example_is_exact() {
        let f = step(7.0);
        let phi = Integrand::one().weight(I).cut(0.0);
        let r = hs_integral_with(&phi, &f, f64::NEG_INFINITY, f64::INFINITY, &HsOptions::default()).unwrap();
        assert_eq!(r.value, Complex64::new(0.5, 0.0));
        let id = regulated_identity(&f, I, 0.0, None).unwrap();
        assert!((id.value - 0.5).norm() < 1e-15);
    }

    #[test]
    fn calculus_cases() {
        let t = pf(Expr::X);
        let t2 = pf(Expr::X * Expr::X);
        let r = hs_integral(&t, &t2, 0.0, 1.0, None).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-14);
        let h = pf(heaviside());
        let r = hs_integral(&h, &h, -1.0, 1.0, None).unwrap();
        assert_eq!(r.value.re, 0.5);
        let p = by_parts_rhs(&h, &h, -1.0, 1.0).unwrap();
        assert!((p.value.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn measures() {
        let h = pf(heaviside());
        let m = measure_of(&h).unwrap();
        assert_eq!(m.jumps.len(), 1);
        assert_eq!(m.jumps[0].mass, 1.0);
        let c = pf(cantor());
        let m = measure_of(&c).unwrap();
        assert!(m.jumps.is_empty());
        assert_eq!(m.singular.len(), 1);
        assert!((m.singular[0].scale - 1.0).abs() < 1e-14);
        assert!((m.measure(0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((m.measure(0.2, 0.7).unwrap() - (c.value(0.7) - c.value(0.2))).abs() < 1e-12);
    }

    #[test]
    fn product_rule_cases() {
        let one = pf(Expr::Const(1.0));
        let t = pf(Expr::X);
        let r = product_rule(&one, &t, &t, 0.0, 1.0).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-14);
        let b = pf(Expr::kink(Func::Heaviside, Affine::new(1.0, -0.5)));
        let direct = hs_integral(&t, &b.product(&t).unwrap(), 0.0, 1.0, None).unwrap();
        let rhs = product_rule(&t, &b, &t, 0.0, 1.0).unwrap();
        assert!((direct.value - rhs.value).norm() < 1e-12, "{direct:?} {rhs:?}");
        assert!(matches!(product_rule(&t, &b, &b, 0.0, 1.0), Err(Error::CommonDiscontinuity(_))));
    }

    #[test]
    fn ac_reduction_cases() {
        let s = pf(sgn());
        let t2 = pf(Expr::X * Expr::X);
        assert!((ac_reduction(&s, &t2, -1.0, 1.0).unwrap().value.re - 2.0).abs() < 1e-13);
        let h = pf(heaviside());
        let e = pf(Expr::apply(Func::Exp, -Expr::X));
        let r = ac_reduction(&h, &e, 0.0, f64::INFINITY).unwrap();
        assert!((r.value.re + 1.0).abs() < 1e-10);
        assert!(matches!(ac_reduction(&h, &h, -1.0, 1.0), Err(Error::NotAc(_))));
        let t = pf(Expr::X);
        assert!(matches!(ac_reduction(&h, &t, 0.0, f64::INFINITY), Err(Error::Divergent(_))));
    }

    #[test]
    fn regulated_identity_smooth_case() {
        // f = e^{-|t|}, ω = 2i, x = 1 gives e^{-1}
        let f = pf(Expr::apply(Func::Exp, -Expr::kink(Func::Abs, Affine::new(1.0, 0.0))));
        let r = regulated_identity(&f, Complex64::new(0.0, 2.0), 1.0, None).unwrap();
        assert!((r.value - (-1f64).exp()).norm() < 1e-10, "{r:?}");
        let zero = pf(Expr::Const(0.0));
        assert_eq!(regulated_identity(&zero, I, 0.3, None).unwrap().value.norm(), 0.0);
        assert!(matches!(regulated_identity(&f, Complex64::new(1.0, 0.0), 0.0, None), Err(Error::Hypothesis(_))));
        let fin = regulated_identity(&step(3.0), Complex64::new(1.0, 0.0), 0.0, Some((-1.0, 1.0))).unwrap();
        assert!((fin.value - 0.5).norm() < 1e-12);
    }

    #[test]
    fn singular_part_of_cantor() {
        // ∫ t dC(t) = 1/2
        let c = pf(cantor());
        let t = pf(Expr::X);
        let r = hs_integral(&t, &c, 0.0, 1.0, None).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-13);
    }
}
