//! The Cantor–Lebesgue function and integration against its singular measure.
//!
//! The measure satisfies μ = ½(μ∘L⁻¹ + μ∘R⁻¹) with L(u) = u/3 and
//! R(u) = u/3 + 2/3, so integrals against it are computed by walking that
//! recursion. A node is accepted once the two-child midpoint estimate agrees
//! with the one-point estimate; the accepted value is Richardson-corrected,
//! which is exact for cubic integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::Affine;
use crate::quad::{gk15_panel, integrate, QuadOptions, QuadResult};

/// Ternary digits of the grid that [`cantor_fn`] snaps nearby inputs to.
pub const CANTOR_DIGITS: usize = 33;

/// Largest recursion depth accepted by [`cantor_integral`].
pub const MAX_DEPTH: usize = 60;

/// Cantor–Lebesgue function on [0, 1], extended by 0 to the left and 1 to the right.
///
/// The ternary digits of the binary input are read exactly. An input within
/// a few ulps of a multiple of 3^-33 is snapped to it first, so that values
/// such as C(1/3) = 1/2 come out exact.
pub fn cantor_fn(u: f64) -> f64 {
    if u.is_nan() {
        return f64::NAN;
    }
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    if u < TINY {
        // C(u) = C(3u)/2 near 0
        return 0.5 * cantor_fn(3.0 * u);
    }
    let bits = u.to_bits();
    let e = 1075 - ((bits >> 52) & 0x7ff) as u32;
    let mask = (1u128 << e) - 1;
    let mut rem = ((bits & ((1 << 52) - 1)) | (1 << 52)) as u128;
    let mut acc = 0.0;
    let mut w = 0.5;
    for k in 0..EXACT_DIGITS {
        if k == CANTOR_DIGITS {
            let frac = rem as f64 / (e as f64).exp2();
            if frac.min(1.0 - frac) <= 4.0 * 3f64.powi(CANTOR_DIGITS as i32) * (-(e as f64)).exp2() {
                return grid_value(u);
            }
        }
        rem *= 3;
        let d = rem >> e;
        rem &= mask;
        if d == 2 {
            acc += w;
        } else if d == 1 {
            return acc + w;
        }
        if rem == 0 {
            break;
        }
        w *= 0.5;
    }
    acc
}

/// Inputs below this are scaled up by 3 before their digits are read.
const TINY: f64 = 8.673617379884035e-19; // 2^-60

/// Ternary digits read by [`cantor_fn`]; the weight of the last is 2^-64.
const EXACT_DIGITS: usize = 64;

/// C at the multiple of 3^-33 nearest to u.
fn grid_value(u: f64) -> f64 {
    let full = 3u64.pow(CANTOR_DIGITS as u32);
    let n = (u * full as f64).round() as u64;
    if n >= full {
        return 1.0;
    }
    let mut acc = 0.0;
    let mut w = 0.5;
    let mut place = full / 3;
    let mut rem = n;
    while place > 0 {
        let d = rem / place;
        rem %= place;
        if d == 2 {
            acc += w;
        } else if d == 1 {
            return acc + w;
        }
        if rem == 0 {
            break;
        }
        w *= 0.5;
        place /= 3;
    }
    acc
}

/// Options for the measure recursion.
#[derive(Debug, Clone)]
pub struct CantorOptions {
    pub depth: usize,
    /// Acceptance threshold per unit of measure.
    pub tol: f64,
    /// Points (in u-space) where the integrand may be discontinuous; nodes
    /// containing one of them are always subdivided.
    pub breaks: Vec<f64>,
    /// Maps u ↦ v of other Cantor functions C(v) inside the integrand. A node
    /// of mass w is only accepted once w·|ΔC| is below 1e-15 for each.
    pub rough: Vec<Affine>,
}

impl Default for CantorOptions {
    fn default() -> Self {
        CantorOptions {
            depth: 40,
            tol: 1e-14,
            breaks: Vec::new(),
            rough: Vec::new(),
        }
    }
}

/// ∫ φ dμ_C over all of [0, 1].
pub fn cantor_integral<F>(phi: F, depth: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let opts = CantorOptions {
        depth,
        ..CantorOptions::default()
    };
    cantor_integral_range(&phi, 0.0, 1.0, &opts)
}

/// ∫ φ dμ_C restricted to u ∈ [r0, r1].
pub fn cantor_integral_range<F>(phi: &F, r0: f64, r1: f64, opts: &CantorOptions) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if opts.depth == 0 || opts.depth > MAX_DEPTH {
        return Err(Error::Depth(opts.depth));
    }
    let r0 = r0.max(0.0);
    let r1 = r1.min(1.0);
    if r1 <= r0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(node(phi, 0.0, 1.0, 1.0, 0.0, 0, f64::INFINITY, r0, r1, opts))
}

/// Partial nodes below this length are closed off by their exact CDF mass.
const PARTIAL_LEN: f64 = 1e-13;

#[allow(clippy::too_many_arguments)]
fn node<F>(phi: &F, lo: f64, len: f64, w: f64, c_lo: f64, level: usize, prev: f64, r0: f64, r1: f64, opts: &CantorOptions) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let hi = lo + len;
    if hi <= r0 || lo >= r1 {
        return Complex64::new(0.0, 0.0);
    }
    let third = len / 3.0;
    let inside = lo >= r0 && hi <= r1;
    if !inside {
        if level >= opts.depth || len < PARTIAL_LEN {
            // C at the node ends is exactly c_lo and c_lo + w
            let upper = if r1 >= hi { c_lo + w } else { cantor_fn(r1).clamp(c_lo, c_lo + w) };
            let lower = if r0 <= lo { c_lo } else { cantor_fn(r0).clamp(c_lo, c_lo + w) };
            return phi(lo + 0.5 * len) * (upper - lower);
        }
        return node(phi, lo, third, 0.5 * w, c_lo, level + 1, f64::INFINITY, r0, r1, opts)
            + node(phi, lo + 2.0 * third, third, 0.5 * w, c_lo + 0.5 * w, level + 1, f64::INFINITY, r0, r1, opts);
    }
    let e0 = phi(lo + 0.5 * len) * w;
    let e1 = (phi(lo + len / 6.0) + phi(lo + 5.0 * len / 6.0)) * (0.5 * w);
    if level >= opts.depth {
        return e1;
    }
    let broken = opts.breaks.iter().any(|&b| b >= lo && b <= hi)
        || opts.rough.iter().any(|r| {
            let (v0, v1) = ordered(r.at(lo), r.at(hi));
            w * (cantor_fn(v1) - cantor_fn(v0)) > 1e-18
        });
    let diff = (e1 - e0).norm() / w;
    if !broken && level >= 2 {
        // smooth nodes shrink the difference ninefold per level; once it
        // stalls at a tiny size it is rounding noise in phi
        let stalled = level >= 12 && diff < 1e-9 && diff > 0.25 * prev;
        if diff <= opts.tol || stalled {
            return e1 + (e1 - e0) / 8.0;
        }
    }
    node(phi, lo, third, 0.5 * w, c_lo, level + 1, diff, r0, r1, opts)
        + node(phi, lo + 2.0 * third, third, 0.5 * w, c_lo + 0.5 * w, level + 1, diff, r0, r1, opts)
}

/// Ternary depth at which [`walk_integral`] stops subdividing.
pub const WALK_DEPTH: usize = 12;

fn ordered(x: f64, y: f64) -> (f64, f64) {
    (x.min(y), x.max(y))
}

/// ∫_a^b h(t) dt for an integrand built from the Cantor functions C(m(t)),
/// m in `maps`. The support of the first map is walked ternary-wise: flat
/// middle thirds are integrated with the remaining maps, and each node at
/// `depth` gets one symmetric Kronrod panel. C minus its chord is odd about
/// the centre of such a node, so the panel error is O(9^-depth).
pub fn walk_integral<F>(h: &F, a: f64, b: f64, maps: &[Affine], depth: usize, quad: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let Some((m, rest)) = maps.split_first() else {
        return integrate(h, a, b, quad);
    };
    let (ua, ub) = ordered(m.at(a), m.at(b));
    let mut total = QuadResult::zero();
    for (x0, x1) in [(ua, ub.min(0.0)), (ua.max(1.0), ub)] {
        if x1 > x0 {
            let (p, q) = ordered(m.inverse(x0), m.inverse(x1));
            total = total.combine(walk_integral(h, p, q, rest, depth, quad)?);
        }
    }
    let walk = Walk {
        h,
        m: *m,
        rest,
        r0: ua.max(0.0),
        r1: ub.min(1.0),
        depth,
        quad,
    };
    if walk.r1 > walk.r0 {
        total = total.combine(walk.node(0.0, 1.0, 0)?);
    }
    Ok(total)
}

struct Walk<'a, F> {
    h: &'a F,
    m: Affine,
    rest: &'a [Affine],
    r0: f64,
    r1: f64,
    depth: usize,
    quad: &'a QuadOptions,
}

impl<F: Fn(f64) -> Complex64> Walk<'_, F> {
    fn span(&self, u0: f64, u1: f64) -> (f64, f64) {
        ordered(self.m.inverse(u0), self.m.inverse(u1))
    }

    fn node(&self, lo: f64, len: f64, level: usize) -> Result<QuadResult> {
        let hi = lo + len;
        let (x0, x1) = (lo.max(self.r0), hi.min(self.r1));
        if x1 <= x0 {
            return Ok(QuadResult::zero());
        }
        let full = x0 == lo && x1 == hi;
        if full && level >= self.depth {
            let (p, q) = self.span(lo, hi);
            return gk15_panel(self.h, p, q);
        }
        if !full && (level >= self.depth + 20 || len < PARTIAL_LEN) {
            let (p, q) = self.span(x0, x1);
            return gk15_panel(self.h, p, q);
        }
        let third = len / 3.0;
        let mut r = self.node(lo, third, level + 1)?;
        let (g0, g1) = ((lo + third).max(self.r0), (lo + 2.0 * third).min(self.r1));
        if g1 > g0 {
            let (p, q) = self.span(g0, g1);
            r = r.combine(walk_integral(self.h, p, q, self.rest, self.depth, self.quad)?);
        }
        Ok(r.combine(self.node(lo + 2.0 * third, third, level + 1)?))
    }
}

/// Fourier–Stieltjes transform of the Cantor measure, ∫ e^{-isu} dμ_C(u),
/// via the infinite product e^{-is/2} Π cos(s/3^k).
pub fn cantor_char(s: f64) -> Complex64 {
    let mut prod = 1.0;
    let mut scale = s / 3.0;
    while scale.abs() > 1e-10 {
        prod *= scale.cos();
        scale /= 3.0;
    }
    Complex64::from_polar(prod, -0.5 * s)
}

/// The product formula truncated after `depth` factors.
pub fn cantor_char_truncated(s: f64, depth: usize) -> Complex64 {
    let prod: f64 = (1..=depth).map(|k| (s / 3f64.powi(k as i32)).cos()).product();
    Complex64::from_polar(prod, -0.5 * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ternary_oracle(u: f64, digits: usize) -> f64 {
        // digit-by-digit reading of the ternary expansion
        let mut v = 0.0;
        let mut x = u;
        for k in 1..=digits {
            x *= 3.0;
            let d = x.floor();
            x -= d;
            if d == 1.0 {
                return v + 0.5f64.powi(k as i32);
            }
            if d == 2.0 {
                v += 0.5f64.powi(k as i32);
            }
        }
        v
    }

    #[test]
    fn values_at_thirds_and_quarters() {
        assert!((cantor_fn(1.0 / 3.0) - 0.5).abs() < 1e-12);
        assert!((cantor_fn(0.25) - 1.0 / 3.0).abs() < 1e-10);
        assert!((cantor_fn(0.75) - 2.0 / 3.0).abs() < 1e-10);
        assert_eq!(cantor_fn(-1.0), 0.0);
        assert_eq!(cantor_fn(2.0), 1.0);
        for &u in &[0.1, 0.2, 0.5, 0.7, 0.9, 0.123456] {
            assert!((cantor_fn(u) - ternary_oracle(u, 20)).abs() < 1e-6);
        }
        for &u in &[0.1, 0.2, 0.7, 0.123456] {
            assert!((cantor_fn(u / 3.0) - 0.5 * cantor_fn(u)).abs() < 1e-9);
        }
    }

    #[test]
    fn measure_integrals() {
        let one = cantor_integral(|_| Complex64::new(1.0, 0.0), 30).unwrap();
        assert_eq!(one, Complex64::new(1.0, 0.0));
        let mean = cantor_integral(|u| Complex64::new(u, 0.0), 30).unwrap();
        assert!((mean.re - 0.5).abs() < 1e-14);
        let second = cantor_integral(|u| Complex64::new(u * u, 0.0), 30).unwrap();
        assert!((second.re - 0.375).abs() < 1e-14);
    }

    #[test]
    fn exponential_matches_product_formula() {
        for &s in &[1.0, -3.0, 10.0, 40.0] {
            let rec = cantor_integral(|u| Complex64::from_polar(1.0, -s * u), 30).unwrap();
            let prod = cantor_char_truncated(s, 30);
            assert!((rec - prod).norm() < 1e-10, "s={s}");
        }
    }

    #[test]
    fn restricted_range_matches_cdf() {
        let opts = CantorOptions::default();
        let m = cantor_integral_range(&|_| Complex64::new(1.0, 0.0), 0.1, 0.8, &opts).unwrap();
        assert!((m.re - (cantor_fn(0.8) - cantor_fn(0.1))).abs() < 1e-15);
        for &(a, b) in &[(0.2, 0.7), (0.0, 0.7), (0.05, 0.95), (1.0 / 3.0, 0.5)] {
            let m = cantor_integral_range(&|_| Complex64::new(1.0, 0.0), a, b, &opts).unwrap();
            assert!((m.re - (cantor_fn(b) - cantor_fn(a))).abs() < 1e-15, "{a} {b}");
        }
    }

    #[test]
    fn depth_limits() {
        assert_eq!(cantor_integral(|_| Complex64::new(1.0, 0.0), 61), Err(Error::Depth(61)));
        assert!(cantor_integral(|_| Complex64::new(1.0, 0.0), 0).is_err());
    }

    #[test]
    fn walk_matches_exact_moment() {
        // ∫_0^1 C(u) du = 1/2 and ∫_0^1 u C(u) du = 1/2 - ∫ u²/2 dμ = 1/2 - 3/16
        let maps = [Affine::new(1.0, 0.0)];
        let q = QuadOptions::default();
        let r = walk_integral(&|u: f64| Complex64::new(cantor_fn(u), 0.0), 0.0, 1.0, &maps, WALK_DEPTH, &q).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-12, "{r:?}");
        let r = walk_integral(&|u: f64| Complex64::new(u * cantor_fn(u), 0.0), 0.0, 1.0, &maps, WALK_DEPTH, &q).unwrap();
        assert!((r.value.re - 5.0 / 16.0).abs() < 1e-11, "{r:?}");
    }
}

