//! Gauge-fine Riemann–Stieltjes sums, used to check the constructive
//! integral against its definition and to exhibit Riemann–Stieltjes failure.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::func_model::PiecewiseFunction;
use crate::stieltjes::Integrand;

/// Gauge: breakpoints get (c - δ_c, c + δ_c); any other z gets an interval
/// of radius min(default, distance to the nearest breakpoint).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeSpec {
    pub breakpoints: Vec<(f64, f64)>,
    pub default_radius: f64,
    /// Cut-offs M₋, M₊ for the gauge intervals at ∓∞.
    pub m_minus: f64,
    pub m_plus: f64,
}

impl GaugeSpec {
    /// Radius δ at every breakpoint of g and at every other point.
    pub fn for_function(g: &PiecewiseFunction, delta: f64) -> Self {
        GaugeSpec {
            breakpoints: g.features().into_iter().map(|c| (c, delta)).collect(),
            default_radius: delta,
            m_minus: 1.0 / delta,
            m_plus: 1.0 / delta,
        }
    }

    /// Open gauge interval γ(z).
    pub fn interval(&self, z: f64) -> (f64, f64) {
        if z == f64::NEG_INFINITY {
            return (f64::NEG_INFINITY, -self.m_minus);
        }
        if z == f64::INFINITY {
            return (self.m_plus, f64::INFINITY);
        }
        if let Some(&(_, d)) = self.breakpoints.iter().find(|&&(c, _)| c == z) {
            return (z - d, z + d);
        }
        let dist = self
            .breakpoints
            .iter()
            .map(|&(c, _)| (c - z).abs())
            .fold(f64::INFINITY, f64::min);
        let r = self.default_radius.min(dist);
        (z - r, z + r)
    }

    pub fn is_fine(&self, lo: f64, hi: f64, z: f64) -> bool {
        let (gl, gh) = self.interval(z);
        let lo_ok = if gl == f64::NEG_INFINITY { true } else { lo > gl };
        let hi_ok = if gh == f64::INFINITY { true } else { hi < gh };
        lo <= z && z <= hi && lo_ok && hi_ok
    }
}

/// ([x_{n-1}, x_n], z_n) triples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaggedPartition {
    pub cells: Vec<(f64, f64, f64)>,
}

impl TaggedPartition {
    pub fn is_partition_of(&self, a: f64, b: f64) -> bool {
        !self.cells.is_empty()
            && self.cells[0].0 == a
            && self.cells.last().unwrap().1 == b
            && self.cells.windows(2).all(|w| w[0].1 == w[1].0)
            && self.cells.iter().all(|c| c.0 < c.1)
    }
}

/// φ at a tag; tags at ±∞ contribute nothing.
fn tag_value(phi: &Integrand, z: f64) -> Complex64 {
    if z.is_finite() {
        phi.value(z)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

fn g_at(g: &PiecewiseFunction, t: f64) -> f64 {
    if t.is_finite() {
        g.value(t)
    } else {
        0.0
    }
}

/// Σ φ(z_n)[g(x_n) - g(x_{n-1})] without any fineness check.
pub fn riemann_sum(phi: &Integrand, g: &PiecewiseFunction, p: &TaggedPartition) -> Complex64 {
    p.cells
        .iter()
        .map(|&(lo, hi, z)| {
            let dg = if lo.is_finite() && hi.is_finite() {
                g_at(g, hi) - g_at(g, lo)
            } else {
                0.0
            };
            tag_value(phi, z) * dg
        })
        .sum()
}

/// The Riemann sum of a γ-fine partition.
pub fn gauge_sum(phi: &Integrand, g: &PiecewiseFunction, spec: &GaugeSpec, p: &TaggedPartition) -> Result<Complex64> {
    for &(lo, hi, z) in &p.cells {
        if !spec.is_fine(lo, hi, z) {
            return Err(Error::NotFine(format!("[{lo}, {hi}] with tag {z} is not inside its gauge interval")));
        }
    }
    Ok(riemann_sum(phi, g, p))
}

/// How tags are chosen inside non-breakpoint cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagChoice {
    Left,
    Right,
    Random,
}

fn pick_tag(lo: f64, hi: f64, choice: TagChoice, rng: &mut ChaCha8Rng) -> f64 {
    match choice {
        TagChoice::Left => lo,
        TagChoice::Right => hi,
        TagChoice::Random => lo + (hi - lo) * rng.gen::<f64>(),
    }
}

/// A γ-fine partition of [a, b] in which every breakpoint is a tag.
pub fn fine_partition(spec: &GaugeSpec, a: f64, b: f64, choice: TagChoice, rng: &mut ChaCha8Rng) -> Result<TaggedPartition> {
    let mut cells = Vec::new();
    let mut cursor = a;
    let mut breaks: Vec<(f64, f64)> = spec.breakpoints.iter().copied().filter(|&(c, _)| c >= a && c <= b).collect();
    breaks.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let fill = |cells: &mut Vec<(f64, f64, f64)>, from: f64, to: f64, rng: &mut ChaCha8Rng| {
        let mut x = from;
        while x < to {
            let dist = spec
                .breakpoints
                .iter()
                .map(|&(c, _)| (c - x).abs())
                .fold(f64::INFINITY, f64::min);
            let step = (0.3 * spec.default_radius.min(dist)).max(1e-300);
            let mut next = (x + step * (0.5 + 0.5 * rng.gen::<f64>())).min(to);
            if to - next < 0.25 * step {
                next = to;
            }
            let z = pick_tag(x, next, choice, rng);
            cells.push((x, next, z));
            x = next;
        }
    };
    for (i, &(c, d)) in breaks.iter().enumerate() {
        let prev = if i > 0 { breaks[i - 1].0 } else { a };
        let next = breaks.get(i + 1).map_or(b, |x| x.0);
        let left = if c == a { c } else { (c - d * (0.2 + 0.7 * rng.gen::<f64>())).max(0.5 * (prev + c)) };
        let right = if c == b { c } else { (c + d * (0.2 + 0.7 * rng.gen::<f64>())).min(0.5 * (c + next)) };
        let left = left.max(cursor);
        if left > cursor {
            fill(&mut cells, cursor, left, rng);
        }
        if right > left {
            cells.push((left, right, c));
        }
        cursor = right;
    }
    if b > cursor {
        fill(&mut cells, cursor, b, rng);
    }
    let p = TaggedPartition { cells };
    for &(lo, hi, z) in &p.cells {
        if !spec.is_fine(lo, hi, z) {
            return Err(Error::NotFine(format!("generated cell [{lo}, {hi}] with tag {z}")));
        }
    }
    Ok(p)
}

/// A partition of [a, b] with mesh below δ and unconstrained tags
/// (Riemann–Stieltjes sense). Breakpoints may fall inside cells.
pub fn mesh_partition(a: f64, b: f64, delta: f64, choice: TagChoice, rng: &mut ChaCha8Rng) -> TaggedPartition {
    let mut cells = Vec::new();
    let mut x = a + delta * (0.1 + 0.8 * rng.gen::<f64>());
    cells.push((a, x.min(b), pick_tag(a, x.min(b), choice, rng)));
    while x < b {
        let next = (x + delta * (0.5 + 0.49 * rng.gen::<f64>())).min(b);
        cells.push((x, next, pick_tag(x, next, choice, rng)));
        x = next;
    }
    TaggedPartition { cells }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeRow {
    pub delta: f64,
    pub hs_min: f64,
    pub hs_max: f64,
    pub hs_gap: f64,
    pub rs_min: f64,
    pub rs_max: f64,
    pub rs_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeReport {
    pub rows: Vec<GaugeRow>,
}

fn spread(values: &[Complex64]) -> (f64, f64, f64) {
    let min = values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let max = values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    let mut gap: f64 = 0.0;
    for x in values {
        for y in values {
            gap = gap.max((x - y).norm());
        }
    }
    (min, max, gap)
}

/// For each δ: sums over several γ-fine partitions (breakpoints forced to be
/// tags) and over mesh-δ partitions with adversarial tags.
pub fn gauge_converge(
    phi: &Integrand,
    g: &PiecewiseFunction,
    a: f64,
    b: f64,
    deltas: &[f64],
    samples: usize,
    seed: u64,
) -> Result<GaugeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for &delta in deltas {
        let spec = GaugeSpec::for_function(g, delta);
        let mut hs = Vec::new();
        let mut rs = Vec::new();
        for k in 0..samples.max(3) {
            let choice = [TagChoice::Left, TagChoice::Right, TagChoice::Random][k % 3];
            let p = fine_partition(&spec, a, b, choice, &mut rng)?;
            hs.push(gauge_sum(phi, g, &spec, &p)?);
            let q = mesh_partition(a, b, delta, choice, &mut rng);
            rs.push(riemann_sum(phi, g, &q));
        }
        let (hs_min, hs_max, hs_gap) = spread(&hs);
        let (rs_min, rs_max, rs_gap) = spread(&rs);
        rows.push(GaugeRow {
            delta,
            hs_min,
            hs_max,
            hs_gap,
            rs_min,
            rs_max,
            rs_gap,
        });
    }
    Ok(GaugeReport { rows })
}

/// The step example: φ(t) = H(-t)e^{t} against the unit step whose value
/// at 0 is `a`. All mass sits at 0, so each δ is sampled on
/// [-w, w] with w = min(1, 1000δ).
pub fn step_demo(a: f64, deltas: &[f64], samples: usize, seed: u64) -> Result<GaugeReport> {
    let g = crate::func_model::FunctionDef::default()
        .piece(f64::NEG_INFINITY, 0.0, crate::expr::Expr::Const(0.0))
        .piece(0.0, f64::INFINITY, crate::expr::Expr::Const(1.0))
        .at(0.0, a)
        .build()?;
    let phi = Integrand::one().weight(Complex64::new(0.0, 1.0)).cut(0.0);
    let mut rows = Vec::new();
    for (k, &delta) in deltas.iter().enumerate() {
        let w = (1000.0 * delta).min(1.0);
        rows.extend(gauge_converge(&phi, &g, -w, w, &[delta], samples, seed.wrapping_add(k as u64))?.rows);
    }
    Ok(GaugeReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::func_model::FunctionDef;

    fn step(a: f64) -> PiecewiseFunction {
        FunctionDef::default()
            .piece(f64::NEG_INFINITY, 0.0, Expr::Const(0.0))
            .piece(0.0, f64::INFINITY, Expr::Const(1.0))
            .at(0.0, a)
            .build()
            .unwrap()
    }

    #[test]
    fn step_example_sums() {
        let f = step(7.0);
        let phi = Integrand::one().weight(Complex64::new(0.0, 1.0)).cut(0.0);
        let deltas: Vec<f64> = (1..=4).map(|k| 10f64.powi(-k)).collect();
        let rep = gauge_converge(&phi, &f, -1.0, 1.0, &deltas, 9, 7).unwrap();
        for row in &rep.rows {
            assert_eq!(row.hs_min, 0.5);
            assert_eq!(row.hs_max, 0.5);
            assert!(row.rs_gap >= 0.4, "{row:?}");
        }
    }

    #[test]
    fn continuous_pair_agrees() {
        let t = PiecewiseFunction::from_expr(Expr::X).unwrap();
        let phi = Integrand::of(&t);
        let rep = gauge_converge(&phi, &t, 0.0, 1.0, &[1e-3], 6, 1).unwrap();
        let row = rep.rows[0];
        assert!((row.hs_min - 0.5).abs() < 1e-3 && (row.rs_max - 0.5).abs() < 1e-3);
    }

    #[test]
    fn rejects_coarse_partition() {
        let f = step(0.0);
        let spec = GaugeSpec::for_function(&f, 0.1);
        let p = TaggedPartition {
            cells: vec![(-1.0, 1.0, 0.5)],
        };
        assert!(matches!(gauge_sum(&Integrand::one(), &f, &spec, &p), Err(Error::NotFine(_))));
    }
}
