//! Piecewise real-line functions: smooth expression pieces, breakpoint
//! triples, and tail descriptors.

use serde::Serialize;

use crate::cantor::{cantor_fn, cantor_integral_range, CantorOptions};
use crate::error::{Error, Result};
use crate::expr::{Affine, Expr, Ext, Func, Side};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions, QuadResult};
use num_complex::Complex64;

/// An expression attached to the open interval (lo, hi).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub expr: Expr,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, expr: Expr) -> Self {
        Piece { lo, hi, expr }
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    /// Whether ∫ e^{-ist} expr dt has a closed form on this piece.
    pub fn closed_form(&self) -> bool {
        self.expr.as_polynomial().is_some()
    }

    pub fn is_singular(&self) -> bool {
        self.expr.contains_cantor()
    }
}

/// (c, f(c-), f(c), f(c+)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoint {
    pub location: f64,
    pub left_limit: f64,
    pub point_value: f64,
    pub right_limit: f64,
}

impl Breakpoint {
    pub fn is_jump(&self) -> bool {
        self.left_limit != self.point_value || self.point_value != self.right_limit
    }

    pub fn mass(&self) -> f64 {
        self.right_limit - self.left_limit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailSide {
    Plus,
    Minus,
}

impl TailSide {
    pub fn sign(self) -> f64 {
        match self {
            TailSide::Plus => 1.0,
            TailSide::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TailClass {
    L1,
    BvZero,
    BvLimit(f64),
    /// Coefficients a_0, a_1, ... of the asymptotic polynomial.
    PolynomialGrowth(Vec<f64>),
    /// Automatic classification failed; usable on compact intervals only.
    Unclassified(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBehavior {
    pub side: TailSide,
    pub class: TailClass,
}

/// f(c + u) = -f(c - u) for 0 < u < radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OddSymmetry {
    pub center: f64,
    pub radius: f64,
}

/// Unvalidated description of a function, as produced by the parser.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FunctionDef {
    pub pieces: Vec<Piece>,
    /// Point values overriding the default at finite locations.
    pub points: Vec<(f64, f64)>,
    pub tail_plus: Option<TailClass>,
    pub tail_minus: Option<TailClass>,
    pub odd: Option<OddSymmetry>,
}

impl FunctionDef {
    pub fn single(expr: Expr) -> Self {
        FunctionDef {
            pieces: vec![Piece::new(f64::NEG_INFINITY, f64::INFINITY, expr)],
            ..Default::default()
        }
    }

    pub fn piece(mut self, lo: f64, hi: f64, expr: Expr) -> Self {
        self.pieces.push(Piece::new(lo, hi, expr));
        self
    }

    pub fn at(mut self, c: f64, v: f64) -> Self {
        self.points.push((c, v));
        self
    }

    pub fn tails(mut self, plus: Option<TailClass>, minus: Option<TailClass>) -> Self {
        self.tail_plus = plus;
        self.tail_minus = minus;
        self
    }

    pub fn odd(mut self, center: f64, radius: f64) -> Self {
        self.odd = Some(OddSymmetry { center, radius });
        self
    }

    pub fn build(self) -> Result<PiecewiseFunction> {
        PiecewiseFunction::new(self)
    }
}

/// The polynomials removed by [`PiecewiseFunction::subtract_asymptote`]:
/// f = g + H(x) p_plus(x) + H(-x) p_minus(x).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AsymptoteRecord {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

pub fn poly_eval(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

impl AsymptoteRecord {
    pub fn is_empty(&self) -> bool {
        self.plus.iter().all(|&c| c == 0.0) && self.minus.iter().all(|&c| c == 0.0)
    }

    /// H(t)p₊(t) + H(-t)p₋(t), with H(0) = 1/2.
    pub fn eval(&self, t: f64) -> f64 {
        let (p, m) = (poly_eval(&self.plus, t), poly_eval(&self.minus, t));
        if t > 0.0 {
            p
        } else if t < 0.0 {
            m
        } else {
            0.5 * (p + m)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseFunction {
    pieces: Vec<Piece>,
    breakpoints: Vec<Breakpoint>,
    /// Points with an infinite one-sided limit (principal-value centres).
    singularities: Vec<f64>,
    tail_plus: TailBehavior,
    tail_minus: TailBehavior,
    odd: Option<OddSymmetry>,
    #[serde(skip)]
    def: FunctionDef,
}

/// Zeros of h in (a, b) where it changes sign on a 256-cell grid, refined
/// by bisection.
fn sign_changes<F: Fn(f64) -> f64>(h: F, a: f64, b: f64) -> Vec<f64> {
    const CELLS: usize = 256;
    let mut out = Vec::new();
    let x = |k: usize| a + (b - a) * k as f64 / CELLS as f64;
    let mut prev = h(x(0));
    for k in 1..=CELLS {
        let cur = h(x(k));
        if prev * cur < 0.0 {
            let (mut lo, mut hi, mut hlo) = (x(k - 1), x(k), prev);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                let hm = h(m);
                if hm * hlo > 0.0 {
                    (lo, hlo) = (m, hm);
                } else {
                    hi = m;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    out
}

/// A point strictly inside (lo, hi), which may be unbounded.
pub fn interior_point(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    }
}

/// Sample points on [T, 2T] for the decay checks.
const ENVELOPE_SAMPLES: usize = 32;

fn side_limit(expr: &Expr, c: f64, side: Side) -> f64 {
    let v = expr.eval_side(c, side);
    if !v.is_nan() {
        return v;
    }
    let dir = if side == Side::Left { -1.0 } else { 1.0 };
    let scale = c.abs().max(1.0);
    let (h1, h2) = (1e-5 * scale, 1e-6 * scale);
    let (v1, v2) = (expr.eval(c + dir * h1), expr.eval(c + dir * h2));
    v2 + (v2 - v1) * h2 / (h1 - h2)
}

impl PiecewiseFunction {
    pub fn new(def: FunctionDef) -> Result<Self> {
        let mut pieces = def.pieces.clone();
        if pieces.is_empty() {
            return Err(Error::Validation("no pieces".into()));
        }
        pieces.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
        if pieces[0].lo != f64::NEG_INFINITY || pieces.last().unwrap().hi != f64::INFINITY {
            return Err(Error::Validation("pieces must cover the whole real line".into()));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::Validation(format!(
                    "pieces must be contiguous: gap or overlap between {} and {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        for p in &pieces {
            if !(p.lo < p.hi) {
                return Err(Error::Validation(format!("empty interval ({}, {})", p.lo, p.hi)));
            }
            if p.expr.cantor_args().len() > 1 {
                return Err(Error::Unsupported("more than one distinct cantor argument in a piece".into()));
            }
        }
        for (i, &(c, v)) in def.points.iter().enumerate() {
            if !c.is_finite() || !v.is_finite() {
                return Err(Error::Validation(format!("point value at {c} must be finite")));
            }
            if def.points[..i].iter().any(|&(c2, v2)| c2 == c && v2 != v) {
                return Err(Error::Validation(format!("conflicting point values at {c}")));
            }
        }

        // candidate breakpoints: piece boundaries, critical points, explicit points
        let mut cands: Vec<f64> = Vec::new();
        for (i, p) in pieces.iter().enumerate() {
            if i > 0 {
                cands.push(p.lo);
            }
            cands.extend(p.expr.critical_points().into_iter().filter(|&c| p.contains(c)));
        }
        cands.extend(def.points.iter().map(|&(c, _)| c));
        cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cands.dedup();

        let piece_left = |c: f64| pieces.iter().find(|p| c > p.lo && c <= p.hi).unwrap();
        let piece_right = |c: f64| pieces.iter().find(|p| c >= p.lo && c < p.hi).unwrap();

        let mut breakpoints = Vec::new();
        let mut singularities = Vec::new();
        for &c in &cands {
            let left = side_limit(&piece_left(c).expr, c, Side::Left);
            let right = side_limit(&piece_right(c).expr, c, Side::Right);
            let explicit = def.points.iter().find(|&&(c2, _)| c2 == c).map(|&(_, v)| v);
            if !left.is_finite() || !right.is_finite() {
                if explicit.is_some() {
                    return Err(Error::Validation(format!("point value given at singular point {c}")));
                }
                singularities.push(c);
                continue;
            }
            let point = match explicit {
                Some(v) => v,
                None => {
                    let p = piece_right(c);
                    let v = if p.contains(c) { p.expr.eval(c) } else { f64::NAN };
                    if v.is_finite() {
                        v
                    } else {
                        0.5 * (left + right)
                    }
                }
            };
            breakpoints.push(Breakpoint {
                location: c,
                left_limit: left,
                point_value: point,
                right_limit: right,
            });
        }

        // finiteness of each piece away from its breakpoints
        for p in &pieces {
            let lo = if p.lo.is_finite() { p.lo } else { p.hi.min(0.0) - 30.0 };
            let hi = if p.hi.is_finite() { p.hi } else { p.lo.max(0.0) + 30.0 };
            for k in 1..64 {
                let t = lo + (hi - lo) * (k as f64 - 0.5 + 0.37 / k as f64) / 64.0;
                if cands.contains(&t) || !p.contains(t) {
                    continue;
                }
                if !p.expr.eval(t).is_finite() {
                    return Err(Error::Validation(format!("{} is not finite at {t}", p.expr)));
                }
            }
        }

        let mut f = PiecewiseFunction {
            pieces,
            breakpoints,
            singularities,
            tail_plus: TailBehavior {
                side: TailSide::Plus,
                class: TailClass::BvZero,
            },
            tail_minus: TailBehavior {
                side: TailSide::Minus,
                class: TailClass::BvZero,
            },
            odd: def.odd,
            def: def.clone(),
        };
        for side in [TailSide::Plus, TailSide::Minus] {
            let declared = match side {
                TailSide::Plus => def.tail_plus.clone(),
                TailSide::Minus => def.tail_minus.clone(),
            };
            let class = match f.classify_side(side, declared.clone()) {
                Ok(c) => c,
                Err(e) if declared.is_none() => TailClass::Unclassified(e.to_string()),
                Err(e) => return Err(e),
            };
            match side {
                TailSide::Plus => f.tail_plus.class = class,
                TailSide::Minus => f.tail_minus.class = class,
            }
        }
        if let Some(o) = def.odd {
            f.check_odd(o)?;
        }
        Ok(f)
    }

    pub fn from_expr(expr: Expr) -> Result<Self> {
        FunctionDef::single(expr).build()
    }

    pub fn def(&self) -> &FunctionDef {
        &self.def
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn singularities(&self) -> &[f64] {
        &self.singularities
    }

    pub fn odd_symmetry(&self) -> Option<OddSymmetry> {
        self.odd
    }

    pub fn tail(&self, side: TailSide) -> &TailBehavior {
        match side {
            TailSide::Plus => &self.tail_plus,
            TailSide::Minus => &self.tail_minus,
        }
    }

    /// Breakpoint and singularity locations, sorted.
    pub fn features(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.breakpoints.iter().map(|b| b.location).chain(self.singularities.iter().copied()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn breakpoint_at(&self, c: f64) -> Option<&Breakpoint> {
        self.breakpoints.iter().find(|b| b.location == c)
    }

    pub fn piece_at(&self, t: f64) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.contains(t))
    }

    fn check_singular(&self, t: f64) -> Result<()> {
        if self.singularities.contains(&t) {
            Err(Error::Domain(format!("t = {t} is a singular point")))
        } else if !t.is_finite() {
            Err(Error::Domain(format!("t = {t} is not finite")))
        } else {
            Ok(())
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_singular(t)?;
        if let Some(b) = self.breakpoint_at(t) {
            return Ok(b.point_value);
        }
        Ok(self.piece_at(t).map(|p| p.expr.eval(t)).unwrap_or(f64::NAN))
    }

    /// Evaluation without the singularity check; infinite near PV centres.
    pub fn value(&self, t: f64) -> f64 {
        if let Some(b) = self.breakpoint_at(t) {
            return b.point_value;
        }
        self.piece_at(t).map(|p| p.expr.eval(t)).unwrap_or(f64::NAN)
    }

    /// f(t-) or f(t+) without error checks.
    pub fn limit(&self, t: f64, side: Side) -> f64 {
        if let Some(b) = self.breakpoint_at(t) {
            return match side {
                Side::Left => b.left_limit,
                Side::Right => b.right_limit,
                Side::Point => b.point_value,
            };
        }
        self.value(t)
    }

    pub fn one_sided_limits(&self, x: f64) -> Result<(f64, f64)> {
        self.check_singular(x)?;
        match self.breakpoint_at(x) {
            Some(b) => Ok((b.left_limit, b.right_limit)),
            None => {
                let v = self.value(x);
                Ok((v, v))
            }
        }
    }

    pub fn midpoint_value(&self, x: f64) -> Result<f64> {
        let (l, r) = self.one_sided_limits(x)?;
        Ok(0.5 * (l + r))
    }

    /// Derivative of the absolutely continuous part (away from breakpoints).
    pub fn density(&self, t: f64) -> f64 {
        self.piece_at(t).map(|p| p.expr.deriv(t)).unwrap_or(0.0)
    }

    pub fn jumps(&self, a: f64, b: f64) -> Vec<Breakpoint> {
        self.breakpoints
            .iter()
            .filter(|bp| bp.location >= a && bp.location <= b && bp.is_jump())
            .copied()
            .collect()
    }

    /// Sorted cut points of [a, b]: a, every feature strictly inside, b.
    pub fn cuts(&self, a: f64, b: f64) -> Vec<f64> {
        let mut v = vec![a];
        for p in &self.pieces[1..] {
            if p.lo > a && p.lo < b {
                v.push(p.lo);
            }
        }
        for c in self.features() {
            if c > a && c < b {
                v.push(c);
            }
        }
        v.push(b);
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v.dedup();
        v
    }

    /// Cantor components restricted to [a, b]: (affine argument, t-range).
    pub fn cantor_components(&self, a: f64, b: f64) -> Vec<(usize, Affine, f64, f64)> {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            for aff in p.expr.cantor_args() {
                let (t0, t1) = {
                    let x0 = aff.inverse(0.0);
                    let x1 = aff.inverse(1.0);
                    (x0.min(x1), x0.max(x1))
                };
                let lo = t0.max(p.lo).max(a);
                let hi = t1.min(p.hi).min(b);
                if hi > lo {
                    out.push((i, aff, lo, hi));
                }
            }
        }
        out
    }

    /// Integral of φ(t) against the singular part of df over [a, b]. `rough`
    /// lists the arguments of Cantor atoms inside φ.
    pub fn singular_integral<F>(&self, phi: F, a: f64, b: f64, depth: usize, rough: &[Affine], breaks: &[f64]) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut total = Complex64::new(0.0, 0.0);
        for (i, aff, lo, hi) in self.cantor_components(a, b) {
            let expr = &self.pieces[i].expr;
            let (u0, u1) = {
                let (x, y) = (aff.at(lo), aff.at(hi));
                (x.min(y), x.max(y))
            };
            // dC(u(t)) is a positive measure in u; orientation sign is sgn(scale)
            let orient = aff.scale.signum();
            let g = |u: f64| {
                let t = aff.inverse(u);
                phi(t) * (expr.cantor_sensitivity(t) * orient)
            };
            // v = r(t(u)), skipping maps that coincide with this measure's own
            let rough = rough
                .iter()
                .map(|r| Affine::new(r.scale / aff.scale, r.shift - r.scale * aff.shift / aff.scale))
                .filter(|r| (r.scale - 1.0).abs() > 1e-12 || r.shift.abs() > 1e-12)
                .collect();
            let breaks = breaks.iter().filter(|&&t| t >= lo && t <= hi).map(|&t| aff.at(t)).collect();
            let opts = CantorOptions {
                depth,
                rough,
                breaks,
                ..CantorOptions::default()
            };
            total += cantor_integral_range(&g, u0, u1, &opts)?;
        }
        Ok(total)
    }

    pub fn total_variation(&self, a: f64, b: f64) -> Result<f64> {
        if !(a <= b) {
            return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
        }
        if let Some(&c) = self.singularities.iter().find(|&&c| c >= a && c <= b) {
            return Err(Error::NotBv(format!("singular point {c} in [{a}, {b}]")));
        }
        if a == b {
            return Ok(0.0);
        }
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 20_000,
        };
        let cuts = self.cuts(a, b);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = interior_point(lo, hi);
            let Some(p) = self.piece_at(mid) else { continue };
            let dens = |t: f64| Complex64::new(p.expr.deriv(t).abs(), 0.0);
            let finite = |a: f64, b: f64| -> Result<QuadResult> {
                let mut knots = vec![a];
                knots.extend(sign_changes(|t| p.expr.deriv(t), a, b));
                knots.push(b);
                let mut r = QuadResult::zero();
                for k in knots.windows(2) {
                    r = r.combine(integrate(dens, k[0], k[1], &opts)?);
                }
                Ok(r)
            };
            let r = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => finite(lo, hi),
                (true, false) => finite(lo, mid)
                    .and_then(|x| Ok(x.combine(integrate_to_infinity(dens, mid, 1.0, &opts)?))),
                (false, true) => finite(mid, hi)
                    .and_then(|x| Ok(x.combine(integrate_to_infinity(dens, mid, -1.0, &opts)?))),
                (false, false) => integrate_to_infinity(dens, 0.0, 1.0, &opts)
                    .and_then(|x| Ok(x.combine(integrate_to_infinity(dens, 0.0, -1.0, &opts)?))),
            }
            .map_err(|e| Error::NotBv(format!("density not integrable on ({lo}, {hi}): {e}")))?;
            if !r.value.re.is_finite() || r.abs_error > 1e-6 * (1.0 + r.value.re) {
                return Err(Error::NotBv(format!("variation diverges on ({lo}, {hi})")));
            }
            total += r.value.re;
        }
        for bp in &self.breakpoints {
            let c = bp.location;
            if c > a && c < b {
                total += (bp.point_value - bp.left_limit).abs() + (bp.right_limit - bp.point_value).abs();
            } else if c == a {
                total += (bp.right_limit - bp.point_value).abs();
            } else if c == b {
                total += (bp.point_value - bp.left_limit).abs();
            }
        }
        for (i, aff, lo, hi) in self.cantor_components(a, b) {
            let expr = &self.pieces[i].expr;
            let (u0, u1) = {
                let (x, y) = (aff.at(lo), aff.at(hi));
                (x.min(y), x.max(y))
            };
            let g = |u: f64| Complex64::new(expr.cantor_sensitivity(aff.inverse(u)).abs(), 0.0);
            total += cantor_integral_range(&g, u0, u1, &CantorOptions::default())?.re;
        }
        Ok(total)
    }

    fn tail_expr(&self, side: TailSide) -> &Expr {
        match side {
            TailSide::Plus => &self.pieces.last().unwrap().expr,
            TailSide::Minus => &self.pieces[0].expr,
        }
    }

    /// Maxima of |h| over [T, 2T] for three successive decades, oriented by side.
    fn envelope<F: Fn(f64) -> f64>(&self, side: TailSide, h: F) -> [f64; 3] {
        let edge = self.features().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let base = 10.0 * edge.max(1.0);
        let mut out = [0.0f64; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let t0 = base * 10f64.powi(k as i32);
            for j in 0..ENVELOPE_SAMPLES {
                let t = side.sign() * (t0 + t0 * (j as f64 + 0.5) / ENVELOPE_SAMPLES as f64);
                *slot = slot.max(h(t).abs());
            }
        }
        out
    }

    fn decays<F: Fn(f64) -> f64>(&self, side: TailSide, h: F) -> bool {
        let e = self.envelope(side, h);
        e.iter().all(|v| v.is_finite()) && e[1] <= e[0] * (1.0 + 1e-9) + 1e-300 && e[2] <= e[1] * (1.0 + 1e-9) + 1e-300
    }

    fn classify_side(&self, side: TailSide, declared: Option<TailClass>) -> Result<TailClass> {
        let expr = self.tail_expr(side).clone();
        let s = side.sign();
        let name = if s > 0.0 { "+inf" } else { "-inf" };
        let lim = expr.limit_at(s);
        let f = |t: f64| expr.eval(t);
        let is_l1 = |me: &Self| {
            let e = me.envelope(side, |t| t * f(t));
            e.iter().all(|v| v.is_finite()) && e[1] <= 0.5 * e[0] + 1e-300 && e[2] <= 0.5 * e[1] + 1e-300
        };
        match declared {
            Some(TailClass::PolynomialGrowth(c)) => {
                let p = c.clone();
                // differences at rounding level of f and p count as zero
                let residual = |t: f64| {
                    let (a, b) = (f(t), poly_eval(&p, t));
                    if (a - b).abs() <= 64.0 * f64::EPSILON * (a.abs() + b.abs()) {
                        0.0
                    } else {
                        a - b
                    }
                };
                if !self.decays(side, residual) {
                    return Err(Error::Classification(format!(
                        "residual after removing the polynomial does not decay at {name}"
                    )));
                }
                Ok(TailClass::PolynomialGrowth(c))
            }
            Some(TailClass::BvLimit(v)) => {
                if let Ext::Fin(l) = lim {
                    if (l - v).abs() > 1e-12 * (1.0 + v.abs()) {
                        return Err(Error::Classification(format!("limit at {name} is {l}, not {v}")));
                    }
                }
                if !self.decays(side, |t| f(t) - v) {
                    return Err(Error::Classification(format!("f - {v} does not decay at {name}")));
                }
                Ok(TailClass::BvLimit(v))
            }
            Some(TailClass::L1) => {
                if !matches!(lim, Ext::Fin(l) if l == 0.0) && !self.decays(side, f) {
                    return Err(Error::Classification(format!("tail at {name} does not decay")));
                }
                if !is_l1(self) {
                    return Err(Error::Classification(format!("tail at {name} is not integrable")));
                }
                Ok(TailClass::L1)
            }
            Some(TailClass::BvZero) => {
                if !matches!(lim, Ext::Fin(l) if l == 0.0) && !self.decays(side, f) {
                    return Err(Error::Classification(format!("tail at {name} does not tend to 0")));
                }
                Ok(TailClass::BvZero)
            }
            Some(TailClass::Unclassified(msg)) => Err(Error::Classification(msg)),
            None => match lim {
                Ext::Fin(0.0) => Ok(if is_l1(self) { TailClass::L1 } else { TailClass::BvZero }),
                Ext::Fin(l) => {
                    if !self.decays(side, |t| f(t) - l) {
                        return Err(Error::Classification(format!("f - {l} does not decay at {name}")));
                    }
                    Ok(TailClass::BvLimit(l))
                }
                Ext::PosInf | Ext::NegInf => Err(Error::Classification(format!(
                    "unbounded tail at {name}; declare poly(...) coefficients"
                ))),
                Ext::Bounded | Ext::Unknown => {
                    let e = self.envelope(side, f);
                    if e[2] < 1e-3 * e[0].max(1e-300) || e[2] == 0.0 {
                        Ok(if is_l1(self) { TailClass::L1 } else { TailClass::BvZero })
                    } else {
                        Err(Error::Classification(format!("cannot classify tail at {name}")))
                    }
                }
            },
        }
    }

    pub fn classify_tails(&self) -> Result<(TailBehavior, TailBehavior)> {
        for t in [&self.tail_plus, &self.tail_minus] {
            if let TailClass::Unclassified(msg) = &t.class {
                return Err(Error::Classification(msg.clone()));
            }
        }
        Ok((self.tail_plus.clone(), self.tail_minus.clone()))
    }

    /// Pointwise product; breakpoints of either factor are kept.
    pub fn product(&self, other: &PiecewiseFunction) -> Result<PiecewiseFunction> {
        self.combine(other, |a, b| a * b, |x, y| x * y)
    }

    /// α·self + β·other.
    pub fn linear_combination(&self, alpha: f64, other: &PiecewiseFunction, beta: f64) -> Result<PiecewiseFunction> {
        self.combine(
            other,
            |a, b| Expr::Const(alpha) * a + Expr::Const(beta) * b,
            |x, y| alpha * x + beta * y,
        )
    }

    pub fn scaled(&self, alpha: f64) -> Result<PiecewiseFunction> {
        self.linear_combination(alpha, self, 0.0)
    }

    fn combine(
        &self,
        other: &PiecewiseFunction,
        op: impl Fn(Expr, Expr) -> Expr,
        val: impl Fn(f64, f64) -> f64,
    ) -> Result<PiecewiseFunction> {
        let mut edges: Vec<f64> = self.pieces[1..].iter().chain(other.pieces[1..].iter()).map(|p| p.lo).collect();
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
        let mut bounds = vec![f64::NEG_INFINITY];
        bounds.extend(edges);
        bounds.push(f64::INFINITY);
        let mut pieces = Vec::new();
        for w in bounds.windows(2) {
            let mid = interior_point(w[0], w[1]);
            let (Some(p), Some(q)) = (self.piece_at(mid), other.piece_at(mid)) else {
                return Err(Error::Validation("cannot locate pieces for combination".into()));
            };
            pieces.push(Piece::new(w[0], w[1], op(p.expr.clone(), q.expr.clone())));
        }
        let mut points = Vec::new();
        for c in self.breakpoints.iter().chain(other.breakpoints.iter()).map(|b| b.location) {
            let v = val(self.value(c), other.value(c));
            if v.is_finite() && !points.iter().any(|&(x, _)| x == c) {
                points.push((c, v));
            }
        }
        PiecewiseFunction::new(FunctionDef {
            pieces,
            points,
            ..Default::default()
        })
    }

    /// f on [a, b] and 0 elsewhere (`inside = true`), or the complement.
    pub fn masked(&self, a: f64, b: f64, inside: bool) -> Result<PiecewiseFunction> {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let mut cuts = vec![p.lo];
            cuts.extend([a, b].into_iter().filter(|&c| c > p.lo && c < p.hi));
            cuts.push(p.hi);
            for w in cuts.windows(2) {
                let mid = interior_point(w[0], w[1]);
                let keep = (mid > a && mid < b) == inside;
                let expr = if keep { p.expr.clone() } else { Expr::Const(0.0) };
                pieces.push(Piece::new(w[0], w[1], expr));
            }
        }
        let points = self
            .breakpoints
            .iter()
            .filter(|bp| bp.location != a && bp.location != b)
            .filter(|bp| (bp.location > a && bp.location < b) == inside)
            .map(|bp| (bp.location, bp.point_value))
            .collect();
        let (tp, tm) = if inside {
            (None, None)
        } else {
            (self.def.tail_plus.clone(), self.def.tail_minus.clone())
        };
        PiecewiseFunction::new(FunctionDef {
            pieces,
            points,
            tail_plus: tp,
            tail_minus: tm,
            odd: None,
        })
    }

    pub fn asymptote_record(&self) -> AsymptoteRecord {
        let coeffs = |c: &TailClass| match c {
            TailClass::BvLimit(v) => vec![*v],
            TailClass::PolynomialGrowth(p) => p.clone(),
            _ => Vec::new(),
        };
        AsymptoteRecord {
            plus: coeffs(&self.tail_plus.class),
            minus: coeffs(&self.tail_minus.class),
        }
    }

    /// g = f - H(x)p₊(x) - H(-x)p₋(x), with BV-to-zero tails.
    pub fn subtract_asymptote(&self) -> Result<(PiecewiseFunction, AsymptoteRecord)> {
        let rec = self.asymptote_record();
        if rec.is_empty() {
            return Ok((self.clone(), rec));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let parts: Vec<(f64, f64)> = if p.contains(0.0) {
                vec![(p.lo, 0.0), (0.0, p.hi)]
            } else {
                vec![(p.lo, p.hi)]
            };
            for (lo, hi) in parts {
                let poly = if hi <= 0.0 { &rec.minus } else { &rec.plus };
                let expr = if poly.iter().all(|&c| c == 0.0) {
                    p.expr.clone()
                } else {
                    p.expr.clone() - Expr::polynomial(poly)
                };
                pieces.push(Piece::new(lo, hi, expr));
            }
        }
        let mut points: Vec<(f64, f64)> = Vec::new();
        for bp in &self.breakpoints {
            points.push((bp.location, bp.point_value - rec.eval(bp.location)));
        }
        if self.breakpoint_at(0.0).is_none() && !self.singularities.contains(&0.0) {
            points.push((0.0, self.value(0.0) - rec.eval(0.0)));
        }
        let def = FunctionDef {
            pieces,
            points,
            tail_plus: None,
            tail_minus: None,
            odd: None,
        };
        let g = PiecewiseFunction::new(def)?;
        for side in [TailSide::Plus, TailSide::Minus] {
            if !matches!(g.tail(side).class, TailClass::L1 | TailClass::BvZero) {
                return Err(Error::Classification("residual does not tend to zero".into()));
            }
        }
        Ok((g, rec))
    }

    fn check_odd(&self, o: OddSymmetry) -> Result<()> {
        if !(o.radius > 0.0) {
            return Err(Error::NotOdd {
                center: o.center,
                detail: "radius must be positive".into(),
            });
        }
        for k in 1..=40 {
            let u = o.radius * (k as f64 - 0.3) / 40.0;
            let (l, r) = (self.value(o.center - u), self.value(o.center + u));
            if (l + r).abs() > 1e-10 * (1.0 + l.abs().max(r.abs())) {
                return Err(Error::NotOdd {
                    center: o.center,
                    detail: format!("f(c+{u}) = {r}, f(c-{u}) = {l}"),
                });
            }
        }
        Ok(())
    }
}

/// Convenience constructors for common atoms.
pub mod atoms {
    use super::*;

    pub fn heaviside() -> Expr {
        Expr::kink(Func::Heaviside, Affine::new(1.0, 0.0))
    }

    pub fn sgn() -> Expr {
        Expr::kink(Func::Sgn, Affine::new(1.0, 0.0))
    }

    pub fn cantor() -> Expr {
        Expr::kink(Func::Cantor, Affine::new(1.0, 0.0))
    }

    pub fn atan() -> Expr {
        Expr::apply(Func::Atan, Expr::X)
    }

    pub fn cantor_value(u: f64) -> f64 {
        cantor_fn(u)
    }
}

#[cfg(test)]
mod tests {
    use super::atoms::*;
    use super::*;
    use std::f64::consts::PI;

    fn step(a: f64) -> PiecewiseFunction {
        FunctionDef::default()
            .piece(f64::NEG_INFINITY, 0.0, Expr::Const(0.0))
            .piece(0.0, f64::INFINITY, Expr::Const(1.0))
            .at(0.0, a)
            .build()
            .unwrap()
    }

    #[test]
    fn heaviside_and_atan_values() {
        let h = PiecewiseFunction::from_expr(heaviside()).unwrap();
        assert_eq!(h.eval(0.0).unwrap(), 0.5);
        let a = PiecewiseFunction::from_expr(atan()).unwrap();
        assert_eq!(a.eval(0.0).unwrap(), 0.0);
        let c = PiecewiseFunction::from_expr(cantor()).unwrap();
        assert!((c.eval(1.0 / 3.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn limits_and_midpoints() {
        let f = step(7.0);
        assert_eq!(f.one_sided_limits(0.0).unwrap(), (0.0, 1.0));
        assert_eq!(f.eval(0.0).unwrap(), 7.0);
        assert_eq!(f.midpoint_value(0.0).unwrap(), 0.5);
        let a = PiecewiseFunction::from_expr(atan()).unwrap();
        let (l, r) = a.one_sided_limits(1.0).unwrap();
        assert!((l - PI / 4.0).abs() < 1e-15 && (r - PI / 4.0).abs() < 1e-15);
        let s = PiecewiseFunction::from_expr(sgn()).unwrap();
        assert_eq!(s.one_sided_limits(0.0).unwrap(), (-1.0, 1.0));
        assert_eq!(s.midpoint_value(0.0).unwrap(), 0.0);
    }

    #[test]
    fn variations() {
        let s = PiecewiseFunction::from_expr(sgn()).unwrap();
        assert!((s.total_variation(-1.0, 1.0).unwrap() - 2.0).abs() < 1e-14);
        let a = PiecewiseFunction::from_expr(atan()).unwrap();
        let v = a.total_variation(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!((v - PI).abs() < 1e-9, "{v}");
        let c = PiecewiseFunction::from_expr(cantor()).unwrap();
        assert!((c.total_variation(0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tails() {
        let a = PiecewiseFunction::from_expr(atan()).unwrap();
        let (p, m) = a.classify_tails().unwrap();
        assert_eq!(p.class, TailClass::BvLimit(PI / 2.0));
        assert_eq!(m.class, TailClass::BvLimit(-PI / 2.0));
        let x = Expr::X;
        let sq = Expr::apply(Func::Sin, Expr::Pow(Box::new(x.clone()), 0.5)) / Expr::Pow(Box::new(x), 2.0 / 3.0);
        let f = FunctionDef::default()
            .piece(f64::NEG_INFINITY, 1.0, Expr::Const(0.0))
            .piece(1.0, f64::INFINITY, sq)
            .build()
            .unwrap();
        assert_eq!(f.tail(TailSide::Plus).class, TailClass::BvZero);
        let e = PiecewiseFunction::from_expr(Expr::apply(Func::Exp, -(Expr::X * Expr::X))).unwrap();
        assert_eq!(e.tail(TailSide::Plus).class, TailClass::L1);
    }

    #[test]
    fn polynomial_growth_needs_declaration() {
        let p = Expr::X * Expr::X * Expr::apply(Func::Tanh, Expr::X);
        let undeclared = PiecewiseFunction::from_expr(p.clone()).unwrap();
        assert!(matches!(undeclared.classify_tails(), Err(Error::Classification(_))));
        let f = FunctionDef::single(p)
            .tails(
                Some(TailClass::PolynomialGrowth(vec![0.0, 0.0, 1.0])),
                Some(TailClass::PolynomialGrowth(vec![0.0, 0.0, -1.0])),
            )
            .build()
            .unwrap();
        let (g, rec) = f.subtract_asymptote().unwrap();
        assert_eq!(rec.plus, vec![0.0, 0.0, 1.0]);
        for k in 0..200 {
            let t = -20.0 + 0.2 * k as f64 + 0.013;
            let back = g.eval(t).unwrap() + rec.eval(t);
            assert!((back - f.eval(t).unwrap()).abs() < 1e-12);
        }
        let wrong = FunctionDef::single(Expr::X * Expr::X * Expr::apply(Func::Tanh, Expr::X))
            .tails(
                Some(TailClass::PolynomialGrowth(vec![0.0, 0.0, 1.0])),
                Some(TailClass::PolynomialGrowth(vec![0.0, 0.0, 1.0])),
            )
            .build();
        assert!(matches!(wrong, Err(Error::Classification(_))));
    }

    #[test]
    fn arctan_residual() {
        let a = PiecewiseFunction::from_expr(atan()).unwrap();
        let (g, rec) = a.subtract_asymptote().unwrap();
        assert_eq!(g.eval(0.0).unwrap(), 0.0);
        for &t in &[-3.0f64, -0.5, 0.25, 2.0] {
            let want = t.atan() - PI / 2.0 * t.signum();
            assert!((g.eval(t).unwrap() - want).abs() < 1e-15);
            assert!((g.eval(t).unwrap() + rec.eval(t) - t.atan()).abs() < 1e-15);
        }
    }

    #[test]
    fn jump_lists() {
        let h = PiecewiseFunction::from_expr(heaviside()).unwrap();
        let j = h.jumps(-1.0, 1.0);
        assert_eq!(j.len(), 1);
        assert_eq!((j[0].location, j[0].left_limit, j[0].point_value, j[0].right_limit), (0.0, 0.0, 0.5, 1.0));
        assert!(PiecewiseFunction::from_expr(atan()).unwrap().jumps(-1e9, 1e9).is_empty());
        let s = step(7.0).jumps(-1.0, 1.0);
        assert_eq!(s[0].point_value, 7.0);
    }

    #[test]
    fn rejects_bad_definitions() {
        let gap = FunctionDef::default()
            .piece(f64::NEG_INFINITY, 0.0, Expr::Const(0.0))
            .piece(1.0, f64::INFINITY, Expr::Const(0.0))
            .build();
        assert!(matches!(gap, Err(Error::Validation(_))));
        let conflict = FunctionDef::single(Expr::Const(0.0)).at(1.0, 2.0).at(1.0, 3.0).build();
        assert!(matches!(conflict, Err(Error::Validation(_))));
    }

    #[test]
    fn singular_points_and_odd_record() {
        let e = sgn() * Expr::Pow(Box::new(Expr::kink(Func::Abs, Affine::new(1.0, 0.0))), -0.5);
        let f = FunctionDef::default()
            .piece(f64::NEG_INFINITY, -1.0, Expr::Const(0.0))
            .piece(-1.0, 1.0, e)
            .piece(1.0, f64::INFINITY, Expr::Const(0.0))
            .odd(0.0, 1.0)
            .build()
            .unwrap();
        assert_eq!(f.singularities(), &[0.0]);
        assert!(matches!(f.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(f.total_variation(-1.0, 1.0), Err(Error::NotBv(_))));
        let not_odd = FunctionDef::single(Expr::apply(Func::Exp, -(Expr::X * Expr::X))).odd(0.0, 1.0).build();
        assert!(matches!(not_odd, Err(Error::NotOdd { .. })));
    }
}
