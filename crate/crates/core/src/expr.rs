//! Expression trees over the closed atom set.
//!
//! Smooth atoms (exp, sin, cos, atan, tanh) accept any inner expression.
//! Atoms with a critical point (log|·|, |·|, sgn, heaviside, cantor) require
//! an affine inner argument so that their critical points can be located
//! exactly and turned into breakpoints.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::cantor::cantor_fn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Sin,
    Cos,
    Atan,
    Tanh,
    Sgn,
    Heaviside,
    Cantor,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Atan => "atan",
            Func::Tanh => "tanh",
            Func::Sgn => "sgn",
            Func::Heaviside => "heaviside",
            Func::Cantor => "cantor",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "atan" => Func::Atan,
            "tanh" => Func::Tanh,
            "sgn" => Func::Sgn,
            "heaviside" => Func::Heaviside,
            "cantor" => Func::Cantor,
            _ => return None,
        })
    }

    /// Atoms whose inner argument must be affine.
    pub fn requires_affine(self) -> bool {
        matches!(self, Func::Log | Func::Abs | Func::Sgn | Func::Heaviside | Func::Cantor)
    }
}

/// u = scale·x + shift
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub scale: f64,
    pub shift: f64,
}

impl Affine {
    pub fn new(scale: f64, shift: f64) -> Self {
        Affine { scale, shift }
    }

    /// Evaluates the map, snapping round-off residue at the zero to exactly 0.
    pub fn at(&self, t: f64) -> f64 {
        let u = self.scale * t + self.shift;
        if u.abs() <= 4.0 * f64::EPSILON * ((self.scale * t).abs() + self.shift.abs()) {
            0.0
        } else {
            u
        }
    }

    pub fn root(&self) -> Option<f64> {
        (self.scale != 0.0).then(|| -self.shift / self.scale)
    }

    pub fn inverse(&self, u: f64) -> f64 {
        (u - self.shift) / self.scale
    }
}

/// Which value to take at a point where an atom jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Point,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    /// Smooth atom with arbitrary inner argument.
    Apply(Func, Box<Expr>),
    /// Atom with a critical point; inner argument is affine.
    Kink(Func, Affine),
}

/// Cantor values replaced by a linear ramp on u ∈ [u0, u0 + du].
#[derive(Debug, Clone, Copy)]
pub struct Ramp {
    pub u0: f64,
    pub du: f64,
    pub c0: f64,
    pub dc: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Seed {
    X,
    Cantor,
}

#[derive(Clone, Copy)]
struct Ctx<'a> {
    side: Side,
    seed: Seed,
    ramp: Option<&'a Ramp>,
}

#[derive(Clone, Copy, Debug)]
struct Dual {
    v: f64,
    d: f64,
}

impl Dual {
    fn c(v: f64) -> Dual {
        Dual { v, d: 0.0 }
    }
}

/// Extended-real limit classification used for tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    Fin(f64),
    PosInf,
    NegInf,
    /// Bounded but without a limit (e.g. sin at infinity).
    Bounded,
    Unknown,
}

impl Ext {
    fn neg(self) -> Ext {
        match self {
            Ext::Fin(v) => Ext::Fin(-v),
            Ext::PosInf => Ext::NegInf,
            Ext::NegInf => Ext::PosInf,
            e => e,
        }
    }

    fn add(self, o: Ext) -> Ext {
        use Ext::*;
        match (self, o) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Fin(a), Fin(b)) => Fin(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => Unknown,
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            _ => Bounded,
        }
    }

    fn mul(self, o: Ext) -> Ext {
        use Ext::*;
        let sign = |e: Ext| match e {
            Fin(v) => v.signum(),
            PosInf => 1.0,
            NegInf => -1.0,
            _ => 0.0,
        };
        match (self, o) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Fin(a), Fin(b)) => Fin(a * b),
            (Fin(z), Bounded) | (Bounded, Fin(z)) if z == 0.0 => Fin(0.0),
            (Fin(_), Bounded) | (Bounded, Fin(_)) | (Bounded, Bounded) => Bounded,
            (Fin(z), _) | (_, Fin(z)) if z == 0.0 => Unknown,
            (Bounded, _) | (_, Bounded) => Unknown,
            (a, b) => {
                if sign(a) * sign(b) > 0.0 {
                    PosInf
                } else {
                    NegInf
                }
            }
        }
    }

    fn recip(self) -> Ext {
        use Ext::*;
        match self {
            Fin(v) if v != 0.0 => Fin(1.0 / v),
            PosInf | NegInf => Fin(0.0),
            _ => Unknown,
        }
    }
}

fn powd(x: Dual, p: f64) -> Dual {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        let n = p as i32;
        let v = x.v.powi(n);
        let d = if x.d == 0.0 { 0.0 } else { p * x.v.powi(n - 1) * x.d };
        Dual { v, d }
    } else {
        let v = x.v.powf(p);
        let d = if x.d == 0.0 { 0.0 } else { p * x.v.powf(p - 1.0) * x.d };
        Dual { v, d }
    }
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn kink(f: Func, a: Affine) -> Expr {
        Expr::Kink(f, a)
    }

    pub fn apply(f: Func, inner: Expr) -> Expr {
        Expr::Apply(f, Box::new(inner))
    }

    /// Polynomial in x with the given coefficients (lowest degree first).
    pub fn polynomial(coeffs: &[f64]) -> Expr {
        let mut e: Option<Expr> = None;
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let term = match k {
                0 => Expr::Const(c),
                1 => Expr::Const(c) * Expr::X,
                _ => Expr::Const(c) * Expr::Pow(Box::new(Expr::X), k as f64),
            };
            e = Some(match e {
                None => term,
                Some(prev) => prev + term,
            });
        }
        e.unwrap_or(Expr::Const(0.0))
    }

    fn ev(&self, t: f64, cx: Ctx) -> Dual {
        match self {
            Expr::Const(c) => Dual::c(*c),
            Expr::X => Dual {
                v: t,
                d: if cx.seed == Seed::X { 1.0 } else { 0.0 },
            },
            Expr::Neg(a) => {
                let a = a.ev(t, cx);
                Dual { v: -a.v, d: -a.d }
            }
            Expr::Add(a, b) => {
                let (a, b) = (a.ev(t, cx), b.ev(t, cx));
                Dual { v: a.v + b.v, d: a.d + b.d }
            }
            Expr::Sub(a, b) => {
                let (a, b) = (a.ev(t, cx), b.ev(t, cx));
                Dual { v: a.v - b.v, d: a.d - b.d }
            }
            Expr::Mul(a, b) => {
                let (a, b) = (a.ev(t, cx), b.ev(t, cx));
                Dual {
                    v: a.v * b.v,
                    d: a.d * b.v + a.v * b.d,
                }
            }
            Expr::Div(a, b) => {
                let (a, b) = (a.ev(t, cx), b.ev(t, cx));
                let v = a.v / b.v;
                let d = if a.d == 0.0 && b.d == 0.0 {
                    0.0
                } else {
                    (a.d * b.v - a.v * b.d) / (b.v * b.v)
                };
                Dual { v, d }
            }
            Expr::Pow(a, p) => powd(a.ev(t, cx), *p),
            Expr::Apply(f, inner) => {
                let u = inner.ev(t, cx);
                let (v, du) = match f {
                    Func::Exp => {
                        let e = u.v.exp();
                        (e, e)
                    }
                    Func::Sin => (u.v.sin(), u.v.cos()),
                    Func::Cos => (u.v.cos(), -u.v.sin()),
                    Func::Atan => (u.v.atan(), 1.0 / (1.0 + u.v * u.v)),
                    Func::Tanh => {
                        let th = u.v.tanh();
                        (th, 1.0 - th * th)
                    }
                    _ => unreachable!("non-smooth atom stored as Apply"),
                };
                Dual {
                    v,
                    d: if u.d == 0.0 { 0.0 } else { du * u.d },
                }
            }
            Expr::Kink(f, aff) => {
                let u = aff.at(t);
                let ud = if cx.seed == Seed::X { aff.scale } else { 0.0 };
                // direction of travel of u for one-sided evaluation at u = 0
                let dir = match cx.side {
                    Side::Point => 0.0,
                    Side::Left => -aff.scale.signum(),
                    Side::Right => aff.scale.signum(),
                };
                match f {
                    Func::Log => {
                        let v = u.abs().ln();
                        Dual {
                            v,
                            d: if ud == 0.0 { 0.0 } else { ud / u },
                        }
                    }
                    Func::Abs => {
                        let s = if u != 0.0 { u.signum() } else { dir };
                        Dual { v: u.abs(), d: s * ud }
                    }
                    Func::Sgn => {
                        let v = if u != 0.0 { u.signum() } else { dir };
                        Dual::c(v)
                    }
                    Func::Heaviside => {
                        let v = if u > 0.0 {
                            1.0
                        } else if u < 0.0 {
                            0.0
                        } else {
                            0.5 * (1.0 + dir)
                        };
                        Dual::c(v)
                    }
                    Func::Cantor => {
                        let v = match cx.ramp {
                            Some(r) if u > r.u0 && u < r.u0 + r.du => r.c0 + r.dc * (u - r.u0) / r.du,
                            _ => cantor_fn(u),
                        };
                        Dual {
                            v,
                            d: if cx.seed == Seed::Cantor { 1.0 } else { 0.0 },
                        }
                    }
                    _ => unreachable!("smooth atom stored as Kink"),
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_side(t, Side::Point)
    }

    pub fn eval_side(&self, t: f64, side: Side) -> f64 {
        self.ev(t, Ctx { side, seed: Seed::X, ramp: None }).v
    }

    /// Derivative of the absolutely continuous part (Cantor atoms contribute 0).
    pub fn deriv(&self, t: f64) -> f64 {
        self.deriv_side(t, Side::Point)
    }

    pub fn deriv_side(&self, t: f64, side: Side) -> f64 {
        self.ev(t, Ctx { side, seed: Seed::X, ramp: None }).d
    }

    /// ∂/∂C of the expression, treating the Cantor atom's value as a variable.
    pub fn cantor_sensitivity(&self, t: f64) -> f64 {
        self.ev(
            t,
            Ctx {
                side: Side::Point,
                seed: Seed::Cantor,
                ramp: None,
            },
        )
        .d
    }

    pub fn eval_ramp(&self, t: f64, ramp: &Ramp) -> f64 {
        self.ev(
            t,
            Ctx {
                side: Side::Point,
                seed: Seed::X,
                ramp: Some(ramp),
            },
        )
        .v
    }

    /// Coefficients (lowest degree first) when the expression is a polynomial in x.
    pub fn as_polynomial(&self) -> Option<Vec<f64>> {
        fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
            let mut out = vec![0.0; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        }
        fn add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
            let n = a.len().max(b.len());
            (0..n)
                .map(|k| a.get(k).copied().unwrap_or(0.0) + sign * b.get(k).copied().unwrap_or(0.0))
                .collect()
        }
        match self {
            Expr::Const(c) => Some(vec![*c]),
            Expr::X => Some(vec![0.0, 1.0]),
            Expr::Neg(a) => Some(a.as_polynomial()?.iter().map(|c| -c).collect()),
            Expr::Add(a, b) => Some(add(&a.as_polynomial()?, &b.as_polynomial()?, 1.0)),
            Expr::Sub(a, b) => Some(add(&a.as_polynomial()?, &b.as_polynomial()?, -1.0)),
            Expr::Mul(a, b) => Some(mul(&a.as_polynomial()?, &b.as_polynomial()?)),
            Expr::Div(a, b) => {
                let d = b.as_polynomial()?;
                if d.iter().skip(1).any(|&c| c != 0.0) || d[0] == 0.0 {
                    return None;
                }
                Some(a.as_polynomial()?.iter().map(|c| c / d[0]).collect())
            }
            Expr::Pow(a, p) => {
                if p.fract() != 0.0 || *p < 0.0 || *p > 40.0 {
                    return None;
                }
                let base = a.as_polynomial()?;
                let mut out = vec![1.0];
                for _ in 0..(*p as usize) {
                    out = mul(&out, &base);
                }
                Some(out)
            }
            Expr::Apply(..) | Expr::Kink(..) => None,
        }
    }

    pub fn as_affine(&self) -> Option<Affine> {
        let p = self.as_polynomial()?;
        if p.iter().skip(2).any(|&c| c != 0.0) {
            return None;
        }
        Some(Affine::new(p.get(1).copied().unwrap_or(0.0), p[0]))
    }

    /// Points where some atom is non-smooth or singular: zeros of affine
    /// inner arguments, Cantor support endpoints, zeros of affine bases of
    /// fractional or negative powers and of affine denominators.
    pub fn critical_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_critical(&mut out);
        out.retain(|c| c.is_finite());
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    fn collect_critical(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Const(_) | Expr::X => {}
            Expr::Neg(a) => a.collect_critical(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_critical(out);
                b.collect_critical(out);
            }
            Expr::Div(a, b) => {
                a.collect_critical(out);
                b.collect_critical(out);
                if let Some(r) = b.as_affine().and_then(|aff| aff.root()) {
                    out.push(r);
                }
            }
            Expr::Pow(a, p) => {
                a.collect_critical(out);
                if p.fract() != 0.0 || *p < 0.0 {
                    if let Some(r) = a.as_affine().and_then(|aff| aff.root()) {
                        out.push(r);
                    }
                }
            }
            Expr::Apply(_, inner) => inner.collect_critical(out),
            Expr::Kink(f, aff) => {
                if let Some(r) = aff.root() {
                    out.push(r);
                }
                if *f == Func::Cantor && aff.scale != 0.0 {
                    out.push(aff.inverse(1.0));
                }
            }
        }
    }

    /// The Cantor atoms' affine arguments (deduplicated).
    pub fn cantor_args(&self) -> Vec<Affine> {
        let mut out: Vec<Affine> = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Kink(Func::Cantor, a) = e {
                if !out.contains(a) {
                    out.push(*a);
                }
            }
        });
        out
    }

    pub fn contains_cantor(&self) -> bool {
        !self.cantor_args().is_empty()
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Apply(_, a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Limit as x → +∞ (sign > 0) or x → -∞ (sign < 0).
    pub fn limit_at(&self, sign: f64) -> Ext {
        match self {
            Expr::Const(c) => Ext::Fin(*c),
            Expr::X => {
                if sign > 0.0 {
                    Ext::PosInf
                } else {
                    Ext::NegInf
                }
            }
            Expr::Neg(a) => a.limit_at(sign).neg(),
            Expr::Add(a, b) => a.limit_at(sign).add(b.limit_at(sign)),
            Expr::Sub(a, b) => a.limit_at(sign).add(b.limit_at(sign).neg()),
            Expr::Mul(a, b) => a.limit_at(sign).mul(b.limit_at(sign)),
            Expr::Div(a, b) => {
                let (na, nb) = (a.limit_at(sign), b.limit_at(sign));
                match (na, nb) {
                    (Ext::PosInf | Ext::NegInf, Ext::PosInf | Ext::NegInf) => Ext::Unknown,
                    _ => na.mul(nb.recip()),
                }
            }
            Expr::Pow(a, p) => match a.limit_at(sign) {
                Ext::Fin(v) => {
                    let r = v.powf(*p);
                    if r.is_finite() {
                        Ext::Fin(r)
                    } else {
                        Ext::Unknown
                    }
                }
                Ext::PosInf => {
                    if *p > 0.0 {
                        Ext::PosInf
                    } else if *p < 0.0 {
                        Ext::Fin(0.0)
                    } else {
                        Ext::Fin(1.0)
                    }
                }
                Ext::NegInf if p.fract() == 0.0 => {
                    if *p < 0.0 {
                        Ext::Fin(0.0)
                    } else if *p == 0.0 {
                        Ext::Fin(1.0)
                    } else if (*p as i64) % 2 == 0 {
                        Ext::PosInf
                    } else {
                        Ext::NegInf
                    }
                }
                Ext::Bounded if *p >= 0.0 && p.fract() == 0.0 => Ext::Bounded,
                _ => Ext::Unknown,
            },
            Expr::Apply(f, inner) => {
                let u = inner.limit_at(sign);
                match (f, u) {
                    (_, Ext::Unknown) => Ext::Unknown,
                    (Func::Exp, Ext::Fin(v)) => Ext::Fin(v.exp()),
                    (Func::Exp, Ext::PosInf) => Ext::PosInf,
                    (Func::Exp, Ext::NegInf) => Ext::Fin(0.0),
                    (Func::Exp, Ext::Bounded) => Ext::Bounded,
                    (Func::Sin, Ext::Fin(v)) => Ext::Fin(v.sin()),
                    (Func::Cos, Ext::Fin(v)) => Ext::Fin(v.cos()),
                    (Func::Sin | Func::Cos, _) => Ext::Bounded,
                    (Func::Atan, Ext::Fin(v)) => Ext::Fin(v.atan()),
                    (Func::Atan, Ext::PosInf) => Ext::Fin(std::f64::consts::FRAC_PI_2),
                    (Func::Atan, Ext::NegInf) => Ext::Fin(-std::f64::consts::FRAC_PI_2),
                    (Func::Tanh, Ext::Fin(v)) => Ext::Fin(v.tanh()),
                    (Func::Tanh, Ext::PosInf) => Ext::Fin(1.0),
                    (Func::Tanh, Ext::NegInf) => Ext::Fin(-1.0),
                    (Func::Atan | Func::Tanh, _) => Ext::Bounded,
                    _ => Ext::Unknown,
                }
            }
            Expr::Kink(f, aff) => {
                if aff.scale == 0.0 {
                    return Ext::Fin(self.eval(0.0));
                }
                let up = aff.scale * sign > 0.0;
                match f {
                    Func::Log | Func::Abs => Ext::PosInf,
                    Func::Sgn => Ext::Fin(if up { 1.0 } else { -1.0 }),
                    Func::Heaviside | Func::Cantor => Ext::Fin(if up { 1.0 } else { 0.0 }),
                    _ => Ext::Unknown,
                }
            }
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(o))
    }
}
impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(o))
    }
}
impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(o))
    }
}
impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(o))
    }
}
impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v}")
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.scale, self.shift) {
            (1.0, 0.0) => write!(f, "x"),
            (a, 0.0) => write!(f, "{}*x", fmt_num(a)),
            (1.0, b) => write!(f, "x + {}", fmt_num(b)),
            (a, b) => write!(f, "{}*x + {}", fmt_num(a), fmt_num(b)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_num(*c)),
            Expr::X => write!(f, "x"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, p) => write!(f, "({a})^({})", fmt_num(*p)),
            Expr::Apply(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Kink(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::X
    }

    #[test]
    fn evaluation_and_derivative() {
        let e = Expr::apply(Func::Atan, x());
        assert_eq!(e.eval(0.0), 0.0);
        assert!((e.deriv(1.0) - 0.5).abs() < 1e-15);
        let p = x() * x() * Expr::apply(Func::Tanh, x());
        let h = 1e-6;
        let fd = (p.eval(0.7 + h) - p.eval(0.7 - h)) / (2.0 * h);
        assert!((p.deriv(0.7) - fd).abs() < 1e-8);
    }

    #[test]
    fn one_sided_jumps() {
        let s = Expr::kink(Func::Sgn, Affine::new(1.0, 0.0));
        assert_eq!(s.eval_side(0.0, Side::Left), -1.0);
        assert_eq!(s.eval_side(0.0, Side::Point), 0.0);
        assert_eq!(s.eval_side(0.0, Side::Right), 1.0);
        let h = Expr::kink(Func::Heaviside, Affine::new(-1.0, 0.5));
        // H(0.5 - x): 1 to the left of 0.5
        assert_eq!(h.eval_side(0.5, Side::Left), 1.0);
        assert_eq!(h.eval_side(0.5, Side::Point), 0.5);
        assert_eq!(h.eval_side(0.5, Side::Right), 0.0);
    }

    #[test]
    fn reciprocal_log_limit_at_zero() {
        let e = Expr::Const(1.0) / Expr::kink(Func::Log, Affine::new(1.0, 0.0));
        assert_eq!(e.eval_side(0.0, Side::Right), 0.0);
    }

    #[test]
    fn limits_at_infinity() {
        assert_eq!(Expr::apply(Func::Atan, x()).limit_at(1.0), Ext::Fin(std::f64::consts::FRAC_PI_2));
        let sq = Expr::apply(Func::Sin, Expr::Pow(Box::new(x()), 0.5)) / Expr::Pow(Box::new(x()), 2.0 / 3.0);
        assert_eq!(sq.limit_at(1.0), Ext::Fin(0.0));
        assert_eq!((x() * x()).limit_at(-1.0), Ext::PosInf);
        assert_eq!(Expr::apply(Func::Sin, x()).limit_at(1.0), Ext::Bounded);
    }

    #[test]
    fn polynomial_extraction_and_critical_points() {
        let e = (x() + Expr::Const(1.0)) * (x() - Expr::Const(2.0));
        assert_eq!(e.as_polynomial().unwrap(), vec![-2.0, -1.0, 1.0]);
        let k = Expr::kink(Func::Abs, Affine::new(2.0, -1.0)) + Expr::kink(Func::Cantor, Affine::new(1.0, 0.0));
        assert_eq!(k.critical_points(), vec![0.0, 0.5, 1.0]);
    }
}
