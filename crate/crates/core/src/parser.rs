//! Text grammar for piecewise functions.
//!
//! ```text
//! definition := clause ('|' clause)* modifier*
//! clause     := 'on' ('('|'[') bound ',' bound (')'|']') ':' expr
//! modifier   := 'at' const ':' const
//!             | ('tail+' | 'tail-') ('l1' | 'bvzero' | 'limit' ['(' const ')'] | 'poly' '(' const (',' const)* ')')
//!             | 'odd' '(' const ',' const ')'
//! expr       := term (('+'|'-') term)*
//! term       := unary (('*'|'/') unary)*
//! unary      := '-' unary | power
//! power      := atom ['^' unary]
//! atom       := number | 'x' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Bounds may be `inf`/`-inf` or constant expressions such as `1/e`. The
//! atoms `abs`, `sgn`, `heaviside`, `cantor` and `log` (meaning log|u|) take
//! an affine argument; `exp`, `sin`, `cos`, `atan`, `tanh` and `sqrt` take any
//! argument. Exponents must be constant.

use crate::error::{Error, Result};
use crate::expr::{Expr, Func};
use crate::func_model::{FunctionDef, PiecewiseFunction, TailClass, TailSide};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let k = if matches!(chars.get(j + 1), Some('+') | Some('-')) { j + 2 } else { j + 1 };
                if chars.get(k).is_some_and(|d| d.is_ascii_digit()) {
                    j = k;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
            }
            let s: String = chars[i..j].iter().collect();
            let v: f64 = s.parse().map_err(|_| Error::Parse {
                line: l0,
                col: c0,
                msg: format!("bad number '{s}'"),
            })?;
            out.push(Token { tok: Tok::Num(v), line: l0, col: c0 });
            advance(j - i, &mut i);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let mut s: String = chars[i..j].iter().collect();
            if s == "tail" && matches!(chars.get(j), Some('+') | Some('-')) {
                s.push(chars[j]);
                j += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            advance(j - i, &mut i);
            continue;
        }
        if "()[],:|+-*/^".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
            advance(1, &mut i);
            continue;
        }
        return Err(Error::Parse {
            line: l0,
            col: c0,
            msg: format!("unexpected character '{c}'"),
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

/// Parsed expression plus whether it is free of x.
struct Node {
    expr: Expr,
    constant: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Parse { line, col, msg: msg.into() })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn eat_ident(&mut self, name: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == name) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_sym('+') {
                '+'
            } else if self.eat_sym('-') {
                '-'
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Node {
                expr: if op == '+' { lhs.expr + rhs.expr } else { lhs.expr - rhs.expr },
                constant: lhs.constant && rhs.constant,
            };
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_sym('*') {
                '*'
            } else if self.eat_sym('/') {
                '/'
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Node {
                expr: if op == '*' { lhs.expr * rhs.expr } else { lhs.expr / rhs.expr },
                constant: lhs.constant && rhs.constant,
            };
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat_sym('-') {
            let n = self.unary()?;
            return Ok(Node {
                expr: -n.expr,
                constant: n.constant,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if !self.eat_sym('^') {
            return Ok(base);
        }
        let at = self.here();
        let e = self.unary()?;
        if !e.constant {
            return Err(Error::Parse {
                line: at.0,
                col: at.1,
                msg: "exponent must be constant".into(),
            });
        }
        Ok(Node {
            expr: Expr::Pow(Box::new(base.expr), e.expr.eval(0.0)),
            constant: base.constant,
        })
    }

    fn atom(&mut self) -> Result<Node> {
        let at = self.here();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node {
                expr: Expr::Const(v),
                constant: true,
            }),
            Tok::Sym('(') => {
                let n = self.expr()?;
                self.expect_sym(')')?;
                Ok(n)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Node {
                    expr: Expr::X,
                    constant: false,
                }),
                "pi" => Ok(Node {
                    expr: Expr::Const(std::f64::consts::PI),
                    constant: true,
                }),
                "e" => Ok(Node {
                    expr: Expr::Const(std::f64::consts::E),
                    constant: true,
                }),
                _ => {
                    self.expect_sym('(')?;
                    let arg = self.expr()?;
                    self.expect_sym(')')?;
                    let fail = |msg: String| Error::Parse {
                        line: at.0,
                        col: at.1,
                        msg,
                    };
                    if name == "sqrt" {
                        return Ok(Node {
                            expr: Expr::Pow(Box::new(arg.expr), 0.5),
                            constant: arg.constant,
                        });
                    }
                    let f = Func::from_name(&name).ok_or_else(|| fail(format!("unknown function '{name}'")))?;
                    let expr = if f.requires_affine() {
                        // log(abs(u)) is log|u| already
                        let aff = match (&f, &arg.expr) {
                            (Func::Log, Expr::Kink(Func::Abs, a)) => Some(*a),
                            _ => arg.expr.as_affine(),
                        };
                        let aff = aff.ok_or_else(|| fail(format!("argument of {name} must be affine in x")))?;
                        if aff.scale == 0.0 {
                            Expr::Const(Expr::kink(f, aff).eval(0.0))
                        } else {
                            Expr::kink(f, aff)
                        }
                    } else {
                        Expr::apply(f, arg.expr)
                    };
                    Ok(Node {
                        expr,
                        constant: arg.constant,
                    })
                }
            },
            Tok::Sym(c) => Err(Error::Parse {
                line: at.0,
                col: at.1,
                msg: format!("unexpected '{c}'"),
            }),
        }
    }

    fn constant(&mut self) -> Result<f64> {
        let at = self.here();
        let n = self.expr()?;
        if !n.constant {
            return Err(Error::Parse {
                line: at.0,
                col: at.1,
                msg: "expected a constant".into(),
            });
        }
        Ok(n.expr.eval(0.0))
    }

    fn bound(&mut self) -> Result<f64> {
        if self.eat_ident("inf") {
            return Ok(f64::INFINITY);
        }
        if self.peek() == Some(&Tok::Sym('-')) && matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Ident(s)) if s == "inf") {
            self.pos += 2;
            return Ok(f64::NEG_INFINITY);
        }
        self.constant()
    }

    fn tail(&mut self) -> Result<TailDecl> {
        let Some(Tok::Ident(kind)) = self.peek().cloned() else {
            return self.err("expected a tail class (l1, bvzero, limit, poly)");
        };
        self.pos += 1;
        match kind.as_str() {
            "l1" => Ok(TailDecl::Class(TailClass::L1)),
            "bvzero" => Ok(TailDecl::Class(TailClass::BvZero)),
            "limit" => {
                if self.eat_sym('(') {
                    let v = self.constant()?;
                    self.expect_sym(')')?;
                    Ok(TailDecl::Class(TailClass::BvLimit(v)))
                } else {
                    Ok(TailDecl::AnyLimit)
                }
            }
            "poly" => {
                self.expect_sym('(')?;
                let mut c = vec![self.constant()?];
                while self.eat_sym(',') {
                    c.push(self.constant()?);
                }
                self.expect_sym(')')?;
                Ok(TailDecl::Class(TailClass::PolynomialGrowth(c)))
            }
            other => {
                self.pos -= 1;
                self.err(format!("unknown tail class '{other}'"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TailDecl {
    Class(TailClass),
    /// `limit` without a value: any finite limit, found by classification.
    AnyLimit,
}

/// Parse the grammar into an unvalidated definition.
pub fn parse_definition(text: &str) -> Result<(FunctionDef, [Option<bool>; 2])> {
    let toks = lex(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.col + 1));
    let mut p = Parser { toks, pos: 0, end };
    let mut def = FunctionDef::default();
    let mut any_limit = [None, None];
    loop {
        if !p.eat_ident("on") {
            return p.err("expected 'on'");
        }
        if !(p.eat_sym('(') || p.eat_sym('[')) {
            return p.err("expected '(' or '['");
        }
        let lo = p.bound()?;
        p.expect_sym(',')?;
        let hi = p.bound()?;
        if !(p.eat_sym(')') || p.eat_sym(']')) {
            return p.err("expected ')' or ']'");
        }
        p.expect_sym(':')?;
        let e = p.expr()?;
        def = def.piece(lo, hi, e.expr);
        if !p.eat_sym('|') {
            break;
        }
    }
    while p.peek().is_some() {
        if p.eat_ident("at") {
            let c = p.constant()?;
            p.expect_sym(':')?;
            let v = p.constant()?;
            def = def.at(c, v);
        } else if p.eat_ident("tail+") {
            match p.tail()? {
                TailDecl::Class(c) => def.tail_plus = Some(c),
                TailDecl::AnyLimit => any_limit[0] = Some(true),
            }
        } else if p.eat_ident("tail-") {
            match p.tail()? {
                TailDecl::Class(c) => def.tail_minus = Some(c),
                TailDecl::AnyLimit => any_limit[1] = Some(true),
            }
        } else if p.eat_ident("odd") {
            p.expect_sym('(')?;
            let c = p.constant()?;
            p.expect_sym(',')?;
            let d = p.constant()?;
            p.expect_sym(')')?;
            def = def.odd(c, d);
        } else {
            return p.err("expected 'at', 'tail+', 'tail-' or 'odd'");
        }
    }
    def.pieces.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
    Ok((def, any_limit))
}

/// Parse and validate a function definition.
pub fn parse_function(text: &str) -> Result<PiecewiseFunction> {
    let (def, any_limit) = parse_definition(text)?;
    let f = PiecewiseFunction::new(def)?;
    for (flag, side) in any_limit.iter().zip([TailSide::Plus, TailSide::Minus]) {
        if flag.is_some() && !matches!(f.tail(side).class, TailClass::BvLimit(_) | TailClass::BvZero | TailClass::L1) {
            return Err(Error::Validation(format!("tail at {side:?} has no finite limit: {:?}", f.tail(side).class)));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Side;

    #[test]
    fn arctan_round_trip() {
        let f = parse_function("on (0,inf): atan(x) | on (-inf,0): atan(x) tail+ limit tail- limit").unwrap();
        for &t in &[-3.0, -0.5, 0.0, 0.7, 10.0] {
            assert!((f.eval(t).unwrap() - t.atan()).abs() < 1e-15);
        }
        assert_eq!(f.tail(TailSide::Plus).class, TailClass::BvLimit(std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn log_example() {
        let f = parse_function("on (-inf,0]: 0 | on (0,1/e): 1/log(x) | on [1/e,inf): -1/(e*x)^2").unwrap();
        let c = (-1.0f64).exp();
        assert!((f.limit(c, Side::Left) + 1.0).abs() < 1e-12);
        assert!((f.limit(c, Side::Right) + 1.0).abs() < 1e-12);
        assert!((f.eval(0.1).unwrap() - 1.0 / 0.1f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_position() {
        match parse_function("on (0,: x") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (1, 7)),
            other => panic!("{other:?}"),
        }
        match parse_function("on (-inf,inf): x\n  + log(x^2)") {
            Err(Error::Parse { line, col, msg }) => {
                assert_eq!((line, col), (2, 5));
                assert!(msg.contains("affine"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_function("on (-inf,inf): x^x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_function("on (-inf,1): x"), Err(Error::Validation(_))));
    }

    #[test]
    fn modifiers() {
        let f = parse_function("on (-inf,inf): sgn(x)*abs(x)^(-1/2) odd(0, 0.5) # pv example").unwrap();
        assert_eq!(f.odd_symmetry().unwrap().radius, 0.5);
        let f = parse_function("on (-inf,0): 0 | on (0,inf): 1 at 0: 7").unwrap();
        assert_eq!(f.eval(0.0).unwrap(), 7.0);
        let f = parse_function("on (-inf,inf): x^2*tanh(x) tail+ poly(0,0,1) tail- poly(0,0,-1)").unwrap();
        assert_eq!(f.tail(TailSide::Minus).class, TailClass::PolynomialGrowth(vec![0.0, 0.0, -1.0]));
    }
}
