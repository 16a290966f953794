//! A tiny arithmetic grammar for closed-form branches and curve coordinates.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions: `exp`, `abs`, `sqrt` (one argument), `min`, `max` (two).

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Abs(Box<Expr>),
    Sqrt(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    // Produced only by differentiation.
    Ln(Box<Expr>),
    Sign(Box<Expr>),
    /// `if lhs <= rhs { then } else { otherwise }`
    IfLe {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

use Expr::*;

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
        let mut p = Parser { src: src.as_bytes(), pos: 0, vars };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Const(c) => *c,
            Var(i) => vars[*i],
            Neg(a) => -a.eval(vars),
            Add(a, c) => a.eval(vars) + c.eval(vars),
            Sub(a, c) => a.eval(vars) - c.eval(vars),
            Mul(a, c) => a.eval(vars) * c.eval(vars),
            Div(a, c) => a.eval(vars) / c.eval(vars),
            Pow(a, c) => {
                let base = a.eval(vars);
                match **c {
                    Const(k) if k == k.trunc() && k.abs() <= 64.0 => base.powi(k as i32),
                    _ => base.powf(c.eval(vars)),
                }
            }
            Exp(a) => a.eval(vars).exp(),
            Abs(a) => a.eval(vars).abs(),
            Sqrt(a) => a.eval(vars).sqrt(),
            Min(a, c) => a.eval(vars).min(c.eval(vars)),
            Max(a, c) => a.eval(vars).max(c.eval(vars)),
            Ln(a) => a.eval(vars).ln(),
            Sign(a) => {
                let v = a.eval(vars);
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            IfLe { lhs, rhs, then, otherwise } => {
                if lhs.eval(vars) <= rhs.eval(vars) {
                    then.eval(vars)
                } else {
                    otherwise.eval(vars)
                }
            }
        }
    }

    /// Convenience for one-variable expressions.
    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(&[x])
    }

    /// Symbolic partial derivative with respect to variable `var`.
    /// At kinks of `abs`, `min` and `max` a one-sided derivative is used.
    pub fn derivative(&self, var: usize) -> Expr {
        let d = |e: &Expr| e.derivative(var);
        let out = match self {
            Const(_) => Const(0.0),
            Var(i) => Const(if *i == var { 1.0 } else { 0.0 }),
            Neg(a) => Neg(b(d(a))),
            Add(a, c) => Add(b(d(a)), b(d(c))),
            Sub(a, c) => Sub(b(d(a)), b(d(c))),
            Mul(a, c) => Add(b(Mul(b(d(a)), c.clone())), b(Mul(a.clone(), b(d(c))))),
            Div(a, c) => Div(
                b(Sub(b(Mul(b(d(a)), c.clone())), b(Mul(a.clone(), b(d(c)))))),
                b(Pow(c.clone(), b(Const(2.0)))),
            ),
            Pow(a, c) => match **c {
                Const(k) => Mul(
                    b(Mul(b(Const(k)), b(Pow(a.clone(), b(Const(k - 1.0)))))),
                    b(d(a)),
                ),
                _ => Mul(
                    b(self.clone()),
                    b(Add(
                        b(Mul(b(d(c)), b(Ln(a.clone())))),
                        b(Div(b(Mul(c.clone(), b(d(a)))), a.clone())),
                    )),
                ),
            },
            Exp(a) => Mul(b(self.clone()), b(d(a))),
            Abs(a) => Mul(b(Sign(a.clone())), b(d(a))),
            Sqrt(a) => Div(b(d(a)), b(Mul(b(Const(2.0)), b(self.clone())))),
            Min(a, c) => IfLe { lhs: a.clone(), rhs: c.clone(), then: b(d(a)), otherwise: b(d(c)) },
            Max(a, c) => IfLe { lhs: c.clone(), rhs: a.clone(), then: b(d(a)), otherwise: b(d(c)) },
            Ln(a) => Div(b(d(a)), a.clone()),
            Sign(_) => Const(0.0),
            IfLe { lhs, rhs, then, otherwise } => IfLe {
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                then: b(d(then)),
                otherwise: b(d(otherwise)),
            },
        };
        out.simplify()
    }

    /// Constant folding and removal of additive/multiplicative identities.
    pub fn simplify(self) -> Expr {
        fn c(e: &Expr) -> Option<f64> {
            if let Const(v) = e {
                Some(*v)
            } else {
                None
            }
        }
        match self {
            Neg(a) => match a.simplify() {
                Const(v) => Const(-v),
                Neg(inner) => *inner,
                s => Neg(b(s)),
            },
            Add(a, r) => {
                let (a, r) = (a.simplify(), r.simplify());
                match (c(&a), c(&r)) {
                    (Some(x), Some(y)) => Const(x + y),
                    (Some(x), _) if x == 0.0 => r,
                    (_, Some(y)) if y == 0.0 => a,
                    _ => Add(b(a), b(r)),
                }
            }
            Sub(a, r) => {
                let (a, r) = (a.simplify(), r.simplify());
                match (c(&a), c(&r)) {
                    (Some(x), Some(y)) => Const(x - y),
                    (Some(x), _) if x == 0.0 => Neg(b(r)),
                    (_, Some(y)) if y == 0.0 => a,
                    _ => Sub(b(a), b(r)),
                }
            }
            Mul(a, r) => {
                let (a, r) = (a.simplify(), r.simplify());
                match (c(&a), c(&r)) {
                    (Some(x), Some(y)) => Const(x * y),
                    (Some(x), _) | (_, Some(x)) if x == 0.0 => Const(0.0),
                    (Some(x), _) if x == 1.0 => r,
                    (_, Some(y)) if y == 1.0 => a,
                    _ => Mul(b(a), b(r)),
                }
            }
            Div(a, r) => {
                let (a, r) = (a.simplify(), r.simplify());
                match (c(&a), c(&r)) {
                    (Some(x), Some(y)) => Const(x / y),
                    (Some(x), _) if x == 0.0 => Const(0.0),
                    (_, Some(y)) if y == 1.0 => a,
                    _ => Div(b(a), b(r)),
                }
            }
            Pow(a, r) => {
                let (a, r) = (a.simplify(), r.simplify());
                match (c(&a), c(&r)) {
                    (Some(x), Some(y)) => Const(x.powf(y)),
                    (_, Some(y)) if y == 0.0 => Const(1.0),
                    (_, Some(y)) if y == 1.0 => a,
                    _ => Pow(b(a), b(r)),
                }
            }
            IfLe { lhs, rhs, then, otherwise } => {
                let (then, otherwise) = (then.simplify(), otherwise.simplify());
                if then == otherwise {
                    then
                } else {
                    IfLe { lhs, rhs, then: b(then), otherwise: b(otherwise) }
                }
            }
            other => other,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(c) => write!(f, "{c}"),
            Var(i) => write!(f, "v{i}"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, c) => write!(f, "({a} + {c})"),
            Sub(a, c) => write!(f, "({a} - {c})"),
            Mul(a, c) => write!(f, "({a} * {c})"),
            Div(a, c) => write!(f, "({a} / {c})"),
            Pow(a, c) => write!(f, "({a} ^ {c})"),
            Exp(a) => write!(f, "exp({a})"),
            Abs(a) => write!(f, "abs({a})"),
            Sqrt(a) => write!(f, "sqrt({a})"),
            Min(a, c) => write!(f, "min({a}, {c})"),
            Max(a, c) => write!(f, "max({a}, {c})"),
            Ln(a) => write!(f, "ln({a})"),
            Sign(a) => write!(f, "sign({a})"),
            IfLe { lhs, rhs, then, otherwise } => {
                write!(f, "(if {lhs} <= {rhs} then {then} else {otherwise})")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Expression { column: self.pos + 1, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Add(b(lhs), b(self.term()?));
            } else if self.eat(b'-') {
                lhs = Sub(b(lhs), b(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Mul(b(lhs), b(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Div(b(lhs), b(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Neg(b(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(Pow(b(base), b(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => self.number(),
            Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .map(Const)
            .map_err(|_| Error::Expression { column: start + 1, message: format!("bad number '{text}'") })
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("").to_string();
        if self.eat(b'(') {
            let mut args = vec![self.expr()?];
            while self.eat(b',') {
                args.push(self.expr()?);
            }
            if !self.eat(b')') {
                return Err(self.err("expected ')' after function arguments"));
            }
            let arity = |n: usize| -> Result<()> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(Error::Expression {
                        column: start + 1,
                        message: format!("{name} takes {n} argument(s), got {}", args.len()),
                    })
                }
            };
            let out = match name.as_str() {
                "exp" | "abs" | "sqrt" => {
                    arity(1)?;
                    let a = b(args.pop().unwrap());
                    match name.as_str() {
                        "exp" => Exp(a),
                        "abs" => Abs(a),
                        _ => Sqrt(a),
                    }
                }
                "min" | "max" => {
                    arity(2)?;
                    let r = b(args.pop().unwrap());
                    let l = b(args.pop().unwrap());
                    if name == "min" {
                        Min(l, r)
                    } else {
                        Max(l, r)
                    }
                }
                _ => {
                    return Err(Error::Expression { column: start + 1, message: format!("unknown function '{name}'") })
                }
            };
            return Ok(out);
        }
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Var(i));
        }
        match name.as_str() {
            "pi" => Ok(Const(std::f64::consts::PI)),
            "e" => Ok(Const(std::f64::consts::E)),
            _ => Err(Error::Expression { column: start + 1, message: format!("unknown identifier '{name}'") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s, &["x"]).unwrap()
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(p("1 + 2 * 3").eval1(0.0), 7.0);
        assert_eq!(p("-x^2").eval1(3.0), -9.0);
        assert_eq!(p("2^3^2").eval1(0.0), 512.0);
        assert_eq!(p("(1 + 2) * 3").eval1(0.0), 9.0);
        assert_eq!(p("min(x, 2) + max(x, 2)").eval1(5.0), 7.0);
        assert!((p("1.5e-1").eval1(0.0) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_value_and_slope() {
        let s = p("2/(1+exp(-2*x))-1");
        assert!(s.eval1(0.0).abs() < 1e-15);
        let ds = s.derivative(0);
        assert!((ds.eval1(0.0) - 1.0).abs() < 1e-12);
        let d2 = ds.derivative(0);
        assert!(d2.eval1(0.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for src in ["x^2 + 3*x", "sqrt(x)", "exp(x) / (1 + x)", "abs(x - 1)", "min(x, 2*x)", "x^x"] {
            let e = p(src);
            let de = e.derivative(0);
            let x0 = 0.7;
            let h = 1e-6;
            let fd = (e.eval1(x0 + h) - e.eval1(x0 - h)) / (2.0 * h);
            assert!((de.eval1(x0) - fd).abs() < 1e-6, "{src}: {} vs {fd}", de.eval1(x0));
        }
    }

    #[test]
    fn errors_carry_column() {
        match Expr::parse("1 + foo", &["x"]) {
            Err(Error::Expression { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Expr::parse("exp(1, 2)", &["x"]).is_err());
        assert!(Expr::parse("(x", &["x"]).is_err());
        assert!(Expr::parse("x )", &["x"]).is_err());
    }
}
