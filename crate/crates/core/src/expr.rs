//! Small expression language for user-supplied profiles `f(r)` and
//! potentials `h(x, y)`, evaluated over any [`Scalar`].

use crate::error::{GeoError, Result};
use crate::scalar::Scalar;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    R,
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Ln,
    Exp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

/// Variable bindings for evaluation; unbound variables are a domain error.
#[derive(Clone, Copy, Debug, Default)]
pub struct Bindings<S> {
    pub r: Option<S>,
    pub x: Option<S>,
    pub y: Option<S>,
}

impl<S> Bindings<S> {
    pub fn r(r: S) -> Self {
        Bindings { r: Some(r), x: None, y: None }
    }
    pub fn xy(x: S, y: S) -> Self {
        Bindings { r: None, x: Some(x), y: Some(y) }
    }
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Ln => "ln",
            Func::Exp => "exp",
        }
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser { s: text.as_bytes(), i: 0 };
        p.skip_ws();
        let e = p.expr()?;
        p.skip_ws();
        if p.i < p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn uses(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(a) | Expr::Call(_, a) => a.uses(v),
            Expr::Bin(_, a, b) => a.uses(v) || b.uses(v),
        }
    }

    pub fn eval<S: Scalar>(&self, b: &Bindings<S>) -> Result<S> {
        Ok(match self {
            Expr::Num(c) => S::cst(*c),
            Expr::Var(v) => {
                let slot = match v {
                    Var::R => b.r,
                    Var::X => b.x,
                    Var::Y => b.y,
                };
                slot.ok_or_else(|| GeoError::Domain(format!("variable {v:?} is not bound")))?
            }
            Expr::Neg(a) => -a.eval(b)?,
            Expr::Call(f, a) => {
                let x = a.eval(b)?;
                match f {
                    Func::Sqrt => {
                        if x.val() < 0.0 {
                            return Err(GeoError::Domain(format!("sqrt of {}", x.val())));
                        }
                        x.sqrt()
                    }
                    Func::Ln => {
                        if x.val() <= 0.0 {
                            return Err(GeoError::Domain(format!("ln of {}", x.val())));
                        }
                        x.ln()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                }
            }
            Expr::Bin(op, l, r) => {
                let x = l.eval(b)?;
                match op {
                    BinOp::Add => x + r.eval(b)?,
                    BinOp::Sub => x - r.eval(b)?,
                    BinOp::Mul => x * r.eval(b)?,
                    BinOp::Div => {
                        let y = r.eval(b)?;
                        if y.val() == 0.0 {
                            return Err(GeoError::Domain("division by zero".into()));
                        }
                        x / y
                    }
                    BinOp::Pow => match **r {
                        Expr::Num(p) if p.fract() == 0.0 && p.abs() < 64.0 => {
                            if p < 0.0 && x.val() == 0.0 {
                                return Err(GeoError::Domain("negative power of zero".into()));
                            }
                            x.powi(p as i32)
                        }
                        Expr::Num(p) => {
                            if x.val() < 0.0 || (x.val() == 0.0 && p < 0.0) {
                                return Err(GeoError::Domain(format!("{}^{p}", x.val())));
                            }
                            x.powf(p)
                        }
                        _ => {
                            if x.val() <= 0.0 {
                                return Err(GeoError::Domain("variable power of a non-positive base".into()));
                            }
                            (x.ln() * r.eval(b)?).exp()
                        }
                    },
                }
            }
        })
    }

    /// Evaluate with plain floating point.
    pub fn eval_f64(&self, b: &Bindings<f64>) -> Result<f64> {
        self.eval(b)
    }

    /// Symbolic derivative with light constant folding.
    pub fn derivative(&self, v: Var) -> Expr {
        use Expr::*;
        match self {
            Num(_) => Num(0.0),
            Var(w) => Num(if *w == v { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.derivative(v)),
            Call(f, a) => {
                let da = a.derivative(v);
                let outer = match f {
                    Func::Sqrt => div(Num(0.5), Call(Func::Sqrt, a.clone())),
                    Func::Sin => Call(Func::Cos, a.clone()),
                    Func::Cos => neg(Call(Func::Sin, a.clone())),
                    Func::Ln => div(Num(1.0), (**a).clone()),
                    Func::Exp => Call(Func::Exp, a.clone()),
                };
                mul(outer, da)
            }
            Bin(op, l, r) => {
                let dl = l.derivative(v);
                let dr = r.derivative(v);
                match op {
                    BinOp::Add => add(dl, dr),
                    BinOp::Sub => sub(dl, dr),
                    BinOp::Mul => add(mul(dl, (**r).clone()), mul((**l).clone(), dr)),
                    BinOp::Div => div(
                        sub(mul(dl, (**r).clone()), mul((**l).clone(), dr)),
                        pow((**r).clone(), Num(2.0)),
                    ),
                    BinOp::Pow => match **r {
                        Num(p) => mul(mul(Num(p), pow((**l).clone(), Num(p - 1.0))), dl),
                        _ => {
                            let lnl = Call(Func::Ln, l.clone());
                            mul(
                                self.clone(),
                                add(mul(dr, lnl), div(mul((**r).clone(), dl), (**l).clone())),
                            )
                        }
                    },
                }
            }
        }
    }
}

fn is_num(e: &Expr, c: f64) -> bool {
    matches!(e, Expr::Num(x) if *x == c)
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(c) => Expr::Num(-c),
        a => Expr::Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        _ if is_num(&a, 0.0) => b,
        _ if is_num(&b, 0.0) => a,
        _ => Expr::Bin(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
        _ if is_num(&b, 0.0) => a,
        _ if is_num(&a, 0.0) => neg(b),
        _ => Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        _ if is_num(&a, 0.0) || is_num(&b, 0.0) => Expr::Num(0.0),
        _ if is_num(&a, 1.0) => b,
        _ if is_num(&b, 1.0) => a,
        _ => Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_num(&a, 0.0) => Expr::Num(0.0),
        _ if is_num(&b, 1.0) => a,
        _ => Expr::Bin(BinOp::Div, Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_num(&b, 1.0) => a,
        _ if is_num(&b, 0.0) => Expr::Num(1.0),
        _ => Expr::Bin(BinOp::Pow, Box::new(a), Box::new(b)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Num(c) => write!(f, "{c:?}"),
            Expr::Var(Var::R) => write!(f, "r"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::Y) => write!(f, "y"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Call(g, a) => write!(f, "{}({a})", g.name()),
            Expr::Bin(op, l, r) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l}{s}{r})")
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> GeoError {
        GeoError::Parse { col: self.i + 1, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'+' => BinOp::Add,
                b'-' => BinOp::Sub,
                _ => break,
            };
            self.i += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'*' => BinOp::Mul,
                b'/' => BinOp::Div,
                _ => break,
            };
            self.i += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
                let func = match name {
                    "sqrt" => Some(Func::Sqrt),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "ln" | "log" => Some(Func::Ln),
                    "exp" => Some(Func::Exp),
                    _ => None,
                };
                if let Some(func) = func {
                    if self.peek() != Some(b'(') {
                        return Err(self.err("expected `(` after function name"));
                    }
                    self.i += 1;
                    let arg = self.expr()?;
                    if self.peek() != Some(b')') {
                        return Err(self.err("expected `)`"));
                    }
                    self.i += 1;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match name {
                    "r" => Ok(Expr::Var(Var::R)),
                    "x" => Ok(Expr::Var(Var::X)),
                    "y" => Ok(Expr::Var(Var::Y)),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => Ok(Expr::Num(std::f64::consts::E)),
                    _ => Err(GeoError::Parse { col: start + 1, msg: format!("unknown identifier `{name}`") }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
            self.i += 1;
        }
        if self.i < self.s.len() && (self.s[self.i] == b'e' || self.s[self.i] == b'E') {
            let save = self.i;
            self.i += 1;
            if self.i < self.s.len() && (self.s[self.i] == b'+' || self.s[self.i] == b'-') {
                self.i += 1;
            }
            if self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
            } else {
                self.i = save;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| GeoError::Parse { col: start + 1, msg: format!("malformed number `{text}`") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Jet2;

    #[test]
    fn clifford_profile_derivatives() {
        let e = Expr::parse("r*sqrt(1-r^2)").unwrap();
        let r0 = 0.5f64.sqrt();
        let j = e.eval(&Bindings::r(Jet2::var_u(r0))).unwrap();
        assert!((j.v - 0.5).abs() < 1e-15);
        assert!(j.du.abs() < 1e-14);
        assert!((j.duu + 4.0).abs() < 1e-12);
    }

    #[test]
    fn sine_slope_at_zero() {
        let e = Expr::parse("sin(r)").unwrap();
        let j = e.eval(&Bindings::r(Jet2::var_u(0.0))).unwrap();
        assert_eq!(j.du, 1.0);
    }

    #[test]
    fn syntax_error_column() {
        match Expr::parse("r*") {
            Err(GeoError::Parse { col, .. }) => assert_eq!(col, 3),
            other => panic!("{other:?}"),
        }
        match Expr::parse("r + q") {
            Err(GeoError::Parse { col, .. }) => assert_eq!(col, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn printer_round_trips() {
        for s in ["r*sqrt(1-r^2)", "-x^2/(1+y) - ln(2.5e-3*x)", "exp(-r)*cos(3*r)+1e-7", "x^y"] {
            let e = Expr::parse(s).unwrap();
            let again = Expr::parse(&e.to_string()).unwrap();
            assert_eq!(e, again, "{s}");
        }
    }

    #[test]
    fn symbolic_derivative_matches_jet() {
        let e = Expr::parse("x^3*y - sin(x*y) + sqrt(x+y^2) + x^y").unwrap();
        let dx = e.derivative(Var::X);
        let dxy = dx.derivative(Var::Y);
        let (x, y) = (0.8, 1.3);
        let j = e.eval(&Bindings::xy(Jet2::var_u(x), Jet2::var_v(y))).unwrap();
        let a = dx.eval_f64(&Bindings::xy(x, y)).unwrap();
        let b = dxy.eval_f64(&Bindings::xy(x, y)).unwrap();
        assert!((a - j.du).abs() < 1e-12);
        assert!((b - j.duv).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let e = Expr::parse("sqrt(r-1)").unwrap();
        assert!(matches!(e.eval_f64(&Bindings::r(0.5)), Err(GeoError::Domain(_))));
        let e = Expr::parse("x").unwrap();
        assert!(e.eval_f64(&Bindings::r(0.5)).is_err());
    }
}
