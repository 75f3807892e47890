//! Scalar field expressions: parsing, printing, and jet evaluation.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' ['-'] atom)*
//! atom    := number | number 'i' | ident | ident '(' sum ')' | '(' sum ')'
//! ```
//!
//! Identifiers: `x1..xd` (real chart coordinates), `z1..zn` with
//! `z_k = x_k + i x_{k+n}` on an even chart of dimension `2n`, `q1..qn` /
//! `p1..pn` as aliases for `x1..xn` / `x{n+1}..x{2n}`, and the imaginary
//! unit `i`. Functions: `exp ln sin cos sqrt conj`.

use std::fmt;

use num_complex::Complex;

use crate::jet::{Jet, Univariate};
use crate::scalar::{cst, Real};
use crate::Error;

const MAX_DEPTH: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Conj,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Conj => "conj",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "conj" => Func::Conj,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Literal `re + i·im`; the parser only produces purely real or purely
    /// imaginary literals.
    Lit { re: f64, im: f64 },
    /// Real coordinate `x^{k+1}`.
    Coord(usize),
    /// Complex coordinate `z^{k+1}`.
    Z(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A parsed expression bound to a chart dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldExpr {
    dim: usize,
    root: Expr,
}

impl FieldExpr {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn eval_jet<T: Real>(&self, point: &[T]) -> Result<Jet<T>, Error> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let coords = Jet::coordinates(point);
        eval_node(&self.root, &coords, self.dim)
    }

    /// Plain complex value, no derivatives.
    pub fn eval<T: Real>(&self, point: &[T]) -> Result<Complex<T>, Error> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        eval_value(&self.root, point, self.dim)
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit { re, im } => {
                if *im == 0.0 {
                    write!(f, "{re:?}")
                } else if *re == 0.0 {
                    write!(f, "{im:?}i")
                } else {
                    write!(f, "({re:?}+{im:?}i)")
                }
            }
            Expr::Coord(k) => write!(f, "x{}", k + 1),
            Expr::Z(k) => write!(f, "z{}", k + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

pub fn parse(text: &str, dim: usize) -> Result<FieldExpr, Error> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim,
        depth: 0,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(Error::Syntax {
            offset: p.pos,
            message: "empty expression".into(),
        });
    }
    let root = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(FieldExpr { dim, root })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
    depth: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
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

    fn enter(&mut self) -> Result<(), Error> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(self.err("expression nested too deeply"))
        } else {
            Ok(())
        }
    }

    fn sum(&mut self) -> Result<Expr, Error> {
        self.enter()?;
        let mut lhs = self.product()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
                }
                b'-' => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                b'/' => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, Error> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = if self.peek() == Some(b'-') {
                self.pos += 1;
                Expr::Neg(Box::new(self.atom()?))
            } else {
                self.atom()?
            };
            base = Expr::Pow(Box::new(base), Box::new(exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, Error> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).expect("ascii slice");
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        if !value.is_finite() {
            return Err(Error::Syntax {
                offset: start,
                message: "number out of range".into(),
            });
        }
        self.pos = i;
        // `2i`, but not `2in...`
        if self.pos < s.len()
            && s[self.pos] == b'i'
            && !s
                .get(self.pos + 1)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
            return Ok(Expr::Lit { re: 0.0, im: value });
        }
        Ok(Expr::Lit { re: value, im: 0.0 })
    }

    fn ident(&mut self) -> Result<Expr, Error> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_alphanumeric() || s[i] == b'_') {
            i += 1;
        }
        let name = std::str::from_utf8(&s[start..i]).expect("ascii slice");
        self.pos = i;
        if let Some(func) = Func::from_name(name) {
            if self.peek() != Some(b'(') {
                return Err(self.err(&format!("expected `(` after `{name}`")));
            }
            self.pos += 1;
            let arg = self.sum()?;
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
                Some(b',') => {
                    let mut got = 1;
                    while self.peek() == Some(b',') {
                        self.pos += 1;
                        self.sum()?;
                        got += 1;
                    }
                    Err(Error::Arity {
                        name: name.to_string(),
                        expected: 1,
                        got,
                    })
                }
                _ => Err(self.err("expected `)`")),
            }
        } else {
            self.symbol(name, start)
        }
    }

    fn symbol(&self, name: &str, offset: usize) -> Result<Expr, Error> {
        let unknown = || Error::UnknownSymbol {
            name: name.to_string(),
            offset,
        };
        if name == "i" {
            return Ok(Expr::Lit { re: 0.0, im: 1.0 });
        }
        let (head, tail) = name.split_at(1);
        let k: usize = match tail.parse() {
            Ok(k) if k >= 1 && !tail.starts_with('0') => k,
            _ => return Err(unknown()),
        };
        let half = if self.dim % 2 == 0 { self.dim / 2 } else { 0 };
        match head {
            "x" if k <= self.dim => Ok(Expr::Coord(k - 1)),
            "z" if k <= half => Ok(Expr::Z(k - 1)),
            "q" if k <= half => Ok(Expr::Coord(k - 1)),
            "p" if k <= half => Ok(Expr::Coord(half + k - 1)),
            _ => Err(unknown()),
        }
    }
}

fn constant_value(e: &Expr) -> Option<Complex<f64>> {
    Some(match e {
        Expr::Lit { re, im } => Complex::new(*re, *im),
        Expr::Coord(_) | Expr::Z(_) => return None,
        Expr::Neg(a) => -constant_value(a)?,
        Expr::Add(a, b) => constant_value(a)? + constant_value(b)?,
        Expr::Sub(a, b) => constant_value(a)? - constant_value(b)?,
        Expr::Mul(a, b) => constant_value(a)? * constant_value(b)?,
        Expr::Div(a, b) => constant_value(a)? / constant_value(b)?,
        Expr::Pow(a, b) => constant_value(a)?.powc(constant_value(b)?),
        Expr::Call(Func::Conj, a) => constant_value(a)?.conj(),
        Expr::Call(Func::Exp, a) => constant_value(a)?.exp(),
        Expr::Call(Func::Ln, a) => constant_value(a)?.ln(),
        Expr::Call(Func::Sin, a) => constant_value(a)?.sin(),
        Expr::Call(Func::Cos, a) => constant_value(a)?.cos(),
        Expr::Call(Func::Sqrt, a) => constant_value(a)?.sqrt(),
    })
}

fn to_t<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(cst(z.re), cst(z.im))
}

fn eval_node<T: Real>(e: &Expr, x: &[Jet<T>], dim: usize) -> Result<Jet<T>, Error> {
    Ok(match e {
        Expr::Lit { re, im } => Jet::constant(dim, to_t(Complex::new(*re, *im))),
        Expr::Coord(k) => x[*k].clone(),
        Expr::Z(k) => {
            let n = dim / 2;
            &x[*k] + &x[k + n].scale(Complex::new(T::zero(), T::one()))
        }
        Expr::Neg(a) => -eval_node(a, x, dim)?,
        Expr::Add(a, b) => &eval_node(a, x, dim)? + &eval_node(b, x, dim)?,
        Expr::Sub(a, b) => &eval_node(a, x, dim)? - &eval_node(b, x, dim)?,
        Expr::Mul(a, b) => eval_node(a, x, dim)?.mul_jet(&eval_node(b, x, dim)?),
        Expr::Div(a, b) => eval_node(a, x, dim)?.checked_div(&eval_node(b, x, dim)?)?,
        Expr::Pow(a, b) => {
            let base = eval_node(a, x, dim)?;
            match constant_value(b) {
                Some(p) if p.im == 0.0 => {
                    if p.re.fract() == 0.0 && p.re.abs() <= 64.0 {
                        if p.re < 0.0 && base.value().norm() == T::zero() {
                            return Err(Error::SingularScalar);
                        }
                        base.powi(p.re as i32)
                    } else {
                        base.compose(Univariate::Powf(cst(p.re)))?
                    }
                }
                _ => {
                    // General exponent: exp(b ln a).
                    let ex = eval_node(b, x, dim)?;
                    ex.mul_jet(&base.compose(Univariate::Ln)?)
                        .compose(Univariate::Exp)?
                }
            }
        }
        Expr::Call(func, a) => {
            let arg = eval_node(a, x, dim)?;
            match func {
                Func::Conj => arg.conj(),
                Func::Exp => arg.compose(Univariate::Exp)?,
                Func::Ln => arg.compose(Univariate::Ln)?,
                Func::Sin => arg.compose(Univariate::Sin)?,
                Func::Cos => arg.compose(Univariate::Cos)?,
                Func::Sqrt => arg.compose(Univariate::Sqrt)?,
            }
        }
    })
}

fn eval_value<T: Real>(e: &Expr, x: &[T], dim: usize) -> Result<Complex<T>, Error> {
    let nonpos = |v: Complex<T>| v.im == T::zero() && v.re <= T::zero();
    Ok(match e {
        Expr::Lit { re, im } => to_t(Complex::new(*re, *im)),
        Expr::Coord(k) => Complex::new(x[*k], T::zero()),
        Expr::Z(k) => Complex::new(x[*k], x[k + dim / 2]),
        Expr::Neg(a) => -eval_value(a, x, dim)?,
        Expr::Add(a, b) => eval_value(a, x, dim)? + eval_value(b, x, dim)?,
        Expr::Sub(a, b) => eval_value(a, x, dim)? - eval_value(b, x, dim)?,
        Expr::Mul(a, b) => eval_value(a, x, dim)? * eval_value(b, x, dim)?,
        Expr::Div(a, b) => {
            let d = eval_value(b, x, dim)?;
            if d.norm() == T::zero() {
                return Err(Error::SingularScalar);
            }
            eval_value(a, x, dim)? / d
        }
        Expr::Pow(a, b) => {
            let base = eval_value(a, x, dim)?;
            match constant_value(b) {
                Some(p) if p.im == 0.0 && p.re.fract() == 0.0 && p.re.abs() <= 64.0 => {
                    if p.re < 0.0 && base.norm() == T::zero() {
                        return Err(Error::SingularScalar);
                    }
                    base.powi(p.re as i32)
                }
                Some(p) if p.im == 0.0 => {
                    if nonpos(base) {
                        return Err(Error::Domain("real power of non-positive value".into()));
                    }
                    base.powf(cst(p.re))
                }
                _ => {
                    if nonpos(base) {
                        return Err(Error::Domain("ln of non-positive value".into()));
                    }
                    (eval_value(b, x, dim)? * base.ln()).exp()
                }
            }
        }
        Expr::Call(func, a) => {
            let v = eval_value(a, x, dim)?;
            match func {
                Func::Conj => v.conj(),
                Func::Exp => v.exp(),
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Ln | Func::Sqrt if nonpos(v) => {
                    return Err(Error::Domain(format!("{} of non-positive value", func.name())))
                }
                Func::Ln => v.ln(),
                Func::Sqrt => v.sqrt(),
            }
        }
    })
}
