//! The two small expression languages of the command line.
//!
//! Reals:
//! ```text
//! real  := term (('+' | '-') term)*
//! term  := unary (('*' unary) | ('/' INT))*
//! unary := '-' unary | atom
//! atom  := NUMBER | '(' real ')' | 'sqrt3' | 'sqrt' '(' real ')'
//!        | ('abs') '(' real ')' | ('max' | 'min') '(' real ',' real ')'
//!        | ('limit' | 'extlimit') SEQ
//! SEQ   := 'geom' | 'geomsum' | 'alt'
//! ```
//! Sets:
//! ```text
//! set := 'triangle' | 'sierpinski' | 'empty' ['(' INT ')']
//!      | 'singleton' '(' real (',' real)* ')' | 'ifs' '(' PATH ')'
//!      | 'union' '(' set (',' set)* ')'
//!      | 'translate' '(' set (',' real)+ ')' | 'scale' '(' set ',' DYADIC ')'
//! ```

use std::fmt;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{parse_decimal_parts, Dyadic};
use crate::error::ParseError;
use crate::real::CReal;

/// Fast Cauchy sequences available to `limit` and `extlimit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seq {
    /// `1 - 2^-n`, converging to 1.
    Geom,
    /// `sum_{k<=n} (-1/2)^k`, converging to 2/3.
    GeomSum,
    /// `1 + (-1)^n 2^-(n+1)`, converging to 1.
    Alt,
}

impl Seq {
    pub fn term(self, n: u32) -> Dyadic {
        let n64 = i64::from(n);
        match self {
            Seq::Geom => &Dyadic::one() - &Dyadic::pow2(-n64),
            Seq::GeomSum => {
                // (2^(n+1) + (-1)^n) / (3 * 2^n), and 3 divides the numerator
                let num = (BigInt::one() << (n + 1)) + if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                Dyadic::new(num / 3, -n64)
            }
            Seq::Alt => {
                let t = Dyadic::pow2(-n64 - 1);
                if n % 2 == 0 {
                    &Dyadic::one() + &t
                } else {
                    &Dyadic::one() - &t
                }
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            Seq::Geom => "geom",
            Seq::GeomSum => "geomsum",
            Seq::Alt => "alt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RealExpr {
    Num(String),
    Neg(Box<RealExpr>),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Div(Box<RealExpr>, BigInt),
    Sqrt3,
    Sqrt(Box<RealExpr>),
    Abs(Box<RealExpr>),
    Max(Box<RealExpr>, Box<RealExpr>),
    Min(Box<RealExpr>, Box<RealExpr>),
    Limit { seq: Seq, extended: bool },
}

impl RealExpr {
    pub fn parse(src: &str) -> Result<RealExpr, ParseError> {
        let mut p = Parser::new(src);
        let e = p.real()?;
        p.end()?;
        Ok(e)
    }

    pub fn eval(&self) -> Result<CReal, ParseError> {
        Ok(match self {
            RealExpr::Num(s) => number(s)?,
            RealExpr::Neg(a) => a.eval()?.neg(),
            RealExpr::Add(a, b) => a.eval()?.add(&b.eval()?),
            RealExpr::Sub(a, b) => a.eval()?.sub(&b.eval()?),
            RealExpr::Mul(a, b) => a.eval()?.mul(&b.eval()?),
            RealExpr::Div(a, q) => {
                let a = a.eval()?;
                if q.magnitude().count_ones() == 1 {
                    let k = q.trailing_zeros().expect("nonzero") as i64;
                    let r = a.scale_pow2(-k);
                    if q.is_negative() {
                        r.neg()
                    } else {
                        r
                    }
                } else {
                    let (num, den) = if q.is_negative() { (-BigInt::one(), -q) } else { (BigInt::one(), q.clone()) };
                    a.mul(&CReal::from_ratio(num, den))
                }
            }
            RealExpr::Sqrt3 => CReal::sqrt3(),
            RealExpr::Sqrt(a) => {
                let v = a.eval()?;
                let d = v.exact().ok_or_else(|| ParseError::Number(format!("sqrt({a}) needs an exact dyadic argument")))?;
                CReal::sqrt_dyadic(d).ok_or_else(|| ParseError::Number(format!("sqrt of negative {a}")))?
            }
            RealExpr::Abs(a) => a.eval()?.abs(),
            RealExpr::Max(a, b) => a.eval()?.max(&b.eval()?),
            RealExpr::Min(a, b) => a.eval()?.min(&b.eval()?),
            RealExpr::Limit { seq, extended } => {
                let seq = *seq;
                let f = move |n| CReal::from_dyadic(seq.term(n));
                if *extended {
                    CReal::extended_limit(f)
                } else {
                    CReal::limit(f)
                }
            }
        })
    }
}

/// Exact value of a numeric literal; non-dyadic decimals become rationals.
fn number(s: &str) -> Result<CReal, ParseError> {
    match s.parse::<Dyadic>() {
        Ok(d) => Ok(CReal::from_dyadic(d)),
        Err(ParseError::NotDyadic(_)) => {
            let (num, k) = parse_decimal_parts(s)?;
            Ok(CReal::from_ratio(num, num_traits::pow(BigInt::from(10), k)))
        }
        Err(e) => Err(e),
    }
}

impl fmt::Display for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealExpr::Num(s) => write!(f, "{s}"),
            RealExpr::Neg(a) => write!(f, "(-{a})"),
            RealExpr::Add(a, b) => write!(f, "({a}+{b})"),
            RealExpr::Sub(a, b) => write!(f, "({a}-{b})"),
            RealExpr::Mul(a, b) => write!(f, "({a}*{b})"),
            RealExpr::Div(a, q) => write!(f, "({a}/{q})"),
            RealExpr::Sqrt3 => write!(f, "sqrt3"),
            RealExpr::Sqrt(a) => write!(f, "sqrt({a})"),
            RealExpr::Abs(a) => write!(f, "abs({a})"),
            RealExpr::Max(a, b) => write!(f, "max({a},{b})"),
            RealExpr::Min(a, b) => write!(f, "min({a},{b})"),
            RealExpr::Limit { seq, extended } => {
                write!(f, "{} {}", if *extended { "extlimit" } else { "limit" }, seq.name())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    Triangle,
    Sierpinski,
    Empty(usize),
    Singleton(Vec<RealExpr>),
    Ifs(PathBuf),
    Union(Vec<SetExpr>),
    Translate(Box<SetExpr>, Vec<RealExpr>),
    Scale(Box<SetExpr>, Dyadic),
}

impl SetExpr {
    pub fn parse(src: &str) -> Result<SetExpr, ParseError> {
        let mut p = Parser::new(src);
        let e = p.set()?;
        p.end()?;
        Ok(e)
    }
}

/// Normalized text; equal strings denote the same set.
impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, xs: &[T]) -> fmt::Result {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            SetExpr::Triangle => f.write_str("triangle"),
            SetExpr::Sierpinski => f.write_str("sierpinski"),
            SetExpr::Empty(m) => write!(f, "empty({m})"),
            SetExpr::Singleton(xs) => {
                f.write_str("singleton(")?;
                list(f, xs)?;
                f.write_str(")")
            }
            SetExpr::Ifs(p) => write!(f, "ifs({})", p.display()),
            SetExpr::Union(xs) => {
                f.write_str("union(")?;
                list(f, xs)?;
                f.write_str(")")
            }
            SetExpr::Translate(s, t) => {
                write!(f, "translate({s},")?;
                list(f, t)?;
                f.write_str(")")
            }
            SetExpr::Scale(s, c) => write!(f, "scale({s},{c})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected `{c}`")),
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find(|c| !f(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn ident(&mut self) -> &'a str {
        self.take_while(|c| c.is_ascii_alphanumeric() || c == '_')
    }

    /// Unsigned decimal literal with optional fraction and exponent.
    fn number(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        self.take_while(|c| c.is_ascii_digit());
        if self.rest().starts_with('.') {
            self.pos += 1;
            self.take_while(|c| c.is_ascii_digit());
        }
        if self.rest().starts_with(['e', 'E']) {
            let save = self.pos;
            self.pos += 1;
            if self.rest().starts_with(['+', '-']) {
                self.pos += 1;
            }
            if self.take_while(|c| c.is_ascii_digit()).is_empty() {
                self.pos = save;
            }
        }
        let s = &self.src[start..self.pos];
        if s.is_empty() || s == "." {
            self.pos = start;
            return self.err("expected a number");
        }
        Ok(s.to_string())
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let neg = self.eat('-');
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return self.err("expected an integer");
        }
        let v: BigInt = digits.parse().expect("digits");
        Ok(if neg { -v } else { v })
    }

    fn real(&mut self) -> Result<RealExpr, ParseError> {
        let mut e = self.term()?;
        loop {
            if self.eat('+') {
                e = RealExpr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = RealExpr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<RealExpr, ParseError> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') {
                e = RealExpr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat('/') {
                let q = self.integer()?;
                if q.is_zero() {
                    return self.err("division by zero");
                }
                e = RealExpr::Div(Box::new(e), q);
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<RealExpr, ParseError> {
        if self.eat('-') {
            return Ok(RealExpr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<RealExpr, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.real()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(RealExpr::Num(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                match name {
                    "sqrt3" => Ok(RealExpr::Sqrt3),
                    "sqrt" | "abs" => {
                        self.expect('(')?;
                        let a = Box::new(self.real()?);
                        self.expect(')')?;
                        Ok(if name == "sqrt" { RealExpr::Sqrt(a) } else { RealExpr::Abs(a) })
                    }
                    "max" | "min" => {
                        self.expect('(')?;
                        let a = Box::new(self.real()?);
                        self.expect(',')?;
                        let b = Box::new(self.real()?);
                        self.expect(')')?;
                        Ok(if name == "max" { RealExpr::Max(a, b) } else { RealExpr::Min(a, b) })
                    }
                    "limit" | "extlimit" => {
                        let paren = self.eat('(');
                        let seq = match self.ident() {
                            "geom" => Seq::Geom,
                            "geomsum" => Seq::GeomSum,
                            "alt" => Seq::Alt,
                            "" => return self.err("expected a sequence name"),
                            other => return Err(ParseError::UnknownName(other.to_string())),
                        };
                        if paren {
                            self.expect(')')?;
                        }
                        Ok(RealExpr::Limit {
                            seq,
                            extended: name == "extlimit",
                        })
                    }
                    other => {
                        self.pos = start;
                        Err(ParseError::UnknownName(other.to_string()))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }

    fn set(&mut self) -> Result<SetExpr, ParseError> {
        let name = self.ident();
        match name {
            "triangle" => Ok(SetExpr::Triangle),
            "sierpinski" => Ok(SetExpr::Sierpinski),
            "empty" => {
                if self.eat('(') {
                    let m = self.integer()?;
                    self.expect(')')?;
                    match usize::try_from(m) {
                        Ok(m) if m >= 1 => Ok(SetExpr::Empty(m)),
                        _ => self.err("dimension must be at least 1"),
                    }
                } else {
                    Ok(SetExpr::Empty(2))
                }
            }
            "singleton" => {
                self.expect('(')?;
                let xs = self.real_list()?;
                self.expect(')')?;
                Ok(SetExpr::Singleton(xs))
            }
            "ifs" => {
                self.expect('(')?;
                self.skip_ws();
                let path = if self.eat('"') {
                    let raw = self.take_while(|c| c != '"');
                    self.expect('"')?;
                    raw.to_string()
                } else {
                    self.take_while(|c| c != ')').trim_end().to_string()
                };
                if path.is_empty() {
                    return self.err("expected a file path");
                }
                self.expect(')')?;
                Ok(SetExpr::Ifs(PathBuf::from(path)))
            }
            "union" => {
                self.expect('(')?;
                let mut parts = vec![self.set()?];
                while self.eat(',') {
                    parts.push(self.set()?);
                }
                self.expect(')')?;
                Ok(SetExpr::Union(parts))
            }
            "translate" => {
                self.expect('(')?;
                let s = self.set()?;
                self.expect(',')?;
                let t = self.real_list()?;
                self.expect(')')?;
                Ok(SetExpr::Translate(Box::new(s), t))
            }
            "scale" => {
                self.expect('(')?;
                let s = self.set()?;
                self.expect(',')?;
                self.skip_ws();
                let raw = self.take_while(|c| c != ')');
                let c: Dyadic = raw.trim().parse()?;
                self.expect(')')?;
                Ok(SetExpr::Scale(Box::new(s), c))
            }
            "" => self.err("expected a set expression"),
            other => Err(ParseError::UnknownName(other.to_string())),
        }
    }

    fn real_list(&mut self) -> Result<Vec<RealExpr>, ParseError> {
        let mut xs = vec![self.real()?];
        while self.eat(',') {
            xs.push(self.real()?);
        }
        Ok(xs)
    }
}
