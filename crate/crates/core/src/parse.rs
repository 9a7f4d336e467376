//! Text syntax for polynomials, vector fields and automorphism words.
//!
//! The grammar is documented in `docs/grammar.md`. Positions in errors are
//! 0-based byte offsets into the source string.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::automorphism::AutoGenerator;
use crate::error::{Error, Result};
use crate::fields::AlgebraicVectorField;
use crate::rational::Rational;
use crate::surface::{FormalPoly, Surface, SurfacePolynomial};
use crate::unipoly::UniPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    End,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(src[start..i].parse().expect("digits")), start));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b';' => Tok::Semi,
            b',' => Tok::Comma,
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character {ch:?}")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

/// Expression tree over rational literals and named variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    Var(String, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    at: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let e = self.exponent(pos)?;
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn exponent(&mut self, pos: usize) -> Result<u32> {
        match self.bump() {
            Tok::Int(n) => n
                .try_into()
                .map_err(|_| syntax(pos, "exponent too large")),
            Tok::Minus => Err(Error::NegativeExponent { position: pos }),
            Tok::LParen => {
                let neg = match self.peek() {
                    Tok::Minus => {
                        self.bump();
                        true
                    }
                    Tok::Plus => {
                        self.bump();
                        false
                    }
                    _ => false,
                };
                let inner = self.pos();
                let e = self.exponent(inner)?;
                self.expect(Tok::RParen, "')'")?;
                if neg && e != 0 {
                    return Err(Error::NegativeExponent { position: pos });
                }
                Ok(e)
            }
            _ => Err(syntax(pos, "expected a non-negative integer exponent")),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Const(Rational::from_integer(n))),
            Tok::Ident(name) => Ok(Expr::Var(name, pos)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            t => Err(syntax(pos, format!("unexpected token {t:?}"))),
        }
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(syntax(self.pos(), "unexpected trailing input"))
        }
    }
}

/// Generic evaluation over any ring with the operations the grammar needs.
trait Ring: Clone {
    fn constant(c: Rational) -> Self;
    fn var(name: &str, pos: usize) -> Result<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn as_constant(&self) -> Option<Rational>;
    fn scale(&self, c: &Rational) -> Self;
}

fn eval<R: Ring>(e: &Expr) -> Result<R> {
    Ok(match e {
        Expr::Const(c) => R::constant(c.clone()),
        Expr::Var(n, pos) => R::var(n, *pos)?,
        Expr::Add(a, b) => eval::<R>(a)?.add(&eval::<R>(b)?),
        Expr::Sub(a, b) => eval::<R>(a)?.sub(&eval::<R>(b)?),
        Expr::Mul(a, b) => eval::<R>(a)?.mul(&eval::<R>(b)?),
        Expr::Neg(a) => eval::<R>(a)?.scale(&-Rational::one()),
        Expr::Div(a, b, pos) => {
            let d = eval::<R>(b)?
                .as_constant()
                .ok_or_else(|| syntax(*pos, "division is only allowed by a constant"))?;
            if d.is_zero() {
                return Err(syntax(*pos, "division by zero"));
            }
            eval::<R>(a)?.scale(&(Rational::one() / d))
        }
        Expr::Pow(a, k) => {
            let base = eval::<R>(a)?;
            let mut acc = R::constant(Rational::one());
            for _ in 0..*k {
                acc = acc.mul(&base);
            }
            acc
        }
    })
}

impl Ring for FormalPoly {
    fn constant(c: Rational) -> Self {
        FormalPoly::constant(c)
    }
    fn var(name: &str, pos: usize) -> Result<Self> {
        match name {
            "x" => Ok(FormalPoly::var(0)),
            "y" => Ok(FormalPoly::var(1)),
            "z" => Ok(FormalPoly::var(2)),
            _ => Err(syntax(pos, format!("unknown variable {name:?}"))),
        }
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn as_constant(&self) -> Option<Rational> {
        FormalPoly::as_constant(self)
    }
    fn scale(&self, c: &Rational) -> Self {
        FormalPoly::scale(self, c)
    }
}

/// A univariate polynomial that remembers which variable name it uses.
#[derive(Clone)]
struct Named {
    var: Option<(String, usize)>,
    poly: UniPoly,
}

impl Named {
    fn merge(&self, o: &Self) -> Result<Option<(String, usize)>> {
        match (&self.var, &o.var) {
            (Some(a), Some(b)) if a.0 != b.0 => Err(syntax(
                b.1,
                format!("expected a polynomial in one variable, found {} and {}", a.0, b.0),
            )),
            (Some(a), _) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }
}

// The Ring impl for `Named` needs fallible combination, so it is evaluated
// by a dedicated walker instead.
fn eval_named(e: &Expr, allowed: &[&str]) -> Result<Named> {
    let lift = |poly| Named { var: None, poly };
    Ok(match e {
        Expr::Const(c) => lift(UniPoly::constant(c.clone())),
        Expr::Var(n, pos) => {
            if !allowed.contains(&n.as_str()) {
                return Err(syntax(*pos, format!("unknown variable {n:?}")));
            }
            Named {
                var: Some((n.clone(), *pos)),
                poly: UniPoly::z(),
            }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            let (l, r) = (eval_named(a, allowed)?, eval_named(b, allowed)?);
            let var = l.merge(&r)?;
            let poly = match e {
                Expr::Add(..) => &l.poly + &r.poly,
                Expr::Sub(..) => &l.poly - &r.poly,
                _ => &l.poly * &r.poly,
            };
            Named { var, poly }
        }
        Expr::Neg(a) => {
            let n = eval_named(a, allowed)?;
            Named {
                var: n.var,
                poly: -&n.poly,
            }
        }
        Expr::Div(a, b, pos) => {
            let d = eval_named(b, allowed)?;
            if !d.poly.is_constant() {
                return Err(syntax(*pos, "division is only allowed by a constant"));
            }
            let d = d.poly.coeff(0);
            if d.is_zero() {
                return Err(syntax(*pos, "division by zero"));
            }
            let n = eval_named(a, allowed)?;
            Named {
                var: n.var,
                poly: n.poly.scale(&(Rational::one() / d)),
            }
        }
        Expr::Pow(a, k) => {
            let n = eval_named(a, allowed)?;
            Named {
                var: n.var,
                poly: n.poly.pow(*k),
            }
        }
    })
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks: &toks, at: 0 };
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a polynomial in `x, y, z` without reducing it.
pub fn parse_formal(src: &str) -> Result<FormalPoly> {
    eval::<FormalPoly>(&parse_expr(src)?)
}

/// Parses a polynomial in `x, y, z` and reduces it on the surface.
pub fn parse_polynomial(s: &Surface, src: &str) -> Result<SurfacePolynomial> {
    Ok(s.reduce(&parse_formal(src)?))
}

/// Parses a polynomial in a single variable drawn from `allowed`.
pub fn parse_univariate(src: &str, allowed: &[&str]) -> Result<UniPoly> {
    Ok(eval_named(&parse_expr(src)?, allowed)?.poly)
}

/// Parses the defining polynomial `p(z)` and builds the surface.
pub fn parse_surface(src: &str) -> Result<Surface> {
    Surface::new(parse_univariate(src, &["z"])?)
}

/// Parses a rational constant expression such as `-3/2`.
pub fn parse_constant(src: &str) -> Result<Rational> {
    let u = parse_univariate(src, &[])?;
    Ok(u.coeff(0))
}

/// A named generator field or an explicit triple of images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldLiteral {
    ShearX(u32),
    ShearY(u32),
    Hyperbolic(UniPoly),
    Explicit([FormalPoly; 3]),
}

impl FieldLiteral {
    pub fn resolve(&self, s: &Surface) -> Result<AlgebraicVectorField> {
        Ok(match self {
            FieldLiteral::ShearX(i) => s.shear_x(*i),
            FieldLiteral::ShearY(i) => s.shear_y(*i),
            FieldLiteral::Hyperbolic(f) => s.hyperbolic(f),
            FieldLiteral::Explicit([a, b, c]) => s.field(s.reduce(a), s.reduce(b), s.reduce(c))?,
        })
    }
}

/// For `name(arg)` returns `arg` and its offset within `src`.
fn call_argument<'a>(src: &'a str, name: &str) -> Option<(&'a str, usize)> {
    let rest = src.trim_start().strip_prefix(name)?.trim_start();
    let open = src.len() - rest.len();
    let inner = rest.strip_prefix('(')?.trim_end().strip_suffix(')')?;
    Some((inner, open + 1))
}

fn shift_error(e: Error, offset: usize) -> Error {
    match e {
        Error::Syntax { position, message } => Error::Syntax {
            position: position + offset,
            message,
        },
        Error::NegativeExponent { position } => Error::NegativeExponent {
            position: position + offset,
        },
        other => other,
    }
}

fn parse_index(src: &str, offset: usize) -> Result<u32> {
    src.trim()
        .parse::<u32>()
        .map_err(|_| syntax(offset, format!("expected a non-negative integer index, got {:?}", src.trim())))
}

pub fn parse_field(src: &str) -> Result<FieldLiteral> {
    if let Some((arg, off)) = call_argument(src, "SFx") {
        return Ok(FieldLiteral::ShearX(parse_index(arg, off)?));
    }
    if let Some((arg, off)) = call_argument(src, "SFy") {
        return Ok(FieldLiteral::ShearY(parse_index(arg, off)?));
    }
    if let Some((arg, off)) = call_argument(src, "HF") {
        let f = parse_univariate(arg, &["z"]).map_err(|e| shift_error(e, off))?;
        return Ok(FieldLiteral::Hyperbolic(f));
    }
    let t = src.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let base = src.find('[').unwrap_or(0) + 1;
        let parts: Vec<&str> = inner.split(';').collect();
        if parts.len() != 3 {
            return Err(syntax(base, "a field triple needs exactly three components"));
        }
        let mut out = Vec::with_capacity(3);
        let mut off = base;
        for part in parts {
            out.push(parse_formal(part).map_err(|e| shift_error(e, off))?);
            off += part.len() + 1;
        }
        let [a, b, c]: [FormalPoly; 3] = out.try_into().expect("three parts");
        return Ok(FieldLiteral::Explicit([a, b, c]));
    }
    Err(syntax(0, "expected SFx(i), SFy(i), HF(poly) or [ex; ey; ez]"))
}

const SHEAR_VARS: [&str; 4] = ["x", "y", "z", "t"];

/// Parses `;`-separated generators in application order (the first one acts
/// first) and returns them in map-composition order (the last one acts first).
pub fn parse_automorphism(src: &str) -> Result<Vec<AutoGenerator>> {
    let mut applied = Vec::new();
    let mut start = 0;
    for part in src.split(';') {
        let here = start;
        start += part.len() + 1;
        let t = part.trim();
        let lead = part.len() - part.trim_start().len();
        if t.is_empty() {
            return Err(syntax(here + lead, "empty generator"));
        }
        let shear = |name: &str| -> Option<Result<UniPoly>> {
            call_argument(part, name).map(|(arg, o)| {
                parse_univariate(arg, &SHEAR_VARS).map_err(|e| shift_error(e, here + o))
            })
        };
        let g = if let Some(f) = shear("Dx") {
            AutoGenerator::XShear(f?)
        } else if let Some(f) = shear("Dy") {
            AutoGenerator::YShear(f?)
        } else if let Some((arg, o)) = call_argument(part, "H") {
            let l = parse_constant(arg).map_err(|e| shift_error(e, here + o))?;
            if l.is_zero() {
                return Err(Error::InvalidGenerator("H needs a nonzero parameter".into()));
            }
            AutoGenerator::Hyperbolic(l)
        } else if let Some((arg, o)) = call_argument(part, "Sym") {
            let (a, b) = arg
                .split_once(',')
                .ok_or_else(|| syntax(here + o, "Sym takes two arguments"))?;
            let a_val = parse_constant(a).map_err(|e| shift_error(e, here + o))?;
            let b_val = parse_constant(b).map_err(|e| shift_error(e, here + o + a.len() + 1))?;
            AutoGenerator::Symmetry { a: a_val, b: b_val }
        } else if t == "I" {
            AutoGenerator::Involution
        } else {
            return Err(syntax(here + lead, format!("unknown generator {t:?}")));
        };
        applied.push(g);
    }
    applied.reverse();
    Ok(applied)
}
