use num_bigint::BigInt;

use crate::algebra::{q, sign_of, GradedPoly, Generator, Parity, Q};
use crate::bicomplex::IntegralForm;
use crate::error::{Error, Result};
use crate::jet::{FiberCoord, JetCoord, Signature};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Rational(Q),
    /// A canonical generator together with the sign of its canonicalization.
    Coord(Generator, bool),
    Vol(Vec<u16>),
    Neg(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            out.push((Tok::Num(chars[start..k].iter().map(|x| x.1).collect()), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            out.push((Tok::Ident(chars[start..k].iter().map(|x| x.1).collect()), pos));
        } else if "+-*^/()[];".contains(c) {
            out.push((Tok::Sym(c), pos));
            k += 1;
        } else {
            return Err(Error::Syntax {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    k: usize,
    end: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn pos(&self) -> usize {
        self.toks.get(self.k).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.k).map(|t| &t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.k += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn number(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = n.clone();
                self.k += 1;
                Ok(n)
            }
            _ => self.err("expected a number"),
        }
    }

    fn small(&mut self) -> Result<u16> {
        let pos = self.pos();
        let n = self.number()?;
        n.parse::<u16>().map_err(|_| Error::Syntax {
            pos,
            msg: format!("index `{n}` out of range"),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = Vec::new();
        let first_neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let t = self.term()?;
        parts.push(if first_neg { Expr::Neg(Box::new(t)) } else { t });
        loop {
            if self.eat('+') {
                parts.push(self.term()?);
            } else if self.eat('-') {
                parts.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Expr::Sum(parts) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.power()?];
        while self.eat('*') {
            factors.push(self.power()?);
        }
        Ok(if factors.len() == 1 { factors.pop().expect("one factor") } else { Expr::Product(factors) })
    }

    fn power(&mut self) -> Result<Expr> {
        let start = self.pos();
        let base = self.atom()?;
        if self.eat('^') {
            let pos = self.pos();
            let e: u32 = self.number()?.parse().map_err(|_| Error::Syntax {
                pos,
                msg: "exponent out of range".into(),
            })?;
            if let Expr::Coord(g, _) = &base {
                if g.parity().is_odd() && e >= 2 {
                    return Err(Error::Parity(format!("odd generator {g} raised to power {e} (at {start})")));
                }
            }
            return Ok(Expr::Power(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(_)) => {
                let n: BigInt = self.number()?.parse().expect("digits");
                if self.eat('/') {
                    let pos = self.pos();
                    let d: BigInt = self.number()?.parse().expect("digits");
                    if d == BigInt::from(0) {
                        return Err(Error::Syntax {
                            pos,
                            msg: "zero denominator".into(),
                        });
                    }
                    return Ok(Expr::Rational(Q::new(n, d)));
                }
                Ok(Expr::Rational(Q::from_integer(n)))
            }
            Some(Tok::Sym('(')) => {
                self.k += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.k += 1;
                self.reference(&name)
            }
            _ => self.err("expected a number, `(` or a coordinate"),
        }
    }

    fn indices_until(&mut self, close: char) -> Result<Vec<u16>> {
        let mut out = Vec::new();
        while !self.eat(close) {
            if self.peek().is_none() {
                return self.err(format!("expected `{close}`"));
            }
            out.push(self.small()?);
        }
        Ok(out)
    }

    fn param(&mut self) -> Result<u16> {
        let pos = self.pos();
        self.expect('[')?;
        let i = self.small()?;
        self.expect(']')?;
        if i == 0 || i > self.sig.n_params() {
            return Err(Error::Undeclared(format!("parameter {i} (at {pos})")));
        }
        Ok(i)
    }

    fn reference(&mut self, name: &str) -> Result<Expr> {
        let sig = self.sig;
        match name {
            "t" => Ok(Expr::Coord(sig.t(self.param()?), false)),
            "dt" => Ok(Expr::Coord(sig.dt(self.param()?), false)),
            "Vol" => {
                self.expect('[')?;
                let idx = self.indices_until(']')?;
                for &i in &idx {
                    if i == 0 || i > sig.n_params() {
                        return Err(Error::Undeclared(format!("parameter {i}")));
                    }
                }
                Ok(Expr::Vol(idx))
            }
            "x" | "G" if self.peek() == Some(&Tok::Sym('[')) => {
                self.k += 1;
                // A first fiber named `x` prints as `x[; σ]`.
                let named_x = name == "x" && self.peek() == Some(&Tok::Sym(';')) && sig.fiber_index("x") == Some(1);
                let a = if named_x { 1 } else { self.fiber_slot()? };
                self.expect(';')?;
                let idx = self.indices_until(']')?;
                self.coord(name == "G", a, &idx)
            }
            _ => {
                let Some(a) = sig.fiber_index(name) else {
                    return Err(Error::Undeclared(name.to_string()));
                };
                let mut idx = Vec::new();
                if self.eat('[') {
                    if let Some(Tok::Num(n)) = self.peek() {
                        if n != "1" {
                            return self.err("a named coordinate has a single component");
                        }
                        self.k += 1;
                    }
                    self.expect(';')?;
                    idx = self.indices_until(']')?;
                }
                self.coord(false, a, &idx)
            }
        }
    }

    fn fiber_slot(&mut self) -> Result<u16> {
        match self.peek().cloned() {
            Some(Tok::Num(_)) => {
                let a = self.small()?;
                if a == 0 || a > self.sig.fiber_dim() {
                    return Err(Error::Undeclared(format!("fiber coordinate {a}")));
                }
                Ok(a)
            }
            Some(Tok::Ident(n)) => {
                self.k += 1;
                self.sig.fiber_index(&n).ok_or(Error::Undeclared(n))
            }
            _ => self.err("expected a fiber index or name"),
        }
    }

    fn coord(&self, gamma: bool, a: u16, idx: &[u16]) -> Result<Expr> {
        for &i in idx {
            if i == 0 || i > self.sig.n_params() {
                return Err(Error::Undeclared(format!("parameter {i}")));
            }
        }
        let (c, neg): (JetCoord, bool) = self
            .sig
            .coord(a, idx)?
            .ok_or_else(|| Error::Parity(format!("odd parameter repeated in {idx:?}")))?;
        let g = if gamma { Generator::Gamma(c) } else { Generator::Jet(c) };
        Ok(Expr::Coord(g, neg))
    }
}

fn parse_expr(text: &str, sig: &Signature) -> Result<Expr> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        k: 0,
        end: text.len(),
        sig,
    };
    let e = p.expr()?;
    if p.k != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

enum Value {
    Poly(GradedPoly),
    Form(IntegralForm),
}

fn eval(e: &Expr, sig: &Signature) -> Result<Value> {
    Ok(match e {
        Expr::Rational(c) => Value::Poly(GradedPoly::constant(c.clone())),
        Expr::Coord(g, neg) => Value::Poly(GradedPoly::generator(g.clone()).scale(&sign_of(*neg))),
        Expr::Vol(idx) => Value::Form(IntegralForm::symbol(sig, idx, GradedPoly::one())?),
        Expr::Neg(inner) => match eval(inner, sig)? {
            Value::Poly(p) => Value::Poly(-p),
            Value::Form(f) => Value::Form(f.scale(&q(-1))),
        },
        Expr::Sum(parts) => {
            let mut poly = GradedPoly::zero();
            let mut form: Option<IntegralForm> = None;
            for p in parts {
                match eval(p, sig)? {
                    Value::Poly(x) => poly += &x,
                    Value::Form(f) => form = Some(form.map_or(f.clone(), |g| g.add(&f))),
                }
            }
            match form {
                None => Value::Poly(poly),
                Some(_) if !poly.is_zero() => {
                    return Err(Error::Degree("cannot add a function to an integral form".into()))
                }
                Some(f) => Value::Form(f),
            }
        }
        Expr::Product(factors) => {
            let mut acc = Value::Poly(GradedPoly::one());
            for f in factors {
                acc = match (acc, eval(f, sig)?) {
                    (Value::Poly(a), Value::Poly(b)) => Value::Poly(&a * &b),
                    (Value::Poly(a), Value::Form(b)) => Value::Form(b.map_coefficients(|c| &a * c)),
                    (Value::Form(_), _) => {
                        return Err(Error::Degree("𝒟x symbols must stand rightmost in a product".into()))
                    }
                };
            }
            acc
        }
        Expr::Power(base, n) => match eval(base, sig)? {
            Value::Poly(p) => Value::Poly(p.pow(*n)),
            Value::Form(_) if *n == 1 => eval(base, sig)?,
            Value::Form(_) => return Err(Error::Degree("powers of 𝒟x symbols are undefined".into())),
        },
    })
}

/// Parse a polynomial over the signature.
pub fn parse(text: &str, sig: &Signature) -> Result<GradedPoly> {
    match eval(&parse_expr(text, sig)?, sig)? {
        Value::Poly(p) => Ok(p),
        Value::Form(_) => Err(Error::Degree("expected a polynomial, found 𝒟x symbols".into())),
    }
}

/// Parse an integral form Σ c_I Vol[I]; a bare polynomial p is read as p Vol[].
pub fn parse_integral(text: &str, sig: &Signature) -> Result<IntegralForm> {
    match eval(&parse_expr(text, sig)?, sig)? {
        Value::Poly(p) => Ok(IntegralForm::volume(sig, p)),
        Value::Form(f) => Ok(f),
    }
}

/// "r:s" for the parameter signature.
pub fn parse_signature(spec: &str, fiber: &str) -> Result<Signature> {
    let bad = || Error::Config(format!("bad signature `{spec}`, expected r:s"));
    let (r, s) = spec.split_once(':').ok_or_else(bad)?;
    let r: u16 = r.trim().parse().map_err(|_| bad())?;
    let s: u16 = s.trim().parse().map_err(|_| bad())?;
    let mut coords = Vec::new();
    for item in fiber.split(',').filter(|x| !x.trim().is_empty()) {
        let (name, parity) = item.split_once(':').unwrap_or((item, "even"));
        coords.push(FiberCoord {
            name: name.trim().to_string(),
            parity: parse_parity(parity)?,
        });
    }
    Signature::new(r, s, coords)
}

pub fn parse_parity(text: &str) -> Result<Parity> {
    match text.trim() {
        "even" | "0" => Ok(Parity::Even),
        "odd" | "1" => Ok(Parity::Odd),
        other => Err(Error::Config(format!("unknown parity `{other}`"))),
    }
}
