//! Text grammar for series and polynomials.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | atom ['^' uint]
//! atom    := number | mono | 'x' | 'z' | '(' expr ')' | name '(' expr (',' expr)* ')'
//! mono    := ('t'|'p') ['^' ('(' rational ')' | uint)]
//! number  := uint ['/' posint]
//! ```
//!
//! `t` is the monomial symbol in equal characteristic, `p` in mixed
//! characteristic, where `z` denotes a primitive p-th root of unity.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::coeffs::{Coeff, PrimeChar};
use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::poly::Poly;

use super::{geom, Series};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rat),
    /// The monomial symbol raised to a rational exponent.
    Mono(char, Rat),
    X,
    Zeta,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call { name: String, args: Vec<Expr>, pos: usize },
}

impl Expr {
    /// The rational literal this expression denotes, if it is one.
    pub fn as_rat(&self) -> Option<Rat> {
        match self {
            Expr::Num(r) => Some(r.clone()),
            Expr::Neg(e) => e.as_rat().map(|r| -r),
            _ => None,
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

fn perr<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

impl<'a> Parser<'a> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            perr(self.pos, format!("expected `{}`", c as char))
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return perr(start, "expected an integer");
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap())
    }

    fn small_uint(&mut self) -> Result<u32> {
        let at = self.pos;
        let n = self.uint()?;
        u32::try_from(n).or_else(|_| perr(at, "exponent too large"))
    }

    fn rational(&mut self) -> Result<Rat> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let n = self.uint()?;
        let r = if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let d = self.uint()?;
            if d.is_zero() {
                return perr(at, "zero denominator");
            }
            Rat::new(n, d)?
        } else {
            Rat::int(n)
        };
        Ok(if neg { -r } else { r })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = if self.eat(b'-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let atom = self.atom()?;
        if let Expr::Mono(..) = atom {
            return Ok(atom);
        }
        if self.eat(b'^') {
            return Ok(Expr::Pow(Box::new(atom), self.small_uint()?));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.pos;
        match self.peek() {
            None => perr(self.pos, "unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                if self.s.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.uint()?;
                    if d.is_zero() {
                        return perr(at, "zero denominator");
                    }
                    return Ok(Expr::Num(Rat::new(n, d)?));
                }
                Ok(Expr::Num(Rat::int(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let s = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[s..self.pos]).unwrap().to_string();
                match name.as_str() {
                    "t" | "p" => {
                        let sym = name.as_bytes()[0] as char;
                        if !self.eat(b'^') {
                            return Ok(Expr::Mono(sym, Rat::one()));
                        }
                        if self.eat(b'(') {
                            let q = self.rational()?;
                            self.expect(b')')?;
                            Ok(Expr::Mono(sym, q))
                        } else {
                            Ok(Expr::Mono(sym, Rat::int(self.uint()?)))
                        }
                    }
                    "x" => Ok(Expr::X),
                    "z" => Ok(Expr::Zeta),
                    _ => {
                        if !self.eat(b'(') {
                            return perr(s, format!("unknown symbol `{name}`"));
                        }
                        let mut args = vec![self.expr()?];
                        while self.eat(b',') {
                            args.push(self.expr()?);
                        }
                        self.expect(b')')?;
                        Ok(Expr::Call { name, args, pos: s })
                    }
                }
            }
            Some(c) => perr(start, format!("unexpected `{}`", c as char)),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut ps = Parser { s: text.as_bytes(), pos: 0 };
    let e = ps.expr()?;
    if ps.peek().is_some() {
        return perr(ps.pos, "trailing input");
    }
    Ok(e)
}

pub fn eval_poly<C: Coeff>(e: &Expr, p: PrimeChar) -> Result<Poly<C>> {
    Ok(match e {
        Expr::Num(r) => Poly::constant(Series::monomial(Rat::zero(), C::from_rat(r, p)?)),
        Expr::Mono(sym, q) => {
            if *sym != C::SYMBOL {
                return Err(Error::Backend(format!(
                    "monomial `{sym}` used with the {} backend (expects `{}`)",
                    C::BACKEND,
                    C::SYMBOL
                )));
            }
            Poly::constant(Series::monomial(q.clone(), C::one(p)))
        }
        Expr::X => Poly::x(p),
        Expr::Zeta => {
            if C::CHAR_P {
                return Err(Error::Backend("`z` is only available in mixed characteristic".into()));
            }
            Poly::constant(Series::monomial(Rat::zero(), C::zeta_pow(1, p)?))
        }
        Expr::Neg(a) => -&eval_poly::<C>(a, p)?,
        Expr::Add(a, b) => &eval_poly::<C>(a, p)? + &eval_poly::<C>(b, p)?,
        Expr::Sub(a, b) => &eval_poly::<C>(a, p)? - &eval_poly::<C>(b, p)?,
        Expr::Mul(a, b) => &eval_poly::<C>(a, p)? * &eval_poly::<C>(b, p)?,
        Expr::Pow(a, n) => {
            let base = eval_poly::<C>(a, p)?;
            match base.as_constant() {
                Some(c) => Poly::constant(c.pow(*n)),
                None => base.pow(*n),
            }
        }
        Expr::Call { name, args, pos } => Poly::constant(call_builtin::<C>(name, args, *pos, p)?),
    })
}

fn series_arg<C: Coeff>(e: &Expr, p: PrimeChar, pos: usize) -> Result<Series<C>> {
    eval_poly::<C>(e, p)?
        .as_constant()
        .ok_or_else(|| Error::Parse { pos, msg: "builtin argument must not contain x".into() })
}

fn call_builtin<C: Coeff>(name: &str, args: &[Expr], pos: usize, p: PrimeChar) -> Result<Series<C>> {
    let arity = |n: usize| -> Result<()> {
        if args.len() != n {
            return perr(pos, format!("`{name}` takes {n} argument(s), got {}", args.len()));
        }
        Ok(())
    };
    match name {
        "geom" => {
            arity(3)?;
            let lits: Vec<Rat> = args
                .iter()
                .map(|a| a.as_rat().ok_or_else(|| Error::Parse { pos, msg: "geom expects rational literals".into() }))
                .collect::<Result<_>>()?;
            let int = |r: &Rat| -> Result<u64> {
                if !r.is_integer() || r.is_negative() {
                    return perr(pos, "geom ratio and start must be non-negative integers");
                }
                r.numer().try_into().or_else(|_| perr(pos, "geom argument too large"))
            };
            let start = int(&lits[2])?;
            Ok(Series::Lazy(geom(lits[0].clone(), int(&lits[1])?, start as u32, p)?))
        }
        "square" => {
            arity(1)?;
            Ok(series_arg::<C>(&args[0], p, pos)?.square())
        }
        "as_root" => {
            arity(1)?;
            let a = series_arg::<C>(&args[0], p, pos)?;
            Ok(Series::Lazy(crate::plateau::as_root_lazy(&a)?))
        }
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

pub fn parse_poly<C: Coeff>(text: &str, p: PrimeChar) -> Result<Poly<C>> {
    eval_poly(&parse_expr(text)?, p)
}

pub fn parse_series<C: Coeff>(text: &str, p: PrimeChar) -> Result<Series<C>> {
    parse_poly::<C>(text, p)?
        .as_constant()
        .ok_or_else(|| Error::Parse { pos: 0, msg: "a field element must not contain x".into() })
}
