//! Recursive-descent parser for the polynomial grammar:
//! integer and `a/b` literals, variables `[A-Za-z][A-Za-z0-9_']*`,
//! `+ - * ^`, parentheses. Over ℚ(ζ_l) the symbol `zeta` denotes ζ_l.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::coeff::{root_of_unity, Field, FieldElement, Rational};

use super::{Ambient, Polynomial, PolyError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(src[start..i].parse().unwrap())));
                continue;
            }
            a if a.is_ascii_alphabetic() => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            other => {
                return Err(PolyError::Parse { pos: i, msg: format!("unexpected character `{other}`") });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
    ambient: &'a Arc<Ambient>,
    field: Field,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn sum(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Int(e)) => {
                    self.pos += 1;
                    let e: u32 = match e.try_into() {
                        Ok(e) => e,
                        Err(_) => return self.err("exponent too large"),
                    };
                    Ok(base.pow(e))
                }
                _ => self.err("expected non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let mut value = Rational::from_bigints(n, BigInt::from(1));
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if d != BigInt::from(0) => {
                            self.pos += 1;
                            value = Rational::from_bigints(value.numer(), d);
                        }
                        _ => return self.err("expected positive integer denominator"),
                    }
                }
                Ok(Polynomial::from_rational(self.ambient, value))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.ambient.index_of(&name) {
                    return Ok(Polynomial::var(self.ambient, i));
                }
                if name == "zeta" {
                    if let Field::Cyclotomic(l) = self.field {
                        return Ok(Polynomial::constant(self.ambient, root_of_unity(l, 1)));
                    }
                }
                Err(PolyError::UnknownVariable(name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected `)`"),
                }
            }
            _ => self.err("expected literal, variable or `(`"),
        }
    }
}

impl Polynomial {
    /// Parses `src` over `ambient`; `zeta` is accepted when `field` is cyclotomic.
    pub fn parse(src: &str, ambient: &Arc<Ambient>, field: Field) -> Result<Polynomial, PolyError> {
        let toks = lex(src)?;
        if toks.is_empty() {
            return Err(PolyError::Parse { pos: 0, msg: "empty expression".into() });
        }
        let mut p = Parser { toks, pos: 0, len: src.len(), ambient, field };
        let out = p.sum()?;
        if p.pos != p.toks.len() {
            return p.err("trailing input");
        }
        Ok(out)
    }

    /// Parses over ℚ.
    pub fn parse_q(src: &str, ambient: &Arc<Ambient>) -> Result<Polynomial, PolyError> {
        Self::parse(src, ambient, Field::Rational)
    }
}

impl Field {
    /// Parses a field element, e.g. `3/4` or `1 - zeta^2`.
    pub fn parse_element(self, src: &str) -> Result<FieldElement, PolyError> {
        let empty: Arc<Ambient> = Ambient::grevlex::<&str>(&[]);
        let p = Polynomial::parse(src, &empty, self)?;
        Ok(p.constant_value().expect("no variables in empty ambient"))
    }
}
