use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::coeff::{Field, FieldElement, Rational};

use super::{Monomial, MonomialOrder, PolyError};

/// Ordered variable list together with the active monomial order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ambient {
    vars: Vec<String>,
    order: MonomialOrder,
}

impl Ambient {
    pub fn new<S: AsRef<str>>(vars: &[S], order: MonomialOrder) -> Arc<Ambient> {
        Arc::new(Ambient { vars: vars.iter().map(|s| s.as_ref().to_string()).collect(), order })
    }

    pub fn grevlex<S: AsRef<str>>(vars: &[S]) -> Arc<Ambient> {
        Self::new(vars, MonomialOrder::Grevlex)
    }

    pub fn lex<S: AsRef<str>>(vars: &[S]) -> Arc<Ambient> {
        Self::new(vars, MonomialOrder::Lex)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn with_order(&self, order: MonomialOrder) -> Arc<Ambient> {
        Arc::new(Ambient { vars: self.vars.clone(), order })
    }

    /// Same variables, listed in the given priority (first = largest).
    pub fn with_priority<S: AsRef<str>>(&self, priority: &[S], order: MonomialOrder) -> Result<Arc<Ambient>, PolyError> {
        let mut vars = Vec::with_capacity(self.vars.len());
        for p in priority {
            let p = p.as_ref();
            if self.index_of(p).is_none() {
                return Err(PolyError::UnknownVariable(p.to_string()));
            }
            vars.push(p.to_string());
        }
        if vars.len() != self.vars.len() {
            return Err(PolyError::AmbientMismatch);
        }
        Ok(Arc::new(Ambient { vars, order }))
    }

    pub fn same(a: &Arc<Ambient>, b: &Arc<Ambient>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    pub coeff: FieldElement,
    pub mono: Monomial,
}

/// A multivariate polynomial in canonical form: terms strictly descending in
/// the ambient order, no zero coefficients.
#[derive(Clone)]
pub struct Polynomial {
    ambient: Arc<Ambient>,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn zero(ambient: &Arc<Ambient>) -> Self {
        Polynomial { ambient: ambient.clone(), terms: Vec::new() }
    }

    pub fn constant(ambient: &Arc<Ambient>, c: FieldElement) -> Self {
        Self::monomial(ambient, c, Monomial::one(ambient.nvars()))
    }

    pub fn one(ambient: &Arc<Ambient>) -> Self {
        Self::constant(ambient, FieldElement::one())
    }

    pub fn from_integer(ambient: &Arc<Ambient>, n: i64) -> Self {
        Self::constant(ambient, FieldElement::from_integer(n))
    }

    pub fn from_rational(ambient: &Arc<Ambient>, r: Rational) -> Self {
        Self::constant(ambient, FieldElement::Rational(r))
    }

    pub fn monomial(ambient: &Arc<Ambient>, c: FieldElement, mono: Monomial) -> Self {
        debug_assert_eq!(mono.nvars(), ambient.nvars());
        let terms = if c.is_zero() { Vec::new() } else { vec![Term { coeff: c, mono }] };
        Polynomial { ambient: ambient.clone(), terms }
    }

    pub fn var(ambient: &Arc<Ambient>, i: usize) -> Self {
        Self::monomial(ambient, FieldElement::one(), Monomial::var(ambient.nvars(), i, 1))
    }

    pub fn var_named(ambient: &Arc<Ambient>, name: &str) -> Result<Self, PolyError> {
        let i = ambient.index_of(name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(ambient, i))
    }

    /// Builds a canonical polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(ambient: &Arc<Ambient>, terms: impl IntoIterator<Item = (FieldElement, Monomial)>) -> Self {
        let mut raw: Vec<Term> = terms
            .into_iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(coeff, mono)| Term { coeff, mono })
            .collect();
        let order = ambient.order();
        raw.sort_by(|a, b| order.cmp(&b.mono, &a.mono));
        let mut out: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match out.last_mut() {
                Some(last) if last.mono == t.mono => last.coeff = &last.coeff + &t.coeff,
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Polynomial { ambient: ambient.clone(), terms: out }
    }

    /// Wraps terms already in canonical order.
    pub(crate) fn from_canonical(ambient: &Arc<Ambient>, terms: Vec<Term>) -> Self {
        Polynomial { ambient: ambient.clone(), terms }
    }

    /// Removes and returns the leading term.
    pub(crate) fn pop_leading(&mut self) -> Option<Term> {
        if self.terms.is_empty() {
            None
        } else {
            Some(self.terms.remove(0))
        }
    }

    pub fn ambient(&self) -> &Arc<Ambient> {
        &self.ambient
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.mono.is_one())
    }

    pub fn constant_value(&self) -> Option<FieldElement> {
        match self.terms.as_slice() {
            [] => Some(FieldElement::zero()),
            [t] if t.mono.is_one() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.terms.as_slice(), [t] if t.mono.is_one() && t.coeff.is_one())
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.mono)
    }

    pub fn leading_coeff(&self) -> Option<&FieldElement> {
        self.terms.first().map(|t| &t.coeff)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.mono.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.mono.exponent(var)).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|t| t.mono.exponent(var) > 0)
    }

    /// Smallest field containing all coefficients.
    pub fn field(&self) -> Field {
        self.terms.iter().fold(Field::Rational, |f, t| f.join(t.coeff.field()).unwrap_or(f))
    }

    fn check(&self, other: &Polynomial) -> Result<(), PolyError> {
        if Ambient::same(&self.ambient, &other.ambient) {
            Ok(())
        } else {
            Err(PolyError::AmbientMismatch)
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        Ok(self.mul_impl(other))
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let order = self.ambient.order();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match order.cmp(&a[i].mono, &b[j].mono) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].coeff } else { b[j].coeff.clone() };
                    out.push(Term { coeff: c, mono: b[j].mono.clone() });
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].coeff - &b[j].coeff } else { &a[i].coeff + &b[j].coeff };
                    if !c.is_zero() {
                        out.push(Term { coeff: c, mono: a[i].mono.clone() });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.coeff } else { t.coeff.clone() };
            out.push(Term { coeff: c, mono: t.mono.clone() });
        }
        Polynomial { ambient: self.ambient.clone(), terms: out }
    }

    fn mul_impl(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ambient);
        }
        let (small, big) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        if small.terms.len() <= 4 {
            let mut acc = Polynomial::zero(&self.ambient);
            for t in &small.terms {
                acc = acc.merge(&big.mul_term(&t.coeff, &t.mono), false);
            }
            return acc;
        }
        let products = small.terms.iter().flat_map(|s| {
            big.terms.iter().map(move |b| (&s.coeff * &b.coeff, s.mono.mul(&b.mono)))
        });
        Polynomial::from_terms(&self.ambient, products)
    }

    /// `c * m * self`; order is preserved because monomial orders are multiplicative.
    pub fn mul_term(&self, c: &FieldElement, m: &Monomial) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ambient);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: &t.coeff * c, mono: t.mono.mul(m) })
            .filter(|t| !t.coeff.is_zero())
            .collect();
        Polynomial { ambient: self.ambient.clone(), terms }
    }

    /// `self - c * m * g`, the elementary reduction step.
    pub fn sub_mul_term(&self, c: &FieldElement, m: &Monomial, g: &Polynomial) -> Polynomial {
        self.merge(&g.mul_term(c, m), true)
    }

    pub fn scale(&self, c: &FieldElement) -> Polynomial {
        self.mul_term(c, &Monomial::one(self.ambient.nvars()))
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self.terms.iter().map(|t| Term { coeff: -&t.coeff, mono: t.mono.clone() }).collect();
        Polynomial { ambient: self.ambient.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.ambient);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        result
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coeff() {
            Some(c) if !c.is_one() => self.scale(&c.inverse().expect("nonzero leading coefficient")),
            _ => self.clone(),
        }
    }

    /// Applies the ring homomorphism sending variable `i` to `images[i]`.
    /// All images must share one ambient, which becomes the result's ambient.
    pub fn substitute(&self, images: &[Polynomial], target: &Arc<Ambient>) -> Result<Polynomial, PolyError> {
        if images.len() != self.ambient.nvars() {
            return Err(PolyError::MissingImage(
                self.ambient.vars().get(images.len()).cloned().unwrap_or_default(),
            ));
        }
        if images.iter().any(|p| !Ambient::same(p.ambient(), target)) {
            return Err(PolyError::AmbientMismatch);
        }
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Polynomial::one(target), p.clone()]).collect();
        let mut acc_terms: Vec<(FieldElement, Monomial)> = Vec::new();
        let mut acc = Polynomial::zero(target);
        for t in &self.terms {
            let mut prod = Polynomial::constant(target, t.coeff.clone());
            for (i, &e) in t.mono.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_impl(&images[i]);
                    powers[i].push(next);
                }
                prod = prod.mul_impl(&powers[i][e as usize]);
            }
            acc_terms.extend(prod.terms.into_iter().map(|t| (t.coeff, t.mono)));
            if acc_terms.len() > 4096 {
                acc = acc.merge(&Polynomial::from_terms(target, acc_terms.drain(..)), false);
            }
        }
        Ok(acc.merge(&Polynomial::from_terms(target, acc_terms), false))
    }

    /// Substitution with images given by variable name; every variable that
    /// occurs in `self` needs an image.
    pub fn substitute_map(
        &self,
        images: &BTreeMap<String, Polynomial>,
        target: &Arc<Ambient>,
    ) -> Result<Polynomial, PolyError> {
        let mut list = Vec::with_capacity(self.ambient.nvars());
        for (i, v) in self.ambient.vars().iter().enumerate() {
            match images.get(v) {
                Some(p) => list.push(p.clone()),
                None if !self.uses_var(i) => list.push(Polynomial::zero(target)),
                None => return Err(PolyError::MissingImage(v.clone())),
            }
        }
        self.substitute(&list, target)
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        let terms = self.terms.iter().filter(|t| t.mono.exponent(i) > 0).map(|t| {
            let e = t.mono.exponent(i);
            let mut mono = t.mono.clone();
            mono.set_exponent(i, e - 1);
            (&t.coeff * &FieldElement::from_integer(e as i64), mono)
        });
        // derivative of a sorted list is not necessarily sorted
        Polynomial::from_terms(&self.ambient, terms)
    }

    pub fn partial_named(&self, name: &str) -> Result<Polynomial, PolyError> {
        let i = self.ambient.index_of(name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(self.partial(i))
    }

    /// Re-expresses the polynomial over another ambient by variable name.
    pub fn to_ambient(&self, target: &Arc<Ambient>) -> Result<Polynomial, PolyError> {
        if Ambient::same(&self.ambient, target) {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.ambient.nvars());
        for (i, v) in self.ambient.vars().iter().enumerate() {
            match target.index_of(v) {
                Some(j) => map.push(Some(j)),
                None if !self.uses_var(i) => map.push(None),
                None => return Err(PolyError::UnknownVariable(v.clone())),
            }
        }
        let n = target.nvars();
        let terms = self.terms.iter().map(|t| {
            let mut m = Monomial::one(n);
            for (i, &e) in t.mono.exponents().iter().enumerate() {
                if let Some(j) = map[i] {
                    m.set_exponent(j, e);
                }
            }
            (t.coeff.clone(), m)
        });
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Coefficient of `var^k` viewed as a polynomial in `var`.
    pub fn coefficient_of(&self, var: usize, k: u32) -> Polynomial {
        let terms = self.terms.iter().filter(|t| t.mono.exponent(var) == k).map(|t| {
            let mut m = t.mono.clone();
            m.set_exponent(var, 0);
            (t.coeff.clone(), m)
        });
        Polynomial::from_terms(&self.ambient, terms)
    }

    pub fn coeff_of_monomial(&self, m: &Monomial) -> FieldElement {
        self.terms.iter().find(|t| &t.mono == m).map(|t| t.coeff.clone()).unwrap_or_else(FieldElement::zero)
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        Ambient::same(&self.ambient, &other.ambient) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Hash for Polynomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient.vars.hash(state);
        self.terms.hash(state);
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("ambient mismatch in polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("ambient mismatch in polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("ambient mismatch in polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &[String], m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{}", vars[i])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars = self.ambient.vars();
        for (k, t) in self.terms.iter().enumerate() {
            let negative = t.coeff.looks_negative();
            let mag = if negative { -&t.coeff } else { t.coeff.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if t.mono.is_one() {
                if mag.is_atomic() || self.terms.len() == 1 {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
                continue;
            }
            if !mag.is_one() {
                if mag.is_atomic() {
                    write!(f, "{mag}*")?;
                } else {
                    write!(f, "({mag})*")?;
                }
            }
            write_monomial(f, vars, &t.mono)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
