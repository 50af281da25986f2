//! Finitely presented rings with localization by inverse variables, verified
//! ring maps and isomorphisms, cylinders, and monomial μ_l-actions.

mod action;
mod file;
mod map;

use std::sync::Arc;

use crate::coeff::Field;
use crate::gb::{current_config, membership, GbError, GroebnerBasis, MembershipCertificate};
use crate::poly::{Ambient, BaseOrder, MonomialOrder, PolyError, Polynomial};

pub use action::{equivariance_check, invariant_subring, InvariantSubring, MonomialGroupAction};
pub use file::{FieldSpec, MapFile, RingFile};
pub use map::{verify_iso, verify_map, IsoCertificate, RingMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("inconsistent presentation: 1 lies in the relation ideal")]
    InconsistentPresentation,
    #[error("relation `{relation}` is not preserved; its image reduces to `{residual}`")]
    RelationNotPreserved { relation: String, residual: String },
    #[error("maps are not inverse on generator `{generator}`; residual `{residual}`")]
    NotInverse { generator: String, residual: String },
    #[error("variable `{0}` already exists")]
    VariableClash(String),
    #[error("degree bound {bound} is below the group order {needed}")]
    BoundTooSmall { bound: u32, needed: u32 },
    #[error("not equivariant on generator `{generator}`; residual `{residual}`")]
    NotEquivariant { generator: String, residual: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An inverted element together with the index of its inverse variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inverted {
    pub element: Polynomial,
    pub var: usize,
}

/// `k[vars, inverse vars] / (relations, w·f − 1)` with a cached reduced basis.
#[derive(Clone, Debug)]
pub struct PresentedRing {
    ambient: Arc<Ambient>,
    relations: Vec<Polynomial>,
    inverted: Vec<Inverted>,
    field: Field,
    gb: Arc<GroebnerBasis>,
}

fn base_order() -> MonomialOrder {
    match current_config().order {
        BaseOrder::Lex => MonomialOrder::Lex,
        BaseOrder::Grevlex => MonomialOrder::Grevlex,
    }
}

impl PresentedRing {
    /// Presents a ring; inverse variables get generated names.
    pub fn present<S: AsRef<str>>(
        vars: &[S],
        relations: &[Polynomial],
        inverted: &[Polynomial],
        field: Field,
    ) -> Result<Self, RingError> {
        let names: Vec<String> = {
            let mut taken: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
            let mut out = Vec::new();
            for (i, f) in inverted.iter().enumerate() {
                let stem = match single_variable(f) {
                    Some(v) => format!("{v}_inv"),
                    None => format!("w{}", i + 1),
                };
                let name = crate::gb::fresh_name(&Ambient::grevlex(&taken), &stem);
                taken.push(name.clone());
                out.push(name);
            }
            out
        };
        let pairs: Vec<(Polynomial, String)> = inverted.iter().cloned().zip(names).collect();
        Self::present_named(vars, relations, &pairs, field)
    }

    /// Presents a ring with explicitly named inverse variables.
    pub fn present_named<S: AsRef<str>>(
        vars: &[S],
        relations: &[Polynomial],
        inverted: &[(Polynomial, String)],
        field: Field,
    ) -> Result<Self, RingError> {
        let mut all: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let nbase = all.len();
        for (_, name) in inverted {
            if all.contains(name) {
                return Err(RingError::VariableClash(name.clone()));
            }
            all.push(name.clone());
        }
        for (i, v) in all.iter().enumerate() {
            if all[..i].contains(v) {
                return Err(RingError::VariableClash(v.clone()));
            }
        }
        let ambient = Ambient::new(&all, base_order());
        let mut rels: Vec<Polynomial> = Vec::new();
        for r in relations {
            let r = r.to_ambient(&ambient)?;
            if !r.is_zero() && !rels.contains(&r) {
                rels.push(r);
            }
        }
        let mut inv = Vec::new();
        for (k, (f, _)) in inverted.iter().enumerate() {
            let f = f.to_ambient(&ambient)?;
            let w = Polynomial::var(&ambient, nbase + k);
            rels.push(&(&w * &f) - &Polynomial::one(&ambient));
            inv.push(Inverted { element: f, var: nbase + k });
        }
        let gb = GroebnerBasis::compute(&ambient, &rels)?;
        if gb.is_unit() {
            return Err(RingError::InconsistentPresentation);
        }
        let field = rels.iter().try_fold(field, |acc, r| acc.join(r.field())).map_err(|e| RingError::Invalid(e.to_string()))?;
        Ok(PresentedRing { ambient, relations: rels, inverted: inv, field, gb: Arc::new(gb) })
    }

    /// Convenience: everything given as strings.
    pub fn from_strings(vars: &[&str], relations: &[&str], invert: &[(&str, &str)], field: Field) -> Result<Self, RingError> {
        let a = Ambient::grevlex(vars);
        let rels = relations.iter().map(|r| Polynomial::parse(r, &a, field)).collect::<Result<Vec<_>, _>>()?;
        let inv = invert
            .iter()
            .map(|(f, n)| Ok((Polynomial::parse(f, &a, field)?, n.to_string())))
            .collect::<Result<Vec<_>, PolyError>>()?;
        Self::present_named(vars, &rels, &inv, field)
    }

    /// Polynomial ring with no relations.
    pub fn polynomial_ring(vars: &[&str]) -> Self {
        Self::present_named(vars, &[], &[], Field::Rational).expect("free ring")
    }

    pub fn ambient(&self) -> &Arc<Ambient> {
        &self.ambient
    }

    pub fn vars(&self) -> &[String] {
        self.ambient.vars()
    }

    pub fn nvars(&self) -> usize {
        self.ambient.nvars()
    }

    /// Declared (non-inverse) variables.
    pub fn base_vars(&self) -> Vec<String> {
        self.base_indices().into_iter().map(|i| self.ambient.vars()[i].clone()).collect()
    }

    pub fn base_indices(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| !self.is_inverse_var(i)).collect()
    }

    /// User relations followed by the `w·f − 1` relations.
    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    /// User relations only.
    pub fn base_relations(&self) -> &[Polynomial] {
        &self.relations[..self.relations.len() - self.inverted.len()]
    }

    pub fn inverted(&self) -> &[Inverted] {
        &self.inverted
    }

    pub fn is_inverse_var(&self, i: usize) -> bool {
        self.inverted.iter().any(|inv| inv.var == i)
    }

    pub fn inverse_of_var(&self, i: usize) -> Option<&Inverted> {
        self.inverted.iter().find(|inv| inv.var == i)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn gb(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn var(&self, name: &str) -> Result<Polynomial, RingError> {
        Ok(Polynomial::var_named(&self.ambient, name)?)
    }

    pub fn gen(&self, i: usize) -> Polynomial {
        Polynomial::var(&self.ambient, i)
    }

    pub fn parse(&self, s: &str) -> Result<Polynomial, RingError> {
        Ok(Polynomial::parse(s, &self.ambient, self.field)?)
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::one(&self.ambient)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(&self.ambient)
    }

    /// Canonical representative (normal form).
    pub fn reduce(&self, p: &Polynomial) -> Result<Polynomial, RingError> {
        Ok(self.gb.reduce(&p.to_ambient(&self.ambient)?)?)
    }

    pub fn is_zero(&self, p: &Polynomial) -> Result<bool, RingError> {
        Ok(self.reduce(p)?.is_zero())
    }

    pub fn equal(&self, p: &Polynomial, q: &Polynomial) -> Result<bool, RingError> {
        self.is_zero(&(&p.to_ambient(&self.ambient)? - &q.to_ambient(&self.ambient)?))
    }

    /// Cofactor identity `p = Σ c_i relation_i`, when `p` vanishes in the ring.
    pub fn zero_certificate(&self, p: &Polynomial) -> Result<Option<MembershipCertificate>, RingError> {
        let p = p.to_ambient(&self.ambient)?;
        Ok(self.gb.express(&p)?.map(|combiners| MembershipCertificate {
            target: p,
            generators: self.relations.clone(),
            saturating: None,
            exponent: 0,
            combiners,
        }))
    }

    /// An inverse of `p` in the ring, if `p` is a unit.
    pub fn inverse(&self, p: &Polynomial) -> Result<Option<Polynomial>, RingError> {
        let p = p.to_ambient(&self.ambient)?;
        let mut gens = vec![p];
        gens.extend(self.relations.iter().cloned());
        match membership(&self.one(), &gens, None, 0) {
            Ok(cert) => Ok(Some(self.reduce(&cert.combiners[0])?)),
            Err(GbError::NotMember(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// `R[name]`, the cylinder over `R`.
    pub fn tensor_with_polynomial_line(&self, name: &str) -> Result<Self, RingError> {
        if self.ambient.index_of(name).is_some() {
            return Err(RingError::VariableClash(name.to_string()));
        }
        let mut vars = self.ambient.vars().to_vec();
        vars.push(name.to_string());
        let ambient = Ambient::new(&vars, self.ambient.order().clone());
        let relations = self.relations.iter().map(|r| r.to_ambient(&ambient)).collect::<Result<Vec<_>, _>>()?;
        let inverted = self
            .inverted
            .iter()
            .map(|i| Ok(Inverted { element: i.element.to_ambient(&ambient)?, var: i.var }))
            .collect::<Result<Vec<_>, PolyError>>()?;
        // grevlex and lex restrict correctly to the old variables
        let gb = match self.ambient.order() {
            MonomialOrder::Lex | MonomialOrder::Grevlex => self.gb.extend_to(&ambient)?,
            _ => GroebnerBasis::compute(&ambient, &relations)?,
        };
        Ok(PresentedRing { ambient, relations, inverted, field: self.field, gb: Arc::new(gb) })
    }

    /// Same ring with extra inverted elements.
    pub fn localize(&self, extra: &[(Polynomial, String)]) -> Result<Self, RingError> {
        let mut inv = self.inverted_pairs();
        inv.extend(extra.iter().cloned());
        let rels = self.base_relations().to_vec();
        Self::present_named(&self.base_vars(), &rels, &inv, self.field)
    }

    /// Inverted elements with the names of their inverse variables.
    pub fn inverted_pairs(&self) -> Vec<(Polynomial, String)> {
        self.inverted.iter().map(|i| (i.element.clone(), self.ambient.vars()[i.var].clone())).collect()
    }

    /// Presentation bytes used to compare rings.
    pub fn describe(&self) -> String {
        let basis: Vec<String> = self.gb.basis().iter().map(|g| g.to_string()).collect();
        format!("vars: {:?}\nrelations: {:?}\nbasis: {:?}", self.vars(), self.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(), basis)
    }
}

fn single_variable(f: &Polynomial) -> Option<String> {
    if f.nterms() != 1 || !f.leading_coeff()?.is_one() {
        return None;
    }
    let m = f.leading_monomial()?;
    if m.degree() != 1 {
        return None;
    }
    let i = m.exponents().iter().position(|&e| e == 1)?;
    Some(f.ambient().vars()[i].clone())
}

#[cfg(test)]
mod tests;
