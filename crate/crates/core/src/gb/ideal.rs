use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::poly::{Ambient, BaseOrder, MonomialOrder, Polynomial};

use super::{fresh_name, GbError, GroebnerBasis};

/// `saturating^exponent * target = Σ combiners[i] * generators[i]`.
#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    pub target: Polynomial,
    pub generators: Vec<Polynomial>,
    pub saturating: Option<Polynomial>,
    pub exponent: u32,
    pub combiners: Vec<Polynomial>,
}

impl MembershipCertificate {
    /// Checks the identity by expansion alone.
    pub fn recheck(&self) -> bool {
        let a = self.target.ambient();
        let mut lhs = self.target.clone();
        if let Some(s) = &self.saturating {
            lhs = &s.pow(self.exponent) * &lhs;
        }
        if self.combiners.len() != self.generators.len() {
            return false;
        }
        let mut rhs = Polynomial::zero(a);
        for (c, g) in self.combiners.iter().zip(&self.generators) {
            rhs = &rhs + &(c * g);
        }
        lhs == rhs
    }

    pub fn to_record(&self) -> CertificateRecord {
        CertificateRecord {
            vars: self.target.ambient().vars().to_vec(),
            target: self.target.to_string(),
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            saturating: self.saturating.as_ref().map(|s| s.to_string()),
            exponent: self.exponent,
            combiners: self.combiners.iter().map(|c| c.to_string()).collect(),
        }
    }
}

/// Serializable form of a [`MembershipCertificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub vars: Vec<String>,
    pub target: String,
    pub generators: Vec<String>,
    pub saturating: Option<String>,
    pub exponent: u32,
    pub combiners: Vec<String>,
}

/// Finds the least `N ≤ max_exponent` with `s^N p ∈ (gens)` and returns the certificate.
pub fn membership(
    p: &Polynomial,
    gens: &[Polynomial],
    saturate_by: Option<&Polynomial>,
    max_exponent: u32,
) -> Result<MembershipCertificate, GbError> {
    let ambient = p.ambient().clone();
    let gb = GroebnerBasis::compute(&ambient, gens)?;
    let s = saturate_by.map(|s| s.to_ambient(&ambient)).transpose()?;
    let mut target = p.clone();
    let top = if s.is_some() { max_exponent } else { 0 };
    for n in 0..=top {
        if let Some(combiners) = gb.express(&target)? {
            return Ok(MembershipCertificate {
                target: p.clone(),
                generators: gb.inputs().to_vec(),
                saturating: s,
                exponent: n,
                combiners,
            });
        }
        if let Some(s) = &s {
            target = &target * s;
        }
    }
    Err(GbError::NotMember(top))
}

/// Reduced Gröbner basis (in the order of `ambient`) of `(gens) : s^∞`.
pub fn saturate(ambient: &Arc<Ambient>, gens: &[Polynomial], s: &Polynomial) -> Result<GroebnerBasis, GbError> {
    let t = fresh_name(ambient, "T");
    let mut vars = ambient.vars().to_vec();
    vars.push(t.clone());
    let n = vars.len();
    let big = Ambient::new(&vars, MonomialOrder::block(n, &[n - 1], BaseOrder::Grevlex));
    let mut lifted = gens.iter().map(|g| g.to_ambient(&big)).collect::<Result<Vec<_>, _>>()?;
    let tv = Polynomial::var(&big, n - 1);
    lifted.push(&(&tv * &s.to_ambient(&big)?) - &Polynomial::one(&big));
    let gb = GroebnerBasis::compute(&big, &lifted)?;
    let kept = gb
        .basis()
        .iter()
        .filter(|g| !g.uses_var(n - 1))
        .map(|g| g.to_ambient(ambient))
        .collect::<Result<Vec<_>, _>>()?;
    GroebnerBasis::compute(ambient, &kept)
}

/// Generators of `(gens) ∩ k[other variables]`; results stay in `ambient`.
pub fn eliminate(ambient: &Arc<Ambient>, gens: &[Polynomial], vars: &[&str]) -> Result<Vec<Polynomial>, GbError> {
    let mut idx = Vec::new();
    for v in vars {
        idx.push(ambient.index_of(v).ok_or_else(|| crate::poly::PolyError::UnknownVariable(v.to_string()))?);
    }
    let elim = ambient.with_order(MonomialOrder::block(ambient.nvars(), &idx, BaseOrder::Grevlex));
    let gb = GroebnerBasis::compute(&elim, gens)?;
    gb.basis()
        .iter()
        .filter(|g| idx.iter().all(|&i| !g.uses_var(i)))
        .map(|g| Ok(g.to_ambient(ambient)?))
        .collect()
}

/// The graph ideal `J + (s_i - φ(x_i))` of a map `k[x] → k[y]/J`, with the
/// target variables eliminated. Source variables are renamed when they clash.
#[derive(Clone, Debug)]
pub struct GraphIdeal {
    source: Arc<Ambient>,
    target: Arc<Ambient>,
    joint: Arc<Ambient>,
    gb: GroebnerBasis,
}

impl GraphIdeal {
    pub fn new(
        source: &Arc<Ambient>,
        images: &[Polynomial],
        target: &Arc<Ambient>,
        target_relations: &[Polynomial],
    ) -> Result<Self, GbError> {
        let mut vars: Vec<String> = target.vars().to_vec();
        for v in source.vars() {
            let probe = Ambient::grevlex(&vars);
            let name = fresh_name(&probe, &format!("{v}_s"));
            vars.push(name);
        }
        let nt = target.nvars();
        let elim: Vec<usize> = (0..nt).collect();
        let joint = Ambient::new(&vars, MonomialOrder::block(vars.len(), &elim, BaseOrder::Grevlex));
        let mut gens = Vec::new();
        for r in target_relations {
            gens.push(r.to_ambient(target)?.to_ambient(&joint)?);
        }
        for (i, img) in images.iter().enumerate() {
            let s = Polynomial::var(&joint, nt + i);
            gens.push(&s - &img.to_ambient(target)?.to_ambient(&joint)?);
        }
        let gb = GroebnerBasis::compute(&joint, &gens)?;
        Ok(GraphIdeal { source: source.clone(), target: target.clone(), joint, gb })
    }

    fn to_source(&self, p: &Polynomial) -> Polynomial {
        let nt = self.target.nvars();
        let terms = p.terms().iter().map(|t| {
            let e = &t.mono.exponents()[nt..];
            (t.coeff.clone(), crate::poly::Monomial::from_exponents(e))
        });
        Polynomial::from_terms(&self.source, terms)
    }

    /// Some `q` over the source with `φ(q) ≡ p` modulo the target relations.
    pub fn preimage(&self, p: &Polynomial) -> Result<Polynomial, GbError> {
        let lifted = p.to_ambient(&self.target)?.to_ambient(&self.joint)?;
        let r = self.gb.reduce(&lifted)?;
        if (0..self.target.nvars()).any(|i| r.uses_var(i)) {
            return Err(GbError::NoPreimage(p.to_string()));
        }
        Ok(self.to_source(&r))
    }

    /// Generators of the kernel of the map, over the source.
    pub fn kernel(&self) -> Vec<Polynomial> {
        let nt = self.target.nvars();
        self.gb
            .basis()
            .iter()
            .filter(|g| (0..nt).all(|i| !g.uses_var(i)))
            .map(|g| self.to_source(g))
            .collect()
    }

    pub fn is_unit(&self) -> bool {
        self.gb.is_unit()
    }
}
