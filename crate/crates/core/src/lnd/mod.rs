//! Derivations of presented rings: well-definedness, local nilpotency,
//! exponentials, kernels, slices and Dixmier trivializations.

mod slice;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeff::{FieldElement, Rational};
use crate::gb::{membership, GbError, MembershipCertificate};
use crate::poly::{PolyError, Polynomial};
use crate::ring::{MonomialGroupAction, PresentedRing, RingError, RingFile, RingMap};

pub use slice::{dixmier_trivialize, find_slice, Slice, SliceSearch, Trivialization};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LndError {
    #[error("not well defined: relation `{relation}` maps to `{residual}`")]
    NotWellDefined { relation: String, residual: String },
    #[error("nilpotency bound exceeded on `{generator}`; last nonzero entry `{last}`")]
    BoundExceeded { generator: String, last: String },
    #[error("no slice of degree at most {0}")]
    NoSliceWithinBound(u32),
    #[error("the generator images together with the relations do not generate the unit ideal")]
    NotFixedPointFree,
    #[error("kernel presentation exceeded its budget: {0}")]
    PresentationBudgetExceeded(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A derivation given by the images of the ring variables. Images of inverse
/// variables are forced: `D(w_f) = −w_f²·D(f)`.
#[derive(Clone, Debug)]
pub struct Derivation {
    ring: PresentedRing,
    images: Vec<Polynomial>,
    name: String,
}

impl Derivation {
    /// Builds and verifies a derivation from images of the non-inverse variables.
    pub fn make(ring: &PresentedRing, images: &BTreeMap<String, Polynomial>, name: &str) -> Result<Self, LndError> {
        let n = ring.nvars();
        let mut out = vec![ring.zero(); n];
        for i in ring.base_indices() {
            let v = &ring.vars()[i];
            let img = images.get(v).ok_or_else(|| PolyError::MissingImage(v.clone()))?;
            out[i] = ring.reduce(&img.to_ambient(ring.ambient())?)?;
        }
        for (name, _) in images.iter() {
            if let Some(i) = ring.ambient().index_of(name) {
                if ring.is_inverse_var(i) {
                    return Err(LndError::Precondition(format!("image of inverse variable `{name}` is forced")));
                }
            } else {
                return Err(PolyError::UnknownVariable(name.clone()).into());
            }
        }
        let mut d = Derivation { ring: ring.clone(), images: out, name: name.to_string() };
        for inv in ring.inverted() {
            let df = d.apply(&inv.element)?;
            let w = ring.gen(inv.var);
            d.images[inv.var] = ring.reduce(&(&(&w * &w) * &df).neg())?;
        }
        d.check_well_defined()?;
        Ok(d)
    }

    pub fn from_strings(ring: &PresentedRing, images: &[(&str, &str)], name: &str) -> Result<Self, LndError> {
        let mut m = BTreeMap::new();
        for (v, s) in images {
            m.insert(v.to_string(), ring.parse(s)?);
        }
        Self::make(ring, &m, name)
    }

    pub fn zero(ring: &PresentedRing) -> Self {
        Derivation { ring: ring.clone(), images: vec![ring.zero(); ring.nvars()], name: "0".into() }
    }

    pub fn ring(&self) -> &PresentedRing {
        &self.ring
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn image_of(&self, var: &str) -> Option<&Polynomial> {
        self.ring.ambient().index_of(var).map(|i| &self.images[i])
    }

    pub fn named_images(&self) -> BTreeMap<String, Polynomial> {
        self.ring.vars().iter().cloned().zip(self.images.iter().cloned()).collect()
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// `Σ ∂p/∂v · D(v)` without reduction.
    pub fn apply_raw(&self, p: &Polynomial) -> Result<Polynomial, LndError> {
        let p = p.to_ambient(self.ring.ambient())?;
        let mut acc = self.ring.zero();
        for (i, img) in self.images.iter().enumerate() {
            if img.is_zero() || !p.uses_var(i) {
                continue;
            }
            acc = &acc + &(&p.partial(i) * img);
        }
        Ok(acc)
    }

    /// `D(p)` in normal form.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial, LndError> {
        Ok(self.ring.reduce(&self.apply_raw(p)?)?)
    }

    fn check_well_defined(&self) -> Result<(), LndError> {
        for r in self.ring.relations() {
            let nf = self.apply(r)?;
            if !nf.is_zero() {
                return Err(LndError::NotWellDefined { relation: r.to_string(), residual: nf.to_string() });
            }
        }
        Ok(())
    }

    /// Cofactor identities `D(r) = Σ c_i r_i` for every relation `r`.
    pub fn relation_certificates(&self) -> Result<Vec<MembershipCertificate>, LndError> {
        let mut out = Vec::new();
        for r in self.ring.relations() {
            let img = self.apply_raw(r)?;
            match self.ring.zero_certificate(&img)? {
                Some(c) => out.push(c),
                None => {
                    return Err(LndError::NotWellDefined {
                        relation: r.to_string(),
                        residual: self.ring.reduce(&img)?.to_string(),
                    })
                }
            }
        }
        Ok(out)
    }

    /// `f ∘ D ∘ f⁻¹` pushed through the maps, as a derivation of `forward.target()`.
    pub fn conjugate(&self, forward: &RingMap, backward: &RingMap, name: &str) -> Result<Derivation, LndError> {
        let target = forward.target();
        let mut images = BTreeMap::new();
        for i in target.base_indices() {
            let pulled = backward.apply(&target.gen(i))?;
            images.insert(target.vars()[i].clone(), forward.apply(&self.apply(&pulled)?)?);
        }
        Derivation::make(target, &images, name)
    }

    /// The default nilpotency bound `2 + deg · #generators`.
    pub fn default_bound(&self) -> u32 {
        let deg = self.images.iter().map(|p| p.total_degree()).max().unwrap_or(0);
        2 + deg * self.ring.nvars() as u32
    }
}

/// Builds a derivation (the free-function form).
pub fn make_derivation(ring: &PresentedRing, images: &BTreeMap<String, Polynomial>) -> Result<Derivation, LndError> {
    Derivation::make(ring, images, "D")
}

/// Per-generator chains `g, D(g), …, 0` of normal forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotencyCertificate {
    pub chains: Vec<(String, Vec<Polynomial>)>,
    pub bound: u32,
}

impl NilpotencyCertificate {
    /// Index of the first zero in the chain of `generator`.
    pub fn chain_length(&self, generator: &str) -> Option<usize> {
        self.chains.iter().find(|(g, _)| g == generator).map(|(_, c)| c.len() - 1)
    }

    pub fn chain(&self, generator: &str) -> Option<&[Polynomial]> {
        self.chains.iter().find(|(g, _)| g == generator).map(|(_, c)| c.as_slice())
    }

    /// Re-derives every step of every chain.
    pub fn recheck(&self, d: &Derivation) -> Result<bool, LndError> {
        for (g, chain) in &self.chains {
            if chain.first() != Some(&d.ring.var(g)?) || !chain.last().is_some_and(|p| p.is_zero()) {
                return Ok(false);
            }
            for w in chain.windows(2) {
                if !d.ring.equal(&d.apply(&w[0])?, &w[1])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Certifies local nilpotency on every ring generator.
pub fn check_locally_nilpotent(d: &Derivation, bound: Option<u32>) -> Result<NilpotencyCertificate, LndError> {
    let bound = bound.unwrap_or_else(|| d.default_bound());
    let mut chains = Vec::new();
    for (i, v) in d.ring.vars().iter().enumerate() {
        let mut chain = vec![d.ring.gen(i)];
        loop {
            let last = chain.last().unwrap();
            if last.is_zero() {
                break;
            }
            if chain.len() > bound as usize {
                return Err(LndError::BoundExceeded { generator: v.clone(), last: last.to_string() });
            }
            let next = d.apply(last)?;
            chain.push(next);
        }
        chains.push((v.clone(), chain));
    }
    Ok(NilpotencyCertificate { chains, bound })
}

pub(crate) fn factorial_inverse(k: usize) -> FieldElement {
    FieldElement::Rational(Rational::factorial(k as u32).recip().unwrap())
}

/// Images `v ↦ Σ param^k · D^k(v) / k!` in `target` (which must contain the ring variables).
pub fn exponential_images(
    cert: &NilpotencyCertificate,
    target: &PresentedRing,
    param: &Polynomial,
) -> Result<Vec<Polynomial>, LndError> {
    let mut out = Vec::new();
    for (_, chain) in &cert.chains {
        let mut acc = target.zero();
        let mut power = target.one();
        for (k, term) in chain.iter().enumerate() {
            if !term.is_zero() {
                let t = term.to_ambient(target.ambient())?;
                acc = &acc + &(&(&power * &t).scale(&factorial_inverse(k)));
            }
            power = &power * param;
        }
        out.push(target.reduce(&acc)?);
    }
    Ok(out)
}

/// The co-action `R → R[w]`.
pub fn exponential(d: &Derivation, cert: &NilpotencyCertificate, w: &str) -> Result<RingMap, LndError> {
    let target = d.ring.tensor_with_polynomial_line(w)?;
    let param = target.var(w)?;
    let images = exponential_images(cert, &target, &param)?;
    let named: BTreeMap<String, Polynomial> = d.ring.vars().iter().cloned().zip(images).collect();
    Ok(RingMap::new(&d.ring, &target, &named)?.verify()?)
}

/// Kernel membership with the normal form of `D(p)` as evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelEvidence {
    pub member: bool,
    pub evidence: Polynomial,
}

pub fn kernel_member(d: &Derivation, p: &Polynomial) -> Result<KernelEvidence, LndError> {
    let e = d.apply(p)?;
    Ok(KernelEvidence { member: e.is_zero(), evidence: e })
}

/// Certificate that the images of the generators have no common zero.
/// When the ring is a localization `k[x]_h` of a quotient and the images are
/// polynomial in the declared variables, the certificate is the saturated
/// membership `h^N ∈ (relations, D(x_i))`.
pub fn fixed_point_free(d: &Derivation) -> Result<MembershipCertificate, LndError> {
    let ring = &d.ring;
    let base = ring.base_indices();
    let polynomial_images = base.iter().all(|&i| (0..ring.nvars()).all(|j| !ring.is_inverse_var(j) || !d.images[i].uses_var(j)));
    let base_rel_ok = ring
        .base_relations()
        .iter()
        .all(|r| (0..ring.nvars()).all(|j| !ring.is_inverse_var(j) || !r.uses_var(j)));
    let mut gens: Vec<Polynomial> = ring.base_relations().to_vec();
    gens.extend(base.iter().map(|&i| d.images[i].clone()));
    if polynomial_images && base_rel_ok && !ring.inverted().is_empty() {
        let mut h = ring.one();
        for inv in ring.inverted() {
            h = &h * &inv.element;
        }
        return match membership(&ring.one(), &gens, Some(&h), 16) {
            Ok(c) => Ok(c),
            Err(GbError::NotMember(_)) => Err(LndError::NotFixedPointFree),
            Err(e) => Err(e.into()),
        };
    }
    let mut gens: Vec<Polynomial> = ring.relations().to_vec();
    gens.extend(base.iter().map(|&i| d.images[i].clone()));
    match membership(&ring.one(), &gens, None, 0) {
        Ok(c) => Ok(c),
        Err(GbError::NotMember(_)) => Err(LndError::NotFixedPointFree),
        Err(e) => Err(e.into()),
    }
}

/// Lifts `d` along `cover: base → total`, sending `forced_zero` variables to 0.
pub fn lift_through_cover(
    d: &Derivation,
    cover: &RingMap,
    forced_zero: &[&str],
) -> Result<(Derivation, NilpotencyCertificate), LndError> {
    let total = cover.target();
    let mut images = BTreeMap::new();
    for i in total.base_indices() {
        let v = &total.vars()[i];
        if forced_zero.contains(&v.as_str()) {
            images.insert(v.clone(), total.zero());
            continue;
        }
        let gen = total.gen(i);
        let src = d
            .ring
            .vars()
            .iter()
            .position(|s| cover.images()[d.ring.ambient().index_of(s).unwrap()] == gen)
            .ok_or_else(|| LndError::Precondition(format!("`{v}` is not the image of a base variable")))?;
        images.insert(v.clone(), cover.apply(&d.images[src])?);
    }
    let lifted = Derivation::make(total, &images, d.name())?;
    let cert = check_locally_nilpotent(&lifted, None)?;
    Ok((lifted, cert))
}

/// Checks `σ ∘ D = D ∘ σ` on generators for a monomial action.
pub fn derivation_equivariance(d: &Derivation, act: &MonomialGroupAction) -> Result<(), LndError> {
    let sigma = act.sigma(&d.ring);
    for (i, v) in d.ring.vars().iter().enumerate() {
        let left = sigma.apply_raw(&d.images[i])?;
        let right = d.apply_raw(&sigma.images()[i])?;
        let nf = d.ring.reduce(&(&left - &right))?;
        if !nf.is_zero() {
            return Err(RingError::NotEquivariant { generator: v.clone(), residual: nf.to_string() }.into());
        }
    }
    Ok(())
}

/// JSON description of a derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationFile {
    pub ring: RingFile,
    pub images: BTreeMap<String, String>,
}

impl DerivationFile {
    pub fn to_derivation(&self) -> Result<Derivation, LndError> {
        let ring = self.ring.to_ring()?;
        let mut images = BTreeMap::new();
        for (v, s) in &self.images {
            images.insert(v.clone(), ring.parse(s)?);
        }
        Derivation::make(&ring, &images, "D")
    }

    pub fn from_derivation(d: &Derivation) -> Self {
        DerivationFile {
            ring: RingFile::from_ring(&d.ring),
            images: d
                .ring
                .base_indices()
                .into_iter()
                .map(|i| (d.ring.vars()[i].clone(), d.images[i].to_string()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests;
