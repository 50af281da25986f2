use std::collections::BTreeMap;

use crate::gb::MembershipCertificate;
use crate::poly::{PolyError, Polynomial};

use super::{PresentedRing, RingError};

/// A homomorphism given by the images of all source variables.
#[derive(Clone, Debug)]
pub struct RingMap {
    source: PresentedRing,
    target: PresentedRing,
    images: Vec<Polynomial>,
    verified: bool,
}

impl RingMap {
    /// Builds a map from named images. Images of inverse variables may be
    /// omitted; they are then computed as inverses in the target.
    pub fn new(
        source: &PresentedRing,
        target: &PresentedRing,
        images: &BTreeMap<String, Polynomial>,
    ) -> Result<Self, RingError> {
        let mut out: Vec<Polynomial> = Vec::with_capacity(source.nvars());
        for (i, v) in source.vars().iter().enumerate() {
            if let Some(img) = images.get(v) {
                out.push(target.reduce(&img.to_ambient(target.ambient())?)?);
                continue;
            }
            let Some(inv) = source.inverse_of_var(i) else {
                return Err(PolyError::MissingImage(v.clone()).into());
            };
            let partial: Vec<Polynomial> = out
                .iter()
                .cloned()
                .chain((out.len()..source.nvars()).map(|_| target.zero()))
                .collect();
            if (out.len()..source.nvars()).any(|j| inv.element.uses_var(j)) {
                return Err(PolyError::MissingImage(v.clone()).into());
            }
            let fi = inv.element.substitute(&partial, target.ambient())?;
            match target.inverse(&fi)? {
                Some(w) => out.push(w),
                None => {
                    return Err(RingError::RelationNotPreserved {
                        relation: source.relations()[source.base_relations().len() + source.inverted().iter().position(|x| x.var == i).unwrap()].to_string(),
                        residual: format!("image of `{}` is not a unit", inv.element),
                    })
                }
            }
        }
        Ok(RingMap { source: source.clone(), target: target.clone(), images: out, verified: false })
    }

    /// Convenience constructor from image strings in the target grammar.
    pub fn from_strings(source: &PresentedRing, target: &PresentedRing, images: &[(&str, &str)]) -> Result<Self, RingError> {
        let mut m = BTreeMap::new();
        for (v, img) in images {
            m.insert(v.to_string(), target.parse(img)?);
        }
        Self::new(source, target, &m)
    }

    pub fn identity(ring: &PresentedRing) -> Self {
        let images = (0..ring.nvars()).map(|i| ring.gen(i)).collect();
        RingMap { source: ring.clone(), target: ring.clone(), images, verified: true }
    }

    pub fn source(&self) -> &PresentedRing {
        &self.source
    }

    pub fn target(&self) -> &PresentedRing {
        &self.target
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn image_of(&self, var: &str) -> Option<&Polynomial> {
        self.source.ambient().index_of(var).map(|i| &self.images[i])
    }

    pub fn named_images(&self) -> BTreeMap<String, Polynomial> {
        self.source.vars().iter().cloned().zip(self.images.iter().cloned()).collect()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Substitution without reduction.
    pub fn apply_raw(&self, p: &Polynomial) -> Result<Polynomial, RingError> {
        let p = p.to_ambient(self.source.ambient())?;
        Ok(p.substitute(&self.images, self.target.ambient())?)
    }

    /// Image in normal form.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial, RingError> {
        self.target.reduce(&self.apply_raw(p)?)
    }

    /// Checks that every source relation maps into the target relation ideal.
    pub fn verify(mut self) -> Result<Self, RingError> {
        for r in self.source.relations() {
            let nf = self.apply(r)?;
            if !nf.is_zero() {
                return Err(RingError::RelationNotPreserved { relation: r.to_string(), residual: nf.to_string() });
            }
        }
        self.verified = true;
        Ok(self)
    }

    /// Cofactor identities `f(r) = Σ c_i s_i` for every source relation `r`.
    pub fn relation_certificates(&self) -> Result<Vec<MembershipCertificate>, RingError> {
        let mut out = Vec::new();
        for r in self.source.relations() {
            let img = self.apply_raw(r)?;
            match self.target.zero_certificate(&img)? {
                Some(c) => out.push(c),
                None => {
                    let nf = self.target.reduce(&img)?;
                    return Err(RingError::RelationNotPreserved { relation: r.to_string(), residual: nf.to_string() });
                }
            }
        }
        Ok(out)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &RingMap) -> Result<RingMap, RingError> {
        let images = self.images.iter().map(|p| g.apply(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(RingMap {
            source: self.source.clone(),
            target: g.target.clone(),
            images,
            verified: self.verified && g.verified,
        })
    }

    /// Replaces the images (kept unverified).
    pub fn with_images(&self, images: Vec<Polynomial>) -> RingMap {
        RingMap { source: self.source.clone(), target: self.target.clone(), images, verified: false }
    }
}

/// Verifies a ring map.
pub fn verify_map(f: RingMap) -> Result<RingMap, RingError> {
    f.verify()
}

/// Evidence that two verified maps are mutually inverse.
#[derive(Clone, Debug)]
pub struct IsoCertificate {
    pub forward: RingMap,
    pub backward: RingMap,
    /// `backward(forward(v)) − v` before reduction, per source generator.
    pub source_round_trip: Vec<(String, Polynomial)>,
    /// `forward(backward(v)) − v` before reduction, per target generator.
    pub target_round_trip: Vec<(String, Polynomial)>,
}

impl IsoCertificate {
    /// Cofactor identities for every round-trip residual, source side first.
    pub fn identities(&self) -> Result<Vec<MembershipCertificate>, RingError> {
        let mut out = Vec::new();
        for (ring, list) in [(self.forward.source(), &self.source_round_trip), (self.forward.target(), &self.target_round_trip)] {
            for (g, r) in list {
                match ring.zero_certificate(r)? {
                    Some(c) => out.push(c),
                    None => {
                        return Err(RingError::NotInverse { generator: g.clone(), residual: ring.reduce(r)?.to_string() })
                    }
                }
            }
        }
        Ok(out)
    }

    /// Checks the round trip on an arbitrary source element.
    pub fn round_trip_element(&self, p: &Polynomial) -> Result<bool, RingError> {
        let there = self.forward.apply(p)?;
        let back = self.backward.apply(&there)?;
        self.forward.source().equal(&back, p)
    }

    pub fn inverse(&self) -> IsoCertificate {
        IsoCertificate {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            source_round_trip: self.target_round_trip.clone(),
            target_round_trip: self.source_round_trip.clone(),
        }
    }
}

fn round_trip(f: &RingMap, g: &RingMap) -> Result<Vec<(String, Polynomial)>, RingError> {
    let src = f.source();
    let mut out = Vec::new();
    for (i, v) in src.vars().iter().enumerate() {
        let back = g.apply_raw(&f.apply(&src.gen(i))?)?;
        let residual = &back - &src.gen(i);
        let nf = src.reduce(&residual)?;
        if !nf.is_zero() {
            return Err(RingError::NotInverse { generator: v.clone(), residual: nf.to_string() });
        }
        out.push((v.clone(), residual));
    }
    Ok(out)
}

/// Certifies that `forward` and `backward` are mutually inverse isomorphisms.
pub fn verify_iso(forward: &RingMap, backward: &RingMap) -> Result<IsoCertificate, RingError> {
    let forward = if forward.is_verified() { forward.clone() } else { forward.clone().verify()? };
    let backward = if backward.is_verified() { backward.clone() } else { backward.clone().verify()? };
    if forward.source().vars() != backward.target().vars() || forward.target().vars() != backward.source().vars() {
        return Err(RingError::Invalid("maps do not run in opposite directions".into()));
    }
    let source_round_trip = round_trip(&forward, &backward)?;
    let target_round_trip = round_trip(&backward, &forward)?;
    Ok(IsoCertificate { forward, backward, source_round_trip, target_round_trip })
}
