//! Re-checkable evidence embedded in reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::gb::{CertificateRecord, MembershipCertificate};
use crate::lnd::{check_locally_nilpotent, derivation_equivariance, Derivation, DerivationFile, NilpotencyCertificate};
use crate::poly::{Ambient, Polynomial};
use crate::ring::{verify_iso, FieldSpec, IsoCertificate, MapFile, MonomialGroupAction, RingFile, RingMap};

use super::LabError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `saturating^exponent · target = Σ combiners·generators`, by expansion.
    Membership { field: FieldSpec, record: CertificateRecord },
    /// `lhs = rhs` in the ring.
    Equality { ring: RingFile, lhs: String, rhs: String },
    /// The images respect every relation.
    Derivation { derivation: DerivationFile },
    /// Chains `g, D(g), …, 0` for every generator.
    Nilpotent { derivation: DerivationFile, chains: BTreeMap<String, Vec<String>> },
    /// `D(element) = 0`.
    Kernel { derivation: DerivationFile, element: String },
    /// `D(element)` equals the nonzero `evidence`.
    NotInKernel { derivation: DerivationFile, element: String, evidence: String },
    /// `D(element) = 1`.
    Slice { derivation: DerivationFile, element: String },
    /// The images respect every relation.
    Map { map: MapFile },
    /// Mutually inverse maps, with a cofactor identity per round-trip residual.
    Iso { forward: MapFile, backward: MapFile, identities: Vec<Certificate> },
    /// `σ ∘ D = D ∘ σ` for the monomial action.
    Equivariant { derivation: DerivationFile, order: u32, weights: BTreeMap<String, i64> },
    /// `target(map(v)) = map(source(v))` for every source generator.
    Intertwines { map: MapFile, source: DerivationFile, target: DerivationFile },
    /// `factor · original(v) = cleared(v)` for every variable of `cleared`.
    Cleared { original: DerivationFile, cleared: DerivationFile, factor: String },
    /// `lift2 ∘ down = up ∘ lift1` on generators.
    Square { down: MapFile, lift1: MapFile, lift2: MapFile, up: MapFile },
    /// Rests on a result outside the tool.
    Citation { statement: String },
    All { parts: Vec<Certificate> },
}

impl Certificate {
    pub fn membership(c: &MembershipCertificate) -> Certificate {
        Certificate::Membership { field: FieldSpec::from_field(c.target.field()), record: c.to_record() }
    }

    pub fn equality(ring: &crate::ring::PresentedRing, lhs: &Polynomial, rhs: &Polynomial) -> Certificate {
        Certificate::Equality { ring: RingFile::from_ring(ring), lhs: lhs.to_string(), rhs: rhs.to_string() }
    }

    pub fn derivation(d: &Derivation) -> Certificate {
        Certificate::Derivation { derivation: DerivationFile::from_derivation(d) }
    }

    pub fn nilpotent(d: &Derivation, cert: &NilpotencyCertificate) -> Certificate {
        let chains = cert
            .chains
            .iter()
            .filter(|(g, _)| d.ring().base_vars().contains(g))
            .map(|(g, c)| (g.clone(), c.iter().map(|p| p.to_string()).collect()))
            .collect();
        Certificate::Nilpotent { derivation: DerivationFile::from_derivation(d), chains }
    }

    pub fn kernel(d: &Derivation, p: &Polynomial) -> Certificate {
        Certificate::Kernel { derivation: DerivationFile::from_derivation(d), element: p.to_string() }
    }

    pub fn slice(d: &Derivation, s: &Polynomial) -> Certificate {
        Certificate::Slice { derivation: DerivationFile::from_derivation(d), element: s.to_string() }
    }

    pub fn map(f: &RingMap) -> Certificate {
        Certificate::Map { map: MapFile::from_map(f) }
    }

    pub fn iso(c: &IsoCertificate) -> Result<Certificate, LabError> {
        Ok(Certificate::Iso {
            forward: MapFile::from_map(&c.forward),
            backward: MapFile::from_map(&c.backward),
            identities: c.identities()?.iter().map(Certificate::membership).collect(),
        })
    }

    pub fn equivariant(d: &Derivation, act: &MonomialGroupAction) -> Certificate {
        let weights = d
            .ring()
            .base_indices()
            .into_iter()
            .map(|i| (d.ring().vars()[i].clone(), act.weights()[i]))
            .collect();
        Certificate::Equivariant { derivation: DerivationFile::from_derivation(d), order: act.order(), weights }
    }

    pub fn intertwines(f: &RingMap, source: &Derivation, target: &Derivation) -> Certificate {
        Certificate::Intertwines {
            map: MapFile::from_map(f),
            source: DerivationFile::from_derivation(source),
            target: DerivationFile::from_derivation(target),
        }
    }

    pub fn all(parts: Vec<Certificate>) -> Certificate {
        Certificate::All { parts }
    }

    /// Re-derives the evidence. Rings are re-presented, nothing is searched.
    pub fn recheck(&self) -> Result<bool, LabError> {
        match self {
            Certificate::Membership { field, record } => {
                let field = field.to_field()?;
                let a = Ambient::grevlex(&record.vars);
                let p = |s: &str| Polynomial::parse(s, &a, field);
                let cert = MembershipCertificate {
                    target: p(&record.target)?,
                    generators: record.generators.iter().map(|g| p(g)).collect::<Result<_, _>>()?,
                    saturating: record.saturating.as_deref().map(p).transpose()?,
                    exponent: record.exponent,
                    combiners: record.combiners.iter().map(|g| p(g)).collect::<Result<_, _>>()?,
                };
                Ok(cert.recheck())
            }
            Certificate::Equality { ring, lhs, rhs } => {
                let r = ring.to_ring()?;
                Ok(r.equal(&r.parse(lhs)?, &r.parse(rhs)?)?)
            }
            Certificate::Derivation { derivation } => {
                derivation.to_derivation()?;
                Ok(true)
            }
            Certificate::Nilpotent { derivation, chains } => {
                let d = derivation.to_derivation()?;
                let r = d.ring();
                for v in r.base_vars() {
                    let Some(chain) = chains.get(&v) else { return Ok(false) };
                    let chain: Vec<Polynomial> = chain.iter().map(|s| r.parse(s)).collect::<Result<_, _>>()?;
                    if chain.first() != Some(&r.var(&v)?) || !chain.last().is_some_and(|p| p.is_zero()) {
                        return Ok(false);
                    }
                    for w in chain.windows(2) {
                        if !r.equal(&d.apply(&w[0])?, &w[1])? {
                            return Ok(false);
                        }
                    }
                }
                // inverse variables follow from the base chains
                Ok(check_locally_nilpotent(&d, None).is_ok())
            }
            Certificate::Kernel { derivation, element } => {
                let d = derivation.to_derivation()?;
                let p = d.ring().parse(element)?;
                Ok(d.ring().is_zero(&d.apply(&p)?)?)
            }
            Certificate::NotInKernel { derivation, element, evidence } => {
                let d = derivation.to_derivation()?;
                let r = d.ring();
                let ev = r.parse(evidence)?;
                Ok(!r.is_zero(&ev)? && r.equal(&d.apply(&r.parse(element)?)?, &ev)?)
            }
            Certificate::Slice { derivation, element } => {
                let d = derivation.to_derivation()?;
                let r = d.ring();
                Ok(r.equal(&d.apply(&r.parse(element)?)?, &r.one())?)
            }
            Certificate::Map { map } => {
                map.to_map()?.verify()?;
                Ok(true)
            }
            Certificate::Iso { forward, backward, identities } => {
                verify_iso(&forward.to_map()?, &backward.to_map()?)?;
                for c in identities {
                    if !c.recheck()? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Certificate::Equivariant { derivation, order, weights } => {
                let d = derivation.to_derivation()?;
                let list: Vec<(&str, i64)> = weights.iter().map(|(v, w)| (v.as_str(), *w)).collect();
                let act = MonomialGroupAction::new(d.ring(), *order, &list)?;
                act.verify(d.ring())?;
                derivation_equivariance(&d, &act)?;
                Ok(true)
            }
            Certificate::Intertwines { map, source, target } => {
                let f = map.to_map()?.verify()?;
                let ds = rebase(&source.to_derivation()?, f.source())?;
                let dt = rebase(&target.to_derivation()?, f.target())?;
                let tr = f.target();
                for i in f.source().base_indices() {
                    let g = f.source().gen(i);
                    let left = dt.apply(&f.apply(&g)?)?;
                    let right = f.apply(&ds.apply(&g)?)?;
                    if !tr.equal(&left, &right)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Certificate::Cleared { original, cleared, factor } => {
                let o = original.to_derivation()?;
                let c = cleared.to_derivation()?;
                let r = o.ring();
                let f = r.parse(factor)?;
                for v in c.ring().base_vars() {
                    let left = &f * &o.apply(&r.var(&v)?)?;
                    let right = c.apply(&c.ring().var(&v)?)?.to_ambient(r.ambient())?;
                    if !r.equal(&left, &right)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Certificate::Square { down, lift1, lift2, up } => {
                let (down, lift1, lift2, up) = (down.to_map()?, lift1.to_map()?, lift2.to_map()?, up.to_map()?);
                let target = up.target();
                for i in 0..lift1.source().nvars() {
                    let g = lift1.source().gen(i);
                    let g_down = down.apply(&down.source().var(&lift1.source().vars()[i])?)?;
                    let left = lift2.apply(&g_down.to_ambient(lift2.source().ambient())?)?;
                    let right = up.apply(&lift1.apply(&g)?.to_ambient(up.source().ambient())?)?;
                    if !target.equal(&left.to_ambient(target.ambient())?, &right)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Certificate::Citation { .. } => Ok(true),
            Certificate::All { parts } => {
                for p in parts {
                    if !p.recheck()? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// The same derivation on `ring`, whose variables may be listed in another order.
fn rebase(d: &Derivation, ring: &crate::ring::PresentedRing) -> Result<Derivation, LabError> {
    let mut images = BTreeMap::new();
    for i in d.ring().base_indices() {
        let v = &d.ring().vars()[i];
        images.insert(v.clone(), d.images()[i].to_ambient(ring.ambient())?);
    }
    Ok(Derivation::make(ring, &images, d.name())?)
}
