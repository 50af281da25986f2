use std::collections::BTreeMap;

use crate::coeff::root_of_unity;
use crate::gb::{membership, GbError, MembershipCertificate};
use crate::lnd::{check_locally_nilpotent, kernel_member, Derivation, LndError, NilpotencyCertificate};
use crate::poly::Polynomial;
use crate::ring::{IsoCertificate, PresentedRing};

use super::TorsorError;

/// Charts `h_η ≠ 0` with `h_η = Π_{ε ≠ η} (Y − ε)`, one per `η ∈ μ_l`.
#[derive(Clone, Debug)]
pub struct ChartCover {
    pub base: PresentedRing,
    pub var: String,
    pub order: u32,
    /// `η = ζ^k` is recorded as `k`.
    pub labels: Vec<u32>,
    pub localizers: Vec<Polynomial>,
    /// `1 ∈ (h_η) + relations`.
    pub certificate: MembershipCertificate,
}

impl ChartCover {
    pub fn new(base: &PresentedRing, var: &str, l: u32) -> Result<Self, TorsorError> {
        let y = base.var(var)?;
        let a = base.ambient();
        let labels: Vec<u32> = (0..l).collect();
        let mut localizers = Vec::new();
        for &eta in &labels {
            let mut h = base.one();
            for &eps in &labels {
                if eps != eta {
                    h = &h * &(&y - &Polynomial::constant(a, root_of_unity(l, eps as i64)));
                }
            }
            localizers.push(h);
        }
        let mut gens = localizers.clone();
        gens.extend(base.relations().iter().cloned());
        let certificate = match membership(&base.one(), &gens, None, 0) {
            Ok(c) => c,
            Err(GbError::NotMember(_)) => return Err(TorsorError::Precondition("charts do not cover".into())),
            Err(e) => return Err(e.into()),
        };
        Ok(ChartCover { base: base.clone(), var: var.to_string(), order: l, labels, localizers, certificate })
    }

    /// The chart `base[1/h_η]`.
    pub fn chart(&self, k: usize) -> Result<PresentedRing, TorsorError> {
        let name = crate::gb::fresh_name(self.base.ambient(), &format!("h{k}_inv"));
        Ok(self.base.localize(&[(self.localizers[k].clone(), name)])?)
    }
}

/// `φ ∘ D ∘ φ⁻¹` on the target of `iso`, with nilpotency re-certified.
pub fn transport_derivation(
    iso: &IsoCertificate,
    d: &Derivation,
    name: &str,
) -> Result<(Derivation, NilpotencyCertificate), TorsorError> {
    if d.ring().vars() != iso.forward.source().vars() {
        return Err(TorsorError::Precondition("derivation lives on another ring".into()));
    }
    let moved = d.conjugate(&iso.forward, &iso.backward, name)?;
    let cert = check_locally_nilpotent(&moved, None)?;
    Ok((moved, cert))
}

/// `f^N·D` restricted to the ring with `f` no longer inverted.
#[derive(Clone, Debug)]
pub struct Cleared {
    pub derivation: Derivation,
    pub exponent: u32,
}

/// Finds the least `N ≤ max_exponent` such that `f^N·D` maps every declared
/// variable to an element free of the inverse of `f`.
pub fn clear_denominators(d: &Derivation, f: &Polynomial, max_exponent: u32) -> Result<Cleared, TorsorError> {
    let ring = d.ring();
    let f = f.to_ambient(ring.ambient())?;
    let inv = ring
        .inverted()
        .iter()
        .find(|i| i.element == f)
        .ok_or_else(|| TorsorError::Precondition(format!("`{f}` is not inverted")))?
        .clone();
    if !kernel_member(d, &f)?.member {
        return Err(TorsorError::Precondition(format!("`{f}` is not in the kernel")));
    }
    let pairs: Vec<(Polynomial, String)> =
        ring.inverted_pairs().into_iter().filter(|(g, _)| *g != f).collect();
    let plain = PresentedRing::present_named(&ring.base_vars(), ring.base_relations(), &pairs, ring.field())?;
    let mut fpow = ring.one();
    for n in 0..=max_exponent {
        let images: Vec<Polynomial> = ring
            .base_indices()
            .into_iter()
            .map(|i| ring.reduce(&(&fpow * &d.images()[i])))
            .collect::<Result<_, _>>()?;
        if images.iter().all(|p| !p.uses_var(inv.var)) {
            let mut named = BTreeMap::new();
            for (v, p) in ring.base_vars().into_iter().zip(images) {
                named.insert(v, p.to_ambient(plain.ambient())?);
            }
            let derivation = Derivation::make(&plain, &named, d.name())?;
            if !kernel_member(&derivation, &f.to_ambient(plain.ambient())?)?.member {
                return Err(LndError::Precondition("f left the kernel".into()).into());
            }
            return Ok(Cleared { derivation, exponent: n });
        }
        fpow = &fpow * &f;
    }
    Err(TorsorError::NotClearable(max_exponent))
}
