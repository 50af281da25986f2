use std::collections::BTreeMap;

use crate::coeff::{root_of_unity, Field};
use crate::gb::GraphIdeal;
use crate::poly::{Ambient, Monomial, Polynomial};

use super::{PresentedRing, RingError, RingMap};

/// μ_l acting by `ε·v = ε^{k_v}·v` on each ring variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialGroupAction {
    order: u32,
    weights: Vec<i64>,
}

impl MonomialGroupAction {
    /// Weights for base variables; unspecified ones are 0. Weights of inverse
    /// variables are derived from their (twist-homogeneous) elements.
    pub fn new(ring: &PresentedRing, order: u32, weights: &[(&str, i64)]) -> Result<Self, RingError> {
        if order == 0 {
            return Err(RingError::Invalid("group order must be positive".into()));
        }
        let l = order as i64;
        let mut w = vec![0i64; ring.nvars()];
        for (name, k) in weights {
            let i = ring
                .ambient()
                .index_of(name)
                .ok_or_else(|| RingError::Invalid(format!("unknown variable `{name}`")))?;
            w[i] = k.rem_euclid(l);
        }
        let mut act = MonomialGroupAction { order, weights: w };
        for inv in ring.inverted() {
            if weights.iter().any(|(n, _)| *n == ring.vars()[inv.var]) {
                continue;
            }
            let twists: Vec<i64> = inv.element.terms().iter().map(|t| act.twist(&t.mono)).collect();
            if twists.windows(2).any(|p| p[0] != p[1]) {
                return Err(RingError::Invalid(format!("inverted element `{}` is not twist-homogeneous", inv.element)));
            }
            act.weights[inv.var] = (-twists.first().copied().unwrap_or(0)).rem_euclid(l);
        }
        Ok(act)
    }

    pub fn trivial(ring: &PresentedRing, order: u32) -> Self {
        MonomialGroupAction { order, weights: vec![0; ring.nvars()] }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Total twist of a monomial, in `[0, l)`.
    pub fn twist(&self, m: &Monomial) -> i64 {
        m.exponents().iter().zip(&self.weights).map(|(&e, &k)| e as i64 * k).sum::<i64>().rem_euclid(self.order as i64)
    }

    pub fn field(&self) -> Field {
        Field::cyclotomic(self.order)
    }

    /// The automorphism σ_ζ for the generator ζ = ζ_l.
    pub fn sigma(&self, ring: &PresentedRing) -> RingMap {
        let images = (0..ring.nvars())
            .map(|i| ring.gen(i).scale(&root_of_unity(self.order, self.weights[i])))
            .collect();
        RingMap::identity(ring).with_images(images)
    }

    /// Checks that σ_ζ preserves the relation ideal.
    pub fn verify(&self, ring: &PresentedRing) -> Result<(), RingError> {
        if self.weights.len() != ring.nvars() {
            return Err(RingError::Invalid("weight vector does not match the ring".into()));
        }
        self.sigma(ring).verify().map(|_| ())
    }

    /// Whether `p` is fixed by σ_ζ in the ring.
    pub fn is_invariant(&self, ring: &PresentedRing, p: &Polynomial) -> Result<bool, RingError> {
        let moved = self.sigma(ring).apply_raw(p)?;
        ring.equal(&moved, p)
    }
}

/// Checks `σ_t ∘ f = f ∘ σ_s` on all source generators.
pub fn equivariance_check(
    f: &RingMap,
    act_source: &MonomialGroupAction,
    act_target: &MonomialGroupAction,
) -> Result<(), RingError> {
    let ss = act_source.sigma(f.source());
    let st = act_target.sigma(f.target());
    for (i, v) in f.source().vars().iter().enumerate() {
        let g = f.source().gen(i);
        let left = st.apply_raw(&f.apply(&g)?)?;
        let right = f.apply_raw(&ss.apply(&g)?)?;
        let nf = f.target().reduce(&(&left - &right))?;
        if !nf.is_zero() {
            return Err(RingError::NotEquivariant { generator: v.clone(), residual: nf.to_string() });
        }
    }
    Ok(())
}

/// Generators of the invariant subring, its presentation and the inclusion.
#[derive(Clone, Debug)]
pub struct InvariantSubring {
    pub generators: Vec<Polynomial>,
    pub presentation: PresentedRing,
    pub inclusion: RingMap,
}

fn in_subalgebra(ring: &PresentedRing, gens: &[Polynomial], p: &Polynomial) -> Result<bool, RingError> {
    if p.is_constant() {
        return Ok(true);
    }
    if gens.is_empty() {
        return Ok(false);
    }
    let names: Vec<String> = (1..=gens.len()).map(|i| format!("g{i}")).collect();
    let src = Ambient::grevlex(&names);
    let graph = GraphIdeal::new(&src, gens, ring.ambient(), ring.relations())?;
    match graph.preimage(p) {
        Ok(_) => Ok(true),
        Err(crate::gb::GbError::NoPreimage(_)) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// Invariant subring of a monomial action, generated by twist-zero monomials
/// of degree at most `degree_bound`.
pub fn invariant_subring(
    ring: &PresentedRing,
    act: &MonomialGroupAction,
    degree_bound: u32,
) -> Result<InvariantSubring, RingError> {
    if degree_bound < act.order() {
        return Err(RingError::BoundTooSmall { bound: degree_bound, needed: act.order() });
    }
    act.verify(ring)?;
    let n = ring.nvars();
    let mut kept: Vec<Polynomial> = Vec::new();
    for deg in 1..=degree_bound {
        let mut cands: Vec<Monomial> = Monomial::all_of_degree(n, deg)
            .into_iter()
            .filter(|m| act.twist(m) == 0)
            .collect();
        let ninv = |m: &Monomial| (0..n).filter(|&i| ring.is_inverse_var(i)).map(|i| m.exponent(i)).sum::<u32>();
        cands.sort_by(|a, b| ninv(a).cmp(&ninv(b)).then_with(|| ring.ambient().order().cmp(b, a)));
        for m in cands {
            let p = ring.reduce(&Polynomial::monomial(ring.ambient(), crate::coeff::FieldElement::one(), m))?;
            if !in_subalgebra(ring, &kept, &p)? {
                kept.push(p);
            }
        }
    }
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        let others: Vec<Polynomial> = kept.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
        if in_subalgebra(ring, &others, &kept[i])? {
            kept.remove(i);
        }
    }
    let names: Vec<String> = (1..=kept.len()).map(|i| format!("g{i}")).collect();
    let src = Ambient::grevlex(&names);
    let graph = GraphIdeal::new(&src, &kept, ring.ambient(), ring.relations())?;
    let presentation = PresentedRing::present_named(&names, &graph.kernel(), &[], ring.field())?;
    let images: BTreeMap<String, Polynomial> = names.iter().cloned().zip(kept.iter().cloned()).collect();
    let inclusion = RingMap::new(&presentation, ring, &images)?.verify()?;
    Ok(InvariantSubring { generators: kept, presentation, inclusion })
}

#[cfg(test)]
pub(crate) fn in_subalgebra_for_tests(ring: &PresentedRing, gens: &[Polynomial], p: &Polynomial) -> bool {
    in_subalgebra(ring, gens, p).unwrap()
}
