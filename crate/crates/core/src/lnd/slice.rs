use std::collections::{BTreeMap, HashMap};

use crate::coeff::FieldElement;
use crate::gb::par_map;
use crate::linalg::{solve_sparse, SparseRow};
use crate::poly::{Monomial, MonomialOrder, Polynomial};
use crate::ring::{verify_iso, IsoCertificate, MonomialGroupAction, PresentedRing, RingMap};

use super::{check_locally_nilpotent, factorial_inverse, Derivation, LndError};

/// Where to look for a slice.
#[derive(Clone, Debug)]
pub struct SliceSearch {
    pub degree_bound: u32,
    /// Only twist-zero monomials are tried.
    pub action: Option<MonomialGroupAction>,
    /// Only monomials in these variables are tried; all ring variables when `None`.
    pub variables: Option<Vec<String>>,
}

impl SliceSearch {
    pub fn up_to(degree_bound: u32) -> Self {
        SliceSearch { degree_bound, action: None, variables: None }
    }

    pub fn invariant(mut self, act: &MonomialGroupAction) -> Self {
        self.action = Some(act.clone());
        self
    }

    pub fn in_variables(mut self, vars: &[&str]) -> Self {
        self.variables = Some(vars.iter().map(|v| v.to_string()).collect());
        self
    }
}

/// An element `s` with `D(s) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub element: Polynomial,
    /// Normal form of `D(s) − 1`; always zero.
    pub evidence: Polynomial,
    pub degree: u32,
}

impl Slice {
    /// Checks a candidate element directly.
    pub fn certify(d: &Derivation, s: &Polynomial) -> Result<Slice, LndError> {
        let s = d.ring().reduce(s)?;
        let evidence = d.ring().reduce(&(&d.apply(&s)? - &d.ring().one()))?;
        if !evidence.is_zero() {
            return Err(LndError::Precondition(format!("D({s}) − 1 reduces to `{evidence}`")));
        }
        let degree = s.total_degree();
        Ok(Slice { element: s, evidence, degree })
    }

    pub fn recheck(&self, d: &Derivation) -> Result<bool, LndError> {
        Ok(d.ring().equal(&d.apply(&self.element)?, &d.ring().one())?)
    }
}

fn candidates(d: &Derivation, search: &SliceSearch, deg: u32) -> Result<Vec<Monomial>, LndError> {
    let ring = d.ring();
    let n = ring.nvars();
    let allowed: Vec<bool> = match &search.variables {
        None => vec![true; n],
        Some(vs) => {
            let mut mask = vec![false; n];
            for v in vs {
                let i = ring.ambient().index_of(v).ok_or_else(|| crate::poly::PolyError::UnknownVariable(v.clone()))?;
                mask[i] = true;
            }
            mask
        }
    };
    let standard_only = matches!(ring.ambient().order(), MonomialOrder::Grevlex);
    let leads: Vec<&Monomial> = ring.gb().basis().iter().filter_map(|g| g.leading_monomial()).collect();
    let mut out: Vec<Monomial> = Monomial::all_of_degree(n, deg)
        .into_iter()
        .filter(|m| (0..n).all(|i| allowed[i] || m.exponent(i) == 0))
        .filter(|m| !standard_only || !leads.iter().any(|l| l.divides(m)))
        .filter(|m| search.action.as_ref().is_none_or(|a| a.twist(m) == 0))
        .collect();
    out.sort_by(|a, b| ring.ambient().order().cmp(b, a));
    Ok(out)
}

/// Searches for a slice by linear algebra on normal forms, one degree at a
/// time, so the slice returned has the least possible degree.
pub fn find_slice(d: &Derivation, search: &SliceSearch) -> Result<Slice, LndError> {
    let ring = d.ring();
    let one = Monomial::one(ring.nvars());
    let mut columns: Vec<Polynomial> = Vec::new();
    let mut images: Vec<Polynomial> = Vec::new();
    for deg in 1..=search.degree_bound {
        let new: Vec<Polynomial> = candidates(d, search, deg)?
            .into_iter()
            .map(|m| ring.reduce(&Polynomial::monomial(ring.ambient(), FieldElement::one(), m)))
            .collect::<Result<_, _>>()?;
        let new_images = par_map(&new, |p| d.apply(p));
        for (p, img) in new.into_iter().zip(new_images) {
            images.push(img?);
            columns.push(p);
        }
        // one equation per monomial occurring in some image
        let mut rows: HashMap<Monomial, SparseRow> = HashMap::new();
        rows.insert(one.clone(), SparseRow::new());
        for (j, img) in images.iter().enumerate() {
            for t in img.terms() {
                rows.entry(t.mono.clone()).or_default().insert(j, t.coeff.clone());
            }
        }
        let mut keys: Vec<Monomial> = rows.keys().cloned().collect();
        keys.sort_by(|a, b| ring.ambient().order().cmp(b, a));
        let rhs: Vec<FieldElement> =
            keys.iter().map(|m| if *m == one { FieldElement::one() } else { FieldElement::zero() }).collect();
        let sparse: Vec<SparseRow> = keys.iter().map(|m| rows.remove(m).unwrap()).collect();
        if let Some(x) = solve_sparse(sparse, rhs, columns.len()) {
            let mut s = ring.zero();
            for (c, p) in x.iter().zip(&columns) {
                if !c.is_zero() {
                    s = &s + &p.scale(c);
                }
            }
            let slice = Slice::certify(d, &s)?;
            return Ok(slice);
        }
    }
    Err(LndError::NoSliceWithinBound(search.degree_bound))
}

/// A kernel presentation `K` and a certified isomorphism `R ≅ K[w]` with `s ↦ w`.
#[derive(Clone, Debug)]
pub struct Trivialization {
    /// `π(v)` for the variables kept in `K`, as elements of `R`.
    pub kernel_gens: Vec<Polynomial>,
    pub kernel_ring: PresentedRing,
    pub cylinder: PresentedRing,
    pub iso: IsoCertificate,
    pub parameter: String,
}

impl Trivialization {
    /// The iso sends the slice to the cylinder parameter.
    pub fn slice_image(&self, s: &Slice) -> Result<Polynomial, LndError> {
        Ok(self.iso.forward.apply(&s.element)?)
    }
}

/// Trivializes `R` along a slice with the slice-evaluation map
/// `π(v) = Σ (−s)^k D^k(v) / k!`.
pub fn dixmier_trivialize(d: &Derivation, slice: &Slice, param: &str) -> Result<Trivialization, LndError> {
    let ring = d.ring();
    let s = &slice.element;
    if !slice.recheck(d)? {
        return Err(LndError::Precondition("D(s) ≠ 1".into()));
    }
    let cert = check_locally_nilpotent(d, None)?;
    let minus_s = s.neg();
    let pi = super::exponential_images(&cert, ring, &minus_s)?;

    // K₀ = R/(s): same names, relations of R plus s
    let mut rels: Vec<Polynomial> = ring.base_relations().to_vec();
    rels.push(s.clone());
    let k0 = PresentedRing::present_named(&ring.base_vars(), &rels, &ring.inverted_pairs(), ring.field())
        .map_err(|e| match e {
            crate::ring::RingError::Gb(crate::gb::GbError::ResourceBudgetExceeded(m)) => LndError::PresentationBudgetExceeded(m),
            e => e.into(),
        })?;

    // drop every variable that is the leading monomial of a basis element
    let n = k0.nvars();
    let mut subst: Vec<Polynomial> = (0..n).map(|i| k0.gen(i)).collect();
    let mut dropped = vec![false; n];
    for g in k0.gb().basis() {
        let lm = g.leading_monomial().unwrap();
        if lm.degree() == 1 {
            let i = (0..n).find(|&i| lm.exponent(i) == 1).unwrap();
            if !dropped[i] {
                dropped[i] = true;
                subst[i] = &k0.gen(i) - g;
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !dropped[i]).collect();
    let kept_names: Vec<String> = kept.iter().map(|&i| k0.vars()[i].clone()).collect();
    let kbase: Vec<String> = kept.iter().filter(|&&i| !k0.is_inverse_var(i)).map(|&i| k0.vars()[i].clone()).collect();
    let small = crate::poly::Ambient::new(&kept_names, k0.ambient().order().clone());
    let subst_small: Vec<Polynomial> =
        subst.iter().map(|p| p.to_ambient(&small)).collect::<Result<_, _>>()?;
    let push = |p: &Polynomial| p.substitute(&subst_small, &small);
    let mut krels = Vec::new();
    let mut kinv = Vec::new();
    for r in k0.base_relations() {
        krels.push(push(r)?);
    }
    for inv in k0.inverted() {
        let f = push(&inv.element)?;
        if dropped[inv.var] {
            krels.push(&(&push(&k0.gen(inv.var))? * &f) - &Polynomial::one(&small));
        } else {
            kinv.push((f, k0.vars()[inv.var].clone()));
        }
    }
    let kernel_ring = PresentedRing::present_named(&kbase, &krels, &kinv, k0.field())?;
    let param = if kernel_ring.ambient().index_of(param).is_some() {
        crate::gb::fresh_name(kernel_ring.ambient(), param)
    } else {
        param.to_string()
    };
    let cylinder = kernel_ring.tensor_with_polynomial_line(&param)?;
    let w = cylinder.var(&param)?;

    // K[w] → R: k ↦ π(k), w ↦ s
    let mut back = BTreeMap::new();
    let mut kernel_gens = Vec::new();
    for (i, v) in kernel_ring.vars().iter().enumerate() {
        let j = ring.ambient().index_of(v).unwrap();
        if !kernel_ring.is_inverse_var(i) {
            kernel_gens.push(pi[j].clone());
        }
        back.insert(v.clone(), pi[j].clone());
    }
    back.insert(param.clone(), s.clone());
    let backward = RingMap::new(&cylinder, ring, &back)?;

    // R → K[w]: v ↦ Σ w^j/j! · ψ(D^j v), ψ the substitution into K
    let psi: Vec<Polynomial> = subst_small.iter().map(|p| p.to_ambient(cylinder.ambient())).collect::<Result<_, _>>()?;
    let mut fwd = BTreeMap::new();
    for (v, chain) in &cert.chains {
        let mut acc = cylinder.zero();
        let mut power = cylinder.one();
        for (k, term) in chain.iter().enumerate() {
            if !term.is_zero() {
                let t = term.substitute(&psi, cylinder.ambient())?;
                acc = &acc + &(&power * &t).scale(&factorial_inverse(k));
            }
            power = &power * &w;
        }
        fwd.insert(v.clone(), cylinder.reduce(&acc)?);
    }
    let forward = RingMap::new(ring, &cylinder, &fwd)?;
    let iso = verify_iso(&forward, &backward)?;
    Ok(Trivialization { kernel_gens, kernel_ring, cylinder, iso, parameter: param })
}
