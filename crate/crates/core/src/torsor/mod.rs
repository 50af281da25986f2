//! Cylinder isomorphisms from two Ga-bundle structures on one carrier ring.
//!
//! The carrier is built by adjoining divided variables `m_j = (v' − q_j)/x^j`
//! to the tensor product of the two rings and saturating by `x`. It is
//! accepted only when both trivializations certify.

mod cover;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::gb::{fresh_name, membership, saturate, GbError, GraphIdeal, GroebnerBasis};
use crate::lnd::{check_locally_nilpotent, derivation_equivariance, find_slice, Derivation, LndError, Slice, SliceSearch};
use crate::poly::{Ambient, BaseOrder, MonomialOrder, PolyError, Polynomial};
use crate::ring::{equivariance_check, verify_iso, IsoCertificate, MonomialGroupAction, PresentedRing, RingError, RingMap};

pub use cover::{clear_denominators, transport_derivation, ChartCover, Cleared};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TorsorError {
    #[error("no matching function of degree at most {0}")]
    MatchingSearchExhausted(u32),
    #[error("no slice of degree at most {0}")]
    NoSliceWithinBound(u32),
    #[error("kernel element `{0}` is not in the image of the injection")]
    PreimageFailure(String),
    #[error("cannot clear denominators with exponent at most {0}")]
    NotClearable(u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{stage}: {source}")]
    Stage { stage: String, source: Box<TorsorError> },
    #[error(transparent)]
    Lnd(#[from] LndError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl TorsorError {
    pub fn at(self, stage: &str) -> TorsorError {
        TorsorError::Stage { stage: stage.to_string(), source: Box::new(self) }
    }

    /// The innermost error, with stage tags removed.
    pub fn root(&self) -> &TorsorError {
        match self {
            TorsorError::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Bounded searches that ran out are inconclusive rather than failures.
    pub fn is_bound(&self) -> bool {
        let budget = |g: &GbError| matches!(g, GbError::ResourceBudgetExceeded(_));
        match self.root() {
            TorsorError::MatchingSearchExhausted(_) | TorsorError::NoSliceWithinBound(_) => true,
            TorsorError::Lnd(LndError::NoSliceWithinBound(_) | LndError::PresentationBudgetExceeded(_)) => true,
            TorsorError::Gb(g) | TorsorError::Ring(RingError::Gb(g)) | TorsorError::Lnd(LndError::Gb(g)) => budget(g),
            TorsorError::Lnd(LndError::Ring(RingError::Gb(g))) => budget(g),
            _ => false,
        }
    }
}

trait Staged<T> {
    fn stage(self, name: &str) -> Result<T, TorsorError>;
}

impl<T, E: Into<TorsorError>> Staged<T> for Result<T, E> {
    fn stage(self, name: &str) -> Result<T, TorsorError> {
        self.map_err(|e| e.into().at(name))
    }
}

/// Search bounds for the pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub max_degree: u32,
    /// Height of the tower of divided variables; 8 when `None`.
    pub max_depth: Option<u32>,
    /// Retry a failed slice search once with twice the bound.
    pub retry: bool,
    pub param: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { max_degree: 16, max_depth: None, retry: true, param: "w".into() }
    }
}

/// How the two rings are glued.
#[derive(Clone, Debug)]
pub struct Matching {
    /// `(first-side variable, second-side variable)` pairs identified in the carrier.
    pub shared: Vec<(String, String)>,
    /// The divisor variable `x`, on the first side.
    pub divisor: String,
    /// The second-side variable `v'` matched across branches.
    pub matched: String,
    /// `q_1`, over the first side, with `v' ≡ q_1 mod x`.
    pub initial: String,
    /// Actions on the two rings, when the run must be equivariant.
    pub actions: Option<(MonomialGroupAction, MonomialGroupAction)>,
}

/// A carrier ring with two injections and two derivations:
/// `first` kills `inj1(A₁)` and `second` kills `inj2(A₂)`.
#[derive(Clone, Debug)]
pub struct BundlePair {
    pub carrier: PresentedRing,
    pub inj1: RingMap,
    pub inj2: RingMap,
    pub first: Derivation,
    pub second: Derivation,
    pub divisor: Option<String>,
    /// `(name, numerator)` with `x·name = numerator`.
    pub divided: Vec<(String, Polynomial)>,
    pub action: Option<MonomialGroupAction>,
    exhausted: Option<u32>,
}

impl BundlePair {
    /// A pair supplied by hand.
    pub fn new(inj1: RingMap, inj2: RingMap, first: Derivation, second: Derivation) -> Self {
        let carrier = inj1.target().clone();
        BundlePair { carrier, inj1, inj2, first, second, divisor: None, divided: Vec::new(), action: None, exhausted: None }
    }

    /// Each divided variable satisfies `x·m = numerator` in the carrier.
    pub fn divided_relations_hold(&self) -> Result<bool, TorsorError> {
        let Some(x) = &self.divisor else { return Ok(self.divided.is_empty()) };
        let x = self.carrier.var(x)?;
        for (name, num) in &self.divided {
            let m = self.carrier.var(name)?;
            if !self.carrier.equal(&(&x * &m), num)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A certified `A₁[w] ≅ A₂[w]`, with the pair and both trivializations.
#[derive(Clone, Debug)]
pub struct CylinderIsoCertificate {
    pub iso: IsoCertificate,
    pub pair: Option<BundlePair>,
    /// `W → A₁[w]` and back.
    pub first: Option<IsoCertificate>,
    /// `W → A₂[w]` and back.
    pub second: Option<IsoCertificate>,
    pub slices: Vec<Slice>,
}

fn rename_into(p: &Polynomial, names: &BTreeMap<String, String>, target: &Arc<Ambient>) -> Result<Polynomial, PolyError> {
    let images = p
        .ambient()
        .vars()
        .iter()
        .map(|v| Polynomial::var_named(target, names.get(v).unwrap_or(v)))
        .collect::<Result<Vec<_>, _>>()?;
    p.substitute(&images, target)
}

/// `num / x` in the ring, when `x` divides it.
fn divide(ring: &PresentedRing, num: &Polynomial, x: &Polynomial) -> Result<Option<Polynomial>, TorsorError> {
    let num = ring.reduce(num)?;
    if num.is_zero() {
        return Ok(Some(num));
    }
    let mut gens = vec![x.clone()];
    gens.extend(ring.relations().iter().cloned());
    match membership(&num, &gens, None, 0) {
        Ok(c) => Ok(Some(ring.reduce(&c.combiners[0])?)),
        Err(GbError::NotMember(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn apply_partial(p: &Polynomial, images: &BTreeMap<String, Polynomial>, ring: &PresentedRing) -> Result<Polynomial, TorsorError> {
    let p = p.to_ambient(ring.ambient())?;
    let mut acc = ring.zero();
    for (i, v) in ring.vars().iter().enumerate() {
        if !p.uses_var(i) {
            continue;
        }
        let img = images.get(v).ok_or_else(|| TorsorError::Precondition(format!("no image for `{v}`")))?;
        acc = &acc + &(&p.partial(i) * img);
    }
    Ok(ring.reduce(&acc)?)
}

struct Layout {
    first: Vec<String>,
    second: Vec<String>,
    rename: BTreeMap<String, String>,
    pairs: Vec<(String, String)>,
    field: crate::coeff::Field,
}

impl Layout {
    fn new(a1: &PresentedRing, a2: &PresentedRing, m: &Matching) -> Result<Self, TorsorError> {
        let first = a1.base_vars();
        let mut taken: Vec<String> = a1.vars().to_vec();
        let mut rename = BTreeMap::new();
        for (p, q) in &m.shared {
            if !first.contains(p) || !a2.base_vars().contains(q) {
                return Err(TorsorError::Precondition(format!("cannot share `{p}` with `{q}`")));
            }
            rename.insert(q.clone(), p.clone());
        }
        let mut second = Vec::new();
        for v in a2.base_vars() {
            if rename.contains_key(&v) {
                continue;
            }
            let name = if taken.contains(&v) { fresh_name(&Ambient::grevlex(&taken), &format!("{v}2")) } else { v.clone() };
            taken.push(name.clone());
            rename.insert(v.clone(), name.clone());
            second.push(name);
        }
        let mut pairs: Vec<(String, String)> = Vec::new();
        let names_of = |r: &PresentedRing, p: &Polynomial, map: &BTreeMap<String, String>| -> Result<String, PolyError> {
            let all: Vec<String> = r.vars().iter().map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone())).collect();
            Ok(rename_into(p, map, &Ambient::grevlex(&all))?.to_string())
        };
        let ident = BTreeMap::new();
        for (f, n) in a1.inverted_pairs() {
            pairs.push((names_of(a1, &f, &ident)?, n));
        }
        for (f, n) in a2.inverted_pairs() {
            let s = names_of(a2, &f, &rename)?;
            if let Some((_, existing)) = pairs.iter().find(|(g, _)| *g == s) {
                rename.insert(n, existing.clone());
                continue;
            }
            let name = if taken.contains(&n) { fresh_name(&Ambient::grevlex(&taken), &format!("{n}2")) } else { n.clone() };
            taken.push(name.clone());
            rename.insert(n, name.clone());
            pairs.push((s, name));
        }
        let field = a1.field().join(a2.field()).map_err(|e| TorsorError::Precondition(e.to_string()))?;
        Ok(Layout { first, second, rename, pairs, field })
    }

    fn base(&self, divided: &[(String, Polynomial)]) -> Vec<String> {
        let mut v = self.first.clone();
        v.extend(self.second.iter().cloned());
        v.extend(divided.iter().map(|(n, _)| n.clone()));
        v
    }

    fn all(&self, divided: &[(String, Polynomial)]) -> Vec<String> {
        let mut v = self.base(divided);
        v.extend(self.pairs.iter().map(|(_, n)| n.clone()));
        v
    }
}

fn next_divided_name(layout: &Layout, divided: &[(String, Polynomial)]) -> String {
    let all = layout.all(divided);
    fresh_name(&Ambient::grevlex(&all), &format!("m{}", divided.len() + 1))
}

/// Builds the carrier for a given tower of divided variables.
fn build_carrier(
    a1: &PresentedRing,
    a2: &PresentedRing,
    layout: &Layout,
    divided: &[(String, Polynomial)],
    x: &str,
    order: &MonomialOrder,
) -> Result<(PresentedRing, RingMap, RingMap), TorsorError> {
    let all = layout.all(divided);
    let amb = Ambient::new(&all, order.clone());
    let xv = Polynomial::var_named(&amb, x)?;
    let mut gens = Vec::new();
    for r in a1.base_relations() {
        gens.push(r.to_ambient(&amb)?);
    }
    for r in a2.base_relations() {
        gens.push(rename_into(r, &layout.rename, &amb)?);
    }
    for (name, num) in divided {
        gens.push(&(&xv * &Polynomial::var_named(&amb, name)?) - &num.to_ambient(&amb)?);
    }
    let mut inverse_rels = Vec::new();
    for (f, n) in &layout.pairs {
        let f = Polynomial::parse(f, &amb, layout.field)?;
        let r = &(&Polynomial::var_named(&amb, n)? * &f) - &Polynomial::one(&amb);
        inverse_rels.push(r.clone());
        gens.push(r);
    }
    let sat = saturate(&amb, &gens, &xv)?;
    let rels: Vec<Polynomial> = sat.basis().iter().filter(|g| !inverse_rels.contains(g)).cloned().collect();
    let pairs: Vec<(Polynomial, String)> = layout
        .pairs
        .iter()
        .map(|(f, n)| Ok((Polynomial::parse(f, &amb, layout.field)?, n.clone())))
        .collect::<Result<_, PolyError>>()?;
    let carrier = PresentedRing::present_named(&layout.base(divided), &rels, &pairs, layout.field)?;
    let mut im1 = BTreeMap::new();
    for v in a1.vars() {
        im1.insert(v.clone(), carrier.var(v)?);
    }
    let inj1 = RingMap::new(a1, &carrier, &im1)?.verify()?;
    let mut im2 = BTreeMap::new();
    for v in a2.vars() {
        im2.insert(v.clone(), carrier.var(&layout.rename[v])?);
    }
    let inj2 = RingMap::new(a2, &carrier, &im2)?.verify()?;
    Ok((carrier, inj1, inj2))
}

/// Extends `d` (on one side) to the carrier, killing the other side.
fn extend(
    carrier: &PresentedRing,
    d: &Derivation,
    inj: &RingMap,
    killed: &[String],
    divided: &[(String, Polynomial)],
    x: &Polynomial,
    name: &str,
) -> Result<Option<Derivation>, TorsorError> {
    let mut images: BTreeMap<String, Polynomial> = BTreeMap::new();
    for v in killed {
        images.insert(v.clone(), carrier.zero());
    }
    for i in d.ring().base_indices() {
        let v = &d.ring().vars()[i];
        let target = inj.images()[i].to_string();
        let img = inj.apply(&d.images()[i])?;
        if let Some(prev) = images.get(&target) {
            if !carrier.equal(prev, &img)? {
                return Err(TorsorError::Precondition(format!("`{v}` is shared but not killed")));
            }
        }
        images.insert(target, img);
    }
    for inv in carrier.inverted() {
        let f = &inv.element;
        let df = apply_partial(f, &images, carrier)?;
        let w = carrier.gen(inv.var);
        images.insert(carrier.vars()[inv.var].clone(), carrier.reduce(&(&(&w * &w) * &df).neg())?);
    }
    for (m, num) in divided {
        let dn = apply_partial(num, &images, carrier)?;
        match divide(carrier, &dn, x)? {
            Some(q) => {
                images.insert(m.clone(), q);
            }
            None => return Ok(None),
        }
    }
    let base: BTreeMap<String, Polynomial> =
        carrier.base_vars().into_iter().map(|v| { let p = images[&v].clone(); (v, p) }).collect();
    match Derivation::make(carrier, &base, name) {
        Ok(d) => Ok(Some(d)),
        Err(LndError::NotWellDefined { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Solves `m ≡ c mod x` with `c` over the first side, by normal form in an
/// order eliminating everything else.
fn congruence(carrier: &PresentedRing, layout: &Layout, m: &str, x: &str) -> Result<Option<Polynomial>, TorsorError> {
    let amb = carrier.ambient();
    let first_inverse: Vec<String> = layout
        .pairs
        .iter()
        .filter(|(f, _)| {
            let p = Polynomial::parse(f, amb, layout.field).unwrap();
            (0..amb.nvars()).all(|i| !p.uses_var(i) || layout.first.contains(&amb.vars()[i]))
        })
        .map(|(_, n)| n.clone())
        .collect();
    let elim: Vec<usize> = (0..amb.nvars())
        .filter(|&i| {
            let v = &amb.vars()[i];
            !layout.first.contains(v) && !first_inverse.contains(v)
        })
        .collect();
    let order = MonomialOrder::block(amb.nvars(), &elim, BaseOrder::Grevlex);
    let q = amb.with_order(order);
    let mut gens: Vec<Polynomial> = carrier.relations().iter().map(|r| r.to_ambient(&q)).collect::<Result<_, _>>()?;
    gens.push(Polynomial::var_named(&q, x)?);
    let gb = GroebnerBasis::compute(&q, &gens)?;
    let nf = gb.reduce(&Polynomial::var_named(&q, m)?)?;
    if elim.iter().any(|&i| nf.uses_var(i)) {
        return Ok(None);
    }
    Ok(Some(nf.to_ambient(amb)?))
}

fn twist_of(p: &Polynomial, known: &BTreeMap<String, i64>, l: u32) -> Result<i64, TorsorError> {
    let vars = p.ambient().vars();
    let mut out: Option<i64> = None;
    for t in p.terms() {
        let tw = t
            .mono
            .exponents()
            .iter()
            .zip(vars)
            .map(|(&e, v)| e as i64 * known.get(v).copied().unwrap_or(0))
            .sum::<i64>()
            .rem_euclid(l as i64);
        if out.is_some_and(|o| o != tw) {
            return Err(TorsorError::Precondition(format!("`{p}` is not twist-homogeneous")));
        }
        out = Some(tw);
    }
    Ok(out.unwrap_or(0))
}

fn carrier_action(
    carrier: &PresentedRing,
    a1: &PresentedRing,
    a2: &PresentedRing,
    layout: &Layout,
    m: &Matching,
    divided: &[(String, Polynomial)],
) -> Result<Option<MonomialGroupAction>, TorsorError> {
    let Some((act1, act2)) = &m.actions else { return Ok(None) };
    let l = act1.order();
    if act2.order() != l {
        return Err(TorsorError::Precondition("the two actions have different orders".into()));
    }
    let mut known: BTreeMap<String, i64> = BTreeMap::new();
    for (i, v) in a1.vars().iter().enumerate() {
        known.insert(v.clone(), act1.weights()[i]);
    }
    for (i, v) in a2.vars().iter().enumerate() {
        let name = &layout.rename[v];
        let w = act2.weights()[i];
        if known.get(name).is_some_and(|&p| p != w) {
            return Err(TorsorError::Precondition(format!("shared variable `{name}` has two weights")));
        }
        known.insert(name.clone(), w);
    }
    let xw = known.get(&m.divisor).copied().unwrap_or(0);
    for (name, num) in divided {
        let t = twist_of(num, &known, l)?;
        known.insert(name.clone(), (t - xw).rem_euclid(l as i64));
    }
    let base = carrier.base_vars();
    let list: Vec<(&str, i64)> = base.iter().map(|v| (v.as_str(), known[v])).collect();
    let act = MonomialGroupAction::new(carrier, l, &list)?;
    act.verify(carrier)?;
    Ok(Some(act))
}

/// Builds a carrier with two commuting bundle structures: `first` extends
/// `d2` and kills the first side, `second` extends `d1` and kills the second.
pub fn matched_fiber_product(
    d1: &Derivation,
    d2: &Derivation,
    m: &Matching,
    cfg: &PipelineConfig,
) -> Result<BundlePair, TorsorError> {
    let (a1, a2) = (d1.ring(), d2.ring());
    let layout = Layout::new(a1, a2, m)?;
    if !layout.first.contains(&m.divisor) {
        return Err(TorsorError::Precondition(format!("divisor `{}` is not a first-side variable", m.divisor)));
    }
    let v_prime = layout
        .rename
        .get(&m.matched)
        .cloned()
        .ok_or_else(|| TorsorError::Precondition(format!("`{}` is not a second-side variable", m.matched)))?;
    let order = a1.ambient().order().clone();
    let cap = cfg.max_depth.unwrap_or(8).max(1) as usize;

    let amb0 = Ambient::new(&layout.all(&[]), order.clone());
    let q1 = Polynomial::parse(&m.initial, a1.ambient(), layout.field)?.to_ambient(&amb0)?;
    let mut divided = vec![(next_divided_name(&layout, &[]), &Polynomial::var_named(&amb0, &v_prime)? - &q1)];
    let mut best = None;
    let mut exhausted = None;
    loop {
        let (carrier, inj1, inj2) = build_carrier(a1, a2, &layout, &divided, &m.divisor, &order)?;
        let xv = carrier.var(&m.divisor)?;
        let e1 = extend(&carrier, d2, &inj2, &layout.first, &divided, &xv, "E1")?;
        let e2 = extend(&carrier, d1, &inj1, &layout.second, &divided, &xv, "E2")?;
        match (e1, e2) {
            (Some(e1), Some(e2)) => best = Some((carrier.clone(), inj1, inj2, e1, e2, divided.clone())),
            _ => break,
        }
        if divided.len() >= cap {
            break;
        }
        let last = divided.last().unwrap().0.clone();
        match congruence(&carrier, &layout, &last, &m.divisor)? {
            Some(c) if c.total_degree() <= cfg.max_degree => {
                let name = next_divided_name(&layout, &divided);
                divided.push((name, &carrier.var(&last)? - &c));
            }
            _ => {
                exhausted = Some(cfg.max_degree);
                break;
            }
        }
    }
    let Some((carrier, inj1, inj2, first, second, divided)) = best else {
        return Err(TorsorError::Precondition("the derivations do not extend to the carrier".into()));
    };
    check_locally_nilpotent(&first, None)?;
    check_locally_nilpotent(&second, None)?;
    let action = carrier_action(&carrier, a1, a2, &layout, m, &divided)?;
    if let (Some(act), Some((act1, act2))) = (&action, &m.actions) {
        equivariance_check(&inj1, act1, act)?;
        equivariance_check(&inj2, act2, act)?;
        derivation_equivariance(&first, act)?;
        derivation_equivariance(&second, act)?;
    }
    Ok(BundlePair { carrier, inj1, inj2, first, second, divisor: Some(m.divisor.clone()), divided, action, exhausted })
}

fn search_slice(e: &Derivation, bp: &BundlePair, cfg: &PipelineConfig) -> Result<Slice, TorsorError> {
    let mut bound = cfg.max_degree;
    loop {
        let mut search = SliceSearch::up_to(bound);
        if let Some(a) = &bp.action {
            search = search.invariant(a);
        }
        match find_slice(e, &search) {
            Ok(s) => return Ok(s),
            Err(LndError::NoSliceWithinBound(b)) => {
                if cfg.retry && bound == cfg.max_degree && bp.exhausted.is_none() {
                    bound *= 2;
                    continue;
                }
                return Err(match bp.exhausted {
                    Some(d) => TorsorError::MatchingSearchExhausted(d),
                    None => TorsorError::NoSliceWithinBound(b),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// `W ≅ A[w]` for a derivation `e` of `W` with slice `s` whose kernel is `inj(A)`:
/// `v ↦ Σ w^j/j! · π(e^j v)` with `π` the slice-evaluation map.
pub fn trivialize_along(e: &Derivation, slice: &Slice, inj: &RingMap, param: &str) -> Result<IsoCertificate, TorsorError> {
    let w_ring = e.ring();
    let a = inj.source();
    let cyl = a.tensor_with_polynomial_line(param)?;
    let wv = cyl.var(param)?;
    let cert = check_locally_nilpotent(e, None)?;
    let graph = GraphIdeal::new(a.ambient(), inj.images(), w_ring.ambient(), w_ring.relations())?;
    let minus = slice.element.neg();
    let mut spow = vec![w_ring.one()];
    let mut fwd = BTreeMap::new();
    for (v, chain) in &cert.chains {
        let n = chain.len();
        while spow.len() < n {
            let next = w_ring.reduce(&(spow.last().unwrap() * &minus))?;
            spow.push(next);
        }
        let mut acc = cyl.zero();
        let mut wpow = cyl.one();
        for j in 0..n {
            if chain[j].is_zero() {
                break;
            }
            let mut pi = w_ring.zero();
            for k in 0..n - j {
                if !chain[j + k].is_zero() {
                    pi = &pi + &(&spow[k] * &chain[j + k]).scale(&crate::lnd::factorial_inverse(k));
                }
            }
            let pi = w_ring.reduce(&pi)?;
            let pre = graph.preimage(&pi).map_err(|e| match e {
                GbError::NoPreimage(p) => TorsorError::PreimageFailure(p),
                e => e.into(),
            })?;
            let term = &wpow * &pre.to_ambient(cyl.ambient())?;
            acc = &acc + &term.scale(&crate::lnd::factorial_inverse(j));
            wpow = &wpow * &wv;
        }
        fwd.insert(v.clone(), cyl.reduce(&acc)?);
    }
    let forward = RingMap::new(w_ring, &cyl, &fwd)?;
    let mut back = BTreeMap::new();
    for (i, v) in a.vars().iter().enumerate() {
        back.insert(v.clone(), inj.images()[i].clone());
    }
    back.insert(param.to_string(), slice.element.clone());
    let backward = RingMap::new(&cyl, w_ring, &back)?;
    Ok(verify_iso(&forward, &backward)?)
}

/// Both trivializations `W ≅ A₁[w]` and `W ≅ A₂[w]`, with their slices.
pub fn trivialize_pair(
    bp: &BundlePair,
    cfg: &PipelineConfig,
) -> Result<((IsoCertificate, Slice), (IsoCertificate, Slice)), TorsorError> {
    if !bp.inj1.is_verified() || !bp.inj2.is_verified() {
        return Err(TorsorError::Precondition("injections must be verified".into()));
    }
    let s1 = search_slice(&bp.first, bp, cfg).stage("slice over the first side")?;
    let t1 = trivialize_along(&bp.first, &s1, &bp.inj1, &cfg.param).stage("first trivialization")?;
    let s2 = search_slice(&bp.second, bp, cfg).stage("slice over the second side")?;
    let t2 = trivialize_along(&bp.second, &s2, &bp.inj2, &cfg.param).stage("second trivialization")?;
    Ok(((t1, s1), (t2, s2)))
}

fn same_ring(a: &PresentedRing, b: &PresentedRing) -> bool {
    a.vars() == b.vars() && a.relations() == b.relations()
}

/// Picks a cylinder variable name that is fresh for both rings.
pub fn cylinder_param(a1: &PresentedRing, a2: &PresentedRing, stem: &str) -> String {
    let mut all = a1.vars().to_vec();
    all.extend(a2.vars().iter().cloned());
    fresh_name(&Ambient::grevlex(&all), stem)
}

/// The full pipeline: carrier, both trivializations, and their composite.
pub fn cylinder_iso(
    d1: &Derivation,
    d2: &Derivation,
    m: &Matching,
    cfg: &PipelineConfig,
) -> Result<CylinderIsoCertificate, TorsorError> {
    let (a1, a2) = (d1.ring(), d2.ring());
    let mut cfg = cfg.clone();
    cfg.param = cylinder_param(a1, a2, &cfg.param);
    if same_ring(a1, a2) && d1.images() == d2.images() {
        let cyl = a1.tensor_with_polynomial_line(&cfg.param)?;
        let id = RingMap::identity(&cyl);
        let iso = verify_iso(&id, &id).stage("identity")?;
        return Ok(CylinderIsoCertificate { iso, pair: None, first: None, second: None, slices: Vec::new() });
    }
    let bp = matched_fiber_product(d1, d2, m, &cfg).stage("matched fiber product")?;
    let ((t1, s1), (t2, s2)) = trivialize_pair(&bp, &cfg)?;
    let forward = t1.backward.then(&t2.forward).stage("compose")?;
    let backward = t2.backward.then(&t1.forward).stage("compose")?;
    let iso = verify_iso(&forward, &backward).stage("compose")?;
    Ok(CylinderIsoCertificate { iso, pair: Some(bp), first: Some(t1), second: Some(t2), slices: vec![s1, s2] })
}

/// A downstairs isomorphism obtained from an upstairs one through two
/// injections `φ_i: U_i → A_i`, by preimage.
#[derive(Clone, Debug)]
pub struct Descent {
    pub iso: IsoCertificate,
    /// `U₁[w] → A₁[w]`.
    pub lift1: RingMap,
    /// `U₂[w] → A₂[w]`.
    pub lift2: RingMap,
}

impl Descent {
    /// `lift2 ∘ down = up ∘ lift1` on all generators of `U₁[w]`.
    pub fn consistent_with(&self, up: &IsoCertificate) -> Result<bool, TorsorError> {
        let a2w = self.lift2.target();
        for i in 0..self.lift1.source().nvars() {
            let g = self.lift1.source().gen(i);
            let left = self.lift2.apply(&self.iso.forward.apply(&g)?)?;
            let right = up.forward.apply(&self.lift1.apply(&g)?)?;
            if !a2w.equal(&left, &right)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn lift_to_cylinder(phi: &RingMap, aw: &PresentedRing, param: &str) -> Result<RingMap, TorsorError> {
    let uw = phi.source().tensor_with_polynomial_line(param)?;
    let mut images = BTreeMap::new();
    for (v, p) in phi.named_images() {
        images.insert(v, p.to_ambient(aw.ambient())?);
    }
    images.insert(param.to_string(), aw.var(param)?);
    Ok(RingMap::new(&uw, aw, &images)?.verify()?)
}

/// Descends `up: A₁[w] ≅ A₂[w]` along `φ_i: U_i → A_i` to `U₁[w] ≅ U₂[w]`.
pub fn descend(up: &IsoCertificate, phi1: &RingMap, phi2: &RingMap, param: &str) -> Result<Descent, TorsorError> {
    let (a1w, a2w) = (up.forward.source(), up.forward.target());
    let lift1 = lift_to_cylinder(phi1, a1w, param).stage("lift")?;
    let lift2 = lift_to_cylinder(phi2, a2w, param).stage("lift")?;
    let g1 = GraphIdeal::new(lift1.source().ambient(), lift1.images(), a1w.ambient(), a1w.relations())?;
    let g2 = GraphIdeal::new(lift2.source().ambient(), lift2.images(), a2w.ambient(), a2w.relations())?;
    let pull = |graph: &GraphIdeal, p: &Polynomial| {
        graph.preimage(p).map_err(|e| match e {
            GbError::NoPreimage(p) => TorsorError::PreimageFailure(p),
            e => e.into(),
        })
    };
    let (u1w, u2w) = (lift1.source().clone(), lift2.source().clone());
    let mut fwd = BTreeMap::new();
    for (i, v) in u1w.vars().iter().enumerate() {
        let img = up.forward.apply(&lift1.images()[i])?;
        fwd.insert(v.clone(), pull(&g2, &img).stage("descend forward")?);
    }
    let mut bwd = BTreeMap::new();
    for (i, v) in u2w.vars().iter().enumerate() {
        let img = up.backward.apply(&lift2.images()[i])?;
        bwd.insert(v.clone(), pull(&g1, &img).stage("descend backward")?);
    }
    let forward = RingMap::new(&u1w, &u2w, &fwd)?;
    let backward = RingMap::new(&u2w, &u1w, &bwd)?;
    let iso = verify_iso(&forward, &backward).stage("descend")?;
    Ok(Descent { iso, lift1, lift2 })
}

#[cfg(test)]
mod tests;
