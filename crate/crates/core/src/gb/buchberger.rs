//! Buchberger's algorithm with the normal selection strategy, Gebauer–Möller
//! pair pruning and full cofactor tracking.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::coeff::FieldElement;
use crate::poly::{Ambient, Monomial, Polynomial};

use super::{current_config, thread_pool, GbConfig, GbError};

/// Where a working element came from: an input generator or an earlier element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Src {
    Input(usize),
    Elem(usize),
}

// polys[k] = Σ c · src over origins[k]
type Origin = Vec<(Src, Polynomial)>;

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Multiset of quotient terms gathered while reducing.
pub(crate) type Quotients = BTreeMap<usize, Vec<(FieldElement, Monomial)>>;

/// Reduces `p` fully (head and tail) by the monic polynomials `divisors`
/// (indexed through `active`). Returns the remainder and per-divisor quotients.
pub(crate) fn reduce_by(
    p: &Polynomial,
    divisors: &[Polynomial],
    active: &[usize],
    track: bool,
    steps: &mut u64,
    max_steps: u64,
) -> Result<(Polynomial, Quotients), GbError> {
    let ambient = p.ambient().clone();
    let mut quotients: Quotients = BTreeMap::new();
    let mut rem = Vec::new();
    let mut h = p.clone();
    let lms: Vec<(usize, &Monomial)> =
        active.iter().map(|&k| (k, divisors[k].leading_monomial().expect("nonzero divisor"))).collect();
    while let Some(lt) = h.leading_term() {
        let hit = lms.iter().find(|(_, lm)| lm.divides(&lt.mono));
        match hit {
            Some(&(k, lm)) => {
                *steps += 1;
                if *steps > max_steps {
                    return Err(GbError::ResourceBudgetExceeded(format!("more than {max_steps} reduction steps")));
                }
                let m = lt.mono.div(lm).unwrap();
                let c = lt.coeff.clone();
                h = h.sub_mul_term(&c, &m, &divisors[k]);
                if track {
                    quotients.entry(k).or_default().push((c, m));
                }
            }
            None => {
                rem.push(h.pop_leading().unwrap());
            }
        }
    }
    Ok((Polynomial::from_canonical(&ambient, rem), quotients))
}

pub(crate) fn quotient_polys(ambient: &Arc<Ambient>, q: Quotients) -> BTreeMap<usize, Polynomial> {
    q.into_iter().map(|(k, terms)| (k, Polynomial::from_terms(ambient, terms))).collect()
}

pub(crate) struct Engine {
    ambient: Arc<Ambient>,
    ninputs: usize,
    polys: Vec<Polynomial>,
    origins: Vec<Origin>,
    // indices of elements currently in G
    active: Vec<usize>,
    pairs: Vec<Pair>,
    steps: u64,
    cfg: GbConfig,
}

pub(crate) struct Output {
    pub basis: Vec<Polynomial>,
    pub cofactors: Vec<Vec<Polynomial>>,
}

impl Engine {
    pub fn run(ambient: &Arc<Ambient>, inputs: &[Polynomial]) -> Result<Output, GbError> {
        let cfg = current_config();
        let mut e = Engine {
            ambient: ambient.clone(),
            ninputs: inputs.len(),
            polys: Vec::new(),
            origins: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
            steps: 0,
            cfg,
        };
        for (i, g) in inputs.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let origin = vec![(Src::Input(i), Polynomial::one(ambient))];
            if e.insert_reduced(g.clone(), origin)? {
                return e.finish();
            }
        }
        while !e.pairs.is_empty() {
            let batch = e.take_batch();
            let snapshot_active = e.active.clone();
            let spolys: Vec<(Polynomial, Origin)> = batch.iter().map(|p| e.spoly(p)).collect();
            let max_steps = e.cfg.max_steps;
            let polys = &e.polys;
            let reduce_one = |(s, _): &(Polynomial, Origin)| {
                let mut steps = 0u64;
                let r = reduce_by(s, polys, &snapshot_active, true, &mut steps, max_steps);
                (r, steps)
            };
            let reduced: Vec<_> = if e.cfg.jobs > 1 && spolys.len() > 1 {
                thread_pool(e.cfg.jobs).install(|| spolys.par_iter().map(reduce_one).collect())
            } else {
                spolys.iter().map(reduce_one).collect()
            };
            for ((res, steps), (_, origin)) in reduced.into_iter().zip(spolys) {
                e.steps += steps;
                if e.steps > e.cfg.max_steps {
                    return Err(GbError::ResourceBudgetExceeded(format!(
                        "more than {} reduction steps",
                        e.cfg.max_steps
                    )));
                }
                let (rem, quots) = res?;
                if rem.is_zero() {
                    continue;
                }
                let mut origin = origin;
                for (k, q) in quotient_polys(&e.ambient, quots) {
                    origin.push((Src::Elem(k), q.neg()));
                }
                if e.insert_reduced(rem, origin)? {
                    return e.finish();
                }
            }
        }
        e.finish()
    }

    /// Reduces `p` against the current G, and if nonzero adds it. Returns
    /// true when the unit ideal has been detected.
    fn insert_reduced(&mut self, p: Polynomial, mut origin: Origin) -> Result<bool, GbError> {
        let mut steps = self.steps;
        let (rem, quots) = reduce_by(&p, &self.polys, &self.active, true, &mut steps, self.cfg.max_steps)?;
        self.steps = steps;
        if rem.is_zero() {
            return Ok(false);
        }
        for (k, q) in quotient_polys(&self.ambient, quots) {
            origin.push((Src::Elem(k), q.neg()));
        }
        let lc_inv = rem.leading_coeff().unwrap().inverse().expect("nonzero");
        let poly = rem.scale(&lc_inv);
        if poly.total_degree() > self.cfg.max_degree {
            return Err(GbError::ResourceBudgetExceeded(format!(
                "basis element of degree {} exceeds cap {}",
                poly.total_degree(),
                self.cfg.max_degree
            )));
        }
        let origin = origin.into_iter().map(|(s, c)| (s, c.scale(&lc_inv))).collect();
        let idx = self.polys.len();
        let unit = poly.is_constant();
        self.polys.push(poly);
        self.origins.push(origin);
        if unit {
            self.active = vec![idx];
            self.pairs.clear();
            return Ok(true);
        }
        self.update(idx);
        Ok(false)
    }

    fn lm(&self, k: usize) -> &Monomial {
        self.polys[k].leading_monomial().unwrap()
    }

    /// Gebauer–Möller update after adding element `h`.
    fn update(&mut self, h: usize) {
        let lm_h = self.lm(h).clone();
        let mut c: Vec<Pair> = self
            .active
            .iter()
            .map(|&g| Pair { i: g, j: h, lcm: self.lm(g).lcm(&lm_h) })
            .collect();
        let mut d: Vec<Pair> = Vec::new();
        while !c.is_empty() {
            let p = c.remove(0);
            let coprime = self.lm(p.i).is_coprime(&lm_h);
            let dominated = c.iter().chain(d.iter()).any(|q| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                d.push(p);
            }
        }
        let e: Vec<Pair> = d.into_iter().filter(|p| !self.lm(p.i).is_coprime(&lm_h)).collect();
        let old = std::mem::take(&mut self.pairs);
        for p in old {
            let keep = !lm_h.divides(&p.lcm)
                || self.lm(p.i).lcm(&lm_h) == p.lcm
                || self.lm(p.j).lcm(&lm_h) == p.lcm;
            if keep {
                self.pairs.push(p);
            }
        }
        self.pairs.extend(e);
        let lms: Vec<(usize, Monomial)> = self.active.iter().map(|&g| (g, self.lm(g).clone())).collect();
        self.active = lms.into_iter().filter(|(_, lm)| !lm_h.divides(lm)).map(|(g, _)| g).collect();
        self.active.push(h);
    }

    /// All pending pairs of minimal lcm degree, ordered by index pair.
    fn take_batch(&mut self) -> Vec<Pair> {
        let min = self.pairs.iter().map(|p| p.lcm.degree()).min().unwrap();
        let (mut batch, rest): (Vec<Pair>, Vec<Pair>) =
            std::mem::take(&mut self.pairs).into_iter().partition(|p| p.lcm.degree() == min);
        self.pairs = rest;
        batch.sort_by_key(|p| (p.i.min(p.j), p.i.max(p.j)));
        batch
    }

    fn spoly(&self, p: &Pair) -> (Polynomial, Origin) {
        let (i, j) = (p.i.min(p.j), p.i.max(p.j));
        let mi = p.lcm.div(self.lm(i)).unwrap();
        let mj = p.lcm.div(self.lm(j)).unwrap();
        let one = FieldElement::one();
        let s = self.polys[i].mul_term(&one, &mi).sub_mul_term(&one, &mj, &self.polys[j]);
        let origin = vec![
            (Src::Elem(i), Polynomial::monomial(&self.ambient, one.clone(), mi)),
            (Src::Elem(j), Polynomial::monomial(&self.ambient, -&one, mj)),
        ];
        (s, origin)
    }

    fn finish(mut self) -> Result<Output, GbError> {
        // minimal basis
        let mut minimal: Vec<usize> = Vec::new();
        let mut cand = self.active.clone();
        cand.sort_by(|&a, &b| self.ambient.order().cmp(self.lm(a), self.lm(b)).then(a.cmp(&b)));
        for &k in &cand {
            if !minimal.iter().any(|&m| self.lm(m).divides(self.lm(k))) {
                minimal.push(k);
            }
        }
        // tail-reduce each element by the others
        let mut reduced_idx = Vec::with_capacity(minimal.len());
        for (pos, &k) in minimal.iter().enumerate() {
            let others: Vec<usize> = minimal.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &m)| m).collect();
            let mut steps = self.steps;
            let (rem, quots) = reduce_by(&self.polys[k], &self.polys, &others, true, &mut steps, self.cfg.max_steps)?;
            self.steps = steps;
            if quots.is_empty() {
                reduced_idx.push(k);
                continue;
            }
            // leading term is untouched, so rem stays monic
            let mut origin = vec![(Src::Elem(k), Polynomial::one(&self.ambient))];
            for (m, q) in quotient_polys(&self.ambient, quots) {
                origin.push((Src::Elem(m), q.neg()));
            }
            self.polys.push(rem);
            self.origins.push(origin);
            reduced_idx.push(self.polys.len() - 1);
        }
        let cofactors = self.expand_cofactors(&reduced_idx);
        let basis = reduced_idx.iter().map(|&k| self.polys[k].clone()).collect();
        Ok(Output { basis, cofactors })
    }

    fn expand_cofactors(&self, wanted: &[usize]) -> Vec<Vec<Polynomial>> {
        let mut needed = vec![false; self.polys.len()];
        let mut stack: Vec<usize> = wanted.to_vec();
        while let Some(k) = stack.pop() {
            if needed[k] {
                continue;
            }
            needed[k] = true;
            for (s, _) in &self.origins[k] {
                if let Src::Elem(m) = s {
                    stack.push(*m);
                }
            }
        }
        let zero = Polynomial::zero(&self.ambient);
        let mut memo: Vec<Option<Vec<Polynomial>>> = vec![None; self.polys.len()];
        for k in 0..self.polys.len() {
            if !needed[k] {
                continue;
            }
            let mut cof = vec![zero.clone(); self.ninputs];
            for (s, c) in &self.origins[k] {
                match s {
                    Src::Input(i) => cof[*i] = &cof[*i] + c,
                    Src::Elem(m) => {
                        let inner = memo[*m].as_ref().expect("origins reference earlier elements");
                        for (i, x) in inner.iter().enumerate() {
                            if !x.is_zero() {
                                cof[i] = &cof[i] + &(c * x);
                            }
                        }
                    }
                }
            }
            memo[k] = Some(cof);
        }
        wanted.iter().map(|&k| memo[k].clone().unwrap()).collect()
    }
}
