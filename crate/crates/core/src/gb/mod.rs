//! Gröbner bases with cofactors, membership certificates, saturation,
//! elimination and subalgebra preimages.

mod buchberger;
mod ideal;

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::ThreadPool;

use crate::poly::{Ambient, BaseOrder, PolyError, Polynomial};

pub use ideal::{eliminate, membership, saturate, CertificateRecord, GraphIdeal, MembershipCertificate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GbError {
    #[error("resource budget exceeded: {0}")]
    ResourceBudgetExceeded(String),
    #[error("not a member, even after multiplying by the saturating element up to power {0}")]
    NotMember(u32),
    #[error("no preimage: {0}")]
    NoPreimage(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Budgets and parallelism for Gröbner computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbConfig {
    pub max_steps: u64,
    pub max_degree: u32,
    pub jobs: usize,
    /// Base order used when rings are presented.
    pub order: BaseOrder,
}

impl Default for GbConfig {
    fn default() -> Self {
        GbConfig { max_steps: 1_000_000, max_degree: 64, jobs: 1, order: BaseOrder::Grevlex }
    }
}

thread_local! {
    static CONFIG: RefCell<GbConfig> = RefCell::new(GbConfig::default());
}

pub fn current_config() -> GbConfig {
    CONFIG.with(|c| c.borrow().clone())
}

/// Runs `f` with `cfg` as the Gröbner configuration of the current thread.
pub fn with_config<R>(cfg: GbConfig, f: impl FnOnce() -> R) -> R {
    let saved = CONFIG.with(|c| c.replace(cfg));
    struct Restore(Option<GbConfig>);
    impl Drop for Restore {
        fn drop(&mut self) {
            let saved = self.0.take().unwrap();
            CONFIG.with(|c| *c.borrow_mut() = saved);
        }
    }
    let _guard = Restore(Some(saved));
    f()
}

fn thread_pool(jobs: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let pools = POOLS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = pools.lock().unwrap();
    guard
        .entry(jobs)
        .or_insert_with(|| Arc::new(rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool")))
        .clone()
}

/// Order-preserving map, run on the configured number of threads with the
/// caller's configuration installed on each worker.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    use rayon::prelude::*;
    let cfg = current_config();
    if cfg.jobs <= 1 || items.len() < 2 {
        return items.iter().map(f).collect();
    }
    thread_pool(cfg.jobs).install(|| items.par_iter().map(|x| with_config(cfg.clone(), || f(x))).collect())
}

/// A reduced, monic Gröbner basis, sorted by increasing leading monomial,
/// with cofactors: `basis[k] = Σ_i cofactors[k][i] * inputs[i]`.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ambient: Arc<Ambient>,
    inputs: Vec<Polynomial>,
    basis: Vec<Polynomial>,
    cofactors: Vec<Vec<Polynomial>>,
}

/// `p = Σ quotients[k] * basis[k] + remainder`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub remainder: Polynomial,
    pub quotients: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn compute(ambient: &Arc<Ambient>, gens: &[Polynomial]) -> Result<Self, GbError> {
        let inputs = gens.iter().map(|g| g.to_ambient(ambient)).collect::<Result<Vec<_>, _>>()?;
        let out = buchberger::Engine::run(ambient, &inputs)?;
        Ok(GroebnerBasis { ambient: ambient.clone(), inputs, basis: out.basis, cofactors: out.cofactors })
    }

    pub fn ambient(&self) -> &Arc<Ambient> {
        &self.ambient
    }

    pub fn inputs(&self) -> &[Polynomial] {
        &self.inputs
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn cofactors(&self) -> &[Vec<Polynomial>] {
        &self.cofactors
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    /// Re-expresses the basis over a larger ambient whose order agrees with the
    /// current one on the old variables (e.g. a variable appended under grevlex).
    pub fn extend_to(&self, ambient: &Arc<Ambient>) -> Result<Self, GbError> {
        let conv = |v: &[Polynomial]| v.iter().map(|p| p.to_ambient(ambient)).collect::<Result<Vec<_>, _>>();
        Ok(GroebnerBasis {
            ambient: ambient.clone(),
            inputs: conv(&self.inputs)?,
            basis: conv(&self.basis)?,
            cofactors: self.cofactors.iter().map(|c| conv(c)).collect::<Result<Vec<_>, _>>()?,
        })
    }

    pub fn normal_form(&self, p: &Polynomial) -> Result<NormalForm, GbError> {
        let p = p.to_ambient(&self.ambient)?;
        let cfg = current_config();
        let active: Vec<usize> = (0..self.basis.len()).collect();
        let mut steps = 0;
        let (remainder, q) = buchberger::reduce_by(&p, &self.basis, &active, true, &mut steps, cfg.max_steps)?;
        let mut quotients = vec![Polynomial::zero(&self.ambient); self.basis.len()];
        for (k, poly) in buchberger::quotient_polys(&self.ambient, q) {
            quotients[k] = poly;
        }
        Ok(NormalForm { remainder, quotients })
    }

    /// Remainder only.
    pub fn reduce(&self, p: &Polynomial) -> Result<Polynomial, GbError> {
        let p = p.to_ambient(&self.ambient)?;
        let cfg = current_config();
        let active: Vec<usize> = (0..self.basis.len()).collect();
        let mut steps = 0;
        Ok(buchberger::reduce_by(&p, &self.basis, &active, false, &mut steps, cfg.max_steps)?.0)
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool, GbError> {
        Ok(self.reduce(p)?.is_zero())
    }

    /// Converts quotients with respect to the basis into combiners of the inputs.
    pub fn to_input_combination(&self, quotients: &[Polynomial]) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(&self.ambient); self.inputs.len()];
        for (q, cof) in quotients.iter().zip(&self.cofactors) {
            if q.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(cof) {
                if !c.is_zero() {
                    *o = &*o + &(q * c);
                }
            }
        }
        out
    }

    /// Combiners `c` with `p = Σ c_i inputs_i`, when `p` lies in the ideal.
    pub fn express(&self, p: &Polynomial) -> Result<Option<Vec<Polynomial>>, GbError> {
        let nf = self.normal_form(p)?;
        if !nf.remainder.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.to_input_combination(&nf.quotients)))
    }

    /// Re-verifies the cofactor identities and Buchberger's criterion.
    pub fn verify(&self) -> Result<bool, GbError> {
        for (b, cof) in self.basis.iter().zip(&self.cofactors) {
            let mut sum = Polynomial::zero(&self.ambient);
            for (c, g) in cof.iter().zip(&self.inputs) {
                sum = &sum + &(c * g);
            }
            if &sum != b {
                return Ok(false);
            }
        }
        for g in &self.inputs {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let (a, b) = (&self.basis[i], &self.basis[j]);
                let (la, lb) = (a.leading_monomial().unwrap(), b.leading_monomial().unwrap());
                let l = la.lcm(lb);
                let one = crate::coeff::FieldElement::one();
                let s = a.mul_term(&one, &l.div(la).unwrap()).sub_mul_term(&one, &l.div(lb).unwrap(), b);
                if !self.contains(&s)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Free-standing form of [`GroebnerBasis::normal_form`].
pub fn normal_form(p: &Polynomial, gb: &GroebnerBasis) -> Result<NormalForm, GbError> {
    gb.normal_form(p)
}

/// Reduced Gröbner basis of `gens` in the order of `ambient`.
pub fn buchberger(ambient: &Arc<Ambient>, gens: &[Polynomial]) -> Result<GroebnerBasis, GbError> {
    GroebnerBasis::compute(ambient, gens)
}

/// A variable name not present in `ambient`, derived from `stem`.
pub fn fresh_name(ambient: &Ambient, stem: &str) -> String {
    if ambient.index_of(stem).is_none() {
        return stem.to_string();
    }
    (1..).map(|i| format!("{stem}{i}")).find(|n| ambient.index_of(n).is_none()).unwrap()
}
