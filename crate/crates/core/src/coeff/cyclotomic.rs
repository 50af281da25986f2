//! Residues modulo cyclotomic polynomials, i.e. elements of ℚ(ζ_l).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::Rational;

/// Integer coefficients of the `l`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(l: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&l) {
        return p.clone();
    }
    assert!(l >= 1, "cyclotomic order must be positive");
    // x^l - 1 divided by all Phi_d, d | l, d < l
    let mut num = vec![0i64; l as usize + 1];
    num[0] = -1;
    num[l as usize] = 1;
    for d in 1..l {
        if l % d == 0 {
            let phi = cyclotomic_polynomial(d);
            num = exact_div_monic(&num, &phi);
        }
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(l, p.clone());
    p
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let n = num.len() - 1;
    let m = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; n - m + 1];
    for i in (0..=n - m).rev() {
        let c = rem[i + m];
        quot[i] = c;
        for j in 0..=m {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

pub fn euler_phi(l: u32) -> usize {
    cyclotomic_polynomial(l).len() - 1
}

/// An element of ℚ(ζ_l), stored as its reduced residue modulo Φ_l.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn zero(order: u32) -> Self {
        Cyclotomic { order, coeffs: vec![Rational::zero(); euler_phi(order)] }
    }

    pub fn from_rational(order: u32, r: Rational) -> Self {
        let mut c = Self::zero(order);
        c.coeffs[0] = r;
        c
    }

    /// Reduces an arbitrary coefficient vector (ascending powers of ζ).
    pub fn from_coeffs(order: u32, coeffs: Vec<Rational>) -> Self {
        Cyclotomic { order, coeffs: reduce(order, coeffs) }
    }

    /// ζ_l^k.
    pub fn zeta_pow(order: u32, k: i64) -> Self {
        let e = k.rem_euclid(order as i64) as usize;
        let mut v = vec![Rational::zero(); e + 1];
        v[e] = Rational::one();
        Self::from_coeffs(order, v)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// The rational value, if the residue is a constant.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(Rational::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Cyclotomic { order: self.order, coeffs }
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|a| a * r).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        let n = self.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += &(a * b);
                }
            }
        }
        Self::from_coeffs(self.order, prod)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm over ℚ.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let modulus: Vec<Rational> =
            cyclotomic_polynomial(self.order).iter().map(|&c| Rational::from_integer(c)).collect();
        let (g, s) = ext_gcd(trim(self.coeffs.clone()), modulus);
        // Phi_l is irreducible, so g is a nonzero constant.
        debug_assert_eq!(g.len(), 1);
        let ginv = g[0].recip()?;
        let s: Vec<Rational> = s.iter().map(|c| c * &ginv).collect();
        Some(Self::from_coeffs(self.order, s))
    }
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.len() > 1 && v.last().is_some_and(Rational::is_zero) {
        v.pop();
    }
    if v.is_empty() {
        v.push(Rational::zero());
    }
    v
}

fn reduce(order: u32, mut v: Vec<Rational>) -> Vec<Rational> {
    let phi = cyclotomic_polynomial(order);
    let m = phi.len() - 1;
    while v.len() > m {
        let top = v.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = v.len() - m;
        for (j, &c) in phi.iter().take(m).enumerate() {
            if c != 0 {
                v[shift + j] -= &(&top * &Rational::from_integer(c));
            }
        }
    }
    v.resize(m, Rational::zero());
    v
}

fn poly_sub_mul(a: &[Rational], q: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let len = a.len().max(q.len() + b.len() - 1);
    let mut out = vec![Rational::zero(); len];
    for (i, c) in a.iter().enumerate() {
        out[i] = c.clone();
    }
    for (i, x) in q.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] -= &(x * y);
        }
    }
    trim(out)
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = b[db].recip().unwrap();
    if r.len() < b.len() {
        return (vec![Rational::zero()], trim(r));
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] * &lead_inv;
        if !c.is_zero() {
            for j in 0..=db {
                r[i + j] -= &(&c * &b[j]);
            }
        }
        q[i] = c;
    }
    (trim(q), trim(r))
}

// returns (g, s) with s*a ≡ g mod m
fn ext_gcd(a: Vec<Rational>, m: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let (mut r0, mut r1) = (m, a);
    let (mut s0, mut s1) = (vec![Rational::zero()], vec![Rational::one()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(*cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(euler_phi(12), 4);
    }

    #[test]
    fn inverse_roundtrip() {
        for l in 3..=8 {
            for k in 1..l as i64 {
                let z = Cyclotomic::zeta_pow(l, k);
                let a = z.add(&Cyclotomic::from_rational(l, Rational::from_integer(2)));
                let inv = a.inverse().unwrap();
                assert_eq!(a.mul(&inv).as_rational(), Some(Rational::one()), "l={l} k={k}");
            }
        }
    }
}
