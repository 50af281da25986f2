use std::cmp::Ordering;

use smallvec::SmallVec;

/// Dense exponent vector over the ambient variable list.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[u32; 16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn var(nvars: usize, i: usize, e: u32) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = e;
        m
    }

    /// All monomials of total degree `deg`, lex-descending.
    pub fn all_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
        fn rec(nvars: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if nvars == 1 {
                prefix.push(deg);
                out.push(Monomial::from_exponents(prefix));
                prefix.pop();
                return;
            }
            for e in (0..=deg).rev() {
                prefix.push(e);
                rec(nvars - 1, deg - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if deg == 0 {
                out.push(Monomial::one(0));
            }
            return out;
        }
        rec(nvars, deg, &mut Vec::with_capacity(nvars), &mut out);
        out
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn set_exponent(&mut self, i: usize, e: u32) {
        self.0[i] = e;
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn degree_in(&self, idx: &[usize]) -> u32 {
        idx.iter().map(|&i| self.0[i]).sum()
    }
}

/// Ordering used inside a block (or for the whole monomial).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseOrder {
    Lex,
    Grevlex,
}

/// A monomial order. Variable priority follows the ambient variable list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    Grevlex,
    /// Elimination order: the `elim` block dominates, ties broken on `rest`.
    Block { elim: Vec<usize>, rest: Vec<usize>, inner: BaseOrder },
}

impl MonomialOrder {
    pub fn block(nvars: usize, elim: &[usize], inner: BaseOrder) -> Self {
        let mut elim: Vec<usize> = elim.to_vec();
        elim.sort_unstable();
        elim.dedup();
        let rest = (0..nvars).filter(|i| !elim.contains(i)).collect();
        MonomialOrder::Block { elim, rest, inner }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => lex(a.exponents(), b.exponents()),
            MonomialOrder::Grevlex => grevlex(a.exponents(), b.exponents()),
            MonomialOrder::Block { elim, rest, inner } => {
                sub_cmp(*inner, elim, a, b).then_with(|| sub_cmp(*inner, rest, a, b))
            }
        }
    }

    /// Whether variables outside `elim` are always smaller than any monomial
    /// touching `elim`.
    pub fn eliminates(&self, vars: &[usize]) -> bool {
        match self {
            MonomialOrder::Block { elim, .. } => vars.iter().all(|v| elim.contains(v)),
            MonomialOrder::Lex => {
                let mut sorted = vars.to_vec();
                sorted.sort_unstable();
                sorted.iter().enumerate().all(|(i, &v)| i == v)
            }
            MonomialOrder::Grevlex => vars.is_empty(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MonomialOrder::Lex => "lex".into(),
            MonomialOrder::Grevlex => "grevlex".into(),
            MonomialOrder::Block { elim, inner, .. } => format!("block({elim:?},{inner:?})"),
        }
    }
}

fn lex(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    if da != db {
        return da.cmp(&db);
    }
    for (x, y) in a.iter().zip(b).rev() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

fn sub_cmp(order: BaseOrder, idx: &[usize], a: &Monomial, b: &Monomial) -> Ordering {
    match order {
        BaseOrder::Lex => {
            for &i in idx {
                match a.exponent(i).cmp(&b.exponent(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        }
        BaseOrder::Grevlex => {
            let da = a.degree_in(idx);
            let db = b.degree_in(idx);
            if da != db {
                return da.cmp(&db);
            }
            for &i in idx.iter().rev() {
                match a.exponent(i).cmp(&b.exponent(i)) {
                    Ordering::Equal => continue,
                    o => return o.reverse(),
                }
            }
            Ordering::Equal
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e)
    }

    #[test]
    fn grevlex_examples() {
        let o = MonomialOrder::Grevlex;
        // x > y > z
        assert_eq!(o.cmp(&m(&[2, 0, 1]), &m(&[0, 2, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 2, 0]), &m(&[1, 0, 1])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 1, 0])), Ordering::Greater);
    }

    #[test]
    fn lex_and_block() {
        assert_eq!(MonomialOrder::Lex.cmp(&m(&[1, 0, 0]), &m(&[0, 5, 5])), Ordering::Greater);
        let b = MonomialOrder::block(3, &[2], BaseOrder::Grevlex);
        assert_eq!(b.cmp(&m(&[0, 0, 1]), &m(&[5, 5, 0])), Ordering::Greater);
        assert_eq!(b.cmp(&m(&[1, 0, 1]), &m(&[0, 1, 1])), Ordering::Greater);
        assert!(b.eliminates(&[2]));
        assert!(!b.eliminates(&[0]));
    }

    #[test]
    fn divisibility() {
        assert!(m(&[1, 0, 2]).divides(&m(&[1, 1, 2])));
        assert!(!m(&[1, 0, 3]).divides(&m(&[1, 1, 2])));
        assert_eq!(m(&[2, 1, 0]).div(&m(&[1, 1, 0])), Some(m(&[1, 0, 0])));
        assert_eq!(m(&[2, 1, 0]).lcm(&m(&[0, 3, 1])), m(&[2, 3, 1]));
    }
}
