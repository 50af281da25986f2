//! Exact linear algebra over a coefficient field, with sparse rows.

use std::collections::BTreeMap;

use crate::coeff::FieldElement;

pub type SparseRow = BTreeMap<usize, FieldElement>;

fn axpy(row: &mut SparseRow, f: &FieldElement, other: &SparseRow) {
    for (c, v) in other {
        let cur = row.remove(c).unwrap_or_else(FieldElement::zero);
        let new = &cur - &(f * v);
        if !new.is_zero() {
            row.insert(*c, new);
        }
    }
}

/// Solves `A x = b` for sparse rows of `A`. Pivots are taken at the least
/// column index available; free unknowns are set to 0. `None` when inconsistent.
pub fn solve_sparse(rows: Vec<SparseRow>, rhs: Vec<FieldElement>, ncols: usize) -> Option<Vec<FieldElement>> {
    // the right-hand side lives in column `ncols`
    let mut pivots: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for (mut row, b) in rows.into_iter().zip(rhs) {
        if !b.is_zero() {
            row.insert(ncols, b);
        }
        row.retain(|_, v| !v.is_zero());
        loop {
            let hit = row.keys().find(|c| **c < ncols && pivots.contains_key(c)).copied();
            match hit {
                Some(c) => {
                    let f = row[&c].clone();
                    axpy(&mut row, &f, &pivots[&c]);
                }
                None => break,
            }
        }
        match row.keys().next().copied() {
            None => {}
            Some(c) if c == ncols => return None,
            Some(c) => {
                let inv = row[&c].inverse().expect("nonzero pivot");
                for v in row.values_mut() {
                    *v = &*v * &inv;
                }
                pivots.insert(c, row);
            }
        }
    }
    let mut x = vec![FieldElement::zero(); ncols];
    for (c, row) in pivots.iter().rev() {
        let mut val = row.get(&ncols).cloned().unwrap_or_else(FieldElement::zero);
        for (j, v) in row.range(c + 1..ncols) {
            if !x[*j].is_zero() {
                val = &val - &(v * &x[*j]);
            }
        }
        x[*c] = val;
    }
    Some(x)
}

/// Dense front end to [`solve_sparse`].
pub fn solve(rows: &[Vec<FieldElement>], rhs: &[FieldElement], ncols: usize) -> Option<Vec<FieldElement>> {
    let sparse = rows
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect())
        .collect();
    solve_sparse(sparse, rhs.to_vec(), ncols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_integer(n)
    }

    #[test]
    fn solves_and_detects_inconsistency() {
        let rows = vec![vec![fe(1), fe(1)], vec![fe(1), fe(-1)]];
        let x = solve(&rows, &[fe(3), fe(1)], 2).unwrap();
        assert_eq!(x, vec![fe(2), fe(1)]);
        let rows = vec![vec![fe(1), fe(2)], vec![fe(2), fe(4)]];
        assert!(solve(&rows, &[fe(1), fe(3)], 2).is_none());
        let x = solve(&rows, &[fe(1), fe(2)], 2).unwrap();
        assert_eq!(x, vec![fe(1), fe(0)]);
        let rows = vec![vec![fe(0), fe(1), fe(1)], vec![fe(1), fe(0), fe(1)]];
        let x = solve(&rows, &[fe(2), fe(3)], 3).unwrap();
        assert_eq!(x, vec![fe(3), fe(2), fe(0)]);
    }
}
