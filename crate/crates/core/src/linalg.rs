//! Exact Gauss–Jordan elimination over a [`Scalar`] field.

use std::collections::BTreeMap;

use crate::scalars::Scalar;

/// A sparse row: `(column, value)` pairs with nonzero values.
pub type SparseRow<S> = Vec<(usize, S)>;

/// A homogeneous linear system `M x = 0` with sparse rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem<S> {
    pub ncols: usize,
    pub rows: Vec<SparseRow<S>>,
}

impl<S: Scalar> LinearSystem<S> {
    pub fn new(ncols: usize) -> Self {
        LinearSystem {
            ncols,
            rows: Vec::new(),
        }
    }

    /// Adds a row, merging repeated columns and dropping zeros. Empty rows are skipped.
    pub fn push_row(&mut self, terms: impl IntoIterator<Item = (usize, S)>) {
        let mut merged: BTreeMap<usize, S> = BTreeMap::new();
        for (c, v) in terms {
            assert!(c < self.ncols, "column {c} out of range");
            let slot = merged.entry(c).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        }
        let row: SparseRow<S> = merged.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn dense_rows(&self) -> Vec<Vec<S>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![S::zero(); self.ncols];
                for (c, v) in r {
                    d[*c] = v.clone();
                }
                d
            })
            .collect()
    }

    /// Evaluates every row on `x`.
    pub fn residual(&self, x: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .fold(S::zero(), |acc, (c, v)| acc + v.clone() * x[*c].clone())
            })
            .collect()
    }

    pub fn is_solution(&self, x: &[S]) -> bool {
        self.residual(x).iter().all(Scalar::is_zero)
    }

    pub fn echelon(&self) -> Echelon<S> {
        Echelon::from_dense(self.ncols, self.dense_rows())
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    pub fn nullspace(&self) -> Vec<Vec<S>> {
        self.echelon().nullspace()
    }
}

/// Reduced row echelon form: pivot entries are 1 and are the only nonzero
/// entries in their columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon<S> {
    pub ncols: usize,
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<S>>,
}

impl<S: Scalar> Echelon<S> {
    pub fn from_dense(ncols: usize, rows: Vec<Vec<S>>) -> Self {
        let mut rows: Vec<Vec<S>> = rows
            .into_iter()
            .filter(|r| {
                debug_assert_eq!(r.len(), ncols);
                r.iter().any(|v| !v.is_zero())
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..ncols {
            if rank == rows.len() {
                break;
            }
            // Sparsest candidate keeps fill-in down.
            let Some(best) = (rank..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .min_by_key(|&r| rows[r].iter().filter(|v| !v.is_zero()).count())
            else {
                continue;
            };
            rows.swap(rank, best);
            let inv = rows[rank][col].inv().expect("pivot is nonzero");
            for v in rows[rank].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() * &inv;
                }
            }
            let support: Vec<usize> = (col..ncols).filter(|&c| !rows[rank][c].is_zero()).collect();
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == rank || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for &c in &support {
                    row[c] = row[c].clone() - factor.clone() * &pivot_row[c];
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        Echelon {
            ncols,
            pivots,
            rows,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the nullspace, itself in reduced echelon form so that it is
    /// canonical for the subspace.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let raw: Vec<Vec<S>> = (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![S::zero(); self.ncols];
                v[free] = S::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[free].clone();
                }
                v
            })
            .collect();
        Echelon::from_dense(self.ncols, raw).rows
    }

    /// Whether `v` lies in the row space.
    pub fn contains(&self, v: &[S]) -> bool {
        let mut rest = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if rest[p].is_zero() {
                continue;
            }
            let f = rest[p].clone();
            for (c, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    rest[c] = rest[c].clone() - f.clone() * x;
                }
            }
        }
        rest.iter().all(Scalar::is_zero)
    }
}

/// Forward elimination that accepts rows one at a time, so callers can stop
/// as soon as a target rank is reached.
#[derive(Clone, Debug)]
pub struct IncrementalEchelon<S> {
    ncols: usize,
    /// Leading column → row normalized to leading 1 (not back-reduced).
    rows: BTreeMap<usize, Vec<S>>,
}

impl<S: Scalar> IncrementalEchelon<S> {
    pub fn new(ncols: usize) -> Self {
        IncrementalEchelon {
            ncols,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduces `row` against the current pivots; returns true if it raised the rank.
    pub fn push(&mut self, mut row: Vec<S>) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        for (&lead, pivot) in &self.rows {
            if row[lead].is_zero() {
                continue;
            }
            let f = row[lead].clone();
            for c in lead..self.ncols {
                if !pivot[c].is_zero() {
                    row[c] = row[c].clone() - f.clone() * &pivot[c];
                }
            }
        }
        let Some(lead) = row.iter().position(|v| !v.is_zero()) else {
            return false;
        };
        let inv = row[lead].inv().expect("nonzero");
        for v in row.iter_mut().skip(lead) {
            if !v.is_zero() {
                *v = v.clone() * &inv;
            }
        }
        self.rows.insert(lead, row);
        true
    }
}

/// Dot product of two dense vectors.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, Rational};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn nullspace_of_a_small_system() {
        // x + y + z = 0, y - z = 0  →  span of (-2, 1, 1)
        let mut sys = LinearSystem::new(3);
        sys.push_row([(0, r(1)), (1, r(1)), (2, r(1))]);
        sys.push_row([(1, r(1)), (2, r(-1))]);
        let ns = sys.nullspace();
        assert_eq!(ns, vec![vec![r(1), q(-1, 2), q(-1, 2)]]);
        assert!(sys.is_solution(&ns[0]));
    }

    #[test]
    fn empty_system_has_full_nullspace() {
        let sys: LinearSystem<Rational> = LinearSystem::new(2);
        assert_eq!(sys.nullspace(), vec![vec![r(1), r(0)], vec![r(0), r(1)]]);
    }

    #[test]
    fn merged_terms_cancel() {
        let mut sys = LinearSystem::new(2);
        sys.push_row([(0, r(1)), (0, r(-1))]);
        assert!(sys.rows.is_empty());
    }

    #[test]
    fn incremental_rank_matches_batch() {
        let rows = vec![
            vec![r(1), r(2), r(3)],
            vec![r(2), r(4), r(6)],
            vec![r(0), r(1), r(1)],
            vec![r(1), r(3), r(4)],
        ];
        let mut inc = IncrementalEchelon::new(3);
        let raised: Vec<bool> = rows.iter().cloned().map(|row| inc.push(row)).collect();
        assert_eq!(raised, vec![true, false, true, false]);
        assert_eq!(Echelon::from_dense(3, rows).rank(), 2);
    }

    #[test]
    fn row_space_membership() {
        let e = Echelon::from_dense(3, vec![vec![r(1), r(1), r(0)], vec![r(0), r(1), r(1)]]);
        assert!(e.contains(&[r(1), r(2), r(1)]));
        assert!(!e.contains(&[r(0), r(0), r(1)]));
    }
}
