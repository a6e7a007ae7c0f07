//! The linear system whose solutions are the invariant coefficient tables,
//! its kernel, and the checks built on it.

use rayon::prelude::*;

use crate::catalog::{theorem_representatives, Representative};
use crate::densities::{is_invariant_by_oracle, probe_rows, MonomialBound};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, IncrementalEchelon, LinearSystem, SparseRow};
use crate::opcore::{multi_indices, DensityOp, MultiIndex};
use crate::scalars::{binomial, q, Rational, Scalar};

/// One equation: the coefficient of `f^{(r)}` multiplying
/// `φ^{(i-r+1)} ψ^{(j)} χ^{(l)}` in the defect against `f d/dx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemRow<S> {
    pub lead: MultiIndex,
    pub r: usize,
    pub terms: SparseRow<S>,
}

#[derive(Clone, Debug)]
pub struct InvarianceSystem<S> {
    pub weights: [S; 3],
    pub order: usize,
    pub r_set: Vec<usize>,
    /// Column `c` is the unknown `α_{unknowns[c]}`.
    pub unknowns: Vec<MultiIndex>,
    pub rows: Vec<SystemRow<S>>,
}

fn column(order: usize, idx: &[usize]) -> usize {
    // Position of (i, j, l) in lexicographic order among i + j + l = order.
    let (i, j) = (idx[0], idx[1]);
    let before_i: usize = (0..i).map(|a| order - a + 1).sum();
    before_i + j
}

/// Terms `(index, coefficient)` of the row tagged `(i, j, l; r)`; `i ≥ r - 1`.
pub fn row_terms<S: Scalar>(weights: &[S; 3], lead: [usize; 3], r: usize) -> Vec<(MultiIndex, S)> {
    let [i, j, l] = lead;
    let shift = r - 1;
    let slot = |w: &S, n: usize| w.clone() * binomial::<S>(n, r - 1) + binomial::<S>(n, r);
    vec![
        (vec![i, j, l], slot(&weights[0], i)),
        (vec![i - shift, j + shift, l], slot(&weights[1], j + shift)),
        (vec![i - shift, j, l + shift], slot(&weights[2], l + shift)),
    ]
}

/// The rows for every `r` in `r_set` (restricted to `2..=order+1`) and every
/// `(i, j, l)` with `i ≥ r - 1`.
pub fn build_system<S: Scalar>(
    order: usize,
    weights: [S; 3],
    r_set: &[usize],
) -> InvarianceSystem<S> {
    let unknowns = multi_indices(3, order);
    let mut r_set: Vec<usize> = r_set
        .iter()
        .copied()
        .filter(|&r| (2..=order + 1).contains(&r))
        .collect();
    r_set.sort_unstable();
    r_set.dedup();
    let mut rows = Vec::new();
    for &r in &r_set {
        for idx in &unknowns {
            if idx[0] + 1 < r {
                continue;
            }
            let mut merged: Vec<(usize, S)> = Vec::new();
            for (t, v) in row_terms(&weights, [idx[0], idx[1], idx[2]], r) {
                let c = column(order, &t);
                match merged.iter_mut().find(|(cc, _)| *cc == c) {
                    Some(e) => e.1 = e.1.clone() + v,
                    None => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            merged.sort_by_key(|(c, _)| *c);
            rows.push(SystemRow {
                lead: idx.clone(),
                r,
                terms: merged,
            });
        }
    }
    InvarianceSystem {
        weights,
        order,
        r_set,
        unknowns,
        rows,
    }
}

/// The full system, `r = 2..=order+1`.
pub fn full_system<S: Scalar>(order: usize, weights: [S; 3]) -> InvarianceSystem<S> {
    let r_set: Vec<usize> = (2..=order + 1).collect();
    build_system(order, weights, &r_set)
}

impl<S: Scalar> InvarianceSystem<S> {
    pub fn ncols(&self) -> usize {
        self.unknowns.len()
    }

    pub fn linear_system(&self) -> LinearSystem<S> {
        let mut sys = LinearSystem::new(self.ncols());
        for row in &self.rows {
            sys.push_row(row.terms.iter().cloned());
        }
        sys
    }

    pub fn kernel(&self) -> KernelBasis<S> {
        let vectors = self.linear_system().nullspace();
        let basis = vectors
            .iter()
            .map(|v| {
                DensityOp::from_vector(self.weights.to_vec(), self.order, v)
                    .expect("shape matches the system")
            })
            .collect();
        KernelBasis {
            weights: self.weights.clone(),
            order: self.order,
            vectors,
            basis,
        }
    }

    /// Whether every equation annihilates `op`'s coefficient table.
    pub fn is_solution(&self, op: &DensityOp<S>) -> bool {
        self.linear_system().is_solution(&op.to_vector())
    }
}

/// A canonical basis (reduced echelon form) of the invariant tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis<S> {
    pub weights: [S; 3],
    pub order: usize,
    pub vectors: Vec<Vec<S>>,
    pub basis: Vec<DensityOp<S>>,
}

impl<S: Scalar> KernelBasis<S> {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    fn echelon(&self) -> Echelon<S> {
        Echelon::from_dense(multi_indices(3, self.order).len(), self.vectors.clone())
    }

    fn check_shape(&self, op: &DensityOp<S>) -> Result<()> {
        if op.arity() != 3 || op.order() != self.order || op.weights() != self.weights.as_slice() {
            return Err(Error::Shape(format!(
                "operator of order {} at {:?} compared with a kernel of order {} at {:?}",
                op.order(),
                op.weights(),
                self.order,
                self.weights
            )));
        }
        Ok(())
    }

    pub fn contains(&self, op: &DensityOp<S>) -> Result<bool> {
        self.check_shape(op)?;
        Ok(self.echelon().contains(&op.to_vector()))
    }

    /// Whether the given operators span exactly this kernel.
    pub fn is_spanned_by(&self, ops: &[&DensityOp<S>]) -> Result<bool> {
        for op in ops {
            if !self.contains(op)? {
                return Ok(false);
            }
        }
        let n = multi_indices(3, self.order).len();
        let rank = Echelon::from_dense(n, ops.iter().map(|o| o.to_vector()).collect()).rank();
        Ok(rank == self.dimension())
    }
}

/// Kernel of the full system plus the cross-check against the reduced
/// generator set `r ∈ {2, 3}` (the fields `d/dx` and `x³ d/dx`).
#[derive(Clone, Debug)]
pub struct Classification<S> {
    pub kernel: KernelBasis<S>,
    pub generators_agree: bool,
}

impl<S: Scalar> Classification<S> {
    pub fn dimension(&self) -> usize {
        self.kernel.dimension()
    }
}

pub fn classify<S: Scalar>(order: usize, weights: [S; 3]) -> Classification<S> {
    let full = full_system(order, weights.clone());
    let kernel = full.kernel();
    let reduced = build_system(order, weights, &[2, 3]).kernel();
    Classification {
        generators_agree: reduced.vectors == kernel.vectors,
        kernel,
    }
}

/// The square-ish subsystem on the unknowns with some index `≥ order - 2`,
/// used to show that high orders admit only the zero solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank18 {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

impl Rank18 {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.cols
    }
}

/// Restricts the system to the 18 unknowns with max index `≥ order - 2` and
/// to every row that involves only those unknowns. Requires `order > 7` and
/// `λγτ ≠ 0`.
///
/// The qualifying rows come from `r ∈ {order+1, order, order-1, order-2, 3, 2}`;
/// the single `r = order - 2` row is needed for full column rank.
///
/// Full rank is generic, not universal: the rank drops to 17 when two weights
/// coincide or when `λ + γ + τ = -order/2`. The full system still has only
/// the zero solution there.
pub fn rank18_check<S: Scalar>(order: usize, weights: [S; 3]) -> Result<Rank18> {
    if order <= 7 {
        return Err(Error::Precondition(format!(
            "the 18-unknown subsystem needs order > 7, got {order}"
        )));
    }
    if weights.iter().any(Scalar::is_zero) {
        return Err(Error::Precondition(
            "the 18-unknown subsystem needs all three weights nonzero".to_string(),
        ));
    }
    let keep = |idx: &[usize]| idx.iter().any(|&x| x + 2 >= order);
    let all = multi_indices(3, order);
    let cols: Vec<MultiIndex> = all.iter().filter(|i| keep(i)).cloned().collect();
    let position = |idx: &[usize]| cols.iter().position(|c| c == idx);
    let mut sys = LinearSystem::new(cols.len());
    let mut nrows = 0;
    for r in 2..=order + 1 {
        for idx in &all {
            if idx[0] + 1 < r {
                continue;
            }
            let terms = row_terms(&weights, [idx[0], idx[1], idx[2]], r);
            if !terms.iter().all(|(t, _)| keep(t)) {
                continue;
            }
            nrows += 1;
            sys.push_row(
                terms
                    .into_iter()
                    .map(|(t, v)| (position(&t).expect("kept"), v)),
            );
        }
    }
    Ok(Rank18 {
        rows: nrows,
        cols: cols.len(),
        rank: sys.rank(),
    })
}

/// Verdict for one candidate of [`match_catalog`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberVerdict {
    pub name: String,
    pub member: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogMatch {
    pub members: Vec<MemberVerdict>,
    /// The candidates span the whole kernel.
    pub spans: bool,
}

pub fn match_catalog<S: Scalar>(
    kernel: &KernelBasis<S>,
    candidates: &[Representative<S>],
) -> Result<CatalogMatch> {
    let mut members = Vec::with_capacity(candidates.len());
    for c in candidates {
        members.push(MemberVerdict {
            name: c.name.clone(),
            member: kernel.contains(&c.op)?,
            degenerate: c.op.is_degenerate(),
        });
    }
    let ops: Vec<&DensityOp<S>> = candidates.iter().map(|c| &c.op).collect();
    Ok(CatalogMatch {
        members,
        spans: kernel.is_spanned_by(&ops)?,
    })
}

/// The default weight grid: 16 values including every special weight that
/// appears in the classification.
pub fn default_grid() -> Vec<Rational> {
    [
        (0, 1),
        (1, 2),
        (-1, 2),
        (-2, 3),
        (-3, 4),
        (-1, 1),
        (-5, 4),
        (-4, 3),
        (-3, 2),
        (-2, 1),
        (-5, 2),
        (1, 1),
        (2, 1),
        (3, 1),
        (1, 3),
        (2, 5),
    ]
    .iter()
    .map(|&(n, d)| q(n, d))
    .collect()
}

/// All ordered triples from `grid`.
pub fn grid_triples(grid: &[Rational]) -> Vec<[Rational; 3]> {
    let mut out = Vec::with_capacity(grid.len().pow(3));
    for a in grid {
        for b in grid {
            for c in grid {
                out.push([a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub order: usize,
    pub weights: [Rational; 3],
    pub dimension: usize,
    /// Representatives of the covering case that are nonzero kernel members.
    pub matched: Vec<String>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "order,lambda,gamma,tau,dimension,matched_catalog_names";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.order,
            self.weights[0],
            self.weights[1],
            self.weights[2],
            self.dimension,
            self.matched.join(";").replace(',', " ")
        )
    }
}

pub fn sweep_one(order: usize, weights: &[Rational; 3]) -> Result<SweepRow> {
    let kernel = full_system(order, weights.clone()).kernel();
    let reps = theorem_representatives(order, weights)?;
    let verdict = match_catalog(&kernel, &reps)?;
    let matched = verdict
        .members
        .into_iter()
        .filter(|m| m.member && !m.degenerate)
        .map(|m| m.name)
        .collect();
    Ok(SweepRow {
        order,
        weights: weights.clone(),
        dimension: kernel.dimension(),
        matched,
    })
}

/// Kernel dimensions over a list of weight triples, in parallel. Output order
/// follows the input.
pub fn sweep(order: usize, triples: &[[Rational; 3]]) -> Result<Vec<SweepRow>> {
    triples.par_iter().map(|w| sweep_one(order, w)).collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SweepRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Comparison of the system kernel against the brute-force density oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleAgreement {
    pub unknowns: usize,
    pub system_dimension: usize,
    /// Every basis vector of the system kernel has zero defect on every probe.
    pub basis_invariant: bool,
    /// Rank of the probe equations gathered before stopping.
    pub oracle_rank: usize,
    pub probes_used: usize,
}

impl OracleAgreement {
    /// System kernel ⊆ oracle kernel and `rank(oracle) = n - dim`, so the two
    /// kernels coincide.
    pub fn agrees(&self) -> bool {
        self.basis_invariant && self.oracle_rank + self.system_dimension == self.unknowns
    }
}

/// Checks that the kernel of the system equals the set of tables the oracle
/// accepts. Probes with `m ≤ 1` are skipped: translations and dilations never
/// produce a defect once the target weight is `Σ weights + order`.
pub fn oracle_agreement<S: Scalar>(order: usize, weights: [S; 3]) -> OracleAgreement {
    let kernel = full_system(order, weights.clone()).kernel();
    let unknowns = multi_indices(3, order).len();
    let basis_invariant = kernel
        .basis
        .iter()
        .all(|op| is_invariant_by_oracle(op, MonomialBound::Tight));
    let target = unknowns - kernel.dimension();
    let mut inc = IncrementalEchelon::new(unknowns);
    let mut probes = 0;
    'outer: for m in (2..=order + 1).rev() {
        let top = MonomialBound::Tight.per_slot(order, m);
        let mut exps = vec![0usize; 3];
        loop {
            if inc.rank() >= target {
                break 'outer;
            }
            // The defect is homogeneous of degree Σe + m - 1 - order, so
            // lower probes vanish identically.
            if exps.iter().sum::<usize>() + m > order {
                probes += 1;
                for row in probe_rows(&weights, order, m, &exps) {
                    inc.push(row);
                }
            }
            if !crate::densities::advance(&mut exps, top) {
                break;
            }
        }
    }
    OracleAgreement {
        unknowns,
        system_dimension: kernel.dimension(),
        basis_invariant,
        oracle_rank: inc.rank(),
        probes_used: probes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalars::QuadExt;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn columns_follow_lexicographic_order() {
        for k in 0..6 {
            for (c, idx) in multi_indices(3, k).iter().enumerate() {
                assert_eq!(column(k, idx), c);
            }
        }
    }

    #[test]
    fn order_zero_is_the_scalar_operator() {
        let c = classify(0, [q(1, 3), r(2), r(-5)]);
        assert_eq!(c.dimension(), 1);
        assert_eq!(c.kernel.basis[0].coeff(&[0, 0, 0]), r(1));
    }

    #[test]
    fn wronskian_solves_its_system() {
        for l in [q(1, 3), r(-1), r(0), q(-5, 4)] {
            let sys = full_system(3, [l.clone(), l.clone(), l.clone()]);
            assert!(sys.is_solution(&catalog::ff_delta3(l)));
        }
    }

    #[test]
    fn non_invariant_table_is_rejected() {
        let sys = full_system(3, [r(1), r(2), r(3)]);
        let op = DensityOp::new(vec![r(1), r(2), r(3)], 3, [(vec![3, 0, 0], r(1))]).unwrap();
        assert!(!sys.is_solution(&op));
    }

    #[test]
    fn rank18_preconditions() {
        assert!(matches!(
            rank18_check(7, [r(1), r(1), r(1)]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            rank18_check(9, [r(0), r(1), r(1)]),
            Err(Error::Precondition(_))
        ));
        let out = rank18_check(8, [r(1), r(2), r(3)]).unwrap();
        assert_eq!((out.rows, out.cols, out.rank), (23, 18, 18));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let k = full_system(2, [r(1), r(1), r(1)]).kernel();
        let op = catalog::ff_delta3(r(1));
        assert!(matches!(k.contains(&op), Err(Error::Shape(_))));
    }

    #[test]
    fn theta_lives_in_the_kernel_over_the_extension() {
        let sign = catalog::ThetaSign::Plus;
        let k: QuadExt = catalog::theta_weight(sign).unwrap();
        let c = classify(5, [k.clone(), k.clone(), k]);
        assert!(c
            .kernel
            .contains(&catalog::ff_theta(sign).unwrap())
            .unwrap());
    }

    #[test]
    fn sweep_csv_shape() {
        let rows = sweep(1, &grid_triples(&[r(0), r(1)])).unwrap();
        assert_eq!(rows.len(), 8);
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with(SweepRow::CSV_HEADER));
        assert_eq!(csv.lines().count(), 9);
        assert_eq!(rows[0].dimension, 3);
    }

    #[test]
    fn oracle_agrees_on_a_small_case() {
        let a = oracle_agreement(3, [q(1, 3), r(2), q(-1, 2)]);
        assert!(a.agrees(), "{a:?}");
    }
}
