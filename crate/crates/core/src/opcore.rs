//! Constant-coefficient multilinear differential operators on weighted
//! densities, stored as sparse coefficient tensors, together with the
//! operations that build new operators from old: permutation of arguments,
//! formal adjoints (dualization) and insertion of one operator into a slot
//! of another.
//!
//! An operator of arity `p` and order `k` acts as
//! `Σ α_{i_1..i_p} f_1^{(i_1)} ··· f_p^{(i_p)}` with `i_1 + ... + i_p = k`.
//! Its target weight is never stored: it is always the sum of the source
//! weights plus the order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{multinomial, Scalar};

/// Derivative orders, one per argument slot.
pub type MultiIndex = Vec<usize>;

pub const MAX_ARITY: usize = 3;

/// All multi-indices of the given arity summing to `order`, in lexicographic order.
pub fn multi_indices(arity: usize, order: usize) -> Vec<MultiIndex> {
    fn rec(arity: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if arity == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=remaining {
            prefix.push(i);
            rec(arity - 1, remaining - i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if arity > 0 {
        rec(arity, order, &mut Vec::with_capacity(arity), &mut out);
    }
    out
}

/// A constant-coefficient operator `F_{w_1} ⊗ ... ⊗ F_{w_p} → F_μ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensityOp<S> {
    weights: Vec<S>,
    order: usize,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> DensityOp<S> {
    /// Validates shape, merges repeated indices and drops zero coefficients.
    pub fn new(
        weights: Vec<S>,
        order: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self> {
        let arity = weights.len();
        if !(1..=MAX_ARITY).contains(&arity) {
            return Err(Error::Shape(format!("arity {arity} is not in 1..=3")));
        }
        let mut table: BTreeMap<MultiIndex, S> = BTreeMap::new();
        for (idx, val) in coeffs {
            if idx.len() != arity {
                return Err(Error::Shape(format!(
                    "index {idx:?} has length {}, operator arity is {arity}",
                    idx.len()
                )));
            }
            if idx.iter().sum::<usize>() != order {
                return Err(Error::Shape(format!(
                    "index {idx:?} does not sum to the order {order}"
                )));
            }
            let slot = table.entry(idx).or_insert_with(S::zero);
            *slot = slot.clone() + val;
        }
        table.retain(|_, v| !v.is_zero());
        Ok(DensityOp {
            weights,
            order,
            coeffs: table,
        })
    }

    pub fn zero(weights: Vec<S>, order: usize) -> Result<Self> {
        Self::new(weights, order, [])
    }

    /// Builds from a coordinate vector over [`multi_indices`] order.
    pub fn from_vector(weights: Vec<S>, order: usize, values: &[S]) -> Result<Self> {
        let idx = multi_indices(weights.len(), order);
        if idx.len() != values.len() {
            return Err(Error::Shape(format!(
                "expected {} coordinates, got {}",
                idx.len(),
                values.len()
            )));
        }
        Self::new(weights, order, idx.into_iter().zip(values.iter().cloned()))
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, S> {
        &self.coeffs
    }

    pub fn coeff(&self, idx: &[usize]) -> S {
        self.coeffs.get(idx).cloned().unwrap_or_else(S::zero)
    }

    /// `μ = Σ w_i + order`.
    pub fn target_weight(&self) -> S {
        self.weights
            .iter()
            .fold(S::from_int(self.order as i64), |acc, w| acc + w)
    }

    /// An identically zero table, e.g. a family evaluated at a weight where it vanishes.
    pub fn is_degenerate(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coordinates over [`multi_indices`] order.
    pub fn to_vector(&self) -> Vec<S> {
        multi_indices(self.arity(), self.order)
            .iter()
            .map(|i| self.coeff(i))
            .collect()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.order == other.order && self.weights == other.weights
    }

    pub fn scale(&self, c: &S) -> Self {
        DensityOp {
            weights: self.weights.clone(),
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v.clone() * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::Shape(
                "operators differ in weights or order".to_string(),
            ));
        }
        Self::new(
            self.weights.clone(),
            self.order,
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(k, v)| (k.clone(), v.clone())),
        )
    }

    /// Linear combination `Σ c_i A_i` of operators sharing one shape.
    pub fn combination(terms: &[(S, &DensityOp<S>)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Shape("empty combination".to_string()))?;
        let mut acc = DensityOp::zero(first.weights.clone(), first.order)?;
        for (c, op) in terms {
            acc = acc.add(&op.scale(c))?;
        }
        Ok(acc)
    }

    /// `A^σ`: argument `i` of `A` becomes argument `σ(i)`, so
    /// `A^σ(σ(f_1, f_2, f_3)) = A(f_1, f_2, f_3)` and the weights move with it.
    pub fn permute(&self, sigma: &Permutation3) -> Result<Self> {
        if self.arity() != 3 {
            return Err(Error::Shape(format!(
                "permutations act on ternary operators, got arity {}",
                self.arity()
            )));
        }
        let mut weights = self.weights.clone();
        for i in 0..3 {
            weights[sigma.apply(i)] = self.weights[i].clone();
        }
        let coeffs = self.coeffs.iter().map(|(idx, v)| {
            let mut moved = vec![0; 3];
            for i in 0..3 {
                moved[sigma.apply(i)] = idx[i];
            }
            (moved, v.clone())
        });
        Self::new(weights, self.order, coeffs)
    }

    /// Formal adjoint in `slot` (1-based), using `(F_α)* = F_{1-α}`.
    ///
    /// The argument in `slot` is replaced by a density of weight `1 - μ` and
    /// the target becomes `1 - w_slot`. Each term is integrated by parts: the
    /// `i` derivatives on the dualized argument move onto the product of the
    /// others with sign `(-1)^i`, distributed by the Leibniz rule.
    pub fn dualize(&self, slot: usize) -> Result<Self> {
        let arity = self.arity();
        if slot == 0 || slot > arity {
            return Err(Error::InvalidSlot { slot, arity });
        }
        let s = slot - 1;
        let mut weights = self.weights.clone();
        weights[s] = S::one() - self.target_weight();
        let mut out: Vec<(MultiIndex, S)> = Vec::new();
        for (idx, val) in &self.coeffs {
            let moved = idx[s];
            let sign = if moved % 2 == 0 { S::one() } else { -S::one() };
            for split in multi_indices(arity, moved) {
                let mut new_idx = idx.clone();
                new_idx[s] = 0;
                for (t, p) in split.iter().enumerate() {
                    new_idx[t] += p;
                }
                let c = S::from_int(multinomial(&split) as i64);
                out.push((new_idx, val.clone() * &sign * &c));
            }
        }
        Self::new(weights, self.order, out)
    }

    /// Composition placing `inner`'s output into argument `slot` (1-based) of `self`.
    ///
    /// The arguments of the result are: `self`'s arguments before `slot`,
    /// then all of `inner`'s arguments, then `self`'s remaining arguments.
    pub fn insert(&self, slot: usize, inner: &DensityOp<S>) -> Result<Self> {
        let arity = self.arity();
        if slot == 0 || slot > arity {
            return Err(Error::InvalidSlot { slot, arity });
        }
        let s = slot - 1;
        let new_arity = arity + inner.arity() - 1;
        if new_arity > MAX_ARITY {
            return Err(Error::Composition(format!(
                "result would have arity {new_arity}"
            )));
        }
        if inner.target_weight() != self.weights[s] {
            return Err(Error::Composition(format!(
                "inner operator lands in weight {}, slot {slot} expects {}",
                inner.target_weight(),
                self.weights[s]
            )));
        }
        let mut weights = self.weights[..s].to_vec();
        weights.extend(inner.weights.iter().cloned());
        weights.extend(self.weights[s + 1..].iter().cloned());

        let mut out: Vec<(MultiIndex, S)> = Vec::new();
        for (oidx, oval) in &self.coeffs {
            let m = oidx[s];
            for (iidx, ival) in &inner.coeffs {
                let base = oval.clone() * ival;
                for split in multi_indices(inner.arity(), m) {
                    let mut idx = oidx[..s].to_vec();
                    idx.extend(iidx.iter().zip(&split).map(|(a, b)| a + b));
                    idx.extend_from_slice(&oidx[s + 1..]);
                    let c = S::from_int(multinomial(&split) as i64);
                    out.push((idx, base.clone() * &c));
                }
            }
        }
        Self::new(weights, self.order + inner.order, out)
    }

    /// Re-expresses the table over a larger field.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DensityOp<T> {
        DensityOp {
            weights: self.weights.iter().map(&f).collect(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
        }
    }

    pub fn to_document(&self) -> OpDocument {
        OpDocument {
            arity: self.arity(),
            weights: self.weights.iter().map(|w| w.to_string()).collect(),
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(idx, v)| CoeffEntry {
                    idx: idx.clone(),
                    val: v.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &OpDocument) -> Result<Self> {
        if doc.weights.len() != doc.arity {
            return Err(Error::Format(format!(
                "arity {} but {} weights",
                doc.arity,
                doc.weights.len()
            )));
        }
        let weights = doc
            .weights
            .iter()
            .map(|w| w.parse())
            .collect::<Result<Vec<S>>>()?;
        let coeffs = doc
            .coeffs
            .iter()
            .map(|c| Ok((c.idx.clone(), c.val.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights, doc.order, coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OpDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Wire form of a [`DensityOp`]; coefficients are sorted by index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpDocument {
    pub arity: usize,
    pub weights: Vec<String>,
    pub order: usize,
    pub coeffs: Vec<CoeffEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub idx: Vec<usize>,
    pub val: String,
}

/// A bijection of the three argument slots, stored 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Permutation3 {
    images: [usize; 3],
}

impl Permutation3 {
    pub fn new(images: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &i in &images {
            if i >= 3 || seen[i] {
                return Err(Error::Permutation(images.to_vec()));
            }
            seen[i] = true;
        }
        Ok(Permutation3 { images })
    }

    pub fn identity() -> Self {
        Permutation3 { images: [0, 1, 2] }
    }

    /// Swaps slots `a` and `b` (0-based).
    pub fn transposition(a: usize, b: usize) -> Self {
        let mut images = [0, 1, 2];
        images.swap(a, b);
        Permutation3::new(images).expect("valid transposition")
    }

    pub fn images(&self) -> [usize; 3] {
        self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation3) -> Self {
        Permutation3 {
            images: [
                self.apply(other.apply(0)),
                self.apply(other.apply(1)),
                self.apply(other.apply(2)),
            ],
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = [0; 3];
        for i in 0..3 {
            images[self.images[i]] = i;
        }
        Permutation3 { images }
    }

    pub fn sign(&self) -> i64 {
        let mut inversions = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                if self.images[i] > self.images[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn all() -> [Permutation3; 6] {
        [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ]
        .map(|images| Permutation3 { images })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, Rational};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn d() -> DensityOp<Rational> {
        DensityOp::new(vec![r(0)], 1, [(vec![1], r(1))]).unwrap()
    }

    fn poisson(l: Rational, m: Rational) -> DensityOp<Rational> {
        DensityOp::new(
            vec![l.clone(), m.clone()],
            1,
            [(vec![1, 0], m), (vec![0, 1], -l)],
        )
        .unwrap()
    }

    fn mult(weights: Vec<Rational>) -> DensityOp<Rational> {
        let n = weights.len();
        DensityOp::new(weights, 0, [(vec![0; n], r(1))]).unwrap()
    }

    /// {φ, ψ}·χ at weights (1, 1, 0).
    fn poisson_times_density() -> DensityOp<Rational> {
        mult(vec![r(3), r(0)])
            .insert(1, &poisson(r(1), r(1)))
            .unwrap()
    }

    #[test]
    fn multi_indices_are_lexicographic() {
        assert_eq!(
            multi_indices(2, 2),
            vec![vec![0, 2], vec![1, 1], vec![2, 0]]
        );
        assert_eq!(multi_indices(3, 3).len(), 10);
        assert_eq!(multi_indices(3, 0), vec![vec![0, 0, 0]]);
        let idx = multi_indices(3, 4);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(DensityOp::new(vec![r(0)], 2, [(vec![1], r(1))]).is_err());
        assert!(DensityOp::new(vec![r(0), r(0)], 1, [(vec![1], r(1))]).is_err());
        assert!(DensityOp::<Rational>::new(vec![], 0, []).is_err());
        assert!(DensityOp::<Rational>::new(vec![r(0); 4], 0, []).is_err());
    }

    #[test]
    fn target_weight_is_derived() {
        let delta_shape = DensityOp::<Rational>::zero(vec![r(1), r(2), r(3)], 3).unwrap();
        assert_eq!(delta_shape.target_weight(), r(9));
        let xi_shape = DensityOp::<Rational>::zero(vec![q(-5, 2), r(1), r(1)], 4).unwrap();
        assert_eq!(xi_shape.target_weight(), q(7, 2));
        let lam = q(-2, 3);
        assert_eq!(
            mult(vec![lam.clone(), r(5), q(1, 3)]).target_weight(),
            lam + r(5) + q(1, 3)
        );
    }

    #[test]
    fn identity_permutation_is_trivial() {
        let a = poisson_times_density();
        assert_eq!(a.permute(&Permutation3::identity()).unwrap(), a);
    }

    #[test]
    fn transposition_swaps_poisson_arguments() {
        // {φ,ψ}χ = φ'ψ - φψ' at (1,1,0); swapping the first two slots gives
        // ψ'φ - ψφ' with the same weights.
        let a = poisson_times_density();
        let b = a.permute(&Permutation3::transposition(0, 1)).unwrap();
        assert_eq!(b.coeff(&[1, 0, 0]), r(-1));
        assert_eq!(b.coeff(&[0, 1, 0]), r(1));
        assert_eq!(b.weights(), &[r(1), r(1), r(0)]);
        assert_eq!(b, a.scale(&r(-1)));
    }

    #[test]
    fn permutation_moves_weights() {
        let a = DensityOp::new(
            vec![r(1), r(2), r(3)],
            1,
            [(vec![1, 0, 0], r(5)), (vec![0, 0, 1], r(7))],
        )
        .unwrap();
        let cyc = Permutation3::new([1, 2, 0]).unwrap();
        let b = a.permute(&cyc).unwrap();
        assert_eq!(b.weights(), &[r(3), r(1), r(2)]);
        assert_eq!(b.coeff(&[0, 1, 0]), r(5));
        assert_eq!(b.coeff(&[1, 0, 0]), r(7));
    }

    #[test]
    fn permutation_composition_law() {
        let a = DensityOp::from_vector(
            vec![r(1), q(1, 2), r(-3)],
            2,
            &(1..=6).map(r).collect::<Vec<_>>(),
        )
        .unwrap();
        for s in Permutation3::all() {
            for t in Permutation3::all() {
                let lhs = a.permute(&t).unwrap().permute(&s).unwrap();
                assert_eq!(lhs, a.permute(&s.compose(&t)).unwrap());
            }
        }
    }

    #[test]
    fn invalid_permutations_rejected() {
        assert!(Permutation3::new([0, 0, 1]).is_err());
        assert!(Permutation3::new([0, 1, 3]).is_err());
    }

    #[test]
    fn dualizing_scalar_op_only_moves_weights() {
        let (l, g, t) = (q(1, 3), r(2), q(-1, 2));
        let a = mult(vec![l.clone(), g.clone(), t.clone()]);
        let b = a.dualize(1).unwrap();
        assert_eq!(b.weights(), &[r(1) - l - g.clone() - t.clone(), g, t]);
        assert_eq!(b.coeff(&[0, 0, 0]), r(1));
    }

    #[test]
    fn dualization_integrates_by_parts() {
        // ∫ φ' ψ χ ω = -∫ φ (ψ χ ω)' so slot 1 of φ'ψχ dualizes to
        // -(ω'ψχ + ωψ'χ + ωψχ').
        let a = DensityOp::new(vec![r(0), r(0), r(0)], 1, [(vec![1, 0, 0], r(1))]).unwrap();
        let b = a.dualize(1).unwrap();
        for idx in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            assert_eq!(b.coeff(&idx), r(-1));
        }
        assert_eq!(b.weights()[0], r(0));
        assert_eq!(b.target_weight(), r(1));
    }

    #[test]
    fn dualization_rejects_bad_slot() {
        let a = poisson_times_density();
        assert_eq!(
            a.dualize(0).unwrap_err(),
            Error::InvalidSlot { slot: 0, arity: 3 }
        );
        assert!(a.dualize(4).is_err());
    }

    #[test]
    fn double_dualization_is_identity() {
        let a = DensityOp::from_vector(
            vec![q(1, 3), q(-2, 5), r(4)],
            3,
            &(0..10).map(|i| q(i * i - 7, 3)).collect::<Vec<_>>(),
        )
        .unwrap();
        for slot in 1..=3 {
            assert_eq!(a.dualize(slot).unwrap().dualize(slot).unwrap(), a);
        }
    }

    #[test]
    fn d_after_d_is_second_derivative() {
        let dd = d().insert(1, &d());
        // d lands in weight 1, d expects weight 0.
        assert!(matches!(dd, Err(Error::Composition(_))));
        let d_at_one = DensityOp::new(vec![r(1)], 1, [(vec![1], r(1))]).unwrap();
        let dd = d_at_one.insert(1, &d()).unwrap();
        assert_eq!(dd.order(), 2);
        assert_eq!(dd.coeffs().len(), 1);
        assert_eq!(dd.coeff(&[2]), r(1));
    }

    #[test]
    fn insertion_applies_leibniz() {
        // d({φ,ψ}) at λ = γ = -1/2: ({φ,ψ})' = -1/2 (φ'ψ - φψ')' ...
        let half = q(-1, 2);
        let inner = poisson(half.clone(), half.clone());
        let outer = d();
        let c = outer.insert(1, &inner).unwrap();
        assert_eq!(c.weights(), &[half.clone(), half.clone()]);
        assert_eq!(c.order(), 2);
        // {φ,ψ} = -1/2 φ'ψ + 1/2 φψ'; derivative: -1/2 φ''ψ + 1/2 φψ''.
        assert_eq!(c.coeff(&[2, 0]), q(-1, 2));
        assert_eq!(c.coeff(&[1, 1]), r(0));
        assert_eq!(c.coeff(&[0, 2]), q(1, 2));
    }

    #[test]
    fn insertion_respects_arity_cap() {
        let p = poisson(r(1), r(1));
        assert_eq!(mult(vec![r(3), r(0)]).insert(1, &p).unwrap().arity(), 3);
        assert!(matches!(
            mult(vec![r(3), r(0), r(0)]).insert(1, &p),
            Err(Error::Composition(_))
        ));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let a = DensityOp::new(
            vec![q(-2, 3), q(-2, 3)],
            3,
            [
                (vec![3, 0], r(2)),
                (vec![2, 1], r(3)),
                (vec![1, 2], r(-3)),
                (vec![0, 3], q(-2, 7)),
            ],
        )
        .unwrap();
        let text = a.to_json();
        assert!(text.contains("\"-2/3\""));
        let b = DensityOp::from_json(&text).unwrap();
        assert_eq!(a, b);
        let doc = a.to_document();
        let idx: Vec<_> = doc.coeffs.iter().map(|c| c.idx.clone()).collect();
        let mut sorted = idx.clone();
        sorted.sort();
        assert_eq!(idx, sorted);
    }
}
