//! Polynomial weighted densities `φ(x)(dx)^λ` and the action of polynomial
//! vector fields on them.
//!
//! This module evaluates operators on actual densities and measures how far
//! they are from commuting with the Lie derivative. It knows nothing about the
//! closed-form invariance equations and serves as the independent check on
//! them.

use crate::error::{Error, Result};
use crate::opcore::DensityOp;
use crate::scalars::Scalar;

fn trim<S: Scalar>(mut v: Vec<S>) -> Vec<S> {
    while v.last().is_some_and(Scalar::is_zero) {
        v.pop();
    }
    v
}

fn poly_derivative<S: Scalar>(p: &[S], times: usize) -> Vec<S> {
    if times >= p.len() {
        return Vec::new();
    }
    (times..p.len())
        .map(|m| {
            if p[m].is_zero() {
                return S::zero();
            }
            let factor: i64 = ((m - times + 1)..=m).map(|x| x as i64).product();
            p[m].clone() * S::from_int(factor)
        })
        .collect()
}

fn poly_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let nz_b: Vec<usize> = (0..b.len()).filter(|&j| !b[j].is_zero()).collect();
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for &j in &nz_b {
            out[i + j] = out[i + j].clone() + x.clone() * &b[j];
        }
    }
    trim(out)
}

fn poly_add<S: Scalar>(a: &[S], b: &[S], sign: &S) -> Vec<S> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(S::zero);
            match b.get(i) {
                Some(y) if !y.is_zero() => x + y.clone() * sign,
                _ => x,
            }
        })
        .collect();
    trim(out)
}

fn poly_scale<S: Scalar>(p: &[S], c: &S) -> Vec<S> {
    trim(p.iter().map(|x| x.clone() * c).collect())
}

/// `φ(x)(dx)^λ` with polynomial `φ`; `coeffs[m]` is the coefficient of `x^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDensity<S> {
    coeffs: Vec<S>,
    weight: S,
}

impl<S: Scalar> WeightedDensity<S> {
    pub fn new(coeffs: Vec<S>, weight: S) -> Self {
        WeightedDensity {
            coeffs: trim(coeffs),
            weight,
        }
    }

    pub fn zero(weight: S) -> Self {
        WeightedDensity::new(Vec::new(), weight)
    }

    /// `x^m (dx)^λ`.
    pub fn monomial(m: usize, weight: S) -> Self {
        let mut coeffs = vec![S::zero(); m + 1];
        coeffs[m] = S::one();
        WeightedDensity { coeffs, weight }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn weight(&self) -> &S {
        &self.weight
    }

    /// `None` for the zero density.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `d^n φ / dx^n` as a bare polynomial.
    pub fn derivative(&self, n: usize) -> Vec<S> {
        poly_derivative(&self.coeffs, n)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.weight != other.weight {
            return Err(Error::WeightMismatch {
                slot: 0,
                expected: self.weight.to_string(),
                found: other.weight.to_string(),
            });
        }
        Ok(WeightedDensity::new(
            poly_add(&self.coeffs, &other.coeffs, &-S::one()),
            self.weight.clone(),
        ))
    }
}

/// `f(x) d/dx` with polynomial `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField1D<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> VectorField1D<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        VectorField1D {
            coeffs: trim(coeffs),
        }
    }

    /// `x^m d/dx`.
    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![S::zero(); m + 1];
        coeffs[m] = S::one();
        VectorField1D { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `[f d/dx, g d/dx] = (f g' - f' g) d/dx`.
    pub fn bracket(&self, other: &Self) -> Self {
        let fg = poly_mul(&self.coeffs, &poly_derivative(&other.coeffs, 1));
        let gf = poly_mul(&poly_derivative(&self.coeffs, 1), &other.coeffs);
        VectorField1D::new(poly_add(&fg, &gf, &-S::one()))
    }
}

/// `L_{f d/dx} (φ (dx)^λ) = (f φ' + λ f' φ)(dx)^λ`.
pub fn lie_derivative<S: Scalar>(
    field: &VectorField1D<S>,
    phi: &WeightedDensity<S>,
) -> WeightedDensity<S> {
    let transport = poly_mul(&field.coeffs, &phi.derivative(1));
    let stretch = poly_mul(&poly_derivative(&field.coeffs, 1), &phi.coeffs);
    WeightedDensity::new(
        poly_add(&transport, &poly_scale(&stretch, &phi.weight), &S::one()),
        phi.weight.clone(),
    )
}

fn check_args<S: Scalar>(op: &DensityOp<S>, args: &[WeightedDensity<S>]) -> Result<()> {
    if args.len() != op.arity() {
        return Err(Error::Arity {
            expected: op.arity(),
            got: args.len(),
        });
    }
    for (slot, (arg, w)) in args.iter().zip(op.weights()).enumerate() {
        if arg.weight != *w {
            return Err(Error::WeightMismatch {
                slot: slot + 1,
                expected: w.to_string(),
                found: arg.weight.to_string(),
            });
        }
    }
    Ok(())
}

fn evaluate<S: Scalar>(op: &DensityOp<S>, args: &[WeightedDensity<S>]) -> Vec<S> {
    let mut total: Vec<S> = Vec::new();
    for (idx, val) in op.coeffs() {
        let mut term = vec![val.clone()];
        for (arg, &n) in args.iter().zip(idx) {
            term = poly_mul(&term, &arg.derivative(n));
            if term.is_empty() {
                break;
            }
        }
        total = poly_add(&total, &term, &S::one());
    }
    total
}

/// `Σ α_{i,j,l} φ^{(i)} ψ^{(j)} χ^{(l)}` as a density of the target weight.
pub fn apply_op<S: Scalar>(
    op: &DensityOp<S>,
    args: &[WeightedDensity<S>],
) -> Result<WeightedDensity<S>> {
    check_args(op, args)?;
    Ok(WeightedDensity::new(evaluate(op, args), op.target_weight()))
}

/// `L_X(A(args)) - Σ_i A(..., L_X args_i, ...)`; identically zero in the
/// arguments exactly when `A` commutes with `X`.
pub fn defect<S: Scalar>(
    op: &DensityOp<S>,
    field: &VectorField1D<S>,
    args: &[WeightedDensity<S>],
) -> Result<WeightedDensity<S>> {
    let image = apply_op(op, args)?;
    let mut total = lie_derivative(field, &image).coeffs;
    let mut shifted = args.to_vec();
    for i in 0..args.len() {
        shifted[i] = lie_derivative(field, &args[i]);
        total = poly_add(&total, &evaluate(op, &shifted), &-S::one());
        shifted[i] = args[i].clone();
    }
    Ok(WeightedDensity::new(total, image.weight))
}

/// Largest monomial degree tested per argument against `x^m d/dx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialBound {
    /// `order + m + 1` per slot.
    Generous,
    /// `order` per slot. Sufficient: the defect against `x^m d/dx` is a
    /// triangular combination of the coefficients of `f^{(r)}`, each a
    /// constant-coefficient form of order `< order` in the arguments.
    Tight,
}

impl MonomialBound {
    pub fn per_slot(self, order: usize, field_degree: usize) -> usize {
        match self {
            MonomialBound::Generous => order + field_degree + 1,
            MonomialBound::Tight => order,
        }
    }
}

/// First failing probe of the brute-force invariance test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectWitness<S> {
    pub field_degree: usize,
    pub exponents: Vec<usize>,
    pub defect: WeightedDensity<S>,
}

/// Tests invariance under `x^m d/dx` for `m = 0..=order+1` on every tuple of
/// monomial arguments within `bound`. Returns the first nonzero defect.
pub fn find_defect<S: Scalar>(op: &DensityOp<S>, bound: MonomialBound) -> Option<DefectWitness<S>> {
    let k = op.order();
    for m in 0..=k + 1 {
        let field = VectorField1D::monomial(m);
        let top = bound.per_slot(k, m);
        let mut exps = vec![0usize; op.arity()];
        loop {
            let args: Vec<WeightedDensity<S>> = exps
                .iter()
                .zip(op.weights())
                .map(|(&e, w)| WeightedDensity::monomial(e, w.clone()))
                .collect();
            let d = defect(op, &field, &args).expect("arguments built from the operator");
            if !d.is_zero() {
                return Some(DefectWitness {
                    field_degree: m,
                    exponents: exps,
                    defect: d,
                });
            }
            if !advance(&mut exps, top) {
                break;
            }
        }
    }
    None
}

/// Brute-force invariance verdict on monomial arguments.
pub fn is_invariant_by_oracle<S: Scalar>(op: &DensityOp<S>, bound: MonomialBound) -> bool {
    find_defect(op, bound).is_none()
}

/// Defects of every unit coefficient table of the given shape on one probe
/// `(x^m d/dx; x^{e_1}, ..., x^{e_p})`.
///
/// Returns one row per monomial of the defect polynomial; column `c` is the
/// contribution of the `c`-th multi-index in lexicographic order. A table
/// `α` is invariant iff every such row annihilates it for all probes.
pub fn probe_rows<S: Scalar>(
    weights: &[S],
    order: usize,
    field_degree: usize,
    exps: &[usize],
) -> Vec<Vec<S>> {
    let unknowns = crate::opcore::multi_indices(weights.len(), order);
    let field = VectorField1D::monomial(field_degree);
    let args: Vec<WeightedDensity<S>> = exps
        .iter()
        .zip(weights)
        .map(|(&e, w)| WeightedDensity::monomial(e, w.clone()))
        .collect();
    let mut rows: Vec<Vec<S>> = Vec::new();
    for (col, idx) in unknowns.iter().enumerate() {
        let unit = DensityOp::new(weights.to_vec(), order, [(idx.clone(), S::one())])
            .expect("well-formed unit table");
        let d = defect(&unit, &field, &args).expect("arguments built from the shape");
        if rows.len() < d.coeffs.len() {
            rows.resize_with(d.coeffs.len(), || vec![S::zero(); unknowns.len()]);
        }
        for (deg, v) in d.coeffs.iter().enumerate() {
            rows[deg][col] = v.clone();
        }
    }
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    rows
}

/// Odometer over `{0..=top}^n`.
pub(crate) fn advance(exps: &mut [usize], top: usize) -> bool {
    for e in exps.iter_mut().rev() {
        if *e < top {
            *e += 1;
            return true;
        }
        *e = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::DensityOp;
    use crate::scalars::{q, Rational};
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn mono(m: usize, w: Rational) -> WeightedDensity<Rational> {
        WeightedDensity::monomial(m, w)
    }

    fn mult3(w: [Rational; 3]) -> DensityOp<Rational> {
        DensityOp::new(w.to_vec(), 0, [(vec![0, 0, 0], r(1))]).unwrap()
    }

    #[test]
    fn translation_differentiates() {
        let lam = q(1, 3);
        let out = lie_derivative(&VectorField1D::monomial(0), &mono(2, lam.clone()));
        assert_eq!(out, WeightedDensity::new(vec![r(0), r(2)], lam));
    }

    #[test]
    fn euler_field_has_eigenvalue_m_plus_lambda() {
        let lam = q(-2, 3);
        for m in 0..5 {
            let out = lie_derivative(&VectorField1D::monomial(1), &mono(m, lam.clone()));
            let expected = mono(m, lam.clone());
            let c = r(m as i64) + lam.clone();
            let expected = WeightedDensity::new(
                expected.coeffs.iter().map(|x| x.clone() * &c).collect(),
                lam.clone(),
            );
            assert_eq!(out, expected);
        }
    }

    #[test]
    fn cubic_field_on_linear_density() {
        let out = lie_derivative(&VectorField1D::monomial(3), &mono(1, r(2)));
        assert_eq!(
            out,
            WeightedDensity::new(vec![r(0), r(0), r(0), r(7)], r(2))
        );
    }

    #[test]
    fn scalar_op_multiplies() {
        let (l, g, t) = (q(1, 2), r(-3), q(2, 7));
        let op = mult3([l.clone(), g.clone(), t.clone()]);
        let out = apply_op(
            &op,
            &[mono(1, l.clone()), mono(2, g.clone()), mono(3, t.clone())],
        )
        .unwrap();
        assert_eq!(out, mono(6, l + g + t));
    }

    #[test]
    fn grozman_with_constant_second_argument() {
        let w = q(-2, 3);
        let gz = DensityOp::new(
            vec![w.clone(), w.clone()],
            3,
            [
                (vec![3, 0], r(2)),
                (vec![2, 1], r(3)),
                (vec![1, 2], r(-3)),
                (vec![0, 3], r(-2)),
            ],
        )
        .unwrap();
        let out = apply_op(&gz, &[mono(3, w.clone()), mono(0, w)]).unwrap();
        assert_eq!(out, WeightedDensity::new(vec![r(12)], q(5, 3)));
    }

    #[test]
    fn zero_arguments_give_zero() {
        let op = DensityOp::from_vector(vec![r(1), r(2), r(3)], 2, &vec![r(1); 6]).unwrap();
        let zeros: Vec<_> = op
            .weights()
            .iter()
            .map(|w| WeightedDensity::zero(w.clone()))
            .collect();
        assert!(apply_op(&op, &zeros).unwrap().is_zero());
    }

    #[test]
    fn argument_errors() {
        let op = mult3([r(0), r(0), r(0)]);
        assert_eq!(
            apply_op(&op, &[mono(0, r(0))]).unwrap_err(),
            Error::Arity {
                expected: 3,
                got: 1
            }
        );
        assert!(matches!(
            apply_op(&op, &[mono(0, r(0)), mono(0, r(1)), mono(0, r(0))]),
            Err(Error::WeightMismatch { slot: 2, .. })
        ));
    }

    #[test]
    fn scalar_op_has_no_defect() {
        let w = [q(1, 3), q(-1, 2), r(2)];
        let op = mult3(w.clone());
        let field = VectorField1D::monomial(3);
        for a in 0..3 {
            for b in 0..3 {
                let args = [
                    mono(a, w[0].clone()),
                    mono(b, w[1].clone()),
                    mono(2, w[2].clone()),
                ];
                assert!(defect(&op, &field, &args).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn poisson_times_density_has_no_defect() {
        // {φ,ψ}χ at (1,1,0) = φ'ψχ - φψ'χ.
        let op = DensityOp::new(
            vec![r(1), r(1), r(0)],
            1,
            [(vec![1, 0, 0], r(1)), (vec![0, 1, 0], r(-1))],
        )
        .unwrap();
        let field = VectorField1D::monomial(2);
        let args = [mono(1, r(1)), mono(1, r(1)), mono(0, r(0))];
        assert!(defect(&op, &field, &args).unwrap().is_zero());
        assert!(is_invariant_by_oracle(&op, MonomialBound::Generous));
    }

    #[test]
    fn third_derivative_of_first_argument_is_not_invariant() {
        let op = DensityOp::new(vec![r(0), r(0), r(0)], 3, [(vec![3, 0, 0], r(1))]).unwrap();
        let field = VectorField1D::monomial(2);
        let args = [mono(3, r(0)), mono(0, r(0)), mono(0, r(0))];
        assert!(!defect(&op, &field, &args).unwrap().is_zero());
        assert!(find_defect(&op, MonomialBound::Tight).is_some());
    }

    fn small_poly(max_len: usize) -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-5i64..6, 1i64..4).prop_map(|(n, d)| q(n, d)), 0..max_len)
    }

    proptest! {
        #[test]
        fn lie_derivative_is_an_action(
            f in small_poly(5),
            g in small_poly(5),
            phi in small_poly(7),
            (n, d) in (-6i64..6, 1i64..5),
        ) {
            let lam = q(n, d);
            let x = VectorField1D::new(f);
            let y = VectorField1D::new(g);
            let phi = WeightedDensity::new(phi, lam);
            let lhs = lie_derivative(&x.bracket(&y), &phi);
            let xy = lie_derivative(&x, &lie_derivative(&y, &phi));
            let yx = lie_derivative(&y, &lie_derivative(&x, &phi));
            prop_assert_eq!(lhs, xy.sub(&yx).unwrap());
        }

        #[test]
        fn defect_is_multilinear(
            a in small_poly(4), b in small_poly(4), c in small_poly(4),
            coeffs in prop::collection::vec((-3i64..4).prop_map(Rational::from_integer), 6),
            s in -3i64..4,
        ) {
            let w = [q(1, 2), r(-1), r(0)];
            let op = DensityOp::from_vector(w.to_vec(), 2, &coeffs).unwrap();
            let field = VectorField1D::monomial(3);
            let dens = |p: &Vec<Rational>, wt: &Rational| WeightedDensity::new(p.clone(), wt.clone());
            let scaled: Vec<Rational> = a.iter().map(|x| x.clone() * r(s)).collect();
            let sum: Vec<Rational> = poly_add(&scaled, &c, &r(1));
            let lhs = defect(&op, &field, &[dens(&sum, &w[0]), dens(&b, &w[1]), dens(&c, &w[2])]).unwrap();
            let d1 = defect(&op, &field, &[dens(&a, &w[0]), dens(&b, &w[1]), dens(&c, &w[2])]).unwrap();
            let d2 = defect(&op, &field, &[dens(&c, &w[0]), dens(&b, &w[1]), dens(&c, &w[2])]).unwrap();
            let rhs = poly_add(&poly_scale(d1.coeffs(), &r(s)), d2.coeffs(), &r(1));
            prop_assert_eq!(lhs.coeffs().to_vec(), rhs);
        }
    }
}
