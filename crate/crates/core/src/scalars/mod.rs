//! Exact scalar fields: Q and Q(√21).

mod quad;
mod rational;

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

pub use quad::QuadExt;
pub use rational::{q, Rational};

use crate::error::Error;

/// A field of characteristic zero with exact arithmetic.
///
/// The kernel engine, the density oracle and the operator algebra are all
/// generic over this trait so that the same code runs over Q and over Q(√21).
pub trait Scalar:
    Clone
    + Eq
    + Hash
    + Debug
    + Display
    + FromStr<Err = Error>
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    /// Human-readable name of the field.
    const FIELD: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;

    /// The element √21, if the field contains it.
    fn sqrt21() -> Option<Self> {
        None
    }

    /// The value as a rational, when it lies in Q.
    fn to_rational(&self) -> Option<Rational>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Scalar for Rational {
    const FIELD: &'static str = "Q";

    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Scalar for QuadExt {
    const FIELD: &'static str = "Q(sqrt21)";

    fn zero() -> Self {
        QuadExt::default()
    }
    fn one() -> Self {
        QuadExt::rational(Rational::one())
    }
    fn from_int(n: i64) -> Self {
        QuadExt::rational(Rational::from_integer(n))
    }
    fn from_rational(r: &Rational) -> Self {
        QuadExt::rational(r.clone())
    }
    fn is_zero(&self) -> bool {
        QuadExt::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
    fn sqrt21() -> Option<Self> {
        Some(QuadExt::sqrt21())
    }
    fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.a.clone())
    }
}

/// Binomial coefficient `C(n, k)` as a field element; zero when `k > n`.
pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    S::from_int(binomial_u64(n, k) as i64)
}

pub fn binomial_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Multinomial coefficient `(Σ parts)! / Π parts!`.
pub fn multinomial(parts: &[usize]) -> u64 {
    let mut total = 0;
    let mut acc = 1u64;
    for &p in parts {
        total += p;
        acc *= binomial_u64(total, p);
    }
    acc
}

/// Descending factorial `n (n-1) ... (n-k+1)`; zero when `k > n`.
pub fn falling(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    ((n - k + 1)..=n).map(|x| x as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quad(a: Rational, b: Rational) -> QuadExt {
        QuadExt::new(a, b)
    }

    #[test]
    fn sqrt21_squares_to_21() {
        let r = QuadExt::sqrt21();
        assert_eq!(&r * &r, QuadExt::from_int(21));
    }

    #[test]
    fn unit_is_identity() {
        let x = quad(q(3, 7), q(-2, 5));
        assert_eq!(QuadExt::one() * x.clone(), x);
    }

    #[test]
    fn conjugate_product_is_norm() {
        let x = quad(q(-4, 1), q(-1, 1));
        let y = quad(q(-4, 1), q(1, 1));
        assert_eq!(x * y, QuadExt::from_int(-5));
    }

    #[test]
    fn quad_strings_round_trip() {
        for s in ["0", "-3/4", "-3/4-1/12*sqrt21", "1/2+5*sqrt21", "-1*sqrt21"] {
            let x: QuadExt = s.parse().unwrap();
            let again: QuadExt = x.to_string().parse().unwrap();
            assert_eq!(x, again, "{s}");
        }
        let k: QuadExt = "-3/4-1/12*sqrt21".parse().unwrap();
        assert_eq!(k, quad(q(-3, 4), q(-1, 12)));
        assert_eq!(k.to_string(), "-3/4-1/12*sqrt21");
        assert_eq!("sqrt21".parse::<QuadExt>().unwrap(), QuadExt::sqrt21());
        assert!("1+x*sqrt21".parse::<QuadExt>().is_err());
    }

    #[test]
    fn combinatorial_helpers() {
        assert_eq!(binomial_u64(5, 2), 10);
        assert_eq!(binomial_u64(2, 5), 0);
        assert_eq!(multinomial(&[1, 1, 1]), 6);
        assert_eq!(multinomial(&[2, 0, 1]), 3);
        assert_eq!(falling(5, 2), 20);
        assert_eq!(falling(2, 3), 0);
        assert_eq!(falling(4, 0), 1);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..12).prop_map(|(n, d)| q(n, d))
    }

    fn any_rational() -> impl Strategy<Value = Rational> {
        prop_oneof![
            small_rational(),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| q(n, d)),
        ]
    }

    fn any_quad() -> impl Strategy<Value = QuadExt> {
        (small_rational(), small_rational()).prop_map(|(a, b)| quad(a, b))
    }

    fn field_axioms<S: Scalar>(x: S, y: S, z: S) {
        assert_eq!(
            (x.clone() + y.clone()) + z.clone(),
            x.clone() + (y.clone() + z.clone())
        );
        assert_eq!(
            (x.clone() * y.clone()) * z.clone(),
            x.clone() * (y.clone() * z.clone())
        );
        assert_eq!(
            x.clone() * (y.clone() + z.clone()),
            x.clone() * y.clone() + x.clone() * z.clone()
        );
        assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        assert_eq!(x.clone() - x.clone(), S::zero());
        match x.inv() {
            Some(inv) => assert_eq!(x * inv, S::one()),
            None => assert!(x.is_zero()),
        }
    }

    proptest! {
        #[test]
        fn rational_field_axioms(x in any_rational(), y in any_rational(), z in any_rational()) {
            field_axioms(x, y, z);
        }

        #[test]
        fn quad_field_axioms(x in any_quad(), y in any_quad(), z in any_quad()) {
            field_axioms(x, y, z);
        }

        #[test]
        fn normalization_is_idempotent(x in any_rational()) {
            let once: Rational = x.to_string().parse().unwrap();
            let twice: Rational = once.to_string().parse().unwrap();
            prop_assert_eq!(&once, &x);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn inline_path_matches_bigint(a in any_rational(), b in any_rational()) {
            prop_assert_eq!((&a + &b).to_big(), a.to_big() + b.to_big());
            prop_assert_eq!((&a - &b).to_big(), a.to_big() - b.to_big());
            prop_assert_eq!((&a * &b).to_big(), a.to_big() * b.to_big());
        }
    }
}
