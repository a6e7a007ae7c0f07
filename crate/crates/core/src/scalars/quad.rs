//! The quadratic field Q(√21).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalars::Rational;

/// `a + b·√21` with rational `a`, `b`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadExt {
    pub a: Rational,
    pub b: Rational,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadExt { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        QuadExt {
            a,
            b: Rational::zero(),
        }
    }

    pub fn sqrt21() -> Self {
        QuadExt::new(Rational::zero(), Rational::one())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadExt::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a² − 21b²`; zero only for zero since √21 is irrational.
    pub fn norm(&self) -> Rational {
        &(&self.a * &self.a) - &(Rational::from_integer(21) * (&self.b * &self.b))
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm().recip()?;
        let c = self.conjugate();
        Some(QuadExt::new(&c.a * &n, &c.b * &n))
    }
}

impl From<Rational> for QuadExt {
    fn from(a: Rational) -> Self {
        QuadExt::rational(a)
    }
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &'a QuadExt) -> QuadExt {
        QuadExt::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &'a QuadExt) -> QuadExt {
        QuadExt::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &'a QuadExt) -> QuadExt {
        if self.is_rational() && rhs.is_rational() {
            return QuadExt::rational(&self.a * &rhs.a);
        }
        let a = &(&self.a * &rhs.a) + &(Rational::from_integer(21) * (&self.b * &rhs.b));
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        QuadExt::new(a, b)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-&self.a, -&self.b)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &'a QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl fmt::Display for QuadExt {
    /// `a`, or `a+b*sqrt21` / `a-b*sqrt21`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.b.signum() < 0 {
            write!(f, "{}-{}*sqrt21", self.a, self.b.abs())
        } else {
            write!(f, "{}+{}*sqrt21", self.a, self.b)
        }
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::parse("Q(sqrt21) element", s);
        let Some(body) = s.strip_suffix("sqrt21") else {
            return Ok(QuadExt::rational(s.parse().map_err(|_| err())?));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        // Split at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last();
        let (a, b) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let b = match b {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => other.parse().map_err(|_| err())?,
        };
        Ok(QuadExt::new(a.parse().map_err(|_| err())?, b))
    }
}
