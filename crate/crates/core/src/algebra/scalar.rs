//! Coefficient fields.
//!
//! Everything above this module is generic over [`Scalar`]: a commutative
//! field with a conjugation and a square root of minus one. The production
//! instance is the Gaussian rationals `Q(i)`, realised as
//! `Complex<Ratio<T>>` for any arbitrary-precision or fixed-width integer `T`.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_complex::Complex;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

use crate::error::{Error, Result};

/// Exact coefficient field with complex conjugation.
pub trait Scalar: Clone + Debug + PartialEq + Num + std::ops::Neg<Output = Self> + Send + Sync + 'static {
    /// Complex conjugate.
    fn conj(&self) -> Self;

    /// The imaginary unit.
    fn i() -> Self;

    fn from_int(n: i64) -> Self;

    /// `num / den`. Panics when `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Builds `re + i im` from exact decimal fraction strings such as `"-3/5"`.
    fn parse_parts(re: &str, im: &str) -> Result<Self>;

    /// Inverse of [`Scalar::parse_parts`]; integers print without a denominator.
    fn format_parts(&self) -> (String, String);

    /// `self * rhs` without consuming either operand.
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add_ref(rhs);
    }

    fn neg_mut(&mut self) {
        *self = -self.clone();
    }

    fn norm_sqr(&self) -> Self {
        self.mul_ref(&self.conj())
    }

    fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Human-readable rendering, e.g. `3/5+4/5i`.
    fn render(&self) -> String {
        let (re, im) = self.format_parts();
        let zero = "0";
        match (re.as_str() == zero, im.as_str() == zero) {
            (_, true) => re,
            (true, false) => format!("{im}i"),
            (false, false) if im.starts_with('-') => format!("{re}{im}i"),
            (false, false) => format!("{re}+{im}i"),
        }
    }
}

impl<T> Scalar for Complex<Ratio<T>>
where
    T: Clone + Integer + Signed + FromPrimitive + Display + FromStr + Debug + Send + Sync + 'static,
{
    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn i() -> Self {
        Complex::new(Ratio::from_integer(T::zero()), Ratio::from_integer(T::one()))
    }

    fn from_int(n: i64) -> Self {
        let n = T::from_i64(n).expect("integer fits the coefficient type");
        Complex::new(Ratio::from_integer(n), Ratio::from_integer(T::zero()))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        let num = T::from_i64(num).expect("integer fits the coefficient type");
        let den = T::from_i64(den).expect("integer fits the coefficient type");
        Complex::new(Ratio::new(num, den), Ratio::from_integer(T::zero()))
    }

    fn parse_parts(re: &str, im: &str) -> Result<Self> {
        Ok(Complex::new(parse_ratio(re)?, parse_ratio(im)?))
    }

    fn format_parts(&self) -> (String, String) {
        (self.re.to_string(), self.im.to_string())
    }
}

fn parse_ratio<T>(s: &str) -> Result<Ratio<T>>
where
    T: Clone + Integer + FromStr,
{
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not an exact rational"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: T = n.trim().parse().map_err(|_| bad())?;
            let d: T = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("`{s}` has a zero denominator")));
            }
            Ok(Ratio::new(n, d))
        }
        None => Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `re + i im` from small integer fractions; handy for constants in code and tests.
pub fn gaussian<S: Scalar>(re: (i64, i64), im: (i64, i64)) -> S {
    S::from_ratio(re.0, re.1) + S::i() * S::from_ratio(im.0, im.1)
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;
    use crate::Gq;

    #[test]
    fn field_axioms_on_samples() {
        let a: Gq = gaussian((3, 5), (4, 5));
        let b: Gq = gaussian((-1, 2), (1, 3));
        assert_eq!(a.clone() * a.conj(), Gq::one());
        assert_eq!((a.clone() / b.clone()) * b.clone(), a);
        assert_eq!(Gq::i() * Gq::i(), -Gq::one());
    }

    #[test]
    fn parse_and_format_round_trip() {
        let a = Gq::parse_parts("-32/25", "24/25").unwrap();
        let (re, im) = a.format_parts();
        assert_eq!((re.as_str(), im.as_str()), ("-32/25", "24/25"));
        assert_eq!(Gq::parse_parts(&re, &im).unwrap(), a);
        assert_eq!(Gq::parse_parts("2", "0").unwrap(), Gq::from_int(2));
        assert!(Gq::parse_parts("1/0", "0").is_err());
        assert!(Gq::parse_parts("0.5", "0").is_err());
    }

    #[test]
    fn render_forms() {
        assert_eq!(gaussian::<Gq>((3, 5), (-4, 5)).render(), "3/5-4/5i");
        assert_eq!(gaussian::<Gq>((0, 1), (1, 1)).render(), "1i");
        assert_eq!(Gq::from_int(7).render(), "7");
    }
}
