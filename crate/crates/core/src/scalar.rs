use std::fmt::Debug;

use num_bigint::BigUint;
use num_traits::{Num, ToPrimitive};

use crate::rational::Rational;

/// Field in which probabilities are accumulated.
///
/// Problem parameters (`p`, `T`, allocation amounts) are always exact
/// rationals; only the probability arithmetic runs in `Self`.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    fn from_rational(value: &Rational) -> Self;

    fn from_biguint(value: &BigUint) -> Self;

    fn to_f64(&self) -> f64;

    fn from_u64(value: u64) -> Self {
        Self::from_biguint(&BigUint::from(value))
    }
}

impl Scalar for Rational {
    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn from_biguint(value: &BigUint) -> Self {
        Rational::from_integer(value.clone().into())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_rational(value: &Rational) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }

    fn from_biguint(value: &BigUint) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::INFINITY)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_rational(value: &Rational) -> Self {
        ToPrimitive::to_f32(value).unwrap_or(f32::NAN)
    }

    fn from_biguint(value: &BigUint) -> Self {
        ToPrimitive::to_f32(value).unwrap_or(f32::INFINITY)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

/// Integer power by repeated squaring in any scalar field.
pub(crate) fn powi<S: Scalar>(base: &S, exp: u64) -> S {
    num_traits::pow(base.clone(), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn float_conversion_of_exact_values() {
        let x = ratio(220, 243);
        assert!((f64::from_rational(&x) - 0.905_349_794).abs() < 1e-9);
        assert!((f32::from_rational(&x) - 0.905_35).abs() < 1e-5);
        assert_eq!(Rational::from_rational(&x), x);
    }

    #[test]
    fn powers() {
        assert_eq!(powi(&ratio(2, 3), 3), ratio(8, 27));
        assert_eq!(powi(&ratio(2, 3), 0), ratio(1, 1));
        assert_eq!(powi(&0.5f64, 4), 0.0625);
    }
}
