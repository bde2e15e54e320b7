//! Binomial coefficients and exact binomial distribution terms.
//!
//! Every probability here is first computed as an exact integer ratio
//! `Σ C(n,j) a^j (b−a)^(n−j) / b^n` for `p = a/b` and only then converted to
//! the requested scalar, so the float paths inherit a correctly rounded
//! result instead of accumulated rounding error.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{in_open_unit_interval, Rational};
use crate::scalar::Scalar;

/// `C(n, k)`, zero outside `0 ≤ k ≤ n`.
pub fn binomial_coefficient(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    // After step i the accumulator holds C(n-k+i, i), so each division is exact.
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// A binomial law `B(trials, success_prob)` with `0 < success_prob < 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialSpec {
    trials: u64,
    success_prob: Rational,
}

impl BinomialSpec {
    pub fn new(trials: u64, success_prob: Rational) -> Result<Self> {
        if !in_open_unit_interval(&success_prob) {
            return Err(Error::Precondition(format!(
                "success probability must lie in (0, 1), got {success_prob}"
            )));
        }
        Ok(Self { trials, success_prob })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn success_prob(&self) -> &Rational {
        &self.success_prob
    }

    /// Same success probability, different trial count.
    pub fn with_trials(&self, trials: u64) -> Self {
        Self {
            trials,
            success_prob: self.success_prob.clone(),
        }
    }

    /// Numerator/denominator split `p = a/b` as unsigned integers.
    fn parts(&self) -> (BigUint, BigUint) {
        let a = self.success_prob.numer().to_biguint().expect("p > 0");
        let b = self.success_prob.denom().to_biguint().expect("denominator > 0");
        (a, b)
    }

    /// Integer weight `C(n,j) a^j (b−a)^(n−j)` of each outcome `j` in `range`,
    /// summed, together with the common denominator `b^n`.
    fn weight_sum(&self, lo: u64, hi: u64) -> (BigUint, BigUint) {
        let n = self.trials;
        let (a, b) = self.parts();
        let c = &b - &a;
        let denom = num_traits::pow(b, n as usize);
        if lo > hi || lo > n {
            return (BigUint::zero(), denom);
        }
        let hi = hi.min(n);
        let mut total = BigUint::zero();
        let mut coeff = binomial_coefficient(n, lo as i64);
        let mut a_pow = num_traits::pow(a.clone(), lo as usize);
        let mut c_pow = num_traits::pow(c.clone(), (n - hi) as usize);
        // Walk j upward for the coefficient and a^j; c^(n-j) is needed in
        // decreasing exponent order, so precompute it over the window.
        let mut c_pows = Vec::with_capacity((hi - lo + 1) as usize);
        for _ in lo..=hi {
            c_pows.push(c_pow.clone());
            c_pow *= &c;
        }
        for j in lo..=hi {
            let c_term = &c_pows[(hi - j) as usize];
            total += &coeff * &a_pow * c_term;
            if j < hi {
                coeff = coeff * (n - j) / (j + 1);
                a_pow *= &a;
            }
        }
        (total, denom)
    }

    /// Exact `P[B = k]`.
    pub fn pmf_exact(&self, k: i64) -> Rational {
        if k < 0 || k as u64 > self.trials {
            return Rational::zero();
        }
        let (num, den) = self.weight_sum(k as u64, k as u64);
        ratio_of(num, den)
    }

    /// Exact `P[B ≥ k]`.
    pub fn tail_ge_exact(&self, k: i64) -> Rational {
        if k <= 0 {
            return Rational::one();
        }
        if k as u64 > self.trials {
            return Rational::zero();
        }
        let (num, den) = self.weight_sum(k as u64, self.trials);
        ratio_of(num, den)
    }

    /// Exact `P[B ≤ k]`.
    pub fn cdf_le_exact(&self, k: i64) -> Rational {
        if k < 0 {
            return Rational::zero();
        }
        if k as u64 >= self.trials {
            return Rational::one();
        }
        let (num, den) = self.weight_sum(0, k as u64);
        ratio_of(num, den)
    }
}

fn ratio_of(num: BigUint, den: BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn binomial_pmf<S: Scalar>(spec: &BinomialSpec, k: i64) -> S {
    S::from_rational(&spec.pmf_exact(k))
}

pub fn binomial_tail_ge<S: Scalar>(spec: &BinomialSpec, k: i64) -> S {
    S::from_rational(&spec.tail_ge_exact(k))
}

pub fn binomial_cdf_le<S: Scalar>(spec: &BinomialSpec, k: i64) -> S {
    S::from_rational(&spec.cdf_le_exact(k))
}
