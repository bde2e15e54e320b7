//! Upper bounds on the optimal recovery probability and the certified gap of
//! maximal spreading.

use num_traits::{One, Zero};

use crate::allocation::{recovery_threshold, symmetric_exact, ProblemInstance};
use crate::error::{Error, Result};
use crate::rational::{int, to_f64, Rational};
use crate::scalar::Scalar;

/// `Σ_{r=0}^{n} min(rT/n, 1) · P[B(n, p) = r]`.
///
/// Holds for every feasible allocation, symmetric or not: among the
/// `C(n, r)` subsets of size `r`, at most `C(n−1, r−1)·T` can reach one unit.
pub fn lemma1_upper_bound<S: Scalar>(instance: &ProblemInstance) -> S {
    let n = instance.n();
    let law = instance.access(n);
    let scale = instance.budget() / int(n);
    let mut total = S::zero();
    for r in 1..=n {
        let weight = (&scale * int(r)).min(Rational::one());
        total = total + S::from_rational(&weight) * S::from_rational(&law.pmf_exact(r as i64));
    }
    total
}

/// `δ(n, p, T) = pT · P[B(n−1, p) ≤ ⌈n/T⌉ − 2]`, zero when `⌈n/T⌉ ≤ 1`.
pub fn theorem1_gap<S: Scalar>(instance: &ProblemInstance) -> S {
    S::from_rational(&gap_exact(instance))
}

fn gap_exact(instance: &ProblemInstance) -> Rational {
    let n = instance.n();
    let threshold = recovery_threshold(instance.budget(), n);
    if threshold <= 1 {
        return Rational::zero();
    }
    let pt = instance.p() * instance.budget();
    pt * instance.access(n - 1).cdf_le_exact(threshold as i64 - 2)
}

/// Chernoff envelope `pT · exp(−((n−1)p/2)(1 − 1/(pT))²)` on the gap. Only
/// meaningful for `pT > 1`; may exceed one.
pub fn chernoff_envelope(instance: &ProblemInstance) -> Result<f64> {
    let pt = instance.p() * instance.budget();
    if pt <= Rational::one() {
        return Err(Error::Precondition(format!(
            "Chernoff envelope needs pT > 1, got pT = {pt}"
        )));
    }
    let shortfall = Rational::one() - Rational::one() / &pt;
    let rate = int(instance.n() - 1) * instance.p() / int(2);
    let exponent = to_f64(&(rate * &shortfall * &shortfall));
    Ok(to_f64(&pt) * (-exponent).exp())
}

/// `min(pT, 1)`; bounds every allocation via Markov's inequality.
pub fn markov_cap(p: &Rational, budget: &Rational) -> Rational {
    (p * budget).min(Rational::one())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport<S = Rational> {
    pub lemma1_upper: S,
    pub theorem1_gap: S,
    /// Present iff `pT > 1`.
    pub chernoff_envelope: Option<f64>,
    pub markov_cap: S,
    /// `P_S` of maximal spreading (`m = n`).
    pub spread_all_p_s: S,
}

pub fn bounds_report<S: Scalar>(instance: &ProblemInstance) -> BoundsReport<S> {
    let spread_all = symmetric_exact(instance.p(), instance.budget(), instance.n())
        .expect("instance invariants imply the preconditions");
    BoundsReport {
        lemma1_upper: lemma1_upper_bound(instance),
        theorem1_gap: theorem1_gap(instance),
        chernoff_envelope: chernoff_envelope(instance).ok(),
        markov_cap: S::from_rational(&markov_cap(instance.p(), instance.budget())),
        spread_all_p_s: S::from_rational(&spread_all),
    }
}
