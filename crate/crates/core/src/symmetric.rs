//! Optimal symmetric allocations.
//!
//! `P_S(p, T, m)` is constant-threshold on each interval `m ∈ ((k−1)T, kT]`
//! and nondecreasing in `m` there, so only the top integer of each interval
//! (plus `n`) can be optimal. The remaining routines compare consecutive
//! candidates via the exact difference `Δ(p, T, k)` and evaluate the
//! closed-form sufficient conditions under which maximal spreading
//! (`m = n` or the last interval top) or minimal spreading (`m = ⌊T⌋`) wins.

use num_traits::{One, Zero};

use crate::allocation::{symmetric_exact, ProblemInstance};
use crate::binomial::{binomial_coefficient, BinomialSpec};
use crate::error::{Error, Result};
use crate::rational::{ceil_u64, floor_u64, in_open_unit_interval, int, is_integer, Rational};
use crate::scalar::{powi, Scalar};

/// `P_S` at each candidate `m`, with the smallest maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport<S = Rational> {
    pub candidates: Vec<(u64, S)>,
    pub best_m: u64,
    pub best_p_s: S,
}

impl<S: Scalar> CandidateReport<S> {
    fn from_candidates(candidates: Vec<(u64, S)>) -> Self {
        let (best_m, best_p_s) = candidates
            .iter()
            .fold(None::<(u64, S)>, |best, (m, ps)| match best {
                Some((_, ref b)) if ps <= b => best,
                _ => Some((*m, ps.clone())),
            })
            .expect("candidate list is never empty");
        Self {
            candidates,
            best_m,
            best_p_s,
        }
    }

    /// Every listed `m` whose probability equals the maximum.
    pub fn argmax(&self) -> Vec<u64> {
        self.candidates
            .iter()
            .filter(|(_, ps)| *ps == self.best_p_s)
            .map(|(m, _)| *m)
            .collect()
    }

    pub fn p_s(&self, m: u64) -> Option<&S> {
        self.candidates.iter().find(|(c, _)| *c == m).map(|(_, ps)| ps)
    }
}

/// The `⌈n/T⌉` values of `m` that can maximize `P_S`: `⌊kT⌋` for
/// `k = 1..⌊n/T⌋`, then `n`.
pub fn candidate_ms(n: u64, budget: &Rational) -> Vec<u64> {
    let intervals = floor_u64(&(int(n) / budget));
    let mut ms: Vec<u64> = (1..=intervals).map(|k| floor_u64(&(int(k) * budget))).collect();
    ms.push(n);
    ms.sort_unstable();
    ms.dedup();
    ms
}

pub fn optimal_symmetric<S: Scalar>(instance: &ProblemInstance) -> CandidateReport<S> {
    let ms = candidate_ms(instance.n(), instance.budget());
    evaluate(instance, ms)
}

/// Brute-force scan of every `m ∈ 1..=n`.
pub fn exhaustive_symmetric<S: Scalar>(instance: &ProblemInstance) -> CandidateReport<S> {
    evaluate(instance, (1..=instance.n()).collect())
}

fn evaluate<S: Scalar>(instance: &ProblemInstance, ms: Vec<u64>) -> CandidateReport<S> {
    // Ties are decided on exact values, then converted.
    let exact: Vec<(u64, Rational)> = ms
        .into_iter()
        .map(|m| {
            let ps = symmetric_exact(instance.p(), instance.budget(), m)
                .expect("instance invariants imply the preconditions");
            (m, ps)
        })
        .collect();
    let report = CandidateReport::from_candidates(exact);
    CandidateReport {
        candidates: report
            .candidates
            .iter()
            .map(|(m, ps)| (*m, S::from_rational(ps)))
            .collect(),
        best_m: report.best_m,
        best_p_s: S::from_rational(&report.best_p_s),
    }
}

/// `Δ(p, T, k) = P_S(m=⌊(k+1)T⌋) − P_S(m=⌊kT⌋)` together with the step
/// `α = ⌊(k+1)T⌋ − ⌊kT⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaValue<S = Rational> {
    pub k: u64,
    pub alpha: u64,
    pub value: S,
}

fn delta_preconditions(p: &Rational, budget: &Rational, k: u64) -> Result<(u64, u64)> {
    if !in_open_unit_interval(p) {
        return Err(Error::Precondition(format!("need 0 < p < 1, got {p}")));
    }
    if budget <= &Rational::one() {
        return Err(Error::Precondition(format!("need T > 1, got {budget}")));
    }
    if k < 1 {
        return Err(Error::Precondition("need k >= 1".into()));
    }
    let lower = floor_u64(&(int(k) * budget));
    let upper = floor_u64(&(int(k + 1) * budget));
    Ok((lower, upper))
}

/// Closed form of `Δ` obtained by expanding the extra `α` trials:
///
/// `p^k (1−p)^(⌊(k+1)T⌋−k) · { Σ_{i=1}^{min(α−1,k)} Σ_{j=i+1}^{α}
///  C(⌊kT⌋, k−i) C(α, j) (p/(1−p))^(j−i) − C(⌊kT⌋, k) }`.
pub fn delta_closed_form<S: Scalar>(p: &Rational, budget: &Rational, k: u64) -> Result<DeltaValue<S>> {
    let (lower, upper) = delta_preconditions(p, budget, k)?;
    let alpha = upper - lower;
    let ps = S::from_rational(p);
    let qs = S::one() - ps.clone();
    let odds = ps.clone() / qs.clone();

    let mut bracket = S::zero();
    for i in 1..=(alpha.saturating_sub(1)).min(k) {
        let outer = S::from_biguint(&binomial_coefficient(lower, (k - i) as i64));
        for j in (i + 1)..=alpha {
            let inner = S::from_biguint(&binomial_coefficient(alpha, j as i64));
            bracket = bracket + outer.clone() * inner * powi(&odds, j - i);
        }
    }
    bracket = bracket - S::from_biguint(&binomial_coefficient(lower, k as i64));

    let value = powi(&ps, k) * powi(&qs, upper - k) * bracket;
    Ok(DeltaValue { k, alpha, value })
}

/// `Δ` as the plain difference of two binomial tails.
pub fn delta_direct<S: Scalar>(p: &Rational, budget: &Rational, k: u64) -> Result<DeltaValue<S>> {
    let (lower, upper) = delta_preconditions(p, budget, k)?;
    let law = BinomialSpec::new(upper, p.clone())?;
    let value = law.tail_ge_exact(k as i64 + 1) - law.with_trials(lower).tail_ge_exact(k as i64);
    Ok(DeltaValue {
        k,
        alpha: upper - lower,
        value: S::from_rational(&value),
    })
}

/// Maximal spreading is optimal among symmetric allocations when
/// `T ≥ ⌈4/(3p)⌉`.
pub fn condition_theorem2(p: &Rational, budget: &Rational) -> bool {
    let bound = ceil_u64(&(int(4) / (int(3) * p)));
    budget >= &int(bound)
}

/// `T ≥ 2` and `(1−p)^⌊T⌋ + 2⌊T⌋p(1−p)^(⌊T⌋−1) − 1 ≤ 0`: every `Δ ≥ 0`, so
/// only the two largest candidates remain.
pub fn condition_lemma2(p: &Rational, budget: &Rational) -> bool {
    if budget < &int(2) {
        return false;
    }
    let f = floor_u64(budget);
    let q = Rational::one() - p;
    let lhs = powi(&q, f) + int(2 * f) * p * powi(&q, f - 1) - Rational::one();
    lhs <= Rational::zero()
}

/// Minimal spreading `m = ⌊T⌋` is optimal when `T ≤ ⌊1/p⌋`.
pub fn condition_theorem3(p: &Rational, budget: &Rational) -> bool {
    let bound = floor_u64(&(Rational::one() / p));
    budget <= &int(bound)
}

fn require_budget_above_one(budget: &Rational) -> Result<()> {
    if budget <= &Rational::one() {
        return Err(Error::Precondition(format!("need T > 1, got {budget}")));
    }
    Ok(())
}

/// Returns `(eq_flag, ineq_flag)`: `T = 1/p ∈ ℤ⁺`, and `T < 1/p` with
/// `p(1−p)^(⌈T⌉−1) ≤ (1/T)(1−1/T)^(⌈T⌉−1)`. Either makes every `Δ ≤ 0`.
pub fn condition_lemma3(p: &Rational, budget: &Rational) -> Result<(bool, bool)> {
    require_budget_above_one(budget)?;
    let inv_p = Rational::one() / p;
    let eq_flag = budget == &inv_p && is_integer(budget);
    let ineq_flag = if budget < &inv_p {
        let e = ceil_u64(budget) - 1;
        let inv_t = Rational::one() / budget;
        let lhs = p * powi(&(Rational::one() - p), e);
        let rhs = &inv_t * powi(&(Rational::one() - &inv_t), e);
        lhs <= rhs
    } else {
        false
    };
    Ok((eq_flag, ineq_flag))
}

/// `p ≤ 2/⌈T⌉ − 1/T`.
pub fn condition_lemma4(p: &Rational, budget: &Rational) -> Result<bool> {
    require_budget_above_one(budget)?;
    let c = int(ceil_u64(budget));
    Ok(p <= &(int(2) / c - Rational::one() / budget))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    MaxSpreadOptimal,
    MinSpreadOptimal,
    /// Conditions for both policies hold; both allocations tie.
    Both,
    Unresolved,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::MaxSpreadOptimal => "MaxSpreadOptimal",
            Verdict::MinSpreadOptimal => "MinSpreadOptimal",
            Verdict::Both => "Both",
            Verdict::Unresolved => "Unresolved",
        }
    }

    pub fn max_spread(&self) -> bool {
        matches!(self, Verdict::MaxSpreadOptimal | Verdict::Both)
    }

    pub fn min_spread(&self) -> bool {
        matches!(self, Verdict::MinSpreadOptimal | Verdict::Both)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegionFlags {
    pub theorem2: bool,
    pub theorem3: bool,
    pub lemma2: bool,
    pub lemma3_eq: bool,
    pub lemma3_ineq: bool,
    pub lemma4: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionClass {
    pub verdict: Verdict,
    pub flags: RegionFlags,
}

pub fn classify_region(p: &Rational, budget: &Rational) -> Result<RegionClass> {
    if !in_open_unit_interval(p) {
        return Err(Error::Precondition(format!("need 0 < p < 1, got {p}")));
    }
    if budget < &Rational::one() {
        return Err(Error::Precondition(format!("need T >= 1, got {budget}")));
    }
    let mut flags = RegionFlags {
        theorem2: condition_theorem2(p, budget),
        theorem3: condition_theorem3(p, budget),
        lemma2: condition_lemma2(p, budget),
        ..RegionFlags::default()
    };
    // The lemma3/lemma4 tests need T > 1; at T = 1 the single full copy is trivially
    // optimal and theorem3 already holds.
    if budget > &Rational::one() {
        let (eq, ineq) = condition_lemma3(p, budget)?;
        flags.lemma3_eq = eq;
        flags.lemma3_ineq = ineq;
        flags.lemma4 = condition_lemma4(p, budget)?;
    }
    let max = flags.theorem2 || flags.lemma2;
    let min = flags.theorem3 || flags.lemma4 || flags.lemma3_eq || flags.lemma3_ineq || budget.is_one();
    let verdict = match (max, min) {
        (true, true) => Verdict::Both,
        (true, false) => Verdict::MaxSpreadOptimal,
        (false, true) => Verdict::MinSpreadOptimal,
        (false, false) => Verdict::Unresolved,
    };
    Ok(RegionClass { verdict, flags })
}
