//! Problem instances, allocations and their exact recovery probability.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::binomial::BinomialSpec;
use crate::error::{Error, Result};
use crate::rational::{ceil_u64, in_open_unit_interval, int, lcm_of_denominators, parse_rational, Rational};
use crate::scalar::{powi, Scalar};

/// Largest common denominator the exact DP will allocate states for.
pub const MAX_DP_DENOMINATOR: u64 = 10_000_000;

/// Largest node count the power-set evaluator accepts.
pub const MAX_ENUM_NODES: u64 = 25;

/// The triple `(n, p, T)`: node count, access probability and total budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    n: u64,
    p: Rational,
    budget: Rational,
}

impl ProblemInstance {
    pub fn new(n: u64, p: Rational, budget: Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInstance(format!("need n >= 2, got {n}")));
        }
        if !in_open_unit_interval(&p) {
            return Err(Error::InvalidInstance(format!("need 0 < p < 1, got {p}")));
        }
        if budget < Rational::one() || budget > int(n) {
            return Err(Error::InvalidInstance(format!("need 1 <= T <= n = {n}, got {budget}")));
        }
        Ok(Self { n, p, budget })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn budget(&self) -> &Rational {
        &self.budget
    }

    /// Access law for `trials` nodes under this instance's `p`.
    pub fn access(&self, trials: u64) -> BinomialSpec {
        BinomialSpec::new(trials, self.p.clone()).expect("p validated on construction")
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, p={}, T={})", self.n, self.p, self.budget)
    }
}

/// Storage amounts per node. Order is irrelevant: two allocations compare
/// equal when they are the same multiset.
#[derive(Debug, Clone, Eq)]
pub struct Allocation {
    amounts: Vec<Rational>,
}

impl Allocation {
    pub fn new(amounts: Vec<Rational>) -> Result<Self> {
        if let Some(bad) = amounts.iter().find(|x| x.is_negative()) {
            return Err(Error::InvalidAllocation(format!("negative amount {bad}")));
        }
        Ok(Self { amounts })
    }

    /// Parse `"2/3,2/3,1/3"`; when `n` is given the list is padded with zeros
    /// up to `n` entries.
    pub fn parse(text: &str, n: Option<u64>) -> Result<Self> {
        let amounts = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        let mut alloc = Self::new(amounts)?;
        if let Some(n) = n {
            alloc = alloc.padded(n)?;
        }
        Ok(alloc)
    }

    pub fn zeros(n: u64) -> Self {
        Self {
            amounts: vec![Rational::zero(); n as usize],
        }
    }

    pub fn amounts(&self) -> &[Rational] {
        &self.amounts
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.amounts.iter().sum()
    }

    pub fn padded(mut self, n: u64) -> Result<Self> {
        if self.amounts.len() as u64 > n {
            return Err(Error::InvalidAllocation(format!(
                "{} amounts given for {n} nodes",
                self.amounts.len()
            )));
        }
        self.amounts.resize(n as usize, Rational::zero());
        Ok(self)
    }

    /// Amounts sorted in non-increasing order.
    pub fn sorted_desc(&self) -> Vec<Rational> {
        let mut v = self.amounts.clone();
        v.sort_by(|a, b| b.cmp(a));
        v
    }

    /// Checks the allocation against `instance` and returns the per-node
    /// amounts padded to `n` entries.
    pub fn validate_for(&self, instance: &ProblemInstance) -> Result<Vec<Rational>> {
        let padded = self.clone().padded(instance.n())?;
        let total = padded.total();
        if &total > instance.budget() {
            return Err(Error::InvalidAllocation(format!(
                "total {total} exceeds budget {}",
                instance.budget()
            )));
        }
        Ok(padded.amounts)
    }
}

/// Amounts rescaled to integers over their common denominator `D`, each
/// clamped to `D` (a node holding at least one unit suffices alone).
pub(crate) fn scaled_units(amounts: &[Rational]) -> Result<(Vec<u64>, u64)> {
    let lcm = lcm_of_denominators(amounts);
    let cap = BigInt::from(MAX_DP_DENOMINATOR);
    if lcm > cap {
        return Err(Error::DenominatorTooLarge {
            denominator: lcm.to_string(),
            cap: MAX_DP_DENOMINATOR,
        });
    }
    let d = lcm.to_u64().expect("bounded by cap");
    let units = amounts
        .iter()
        .map(|x| {
            let scaled = (x * Rational::from_integer(lcm.clone())).to_integer();
            scaled.to_u64().map_or(d, |v| v.min(d))
        })
        .collect();
    Ok((units, d))
}

impl PartialEq for Allocation {
    fn eq(&self, other: &Self) -> bool {
        self.sorted_desc() == other.sorted_desc()
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.amounts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// The symmetric allocation with `m` nonempty nodes of `T/m` each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricSpec {
    n: u64,
    budget: Rational,
    m: u64,
}

impl SymmetricSpec {
    pub fn new(n: u64, budget: Rational, m: u64) -> Result<Self> {
        if m < 1 || m > n {
            return Err(Error::Precondition(format!("need 1 <= m <= n = {n}, got m = {m}")));
        }
        if budget.is_negative() {
            return Err(Error::Precondition(format!("budget must be nonnegative, got {budget}")));
        }
        Ok(Self { n, budget, m })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn budget(&self) -> &Rational {
        &self.budget
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

pub fn expand_symmetric(spec: &SymmetricSpec) -> Allocation {
    let share = &spec.budget / int(spec.m);
    let mut amounts = vec![share; spec.m as usize];
    amounts.resize(spec.n as usize, Rational::zero());
    Allocation { amounts }
}

/// Exact `P[Σ_{i accessed} x_i ≥ 1]` by a saturating subset-sum DP over the
/// common-denominator grid `{0, …, D}`. Cost is `O(n·D)` scalar operations.
pub fn recovery_probability_dp<S: Scalar>(instance: &ProblemInstance, alloc: &Allocation) -> Result<S> {
    let amounts = alloc.validate_for(instance)?;
    let (units, d) = scaled_units(&amounts)?;
    Ok(saturating_dp(&units, d, &S::from_rational(instance.p())))
}

/// Core of the DP: `units` are per-node amounts in multiples of `1/d`, already
/// clamped to `d`. Returns the probability mass that reaches `d`.
pub(crate) fn saturating_dp<S: Scalar>(units: &[u64], d: u64, p: &S) -> S {
    let q = S::one() - p.clone();
    let d = d as usize;

    // mass[s]: probability that the nodes seen so far contribute s/d (capped).
    let mut mass = vec![S::zero(); d + 1];
    mass[0] = S::one();
    let mut reach = 0usize;
    for &a in units.iter().filter(|&&a| a > 0) {
        let a = a as usize;
        for s in (0..=reach.min(d - 1)).rev() {
            if mass[s].is_zero() {
                continue;
            }
            let t = (s + a).min(d);
            let moved = p.clone() * mass[s].clone();
            mass[t] = mass[t].clone() + moved;
            mass[s] = q.clone() * mass[s].clone();
        }
        reach = (reach + a).min(d);
    }
    mass.swap_remove(d)
}

/// Same quantity as [`recovery_probability_dp`], by walking the whole power
/// set of nodes in Gray-code order. Kept as an independent cross-check.
pub fn recovery_probability_enum<S: Scalar>(instance: &ProblemInstance, alloc: &Allocation) -> Result<S> {
    let n = instance.n();
    if n > MAX_ENUM_NODES {
        return Err(Error::TooLarge {
            what: "power-set enumeration",
            size: format!("n = {n}"),
            cap: MAX_ENUM_NODES,
            hint: "; use the DP evaluator",
        });
    }
    let amounts = alloc.validate_for(instance)?;

    // successes[r]: number of r-subsets whose amounts sum to at least 1.
    let mut successes = vec![0u64; n as usize + 1];
    let mut included = vec![false; n as usize];
    let mut sum = Rational::zero();
    let mut size = 0usize;
    let one = Rational::one();
    // The empty subset holds nothing and never succeeds.
    for step in 1u64..(1u64 << n) {
        let flip = step.trailing_zeros() as usize;
        if included[flip] {
            sum -= &amounts[flip];
            size -= 1;
        } else {
            sum += &amounts[flip];
            size += 1;
        }
        included[flip] = !included[flip];
        if sum >= one {
            successes[size] += 1;
        }
    }

    let p = S::from_rational(instance.p());
    let q = S::one() - p.clone();
    let mut total = S::zero();
    for (r, &count) in successes.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let weight = powi(&p, r as u64) * powi(&q, n - r as u64);
        total = total + S::from_u64(count) * weight;
    }
    Ok(total)
}

/// `P_S(p, T, m) = P[B(m, p) ≥ ⌈m/T⌉]`, the recovery probability of the
/// symmetric allocation with `m` nonempty nodes.
pub fn symmetric_recovery_probability<S: Scalar>(p: &Rational, budget: &Rational, m: u64) -> Result<S> {
    Ok(S::from_rational(&symmetric_exact(p, budget, m)?))
}

pub(crate) fn symmetric_exact(p: &Rational, budget: &Rational, m: u64) -> Result<Rational> {
    if m < 1 {
        return Err(Error::Precondition("need m >= 1".into()));
    }
    if budget < &Rational::one() {
        return Err(Error::Precondition(format!("need T >= 1, got {budget}")));
    }
    let spec = BinomialSpec::new(m, p.clone())?;
    let threshold = recovery_threshold(budget, m);
    Ok(spec.tail_ge_exact(threshold as i64))
}

/// `⌈m/T⌉`: nonempty nodes that must be read to recover from `x̄(n, T, m)`.
pub fn recovery_threshold(budget: &Rational, m: u64) -> u64 {
    ceil_u64(&(int(m) / budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn instance(n: u64, p: Rational, t: Rational) -> ProblemInstance {
        ProblemInstance::new(n, p, t).unwrap()
    }

    fn alloc(text: &str) -> Allocation {
        Allocation::parse(text, None).unwrap()
    }

    fn counterexample() -> ProblemInstance {
        instance(5, ratio(2, 3), ratio(7, 3))
    }

    #[test]
    fn instance_invariants() {
        assert!(ProblemInstance::new(1, ratio(1, 2), int(1)).is_err());
        assert!(ProblemInstance::new(3, Rational::zero(), int(1)).is_err());
        assert!(ProblemInstance::new(3, Rational::one(), int(1)).is_err());
        assert!(ProblemInstance::new(3, ratio(1, 2), ratio(1, 2)).is_err());
        assert!(ProblemInstance::new(3, ratio(1, 2), ratio(7, 2)).is_err());
        assert!(ProblemInstance::new(3, ratio(1, 2), int(3)).is_ok());
    }

    #[test]
    fn nonsymmetric_counterexample() {
        let a = alloc("2/3,2/3,1/3,1/3,1/3");
        let dp: Rational = recovery_probability_dp(&counterexample(), &a).unwrap();
        let en: Rational = recovery_probability_enum(&counterexample(), &a).unwrap();
        assert_eq!(dp, ratio(220, 243));
        assert_eq!(en, ratio(220, 243));
        let approx: f64 = recovery_probability_dp(&counterexample(), &a).unwrap();
        assert!((approx - 0.90535).abs() < 5e-6);
    }

    #[test]
    fn two_full_copies() {
        let a = Allocation::parse("7/6,7/6", Some(5)).unwrap();
        let dp: Rational = recovery_probability_dp(&counterexample(), &a).unwrap();
        let en: Rational = recovery_probability_enum(&counterexample(), &a).unwrap();
        assert_eq!(dp, ratio(8, 9));
        assert_eq!(en, ratio(8, 9));
    }

    #[test]
    fn nothing_stored_never_recovers() {
        let inst = counterexample();
        let a = Allocation::zeros(5);
        assert_eq!(
            recovery_probability_dp::<Rational>(&inst, &a).unwrap(),
            Rational::zero()
        );
        assert_eq!(
            recovery_probability_enum::<Rational>(&inst, &a).unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn single_full_copy_recovers_with_p() {
        for p in [ratio(1, 3), ratio(1, 2), ratio(9, 10)] {
            let inst = instance(2, p.clone(), int(1));
            let a = alloc("1,0");
            assert_eq!(recovery_probability_dp::<Rational>(&inst, &a).unwrap(), p);
            assert_eq!(recovery_probability_enum::<Rational>(&inst, &a).unwrap(), p);
        }
    }

    #[test]
    fn enumeration_examples() {
        let inst = instance(3, ratio(1, 2), int(3));
        assert_eq!(
            recovery_probability_enum::<Rational>(&inst, &alloc("1,1,1")).unwrap(),
            ratio(7, 8)
        );
        let inst = instance(2, ratio(1, 3), int(2));
        assert_eq!(
            recovery_probability_enum::<Rational>(&inst, &alloc("1/2,1/2")).unwrap(),
            ratio(1, 9)
        );
        assert_eq!(
            recovery_probability_dp::<Rational>(&inst, &alloc("1/2,1/2")).unwrap(),
            ratio(1, 9)
        );
    }

    #[test]
    fn oversize_amounts_are_clamped() {
        let inst = instance(3, ratio(1, 2), int(3));
        let a = alloc("5/2,1/2");
        // Node 1 alone suffices; otherwise nothing does.
        assert_eq!(recovery_probability_dp::<Rational>(&inst, &a).unwrap(), ratio(1, 2));
        assert_eq!(recovery_probability_enum::<Rational>(&inst, &a).unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_invalid_allocations() {
        let inst = counterexample();
        assert!(Allocation::parse("-1/3,1", None).is_err());
        assert!(recovery_probability_dp::<Rational>(&inst, &alloc("1,1,1")).is_err());
        assert!(recovery_probability_dp::<Rational>(&inst, &alloc("0,0,0,0,0,0")).is_err());
        assert!(recovery_probability_enum::<Rational>(&inst, &alloc("2,1")).is_err());
    }

    #[test]
    fn rejects_huge_common_denominator() {
        let inst = instance(3, ratio(1, 2), int(3));
        let a = alloc("1/10007,1/10009,1/10037");
        assert!(matches!(
            recovery_probability_dp::<Rational>(&inst, &a),
            Err(Error::DenominatorTooLarge { .. })
        ));
    }

    #[test]
    fn enumeration_refuses_large_n() {
        let inst = instance(26, ratio(1, 2), int(2));
        assert!(matches!(
            recovery_probability_enum::<Rational>(&inst, &Allocation::zeros(26)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn symmetric_probability_examples() {
        let p = ratio(2, 3);
        let t = ratio(7, 3);
        assert_eq!(
            symmetric_recovery_probability::<Rational>(&p, &t, 4).unwrap(),
            ratio(8, 9)
        );
        assert_eq!(
            symmetric_recovery_probability::<Rational>(&p, &t, 5).unwrap(),
            ratio(64, 81)
        );
        // threshold 1 whenever T >= m
        let p = ratio(3, 10);
        for m in 1..=4u64 {
            let expected = Rational::one() - powi(&ratio(7, 10), m);
            assert_eq!(
                symmetric_recovery_probability::<Rational>(&p, &int(4), m).unwrap(),
                expected
            );
        }
        assert!(symmetric_recovery_probability::<Rational>(&p, &int(4), 0).is_err());
        assert!(symmetric_recovery_probability::<Rational>(&p, &ratio(1, 2), 1).is_err());
    }

    #[test]
    fn expand_examples() {
        let a = expand_symmetric(&SymmetricSpec::new(5, ratio(7, 3), 2).unwrap());
        assert_eq!(a, alloc("7/6,7/6,0,0,0"));
        let a = expand_symmetric(&SymmetricSpec::new(3, int(3), 3).unwrap());
        assert_eq!(a, alloc("1,1,1"));
        let a = expand_symmetric(&SymmetricSpec::new(4, int(2), 1).unwrap());
        assert_eq!(a.amounts(), alloc("2,0,0,0").amounts());
        assert!(SymmetricSpec::new(4, int(2), 0).is_err());
        assert!(SymmetricSpec::new(4, int(2), 5).is_err());
    }

    #[test]
    fn multiset_equality() {
        assert_eq!(alloc("1/3,2/3,0"), alloc("0,1/3,2/3"));
        assert_ne!(alloc("1/3,2/3,0"), alloc("1/3,1/3,1/3"));
    }

    // Random instance with n <= 8 and an allocation on a small grid that
    // respects the budget.
    fn instance_and_allocation() -> impl Strategy<Value = (ProblemInstance, Vec<Rational>)> {
        (2u64..=8, 1i64..=9, 2i64..=6)
            .prop_flat_map(|(n, p_num, den)| {
                let t_max = n as i64 * den;
                (Just(n), Just(p_num), Just(den), den..=t_max)
            })
            .prop_flat_map(|(n, p_num, den, t_num)| {
                let amounts = proptest::collection::vec(0i64..=2 * den, n as usize);
                (Just(n), Just(p_num), Just(den), Just(t_num), amounts)
            })
            .prop_map(|(n, p_num, den, t_num, raw)| {
                let budget = ratio(t_num, den);
                let mut amounts: Vec<Rational> = raw.into_iter().map(|a| ratio(a, den)).collect();
                // Rescale down until the budget holds.
                let total: Rational = amounts.iter().sum();
                if total > budget {
                    let factor = &budget / &total;
                    amounts.iter_mut().for_each(|x| *x = &*x * &factor);
                }
                (instance(n, ratio(p_num, 10), budget), amounts)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn dp_matches_enumeration((inst, amounts) in instance_and_allocation()) {
            let a = Allocation::new(amounts).unwrap();
            let dp: Rational = recovery_probability_dp(&inst, &a).unwrap();
            let en: Rational = recovery_probability_enum(&inst, &a).unwrap();
            prop_assert_eq!(dp, en);
        }

        #[test]
        fn permutation_invariance((inst, amounts) in instance_and_allocation(), seed in any::<u64>()) {
            let mut shuffled = amounts.clone();
            let len = shuffled.len();
            shuffled.rotate_left((seed as usize) % len);
            if seed % 2 == 0 { shuffled.reverse(); }
            let a: Rational = recovery_probability_dp(&inst, &Allocation::new(amounts).unwrap()).unwrap();
            let b: Rational = recovery_probability_dp(&inst, &Allocation::new(shuffled).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn monotone_in_each_amount((inst, amounts) in instance_and_allocation(), idx in 0usize..8, bump in 1i64..6) {
            let idx = idx % amounts.len();
            let before: Rational = recovery_probability_dp(&inst, &Allocation::new(amounts.clone()).unwrap()).unwrap();
            let mut bigger = amounts.clone();
            bigger[idx] += ratio(bump, 6);
            let total: Rational = bigger.iter().sum();
            // Compare on an instance whose budget admits the bigger allocation.
            let n = inst.n();
            prop_assume!(total <= int(n));
            let roomy = instance(n, inst.p().clone(), total.max(Rational::one()));
            let after: Rational = recovery_probability_dp(&roomy, &Allocation::new(bigger).unwrap()).unwrap();
            prop_assert!(after >= before);
        }

        #[test]
        fn symmetric_consistency(n in 2u64..=12, m_seed in 0u64..100, p_num in 1i64..10, t_num in 10i64..=120) {
            let m = 1 + m_seed % n;
            let budget = ratio(t_num, 10);
            prop_assume!(budget <= int(n));
            let inst = instance(n, ratio(p_num, 10), budget.clone());
            let a = expand_symmetric(&SymmetricSpec::new(n, budget.clone(), m).unwrap());
            let dp: Rational = recovery_probability_dp(&inst, &a).unwrap();
            let ps: Rational = symmetric_recovery_probability(inst.p(), &budget, m).unwrap();
            prop_assert_eq!(dp, ps);
        }

        #[test]
        fn markov_cap_holds_below_threshold((inst, amounts) in instance_and_allocation()) {
            let cap = inst.p() * inst.budget();
            prop_assume!(cap < Rational::one());
            let v: Rational = recovery_probability_dp(&inst, &Allocation::new(amounts).unwrap()).unwrap();
            prop_assert!(v <= cap);
        }
    }
}
