//! Independent ground truth: exhaustive search over a quantized family of
//! allocations, and a seeded Monte Carlo estimator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::allocation::{saturating_dp, scaled_units, Allocation, ProblemInstance};
use crate::error::{Error, Result};
use crate::rational::{floor_u64, int, Rational};
use crate::symmetric::candidate_ms;

/// Default cap on the number of allocations the brute-force search visits.
pub const DEFAULT_MAX_ENUM: u64 = 10_000_000;

/// Trials simulated per generator stream.
pub const MC_CHUNK: u64 = 4096;

/// Identifies the random stream layout; part of every estimate so a stored
/// result can be reproduced.
pub const MC_GENERATOR: &str = "ChaCha8Rng/rand_chacha-0.9; stream = chunk index; chunk = 4096 trials";

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedSearchResult {
    /// Non-increasing amounts, each a multiple of `1/q`.
    pub best_allocation: Allocation,
    pub best_probability: Rational,
    pub quantum_denominator: u64,
    pub allocations_evaluated: u64,
}

/// `lcm(denom(T), denom(p))`, the quantum used when the caller gives none.
pub fn default_quantum(instance: &ProblemInstance) -> u64 {
    instance
        .budget()
        .denom()
        .lcm(instance.p().denom())
        .to_u64()
        .unwrap_or(u64::MAX)
}

/// Smallest multiple of [`default_quantum`] whose grid contains every
/// candidate symmetric allocation `T/m`, so the quantized optimum is at least
/// the best symmetric value.
pub fn symmetric_quantum(instance: &ProblemInstance) -> u64 {
    let budget = instance.budget();
    candidate_ms(instance.n(), budget)
        .into_iter()
        .map(|m| (budget / int(m)).denom().to_u64().unwrap_or(u64::MAX))
        .fold(default_quantum(instance), |q, d| q.lcm(&d))
}

/// Number of partitions of `total` into at most `parts` parts, saturating at
/// `u128::MAX`.
pub fn partition_count(total: u64, parts: u64) -> u128 {
    // ways[s] after processing part sizes 1..=parts (conjugate view: at most
    // `parts` parts <=> largest part at most `parts`).
    let total = total as usize;
    let mut ways = vec![0u128; total + 1];
    ways[0] = 1;
    for size in 1..=(parts as usize).min(total.max(1)) {
        for s in size..=total {
            ways[s] = ways[s].saturating_add(ways[s - size]);
        }
    }
    ways[total]
}

/// Best allocation among those whose amounts are multiples of `1/q` and that
/// spend `⌊qT⌋/q` of the budget. Ties keep the lexicographically smallest
/// non-increasing tuple.
pub fn brute_force_best(instance: &ProblemInstance, q: u64, max_enum: u64) -> Result<QuantizedSearchResult> {
    if q == 0 {
        return Err(Error::Precondition("quantum q must be positive".into()));
    }
    let n = instance.n();
    let total = floor_u64(&(instance.budget() * int(q)));
    let count = partition_count(total, n);
    if count > u128::from(max_enum) {
        return Err(Error::TooLarge {
            what: "quantized allocation search",
            size: count.to_string(),
            cap: max_enum,
            hint: "; try a smaller q",
        });
    }

    let p = instance.p();
    let (tuple, probability, evaluated) = match WeightKernel::new(p, n) {
        Some(kernel) => {
            let best = search(n, total, &|units| kernel.weight(units, q));
            let value = Rational::new(BigInt::from(best.value), BigInt::from(kernel.scale));
            (best.tuple, value, best.evaluated)
        }
        None => {
            let best = search(n, total, &|units| saturating_dp(units, q, p));
            (best.tuple, best.value, best.evaluated)
        }
    };
    let tuple = tuple.expect("at least one allocation is always enumerated");
    let amounts = tuple
        .iter()
        .map(|&a| Rational::new(BigInt::from(a), BigInt::from(q)))
        .collect();
    Ok(QuantizedSearchResult {
        best_allocation: Allocation::new(amounts)?,
        best_probability: probability,
        quantum_denominator: q,
        allocations_evaluated: evaluated,
    })
}

/// Integer form of the DP for `p = a/b`: every path weight is a product of
/// `a` and `b - a` factors, so the success mass is an integer over `b^n`.
/// Only used when `b^n` fits in a `u128`; no intermediate sum can exceed it.
struct WeightKernel {
    hit: u128,
    miss: u128,
    scale: u128,
}

impl WeightKernel {
    fn new(p: &Rational, n: u64) -> Option<Self> {
        let a = p.numer().to_u128()?;
        let b = p.denom().to_u128()?;
        let scale = b.checked_pow(u32::try_from(n).ok()?)?;
        Some(Self {
            hit: a,
            miss: b - a,
            scale,
        })
    }

    /// Success mass times `b^n`.
    fn weight(&self, units: &[u64], d: u64) -> u128 {
        let d = d as usize;
        let mut mass = vec![0u128; d + 1];
        mass[0] = 1;
        let mut reach = 0usize;
        for &a in units {
            let a = (a as usize).min(d);
            if a == 0 {
                // Hit or miss leaves the state unchanged.
                for m in &mut mass[..=reach] {
                    *m *= self.hit + self.miss;
                }
                continue;
            }
            mass[d] *= self.hit + self.miss;
            for s in (0..=reach.min(d - 1)).rev() {
                if mass[s] == 0 {
                    continue;
                }
                let t = (s + a).min(d);
                mass[t] += self.hit * mass[s];
                mass[s] *= self.miss;
            }
            reach = (reach + a).min(d);
        }
        mass[d]
    }
}

/// Splits the enumeration by the largest part and merges the partial maxima
/// in order.
fn search<V, F>(n: u64, total: u64, eval: &F) -> Best<V>
where
    V: PartialOrd + Default + Send,
    F: Fn(&[u64]) -> V + Sync,
{
    (total.div_ceil(n)..=total)
        .into_par_iter()
        .map(|first| {
            let mut walk = Search {
                n: n as usize,
                tuple: Vec::with_capacity(n as usize),
                best: Best::default(),
                eval,
            };
            walk.tuple.push(first);
            walk.extend(total - first, first);
            walk.best
        })
        .reduce(Best::default, Best::merge)
}

#[derive(Debug, Default)]
struct Best<V> {
    tuple: Option<Vec<u64>>,
    value: V,
    evaluated: u64,
}

impl<V: PartialOrd> Best<V> {
    fn offer(&mut self, tuple: &[u64], value: V) {
        self.evaluated += 1;
        if self.beaten_by(tuple, &value) {
            self.tuple = Some(tuple.to_vec());
            self.value = value;
        }
    }

    fn beaten_by(&self, tuple: &[u64], value: &V) -> bool {
        match &self.tuple {
            None => true,
            Some(current) => *value > self.value || (*value == self.value && tuple < current.as_slice()),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.evaluated += other.evaluated;
        if let Some(t) = other.tuple {
            if self.beaten_by(&t, &other.value) {
                self.tuple = Some(t);
                self.value = other.value;
            }
        }
        self
    }
}

struct Search<'a, V, F> {
    n: usize,
    tuple: Vec<u64>,
    best: Best<V>,
    eval: &'a F,
}

impl<V: PartialOrd, F: Fn(&[u64]) -> V> Search<'_, V, F> {
    /// Appends parts `<= cap` summing to `remaining` in non-increasing order.
    fn extend(&mut self, remaining: u64, cap: u64) {
        let slots = self.n - self.tuple.len();
        if slots == 0 {
            if remaining == 0 {
                let value = (self.eval)(&self.tuple);
                let tuple = std::mem::take(&mut self.tuple);
                self.best.offer(&tuple, value);
                self.tuple = tuple;
            }
            return;
        }
        if remaining > cap.saturating_mul(slots as u64) {
            return;
        }
        let lo = remaining.div_ceil(slots as u64);
        for part in (lo..=cap.min(remaining)).rev() {
            self.tuple.push(part);
            self.extend(remaining - part, part);
            self.tuple.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub generator: &'static str,
}

/// Fraction of `trials` simulated access patterns that recover the object.
///
/// Trials are split into chunks of [`MC_CHUNK`]; chunk `c` draws from
/// `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, so the result does not
/// depend on how chunks are scheduled across threads.
pub fn monte_carlo_estimate(
    instance: &ProblemInstance,
    alloc: &Allocation,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let amounts = alloc.validate_for(instance)?;
    let (units, d) = scaled_units(&amounts)?;
    let access = AccessDraw::new(instance.p());

    let chunks = trials.div_ceil(MC_CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = MC_CHUNK.min(trials - chunk * MC_CHUNK);
            (0..len)
                .filter(|_| {
                    // Draw every node so the stream layout is allocation-independent.
                    let mut held = 0u64;
                    for &u in &units {
                        if access.draw(&mut rng) {
                            held += u;
                        }
                    }
                    held >= d
                })
                .count() as u64
        })
        .sum();

    let estimate = successes as f64 / trials as f64;
    Ok(MonteCarloEstimate {
        estimate,
        standard_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
        seed,
        generator: MC_GENERATOR,
    })
}

/// Bernoulli(p) draw; exact integer comparison whenever `p`'s denominator
/// fits in a machine word.
enum AccessDraw {
    Exact { num: u64, den: u64 },
    Float(f64),
}

impl AccessDraw {
    fn new(p: &Rational) -> Self {
        match (p.numer().to_u64(), p.denom().to_u64()) {
            (Some(num), Some(den)) => AccessDraw::Exact { num, den },
            _ => AccessDraw::Float(crate::rational::to_f64(p)),
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> bool {
        match *self {
            AccessDraw::Exact { num, den } => rng.random_range(0..den) < num,
            AccessDraw::Float(p) => rng.random_bool(p),
        }
    }
}
