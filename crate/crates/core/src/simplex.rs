//! Exact finite-`n` ground truth for the `gamma = 1` urn.
//!
//! After `m` additions to `d` bins the count vector is uniformly distributed
//! on the discrete simplex `S(d, m) = { v in Z^d : v >= 1, sum(v) = d + m }`,
//! which has `binom(m + d - 1, d - 1)` elements. Everything here is built on
//! that fact, either by brute-force enumeration of the simplex or by the
//! min-value partition of it.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::moments::Rational;

/// Default cap on the number of simplex states an exact routine may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// The simplex of `d` positive counts summing to `t`, i.e. `S(d, t - d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimplexSpec {
    d: u32,
    t: u64,
}

impl SimplexSpec {
    pub fn new(d: u32, t: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("simplex needs at least one bin"));
        }
        if t < u64::from(d) {
            return Err(Error::domain(format!("total {t} is smaller than the bin count {d}")));
        }
        Ok(SimplexSpec { d, t })
    }

    /// The state space after `m` balls have been added to `d` bins.
    pub fn after_additions(d: u32, m: u64) -> Result<Self> {
        SimplexSpec::new(d, u64::from(d) + m)
    }

    pub fn bins(&self) -> u32 {
        self.d
    }

    pub fn total(&self) -> u64 {
        self.t
    }

    pub fn additions(&self) -> u64 {
        self.t - u64::from(self.d)
    }

    pub fn cardinality(&self) -> BigUint {
        simplex_cardinality(self.d, self.additions())
    }
}

/// `|S(d, m)| = binom(m + d - 1, d - 1)`; 0 for `d = 0`.
pub fn simplex_cardinality(d: u32, m: u64) -> BigUint {
    if d == 0 {
        return BigUint::zero();
    }
    binomial(BigUint::from(m + u64::from(d) - 1), BigUint::from(d - 1))
}

fn check_cap(what: &'static str, count: &BigUint, cap: u64) -> Result<()> {
    match count.to_u64() {
        Some(c) if c <= cap => Ok(()),
        _ => Err(Error::resource(what, count, cap)),
    }
}

/// Lexicographically ordered iterator over a simplex.
#[derive(Debug, Clone)]
pub struct SimplexIter {
    total: u64,
    next: Option<Vec<u64>>,
}

impl Iterator for SimplexIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        self.next = successor(&current, self.total);
        Some(current)
    }
}

// Lexicographic successor among positive compositions of `total`: bump the
// rightmost non-final entry whose tail still has slack, then reset the tail to
// (1, .., 1, remainder).
fn successor(v: &[u64], total: u64) -> Option<Vec<u64>> {
    let d = v.len();
    let mut tail_sum = v[d - 1];
    for i in (0..d - 1).rev() {
        let tail_len = (d - 1 - i) as u64;
        if tail_sum > tail_len {
            let mut next = v.to_vec();
            next[i] += 1;
            for slot in &mut next[i + 1..d - 1] {
                *slot = 1;
            }
            let head: u64 = next[..d - 1].iter().sum();
            next[d - 1] = total - head;
            return Some(next);
        }
        tail_sum += v[i];
    }
    None
}

/// Every vector of the simplex exactly once, in lexicographic order, subject
/// to [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_simplex(spec: SimplexSpec) -> Result<SimplexIter> {
    enumerate_simplex_with_cap(spec, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_simplex_with_cap(spec: SimplexSpec, cap: u64) -> Result<SimplexIter> {
    check_cap("simplex enumeration", &spec.cardinality(), cap)?;
    let d = spec.d as usize;
    let mut first = vec![1u64; d];
    first[d - 1] = spec.t - (d as u64 - 1);
    Ok(SimplexIter {
        total: spec.t,
        next: Some(first),
    })
}

/// A probability law over count vectors of one simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub spec: SimplexSpec,
    pub probabilities: BTreeMap<Vec<u64>, Rational>,
}

impl ExactDistribution {
    pub fn total_mass(&self) -> Rational {
        self.probabilities.values().sum()
    }

    /// The common probability if every state of the support carries the same
    /// mass.
    pub fn uniform_value(&self) -> Option<&Rational> {
        let mut values = self.probabilities.values();
        let first = values.next()?;
        values.all(|v| v == first).then_some(first)
    }

    /// Uniform over the whole simplex, with mass exactly `1 / |S|`.
    pub fn is_exactly_uniform(&self) -> bool {
        let card = self.spec.cardinality();
        let expected = Rational::new(BigInt::one(), BigInt::from(card.clone()));
        BigUint::from(self.probabilities.len()) == card
            && self.uniform_value() == Some(&expected)
            && self.probabilities.keys().all(|v| in_simplex(v, &self.spec))
    }
}

fn in_simplex(v: &[u64], spec: &SimplexSpec) -> bool {
    v.len() == spec.d as usize && v.iter().all(|&x| x >= 1) && v.iter().sum::<u64>() == spec.t
}

/// Law of the counts after `m` additions to `d` bins, by exact dynamic
/// programming over the process: from state `v` with total `s`, bin `k`
/// receives the next ball with probability `v_k / s`.
pub fn exact_state_distribution(d: u32, m: u64) -> Result<ExactDistribution> {
    exact_state_distribution_with_cap(d, m, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_state_distribution_with_cap(d: u32, m: u64, cap: u64) -> Result<ExactDistribution> {
    let spec = SimplexSpec::after_additions(d, m)?;
    check_cap("state distribution", &spec.cardinality(), cap)?;

    let mut law: BTreeMap<Vec<u64>, Rational> = BTreeMap::new();
    law.insert(vec![1; d as usize], Rational::one());
    for step in 0..m {
        let total = BigInt::from(u64::from(d) + step);
        let mut next: BTreeMap<Vec<u64>, Rational> = BTreeMap::new();
        for (state, p) in &law {
            let share = p / &total;
            for k in 0..state.len() {
                let mut succ = state.clone();
                succ[k] += 1;
                let mass = &share * BigInt::from(state[k]);
                *next.entry(succ).or_insert_with(Rational::zero) += mass;
            }
        }
        law = next;
    }
    Ok(ExactDistribution {
        spec,
        probabilities: law,
    })
}

/// A cell of the min-value partition of `S(d, (alpha - 1) d)`: vectors summing
/// to `alpha * d` whose minimum `mu` is attained exactly `tau` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TBlockSpec {
    alpha: u32,
    d: u32,
    mu: u32,
    tau: u32,
}

impl TBlockSpec {
    pub fn new(alpha: u32, d: u32, mu: u32, tau: u32) -> Result<Self> {
        if alpha < 2 || d < 2 {
            return Err(Error::domain("partition blocks need alpha >= 2 and d >= 2"));
        }
        if mu == 0 || mu >= alpha {
            return Err(Error::domain(format!("minimum value {mu} outside [1, {}]", alpha - 1)));
        }
        if tau == 0 || tau >= d {
            return Err(Error::domain(format!("multiplicity {tau} outside [1, {}]", d - 1)));
        }
        Ok(TBlockSpec { alpha, d, mu, tau })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }
    pub fn bins(&self) -> u32 {
        self.d
    }
    pub fn min_value(&self) -> u32 {
        self.mu
    }
    pub fn multiplicity(&self) -> u32 {
        self.tau
    }
}

/// `|T(alpha, d, mu, tau)| = binom((alpha - mu) d - 1, d - tau - 1) * binom(d, tau)`.
pub fn t_cardinality(block: TBlockSpec) -> BigUint {
    let TBlockSpec { alpha, d, mu, tau } = block;
    let top = u64::from(alpha - mu) * u64::from(d) - 1;
    binomial(BigUint::from(top), BigUint::from(d - tau - 1))
        * binomial(BigUint::from(d), BigUint::from(tau))
}

/// Checks `binom(alpha d - 1, d - 1) = 1 + sum_{mu, tau} |T(alpha, d, mu, tau)|`.
pub fn partition_identity_check(alpha: u32, d: u32) -> Result<bool> {
    if alpha < 2 || d < 2 {
        return Err(Error::domain("partition identity needs alpha >= 2 and d >= 2"));
    }
    let lhs = simplex_cardinality(d, u64::from(alpha - 1) * u64::from(d));
    let mut rhs = BigUint::one();
    for mu in 1..alpha {
        for tau in 1..d {
            rhs += t_cardinality(TBlockSpec::new(alpha, d, mu, tau)?);
        }
    }
    Ok(lhs == rhs)
}

/// Result of sorting every vector of `S(d, (alpha - 1) d)` into its block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCensus {
    pub alpha: u32,
    pub d: u32,
    /// Number of vectors with all entries equal (always 1).
    pub all_equal: u64,
    /// Observed size of each `(mu, tau)` block.
    pub blocks: BTreeMap<(u32, u32), u64>,
    /// Vectors that fit no block.
    pub unclassified: u64,
    pub visited: u64,
}

/// Enumerates the simplex once and buckets each vector by (minimum, number of
/// times the minimum occurs).
pub fn block_census(alpha: u32, d: u32, cap: u64) -> Result<BlockCensus> {
    if alpha < 2 || d < 2 {
        return Err(Error::domain("block census needs alpha >= 2 and d >= 2"));
    }
    let spec = SimplexSpec::new(d, u64::from(alpha) * u64::from(d))?;
    let mut census = BlockCensus {
        alpha,
        d,
        all_equal: 0,
        blocks: BTreeMap::new(),
        unclassified: 0,
        visited: 0,
    };
    for v in enumerate_simplex_with_cap(spec, cap)? {
        census.visited += 1;
        let min = *v.iter().min().expect("d >= 2");
        let tau = v.iter().filter(|&&x| x == min).count() as u32;
        if tau == d {
            census.all_equal += 1;
        } else if min >= 1 && min < u64::from(alpha) {
            *census.blocks.entry((min as u32, tau)).or_insert(0) += 1;
        } else {
            census.unclassified += 1;
        }
    }
    Ok(census)
}

/// `E[(H_d(n) / n)^m]` by enumerating the uniform law on `S(d, n - d)`.
pub fn exact_finite_moment(d: u32, n: u64, m: u32) -> Result<Rational> {
    exact_finite_moment_with_cap(d, n, m, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_finite_moment_with_cap(d: u32, n: u64, m: u32, cap: u64) -> Result<Rational> {
    let spec = SimplexSpec::new(d, n)?;
    let mut states = BigUint::zero();
    let mut sum = BigUint::zero();
    for v in enumerate_simplex_with_cap(spec, cap)? {
        let max = *v.iter().max().expect("nonempty");
        sum += BigUint::from(max).pow(m);
        states += 1u32;
    }
    let denom = states * BigUint::from(n).pow(m);
    Ok(Rational::new(sum.into(), denom.into()))
}

/// `E[(H_d(t) / t)^m]` through the min-value partition, without enumerating.
///
/// Conditioned on the minimum being `mu` and attained exactly `tau` times,
/// `H_d(t)` is distributed as `mu + H_{d - tau}(t - d mu)`, so
///
/// ```text
/// E[H_d(t)^m] = 1/|S| ( [d | t] (t/d)^m
///     + sum_{mu, tau} binom(d, tau) |S(d - tau, t - d mu)|
///         sum_k binom(m, k) mu^k E[H_{d - tau}(t - d mu)^{m - k}] )
/// ```
///
/// with `E[H_1(t)^k] = t^k`.
pub fn partition_finite_moment(d: u32, t: u64, m: u32) -> Result<Rational> {
    PartitionMoments::default().fraction_moment(d, t, m)
}

/// Memoized raw moments `E[H_d(t)^k]` for the partition recursion. Each key
/// is written once.
#[derive(Debug, Default, Clone)]
pub struct PartitionMoments {
    memo: HashMap<(u32, u64, u32), Rational>,
}

impl PartitionMoments {
    pub fn fraction_moment(&mut self, d: u32, t: u64, m: u32) -> Result<Rational> {
        SimplexSpec::new(d, t)?;
        let raw = self.raw_moment(d, t, m);
        Ok(raw / BigInt::from(t).pow(m))
    }

    /// `E[H_d(t)^k]`.
    pub fn raw_moment(&mut self, d: u32, t: u64, k: u32) -> Rational {
        debug_assert!(d >= 1 && t >= u64::from(d));
        if k == 0 {
            return Rational::one();
        }
        if d == 1 {
            return Rational::from_integer(BigInt::from(t).pow(k));
        }
        if let Some(v) = self.memo.get(&(d, t, k)) {
            return v.clone();
        }

        let d64 = u64::from(d);
        let mut acc = Rational::zero();
        if t.is_multiple_of(d64) {
            acc += Rational::from_integer(BigInt::from(t / d64).pow(k));
        }
        for tau in 1..d {
            let rest = d - tau;
            let ways = BigInt::from(binomial(BigUint::from(d), BigUint::from(tau)));
            // remaining `rest` entries each >= mu + 1: t - d mu >= rest
            let mut mu = 1u64;
            while t >= d64 * mu + u64::from(rest) {
                let sub_t = t - d64 * mu;
                let block = &ways * BigInt::from(simplex_cardinality(rest, sub_t - u64::from(rest)));
                let mut shifted = Rational::zero();
                let mut mu_pow = BigInt::one();
                for j in 0..=k {
                    let c = BigInt::from(binomial(BigUint::from(k), BigUint::from(j)));
                    shifted += self.raw_moment(rest, sub_t, k - j) * (c * &mu_pow);
                    mu_pow *= mu;
                }
                acc += shifted * block;
                mu += 1;
            }
        }
        let card = BigInt::from(simplex_cardinality(d, t - d64));
        let value = acc / card;
        self.memo.insert((d, t, k), value.clone());
        value
    }
}

/// `int_0^c x^a (c - x)^b dx = a! b! / (a + b + 1)! * c^(a + b + 1)`.
pub fn beta_integral(a: u32, b: u32, c: f64) -> Result<f64> {
    if a == 0 || b == 0 {
        return Err(Error::domain("beta integral needs positive integer exponents"));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::domain("beta integral needs c > 0"));
    }
    // a! b! / (a+b+1)! = prod_{i=1}^{b} i / (a + i)  /  (a + b + 1)
    let mut coef = 1.0 / f64::from(a + b + 1);
    for i in 1..=b {
        coef *= f64::from(i) / f64::from(a + i);
    }
    Ok(coef * c.powi((a + b + 1) as i32))
}
