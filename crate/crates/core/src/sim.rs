//! Monte Carlo sampler for the Polya urn with exponent `gamma`.
//!
//! Each replicate starts from one ball per bin and adds balls until the total
//! reaches `n`; bin `k` is chosen with probability `count_k^gamma / sum_j
//! count_j^gamma`. Two samplers implement this:
//!
//! * ball identity (`gamma = 1` only): keep the bin of every ball in a flat
//!   array and pick a uniformly random ball, O(1) per step;
//! * weighted: keep `count^gamma` in a [`Fenwick`] tree and search a uniform
//!   target in it, O(log d) per step.
//!
//! Replicate `r` of a batch draws from its own generator seeded with
//! [`stream_seed`]`(seed, r)`, so results depend only on the configuration and
//! not on how replicates are scheduled across workers.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;

/// Identifies the random number generator and stream derivation. Exact sample
/// values depend on both.
pub const GENERATOR_ID: &str = "xoshiro256++/splitmix64-streams/v1";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `index` within a batch seeded by `seed`.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed).wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

/// Source of the uniform draws that drive a sampler.
pub trait DrawSource {
    /// Uniform integer in `0..bound`.
    fn index_below(&mut self, bound: u64) -> u64;
    /// Uniform real in `[0, 1)`.
    fn unit(&mut self) -> f64;
}

#[derive(Debug, Clone)]
pub struct RngDraws<R>(pub R);

impl<R: Rng> DrawSource for RngDraws<R> {
    #[inline]
    fn index_below(&mut self, bound: u64) -> u64 {
        self.0.random_range(0..bound)
    }

    #[inline]
    fn unit(&mut self) -> f64 {
        self.0.random()
    }
}

/// Replays a fixed list of integer draws.
#[derive(Debug, Clone, Default)]
pub struct ReplayDraws {
    draws: Vec<u64>,
    pos: usize,
}

impl ReplayDraws {
    pub fn new(draws: Vec<u64>) -> Self {
        ReplayDraws { draws, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.draws.len() - self.pos
    }
}

impl DrawSource for ReplayDraws {
    fn index_below(&mut self, bound: u64) -> u64 {
        let v = self.draws[self.pos];
        assert!(v < bound, "replayed draw {v} out of range 0..{bound}");
        self.pos += 1;
        v
    }

    fn unit(&mut self) -> f64 {
        panic!("replay source only supplies integer draws")
    }
}

/// Per-bin ball counts of one realization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UrnState {
    counts: Vec<u64>,
    total: u64,
}

impl UrnState {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::domain("urn needs at least one bin"));
        }
        if counts.contains(&0) {
            return Err(Error::domain("every bin holds at least one ball"));
        }
        let total = counts.iter().sum();
        Ok(UrnState { counts, total })
    }

    /// One ball in each of `d` bins.
    pub fn initial(d: u32) -> Self {
        UrnState {
            counts: vec![1; d as usize],
            total: u64::from(d),
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.counts
    }
}

/// `max(counts) / total`.
pub fn heaviest_fraction(state: &UrnState) -> f64 {
    let max = state.counts.iter().copied().max().unwrap_or(0);
    max as f64 / state.total as f64
}

/// Grows `d` one-ball bins to `n` balls at `gamma = 1` by picking a uniform
/// existing ball and adding to its bin. `balls` is scratch space.
/// `on_pick` sees each chosen bin in order.
pub fn grow_ball_identity<D: DrawSource>(
    d: u32,
    n: u64,
    draws: &mut D,
    balls: &mut Vec<u32>,
    mut on_pick: impl FnMut(usize),
) -> UrnState {
    let mut state = UrnState::initial(d);
    balls.clear();
    balls.extend(0..d);
    while state.total < n {
        let ball = draws.index_below(state.total) as usize;
        let bin = balls[ball];
        state.counts[bin as usize] += 1;
        balls.push(bin);
        state.total += 1;
        on_pick(bin as usize);
    }
    state
}

/// Grows `d` one-ball bins to `n` balls choosing bins with weight
/// `count^gamma`. At `gamma = 1` weights are exact integers and each step
/// consumes one integer draw below the current total; otherwise it consumes
/// one uniform real.
pub fn grow_weighted<D: DrawSource>(
    d: u32,
    n: u64,
    gamma: f64,
    draws: &mut D,
    mut on_pick: impl FnMut(usize),
) -> UrnState {
    let mut state = UrnState::initial(d);
    if gamma == 1.0 {
        let mut tree = Fenwick::from_weights(&state.counts);
        while state.total < n {
            let bin = tree.find(draws.index_below(state.total));
            state.counts[bin] += 1;
            state.total += 1;
            tree.add(bin, 1);
            on_pick(bin);
        }
    } else {
        let mut tree = Fenwick::from_weights(&vec![1.0f64; d as usize]);
        while state.total < n {
            let target = draws.unit() * tree.total();
            let bin = tree.find(target);
            let old = state.counts[bin] as f64;
            state.counts[bin] += 1;
            state.total += 1;
            if gamma != 0.0 {
                tree.add(bin, (old + 1.0).powf(gamma) - old.powf(gamma));
            }
            on_pick(bin);
        }
    }
    state
}

fn check_process(d: u32, n: u64, gamma: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("the number of bins d must be at least 1"));
    }
    if n < u64::from(d) {
        return Err(Error::domain(format!("final total n = {n} is below d = {d}")));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!("gamma must be finite and nonnegative, got {gamma}")));
    }
    if u32::try_from(n).is_err() {
        return Err(Error::domain("n must fit in 32 bits"));
    }
    Ok(())
}

#[derive(Debug, Default)]
struct Scratch {
    balls: Vec<u32>,
}

fn replicate(d: u32, n: u64, gamma: f64, seed: u64, scratch: &mut Scratch) -> UrnState {
    let mut draws = RngDraws(Xoshiro256PlusPlus::seed_from_u64(seed));
    if gamma == 1.0 {
        grow_ball_identity(d, n, &mut draws, &mut scratch.balls, |_| {})
    } else {
        grow_weighted(d, n, gamma, &mut draws, |_| {})
    }
}

/// One realization, deterministic in `stream_seed`.
pub fn run_single(d: u32, n: u64, gamma: f64, stream_seed: u64) -> Result<UrnState> {
    check_process(d, n, gamma)?;
    Ok(replicate(d, n, gamma, stream_seed, &mut Scratch::default()))
}

/// Which sampler drives [`state_frequencies`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    BallIdentity,
    Weighted,
}

/// Terminal-state histogram of `replicates` runs at `gamma = 1`.
pub fn state_frequencies(
    d: u32,
    n: u64,
    replicates: u64,
    seed: u64,
    sampler: Sampler,
) -> Result<BTreeMap<Vec<u64>, u64>> {
    check_process(d, n, 1.0)?;
    let states: Vec<Vec<u64>> = (0..replicates)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, r| {
            let mut draws = RngDraws(Xoshiro256PlusPlus::seed_from_u64(stream_seed(seed, r)));
            let state = match sampler {
                Sampler::BallIdentity => grow_ball_identity(d, n, &mut draws, &mut scratch.balls, |_| {}),
                Sampler::Weighted => grow_weighted(d, n, 1.0, &mut draws, |_| {}),
            };
            state.into_counts()
        })
        .collect();
    let mut freq = BTreeMap::new();
    for s in states {
        *freq.entry(s).or_insert(0) += 1;
    }
    Ok(freq)
}

/// One batch of replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub d: u32,
    /// Final total number of balls.
    pub n: u64,
    pub gamma: f64,
    pub samples: u64,
    pub seed: u64,
    /// Ascending, each in (0, 1).
    pub quantiles: Vec<f64>,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
    /// Keep the sorted per-replicate fractions in the summary.
    pub keep_fractions: bool,
}

impl SimConfig {
    pub fn new(d: u32, n: u64) -> Self {
        SimConfig {
            d,
            n,
            gamma: 1.0,
            samples: 10_000,
            seed: 0,
            quantiles: vec![0.05, 0.2, 0.8, 0.95],
            workers: None,
            keep_fractions: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_process(self.d, self.n, self.gamma)?;
        if self.samples == 0 {
            return Err(Error::domain("need at least one sample"));
        }
        if let Some(&q) = self.quantiles.iter().find(|&&q| !(q > 0.0 && q < 1.0)) {
            return Err(Error::domain(format!("quantile {q} outside (0, 1)")));
        }
        if self.quantiles.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("quantiles must be strictly ascending"));
        }
        if self.workers == Some(0) {
            return Err(Error::domain("worker count must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub d: u32,
    pub n: u64,
    pub gamma: f64,
    pub samples: u64,
    pub mean: f64,
    /// Sample standard deviation (0 for a single sample).
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub quantile_values: Vec<(f64, f64)>,
    pub fractions: Option<Vec<f64>>,
}

impl SampleSummary {
    /// Standard error of [`SampleSummary::mean`].
    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.samples as f64).sqrt()
    }

    pub fn coefficient_of_variation(&self) -> f64 {
        self.std_dev / self.mean
    }

    pub fn quantile(&self, q: f64) -> Option<f64> {
        self.quantile_values
            .iter()
            .find(|(p, _)| *p == q)
            .map(|&(_, v)| v)
    }
}

/// Runs `config.samples` replicates and summarizes their heaviest-bin
/// fractions. Bit-identical for a fixed config regardless of worker count.
pub fn simulate_batch(config: &SimConfig) -> Result<SampleSummary> {
    config.validate()?;
    let mut fractions = match config.workers {
        None => batch_fractions(config),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?
            .install(|| batch_fractions(config)),
    };

    // Reductions run sequentially in replicate order.
    let count = fractions.len() as f64;
    let mean = fractions.iter().sum::<f64>() / count;
    let std_dev = if fractions.len() > 1 {
        (fractions.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
    } else {
        0.0
    };

    fractions.sort_by(f64::total_cmp);
    let quantile_values = config
        .quantiles
        .iter()
        .map(|&q| quantile(&fractions, q).map(|v| (q, v)))
        .collect::<Result<Vec<_>>>()?;

    Ok(SampleSummary {
        d: config.d,
        n: config.n,
        gamma: config.gamma,
        samples: config.samples,
        mean,
        std_dev,
        min: fractions[0],
        max: fractions[fractions.len() - 1],
        quantile_values,
        fractions: config.keep_fractions.then_some(fractions),
    })
}

fn batch_fractions(config: &SimConfig) -> Vec<f64> {
    let SimConfig { d, n, gamma, seed, .. } = *config;
    (0..config.samples)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, r| {
            heaviest_fraction(&replicate(d, n, gamma, stream_seed(seed, r), scratch))
        })
        .collect()
}

/// Nearest-rank quantile of an ascending slice: the element at index
/// `ceil(q * len) - 1`.
pub fn quantile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::domain("quantile of an empty sample"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
    }
    let len = sorted.len() as f64;
    let mut rank = q * len;
    // snap products like 0.07 * 100 = 7.000000000000001 back to the integer
    let nearest = rank.round();
    if (rank - nearest).abs() <= 1e-9 * len {
        rank = nearest;
    }
    let idx = (rank.ceil() as usize).clamp(1, sorted.len()) - 1;
    Ok(sorted[idx])
}

/// Terminal heaviest fractions across replicates, for phase checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSummary {
    pub d: u32,
    pub gamma: f64,
    pub n: u64,
    pub replicates: u64,
    pub median: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

pub fn regime_probe(d: u32, gamma: f64, n: u64, replicates: u64, seed: u64) -> Result<RegimeSummary> {
    let config = SimConfig {
        gamma,
        samples: replicates,
        seed,
        quantiles: vec![0.5],
        ..SimConfig::new(d, n)
    };
    let s = simulate_batch(&config)?;
    Ok(RegimeSummary {
        d,
        gamma,
        n,
        replicates,
        median: s.quantile_values[0].1,
        mean: s.mean,
        min: s.min,
        max: s.max,
    })
}
