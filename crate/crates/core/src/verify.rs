//! Batched consistency checks across the exact and simulated routes.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::moments::{
    coefficient_of_variation, mean_bounds, mean_fraction, mean_fractions_f64, second_moment,
    MomentTable, Rational, Recurrence, TableLimits,
};
use crate::quadrature::adaptive_simpson;
use crate::sim::{state_frequencies, Sampler};
use crate::simplex::{
    beta_integral, block_census, exact_finite_moment, exact_state_distribution,
    partition_identity_check, t_cardinality, PartitionMoments, TBlockSpec, DEFAULT_ENUMERATION_CAP,
};
use crate::stats::chi_square_gof;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub level: Level,
    pub seed: u64,
    /// Overwrite one entry of the two-term moment table before checking.
    pub corrupt_moment_table: bool,
}

impl VerifyOptions {
    pub fn new(level: Level) -> Self {
        VerifyOptions {
            level,
            seed: 20_250_101,
            corrupt_moment_table: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type CheckResult = std::result::Result<String, String>;
type Check = (&'static str, fn(&Context) -> CheckResult);

struct Context {
    options: VerifyOptions,
    tables: Vec<MomentTable>,
}

impl Context {
    fn two_term(&self) -> &MomentTable {
        self.tables
            .iter()
            .find(|t| t.recurrence() == Recurrence::TwoTerm)
            .expect("two-term table is always built")
    }

    fn full(&self) -> bool {
        self.options.level == Level::Full
    }
}

/// Runs every check for the requested level, in a fixed order.
pub fn run(options: VerifyOptions) -> Vec<CheckOutcome> {
    let mut tables: Vec<MomentTable> = Recurrence::ALL
        .iter()
        .map(|&r| MomentTable::build(12, 100, r, TableLimits::default()).expect("within cap"))
        .collect();
    if options.corrupt_moment_table {
        for t in tables.iter_mut().filter(|t| t.recurrence() == Recurrence::TwoTerm) {
            let bumped = t.get(2, 3).expect("built") + BigRational::new(1.into(), 1000.into());
            t.corrupt_entry(2, 3, bumped);
        }
    }
    let ctx = Context { options, tables };

    let mut checks: Vec<Check> = vec![
        ("cross-recurrence agreement", cross_recurrence),
        ("closed-form mean and second moment", closed_forms),
        ("moment range and monotonicity", range_and_monotonicity),
        ("mean bounds", bounds),
        ("coefficient-of-variation peak", cv_peak),
        ("partition identity", partition_identity),
        ("partition block census", partition_census),
        ("uniform state law", uniformity),
        ("finite-n oracle equivalence", oracle_equivalence),
        ("beta integral vs quadrature", beta_vs_quadrature),
    ];
    if ctx.full() {
        checks.push(("small-state chi-square", small_state_chi_square));
        checks.push(("sampler equivalence chi-square", sampler_equivalence));
    }

    checks
        .into_iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let result = check(&ctx);
            let elapsed = start.elapsed();
            let (passed, detail) = match result {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                passed,
                detail,
                elapsed,
            }
        })
        .collect()
}

fn cross_recurrence(ctx: &Context) -> CheckResult {
    let reference = &ctx.tables[0];
    let mut compared = 0;
    for other in &ctx.tables[1..] {
        for m in 0..=12 {
            for d in 1..=30 {
                if reference.get(m, d) != other.get(m, d) {
                    return Err(format!(
                        "{} and {} differ at m={m}, d={d}",
                        reference.recurrence(),
                        other.recurrence()
                    ));
                }
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} entry pairs identical (m <= 12, d <= 30)"))
}

fn closed_forms(ctx: &Context) -> CheckResult {
    let table = ctx.two_term();
    for d in 1..=100 {
        let mean = mean_fraction(d).map_err(|e| e.to_string())?;
        if table.get(1, d) != Some(&mean) {
            return Err(format!("first moment differs from H_d/d at d={d}"));
        }
        let second = second_moment(d).map_err(|e| e.to_string())?;
        if table.get(2, d) != Some(&second) {
            return Err(format!("second moment differs from the harmonic double sum at d={d}"));
        }
    }
    Ok("exact for 1 <= d <= 100".into())
}

fn range_and_monotonicity(ctx: &Context) -> CheckResult {
    let t = ctx.two_term();
    for m in 1..=12u32 {
        for d in 1..=30u32 {
            let v = t.get(m, d).expect("built");
            let floor = Rational::new(1.into(), BigInt::from(d).pow(m));
            if *v < floor || *v > Rational::from_integer(1.into()) {
                return Err(format!("M({m},{d}) outside [d^-m, 1]"));
            }
            if t.get(m, d) > t.get(m - 1, d) {
                return Err(format!("M({m},{d}) exceeds M({},{d})", m - 1));
            }
            if d > 1 && t.get(m, d) > t.get(m, d - 1) {
                return Err(format!("M({m},{d}) exceeds M({m},{})", d - 1));
            }
        }
    }
    Ok("d^-m <= M <= 1, nonincreasing in m and d (m <= 12, d <= 30)".into())
}

fn bounds(_: &Context) -> CheckResult {
    let d_max: u32 = 10_000;
    for (i, mean) in mean_fractions_f64().take(d_max as usize).enumerate() {
        let d = i as u32 + 1;
        let (lo, hi) = mean_bounds(d).map_err(|e| e.to_string())?;
        if !(lo <= mean && mean <= hi) {
            return Err(format!("d={d}: {mean} outside [{lo}, {hi}]"));
        }
    }
    Ok(format!("(ln d)/d <= H_d/d <= (ln d + 1)/d for d <= {d_max}"))
}

fn cv_peak(_: &Context) -> CheckResult {
    let cv = |d| coefficient_of_variation(d).map_err(|e| e.to_string());
    let mut best = (1, f64::MIN);
    for d in 1..=50 {
        let v = cv(d)?;
        if v > best.1 {
            best = (d, v);
        }
    }
    if best.0 != 10 {
        return Err(format!("peak at d={} instead of 10", best.0));
    }
    if !(0.268..=0.273).contains(&best.1) {
        return Err(format!("CV(10) = {} outside [0.268, 0.273]", best.1));
    }
    let grid = std::iter::once(10).chain((4..=10).map(|k| 1u32 << k));
    let values = grid.map(|d| cv(d).map(|v| (d, v))).collect::<Result<Vec<_>, _>>()?;
    if let Some(w) = values.windows(2).find(|w| w[1].1 >= w[0].1) {
        return Err(format!("CV not decreasing between d={} and d={}", w[0].0, w[1].0));
    }
    Ok(format!("argmax d=10, CV(10) = {:.6}; decreasing to d=1024", best.1))
}

fn partition_identity(_: &Context) -> CheckResult {
    for alpha in 2..=10 {
        for d in 2..=10 {
            if !partition_identity_check(alpha, d).map_err(|e| e.to_string())? {
                return Err(format!("identity fails at alpha={alpha}, d={d}"));
            }
        }
    }
    Ok("holds for 2 <= alpha, d <= 10".into())
}

fn partition_census(_: &Context) -> CheckResult {
    let limit = 6;
    for alpha in 2..=limit {
        for d in 2..=limit {
            census_matches(alpha, d)?;
        }
    }
    Ok(format!("blocks partition the simplex for 2 <= alpha, d <= {limit}"))
}

/// Enumerated block sizes against the closed-form cardinalities.
fn census_matches(alpha: u32, d: u32) -> CheckResult {
    let census = block_census(alpha, d, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
    if census.all_equal != 1 || census.unclassified != 0 {
        return Err(format!("alpha={alpha}, d={d}: stray vectors"));
    }
    let mut union = 1u64;
    for mu in 1..alpha {
        for tau in 1..d {
            let block = TBlockSpec::new(alpha, d, mu, tau).map_err(|e| e.to_string())?;
            let seen = census.blocks.get(&(mu, tau)).copied().unwrap_or(0);
            if BigUint::from(seen) != t_cardinality(block) {
                return Err(format!("block ({alpha},{d},{mu},{tau}) has {seen} members"));
            }
            union += seen;
        }
    }
    let card = crate::simplex::simplex_cardinality(d, u64::from(alpha - 1) * u64::from(d));
    if BigUint::from(union) != card || census.visited != union {
        return Err(format!("alpha={alpha}, d={d}: union size {union} != {card}"));
    }
    Ok(String::new())
}

fn uniformity(_: &Context) -> CheckResult {
    for d in 1..=4 {
        for m in 0..=8 {
            let law = exact_state_distribution(d, m).map_err(|e| e.to_string())?;
            if !law.is_exactly_uniform() {
                return Err(format!("law after {m} additions to {d} bins is not uniform"));
            }
        }
    }
    Ok("exactly uniform for d <= 4, m <= 8".into())
}

fn oracle_equivalence(_: &Context) -> CheckResult {
    let t_max = 24;
    let mut oracle = PartitionMoments::default();
    for d in 1..=4u32 {
        for t in u64::from(d)..=t_max {
            for m in 0..=4 {
                let a = exact_finite_moment(d, t, m).map_err(|e| e.to_string())?;
                let b = oracle.fraction_moment(d, t, m).map_err(|e| e.to_string())?;
                if a != b {
                    return Err(format!("d={d}, t={t}, m={m}: enumeration {a} vs partition {b}"));
                }
            }
        }
    }
    Ok(format!("identical for d <= 4, t <= {t_max}, m <= 4"))
}

fn beta_vs_quadrature(_: &Context) -> CheckResult {
    let mut worst = 0.0f64;
    for a in 1..=6 {
        for b in 1..=6 {
            for c in [0.5, 1.0, 2.0] {
                let closed = beta_integral(a, b, c).map_err(|e| e.to_string())?;
                let numeric = adaptive_simpson(
                    |x: f64| x.powi(a as i32) * (c - x).powi(b as i32),
                    0.0,
                    c,
                    1e-10,
                );
                let rel = ((closed - numeric) / closed).abs();
                worst = worst.max(rel);
                if rel > 1e-9 {
                    return Err(format!("a={a}, b={b}, c={c}: relative error {rel:e}"));
                }
            }
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn uniform_gof(d: u32, n: u64, replicates: u64, seed: u64, sampler: Sampler) -> Result<f64, String> {
    let law = exact_state_distribution(d, n - u64::from(d)).map_err(|e| e.to_string())?;
    let freq = state_frequencies(d, n, replicates, seed, sampler).map_err(|e| e.to_string())?;
    let observed: Vec<u64> = law.probabilities.keys().map(|k| freq.get(k).copied().unwrap_or(0)).collect();
    if observed.iter().sum::<u64>() != replicates {
        return Err("sampler produced states outside the simplex".into());
    }
    let expected: Vec<f64> = law.probabilities.values().map(|p| p.to_f64().unwrap_or(0.0)).collect();
    let test = chi_square_gof(&observed, &expected).map_err(|e| e.to_string())?;
    Ok(test.p_value)
}

fn small_state_chi_square(ctx: &Context) -> CheckResult {
    let p = uniform_gof(3, 8, 1_000_000, ctx.options.seed, Sampler::BallIdentity)?;
    if p > 1e-3 {
        Ok(format!("21 states, 10^6 replicates, p = {p:.4}"))
    } else {
        Err(format!("p = {p:e} <= 1e-3"))
    }
}

fn sampler_equivalence(ctx: &Context) -> CheckResult {
    let mut ps = Vec::new();
    for sampler in [Sampler::BallIdentity, Sampler::Weighted] {
        let p = uniform_gof(2, 5, 100_000, ctx.options.seed ^ 0x5a5a, sampler)?;
        if p <= 1e-3 {
            return Err(format!("{sampler:?} sampler: p = {p:e} <= 1e-3"));
        }
        ps.push(p);
    }
    Ok(format!("ball-identity p = {:.4}, weighted p = {:.4}", ps[0], ps[1]))
}
