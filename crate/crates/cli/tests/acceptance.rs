//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every tolerance and runtime budget below is fixed; nothing is calibrated
//! at run time.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_bigint::BigUint;

use heaviest_urn::moments::{mean_fractions_f64, to_f64};
use heaviest_urn::quadrature::adaptive_simpson;
use heaviest_urn::sim::{state_frequencies, Sampler};
use heaviest_urn::simplex::{block_census, PartitionMoments};
use heaviest_urn::stats::chi_square_gof;
use heaviest_urn::{
    beta_integral, coefficient_of_variation, exact_finite_moment, exact_state_distribution,
    limiting_moment, mean_bounds, moment_table, partition_identity_check, regime_probe,
    simplex_cardinality, simulate_batch, t_cardinality, Rational, Recurrence, SimConfig,
    TBlockSpec, DEFAULT_ENUMERATION_CAP,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn q(n: u64, d: u64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

// Independent of the library's harmonic helpers: fresh summation per d.
fn harmonic_sum(d: u64) -> Rational {
    (1..=d).map(|k| q(1, k)).sum()
}

fn mean_identity() -> Outcome {
    for rec in Recurrence::ALL {
        for d in 1..=100u32 {
            let lhs = limiting_moment(1, d, rec).map_err(|e| e.to_string())?;
            let rhs = harmonic_sum(u64::from(d)) / BigInt::from(d);
            if lhs != rhs {
                return Err(format!("{rec}: M(1,{d}) = {lhs} but H_d/d = {rhs}"));
            }
        }
    }
    Ok("M(1,d) = H_d/d exactly, d = 1..100, all recurrences".into())
}

fn second_moment_identity() -> Outcome {
    let harmonics: Vec<Rational> = (1..=100).map(harmonic_sum).collect();
    for rec in Recurrence::ALL {
        let table = moment_table(2, 100, rec).map_err(|e| e.to_string())?;
        let mut inner = Rational::from_integer(0.into());
        for d in 1..=100u64 {
            inner += &harmonics[d as usize - 1] / BigInt::from(d);
            let rhs = &inner * q(2, d * (d + 1));
            if table.get(2, d as u32) != Some(&rhs) {
                return Err(format!("{rec}: M(2,{d}) differs from the double harmonic sum"));
            }
        }
    }
    Ok("M(2,d) = 2/(d(d+1)) sum H_j/j exactly, d = 1..100".into())
}

fn triple_recurrence() -> Outcome {
    let tables: Vec<_> = Recurrence::ALL
        .iter()
        .map(|&r| moment_table(12, 30, r))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for m in 0..=12 {
        for d in 1..=30 {
            let a = tables[0].get(m, d);
            if a.is_none() || tables[1].get(m, d) != a || tables[2].get(m, d) != a {
                return Err(format!("recurrences disagree at m={m}, d={d}"));
            }
        }
    }
    Ok("3 x 13 x 30 entries identical".into())
}

fn mean_bounds_hold() -> Outcome {
    let mut tightest = f64::INFINITY;
    for (i, mean) in mean_fractions_f64().take(10_000).enumerate() {
        let d = i as u32 + 1;
        let (lo, hi) = mean_bounds(d).map_err(|e| e.to_string())?;
        if !(lo <= mean && mean <= hi) {
            return Err(format!("d={d}: {mean} not in [{lo}, {hi}]"));
        }
        if d > 1 {
            tightest = tightest.min((mean - lo).min(hi - mean));
        }
    }
    Ok(format!("holds for d = 1..10^4 (smallest margin for d > 1: {tightest:.3e})"))
}

fn cv_peak() -> Outcome {
    let cv = |d| coefficient_of_variation(d).map_err(|e| e.to_string());
    let values = (1..=50).map(cv).collect::<Result<Vec<_>, _>>()?;
    let (argmax, peak) = values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, &v)| if v > best.1 { (i + 1, v) } else { best });
    if argmax != 10 {
        return Err(format!("argmax is d={argmax}"));
    }
    if !(0.268..=0.273).contains(&peak) {
        return Err(format!("CV(10) = {peak} outside [0.268, 0.273]"));
    }
    let mut prev = (10u32, peak);
    for k in 4..=10 {
        let d = 1u32 << k;
        let v = cv(d)?;
        if v >= prev.1 {
            return Err(format!("CV({d}) = {v} >= CV({}) = {}", prev.0, prev.1));
        }
        prev = (d, v);
    }
    Ok(format!("argmax d=10, CV(10) = {peak:.6}, CV(1024) = {:.6}", prev.1))
}

fn uniformity() -> Outcome {
    for d in 1..=4u32 {
        for m in 0..=8u64 {
            let law = exact_state_distribution(d, m).map_err(|e| e.to_string())?;
            let card = simplex_cardinality(d, m);
            let expected = Rational::new(1.into(), BigInt::from(card.clone()));
            if BigUint::from(law.probabilities.len()) != card
                || law.probabilities.values().any(|p| *p != expected)
            {
                return Err(format!("d={d}, m={m}: not exactly 1/{card}"));
            }
        }
    }
    Ok("exactly uniform, d <= 4, m <= 8".into())
}

fn partition_machinery() -> Outcome {
    for alpha in 2..=10 {
        for d in 2..=10 {
            if !partition_identity_check(alpha, d).map_err(|e| e.to_string())? {
                return Err(format!("identity fails at alpha={alpha}, d={d}"));
            }
        }
    }
    let mut blocks = 0;
    for alpha in 2..=6 {
        for d in 2..=6 {
            let census = block_census(alpha, d, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
            if census.all_equal != 1 || census.unclassified != 0 {
                return Err(format!("alpha={alpha}, d={d}: stray vectors"));
            }
            for mu in 1..alpha {
                for tau in 1..d {
                    let spec = TBlockSpec::new(alpha, d, mu, tau).map_err(|e| e.to_string())?;
                    let seen = census.blocks.get(&(mu, tau)).copied().unwrap_or(0);
                    if BigUint::from(seen) != t_cardinality(spec) {
                        return Err(format!("block ({alpha},{d},{mu},{tau}): {seen} enumerated"));
                    }
                    blocks += 1;
                }
            }
        }
    }
    Ok(format!("identity for alpha, d <= 10; {blocks} blocks match enumeration"))
}

fn oracle_equivalence() -> Outcome {
    let mut partition = PartitionMoments::default();
    let mut cases = 0;
    for d in 1..=4u32 {
        for t in u64::from(d)..=24 {
            for m in 0..=4 {
                let a = exact_finite_moment(d, t, m).map_err(|e| e.to_string())?;
                let b = partition.fraction_moment(d, t, m).map_err(|e| e.to_string())?;
                if a != b {
                    return Err(format!("d={d}, t={t}, m={m}: {a} vs {b}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases identical"))
}

fn beta_lemma() -> Outcome {
    let mut worst = 0.0f64;
    for a in 1..=6u32 {
        for b in 1..=6u32 {
            for c in [0.5, 1.0, 2.0] {
                let closed = beta_integral(a, b, c).map_err(|e| e.to_string())?;
                let numeric =
                    adaptive_simpson(|x| x.powi(a as i32) * (c - x).powi(b as i32), 0.0, c, 1e-10);
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

fn simulation_vs_limit() -> Outcome {
    let mut lines = Vec::new();
    for d in [2u32, 5, 10, 25] {
        let config = SimConfig {
            samples: 10_000,
            seed: 0xACCE_0010 + u64::from(d),
            ..SimConfig::new(d, 20_000)
        };
        let s = simulate_batch(&config).map_err(|e| e.to_string())?;
        let limit = to_f64(&limiting_moment(1, d, Recurrence::TwoTerm).map_err(|e| e.to_string())?);
        let allowed = 3.0 * s.std_error() + 0.005;
        let gap = (s.mean - limit).abs();
        if gap > allowed {
            return Err(format!("d={d}: mean {:.5} vs limit {limit:.5}, gap {gap:.5} > {allowed:.5}", s.mean));
        }
        lines.push(format!("d={d} gap {gap:.4}/{allowed:.4}"));
    }
    Ok(lines.join(", "))
}

fn small_state_chi_square() -> Outcome {
    let law = exact_state_distribution(3, 5).map_err(|e| e.to_string())?;
    let freq = state_frequencies(3, 8, 1_000_000, 0xACCE_0011, Sampler::BallIdentity)
        .map_err(|e| e.to_string())?;
    if freq.len() != 21 || law.probabilities.len() != 21 {
        return Err(format!("{} observed states, {} exact", freq.len(), law.probabilities.len()));
    }
    let observed: Vec<u64> = law.probabilities.keys().map(|k| freq.get(k).copied().unwrap_or(0)).collect();
    let expected: Vec<f64> = law.probabilities.values().map(to_f64).collect();
    let test = chi_square_gof(&observed, &expected).map_err(|e| e.to_string())?;
    if test.p_value > 1e-3 {
        Ok(format!("X2 = {:.2} on {} dof, p = {:.4}", test.statistic, test.dof, test.p_value))
    } else {
        Err(format!("p = {:e}", test.p_value))
    }
}

fn regime_probes() -> Outcome {
    let monopoly = regime_probe(2, 2.0, 100_000, 100, 0xACCE_0012).map_err(|e| e.to_string())?;
    let egalitarian = regime_probe(4, 0.5, 100_000, 100, 0xACCE_0013).map_err(|e| e.to_string())?;
    let msg = format!(
        "median(d=2, gamma=2) = {:.4}, median(d=4, gamma=0.5) = {:.4}",
        monopoly.median, egalitarian.median
    );
    if monopoly.median > 0.95 && egalitarian.median < 0.35 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn simulate_into(dir: &Path, workers: usize) -> Result<Vec<(String, Vec<u8>)>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_heaviest-urn"))
        .args(["simulate", "--d-min", "1", "--d-max", "12", "--n", "2000", "--samples", "4000"])
        .args(["--seed", "1234", "--workers", &workers.to_string()])
        .arg("--out-dir")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "data"))
        .map(|p| {
            let bytes = fs::read(&p).unwrap_or_default();
            (p.file_name().unwrap().to_string_lossy().into_owned(), bytes)
        })
        .collect();
    files.sort();
    Ok(files)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs = [(tmp.path().join("a"), 1), (tmp.path().join("b"), 1), (tmp.path().join("c"), 4)];
    let outputs = runs
        .iter()
        .map(|(dir, w)| simulate_into(dir, *w))
        .collect::<Result<Vec<_>, _>>()?;
    if outputs[0].len() != 6 {
        return Err(format!("expected 6 data files, found {}", outputs[0].len()));
    }
    if outputs[0] != outputs[1] {
        return Err("repeat run with 1 worker differs".into());
    }
    if outputs[0] != outputs[2] {
        return Err("1-worker and 4-worker runs differ".into());
    }
    Ok(format!("{} data files byte-identical across 3 runs (1, 1, 4 workers)", outputs[0].len()))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "exact mean identity", budget: secs(1), run: mean_identity },
        Criterion { id: 2, name: "exact second-moment identity", budget: secs(1), run: second_moment_identity },
        Criterion { id: 3, name: "triple-recurrence agreement", budget: secs(10), run: triple_recurrence },
        Criterion { id: 4, name: "mean bounds", budget: secs(5), run: mean_bounds_hold },
        Criterion { id: 5, name: "CV peak", budget: secs(5), run: cv_peak },
        Criterion { id: 6, name: "uniform state law", budget: secs(10), run: uniformity },
        Criterion { id: 7, name: "partition machinery", budget: secs(30), run: partition_machinery },
        Criterion { id: 8, name: "oracle equivalence", budget: secs(60), run: oracle_equivalence },
        Criterion { id: 9, name: "beta-integral lemma", budget: secs(1), run: beta_lemma },
        Criterion { id: 10, name: "simulation vs limit", budget: secs(300), run: simulation_vs_limit },
        Criterion { id: 11, name: "small-state chi-square", budget: secs(120), run: small_state_chi_square },
        Criterion { id: 12, name: "regime probes", budget: secs(180), run: regime_probes },
        Criterion { id: 13, name: "determinism", budget: secs(120), run: determinism },
    ];

    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for c in &criteria {
        let label = format!("AC{:02} {}", c.id, c.name);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; runtime {elapsed:.2?} over budget {:?}", c.budget)),
            Err(d) => (false, d),
        };
        failures += usize::from(!ok);
        println!(
            "[{}] {label} ({:.2}s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
