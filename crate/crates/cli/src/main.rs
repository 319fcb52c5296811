mod args;
mod manifest;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use heaviest_urn::format::{format_decimal, format_sig, PlotSeries};
use heaviest_urn::moments::{to_f64, MomentTable, TableLimits};
use heaviest_urn::sim::stream_seed;
use heaviest_urn::simplex::{exact_finite_moment_with_cap, PartitionMoments};
use heaviest_urn::verify::{self, Level, VerifyOptions};
use heaviest_urn::{mean_fraction, simulate_batch, SimConfig};

use args::{Cli, Command, LevelArg, Method, MomentsArgs, OracleArgs, OutputFormat, SimulateArgs, VerifyArgs};
use manifest::RunManifest;

#[derive(Debug)]
enum CliError {
    Usage(String),
    VerificationFailed(usize),
    Resource(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::VerificationFailed(_) => 2,
            CliError::Resource(_) | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::VerificationFailed(n) => write!(f, "{n} check(s) failed"),
            CliError::Resource(m) => write!(f, "resource error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<heaviest_urn::Error> for CliError {
    fn from(e: heaviest_urn::Error) -> Self {
        match e {
            heaviest_urn::Error::Domain(_) => CliError::Usage(e.to_string()),
            heaviest_urn::Error::Resource { .. } | heaviest_urn::Error::ThreadPool(_) => {
                CliError::Resource(e.to_string())
            }
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Moments(a) => cmd_moments(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("heaviest-urn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn cmd_moments(a: MomentsArgs) -> Result<(), CliError> {
    if a.d_max == 0 {
        return Err(CliError::Usage("--d-max must be at least 1".into()));
    }
    let table = MomentTable::build(a.m, a.d_max, a.recurrence.into(), TableLimits::default())?;
    let mut out = String::new();
    for d in 1..=a.d_max {
        let v = table.get(a.m, d).expect("table covers the requested range");
        let value = match a.format {
            OutputFormat::Exact => v.to_string(),
            OutputFormat::Decimal => format_decimal(to_f64(v)),
        };
        out.push_str(&format!("{d} {value}\n"));
    }
    match a.out {
        Some(path) => fs::write(&path, out).map_err(io_err(&path)),
        None => io::stdout()
            .write_all(out.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// `q05`, `q20`, `q95`; non-integer percents such as 97.5 become `q97p5`.
fn quantile_tag(q: f64) -> String {
    let pct = q * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("q{:02}", pct.round() as u64)
    } else {
        format!("q{}", format_sig(pct, 6).replace('.', "p"))
    }
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if a.d_min == 0 || a.d_min > a.d_max {
        return Err(CliError::Usage("need 1 <= --d-min <= --d-max".into()));
    }
    if a.n < u64::from(a.d_max) {
        return Err(CliError::Usage("--n must be at least --d-max".into()));
    }
    let base = SimConfig {
        gamma: a.gamma,
        samples: a.samples,
        seed: a.seed,
        quantiles: a.quantiles.clone(),
        workers: a.workers,
        ..SimConfig::new(a.d_min, a.n)
    };
    base.validate()?;
    fs::create_dir_all(&a.out_dir).map_err(io_err(&a.out_dir))?;

    let mut mean_points = Vec::new();
    let mut quantile_points = vec![Vec::new(); a.quantiles.len()];
    for d in a.d_min..=a.d_max {
        let config = SimConfig {
            d,
            seed: stream_seed(a.seed, u64::from(d)),
            ..base.clone()
        };
        let summary = simulate_batch(&config)?;
        let x = f64::from(d);
        mean_points.push((x, summary.mean));
        for (points, &(_, v)) in quantile_points.iter_mut().zip(&summary.quantile_values) {
            points.push((x, v));
        }
    }

    let stem = format!("{}_sim_{}", a.prefix, a.n);
    let mut files = vec![(format!("{stem}.data"), PlotSeries::fraction("mean", mean_points)?)];
    for (&q, points) in a.quantiles.iter().zip(quantile_points) {
        let tag = quantile_tag(q);
        files.push((format!("{stem}_{tag}.data"), PlotSeries::fraction(tag, points)?));
    }
    if a.gamma == 1.0 {
        let exact = (a.d_min..=a.d_max)
            .map(|d| Ok((f64::from(d), to_f64(&mean_fraction(d)?))))
            .collect::<Result<Vec<_>, heaviest_urn::Error>>()?;
        files.push((
            format!("{}_asymp_exact_{}.data", a.prefix, a.d_max),
            PlotSeries::fraction("limiting mean", exact)?,
        ));
    }

    for (name, series) in &files {
        let path = a.out_dir.join(name);
        fs::write(&path, series.render()).map_err(io_err(&path))?;
        println!("{}", path.display());
    }

    let mut manifest = RunManifest::new(&std::env::args().collect::<Vec<_>>().join(" "));
    manifest.set("d_min", a.d_min);
    manifest.set("d_max", a.d_max);
    manifest.set("n", a.n);
    manifest.set("samples", a.samples);
    manifest.set("gamma", a.gamma);
    manifest.set("seed", a.seed);
    manifest.set("per_d_seed", "stream_seed(seed, d)");
    manifest.set(
        "quantiles",
        a.quantiles.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(","),
    );
    manifest.set("quantile_estimator", "nearest-rank");
    manifest.set("workers", a.workers.map_or("default".to_string(), |w| w.to_string()));
    manifest.set(
        "files",
        files.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(","),
    );
    manifest.set("wall_time_seconds", format!("{:.3}", started.elapsed().as_secs_f64()));
    let path = a.out_dir.join(format!("{stem}.manifest"));
    fs::write(&path, manifest.render()).map_err(io_err(&path))?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<(), CliError> {
    let value = match a.method {
        Method::Enumerate => exact_finite_moment_with_cap(a.d, a.n, a.m, a.cap)?,
        Method::Partition => PartitionMoments::default().fraction_moment(a.d, a.n, a.m)?,
    };
    println!("{} {}", value, format_decimal(to_f64(&value)));
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), CliError> {
    let level = match a.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let outcomes = verify::run(VerifyOptions {
        level,
        seed: a.seed,
        corrupt_moment_table: a.inject_fault,
    });
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {} ({:.2}s) {}",
            o.name,
            o.elapsed.as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        Err(CliError::VerificationFailed(failed))
    } else {
        Ok(())
    }
}
