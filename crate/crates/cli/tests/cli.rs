use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heaviest-urn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn moments_exact_and_decimal() {
    let o = run(&["moments", "--m", "1", "--d-max", "3", "--format", "exact"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1 1\n2 3/4\n3 11/18\n");

    let o = run(&["moments", "--m", "0", "--d-max", "5"]);
    assert_eq!(stdout(&o), "1 1\n2 1\n3 1\n4 1\n5 1\n");

    let o = run(&["moments", "--m", "2", "--d-max", "2", "--format", "decimal"]);
    assert_eq!(stdout(&o), "1 1\n2 0.583333333333\n");
}

#[test]
fn moments_recurrences_print_the_same_table() {
    let outputs: Vec<String> = ["multi-term", "two-term", "iterated-sum"]
        .iter()
        .map(|r| stdout(&run(&["moments", "--m", "4", "--d-max", "12", "--format", "exact", "--recurrence", r])))
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn moments_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    let o = run(&["moments", "--m", "1", "--d-max", "2", "--format", "exact", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(path).unwrap(), "1 1\n2 3/4\n");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["moments", "--m", "1"]).status.code(), Some(1));
    assert_eq!(run(&["moments", "--m", "1", "--d-max", "0"]).status.code(), Some(1));
    assert_eq!(run(&["moments", "--m", "1", "--d-max", "3", "--format", "hex"]).status.code(), Some(1));
    assert_eq!(run(&["oracle", "--d", "5", "--n", "3", "--m", "1"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--d-min", "4", "--d-max", "2"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--quantiles", "0.5,1.5"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn table_cap_is_a_resource_error() {
    let o = run(&["moments", "--m", "999", "--d-max", "10000"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn oracle_methods() {
    assert_eq!(stdout(&run(&["oracle", "--d", "2", "--n", "4", "--m", "1"])), "2/3 0.666666666667\n");
    for method in ["enumerate", "partition"] {
        let o = run(&["oracle", "--d", "1", "--n", "9", "--m", "4", "--method", method]);
        assert_eq!(stdout(&o), "1 1\n");
    }
    let a = run(&["oracle", "--d", "3", "--n", "12", "--m", "2", "--method", "partition"]);
    let b = run(&["oracle", "--d", "3", "--n", "12", "--m", "2", "--method", "enumerate"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn oracle_cap_reports_the_cap() {
    let o = run(&["oracle", "--d", "6", "--n", "60", "--m", "1", "--cap", "5000"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("5000"));
}

#[test]
fn simulate_single_bin_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--d-min", "1", "--d-max", "1", "--n", "50", "--samples", "20", "--out-dir", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names = [
        "herding_sim_50.data",
        "herding_sim_50_q05.data",
        "herding_sim_50_q20.data",
        "herding_sim_50_q80.data",
        "herding_sim_50_q95.data",
        "herding_asymp_exact_1.data",
    ];
    for name in names {
        assert_eq!(fs::read_to_string(dir.path().join(name)).unwrap(), "1 1\n", "{name}");
    }
    let manifest = fs::read_to_string(dir.path().join("herding_sim_50.manifest")).unwrap();
    for key in ["command", "tool_version", "generator", "seed", "n", "samples", "gamma", "quantiles", "wall_time_seconds"] {
        assert!(manifest.lines().any(|l| l.starts_with(&format!("{key} = "))), "missing {key}");
    }
}

#[test]
fn simulate_figure_grid_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--n", "100", "--samples", "500", "--seed", "7", "--out-dir", out]);
    assert!(o.status.success());
    let mean = fs::read_to_string(dir.path().join("herding_sim_100.data")).unwrap();
    let rows: Vec<(f64, f64)> = mean
        .lines()
        .map(|l| {
            let (x, y) = l.split_once(' ').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().enumerate().all(|(i, &(x, _))| x == (i + 1) as f64));
    assert!(rows.iter().all(|&(x, y)| y >= 1.0 / x - 1e-12 && y <= 1.0));
    assert!(mean.ends_with('\n'));

    // no overlay off the critical exponent
    let o = run(&["simulate", "--d-max", "3", "--n", "50", "--samples", "50", "--gamma", "2", "--prefix", "g2", "--out-dir", out]);
    assert!(o.status.success());
    assert!(dir.path().join("g2_sim_50.data").exists());
    assert!(!dir.path().join("g2_asymp_exact_3.data").exists());
}

#[test]
fn simulate_unwritable_directory() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub");
    let o = run(&["simulate", "--d-max", "2", "--n", "10", "--samples", "5", "--out-dir", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_quick_passes() {
    let o = run(&["verify", "--level", "quick"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}

#[test]
fn verify_detects_injected_fault() {
    let o = run(&["verify", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("[FAIL] cross-recurrence agreement"));
}
