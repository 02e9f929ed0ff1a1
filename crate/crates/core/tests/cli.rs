use optscale::trace_io::{encoded_len, read_trace};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn optscale(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_optscale"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "optscale {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn sample_args<'a>(seed: &'a str, iters: &'a str, out: &'a str) -> Vec<&'a str> {
    vec![
        "sample",
        "--algorithm",
        "tmcmc",
        "--proposal",
        "cauchy",
        "--target",
        "truncnormal(0,1,-1,1)",
        "--d",
        "10",
        "--iters",
        iters,
        "--seed",
        seed,
        "--out",
        out,
    ]
}

fn meta(path: &Path) -> Vec<(String, String)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn meta_value(m: &[(String, String)], key: &str) -> String {
    m.iter().find(|(k, _)| k == key).unwrap().1.clone()
}

#[test]
fn same_seed_gives_identical_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    optscale(dir.path(), &sample_args("7", "20000", "a.tmc"));
    optscale(dir.path(), &sample_args("7", "20000", "b.tmc"));
    optscale(dir.path(), &sample_args("8", "20000", "c.tmc"));
    let a = fs::read(dir.path().join("a.tmc")).unwrap();
    let b = fs::read(dir.path().join("b.tmc")).unwrap();
    let c = fs::read(dir.path().join("c.tmc")).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.len() as u64, encoded_len(10, 20_000));
}

#[test]
fn zero_iterations_writes_initial_state_only() {
    let dir = tempfile::tempdir().unwrap();
    optscale(dir.path(), &sample_args("3", "0", "empty.tmc"));
    let trace = read_trace(fs::File::open(dir.path().join("empty.tmc")).unwrap()).unwrap();
    assert_eq!(trace.n_states(), 1);
    assert_eq!(trace.n_transitions(), 0);
    assert!(trace.state(0).iter().all(|x| x.abs() < 1.0));
}

#[test]
fn sample_metadata_records_scale_and_acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = sample_args("7", "100000", "trace.tmc");
    args.extend(["--csv", "trace.csv"]);
    optscale(dir.path(), &args);

    let m = meta(&dir.path().join("trace.tmc.meta"));
    assert_eq!(meta_value(&m, "seed"), "7");
    assert_eq!(meta_value(&m, "schedule"), "tmcmc_sqrt");
    let ell: f64 = meta_value(&m, "ell").parse().unwrap();
    let scale: f64 = meta_value(&m, "scale").parse().unwrap();
    assert!((ell - 2.934).abs() < 1e-3, "{ell}");
    assert!((scale - ell / 10f64.sqrt()).abs() < 1e-12);
    let acceptance: f64 = meta_value(&m, "acceptance").parse().unwrap();
    assert!((acceptance - 0.381).abs() <= 0.01, "{acceptance}");

    let trace = read_trace(fs::File::open(dir.path().join("trace.tmc")).unwrap()).unwrap();
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), trace.n_states() + 1);
    let last: Vec<f64> = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .skip(2)
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last, trace.state(trace.n_states() - 1));
}

#[test]
fn table1_writes_twelve_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = optscale(dir.path(), &["table1", "--out", "t1.csv"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("2.934"));
    let csv = fs::read_to_string(dir.path().join("t1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "proposal,target,ell_star,fisher,ell_opt,alpha_opt,conjecture_only"
    );
    assert_eq!(lines.len(), 13);
    let t2_trunc: Vec<&str> = lines
        .iter()
        .find(|l| l.starts_with("t2,truncnormal"))
        .unwrap()
        .split(',')
        .collect();
    assert!((t2_trunc[4].parse::<f64>().unwrap() - 3.196).abs() <= 0.01);
    assert!((t2_trunc[5].parse::<f64>().unwrap() - 0.413).abs() <= 0.002);
}

#[test]
fn compare_reads_config_file_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "d = 10\niters = 5000\nseed = 1\nrwm_ell = 1.6\nout_prefix = cfg\n",
    )
    .unwrap();
    optscale(
        dir.path(),
        &[
            "compare",
            "--config",
            "run.cfg",
            "--seed",
            "42",
            "--out-prefix",
            "flag",
        ],
    );
    assert!(!dir.path().join("cfg_summary.csv").exists());
    let summary = fs::read_to_string(dir.path().join("flag_summary.csv")).unwrap();
    let rows: Vec<Vec<&str>> = summary
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "tmcmc");
    assert_eq!(rows[1][0], "rwm");
    assert_eq!(rows[0][2], "5000");
    assert_eq!(rows[0][3], "42");
    assert_eq!(rows[1][4], "1.6");
    let acf = fs::read_to_string(dir.path().join("flag_acf.csv")).unwrap();
    assert_eq!(acf.lines().count(), 52);

    let again = tempfile::tempdir().unwrap();
    fs::copy(dir.path().join("run.cfg"), again.path().join("run.cfg")).unwrap();
    optscale(
        again.path(),
        &[
            "compare",
            "--config",
            "run.cfg",
            "--seed",
            "42",
            "--out-prefix",
            "flag",
        ],
    );
    assert_eq!(
        summary,
        fs::read_to_string(again.path().join("flag_summary.csv")).unwrap()
    );
    assert_eq!(
        acf,
        fs::read_to_string(again.path().join("flag_acf.csv")).unwrap()
    );
}

#[test]
fn thread_cap_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_optscale"))
        .current_dir(dir.path())
        .env("OPTSCALE_THREADS", "1")
        .args(["table1", "--out", "t1.csv"])
        .output()
        .unwrap();
    assert!(out.status.success());

    for args in [
        vec!["sample", "--target", "beta(2,2)", "--out", "x.tmc"],
        vec!["sample", "--d", "0", "--out", "x.tmc"],
        vec!["compare", "--d", "20"],
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_optscale"))
            .current_dir(dir.path())
            .args(&args)
            .output()
            .unwrap();
        assert!(!out.status.success(), "{args:?} should fail");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_optscale"))
        .current_dir(dir.path())
        .env("OPTSCALE_THREADS", "many")
        .args(["table1", "--out", "t1.csv"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
