use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use parahyp::solver::{CharacteristicsOracle, StateDump};
use parahyp::GridSpec;

fn parahyp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parahyp")).args(args).output().expect("binary runs")
}

fn parahyp_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parahyp"))
        .args(args)
        .env("PARAHYP_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_matches_characteristics_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = out.to_str().unwrap();
    let res = parahyp(&["solve", "--system", "burgers", "--n", "256", "--epsilon", "2e-3", "--T", "0.5", "--out", o]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));

    let rows = csv_rows(&out.join("trajectory.csv"));
    assert_eq!(rows.len(), 251);
    let last_t: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert!((last_t - 0.5).abs() < 1e-12);

    let dump = StateDump::read(fs::File::open(out.join("state.bin")).unwrap()).unwrap();
    assert_eq!(dump.states.len(), 251);
    let grid = GridSpec::one_d(256).unwrap();
    let exact = CharacteristicsOracle::sine(1.0).field(grid, 0.5).unwrap();
    let err = (dump.states.last().unwrap() - &exact).l2_norm();
    assert!(err < 5e-3, "L2 error {err}");
}

#[test]
fn resolved_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let res = parahyp(&[
        "solve", "--system", "sym2", "--n", "64", "--scheme", "galerkin", "--T", "0.1", "--datum", "random", "--seed", "7",
        "--out", a.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let conf = a.join("resolved.conf");
    let res = parahyp(&["solve", "--config", conf.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    assert_eq!(fs::read(a.join("state.bin")).unwrap(), fs::read(b.join("state.bin")).unwrap());
    assert_eq!(fs::read(a.join("trajectory.csv")).unwrap(), fs::read(b.join("trajectory.csv")).unwrap());
    let echoed = fs::read_to_string(b.join("resolved.conf")).unwrap();
    assert!(echoed.contains("scheme = galerkin\n") && echoed.contains("seed = 7\n"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# small run\nn = 64\nT = 0.05   # short\nepsilon = 1e-2\n").unwrap();
    let out = dir.path().join("o");
    let res = parahyp(&["solve", "--config", conf.to_str().unwrap(), "--n", "128", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let echoed = fs::read_to_string(out.join("resolved.conf")).unwrap();
    assert!(echoed.contains("n = 128\n"), "{echoed}");
    assert!(echoed.contains("T = 5e-2\n"), "{echoed}");
}

#[test]
fn envelope_from_state_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = out.to_str().unwrap();
    let res = parahyp(&["solve", "--n", "128", "--epsilon", "2e-3", "--T", "0.2", "--out", o]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let input = out.join("state.bin");
    let res = parahyp(&["envelope", "--input", input.to_str().unwrap(), "--s", "3", "--delta", "0.25", "--out", o]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));

    let rows: Vec<Vec<f64>> = csv_rows(&out.join("envelope.csv"))
        .into_iter()
        .map(|r| r.iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), GridSpec::one_d(128).unwrap().shell_count());
    for (j, rj) in rows.iter().enumerate() {
        assert!(rj[2] >= rj[1], "dominance at shell {j}");
        for (k, rk) in rows.iter().enumerate() {
            let bound = 2f64.powf(0.25 * (j as f64 - k as f64).abs()) * rk[2];
            assert!(rj[2] <= bound * (1.0 + 1e-9), "slow variation at ({j}, {k})");
        }
    }
}

#[test]
fn bad_configuration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "n = 256\n\ns = abc\n").unwrap();
    let res = parahyp(&["solve", "--config", conf.to_str().unwrap()]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains("line 3: field 's'"), "{}", stderr(&res));

    fs::write(&conf, "bogus = 1\n").unwrap();
    assert_eq!(code(&parahyp(&["solve", "--config", conf.to_str().unwrap()])), 2);

    let out = dir.path().join("o");
    let o = out.to_str().unwrap();
    for args in [
        vec!["solve", "--n", "100", "--out", o],
        vec!["solve", "--scheme", "rk4", "--out", o],
        vec!["solve", "--system", "nope", "--out", o],
        vec!["solve", "--system", "burgers", "--dim", "2", "--out", o],
        vec!["solve", "--n", "32", "--out", o],
        vec!["solve", "--profile", "gaussian", "--out", o],
        vec!["experiment", "nope", "--out", o],
        vec!["experiment", "trichotomy", "--gap", "1", "--out", o],
        vec!["suite", "--all", "--delta", "1.5", "--out", o],
        vec!["envelope", "--input", "missing.bin", "--delta", "0", "--out", o],
    ] {
        let res = parahyp(&args);
        assert_eq!(code(&res), 2, "{args:?}: {}", stderr(&res));
    }
}

#[test]
fn experiment_verdicts_set_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let res = parahyp(&["experiment", "trichotomy", "--trials", "8", "--out", o, "--emit-plotscript"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    for ext in ["csv", "json", "gp"] {
        assert!(dir.path().join(format!("trichotomy.{ext}")).exists(), "{ext}");
    }
    let json = fs::read_to_string(dir.path().join("trichotomy.json")).unwrap();
    assert!(json.contains("\"pass\": true"));

    // Members of the amplitude family carry constants of differing size.
    let res = parahyp(&["experiment", "energy_growth", "--out", o]);
    assert_eq!(code(&res), 1, "{}", stderr(&res));
    assert!(String::from_utf8_lossy(&res.stdout).starts_with("energy_growth: FAIL"));
}

#[test]
fn experiment_output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(threads);
        let args = ["experiment", "envelope_axioms", "--trials", "40", "--seed", "9", "--out", out.to_str().unwrap()];
        let res = parahyp_env(&args, threads);
        assert_eq!(code(&res), 0, "{}", stderr(&res));
        csvs.push(fs::read(out.join("envelope_axioms.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn suite_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for run in ["first", "second"] {
        let out = dir.path().join(run);
        let res = parahyp(&["suite", "--all", "--seed", "42", "--out", out.to_str().unwrap()]);
        // One experiment records a criterion that does not hold; the suite reports it.
        assert_eq!(code(&res), 1, "{}", stderr(&res));
        let mut names: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n.ends_with(".csv"))
            .collect();
        names.sort();
        let contents: Vec<Vec<u8>> = names.iter().map(|n| fs::read(out.join(n)).unwrap()).collect();
        runs.push((names, contents));
    }
    assert_eq!(runs[0].0.len(), parahyp::harness::EXPERIMENTS.len());
    assert_eq!(runs[0], runs[1]);
}
