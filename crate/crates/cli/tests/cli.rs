use std::path::Path;
use std::process::Command;

use lp_tile_lab::{main_with_args, REPORT_SCHEMA};
use serde_json::Value;

fn lab(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("lp-tile-lab").chain(args.iter().copied()))
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("lab.ini");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL: &str = "\
[square-sweep]
ns = [16, 32]
trials = 3
ns2 = [16]
trials2 = 2
[well-distributed]
n = 64
draws = 1
samples = 10
[tiles-bessel]
n = 128
widths = [4, 8]
trials = 20
power_iters = 2000
[tail-probe]
n = 256
starts = 2
steps = 20
[greedy-split]
n = 64
beta_exp = [-2, 0, 2]
[carleson-jn]
depths = [4, 6]
instances = 20
[product-jn]
instances = 3
[varq]
n = 8
instances = 10
[martingale]
ns = [32, 64]
[crs]
ns = [64]
draws = 2
restarts = 2
iters = 20
decouple_n = 64
decouple_cells = [1, 2]
decouple_draws = 1
[counterexample-rubio]
n = 256
ns = [8, 16, 32]
[counterexample-multiplier]
n = 512
ns = [4, 8, 16]
trials = 4
";

#[test]
fn every_report_validates_against_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    assert_eq!(lab(&["all", "--config", &cfg, "--seed", "5", "--out", out.to_str().unwrap()]), 0);
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    for name in lp_tile_lab::NAMES {
        let text = std::fs::read_to_string(out.join(format!("{name}.json"))).unwrap();
        let report: Value = serde_json::from_str(&text).unwrap();
        let errors: Vec<String> = v.iter_errors(&report).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
        assert_eq!(report["seed"], 5);
        assert_eq!(report["status"], "ok");
        let csv = std::fs::read_to_string(out.join(format!("{name}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), report["rows"].as_u64().unwrap() as usize + 1, "{name}");
    }
    // the schema rejects a report with a missing field
    let mut broken: Value = serde_json::from_str(&std::fs::read_to_string(out.join("varq.json")).unwrap()).unwrap();
    broken.as_object_mut().unwrap().remove("seed");
    assert!(!v.is_valid(&broken));
}

#[test]
fn same_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let read = |sub: &str, seed: &str, exp: &str| {
        let out = dir.path().join(sub);
        assert_eq!(lab(&[exp, "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]), 0);
        std::fs::read(out.join(format!("{exp}.csv"))).unwrap()
    };
    for exp in ["square-sweep", "crs", "varq", "tail-probe", "well-distributed"] {
        assert_eq!(read("a", "11", exp), read("b", "11", exp), "{exp}");
    }
    assert_ne!(read("c", "11", "varq"), read("d", "12", "varq"));
}

#[test]
fn empty_results_give_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[tiles-bessel]\nwidths = []\n[counterexample-rubio]\np = []\n");
    let out = dir.path().join("out");
    for exp in ["tiles-bessel", "counterexample-rubio"] {
        assert_eq!(lab(&[exp, "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    }
    let t = std::fs::read_to_string(out.join("tiles-bessel.csv")).unwrap();
    assert_eq!(t, "omega_lo,omega_hi,level,tiles,eigen,circulant,power,min_slack,translation\n");
    let r = std::fs::read_to_string(out.join("counterexample-rubio.csv")).unwrap();
    assert_eq!(r.lines().count(), 1);
}

#[test]
fn usage_errors_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    let missing = dir.path().join("nope.ini");
    assert_eq!(lab(&["varq", "--config", missing.to_str().unwrap(), "--out", o]), 2);
    assert_eq!(lab(&["no-such-experiment", "--out", o]), 2);
    assert_eq!(lab(&["square-sweep", "--n", "100", "--out", o]), 2);
    assert_eq!(lab(&["varq", "--seed", "minus-one", "--out", o]), 2);
    let bad_key = write_config(dir.path(), "[varq]\nlength = 3\n");
    assert_eq!(lab(&["varq", "--config", &bad_key, "--out", o]), 2);
    let bad_value = write_config(dir.path(), "[counterexample-rubio]\np = 3\n");
    assert_eq!(lab(&["counterexample-rubio", "--config", &bad_value, "--out", o]), 2);
    assert!(!out.exists());
}

#[test]
fn overflow_is_a_numerical_failure_with_reports_kept() {
    let dir = tempfile::tempdir().unwrap();
    // cells^(1/q) overflows for q this small
    let cfg = write_config(dir.path(), "[crs]\nns = []\ndecouple_n = 64\ndecouple_cells = [2, 4]\ndecouple_q = 0.001\nrestarts = 1\niters = 5\n");
    let out = dir.path().join("out");
    assert_eq!(lab(&["crs", "--config", &cfg, "--out", out.to_str().unwrap()]), 3);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("crs.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "numerical-failure");
    assert_eq!(std::fs::read_to_string(out.join("crs.csv")).unwrap().lines().count(), 3);
}

#[test]
fn binary_reports_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_lp-tile-lab");
    let ok = Command::new(bin).args(["martingale", "--n", "64", "--seed", "3", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("martingale: ok"));
    let echo: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("martingale.json")).unwrap()).unwrap();
    assert_eq!(echo["config"]["n"], 64);
    assert_eq!(echo["config"]["ns"], serde_json::json!([16, 64]));
    let bad = Command::new(bin).args(["martingale", "--bogus"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
