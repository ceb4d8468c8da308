use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.toml"))
}

fn qsloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsloc"))
        .args(args)
        .env_remove("QSLOC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn binomial_superhedge_prices_the_call() {
    let o = qsloc(&["superhedge", "--scenario", scenario("binomial").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("call   1/3    (2/3)"), "{out}");
    assert!(out.contains("verdict: ok"));
}

#[test]
fn arbitrage_na_check_exits_two_with_witness() {
    let o = qsloc(&["na-check", "--scenario", scenario("arbitrage").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("no     (1)      up"), "{out}");
}

#[test]
fn arbitrage_ftap_is_consistent_but_fails() {
    let o = qsloc(&["ftap", "--scenario", scenario("arbitrage").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("outcomes charged by some martingale measure: {flat}"));
}

#[test]
fn bubble_demo_default_grid_is_minus_m_over_n() {
    let o = qsloc(&["bubble-demo", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["tables"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for (i, row) in rows.iter().enumerate() {
        let m = i as i64 + 1;
        for n in 1..=10i64 {
            let expected = qsloc::scalar::rat(-m, n).to_string();
            assert_eq!(row[n.to_string()], expected, "m = {m}, N = {n}");
        }
    }
}

#[test]
fn truncation_flag_sets_the_n_grid() {
    let o = qsloc(&["bubble-demo", "--truncation", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("m \\ N  1    2     3\n"), "{}", stdout(&o));
}

#[test]
fn every_fixture_runs_its_command() {
    for (cmd, name, code) in [
        ("risk-table", "risk", 0),
        ("localize", "risk", 0),
        ("aggregate", "aggregate", 0),
        ("bliss", "bliss", 0),
        ("ftap", "trinomial_robust", 0),
        ("superhedge", "trinomial_robust", 0),
        ("bubble-demo", "bubble", 0),
    ] {
        let o = qsloc(&[cmd, "--scenario", scenario(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(code), "{cmd} {name}: {}", stderr(&o));
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = qsloc(&[
            "bliss",
            "--scenario",
            scenario("bliss").to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["bliss.txt", "bliss.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn out_dir_defaults_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qsloc"))
        .args(["na-check", "--scenario", scenario("binomial").to_str().unwrap()])
        .env("QSLOC_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("na-check.json")).unwrap()).unwrap();
    assert_eq!(json["verdict"], true);
    assert!(dir.path().join("na-check.txt").exists());
}

#[test]
fn parse_errors_report_position_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "[model]\noutcomes = [\"a\"\npriors = 3\n").unwrap();
    let o = qsloc(&["na-check", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3, column 1"), "{}", stderr(&o));
}

#[test]
fn unknown_names_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.toml");
    std::fs::write(
        &p,
        "[model]\noutcomes = [\"a\", \"b\"]\npriors = [[\"1/2\", \"1/2\"]]\n\
         [market]\ns0 = [1]\ns1 = [[1, 1]]\nclaims = [\"nope\"]\n",
    )
    .unwrap();
    let o = qsloc(&["superhedge", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown variable `nope`"));
}

#[test]
fn bad_rationals_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.toml");
    std::fs::write(&p, "[model]\noutcomes = [\"a\"]\npriors = [[\"1/0\"]]\n").unwrap();
    let o = qsloc(&["na-check", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("prior 0"), "{}", stderr(&o));
}

#[test]
fn missing_scenario_exits_one() {
    let o = qsloc(&["superhedge"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--scenario"));
}

#[test]
fn pivot_limit_is_enforced() {
    let o = qsloc(&["superhedge", "--scenario", scenario("trinomial_robust").to_str().unwrap(), "--max-pivots", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pivot limit"));
}

#[test]
fn selftest_prints_one_line_per_selected_criterion() {
    let o = qsloc(&["selftest", "--only", "1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("PASS").count(), 2, "{out}");
}
