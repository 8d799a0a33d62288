use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn imab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn generate_lower_bound_writes_family() {
    let dir = tempfile::tempdir().unwrap();
    let o = imab(&["generate", "lower-bound", "--k", "4", "--T", "100", "--out", "inst"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let mut names: Vec<_> = std::fs::read_dir(dir.path().join("inst"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        (1..=4).map(|m| format!("lower-bound-k4-T100-m{m}.json")).collect::<Vec<_>>()
    );
}

#[test]
fn generate_rr_adversarial_single_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = imab(&["generate", "rr-adversarial", "--k", "2", "--T", "10"], dir.path());
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("rr-adversarial-k2-T10.json")).unwrap();
    assert!(text.contains("\"k\": 2"));
}

#[test]
fn generate_random_is_byte_identical_and_matches_fixture() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let o = imab(
            &["generate", "random", "--k", "3", "--seed", "42", "--max-table", "50", "--out", sub],
            dir.path(),
        );
        assert!(o.status.success());
    }
    let a = std::fs::read(dir.path().join("a/random-k3-seed42.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/random-k3-seed42.json")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, std::fs::read(core_fixture("random-k3-seed42-max50.json")).unwrap());
}

#[test]
fn run_rr_adversarial_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{
            "instances": [{"generate": {"kind": "rr-adversarial", "k": 2, "T": 10}}],
            "algorithms": ["round_robin", "fixed_arm(1)"],
            "horizons": [10],
            "output_dir": "results"
        }"#,
    )
    .unwrap();
    let o = imab(&["run", "cfg.json"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let rows = read_rows(&dir.path().join("results/metrics.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[1][1..4], ["round_robin", "10", "1.5"]);
    assert_eq!(&rows[2][1..4], ["fixed_arm(1)", "10", "5.5"]);
    assert!(dir.path().join("results/report.json").exists());
}

#[test]
fn empty_algorithm_list_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"instances": [{"generate": {"kind": "regret-demo"}}], "algorithms": [], "horizons": [5]}"#,
    )
    .unwrap();
    let o = imab(&["run", "cfg.json", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("out").exists(), "no partial outputs");
}

#[test]
fn default_experiment_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = core_fixture("default_experiment.json");
    let o = imab(&["run", cfg.to_str().unwrap(), "--out", "out", "--workers", "2"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(
        std::fs::read(dir.path().join("out/metrics.csv")).unwrap(),
        std::fs::read(core_fixture("default_experiment.csv")).unwrap()
    );
    // the report re-verifies from its embedded config
    let o = imab(&["verify", "out/report.json", "--bound", "first-crossing"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("[PASS] report rows reproduce"));
}

fn demo_trace(dir: &Path, alg: &str, t: &str) -> Vec<Vec<String>> {
    assert!(imab(&["generate", "regret-demo"], dir).status.success());
    let o = imab(&["trace", "regret-demo.json", "--algorithm", alg, "--T", t], dir);
    assert!(o.status.success(), "{o:?}");
    let stem = format!("regret-demo-{}-T{t}", alg.replace(['(', ')'], ""));
    read_rows(&dir.join(format!("{stem}.csv")))
}

#[test]
fn trace_improving_on_demo_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let rows = demo_trace(dir.path(), "improving_anytime", "20");
    assert_eq!(rows[0], ["t", "arm", "reward"]);
    assert_eq!(rows.len(), 21);
    let arms: Vec<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    let mut expected = vec!["1", "2", "1", "2"];
    expected.extend(std::iter::repeat_n("1", 16));
    assert_eq!(arms, expected);
    assert_eq!(rows[20][2], "1");
    let side: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("regret-demo-improving_anytime-T20.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(side["final_pulls"], serde_json::json!([18, 2]));
    assert!((side["total_reward"].as_f64().unwrap() - 13.7).abs() < 1e-12);
}

#[test]
fn trace_fixed_arm_and_round_robin() {
    let dir = tempfile::tempdir().unwrap();
    let rows = demo_trace(dir.path(), "fixed_arm(1)", "3");
    assert_eq!(rows[1..], [["1", "1", "0.1"], ["2", "1", "0.2"], ["3", "1", "0.3"]]);

    assert!(imab(&["generate", "random", "--k", "3", "--max-table", "5"], dir.path()).status.success());
    let o = imab(&["trace", "random-k3-seed0.json", "--algorithm", "round_robin", "--T", "3"], dir.path());
    assert!(o.status.success());
    let rows = read_rows(&dir.path().join("random-k3-seed0-round_robin-T3.csv"));
    let arms: Vec<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(arms, ["1", "2", "3"]);
}

#[test]
fn verify_flags_corrupted_trace_with_offending_n() {
    let dir = tempfile::tempdir().unwrap();
    demo_trace(dir.path(), "improving_anytime", "20");
    let args = [
        "verify",
        "--trace",
        "regret-demo-improving_anytime-T20.csv",
        "--instance",
        "regret-demo.json",
    ];
    let o = imab(&args, dir.path());
    assert!(o.status.success(), "{}", stdout(&o));

    // relabel the fifth pull from arm 1 to arm 2
    let path = dir.path().join("regret-demo-improving_anytime-T20.csv");
    let text = std::fs::read_to_string(&path).unwrap().replace("\n5,1,", "\n5,2,");
    std::fs::write(&path, text).unwrap();
    let o = imab(&args, dir.path());
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("[FAIL] first-crossing"), "{out}");
    assert!(out.contains("N=2 crossed by arm 2 at t=5"), "{out}");
}

#[test]
fn verify_two_arms_skips_regret_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = imab(&["verify", "--k", "2", "--T", "100", "--bound", "anytime-lower-bound"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("[SKIP] max regret of improving_anytime on lower-bound k=2 T=100: skipped (k <= 2)"), "{out}");
    assert!(out.contains("[PASS] max ratio of improving_anytime"));
}

#[test]
fn full_default_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = imab(&["verify"], dir.path());
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(!out.contains("[FAIL]"));
    assert!(out.contains("0 failed"));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(imab(&["trace", "missing.json", "--algorithm", "greedy", "--T", "5"], dir.path()).status.code(), Some(2));
    assert_eq!(imab(&["generate", "lower-bound", "--k", "1", "--T", "5"], dir.path()).status.code(), Some(2));
    assert_eq!(imab(&["trace", "x.json", "--algorithm", "ucb", "--T", "5"], dir.path()).status.code(), Some(2));
}
