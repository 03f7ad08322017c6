use std::path::Path;
use std::process::{Command, Output};

fn asdlab(args: &[&str]) -> Output {
    asdlab_env(args, None)
}

fn asdlab_env(args: &[&str], cache_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_asdlab"));
    cmd.args(args).env_remove("ASDLAB_CACHE");
    if let Some(dir) = cache_env {
        cmd.env("ASDLAB_CACHE", dir);
    }
    cmd.output().expect("spawn asdlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn ap_table() {
    let o = asdlab(&["ap", "--p", "5-11"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("5\t0\tsupersingular"), "{out}");
    assert!(out.contains("7\t-\tbad"), "{out}");
    assert!(out.contains("11\t4\tordinary"), "{out}");
}

#[test]
fn zhang_checks_pass_and_skip_bad_primes() {
    let o = asdlab(&[
        "check-zhang",
        "--p",
        "5,7,11,23",
        "--lmax",
        "2",
        "--nmax",
        "5",
        "--json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    for r in &reports[..2] {
        assert_eq!(r["summary"]["skipped"], 3);
        assert!(!r["notes"].as_array().unwrap().is_empty());
    }
    for r in &reports[2..] {
        assert_eq!(r["summary"]["passed"], 30);
        assert_eq!(r["reduction"], "ordinary");
    }
}

#[test]
fn sabotage_fails() {
    for s in ["swap-f1-f2", "perturb-u"] {
        let o = asdlab(&["check-zhang", "--p", "11", "--nmax", "4", "--sabotage", s]);
        assert_eq!(o.status.code(), Some(1), "{s}");
    }
}

#[test]
fn insufficient_precision_is_a_usage_error() {
    let o = asdlab(&["check-zhang", "--p", "11", "--prec", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precision"));
    let o = asdlab(&["check-zhang", "--p", "11", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = asdlab(&["ap", "--p", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn theorem_checks() {
    let ok = asdlab(&["check-theorem", "--p", "11", "--out-trunc", "20"]);
    assert_eq!(ok.status.code(), Some(0));
    let eis = asdlab(&[
        "check-theorem",
        "--p",
        "11",
        "--out-trunc",
        "20",
        "--eisenstein",
        "1",
    ]);
    assert_eq!(eis.status.code(), Some(0));
    assert!(stdout(&eis).contains("degree 5"));
    let scaled = asdlab(&[
        "check-theorem",
        "--p",
        "11",
        "--out-trunc",
        "20",
        "--twist",
        "tate",
        "--expc",
        "k1",
        "--json",
    ]);
    assert_eq!(scaled.status.code(), Some(0));
    let v = json(&scaled);
    assert!(v[0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["kind"] == "aggregate"));
    let bad = asdlab(&[
        "check-theorem",
        "--p",
        "11",
        "--out-trunc",
        "20",
        "--poly",
        "one",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn custom_form() {
    let o = asdlab(&[
        "check-theorem",
        "--p",
        "11",
        "--out-trunc",
        "15",
        "--form",
        "1:1",
        "--form",
        "19:1,-91125:2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn supersingular_listing() {
    let o = asdlab(&["supersingular", "--p", "23"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[0, 3, 19]"));
}

#[test]
fn calibrate_reports_conventions() {
    let o = asdlab(&["calibrate", "--p", "11", "--out-trunc", "20", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let passing = v[0]["conventions"]["passing"].as_array().unwrap();
    assert!(!passing.is_empty());
    let o = asdlab(&[
        "calibrate",
        "--p",
        "11",
        "--out-trunc",
        "20",
        "--sabotage",
        "perturb-u",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let out = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        format!("# run\np = 11\nnmax = 3\nout = {}\n", out.display()),
    )
    .unwrap();
    let o = asdlab(&["check-zhang", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v[0]["summary"]["total"], 18);
    let o = asdlab(&[
        "check-zhang",
        "--config",
        cfg.to_str().unwrap(),
        "--nmax",
        "2",
        "--json",
    ]);
    assert_eq!(json(&o)[0]["summary"]["total"], 12);
    std::fs::write(&cfg, "p = 11\nbogus = 1\n").unwrap();
    let o = asdlab(&["check-zhang", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

fn series_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map(|d| {
            d.map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
                .collect()
        })
        .unwrap_or_default();
    names.sort();
    names
}

#[test]
fn cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let flag_dir = dir.path().join("flag");
    let env_dir = dir.path().join("env");
    let args = [
        "check-zhang",
        "--p",
        "11",
        "--nmax",
        "3",
        "--json",
        "--cache",
        flag_dir.to_str().unwrap(),
    ];
    let first = asdlab(&args);
    assert_eq!(first.status.code(), Some(0));
    let files = series_files(&flag_dir);
    assert_eq!(files.len(), 3, "{files:?}");
    assert!(files
        .iter()
        .all(|f| f.starts_with("zhang-f") && f.ends_with(".series")));
    let before = std::fs::metadata(flag_dir.join(&files[0]))
        .unwrap()
        .modified()
        .unwrap();
    let second = asdlab(&args);
    assert_eq!(json(&first)["checks"], json(&second)["checks"]);
    let after = std::fs::metadata(flag_dir.join(&files[0]))
        .unwrap()
        .modified()
        .unwrap();
    assert_eq!(before, after);

    let o = asdlab_env(&args, Some(&env_dir));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(series_files(&env_dir).len(), 3);
}
