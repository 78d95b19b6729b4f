use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn stacksure(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stacksure"))
        .args(args)
        .current_dir(cwd)
        .env_remove("STACKSURE_REPEATS")
        .output()
        .unwrap()
}

const CONF: &str = "repeats = 1
generator.p = 20
generator.sample_size = 40
estimators = training_set, bbc_sl
protocol.k_outer = 3
protocol.k_inner = 3
protocol.bootstraps = 10
protocol.combiners = mean, best1
protocol.learners = lasso, knn
output_dir = out
";

#[test]
fn version_prints_crate_version() {
    let dir = tempfile::tempdir().unwrap();
    let out = stacksure(&["version"], dir.path());
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        format!("stacksure {}", env!("CARGO_PKG_VERSION"))
    );
}

#[test]
fn run_writes_reports_and_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.conf"), CONF).unwrap();
    let out = stacksure(&["run", "--config", "c.conf", "--seed", "5", "--out", "elsewhere"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let records = fs::read_to_string(dir.path().join("elsewhere/records.csv")).unwrap();
    assert_eq!(records.lines().count(), 1 + 2 * 2);
    assert!(!dir.path().join("out").exists());
    let json = fs::read_to_string(dir.path().join("elsewhere/report.json")).unwrap();
    assert!(json.contains("master_seed = 5"));
}

#[test]
fn environment_overrides_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.conf"), CONF).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_stacksure"))
        .args(["run", "--config", "c.conf"])
        .current_dir(dir.path())
        .env("STACKSURE_REPEATS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let records = fs::read_to_string(dir.path().join("out/records.csv")).unwrap();
    assert_eq!(records.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn gen_then_csv_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.conf"), CONF).unwrap();
    assert!(stacksure(&["gen", "--config", "c.conf", "--out", "d.csv"], dir.path()).status.success());
    let text = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(text.starts_with("label,"));
    assert_eq!(text.lines().count(), 41);

    fs::write(dir.path().join("csv.conf"), format!("{CONF}mode = csv\ndata_path = d.csv\n")).unwrap();
    let out = stacksure(&["run", "--config", "csv.conf"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing config file
    assert_eq!(stacksure(&["run", "--config", "nope.conf"], dir.path()).status.code(), Some(2));
    // unknown key
    fs::write(dir.path().join("bad.conf"), "repeats = 1\nbogus = 3\n").unwrap();
    assert_eq!(stacksure(&["run", "--config", "bad.conf"], dir.path()).status.code(), Some(1));
    // malformed data file
    fs::write(dir.path().join("d.csv"), "label,a\n0,1\n2,1\n").unwrap();
    fs::write(dir.path().join("csv.conf"), format!("{CONF}mode = csv\ndata_path = d.csv\n")).unwrap();
    assert_eq!(stacksure(&["run", "--config", "csv.conf"], dir.path()).status.code(), Some(2));
    // usage error
    assert_eq!(stacksure(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(stacksure(&["--help"], dir.path()).status.code(), Some(0));
}
