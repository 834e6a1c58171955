use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use logdisp_cli::config::SCENARIOS;

fn logdisp(args: &[&str], outdir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logdisp"))
        .args(args)
        .env("LOGDISP_OUTDIR", outdir)
        .output()
        .expect("spawn logdisp")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_KIE: &str = r#"
scenario = "kie_gaussian"

[kie_gaussian]
times = [10.0, 100.0, 1000.0]
"#;

#[test]
fn list_scenarios_prints_all_six() {
    let dir = tempfile::tempdir().unwrap();
    let out = logdisp(&["list-scenarios"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in SCENARIOS {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn run_writes_csv_and_svg_into_env_outdir() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("out");
    let cfg = write_config(dir.path(), SMALL_KIE);
    let out = logdisp(&["run", &cfg], &outdir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let csv = fs::read_to_string(outdir.join("kie_gaussian.csv")).unwrap();
    let mut lines = csv.split("\r\n");
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# scenario=kie_gaussian config_sha256="));
    assert!(comment.contains("logdisp-core=") && comment.contains("logdisp-cli="));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), header.len());
    let mantissa = row[1].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);

    let svg = fs::read_to_string(outdir.join("kie_gaussian.svg")).unwrap();
    assert!(svg.contains(r#"version="1.1""#) && svg.contains("<polyline"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario = \"fp_decay\"\n[fp_decay]\norders = [1]\ntimes = [1.0]\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(logdisp(&["run", &cfg], &a).status.code(), Some(0));
    assert_eq!(logdisp(&["run", &cfg], &b).status.code(), Some(0));
    for file in ["fp_decay.csv", "fp_decay.svg"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "scenario = \"nope\"\n");
    assert_eq!(logdisp(&["run", &unknown], dir.path()).status.code(), Some(1));
    let typo = write_config(dir.path(), "scenario = \"fp_decay\"\n[fp_decay]\npanel = 3\n");
    assert_eq!(logdisp(&["run", &typo], dir.path()).status.code(), Some(1));
    assert_eq!(logdisp(&["run", "/nonexistent/config.toml"], dir.path()).status.code(), Some(1));
    let bad = write_config(dir.path(), "scenario = \"fp_decay\"\n[fp_decay]\nn = 0\n");
    assert_eq!(logdisp(&["run", &bad], dir.path()).status.code(), Some(1));
}

#[test]
fn failing_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scenario = \"sobolev_growth\"\n[sobolev_growth]\nband = [1.1, 1.3]\n",
    );
    let out = logdisp(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL ratio in band"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let loaded = logdisp_cli::config::LoadedConfig::load(&entry.unwrap().path()).unwrap();
        seen.push(loaded.config.scenario);
    }
    seen.sort();
    let mut all: Vec<String> = SCENARIOS.iter().map(|s| s.to_string()).collect();
    all.sort();
    assert_eq!(seen, all);
}

#[test]
fn negative_control_breaks_entropy_invariants() {
    use logdisp_cli::selftest::{run, Context};
    let report = run(&Context { vacuum_factor: 1.0 }, false);
    assert!(!report.passed());
    assert!(!report.get("lognls: entropy of gamma").unwrap().pass);
    assert!(report.get("lognls: mass conservation").unwrap().pass);
    assert!(report.get("fokker_planck: semigroup property").unwrap().pass);
}

#[test]
fn self_test_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = logdisp(&["self-test"], dir.path());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"));
}
