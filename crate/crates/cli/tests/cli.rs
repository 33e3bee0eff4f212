use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lognls::{parse_config, RunRecord, Status};

const PLANE_WAVE: &str = r#"
[grid]
points_per_axis = 32
length_per_axis = 6.283185307179586

[physics]
kT = 1.0

[evolution]
dt = 0.001
steps = 200
record_every = 10

[scenario]
name = "plane_wave"
mode_index = 1
"#;

/// Imaginary-time relaxation with kT < 0 and a huge step: the closed-form
/// log flow overshoots to non-finite amplitudes on the first step.
const BLOW_UP: &str = r#"
[physics]
kT = -1.0

[evolution]
mode = "imaginary"
dt = 20.0
steps = 5

[scenario]
name = "relaxation"
"#;

fn lognls(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lognls"))
        .args(args)
        .current_dir(dir)
        .env_remove("LOGNLS_OUT")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn record(dir: &Path) -> RunRecord {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn passing_run_writes_report_and_series() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "pw.toml", PLANE_WAVE);
    let out = lognls(&["run", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let rec = record(&tmp.path().join("o"));
    assert_eq!(rec.status, Status::Pass);
    assert!(rec.report.as_ref().unwrap().pass);
    assert_eq!(rec.version, env!("CARGO_PKG_VERSION"));

    let series = fs::read_to_string(tmp.path().join("o/series.csv")).unwrap();
    let lines: Vec<&str> = series.lines().collect();
    assert_eq!(lines[0], "t,norm_sq,E_total,E_kin,E_ext,E_log,var_x");
    assert_eq!(lines.len(), 1 + 21);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 7);
        for c in cells {
            c.parse::<f64>().unwrap();
            let mantissa = c.split('e').next().unwrap();
            assert!(mantissa.chars().filter(char::is_ascii_digit).count() >= 15, "{c}");
        }
    }
}

#[test]
fn echoed_config_reparses_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "pw.toml", PLANE_WAVE);
    lognls(&["run", &cfg, "--out", "o", "--seed", "9"], tmp.path());
    let rec = record(&tmp.path().join("o"));
    let mut expected = parse_config(PLANE_WAVE).unwrap();
    expected.set_seed(9);
    assert_eq!(parse_config(&rec.config).unwrap(), expected);
}

#[test]
fn zero_tolerance_fails_with_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let text = PLANE_WAVE.replace("mode_index = 1", "mode_index = 1\ntolerance = 0.0");
    let cfg = write(tmp.path(), "pw.toml", &text);
    let out = lognls(&["run", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let rec = record(&tmp.path().join("o"));
    assert_eq!(rec.status, Status::Fail);
    assert!(!rec.report.unwrap().pass);
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (PLANE_WAVE.replace("kT = 1.0", "kT = \"abc\""), "physics.kT"),
        (PLANE_WAVE.replace("points_per_axis = 32", "points_per_axis = 7"), "even, ≥ 8"),
        (PLANE_WAVE.replace("steps = 200", "steps = 200\nstpes = 3"), "evolution.stpes"),
    ];
    for (text, needle) in cases {
        let cfg = write(tmp.path(), "bad.toml", &text);
        let out = lognls(&["run", &cfg, "--out", "o"], tmp.path());
        assert_eq!(out.status.code(), Some(2));
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(needle), "{stderr}");
    }
    let out = lognls(&["run", "missing.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_blow_up_exits_3_with_the_step() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "nan.toml", BLOW_UP);
    let out = lognls(&["run", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    let rec = record(&tmp.path().join("o"));
    assert_eq!(rec.status, Status::NumericalAbort);
    assert_eq!(rec.abort_step, Some(1));
    assert!(rec.report.is_none());
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
[grid]
dims = 2
points_per_axis = 16
length_per_axis = 12.0

[physics]
kT = 0.5

[evolution]
dt = 0.01
steps = 50
record_every = 5

[scenario]
name = "spreading"
kt_values = "0.5, 0, -0.5"
momentum = "0.3, -0.2"
"#;
    let cfg = write(tmp.path(), "s.toml", text);
    lognls(&["run", &cfg, "--out", "a"], tmp.path());
    lognls(&["run", &cfg, "--out", "b"], tmp.path());
    let a = fs::read(tmp.path().join("a/series.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/series.csv")).unwrap();
    assert_eq!(a, b);
    let header = String::from_utf8_lossy(&a).lines().next().unwrap().to_string();
    assert_eq!(header, "t,norm_sq,E_total,E_kin,E_ext,E_log,var_x,var_y");
}

#[test]
fn output_dir_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "pw.toml", PLANE_WAVE);
    let out = Command::new(env!("CARGO_BIN_EXE_lognls"))
        .args(["run", &cfg])
        .current_dir(tmp.path())
        .env("LOGNLS_OUT", "from_env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from_env/report.json").exists());

    let text = format!("{PLANE_WAVE}\n[output]\ndir = \"from_config\"\n");
    let cfg = write(tmp.path(), "pw2.toml", &text);
    lognls(&["run", &cfg], tmp.path());
    assert!(tmp.path().join("from_config/series.csv").exists());
}

#[test]
fn empty_suite_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("empty")).unwrap();
    let out = lognls(&["suite", "empty", "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_marks_exactly_the_failing_row() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("cfgs");
    fs::create_dir(&dir).unwrap();
    write(&dir, "a_good.toml", PLANE_WAVE);
    let failing = PLANE_WAVE.replace("mode_index = 1", "mode_index = 1\ntolerance = 0.0");
    write(&dir, "b_bad.toml", &failing);
    write(&dir, "c_good.toml", &PLANE_WAVE.replace("kT = 1.0", "kT = -0.25"));
    write(&dir, "notes.txt", "ignored");

    let out = lognls(&["suite", "cfgs", "--out", "o", "--threads", "3"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let summary = fs::read_to_string(tmp.path().join("o/summary.csv")).unwrap();
    let rows: Vec<Vec<&str>> = summary.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["scenario", "pass", "max_discrepancy", "duration"]);
    let verdicts: Vec<(&str, &str)> = rows[1..].iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(verdicts, [("a_good", "true"), ("b_bad", "false"), ("c_good", "true")]);
    for name in ["a_good", "b_bad", "c_good"] {
        assert!(tmp.path().join("o").join(name).join("report.json").exists());
    }
}

#[test]
fn shipped_property_suite_passes() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = tempfile::tempdir().unwrap();
    let out = lognls(
        &["suite", configs.to_str().unwrap(), "--out", "o", "--threads", "4"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary = fs::read_to_string(tmp.path().join("o/summary.csv")).unwrap();
    assert!(summary.lines().skip(1).all(|l| l.split(',').nth(1) == Some("true")));
}
