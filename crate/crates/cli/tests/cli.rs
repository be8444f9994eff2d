use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ricci_dynamo_cli::run::execute;
use ricci_dynamo_cli::scenario;
use ricci_dynamo_cli::table::{Cell, TIMESTAMP_PREFIX};

const BIN: &str = env!("CARGO_BIN_EXE_ricci-dynamo");

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn tool(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("RICCI_DYNAMO_THREADS")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path
}

/// File contents with the generation-time lines removed.
fn without_timestamp(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with(TIMESTAMP_PREFIX) && !l.trim_start().starts_with("\"generated\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn sorted_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn version_prints_crate_version() {
    let out = tool(&["version"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        format!("ricci-dynamo {}", env!("CARGO_PKG_VERSION"))
    );
}

#[test]
fn bundled_scenarios_validate() {
    for name in ["scenarios/reference.toml", "scenarios/grid_shear.toml"] {
        let out = tool(&["validate", manifest(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
    }
}

#[test]
fn reference_run_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let reference = manifest("scenarios/reference.toml");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = tool(&["run", reference.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = Command::new(BIN)
        .args([
            "run",
            reference.to_str().unwrap(),
            "--out",
            b.to_str().unwrap(),
            "--threads",
            "1",
        ])
        .env("RICCI_DYNAMO_THREADS", "4")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let fa = sorted_files(&a);
    let fb = sorted_files(&b);
    assert_eq!(fa.len(), 15);
    assert_eq!(
        fa.iter().map(|p| p.file_name().unwrap()).collect::<Vec<_>>(),
        fb.iter().map(|p| p.file_name().unwrap()).collect::<Vec<_>>()
    );
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(without_timestamp(x), without_timestamp(y), "{}", x.display());
    }
}

#[test]
fn format_flag_limits_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "model = \"reduced\"\noutputs = [\"sweep\"]\n[parameters]\nR = 1\ntheta = 0.5\neta = 0.1\n",
    );
    let out_dir = dir.path().join("out");
    let out = tool(&[
        "run",
        path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let names: Vec<String> = sorted_files(&out_dir)
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, vec!["sweep.json"]);
}

#[test]
fn malformed_fixtures_exit_2_naming_the_field() {
    let cases = [
        ("inverted_sweep.toml", "parameters.eta.min"),
        ("unknown_output.toml", "outputs[1]"),
        ("negative_eta.toml", "parameters.eta"),
        ("grid_without_grid.toml", "grid"),
        ("bad_velocity.toml", "grid.velocity.x"),
    ];
    for (file, field) in cases {
        let path = manifest(&format!("tests/fixtures/{file}"));
        let untouched = tempfile::tempdir().unwrap();
        let out_dir = untouched.path().join("out");
        let validate = tool(&["validate", path.to_str().unwrap()]);
        let run = tool(&["run", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        for out in [validate, run] {
            assert_eq!(out.status.code(), Some(2), "{file}: {}", stderr(&out));
            assert!(stderr(&out).contains(&format!("{field}:")), "{file}: {}", stderr(&out));
        }
        assert!(!out_dir.exists());
    }
}

#[test]
fn toml_syntax_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "model = \"reduced\"\noutputs = [\"spectrum\"\n");
    let out = tool(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line "), "{}", stderr(&out));
}

#[test]
fn unstable_step_exits_3_naming_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        r#"
model = "reduced"
outputs = ["evolve"]
[parameters]
R = { min = 1, max = 100, count = 2 }
theta = 0
eta = 0
[time]
t_end = 5
dt = 1
stepper = "rk4"
"#,
    );
    let out = tool(&[
        "run",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let msg = stderr(&out);
    assert!(msg.contains("sweep point 1") && msg.contains("R = 100"), "{msg}");
}

#[test]
fn io_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(tool(&["validate", missing.to_str().unwrap()]).status.code(), Some(4));

    // the output "directory" is an existing regular file
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let reference = manifest("scenarios/reference.toml");
    let out = tool(&["run", reference.to_str().unwrap(), "--out", blocker.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn invalid_thread_env_exits_2() {
    let reference = manifest("scenarios/reference.toml");
    let out = Command::new(BIN)
        .args(["run", reference.to_str().unwrap(), "--out", "/tmp/unused"])
        .env("RICCI_DYNAMO_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("RICCI_DYNAMO_THREADS"));
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let scenario = scenario::load(&manifest("scenarios/reference.toml")).unwrap();
    let tables = execute(&scenario, "fixed").unwrap();
    assert_eq!(tables.len(), 6);
    for table in &tables {
        assert!(table.first_non_finite().is_none(), "{}", table.kind);
        assert!(!table.rows.is_empty(), "{}", table.kind);

        let csv_text = table.to_csv();
        let body: String = csv_text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, table.columns);

        let json: serde_json::Value = serde_json::from_str(&table.to_json()).unwrap();
        assert_eq!(json["metadata"]["kind"], table.kind.as_str());
        assert_eq!(json["metadata"]["scenario_digest"], scenario.digest().as_str());
        let json_rows = json["rows"].as_array().unwrap();

        let csv_rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(csv_rows.len(), table.rows.len());
        assert_eq!(json_rows.len(), table.rows.len());
        for ((row, rec), jrow) in table.rows.iter().zip(&csv_rows).zip(json_rows) {
            for (i, cell) in row.iter().enumerate() {
                match cell {
                    Cell::Num(v) => {
                        assert_eq!(rec[i].parse::<f64>().unwrap().to_bits(), v.to_bits());
                        assert_eq!(jrow[i].as_f64().unwrap(), *v);
                    }
                    Cell::Int(v) => {
                        assert_eq!(rec[i].parse::<i64>().unwrap(), *v);
                        assert_eq!(jrow[i].as_i64().unwrap(), *v);
                    }
                    Cell::Bool(b) => {
                        assert_eq!(rec[i].parse::<bool>().unwrap(), *b);
                        assert_eq!(jrow[i].as_bool().unwrap(), *b);
                    }
                    Cell::Text(s) => {
                        assert_eq!(&rec[i], s.as_str());
                        assert_eq!(jrow[i].as_str().unwrap(), s);
                    }
                }
            }
        }
    }
}

#[test]
fn grid_scenario_runs_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = tool(&[
        "run",
        manifest("scenarios/grid_shear.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let dat = fs::read_to_string(dir.path().join("evolve.dat")).unwrap();
    assert!(dat.starts_with("# kind: growth_curve\n"));
    // one block per sweep point
    assert_eq!(dat.matches("\n\n\n").count(), 1);
    let spectrum = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(spectrum.contains("numerical_grid"));
}
