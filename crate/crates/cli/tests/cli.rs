use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::json;
use superrep_cli::{run, CommandKind, Format, RunConfig};

fn superrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superrep"))
        .args(args)
        .env_remove("SUPERREP_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

#[test]
fn golden_artifacts() {
    let cases: [(&[&str], &str); 4] = [
        (&["fidelity", "--kind", "prob", "--n", "20", "--m", "120"], "fidelity_prob_20_120.csv"),
        (&["figure", "sequential", "--n", "8"], "figure_sequential_8.csv"),
        (&["schur", "--k", "6"], "schur_6.csv"),
        (
            &["gate-sim", "--n", "2", "--m", "4", "--samples", "1000", "--seed", "7", "--format", "json"],
            "gate_sim_2_4_seed7.json",
        ),
    ];
    for (args, file) in cases {
        let out = superrep(args);
        assert!(out.status.success(), "{args:?}: {}", stderr(&out));
        assert_eq!(stdout(&out), golden(file), "{args:?}");
    }
}

#[test]
fn fidelity_prints_the_quoted_value() {
    let out = superrep(&["fidelity", "--kind", "prob", "--n", "20", "--m", "120"]);
    assert!(stderr(&out).starts_with("0.9452"));
    let det = superrep(&["fidelity", "--kind", "det", "--n", "20", "--m", "120"]);
    assert!(stderr(&det).starts_with("0.6938"));
}

#[test]
fn sequential_figure_covers_the_output_range() {
    let out = stdout(&superrep(&["figure", "sequential", "--n", "8"]));
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "M,F_seq,F_prob,F_det");
    let ms: Vec<u64> = rows[1..].iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ms, vec![16, 24, 32, 40, 48, 56, 64]);
}

#[test]
fn recycle_figure_has_a_reference_line() {
    let out = stdout(&superrep(&["figure", "qubit-recycle", "--n", "50", "--m", "1000", "--attempts", "40"]));
    let rows: Vec<Vec<f64>> = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() > 1 && rows.len() <= 40);
    assert!(rows.iter().all(|r| r[4] == rows[0][4]));
    assert!(rows.windows(2).all(|w| w[1][2] >= w[0][2] && w[1][3] < w[0][3]));
    // The curve starts above the deterministic fidelity and ends below it.
    assert!(rows[0][3] > rows[0][4] && rows.last().unwrap()[3] < rows[0][4]);
}

#[test]
fn every_numeric_cell_is_finite_and_bounds_carry_flags() {
    let out = stdout(&superrep(&["table", "--n", "10,50,200", "--ratio", "1,2,20"]));
    let mut lines = out.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next().unwrap(), "N,M,fidelity,success_probability,lower_bound,lower_bound_clamped");
    let mut clamped = 0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        for c in &cells[..5] {
            assert!(c.parse::<f64>().unwrap().is_finite());
        }
        let bound: f64 = cells[4].parse().unwrap();
        assert!((0.0..=1.0).contains(&bound));
        clamped += (cells[5] == "true") as u32;
    }
    assert!(clamped > 0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv").display().to_string();
    let mut contents = Vec::new();
    for _ in 0..2 {
        let out = superrep(&["gate-sim", "--n", "2", "--m", "5", "--samples", "600", "--seed", "42", "-o", &path]);
        assert!(out.status.success());
        assert!(stdout(&out).contains(path.as_str()));
        contents.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(contents[0], contents[1]);
    assert!(!contents[0].contains(&b'\r'));
    // Only the artifact remains: the temporary file was renamed over it.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn csv_output_does_not_depend_on_worker_count() {
    let args = ["gate-sim", "--n", "2", "--m", "4", "--samples", "1500", "--seed", "5"];
    let one = stdout(&superrep(&args));
    let out = Command::new(env!("CARGO_BIN_EXE_superrep"))
        .args(args)
        .env("SUPERREP_WORKERS", "4")
        .output()
        .unwrap();
    assert_eq!(one, stdout(&out));
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let config = json!({
        "command": "estimate",
        "parameters": {"n": [100, 400], "c_est": 2.0},
        "seed": 0,
        "output_path": "",
        "format": "csv"
    });
    std::fs::write(&path, config.to_string()).unwrap();
    let from_file = superrep(&["--config", path.to_str().unwrap()]);
    let from_flags = superrep(&["estimate", "--n", "100,400", "--c-est", "2"]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    assert_eq!(stdout(&from_file), stdout(&from_flags));
}

#[test]
fn artifacts_embed_config_and_version() {
    let out = stdout(&superrep(&["plan", "--n", "100", "--m", "400", "--format", "json"]));
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["version"], superrep_core::VERSION);
    assert_eq!(doc["config"]["command"], "plan");
    assert_eq!(doc["config"]["parameters"]["target"], 0.01);
    assert_eq!(doc["result"]["group_size"], 50);
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let cases: [(&[&str], &str); 5] = [
        (&["gate-sim", "--m", "20"], "`m`"),
        (&["fidelity", "--n", "3", "--m", "5"], "`n`"),
        (&["fidelity", "--n", "4"], "`m`"),
        (&["gate-sim", "--probe", "ghz"], "`probe`"),
        (&["plan", "--n", "8", "--m", "16", "--target", "2"], "`target`"),
    ];
    for (args, key) in cases {
        let out = superrep(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(key), "{args:?}: {}", stderr(&out));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_superrep"))
        .args(["schur", "--k", "3"])
        .env("SUPERREP_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("SUPERREP_WORKERS"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let config = RunConfig {
        command: CommandKind::Schur,
        parameters: BTreeMap::from([("k".into(), json!(4)), ("qubits".into(), json!(4))]),
        seed: 0,
        output_path: String::new(),
        format: Format::Csv,
    };
    let err = run(&config, 1).err().unwrap();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("`qubits`"));
}

#[test]
fn infeasible_plan_exits_1() {
    let out = superrep(&["plan", "--n", "4", "--m", "400", "--target", "0.01"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("infeasible"));
}
