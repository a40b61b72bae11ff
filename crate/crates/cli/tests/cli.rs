//! End-to-end command tests: exit codes, output files, determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperspin"))
}

fn fresh_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hyperspin-test-{}-{}", name, std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, json: &serde_json::Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(json).unwrap()).unwrap();
    path
}

#[test]
fn verify_default_config_exits_zero() {
    let dir = fresh_dir("verify-ok");
    let status = bin()
        .args(["verify", "--samples", "400", "--out"])
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("out/verify_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["pass"], serde_json::Value::Bool(true));
}

#[test]
fn verify_unattainable_tolerance_exits_one() {
    let dir = fresh_dir("verify-tol");
    let output = bin()
        .args(["verify", "--samples", "200", "--tol", "1e-300", "--out"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("max residual"), "{stdout}");
}

#[test]
fn config_errors_exit_two_with_diagnostics() {
    let dir = fresh_dir("config-errors");
    let bad_kind = dir.join("bad_kind.json");
    fs::write(
        &bad_kind,
        r#"{"lattice": {"kind": "kagome", "extent": [4, 4], "step": 1.0, "periodic": true}}"#,
    )
    .unwrap();
    let output = bin().args(["decompose", "--config"]).arg(&bad_kind).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("kagome"));

    let no_kind = dir.join("no_kind.json");
    fs::write(&no_kind, r#"{"lattice": {"extent": [4], "step": 1.0, "periodic": true}}"#).unwrap();
    let output = bin().args(["decompose", "--config"]).arg(&no_kind).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("kind"));

    // declared command must match the subcommand
    let mismatched = dir.join("mismatch.json");
    fs::write(&mismatched, r#"{"command": "scan"}"#).unwrap();
    let output = bin().args(["verify", "--config"]).arg(&mismatched).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn simulate_square_minimize_reaches_neel() {
    let dir = fresh_dir("simulate-square");
    let cfg = write_config(
        &dir,
        "sim.json",
        &serde_json::json!({
            "command": "simulate",
            "lattice": {"kind": "square", "extent": [4, 4], "step": 1.0, "periodic": true},
            "spin": {"nu": 1.0},
            "coupling": 1.0,
            "seed": 1,
            "init": {"family": "random"},
            "minimize": {"max_sweeps": 50000, "energy_tol": 1e-14, "restarts": 1}
        }),
    );
    let out = dir.join("out");
    let status = bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let per_site = summary["energy_per_site"].as_f64().unwrap();
    assert!((per_site + 2.0).abs() <= 1e-6, "energy per site {per_site}");
    assert!(summary["mean_order_norm"].as_f64().unwrap() >= 0.999);
    assert_eq!(summary["converged"], serde_json::Value::Bool(true));
    // trace is monotone non-increasing
    let trace = fs::read_to_string(out.join("minimize_trace.csv")).unwrap();
    let energies: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for w in energies.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()));
    }
}

#[test]
fn simulate_chain_minimize_has_zero_nude_chirality() {
    let dir = fresh_dir("simulate-chain");
    let cfg = write_config(
        &dir,
        "sim.json",
        &serde_json::json!({
            "command": "simulate",
            "lattice": {"kind": "chain", "extent": [8], "step": 1.0, "periodic": true},
            "spin": {"nu": 1.0},
            "seed": 2,
            "init": {"family": "random"},
            "minimize": {"max_sweeps": 50000, "energy_tol": 1e-14}
        }),
    );
    let out = dir.join("out");
    let status = bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let nude = fs::read_to_string(out.join("nude_chirality.csv")).unwrap();
    for line in nude.lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v.abs() <= 1e-12, "nude chirality {v}");
    }
}

#[test]
fn simulate_without_dynamics_echoes_the_reference_state() {
    let dir = fresh_dir("simulate-echo");
    let cfg = write_config(
        &dir,
        "sim.json",
        &serde_json::json!({
            "command": "simulate",
            "lattice": {"kind": "square", "extent": [2, 2], "step": 1.0, "periodic": true},
            "spin": {"nu": 1.0},
            "seed": 3,
            "init": {"family": "neel", "axis": [0.0, 0.0, 1.0]},
            "metropolis": {"beta": 10.0, "sweeps": 0, "proposal_angle": 0.5}
        }),
    );
    let out = dir.join("out");
    let status = bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));

    // the written configuration equals the reference state byte for byte
    let lattice = std::sync::Arc::new(
        hyperspin_core::build_lattice(&hyperspin_core::LatticeSpec::new(
            hyperspin_core::LatticeKind::Square,
            vec![2, 2],
            1.0,
        ))
        .unwrap(),
    );
    let reference = hyperspin_core::reference_config(
        lattice,
        1.0,
        &hyperspin_core::ReferenceFamily::Neel { axis: hyperspin_core::Vec3::Z },
    )
    .unwrap();
    let expected = hyperspin_core::io::spin_config_json(&reference);
    let written = fs::read_to_string(out.join("spins.json")).unwrap();
    assert_eq!(written, expected);
}

#[test]
fn non_convergence_is_flagged_not_fatal() {
    let dir = fresh_dir("simulate-nonconv");
    let cfg = write_config(
        &dir,
        "sim.json",
        &serde_json::json!({
            "command": "simulate",
            "lattice": {"kind": "square", "extent": [4, 4], "step": 1.0, "periodic": true},
            "spin": {"nu": 1.0},
            "seed": 6,
            "init": {"family": "random"},
            "minimize": {"max_sweeps": 2, "energy_tol": 1e-14}
        }),
    );
    let out = dir.join("out");
    let status = bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["converged"], serde_json::Value::Bool(false));
}

#[test]
fn json_format_switches_the_table_outputs() {
    let dir = fresh_dir("decompose-json");
    let cfg = write_config(
        &dir,
        "dec.json",
        &serde_json::json!({
            "command": "decompose",
            "lattice": {"kind": "square", "extent": [2, 2], "step": 1.0, "periodic": true},
            "spin": {"nu": 1.0},
            "seed": 8,
            "init": {"family": "columnar", "axis": [0.0, 0.0, 1.0]}
        }),
    );
    let out = dir.join("out");
    let status = bin()
        .args(["decompose", "--config"])
        .arg(&cfg)
        .args(["--format", "json", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("fields.json").exists());
    assert!(!out.join("fields.csv").exists());
    let fields: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fields.json")).unwrap()).unwrap();
    // columnar plaquettes: the dimer field carries the order, n vanishes
    let record = &fields["square"]["records"][0];
    assert_eq!(record["n"], serde_json::json!([0.0, 0.0, 0.0]));
}

#[test]
fn decompose_writes_fields_and_reports() {
    let dir = fresh_dir("decompose");
    let cfg = write_config(
        &dir,
        "dec.json",
        &serde_json::json!({
            "command": "decompose",
            "lattice": {"kind": "triangular", "extent": [3, 3], "step": 1.0, "periodic": true},
            "spin": {"s": 0.5},
            "seed": 4,
            "gauge": {"random": {"seed": 17}},
            "init": {"family": "random"}
        }),
    );
    let out = dir.join("out");
    let status = bin()
        .args(["decompose", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--parallel")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for name in
        ["lattice.json", "spins.json", "fields.csv", "constraints.csv", "constraints_summary.json", "frame.csv", "nude_chirality.csv"]
    {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("constraints_summary.json")).unwrap())
            .unwrap();
    for (name, stats) in summary["equations"].as_object().unwrap() {
        assert!(stats["max"].as_f64().unwrap() <= 1e-12, "{name}");
    }
}

#[test]
fn scan_csv_reload_reproduces_the_slope() {
    let dir = fresh_dir("scan-reload");
    let cfg = write_config(
        &dir,
        "scan.json",
        &serde_json::json!({
            "command": "scan",
            "scan": {"kind": "chain", "extent": [8], "kappa": 0.1, "halving": 6, "axis": [0.0, 0.0, 1.0]}
        }),
    );
    let out = dir.join("out");
    let status = bin().args(["scan", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("scan_summary.json")).unwrap()).unwrap();
    let slope = summary["slope"].as_f64().unwrap();
    let rows = hyperspin_core::io::scan_from_csv(&fs::read_to_string(out.join("scan.csv")).unwrap())
        .unwrap();
    let reloaded = hyperspin_core::slope_from_rows(&rows).unwrap();
    assert!((slope - reloaded).abs() <= 1e-12, "{slope} vs {reloaded}");
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let dir = fresh_dir("determinism");
    let cfg = write_config(
        &dir,
        "sim.json",
        &serde_json::json!({
            "command": "simulate",
            "lattice": {"kind": "triangular", "extent": [3, 3], "step": 1.0, "periodic": true},
            "spin": {"nu": 1.0},
            "coupling": 1.0,
            "seed": 7,
            "init": {"family": "random"},
            "minimize": {"max_sweeps": 2000, "energy_tol": 1e-12, "restarts": 2},
            "metropolis": {"beta": 50.0, "sweeps": 20, "proposal_angle": 0.4}
        }),
    );
    for args in [
        vec!["simulate", "--config"],
        vec!["verify", "--samples", "300", "--config"],
    ] {
        let (out_a, out_b) = (dir.join(format!("{}_a", args[0])), dir.join(format!("{}_b", args[0])));
        let config: PathBuf = if args[0] == "simulate" {
            cfg.clone()
        } else {
            write_config(&dir, "verify.json", &serde_json::json!({"command": "verify", "seed": 5}))
        };
        for out in [&out_a, &out_b] {
            let status =
                bin().args(&args).arg(&config).arg("--out").arg(out).status().unwrap();
            assert_eq!(status.code(), Some(0));
        }
        assert_eq!(dir_bytes(&out_a), dir_bytes(&out_b), "{} outputs differ", args[0]);
    }
}
