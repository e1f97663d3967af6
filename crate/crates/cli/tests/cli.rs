//! Binary-level checks: every command against the bundled configs and
//! fixtures, the documented exit codes, and the output schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .and_then(Path::parent)
        .expect("workspace root")
        .to_path_buf()
}

fn config(name: &str) -> String {
    repo_root().join("configs").join(name).display().to_string()
}

fn fixture(name: &str) -> String {
    repo_root()
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn pxbar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pxbar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Data rows of a CSV: everything after the comment and header lines.
fn data_rows(content: &str) -> Vec<Vec<String>> {
    content
        .lines()
        .skip(2)
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn help_lists_every_command() {
    let out = pxbar(&["--help"]);
    assert_success(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    for command in [
        "materials",
        "optics-sweep",
        "memory-demo",
        "xbar",
        "ann-infer",
        "report",
    ] {
        assert!(text.contains(command), "help misses {command}");
    }
    assert!(text.contains("Exit codes"));
}

#[test]
fn materials_echoes_the_bundled_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxbar(&[
        "materials",
        "--config",
        &config("pcm.toml"),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let csv = read(dir.path(), "materials.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config_sha256="));
    assert_eq!(
        lines.next().unwrap(),
        "wavelength_nm,n_amorphous,k_amorphous,n_crystalline,k_crystalline"
    );
    assert_eq!(data_rows(&csv).len(), 3);
}

#[test]
fn vmm_reproduces_the_reference_currents() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxbar(&[
        "xbar",
        "--config",
        &config("xbar2.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "vmm",
        "--input",
        &fixture("v_2x2.csv"),
        "--conductances",
        &fixture("g_2x2.csv"),
        "--mode",
        "ideal",
    ]);
    assert_success(&out);
    let rows = data_rows(&read(dir.path(), "currents.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], ["0", "0", "7.00000000000e-3"]);
    assert_eq!(rows[1], ["0", "1", "1.00000000000e-2"]);
}

#[test]
fn nonideal_vmm_without_wire_resistance_matches_ideal_bytes() {
    let ideal_dir = tempfile::tempdir().unwrap();
    let nonideal_dir = tempfile::tempdir().unwrap();
    for (dir, mode) in [(&ideal_dir, "ideal"), (&nonideal_dir, "nonideal")] {
        let out = pxbar(&[
            "xbar",
            "--config",
            &config("xbar2.toml"),
            "--out",
            dir.path().to_str().unwrap(),
            "vmm",
            "--input",
            &fixture("v_2x2.csv"),
            "--conductances",
            &fixture("g_2x2.csv"),
            "--mode",
            mode,
        ]);
        assert_success(&out);
    }
    assert_eq!(
        read(ideal_dir.path(), "currents.csv"),
        read(nonideal_dir.path(), "currents.csv")
    );
}

#[test]
fn programming_to_the_current_state_needs_no_pulses() {
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("targets.csv");
    // A fresh array sits at g_amorphous everywhere; target exactly that.
    std::fs::write(&targets, "1.0e-4,1.0e-4\n1.0e-4,1.0e-4\n").unwrap();
    let out = pxbar(&[
        "xbar",
        "--config",
        &config("xbar2.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "program",
        "--targets",
        targets.to_str().unwrap(),
    ]);
    assert_success(&out);
    for row in data_rows(&read(dir.path(), "program_report.csv")) {
        assert_eq!(row[4], "0", "expected zero pulses, got row {row:?}");
        assert_eq!(row[5], "true");
    }
}

#[test]
fn snapshot_uses_the_documented_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxbar(&[
        "xbar",
        "--config",
        &config("pcm.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "snapshot",
        "--states",
        &fixture("states_8x8.csv"),
    ]);
    assert_success(&out);
    let csv = read(dir.path(), "snapshot.csv");
    assert_eq!(
        csv.lines().nth(1).unwrap(),
        "row,col,s,conductance_S,class,transmission,phase_rad"
    );
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 64);
    assert_eq!(rows[0][4], "HRS");
    assert_eq!(rows[63][4], "LRS");
}

#[test]
fn optics_sweep_single_point_list_sits_at_the_loss_floor() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxbar(&[
        "optics-sweep",
        "--config",
        &config("pcm.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "--grid",
        "x",
        "--list",
        "0",
    ]);
    assert_success(&out);
    let rows = data_rows(&read(dir.path(), "optics_sweep.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "0.00000000000e0");
    // alpha_min_per_m = 100 in the bundled config.
    assert_eq!(rows[0][1], "1.00000000000e2");
}

#[test]
fn optics_sweep_rejects_a_two_point_uniform_grid() {
    let out = pxbar(&[
        "optics-sweep",
        "--config",
        &config("pcm.toml"),
        "--points",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn memory_demo_round_trips_to_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxbar(&[
        "memory-demo",
        "--config",
        &config("pcm.toml"),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let rows = data_rows(&read(dir.path(), "memory_demo.csv"));
    assert_eq!(rows.len(), 22);
    assert_eq!(rows[0][1..], rows[21][1..], "erase must restore baseline");
    let conductances: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    let transmissions: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    for i in 1..=20 {
        assert!(conductances[i] > conductances[i - 1]);
        assert!(transmissions[i] < transmissions[i - 1]);
    }
}

#[test]
fn ann_infer_identity_layer_predicts_the_argmax() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxbar(&[
        "ann-infer",
        "--config",
        &config("pcm.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "--weights",
        &fixture("identity3.csv"),
        "--input",
        &fixture("input3.csv"),
        "--labels",
        &fixture("labels3.csv"),
        "--mode",
        "ideal",
    ]);
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(stdout.contains("accuracy: 4/4"));
    let rows = data_rows(&read(dir.path(), "predictions.csv"));
    let predictions: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(predictions, ["0", "1", "2", "2"]);
}

#[test]
fn report_round_trips_the_recorded_trace() {
    let infer_dir = tempfile::tempdir().unwrap();
    assert_success(&pxbar(&[
        "ann-infer",
        "--config",
        &config("pcm.toml"),
        "--out",
        infer_dir.path().to_str().unwrap(),
        "--weights",
        &fixture("identity3.csv"),
        "--input",
        &fixture("input3.csv"),
    ]));
    let report_dir = tempfile::tempdir().unwrap();
    let trace = infer_dir.path().join("trace.csv");
    assert_success(&pxbar(&[
        "report",
        "--trace",
        trace.to_str().unwrap(),
        "--out",
        report_dir.path().to_str().unwrap(),
    ]));
    let original = read(infer_dir.path(), "energy_report.csv");
    let rebuilt = read(report_dir.path(), "energy_report.csv");
    assert_eq!(data_rows(&original), data_rows(&rebuilt));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = 1\n").unwrap();
    let out = pxbar(&["materials", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
}

#[test]
fn read_amplitude_at_the_switching_threshold_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let source = std::fs::read_to_string(repo_root().join("configs/pcm.toml")).unwrap();
    let hot = source
        .replace("v_read = 0.2", "v_read = 1.0")
        .replace("../data/gst.csv", &repo_root().join("data/gst.csv").display().to_string());
    let bad = dir.path().join("hot_read.toml");
    std::fs::write(&bad, hot).unwrap();
    let out = pxbar(&["materials", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("disturb"));
}

#[test]
fn schema_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1.0,garbage\n").unwrap();
    let out = pxbar(&[
        "xbar",
        "--config",
        &config("xbar2.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "vmm",
        "--input",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));
}

#[test]
fn model_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("targets.csv");
    // 5e-2 S exceeds g_crystalline_S = 1e-2 in xbar2.toml.
    std::fs::write(&targets, "5.0e-2,2.0e-3\n3.0e-3,4.0e-3\n").unwrap();
    let out = pxbar(&[
        "xbar",
        "--config",
        &config("xbar2.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "program",
        "--targets",
        targets.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model error"));
}

#[test]
fn seed_flag_overrides_the_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxbar(&[
        "materials",
        "--config",
        &config("pcm.toml"),
        "--seed",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let csv = read(dir.path(), "materials.csv");
    assert!(csv.lines().next().unwrap().ends_with("seed=7"));
}

#[test]
fn mismatched_fixture_shape_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxbar(&[
        "xbar",
        "--config",
        &config("xbar2.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "snapshot",
        "--states",
        &fixture("states_8x8.csv"),
    ]);
    assert_eq!(out.status.code(), Some(3));
}
