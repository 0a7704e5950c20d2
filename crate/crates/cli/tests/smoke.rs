//! End-to-end CLI smoke tests: simulate -> extract -> evaluate, baseline,
//! augment, bench, plus failure-path exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SCENE: &str = r#"
[grid]
subcarriers = 30
bandwidth_hz = 20e6
carrier_hz = 5.18e9
symbol_interval_s = 1e-3
symbols = 224

[[static_path]]
attenuation = [1.0, 0.0]
delay_ns = 40.0

[[dynamic_path]]
attenuation = [0.3, 0.0]
delay_ns = 66.7
doppler_hz = 40.0

[impairment]
enabled = true
to_scale_s = 100e-9
seed = 7
snr_db = 20.0
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bisense"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bisense_cli_{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_scene(dir: &Path) -> PathBuf {
    let path = dir.join("scene.toml");
    std::fs::write(&path, SCENE).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn simulate_extract_evaluate_pipeline() {
    let dir = workdir("pipeline");
    let scene = write_scene(&dir);
    let wcsi = dir.join("a.wcsi");
    let wddt = dir.join("a.wddt");
    let csv = dir.join("map.csv");

    run_ok(bin().args(["simulate", "--config"]).arg(&scene).arg("--out").arg(&wcsi));
    assert_eq!(&std::fs::read(&wcsi).unwrap()[..4], b"WCSI");

    run_ok(
        bin()
            .args(["extract", "--input"])
            .arg(&wcsi)
            .arg("--config")
            .arg(&scene)
            .arg("--out")
            .arg(&wddt)
            .arg("--map-csv")
            .arg(&csv),
    );
    assert_eq!(&std::fs::read(&wddt).unwrap()[..4], b"WDDT");
    assert!(csv.exists());

    let out = run_ok(bin().args(["evaluate", "--input"]).arg(&wddt).arg("--truth").arg(&scene));
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["cpi_count=4", "range_error_p50_m=", "mirror.0.db="] {
        assert!(text.contains(key), "report missing {key}:\n{text}");
    }
    // Every line is key=value.
    for line in text.lines() {
        assert!(line.contains('='), "unparsable report line: {line}");
    }
    // The synthetic target sits at 8 m, +40 Hz; the report must agree
    // within a bin on every CPI.
    for line in text.lines() {
        if let Some(v) = line.strip_prefix("cpi.0.est_range_m=") {
            let est: f64 = v.parse().unwrap();
            assert!((est - 8.0).abs() <= 1.5, "range estimate {est}");
        }
        if let Some(v) = line.strip_prefix("cpi.0.est_doppler_hz=") {
            let est: f64 = v.parse().unwrap();
            assert!((est - 40.0).abs() <= 8.0, "doppler estimate {est}");
        }
    }
}

#[test]
fn pipeline_is_deterministic() {
    let dir = workdir("determinism");
    let scene = write_scene(&dir);
    let mut artifacts = Vec::new();
    for run in 0..2 {
        let wcsi = dir.join(format!("r{run}.wcsi"));
        let wddt = dir.join(format!("r{run}.wddt"));
        run_ok(
            bin()
                .args(["simulate", "--config"])
                .arg(&scene)
                .arg("--out")
                .arg(&wcsi)
                .args(["--seed", "5"]),
        );
        run_ok(
            bin()
                .args(["extract", "--input"])
                .arg(&wcsi)
                .arg("--config")
                .arg(&scene)
                .arg("--out")
                .arg(&wddt),
        );
        artifacts.push((std::fs::read(&wcsi).unwrap(), std::fs::read(&wddt).unwrap()));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "CSI files differ across runs");
    assert_eq!(artifacts[0].1, artifacts[1].1, "tensor files differ across runs");
}

#[test]
fn baseline_subcommand_writes_tensor() {
    let dir = workdir("baseline");
    let scene = write_scene(&dir);
    for (method, out_name) in [("cacc", "cacc.wddt"), ("casr", "casr.wddt")] {
        let out = dir.join(out_name);
        run_ok(
            bin()
                .args(["baseline", "--method", method, "--plain-fft", "--config"])
                .arg(&scene)
                .arg("--out")
                .arg(&out),
        );
        assert_eq!(&std::fs::read(&out).unwrap()[..4], b"WDDT");
    }
}

#[test]
fn augment_roundtrip_shapes() {
    let dir = workdir("augment");
    let scene = write_scene(&dir);
    let wcsi = dir.join("a.wcsi");
    let wddt = dir.join("a.wddt");
    let aug = dir.join("aug.wddt");
    run_ok(bin().args(["simulate", "--config"]).arg(&scene).arg("--out").arg(&wcsi));
    run_ok(
        bin()
            .args(["extract", "--input"])
            .arg(&wcsi)
            .arg("--config")
            .arg(&scene)
            .arg("--out")
            .arg(&wddt),
    );
    // Mirror twice returns the original tensor bytes.
    run_ok(bin().args(["augment", "--kind", "mirror", "--input"]).arg(&wddt).arg("--out").arg(&aug));
    let aug2 = dir.join("aug2.wddt");
    run_ok(bin().args(["augment", "--kind", "mirror", "--input"]).arg(&aug).arg("--out").arg(&aug2));
    assert_eq!(std::fs::read(&wddt).unwrap(), std::fs::read(&aug2).unwrap());
}

#[test]
fn bench_reports_latency_keys() {
    let out = run_ok(bin().args(["bench", "--reps", "10", "--delay-bins", "8"]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("latency_mean_ms="));
    assert!(text.contains("latency_samples=10"));
}

#[test]
fn missing_config_fails_with_error_line() {
    let out = bin()
        .args(["simulate", "--config", "/nonexistent/scene.toml", "--out", "/tmp/x.wcsi"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error: kind="), "stderr: {stderr}");
    assert!(stderr.contains("msg="));
}

#[test]
fn corrupt_input_fails_with_format_error() {
    let dir = workdir("corrupt");
    let bad = dir.join("bad.wddt");
    std::fs::write(&bad, b"NOPE not a tensor").unwrap();
    let scene = write_scene(&dir);
    let out = bin()
        .args(["evaluate", "--input"])
        .arg(&bad)
        .arg("--truth")
        .arg(&scene)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("kind=format"), "stderr: {stderr}");
}
