use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn desk() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.toml")
}

fn shaped() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/shaped.toml")
}

fn freqswap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freqswap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    freqswap(&args)
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("exp.toml");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn swap_reports_desk_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let o = run("swap", &desk(), &out, &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let s = summary(&out);
    assert_eq!(s["summary"]["command"], "swap");
    assert_eq!(s["summary"]["status"], "heralded");
    let p = s["summary"]["success_probability"].as_f64().unwrap();
    assert!((p - 0.125).abs() < 1e-12);
    let entropy = s["summary"]["entanglement_entropy_nats"].as_f64().unwrap();
    assert!((entropy - 2.0794).abs() < 1e-4);
    assert_eq!(s["provenance"]["config_sha256"].as_str().unwrap().len(), 64);

    let csv = fs::read_to_string(out.join("coincidence_sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega_1 [arb. angular frequency],omega_4 [arb. angular frequency],probability [1]"
    );
    assert_eq!(lines.count(), 64);
}

#[test]
fn physical_path_flag_matches_ideal() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = dir.path().join("ideal");
    let physical = dir.path().join("physical");
    assert_eq!(
        run("swap", &desk(), &ideal, &["--path", "ideal"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run("swap", &desk(), &physical, &["--path", "physical"])
            .status
            .code(),
        Some(0)
    );
    let (a, b) = (summary(&ideal), summary(&physical));
    assert_eq!(b["summary"]["path"], "physical");
    let pa = a["summary"]["success_probability"].as_f64().unwrap();
    let pb = b["summary"]["success_probability"].as_f64().unwrap();
    assert!((pa - pb).abs() < 1e-12);
}

#[test]
fn sample_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let flags = ["--seed", "42", "--trials", "8000"];
    assert_eq!(run("sample", &desk(), &a, &flags).status.code(), Some(0));
    assert_eq!(run("sample", &desk(), &b, &flags).status.code(), Some(0));
    for name in ["summary.json", "coincidence_histogram.csv"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let s = summary(&a);
    assert_eq!(s["summary"]["off_line_events"], 0);
    assert!(s["summary"]["chi_square"].as_f64().unwrap() < 24.32);
    assert_eq!(s["provenance"]["seed"], 42);
}

#[test]
fn seed_flag_changes_the_sample() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run("sample", &desk(), &a, &["--seed", "1", "--trials", "500"]);
    run("sample", &desk(), &b, &["--seed", "2", "--trials", "500"]);
    assert_ne!(
        fs::read(a.join("coincidence_histogram.csv")).unwrap(),
        fs::read(b.join("coincidence_histogram.csv")).unwrap()
    );
}

#[test]
fn unreachable_window_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(desk())
        .unwrap()
        .replace("omega_iii = 2.1", "omega_iii = 3.5");
    let cfg = write_config(dir.path(), &text);
    for cmd in ["swap", "sample"] {
        let out = dir.path().join(cmd);
        let o = run(cmd, &cfg, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(o.stdout.is_empty());
        let s = summary(&out);
        let status = if cmd == "swap" {
            &s["summary"]["status"]
        } else {
            &s["summary"]["swap"]["status"]
        };
        assert_eq!(status, "empty_post_selection");
    }
}

#[test]
fn config_errors_exit_1_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(desk())
        .unwrap()
        .replace("[sampling]", "[sampling]\ncolour = 3");
    let cfg = write_config(dir.path(), &text);
    let o = run("swap", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("colour") && err.contains("line"), "{err}");
    assert!(!dir.path().join("out").exists());

    let text = fs::read_to_string(desk())
        .unwrap()
        .replace("pump = 2.0", "pump = -2.0");
    let cfg = write_config(dir.path(), &text);
    let o = run("biphoton", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("positive"));

    let o = run(
        "swap",
        &dir.path().join("missing.toml"),
        &dir.path().join("out"),
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(freqswap(&["swap"]).status.code(), Some(1));
    assert_eq!(freqswap(&["teleport"]).status.code(), Some(1));
    let cfg = desk();
    let o = freqswap(&[
        "swap",
        "--config",
        cfg.to_str().unwrap(),
        "--path",
        "quantum",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(freqswap(&["--help"]).status.code(), Some(0));
    assert_eq!(freqswap(&["--version"]).status.code(), Some(0));
}

#[test]
fn biphoton_writes_spectra_and_schmidt_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bi");
    assert_eq!(run("biphoton", &desk(), &out, &[]).status.code(), Some(0));
    let s = summary(&out);
    let sources = s["summary"]["sources"].as_array().unwrap();
    assert_eq!(sources.len(), 2);
    for src in sources {
        assert_eq!(src["entries"], 8);
        assert!((src["entropy_nats"].as_f64().unwrap() - 8f64.ln()).abs() < 1e-10);
    }
    let csv = fs::read_to_string(out.join("spectrum_source_i.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(
        csv.starts_with("omega_ch1 [arb. angular frequency],omega_ch2 [arb. angular frequency]")
    );
}

#[test]
fn time_coincidence_writes_three_density_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tc");
    assert_eq!(
        run("time-coincidence", &shaped(), &out, &[]).status.code(),
        Some(0)
    );
    for pair in ["12", "34", "14"] {
        let csv = fs::read_to_string(out.join(format!("density_pair_{pair}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 241 * 241 + 1, "{pair}");
    }
    let s = summary(&out);
    let densities = s["summary"]["densities"].as_array().unwrap();
    assert!(densities
        .iter()
        .all(|d| d["central_peak_fwhm"].as_f64().is_some()));
}
