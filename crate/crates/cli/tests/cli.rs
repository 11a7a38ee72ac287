use std::path::Path;
use std::process::{Command, Output};

fn kitwpa(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kitwpa"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(o: &Output, key: &str) -> f64 {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("{key} missing from:\n{}", stdout(o)))
        .parse()
        .unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn spectrum_writes_header_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = kitwpa(
        dir.path(),
        &["spectrum", "--set", "sweep.frequency.points=25"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(text.starts_with("# kitwpa spectrum\n"));
    assert!(text.contains("# resolved config:"));
    assert!(text.contains("# kind: s21_complex"));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "frequency_hz,re,im");
    assert_eq!(rows.len(), 26);
    let manifest = std::fs::read_to_string(dir.path().join("spectrum.csv.manifest.toml")).unwrap();
    let m: toml::Table = manifest.parse().unwrap();
    assert_eq!(m["command"].as_str(), Some("spectrum"));
    assert_eq!(
        m["config"]["sweep"]["frequency"]["points"].as_integer(),
        Some(25)
    );
}

#[test]
fn db_spectrum_round_trips_through_the_loader() {
    let dir = tempfile::tempdir().unwrap();
    let o = kitwpa(dir.path(), &["spectrum", "--db", "--out", "s.csv"]);
    assert!(o.status.success());
    let s = kitwpa_core::analysis::load_spectrum(dir.path().join("s.csv")).unwrap();
    assert_eq!(s.kind(), kitwpa_core::SpectrumKind::S21Db);
    assert_eq!(s.len(), 200);
}

#[test]
fn vortex_field_default_is_about_43_mt() {
    let dir = tempfile::tempdir().unwrap();
    let o = kitwpa(dir.path(), &["vortex-field"]);
    assert!(o.status.success());
    let mt = value(&o, "entry_field_t") * 1e3;
    assert!((mt - 43.0).abs() < 2.0, "{mt}");
}

#[test]
fn fit_bc_recovers_packaged_nbtin_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = kitwpa(dir.path(), &["fit-bc", "--dataset", "nbtin"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((value(&o, "bc_fit_t") - 13.8).abs() < 1e-3);
    assert!((value(&o, "coherence_length_nm") - 4.89).abs() < 0.05);
    let text = std::fs::read_to_string(dir.path().join("fit-bc.csv")).unwrap();
    assert!(data_lines(&text)[0] == "quantity,value,unit");
}

#[test]
fn fit_bc_reads_a_data_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tc.csv"), kitwpa_cli::commands::NB_DATA).unwrap();
    let o = kitwpa(dir.path(), &["fit-bc", "--data", "tc.csv", "--tc0", "9.15"]);
    assert!(o.status.success());
    assert!((value(&o, "bc_fit_t") - 1.6).abs() < 1e-3);
}

#[test]
fn dsnr_model_reports_crossover_and_loss() {
    let dir = tempfile::tempdir().unwrap();
    let o = kitwpa(dir.path(), &["dsnr-model"]);
    assert!(o.status.success());
    let t = value(&o, "zero_db_crossing_k");
    assert!((2.4..=3.2).contains(&t), "{t}");
    assert!((value(&o, "cascade_loss_db") - 3.85).abs() < 0.15);
    let text = std::fs::read_to_string(dir.path().join("dsnr-model.csv")).unwrap();
    assert_eq!(data_lines(&text).len(), 101);
}

#[test]
fn bandgap_and_sweeps_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = kitwpa(dir.path(), &["bandgap"]);
    assert!(o.status.success());
    assert!((value(&o, "center_hz") - 10.55e9).abs() < 0.2e9);

    let o = kitwpa(
        dir.path(),
        &["sweep-temp", "--set", "sweep.frequency.points=20"],
    );
    assert!(o.status.success());
    assert!(value(&o, "mean_s21_db_last") < value(&o, "mean_s21_db_first") - 20.0);

    let o = kitwpa(
        dir.path(),
        &[
            "sweep-field",
            "--axis",
            "par",
            "--set",
            "sweep.field.points=3",
        ],
    );
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("sweep-field.csv")).unwrap();
    assert_eq!(data_lines(&text)[0], "b_par_t,mean_s21_db");
}

#[test]
fn combined_field_emits_extrapolation_note() {
    let dir = tempfile::tempdir().unwrap();
    let o = kitwpa(
        dir.path(),
        &[
            "spectrum",
            "--set",
            "environment.b_perp=0.1",
            "--set",
            "environment.b_par=0.1",
        ],
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("extrapolation"));
}

#[test]
fn analyze_reports_missing_values_as_none() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("# kind: dsnr_db\nfrequency_hz,value_db\n");
    for i in 0..200 {
        let v = if (50..150).contains(&i) { 10.0 } else { 0.0 };
        text.push_str(&format!("{},{v}\n", 4e9 + 2e7 * i as f64));
    }
    std::fs::write(dir.path().join("d.csv"), text).unwrap();
    let o = kitwpa(dir.path(), &["analyze", "--input", "d.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(value(&o, "dsnr_mode_db"), 10.0);
    assert!(stdout(&o).contains("mean_gain_in_bw_db: none"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kitwpa(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(
        kitwpa(dir.path(), &["no-such-command"]).status.code(),
        Some(1)
    );
    assert_eq!(
        kitwpa(dir.path(), &["spectrum", "--set", "strip.bogus=1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(kitwpa(dir.path(), &["fit-bc"]).status.code(), Some(1));
    let o = kitwpa(
        dir.path(),
        &["spectrum", "--set", "environment.temperature=-1"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("materials::gap"));
    let o = kitwpa(dir.path(), &["analyze", "--input", "missing.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = kitwpa(dir.path(), &["spectrum", "--out", name]);
        assert!(o.status.success());
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[vortex]\nwidth = 680e-9\n").unwrap();
    let o = kitwpa(dir.path(), &["--config", "c.toml", "vortex-field"]);
    assert!(o.status.success());
    // Wider strip, lower entry field.
    assert!(value(&o, "entry_field_t") < 0.02);
}
