use std::path::Path;

use dirty_bosons_harness::commands::{execute, Command, CommonArgs};
use dirty_bosons_harness::manifest::{RunManifest, ToleranceProfile};
use dirty_bosons_harness::persist::load_field;
use dirty_bosons_harness::{HarnessError, RunConfig};

const CONFIG: &str = r#"
[units]
length = "1 um"
mass = "86.909 u"

[physics]
dimension = 1
disorder = { kind = "gaussian", u0 = "1 nat", b = "0.5 um" }
coupling_g = "1 nat"
mean_density = "0.2 um^-1"

[grid]
points = 128
spacing = "125 nm"

[ensemble]
realizations = 4
stream = 3

[gpe]
starts = 2
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn args(config: Option<std::path::PathBuf>, out: &Path) -> CommonArgs {
    CommonArgs { config, seed: None, out: out.to_path_buf(), profile: ToleranceProfile::Desk }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn generate_is_reproducible_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = in_pool(1, || execute(&Command::Generate, &args(Some(cfg.clone()), &a))).unwrap();
    let second = in_pool(3, || execute(&Command::Generate, &args(Some(cfg.clone()), &b))).unwrap();
    let m1 = RunManifest::load(&first.manifest).unwrap();
    let m2 = RunManifest::load(&second.manifest).unwrap();
    assert_eq!(m1.without_timing(), m2.without_timing());
    assert_eq!(m1.artifacts.iter().filter(|a| a.ends_with(".bin")).count(), 4);
    for artifact in &m1.artifacts {
        assert!(first.run_dir.join(artifact).exists(), "{artifact} listed but missing");
        if let Some(stem) = artifact.strip_suffix(".bin") {
            let x = load_field(&first.run_dir.join(stem)).unwrap();
            let y = load_field(&second.run_dir.join(stem)).unwrap();
            assert_eq!(x, y);
        }
    }
}

#[test]
fn manifest_reload_keeps_the_config_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let outcome = execute(&Command::Gpe, &args(Some(cfg.clone()), dir.path())).unwrap();
    let manifest = RunManifest::load(&outcome.manifest).unwrap();
    let (config, raw) = RunConfig::from_path(&cfg).unwrap();
    assert_eq!(manifest.config, Some(config));
    assert_eq!(manifest.config_raw, serde_json::to_value(raw).unwrap());
    assert!((manifest.units.length_m - 1e-6).abs() < 1e-20);
    assert_eq!(manifest.conventions.omega_d[1], std::f64::consts::PI);
    for artifact in ["report.json", "fields/density.bin", "fields/density.json", "fields/disorder.bin"] {
        assert!(manifest.artifacts.iter().any(|a| a == artifact), "{artifact} missing from manifest");
    }
    // the directory name depends on the configuration and seed only
    let again = execute(&Command::Gpe, &args(Some(cfg), dir.path())).unwrap();
    assert_eq!(again.run_dir, outcome.run_dir);
}

#[test]
fn fragments_and_sweep_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{CONFIG}\n[[sweep]]\nparameter = \"density_ratio\"\nvalues = [\"0.05\", \"0.2\"]\n");
    let cfg = write_config(dir.path(), &text);
    let frag = execute(&Command::Fragments, &args(Some(cfg.clone()), dir.path())).unwrap();
    assert!(frag.run_dir.join("tables/fragments.csv").exists());
    let mut a = args(Some(cfg), dir.path());
    a.seed = Some(9);
    let sweep = execute(&Command::Sweep, &a).unwrap();
    let csv = std::fs::read_to_string(sweep.run_dir.join("tables/sweep.csv")).unwrap();
    // header plus 2 points x 4 realizations
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("density_ratio,realization,"));
}

#[test]
fn sweep_without_axes_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let err = execute(&Command::Sweep, &args(Some(cfg), dir.path())).unwrap_err();
    assert!(matches!(err, HarnessError::Validation(_)));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn unknown_experiment_lists_the_valid_ones() {
    let dir = tempfile::tempdir().unwrap();
    let err = execute(&Command::Verify { experiment: "lifshitz".into() }, &args(None, dir.path())).unwrap_err();
    let text = err.to_string();
    for name in ["dos_tail", "fragmentation", "correlator"] {
        assert!(text.contains(name), "{text}");
    }
    assert_eq!(err.exit_code(), 1);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0, "no run directory for a rejected experiment");
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_dbosons");
    let status = std::process::Command::new(bin)
        .args(["verify", "nonsense", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stderr).contains("correlator"));

    let bad = write_config(dir.path(), &CONFIG.replace("125 nm", "125 ms"));
    let status = std::process::Command::new(bin).arg("predict").arg("--config").arg(&bad).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stderr).contains("grid.spacing"));

    let good = write_config(dir.path(), CONFIG);
    let status = std::process::Command::new(bin)
        .args(["predict", "--threads", "1", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
}
