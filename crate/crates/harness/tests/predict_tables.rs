use dirty_bosons_harness::predict::run_predict;
use dirty_bosons_harness::RunConfig;

const BASE: &str = r#"
[physics]
dimension = 1
disorder = { kind = "uncorrelated", kappa = "1 nat" }
coupling_g = "1 nat"
"#;

fn column(table: &dirty_bosons_harness::persist::Table, name: &str) -> Vec<String> {
    table.column(name).unwrap().into_iter().map(String::from).collect()
}

#[test]
fn density_sweep_below_critical_has_monotone_mu() {
    let text = format!(
        "{BASE}\n[[sweep]]\nparameter = \"density_ratio\"\nlog_space = {{ from = \"1e-3\", to = \"0.3\", points = 10 }}\n"
    );
    let (cfg, _) = RunConfig::from_toml(&text).unwrap();
    let table = run_predict(&cfg).unwrap();
    assert_eq!(table.rows.len(), 10);
    let mu: Vec<f64> = column(&table, "chemical_potential").iter().map(|s| s.parse().unwrap()).collect();
    assert!(mu.windows(2).all(|w| w[1] > w[0]), "{mu:?}");
    assert!(column(&table, "phase").iter().all(|p| p == "fragmented"));
}

#[test]
fn empty_axis_names_the_axis() {
    let text = format!("{BASE}\n[[sweep]]\nparameter = \"coupling_g\"\nvalues = []\n");
    let err = RunConfig::from_toml(&text).unwrap_err().to_string();
    assert!(err.contains("coupling_g"), "{err}");
}

#[test]
fn gamma_crossing_one_flips_the_label_once() {
    // ℓ = 10 L: Γ = ℓ²/(N L³) falls through 1 at N = 100
    let text = format!(
        "{BASE}trap_frequency = \"0.01 nat\"\n\n[[sweep]]\nparameter = \"particle_count\"\nlog_space = {{ from = \"2\", to = \"1e4\", points = 30 }}\n"
    );
    let (cfg, _) = RunConfig::from_toml(&text).unwrap();
    let table = run_predict(&cfg).unwrap();
    let labels = column(&table, "trap_label");
    let gammas: Vec<f64> = column(&table, "gamma").iter().map(|s| s.parse().unwrap()).collect();
    assert!(gammas[0] > 1.0 && *gammas.last().unwrap() < 1.0);
    assert_eq!(labels[0], "StrongDisorder_FragmentedLocalized");
    assert_eq!(labels.last().unwrap(), "Superfluid");
    let flips = labels.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(flips, 1, "{labels:?}");
}
