use dirty_bosons::disorder::{lattice_covariance, lattice_spectrum, periodogram, FieldSynthesizer, Seed};
use dirty_bosons::stats;
use dirty_bosons::{DisorderSpec, Field, Grid};
use proptest::prelude::*;

fn variants() -> Vec<DisorderSpec> {
    vec![
        DisorderSpec::Uncorrelated { kappa: 0.7 },
        DisorderSpec::OrnsteinZernike { kappa: 1.3, b: 1.0 },
        DisorderSpec::GaussianCorrelated { u0: 0.8, b: 1.0 },
        DisorderSpec::LorentzCorrelated { u0: 1.1, b: 1.0 },
    ]
}

fn ensemble(spec: DisorderSpec, grid: &Grid, count: u64) -> Vec<Field> {
    FieldSynthesizer::new(spec, grid).unwrap().ensemble(7, 0..count).unwrap()
}

#[test]
fn site_variance_matches_covariance_at_origin() {
    let grid = Grid::cubic(1, 256, 0.25).unwrap();
    for spec in variants() {
        let target = lattice_covariance(&spec, &grid).unwrap().values[0];
        let fields = ensemble(spec, &grid, 120);
        let per: Vec<f64> = fields.iter().map(|f| f.values.iter().map(|v| v * v).sum::<f64>() / 256.0).collect();
        let (m, se) = stats::jackknife_mean(&per);
        assert!((m - target).abs() < 3.0 * se, "{}: {m} vs {target} ± {se}", spec.name());
    }
}

#[test]
fn periodogram_follows_lattice_spectrum() {
    let grid = Grid::cubic(2, 32, 0.25).unwrap();
    for spec in variants() {
        let expected = lattice_spectrum(&spec, &grid).unwrap();
        let pg = periodogram(&ensemble(spec, &grid, 200)).unwrap();
        let cell = grid.cell_volume();
        // bins below rounding level of the largest mode are not resolved
        let floor = 1e-12 * expected.iter().copied().fold(0.0, f64::max);
        let resolved: Vec<usize> = (0..expected.len()).filter(|&k| expected[k] > floor).collect();
        let inside = resolved
            .iter()
            .filter(|&&k| (pg.mean[k] - cell * expected[k]).abs() <= 3.0 * pg.standard_errors[k])
            .count();
        // per-bin errors are estimated from the same 200 samples, so a few bins fall outside
        let fraction = inside as f64 / resolved.len() as f64;
        assert!(fraction > 0.97, "{}: {fraction}", spec.name());
    }
}

#[test]
fn site_marginal_is_gaussian() {
    let grid = Grid::cubic(1, 512, 0.25).unwrap();
    for spec in variants() {
        let fields = ensemble(spec, &grid, 100);
        let all: Vec<f64> = fields.iter().flat_map(|f| f.values.iter().copied()).collect();
        let m = stats::mean(&all);
        let var = all.iter().map(|v| (v - m).powi(2)).sum::<f64>() / all.len() as f64;
        let m4 = all.iter().map(|v| (v - m).powi(4)).sum::<f64>() / all.len() as f64;
        let excess = m4 / (var * var) - 3.0;
        assert!(excess.abs() < 0.15, "{}: excess kurtosis {excess}", spec.name());
    }
}

#[test]
fn correlator_does_not_depend_on_reference_point() {
    let grid = Grid::cubic(1, 256, 0.25).unwrap();
    let spec = DisorderSpec::GaussianCorrelated { u0: 1.0, b: 1.0 };
    let fields = ensemble(spec, &grid, 400);
    let lag = 4;
    let products = |origin: usize| -> Vec<f64> {
        fields.iter().map(|f| f.values[origin] * f.values[(origin + lag) % 256]).collect()
    };
    let (a, sa) = stats::jackknife_mean(&products(0));
    let (b, sb) = stats::jackknife_mean(&products(131));
    assert!((a - b).abs() < 3.0 * (sa * sa + sb * sb).sqrt(), "{a} ± {sa} vs {b} ± {sb}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn synthesis_is_reproducible(stream in 0u64..1000, r in 0u64..1000, which in 0usize..4) {
        let grid = Grid::cubic(1, 64, 0.25).unwrap();
        let synth = FieldSynthesizer::new(variants()[which], &grid).unwrap();
        let a = synth.synthesize(Seed::new(stream, r)).unwrap();
        let b = synth.synthesize(Seed::new(stream, r)).unwrap();
        prop_assert_eq!(&a.values, &b.values);
        let c = synth.synthesize(Seed::new(stream, r + 1)).unwrap();
        prop_assert_ne!(&a.values, &c.values);
        prop_assert!(a.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn lattice_spectrum_is_nonnegative(n in 16usize..80, b_cells in 2.0f64..6.0, which in 0usize..4) {
        let grid = Grid::cubic(1, n, 1.0).unwrap();
        let spec = match variants()[which] {
            DisorderSpec::Uncorrelated { kappa } => DisorderSpec::Uncorrelated { kappa },
            DisorderSpec::OrnsteinZernike { kappa, .. } => DisorderSpec::OrnsteinZernike { kappa, b: b_cells },
            DisorderSpec::GaussianCorrelated { u0, .. } => DisorderSpec::GaussianCorrelated { u0, b: b_cells },
            DisorderSpec::LorentzCorrelated { u0, .. } => DisorderSpec::LorentzCorrelated { u0, b: b_cells },
        };
        let s = lattice_spectrum(&spec, &grid).unwrap();
        prop_assert!(s.iter().all(|v| *v >= 0.0 && v.is_finite()));
    }
}
