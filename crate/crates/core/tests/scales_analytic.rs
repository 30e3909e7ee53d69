use approx::assert_relative_eq;
use dirty_bosons::analytic::{filled_state_uncorrelated, luttinger_parameter, PrefactorMode};
use dirty_bosons::scales::{
    critical_density_three_dim, critical_density_uncorrelated, healing_length, larkin_length_uncorrelated,
};
use dirty_bosons::{derive_scales, DisorderSpec, PhysicalParams};
use proptest::prelude::*;

fn uncorrelated(d: usize, kappa: f64) -> PhysicalParams {
    PhysicalParams::natural(d, DisorderSpec::Uncorrelated { kappa })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn larkin_length_scales_with_hbar(d in 1usize..=3, lambda in 0.1f64..10.0, kappa in 0.1f64..10.0) {
        let base = larkin_length_uncorrelated(d, 1.0, 1.0, kappa);
        let scaled = larkin_length_uncorrelated(d, lambda, 1.0, kappa);
        let expected = lambda.powf(4.0 / (4.0 - d as f64));
        prop_assert!((scaled / base / expected - 1.0).abs() < 1e-12);
        // m → λm and κ → κ/λ leave L unchanged
        let compensated = larkin_length_uncorrelated(d, 1.0, lambda, kappa / lambda);
        prop_assert!((compensated / base - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_dim_critical_density_reduces(kappa in 0.1f64..10.0, a in 1e-4f64..1.0) {
        let l = larkin_length_uncorrelated(3, 1.0, 1.0, kappa);
        let g = 4.0 * std::f64::consts::PI * a;
        let general = critical_density_uncorrelated(3, 1.0, 1.0, g, l).unwrap();
        let closed = critical_density_three_dim(l, a);
        prop_assert!((general / closed - 1.0).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn critical_density_trend_in_scattering_length(kappa in 0.2f64..5.0, a in 1e-3f64..0.5, grow in 1.01f64..3.0) {
        let n3 = |a: f64| derive_scales(&uncorrelated(3, kappa).with_scattering_length(a)).unwrap().n_c().unwrap();
        prop_assert!(n3(a * grow) < n3(a));
        let n1 = |a: f64| derive_scales(&uncorrelated(1, kappa).with_scattering_length(a)).unwrap().n_c().unwrap();
        prop_assert!(n1(a * grow) > n1(a));
    }

    #[test]
    fn healing_to_larkin_ratio_tracks_density(d in 1usize..=3, kappa in 0.2f64..5.0, g in 0.1f64..5.0) {
        let scales = derive_scales(&uncorrelated(d, kappa).with_coupling(g)).unwrap();
        let n_c = scales.n_c().unwrap();
        let ratio = |n: f64| healing_length(1.0, 1.0, g, n) / scales.larkin_length / (n_c / n).sqrt();
        let r0 = ratio(n_c * 1e-3);
        for n in [1e-2, 0.1, 0.5, 2.0] {
            prop_assert!((ratio(n_c * n) / r0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn luttinger_parameter_is_monotone(g1 in 1e-3f64..1e3, step in 1.001f64..10.0) {
        prop_assert!(luttinger_parameter(g1 * step) > luttinger_parameter(g1));
    }
}

#[test]
fn filled_state_is_ordered_in_density() {
    for d in 1..=3 {
        let scales = derive_scales(&uncorrelated(d, 1.0).with_coupling(1.0)).unwrap();
        let n_c = scales.n_c().unwrap();
        // the spacing R (n_c/n)^{1/d} only falls with n once ln(n_c/n) > d/(4 − d)
        let top = n_c * (-(d as f64 / (4.0 - d as f64)).max(1.0)).exp();
        let states: Vec<_> = (0..=12)
            .map(|k| {
                let n = top * 10f64.powf(-2.0 + 2.0 * k as f64 / 12.0);
                filled_state_uncorrelated(n, &scales, PrefactorMode::Unity).unwrap()
            })
            .collect();
        for w in states.windows(2) {
            assert!(w[1].well_radius > w[0].well_radius, "d = {d}");
            assert!(w[1].spacing < w[0].spacing, "d = {d}");
            assert!(w[1].tunneling > w[0].tunneling, "d = {d}");
            assert!(w[1].chemical_potential > w[0].chemical_potential, "d = {d}");
        }
    }
}

#[test]
fn three_dim_spacing_turns_over_at_log_three() {
    let scales = derive_scales(&uncorrelated(3, 1.0).with_coupling(1.0)).unwrap();
    let n_c = scales.n_c().unwrap();
    let spacing = |u: f64| filled_state_uncorrelated(n_c * (-u).exp(), &scales, PrefactorMode::Unity).unwrap().spacing;
    assert!(spacing(2.9) > spacing(3.0) && spacing(3.1) > spacing(3.0));
}

#[test]
fn luttinger_strong_coupling_limit() {
    assert_relative_eq!(luttinger_parameter(1e9), 1.0, epsilon = 1e-3);
}
