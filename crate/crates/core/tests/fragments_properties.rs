use dirty_bosons::fragments::{detect_fragments, fragment_labels, wkb_tunneling, ThresholdPolicy};
use dirty_bosons::{Field, Grid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sum of Gaussian bumps with random centres, widths and heights.
fn landscape(grid: &Grid, seed: u64, bumps: usize) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.dimension();
    let params: Vec<(Vec<f64>, f64, f64)> = (0..bumps)
        .map(|_| {
            let c = (0..d).map(|a| rng.random::<f64>() * grid.extent(a)).collect();
            (c, 0.3 + rng.random::<f64>(), 0.2 + rng.random::<f64>())
        })
        .collect();
    Field::from_fn(grid, |x| {
        params
            .iter()
            .map(|(c, w, h)| {
                let r2: f64 = (0..d).map(|a| grid.min_image(a, x[a] - c[a]).powi(2)).sum();
                h * (-r2 / (2.0 * w * w)).exp()
            })
            .sum()
    })
}

fn grid(two_dim: bool) -> Grid {
    if two_dim {
        Grid::cubic(2, 40, 0.25).unwrap()
    } else {
        Grid::cubic(1, 256, 0.125).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mass_is_accounted(seed in any::<u64>(), two_dim in any::<bool>(), eps in 0.01f64..0.9) {
        let g = grid(two_dim);
        let rho = landscape(&g, seed, 6);
        let r = detect_fragments(&rho, ThresholdPolicy::Relative(eps)).unwrap();
        prop_assert!((r.captured_mass() + r.below_threshold_mass - r.total_mass).abs() <= 1e-8 * r.total_mass);
        prop_assert!(r.captured_mass() <= r.total_mass * (1.0 + 1e-12));
        prop_assert_eq!(r.spacing.is_none(), r.len() < 2);
        let half_diagonal = g.half_diagonal();
        for f in &r.fragments {
            prop_assert!(f.particle_count > 0.0 && f.rms_radius <= half_diagonal);
        }
    }

    #[test]
    fn shifting_the_field_moves_only_the_centroids(seed in any::<u64>(), two_dim in any::<bool>(), s0 in 0isize..64, s1 in 0isize..64) {
        let g = grid(two_dim);
        let rho = landscape(&g, seed, 5);
        let offset: Vec<isize> = if two_dim { vec![s0, s1] } else { vec![s0] };
        let moved = rho.shifted(&offset);
        let a = detect_fragments(&rho, ThresholdPolicy::Relative(0.1)).unwrap();
        let b = detect_fragments(&moved, ThresholdPolicy::Relative(0.1)).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (fa, fb) in a.fragments.iter().zip(&b.fragments) {
            prop_assert!((fa.particle_count / fb.particle_count - 1.0).abs() < 1e-9);
            prop_assert!((fa.rms_radius - fb.rms_radius).abs() < 1e-9);
            prop_assert_eq!(fa.cells, fb.cells);
            prop_assert_eq!(fa.percolating, fb.percolating);
            for axis in 0..g.dimension() {
                let expected = fa.centroid[axis] + offset[axis] as f64 * g.spacing[axis];
                prop_assert!(g.min_image(axis, fb.centroid[axis] - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn raising_the_threshold_only_splits_or_removes(seed in any::<u64>(), two_dim in any::<bool>(), lo in 0.05f64..0.5, gap in 0.01f64..0.4) {
        let g = grid(two_dim);
        let rho = landscape(&g, seed, 8);
        let peak = rho.max();
        let coarse = fragment_labels(&rho, lo * peak).unwrap();
        let fine = fragment_labels(&rho, (lo + gap) * peak).unwrap();
        // every fragment at the higher level sits inside exactly one fragment at the lower level
        let mut parent = std::collections::HashMap::new();
        for (f, c) in fine.iter().zip(&coarse) {
            if let Some(f) = f {
                prop_assert!(c.is_some());
                let entry = parent.entry(*f).or_insert(*c);
                prop_assert_eq!(*entry, *c);
            }
        }
    }

    #[test]
    fn tunneling_is_symmetric(seed in any::<u64>(), two_dim in any::<bool>(), mu in -0.5f64..1.0) {
        let g = grid(two_dim);
        let u = landscape(&g, seed, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let a: Vec<f64> = (0..g.dimension()).map(|ax| rng.random::<f64>() * g.extent(ax)).collect();
        let b: Vec<f64> = (0..g.dimension()).map(|ax| rng.random::<f64>() * g.extent(ax)).collect();
        let t_ab = wkb_tunneling(&u, mu, &a, &b, 1.0, 1.0);
        let t_ba = wkb_tunneling(&u, mu, &b, &a, 1.0, 1.0);
        prop_assert_eq!(t_ab, t_ba);
        prop_assert!(t_ab > 0.0 && t_ab <= 1.0);
    }
}

#[test]
fn scale_of_the_semiclassical_estimate() {
    // a barrier with |p| = ħ/R over a forbidden length d gives log t = −d/R
    let g = Grid::cubic(1, 400, 0.05).unwrap();
    let r = 0.5;
    let height = 1.0 / (2.0 * r * r);
    let u = Field::from_fn(&g, |x| if (5.0..=13.0).contains(&x[0]) { height } else { 0.0 });
    let t = wkb_tunneling(&u, 0.0, &[6.0], &[12.0], 1.0, 1.0);
    assert!((t.ln() + 6.0 / r).abs() < 1e-9);
}
