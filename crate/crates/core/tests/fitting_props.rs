// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spatnet_core::fitting::{
    class_averages, degree_histogram, fit_degree_scaling, fit_log_decay, fit_normal, fit_powerlaw,
    histogram_points, scaling_by_degree_class,
};
use spatnet_core::{fixtures, Error, ScalingMeasure, SpatialGraph};

#[test]
fn histogram_examples() {
    let star = SpatialGraph::from_pairs(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    assert_eq!(degree_histogram(&star), vec![(1, 4), (4, 1)]);
    let c5 = SpatialGraph::from_pairs(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    assert_eq!(degree_histogram(&c5), vec![(2, 5)]);
    let g = fixtures::synthetic_gcn(0);
    let h = degree_histogram(&g);
    assert!(h.first().unwrap().0 >= 1 && h.last().unwrap().0 <= 7);
    assert_eq!(h.iter().map(|(_, c)| c).sum::<usize>(), 39);
}

#[test]
fn noiseless_families_are_recovered() {
    let pl: Vec<(f64, f64)> = (1..=6)
        .map(|k| (f64::from(k), 5.0 * f64::from(k).powi(-2)))
        .collect();
    let fit = fit_powerlaw(&pl).unwrap();
    assert!((fit.param("beta") + 2.0).abs() < 1e-9);
    assert!((fit.param("a") - 5.0).abs() < 1e-9);
    assert!((fit.r_squared - 1.0).abs() < 1e-9);

    let gauss: Vec<(f64, f64)> = (1..=6)
        .map(|k| {
            let x = f64::from(k);
            (x, 10.0 * (-(x - 3.0).powi(2) / 2.0).exp())
        })
        .collect();
    let fit = fit_normal(&gauss).unwrap();
    for (name, want) in [("amplitude", 10.0), ("mu", 3.0), ("sigma", 1.0)] {
        assert!(
            (fit.param(name) - want).abs() < 1e-6,
            "{name}: {}",
            fit.param(name)
        );
    }
    assert!((fit.r_squared - 1.0).abs() < 1e-9);

    let decay: Vec<(f64, f64)> = (1..=7)
        .map(|k| (f64::from(k), 0.9 - 0.2 * f64::from(k).ln()))
        .collect();
    let fit = fit_log_decay(&decay).unwrap();
    assert!((fit.param("a") - 0.9).abs() < 1e-9 && (fit.param("b") - 0.2).abs() < 1e-9);
}

#[test]
fn fit_preconditions() {
    assert!(matches!(
        fit_powerlaw(&[(1.0, 1.0), (2.0, 2.0)]),
        Err(Error::InsufficientPoints { .. })
    ));
    assert!(matches!(
        fit_powerlaw(&[(1.0, 1.0), (2.0, 0.0), (3.0, 2.0)]),
        Err(Error::NonPositiveValues { .. })
    ));
    assert!(matches!(
        fit_powerlaw(&[(0.0, 1.0), (2.0, 1.0), (3.0, 2.0)]),
        Err(Error::NonPositiveValues { .. })
    ));
    let two_classes = [(1, 1.0), (2, 2.0), (2, 2.5)];
    assert!(matches!(
        fit_degree_scaling(&two_classes, ScalingMeasure::Strength),
        Err(Error::InsufficientClasses { .. })
    ));
}

#[test]
fn constructed_scaling_data() {
    let degrees = [1usize, 1, 2, 2, 2, 3, 3, 4, 5, 6, 6, 7];
    let cb: Vec<(usize, f64)> = degrees.iter().map(|&k| (k, (k * k) as f64)).collect();
    let fit = fit_degree_scaling(&cb, ScalingMeasure::Betweenness).unwrap();
    assert!((fit.fit.param("beta") - 2.0).abs() < 1e-9);
    let s: Vec<(usize, f64)> = degrees.iter().map(|&k| (k, 100.0 * k as f64)).collect();
    let fit = fit_degree_scaling(&s, ScalingMeasure::Strength).unwrap();
    assert!((fit.fit.param("beta") - 1.0).abs() < 1e-9);
    let c: Vec<(usize, f64)> = degrees
        .iter()
        .map(|&k| (k, 0.9 - 0.2 * (k as f64).ln()))
        .collect();
    let fit = fit_degree_scaling(&c, ScalingMeasure::Clustering).unwrap();
    assert!((fit.fit.param("a") - 0.9).abs() < 1e-9 && (fit.fit.param("b") - 0.2).abs() < 1e-9);
}

#[test]
fn zero_betweenness_classes_are_excluded_from_power_laws() {
    let g = fixtures::synthetic_gcn(0);
    let fit = scaling_by_degree_class(&g, ScalingMeasure::Betweenness).unwrap();
    for k in &fit.excluded_degrees {
        let class = fit.classes.iter().find(|c| c.degree == *k).unwrap();
        assert!(class.mean <= 0.0);
    }
    assert_eq!(
        fit.fit.points_used,
        fit.classes.len() - fit.excluded_degrees.len()
    );
    assert!(fit.fit.param("beta") > 1.0);

    // Clustering zeros stay in.
    let fit = scaling_by_degree_class(&g, ScalingMeasure::Clustering).unwrap();
    assert!(fit.excluded_degrees.iter().all(|&k| k == 0));
    assert_eq!(fit.classes.iter().map(|c| c.size).sum::<usize>(), 39);
}

#[test]
fn peaked_histogram_favours_the_normal() {
    let mut wins = 0;
    for seed in 0..20 {
        let g = fixtures::connected_erdos_renyi(39, 0.095, seed);
        let points = histogram_points(&degree_histogram(&g));
        if points.len() < 3 {
            continue;
        }
        let normal = fit_normal(&points).unwrap();
        let powerlaw = fit_powerlaw(&points).unwrap();
        if normal.r_squared > powerlaw.r_squared {
            wins += 1;
        }
    }
    assert!(wins >= 18, "{wins}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noiseless_power_laws_round_trip(a in 0.01f64..100.0, beta in -3.0f64..3.0, scale in 0.01f64..100.0, seed in any::<u64>()) {
        let points: Vec<(f64, f64)> = (1..=8).map(|k| (f64::from(k), a * f64::from(k).powf(beta))).collect();
        let fit = fit_powerlaw(&points).unwrap();
        prop_assert!((fit.param("beta") - beta).abs() < 1e-6);
        prop_assert!((fit.r_squared - 1.0).abs() < 1e-9);
        // Rescaling y moves only the prefactor.
        let rescaled: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y * scale)).collect();
        let fit2 = fit_powerlaw(&rescaled).unwrap();
        prop_assert!((fit2.param("beta") - fit.param("beta")).abs() < 1e-9);
        // Point order does not matter.
        let noisy: Vec<(f64, f64)> = {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            points.iter().map(|&(x, y)| (x, y * rng.random_range(0.7..1.3))).collect()
        };
        let forward = fit_powerlaw(&noisy).unwrap();
        let mut shuffled = noisy.clone();
        shuffled.reverse();
        let backward = fit_powerlaw(&shuffled).unwrap();
        prop_assert!((forward.r_squared - backward.r_squared).abs() < 1e-12);
    }

    #[test]
    fn noiseless_gaussians_round_trip(amp in 0.5f64..50.0, mu in 2.0f64..6.0, sigma in 0.6f64..3.0) {
        let points: Vec<(f64, f64)> = (1..=8).map(|k| {
            let x = f64::from(k);
            (x, amp * (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp())
        }).collect();
        let fit = fit_normal(&points).unwrap();
        prop_assert!((fit.param("mu") - mu).abs() < 1e-6);
        prop_assert!((fit.param("sigma") - sigma).abs() < 1e-6);
        prop_assert!((fit.param("amplitude") - amp).abs() < 1e-6 * amp);
        prop_assert!(fit.r_squared <= 1.0 && (fit.r_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn class_sizes_cover_every_sample(samples in prop::collection::vec((1usize..10, 0.0f64..5.0), 1..60)) {
        let classes = class_averages(&samples);
        prop_assert_eq!(classes.iter().map(|c| c.size).sum::<usize>(), samples.len());
        prop_assert!(classes.windows(2).all(|w| w[0].degree < w[1].degree));
    }
}
