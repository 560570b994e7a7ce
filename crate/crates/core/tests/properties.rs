use std::f64::consts::PI;

use proptest::prelude::*;
use wellfractal::fractal_dim::{
    box_count, fit_dimension_shift, fit_dimension_variation, oscillation_profile, shift_lower_functional, variation,
    variation_brute_force, DeltaLadder, SampledGraph,
};
use wellfractal::quantum_state::{
    fundamental_period_angle, mean_velocity, mean_velocity_bound, prob_density, prob_density_grouped, spectrum,
    StateParams,
};
use wellfractal::Angle;

fn state() -> impl Strategy<Value = StateParams> {
    (2u64..=5, 0.05f64..1.95, 1u32..=8).prop_map(|(q, s, m)| StateParams::new(q, s, m).unwrap())
}

fn rough_graph() -> impl Strategy<Value = SampledGraph> {
    prop::collection::vec(-10.0f64..10.0, 64..400).prop_map(|ys| SampledGraph::from_uniform(0.0, 1.0, ys).unwrap())
}

/// Trapezoid rule; exact on `[0, π]` for sine products of degree below the node count.
fn integrate_density(p: &StateParams, t: &Angle) -> f64 {
    let k = 4 * p.mode(p.m()) as usize;
    let h = PI / k as f64;
    (1..k)
        .map(|j| prob_density(p, &Angle::pi_ratio(j as i64, k as u64).unwrap(), t).unwrap())
        .sum::<f64>()
        * h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_integrates_to_one(p in state(), t in 0.0f64..10.0) {
        let total = integrate_density(&p, &Angle::radians(t).unwrap());
        prop_assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn grouped_form_matches_modulus(p in state(), x in 0.0f64..PI, t in -5.0f64..5.0) {
        let (x, t) = (Angle::radians(x).unwrap(), Angle::radians(t).unwrap());
        let a = prob_density(&p, &x, &t).unwrap();
        let b = prob_density_grouped(&p, &x, &t).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn density_is_periodic_in_time(p in state(), a in 0i64..1000, t in 0.0f64..3.0) {
        let x = Angle::pi_ratio(a, 1000).unwrap();
        let t = Angle::radians(t).unwrap();
        let later = t.add(&fundamental_period_angle(p.q()));
        let d = prob_density(&p, &x, &t).unwrap() - prob_density(&p, &x, &later).unwrap();
        prop_assert!(d.abs() < 1e-9);
    }

    #[test]
    fn spectrum_is_divisible(p in state()) {
        let g = (p.q() * p.q() - 1) as u128;
        for line in spectrum(&p).unwrap() {
            prop_assert_eq!(line.omega % g, 0);
        }
    }

    #[test]
    fn velocity_respects_bound(p in state(), t in 0.0f64..4.0) {
        let v = mean_velocity(&p, &Angle::radians(t).unwrap()).unwrap();
        prop_assert!(v.abs() <= mean_velocity_bound(&p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn exact_and_extended_phases_agree(num in -500i64..500, den in 1u64..500, q in 2u64..=5, n in 0u32..12) {
        let exact = Angle::pi_ratio(num, den).unwrap();
        let ext = exact.to_extended();
        let k = (q as u128).pow(n);
        let (s0, c0) = exact.sin_cos_multiple(k);
        let (s1, c1) = ext.sin_cos_multiple(k);
        prop_assert!((s0 - s1).abs() < 1e-12 && (c0 - c1).abs() < 1e-12);
    }

    #[test]
    fn deque_variation_matches_brute_force(g in rough_graph(), w in 1usize..20) {
        let delta = w as f64 * g.spacing();
        prop_assert_eq!(variation(&g, delta).unwrap(), variation_brute_force(&g, delta).unwrap());
    }

    #[test]
    fn oscillation_grows_with_window(g in rough_graph(), w in 1usize..10) {
        let h = g.spacing();
        let small = oscillation_profile(&g, w as f64 * h).unwrap();
        let large = oscillation_profile(&g, (w + 3) as f64 * h).unwrap();
        prop_assert!(small.iter().zip(&large).all(|(a, b)| a <= b));
        prop_assert!(variation(&g, w as f64 * h).unwrap() <= variation(&g, (w + 3) as f64 * h).unwrap());
    }

    #[test]
    fn functionals_scale_linearly(g in rough_graph(), lambda in 0.01f64..100.0, w in 2usize..10) {
        let delta = w as f64 * g.spacing();
        let scaled = g.map(|y| lambda * y).unwrap();
        let v = variation(&g, delta).unwrap();
        let vs = variation(&scaled, delta).unwrap();
        prop_assert!((vs - lambda * v).abs() <= 1e-12 * vs.abs().max(1.0));
        let sh = shift_lower_functional(&g, delta).unwrap();
        let shs = shift_lower_functional(&scaled, delta).unwrap();
        prop_assert!((shs - lambda * sh).abs() <= 1e-12 * shs.abs().max(1.0));
    }

    #[test]
    fn translation_leaves_variation(g in rough_graph(), c in -50.0f64..50.0, w in 1usize..10) {
        let delta = w as f64 * g.spacing();
        let moved = g.map(|y| y + c).unwrap();
        let a = variation(&g, delta).unwrap();
        let b = variation(&moved, delta).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0) * (1.0 + c.abs()));
    }

    #[test]
    fn shift_never_exceeds_double_window_variation(g in rough_graph(), w in 1usize..10) {
        let delta = w as f64 * g.spacing();
        let sh = shift_lower_functional(&g, delta).unwrap();
        prop_assert!(sh <= variation(&g, 2.0 * delta).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn box_count_covers_every_column(g in rough_graph(), w in 2usize..10) {
        let delta = w as f64 * g.spacing();
        let columns = ((g.b() - g.a()) / delta).ceil() as u64;
        prop_assert!(box_count(&g, delta).unwrap() >= columns);
    }
}

fn weierstrass_like(seed: u64, samples: usize) -> SampledGraph {
    let phase = seed as f64 * 0.37;
    let ys = (0..=samples)
        .map(|j| {
            let x = j as f64 / samples as f64;
            (0..14)
                .map(|n| 0.6f64.powi(n) * (3f64.powi(n) * PI * x + phase).cos())
                .sum()
        })
        .collect();
    SampledGraph::from_uniform(0.0, 1.0, ys).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fitted_dimensions_are_scale_and_shift_invariant(seed in 0u64..100, lambda in 0.01f64..100.0, c in -5.0f64..5.0) {
        let g = weierstrass_like(seed, 1 << 14);
        let ladder = DeltaLadder::new(2.0, 3, 10).unwrap();
        let var_fit = fit_dimension_variation(&g, &ladder).unwrap();
        let base = var_fit.dimension;
        let scaled = fit_dimension_variation(&g.map(|y| lambda * y).unwrap(), &ladder).unwrap().dimension;
        prop_assert!((base - scaled).abs() < 1e-9);
        let shifted = fit_dimension_variation(&g.map(|y| y + c).unwrap(), &ladder).unwrap().dimension;
        prop_assert!((base - shifted).abs() < 1e-9);
        let shift_fit = fit_dimension_shift(&g, &ladder).unwrap();
        let sh_scaled = fit_dimension_shift(&g.map(|y| lambda * y).unwrap(), &ladder).unwrap().dimension;
        prop_assert!((shift_fit.dimension - sh_scaled).abs() < 1e-9);
        // compared as fitted exponents
        prop_assert!(shift_fit.slope <= var_fit.slope + 0.05);
        prop_assert!(base <= 2.05);
    }

    #[test]
    fn lipschitz_graphs_fit_dimension_one(a in 0.5f64..3.0, b in 0.0f64..6.0) {
        let ys = (0..=(1 << 14)).map(|j| {
            let x = j as f64 / (1 << 14) as f64;
            a * (b * x).sin() + x * x
        }).collect();
        let g = SampledGraph::from_uniform(0.0, 1.0, ys).unwrap();
        let d = fit_dimension_variation(&g, &DeltaLadder::new(2.0, 3, 10).unwrap()).unwrap().dimension;
        prop_assert!((0.95..=1.05).contains(&d), "{d}");
    }
}
