use gthresh_core::bath::{
    correlation_from_spectrum, thermal_ohmic_correlation, CorrelationFunction, Kernel, Mode, SpatialStructure,
    SpectralDensity,
};
use gthresh_core::dephasing::{
    cnot_error_bound, connected_diagrams, flip_probabilities, numeric_dephasing_exponent, ohmic_dephasing_exponent,
};
use gthresh_core::geometry::{LocationSpec, Schedule};
use gthresh_core::oracle::enumerated_pattern_weight;
use gthresh_core::quad::Tolerance;
use gthresh_core::strength::gaussian_strength;
use gthresh_core::threshold::*;
use gthresh_core::Complex64;
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::new(1e-300, 1e-10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn correlation_is_hermitian(t in -20.0f64..20.0, tau in 0.05f64..2.0, beta in 0.2f64..5.0) {
        // Far from t = 0 the transform is a small residue of a large
        // oscillating integrand, so the accuracy is pinned to its peak.
        let ohmic = SpectralDensity::ohmic(1.0, tau).unwrap().with_beta(beta).unwrap();
        let peak = 1.0 / (tau * tau);
        let loose = Tolerance::new(1e-10 * peak, 1e-8);
        let fwd = correlation_from_spectrum(&ohmic, t, loose).unwrap().value;
        let back = correlation_from_spectrum(&ohmic, -t, loose).unwrap().value;
        prop_assert!((fwd - back.conj()).norm() <= 1e-7 * fwd.norm() + 1e-9 * peak);

        let closed = thermal_ohmic_correlation(1.0, tau, beta, t).unwrap();
        let mirrored = thermal_ohmic_correlation(1.0, tau, beta, -t).unwrap();
        prop_assert!((closed - mirrored.conj()).norm() <= 1e-13 * closed.norm());
        prop_assert!((closed - fwd).norm() <= 1e-7 * closed.norm() + 1e-9 * peak);

        let modes = SpectralDensity::modes(vec![Mode::new(0.3, 1.2), Mode::new(0.7, 0.4)]).unwrap()
            .with_beta(beta).unwrap();
        let fwd = correlation_from_spectrum(&modes, t, tol()).unwrap().value;
        let back = correlation_from_spectrum(&modes, -t, tol()).unwrap().value;
        prop_assert!((fwd - back.conj()).norm() <= 1e-13);
    }

    #[test]
    fn equal_time_correlation_is_positive(tau in 0.05f64..2.0, beta in 0.2f64..5.0) {
        let spec = SpectralDensity::ohmic(0.3, tau).unwrap().with_beta(beta).unwrap();
        let d0 = correlation_from_spectrum(&spec, 0.0, tol()).unwrap().value;
        prop_assert!(d0.re >= 0.0);
        prop_assert!(d0.im.abs() < 1e-8 * d0.norm());
    }

    #[test]
    fn strength_scales_linearly(lambda in 0.01f64..50.0, width in 0.1f64..3.0) {
        let schedule = Schedule::uniform(2, 3, 1.0, 1).unwrap();
        let kernel = Kernel::lorentzian(0.2, width).unwrap();
        let corr = CorrelationFunction::new(kernel, SpatialStructure::Uncorrelated);
        let base = gaussian_strength(&schedule, &corr).unwrap();
        let scaled = gaussian_strength(&schedule, &corr.clone().scaled(lambda).unwrap()).unwrap();
        prop_assert!((scaled.integrated - lambda * base.integrated).abs() <= 1e-12 * scaled.integrated);
        prop_assert!((scaled.epsilon - lambda.sqrt() * base.epsilon).abs() <= 1e-12 * scaled.epsilon);
    }

    #[test]
    fn strength_grows_with_duration_and_kernel(extra in 0.0f64..20.0, bump in 1.0f64..3.0) {
        let schedule = Schedule::uniform(1, 2, 1.0, 1).unwrap();
        let longer = schedule.clone().with_total_duration(2.0 + extra).unwrap();
        let corr = CorrelationFunction::new(Kernel::lorentzian(0.1, 0.5).unwrap(), SpatialStructure::Uncorrelated);
        let a = gaussian_strength(&schedule, &corr).unwrap().integrated;
        let b = gaussian_strength(&longer, &corr).unwrap().integrated;
        prop_assert!(b >= a * (1.0 - 1e-12));
        // Pointwise larger |Δ̄|: a wider Lorentzian with proportionally larger area.
        let bigger = CorrelationFunction::new(Kernel::lorentzian(0.1 * bump, 0.5 * bump).unwrap(), SpatialStructure::Uncorrelated);
        let c = gaussian_strength(&schedule, &bigger).unwrap().integrated;
        prop_assert!(c >= a * (1.0 - 1e-12));
    }

    #[test]
    fn accepted_schedules_are_disjoint(
        raw in prop::collection::vec((0usize..4, 0usize..4, 0u32..6), 1..12),
    ) {
        let specs: Vec<LocationSpec> = raw
            .iter()
            .map(|&(a, b, step)| LocationSpec {
                qubits: vec![a, b],
                start: f64::from(step),
                end: f64::from(step) + 1.0,
            })
            .collect();
        if let Ok(s) = Schedule::new(specs, Some(4), None) {
            let locs = s.locations();
            for (i, x) in locs.iter().enumerate() {
                for y in &locs[i + 1..] {
                    let overlap = x.start < y.end && y.start < x.end;
                    let shared = x.qubits.iter().any(|q| y.qubits.contains(q));
                    prop_assert!(!(overlap && shared));
                }
            }
        }
    }

    #[test]
    fn uniform_schedules_cover_each_qubit(nq in 1usize..6, depth in 1usize..8, t0 in 0.1f64..3.0, pair in any::<bool>()) {
        let arity = if pair && nq % 2 == 0 { 2 } else { 1 };
        let s = Schedule::uniform(nq, depth, t0, arity).unwrap();
        for q in 0..nq {
            let mut windows: Vec<(f64, f64)> = s.locations().iter()
                .filter(|l| l.qubits.contains(&q))
                .map(|l| (l.start, l.end))
                .collect();
            windows.sort_by(|a, b| a.0.total_cmp(&b.0));
            prop_assert_eq!(windows[0].0, 0.0);
            for w in windows.windows(2) {
                prop_assert!((w[1].0 - w[0].1).abs() < 1e-12 * t0);
            }
            prop_assert!((windows.last().unwrap().1 - depth as f64 * t0).abs() < 1e-12 * t0);
        }
    }

    #[test]
    fn coefficient_counts_each_pattern_once(f in 0u64..=64, s in 1u64..=64) {
        let c = inclusion_exclusion_coefficient(f, s).unwrap();
        prop_assert_eq!(c, i128::from(f >= s));
    }

    #[test]
    fn log_space_levels_match_direct(ratio in 0.05f64..1.5, threshold in 1e-5f64..1e-1, s in 2u32..4, k in 0u32..5) {
        let eps = ratio * threshold;
        let direct = level_reduce_direct(eps, threshold, s, k);
        if direct > 1e-290 && direct.is_finite() {
            let trace = level_reduce(eps, threshold, s, k).unwrap();
            let logged = trace.per_level[k as usize];
            prop_assert!((logged - direct).abs() <= 1e-11 * direct, "{} vs {}", logged, direct);
        }
    }

    #[test]
    fn fault_bound_dominates_tail(a in 2u64..60, s_frac in 0.0f64..1.0, eps in 0.0f64..0.05) {
        let s = 1 + ((a - 1) as f64 * s_frac) as u64;
        let bound = s_fault_bound(a, s, eps).unwrap();
        let tail = s_fault_tail(a, s, eps).unwrap();
        prop_assert!(tail <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn postselect_and_malignant_solve_their_equations(b in 1u64..1_000_000, c in 0u64..1_000_000, d in 0u64..100_000_000) {
        let eps = malignant_threshold(b, d).unwrap();
        prop_assert!(malignant_residual(b as f64, d as f64, eps) <= THRESHOLD_RESIDUAL);
        let p = postselect_threshold(b, c, d).unwrap();
        prop_assert!(postselect_residual(b as f64, c as f64, d as f64, p.closed_form) <= THRESHOLD_RESIDUAL);
        prop_assert!((p.root - p.closed_form).abs() <= THRESHOLD_RESIDUAL * p.closed_form);
    }

    #[test]
    fn postselect_forms_agree(accept in 0.01f64..1.0, frac in 0.0f64..1.0, n in 1u32..40) {
        let joint = frac * accept;
        let a = postselect_fail(joint, accept, n).unwrap();
        let b = postselect_fail_scenarios(joint, accept, n).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn flip_probability_is_monotone(d1 in 0.0f64..20.0, d2 in 0.0f64..20.0) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (p_lo, _) = flip_probabilities(lo).unwrap();
        let (p_hi, _) = flip_probabilities(hi).unwrap();
        prop_assert!(p_lo <= p_hi && p_hi <= 0.5);
    }

    #[test]
    fn cnot_bound_is_monotone(a in 1e-5f64..1e-3, ratio in 10.0f64..1e4, grow in 1.0f64..3.0) {
        let base = cnot_error_bound(9, a, ratio, 1.0).unwrap().epsilon;
        prop_assert!(cnot_error_bound(9, a * grow, ratio, 1.0).unwrap().epsilon >= base);
        prop_assert!(cnot_error_bound(9, a, ratio * grow, 1.0).unwrap().epsilon >= base);
    }

    #[test]
    fn connected_diagrams_normalize(g in 0.01f64..0.5, w in 0.2f64..3.0, t in 0.1f64..10.0, beta in 0.3f64..5.0) {
        let modes = SpectralDensity::modes(vec![Mode::new(g, w)]).unwrap();
        prop_assert!(connected_diagrams(&modes, t, tol()).unwrap().normalization_defect() < 1e-8);
        let warm = modes.with_beta(beta).unwrap();
        let c = connected_diagrams(&warm, t, tol()).unwrap();
        prop_assert!(c.normalization_defect() < 1e-8);
        prop_assert!((c.upper - c.lower.conj()).norm() < 1e-12);
    }
}

#[test]
fn diagram_bound_holds_on_grid() {
    for i in 1..=50 {
        let e = 0.01 * f64::from(i);
        for r in 1..=10 {
            let b = diagram_bound(e, r).unwrap();
            assert!(b.partial_sum <= b.closed_bound, "E={e} r={r}");
        }
        let (lhs, rhs) = single_location_bound(e).unwrap();
        assert!(lhs <= rhs);
    }
}

#[test]
fn coefficient_matches_enumeration() {
    for f in 0..=12u32 {
        for s in 1..=f.max(1) {
            let formula = inclusion_exclusion_coefficient(u64::from(f), u64::from(s)).unwrap();
            assert_eq!(formula, i128::from(enumerated_pattern_weight(f, s)), "f={f} s={s}");
        }
    }
}

#[test]
fn ohmic_exponent_grows_logarithmically() {
    let a = 1e-3;
    let step =
        |t: f64| ohmic_dephasing_exponent(a, 1.0, 10.0 * t).unwrap() - ohmic_dephasing_exponent(a, 1.0, t).unwrap();
    let target = 2.0 * a * 10f64.ln();
    let gaps: Vec<f64> = [10.0, 100.0, 1e3, 1e4]
        .iter()
        .map(|&t| (step(t) - target).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert!(gaps[3] < 1e-10);

    let spec = SpectralDensity::ohmic(a, 1.0).unwrap();
    let numeric = numeric_dephasing_exponent(&spec, 1e3, Tolerance::new(1e-300, 1e-9)).unwrap()
        - numeric_dephasing_exponent(&spec, 1e2, Tolerance::new(1e-300, 1e-9)).unwrap();
    assert!((numeric - target).abs() < 1e-3 * target);
}

#[test]
fn ohmic_diagrams_normalize() {
    for t in [0.3, 3.0, 30.0] {
        let spec = SpectralDensity::ohmic(1e-2, 1.0).unwrap();
        let c = connected_diagrams(&spec, t, tol()).unwrap();
        assert!(c.normalization_defect() < 1e-8, "{t}");
        let sum: Complex64 = c.upper + c.lower;
        assert!((sum.re + c.exponent).abs() < 1e-6 * c.exponent.max(1e-12));
    }
}

#[test]
fn levels_fixed_point_and_halving() {
    let t = level_reduce(2.5e-4, 2.5e-4, 2, 8).unwrap();
    assert!(t.per_level.iter().all(|&e| e == 2.5e-4));
    let t = level_reduce(0.5e-3, 1e-3, 2, 3).unwrap();
    assert_eq!(t.per_level[3], 1e-3 / 256.0);
}
