use gthresh_core::oracle::suite;

#[test]
fn wick_sum_matches_fock_moments() {
    let (cases, dev) = suite::wick_fock_deviation().unwrap();
    assert_eq!(cases, 24);
    assert!(dev < 1e-8, "max relative deviation {dev:e}");
}

#[test]
fn odd_fock_moments_vanish() {
    let (_, dev) = suite::odd_moment_magnitude().unwrap();
    assert!(dev < 1e-10, "{dev:e}");
}

#[test]
fn dephasing_simulation_matches_flip_probability() {
    let (cases, dev) = suite::dephasing_deviation().unwrap();
    assert_eq!(cases, 27);
    assert!(dev < 1e-6, "{dev:e}");
}

#[test]
fn thermal_dephasing_simulation_matches() {
    let (_, dev) = suite::thermal_dephasing_deviation().unwrap();
    assert!(dev < 1e-6, "{dev:e}");
}

#[test]
fn thermal_mode_correlation_matches_fock() {
    let (_, dev) = suite::thermal_correlation_deviation().unwrap();
    assert!(dev < 1e-8, "{dev:e}");
}

#[test]
fn ohmic_transforms_match_closed_forms() {
    let (_, dev) = suite::ohmic_transform_deviation().unwrap();
    assert!(dev < 1e-6, "{dev:e}");
    let (_, dev) = suite::thermal_ohmic_transform_deviation().unwrap();
    assert!(dev < 1e-6, "{dev:e}");
    let (cases, dev) = suite::ohmic_dephasing_deviation().unwrap();
    assert_eq!(cases, 12);
    assert!(dev < 1e-6, "{dev:e}");
}

#[test]
fn combinatoric_enumerations_agree() {
    assert_eq!(suite::pairing_mismatches().1, 0);
    assert_eq!(suite::inclusion_exclusion_mismatches().unwrap().1, 0);
}

#[test]
fn cutoff_convergence_is_monotone() {
    use gthresh_core::oracle::{fock_moment_fixed, FockWorkspace, GaussianStateSpec};
    let modes = suite::test_modes(1);
    let string = suite::test_string(&modes, 4);
    let state = GaussianStateSpec::thermal(std::f64::consts::LN_2, vec![1.0]).unwrap();
    let at = |c: usize| {
        let mut ws = FockWorkspace::new(2, c, false).unwrap();
        fock_moment_fixed(&state, &string, &mut ws).unwrap()
    };
    let values: Vec<_> = (8..=40).step_by(2).map(at).collect();
    for w in values.windows(3) {
        let (before, after) = ((w[1] - w[0]).norm(), (w[2] - w[1]).norm());
        assert!(after < before || after < 1e-13, "{before:e} -> {after:e}");
    }
}
