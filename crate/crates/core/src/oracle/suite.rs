//! The oracle suites behind the `verify` command. Each suite compares an
//! analytic result with an independent brute-force computation and records
//! the largest deviation seen.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::enumerated_pattern_weight;
use super::fock::{self, FieldInsertion, FieldTerm, FockWorkspace, GaussianStateSpec, DEFAULT_CUTOFF};
use super::wick::{pairings, wick_moment};
use crate::bath::{self, correlation_from_spectrum, Mode, SpectralDensity};
use crate::combinatorics::pairing_count;
use crate::dephasing::{
    dephasing_exponent, flip_probabilities, numeric_dephasing_exponent, ohmic_dephasing_exponent,
    thermal_ohmic_dephasing_exponent,
};
use crate::quad::Tolerance;
use crate::threshold::inclusion_exclusion_coefficient;
use crate::Result;

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteOutcome {
    fn new(name: &str, cases: usize, max_deviation: f64, tolerance: f64) -> Self {
        SuiteOutcome {
            name: name.into(),
            cases,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

/// Bath couplings used by the moment suites.
pub fn test_modes(count: usize) -> Vec<Mode> {
    let all = [
        Mode {
            coupling: Complex64::new(0.8, 0.0),
            frequency: 1.0,
        },
        Mode {
            coupling: Complex64::new(0.5, 0.3),
            frequency: 1.5,
        },
    ];
    all[..count].to_vec()
}

/// A string of `len` field insertions at spread-out times.
pub fn test_string(modes: &[Mode], len: usize) -> Vec<FieldInsertion> {
    (0..len)
        .map(|i| {
            let time = 0.37 * i as f64 - 0.5;
            FieldInsertion {
                terms: modes
                    .iter()
                    .enumerate()
                    .map(|(k, m)| FieldTerm {
                        mode: k,
                        coupling: m.coupling,
                        frequency: m.frequency,
                    })
                    .collect(),
                time,
            }
        })
        .collect()
}

/// The Gaussian states exercised by the moment suites for `count` bath
/// modes: vacuum, thermal at `βω₀ ∈ {ln 2, 1}` and the two-mode squeezed
/// vacuum at `γ² = 1/2`.
pub fn test_states(count: usize) -> Result<Vec<(String, GaussianStateSpec)>> {
    let freqs: Vec<f64> = test_modes(count).iter().map(|m| m.frequency).collect();
    let w0 = freqs[0];
    Ok(alloc::vec![
        ("vacuum".into(), GaussianStateSpec::vacuum(count)),
        (
            "thermal βω=ln2".into(),
            GaussianStateSpec::thermal(LN_2 / w0, freqs.clone())?
        ),
        ("thermal βω=1".into(), GaussianStateSpec::thermal(1.0 / w0, freqs)?),
        (
            "two-mode squeezed γ²=1/2".into(),
            GaussianStateSpec::two_mode_squeezed(0.5)?
        ),
    ])
}

/// Wick sums of Fock two-point functions against full Fock moments, for
/// strings of 2, 4 and 6 fields. Returns `(cases, max relative deviation)`.
pub fn wick_fock_deviation() -> Result<(usize, f64)> {
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for count in 1..=2 {
        let modes = test_modes(count);
        for (_, state) in test_states(count)? {
            let mut ws = FockWorkspace::new(state.mode_count(), DEFAULT_CUTOFF, false)?;
            for len in [2, 4, 6] {
                let string = test_string(&modes, len);
                let direct = fock::fock_moment(&state, &string, &mut ws)?;
                let two_point = fock::fock_two_point(&state, &string, &mut ws)?;
                let wick = wick_moment(&two_point).value;
                worst = worst.max((wick - direct).norm() / direct.norm());
                cases += 1;
            }
        }
    }
    Ok((cases, worst))
}

/// Largest modulus of odd-length Fock moments.
pub fn odd_moment_magnitude() -> Result<(usize, f64)> {
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for count in 1..=2 {
        let modes = test_modes(count);
        for (_, state) in test_states(count)? {
            let mut ws = FockWorkspace::new(state.mode_count(), DEFAULT_CUTOFF, false)?;
            for len in [1, 3, 5] {
                let v = fock::fock_moment(&state, &test_string(&modes, len), &mut ws)?;
                worst = worst.max(v.norm());
                cases += 1;
            }
        }
    }
    Ok((cases, worst))
}

/// The `(g, ω, ωT)` grid of the dephasing suite.
pub fn dephasing_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::with_capacity(27);
    for g in [0.05, 0.1, 0.2] {
        for w in [0.5, 1.0, 2.0] {
            for theta in [0.5 * PI, PI, 2.0 * PI] {
                grid.push((g, w, theta / w));
            }
        }
    }
    grid
}

/// Exact single-mode simulation against `e^{-D} sinh D`.
pub fn dephasing_deviation() -> Result<(usize, f64)> {
    let tol = Tolerance::default();
    let mut worst: f64 = 0.0;
    let grid = dephasing_grid();
    for &(g, w, t) in &grid {
        let modes = [Mode::new(g, w)];
        let mut ws = FockWorkspace::new(1, DEFAULT_CUTOFF, true)?;
        let simulated = fock::simulate_dephasing(&modes, None, t, &mut ws)?;
        let spec = SpectralDensity::modes(modes.to_vec())?;
        let (p_bad, _) = flip_probabilities(dephasing_exponent(&spec, t, tol)?)?;
        worst = worst.max((simulated - p_bad).abs());
    }
    Ok((grid.len(), worst))
}

/// Thermal dephasing against the finite-temperature exponent: one bath
/// mode at two temperatures and two bath modes at a low temperature.
pub fn thermal_dephasing_deviation() -> Result<(usize, f64)> {
    let tol = Tolerance::default();
    let one = [Mode::new(0.15, 1.0)];
    let two = [Mode::new(0.15, 1.0), Mode::new(0.1, 2.0)];
    let cases: [(&[Mode], f64, f64); 3] = [(&one, 2.0, 1.3), (&one, 1.0, 2.9), (&two, 6.0, 1.3)];
    let mut worst: f64 = 0.0;
    for &(modes, beta, t) in &cases {
        let mut ws = FockWorkspace::new(2 * modes.len(), DEFAULT_CUTOFF, true)?;
        let simulated = fock::simulate_dephasing(modes, Some(beta), t, &mut ws)?;
        let spec = SpectralDensity::modes(modes.to_vec())?.with_beta(beta)?;
        let (p_bad, _) = flip_probabilities(dephasing_exponent(&spec, t, tol)?)?;
        worst = worst.max((simulated - p_bad).abs());
    }
    Ok((cases.len(), worst))
}

/// Discrete-mode correlation formula against Fock two-point functions in
/// the thermal purification.
pub fn thermal_correlation_deviation() -> Result<(usize, f64)> {
    let modes = test_modes(2);
    let beta = 0.8;
    let state = GaussianStateSpec::thermal(beta, modes.iter().map(|m| m.frequency).collect())?;
    let mut ws = FockWorkspace::new(state.mode_count(), DEFAULT_CUTOFF, false)?;
    let spec = SpectralDensity::modes(modes.clone())?.with_beta(beta)?;
    let mut worst: f64 = 0.0;
    let times = [-1.7, 0.0, 0.4, 2.5];
    for &t in &times {
        let string = [
            FieldInsertion::from_modes(&modes, t),
            FieldInsertion::from_modes(&modes, 0.0),
        ];
        let fock = fock::fock_two_point(&state, &string, &mut ws)?.get(0, 1);
        let formula = correlation_from_spectrum(&spec, t, Tolerance::default())?.value;
        worst = worst.max((fock - formula).norm() / formula.norm());
    }
    Ok((times.len(), worst))
}

/// Numeric Fourier transform of the Ohmic spectrum against the closed form
/// on `t/τ_c ∈ {0, 0.1, 1, 10, 100}`.
pub fn ohmic_transform_deviation() -> Result<(usize, f64)> {
    let (amp, tau) = (1.0, 1.0);
    let spec = SpectralDensity::ohmic(amp, tau)?;
    let tol = Tolerance::new(1e-300, 1e-8);
    let ratios = [0.0, 0.1, 1.0, 10.0, 100.0];
    let mut worst: f64 = 0.0;
    for r in ratios {
        let numeric = correlation_from_spectrum(&spec, r * tau, tol)?.value;
        let closed = bath::ohmic_correlation(amp, tau, r * tau)?;
        worst = worst.max((numeric - closed).norm() / closed.norm());
    }
    Ok((ratios.len(), worst))
}

/// Numeric Fourier transform of the thermal Ohmic spectrum against the
/// trigamma closed form.
pub fn thermal_ohmic_transform_deviation() -> Result<(usize, f64)> {
    let (amp, tau) = (1.0, 1.0);
    let tol = Tolerance::new(1e-300, 1e-8);
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for beta in [0.5, 5.0] {
        let spec = SpectralDensity::ohmic(amp, tau)?.with_beta(beta)?;
        for r in [0.0, 0.1, 1.0, 10.0] {
            let numeric = correlation_from_spectrum(&spec, r * tau, tol)?.value;
            let closed = bath::thermal_ohmic_correlation(amp, tau, beta, r * tau)?;
            worst = worst.max((numeric - closed).norm() / closed.norm());
            cases += 1;
        }
    }
    Ok((cases, worst))
}

/// Numeric Ohmic dephasing exponent against the closed forms, at zero
/// temperature and at two finite temperatures.
pub fn ohmic_dephasing_deviation() -> Result<(usize, f64)> {
    let tol = Tolerance::new(1e-300, 1e-8);
    let times = [0.3, 1.0, 10.0, 100.0];
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for beta in [None, Some(0.5), Some(5.0)] {
        let mut spec = SpectralDensity::ohmic(1e-3, 1.0)?;
        if let Some(b) = beta {
            spec = spec.with_beta(b)?;
        }
        for t in times {
            let numeric = numeric_dephasing_exponent(&spec, t, tol)?;
            let closed = match beta {
                None => ohmic_dephasing_exponent(1e-3, 1.0, t)?,
                Some(b) => thermal_ohmic_dephasing_exponent(1e-3, 1.0, b, t)?,
            };
            worst = worst.max((numeric - closed).abs() / closed);
            cases += 1;
        }
    }
    Ok((cases, worst))
}

/// Alternating-sum coefficients against subset enumeration, `f ≤ 12`.
/// Returns `(cases, mismatches)`.
pub fn inclusion_exclusion_mismatches() -> Result<(usize, usize)> {
    let mut cases = 0;
    let mut bad = 0;
    for f in 0..=12u32 {
        for s in 1..=f.max(1) {
            let formula = inclusion_exclusion_coefficient(u64::from(f), u64::from(s))?;
            let counted = enumerated_pattern_weight(f, s);
            let expected = i64::from(f >= s);
            if formula != i128::from(counted) || counted != expected {
                bad += 1;
            }
            cases += 1;
        }
    }
    Ok((cases, bad))
}

/// Pairing counts against explicit enumeration up to 12 labels.
pub fn pairing_mismatches() -> (usize, usize) {
    let mut bad = 0;
    for n in 0..=6u32 {
        let listed = pairings(2 * n as usize).len() as u128;
        if Some(listed) != pairing_count(n) {
            bad += 1;
        }
    }
    (7, bad)
}

/// Runs every suite.
pub fn run_verification() -> Result<VerifyReport> {
    let mut suites = Vec::new();

    let (cases, bad) = pairing_mismatches();
    suites.push(SuiteOutcome::new(
        "pairing count vs enumeration",
        cases,
        bad as f64,
        0.0,
    ));

    let (cases, bad) = inclusion_exclusion_mismatches()?;
    suites.push(SuiteOutcome::new(
        "inclusion-exclusion vs subset enumeration",
        cases,
        bad as f64,
        0.0,
    ));

    let (cases, dev) = ohmic_transform_deviation()?;
    suites.push(SuiteOutcome::new(
        "Ohmic Fourier transform vs closed form",
        cases,
        dev,
        1e-6,
    ));

    let (cases, dev) = thermal_ohmic_transform_deviation()?;
    suites.push(SuiteOutcome::new(
        "thermal Ohmic transform vs closed form",
        cases,
        dev,
        1e-6,
    ));

    let (cases, dev) = ohmic_dephasing_deviation()?;
    suites.push(SuiteOutcome::new(
        "Ohmic dephasing exponent vs closed forms",
        cases,
        dev,
        1e-6,
    ));

    let (cases, dev) = thermal_correlation_deviation()?;
    suites.push(SuiteOutcome::new("thermal mode correlation vs Fock", cases, dev, 1e-8));

    let (cases, dev) = wick_fock_deviation()?;
    suites.push(SuiteOutcome::new("Wick sum vs Fock moment", cases, dev, 1e-8));

    let (cases, dev) = odd_moment_magnitude()?;
    suites.push(SuiteOutcome::new("odd Fock moments vanish", cases, dev, 1e-10));

    let (cases, dev) = dephasing_deviation()?;
    suites.push(SuiteOutcome::new(
        "dephasing simulation vs flip probability",
        cases,
        dev,
        1e-6,
    ));

    let (cases, dev) = thermal_dephasing_deviation()?;
    suites.push(SuiteOutcome::new("thermal dephasing simulation", cases, dev, 1e-6));

    Ok(VerifyReport { suites })
}
