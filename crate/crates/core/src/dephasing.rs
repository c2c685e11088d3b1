//! Pure dephasing of a qubit coupled through `σ_z` to a Gaussian bath.
//!
//! A qubit prepared in `|+⟩` and measured in the `σ_x` basis after time `T`
//! flips with probability `P_bad = e^{-D} sinh D`, where
//!
//! ```text
//! D(T) = ∫ dω/2π Δ̃(ω) · 4 sin²(ωT/2) / ω².
//! ```
//!
//! For Ohmic noise `D = A ln(1 + T²/τ_c²)`. The repetition-code CNOT gadget
//! of length `n` then fails with probability at most
//! `4·C(n,(n+1)/2)·D^{(n+1)/2}`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::bath::{Mode, SpectralDensity, SpectrumKind};
use crate::combinatorics::binomial;
use crate::quad::{self, Tolerance};
use crate::special;
use crate::{Error, Result};

/// Flip statistics after an elapsed time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingResult {
    pub exponent: f64,
    pub p_bad: f64,
    pub p_good: f64,
    pub elapsed: f64,
}

/// `4 sin²(ωT/2)/ω²`, equal to `T²` at `ω = 0`.
pub fn dephasing_kernel(omega: f64, elapsed: f64) -> f64 {
    let x = 0.5 * omega * elapsed;
    if x.abs() < 1e-4 {
        elapsed * elapsed * (1.0 - x * x / 3.0)
    } else {
        let s = 2.0 * x.sin() / omega;
        s * s
    }
}

/// `∫_0^T (T-u) e^{-iωu} du = (1 - iωT - e^{-iωT})/ω²`.
pub fn ordered_kernel(omega: f64, elapsed: f64) -> Complex64 {
    let x = omega * elapsed;
    if x.abs() < 1e-2 {
        // Σ_k (-iω)^k T^{k+2} / (k! (k+1)(k+2))
        let z = Complex64::new(0.0, -omega);
        let mut power = Complex64::new(elapsed * elapsed, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut fact = 1.0;
        for k in 0..12 {
            let kf = k as f64;
            if k > 0 {
                fact *= kf;
                power *= z * elapsed;
            }
            acc += power / (fact * (kf + 1.0) * (kf + 2.0));
        }
        acc
    } else {
        let phase = Complex64::new(0.0, -x).exp();
        (Complex64::new(1.0, -x) - phase) / (omega * omega)
    }
}

fn check_elapsed(elapsed: f64) -> Result<()> {
    if elapsed >= 0.0 && elapsed.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("elapsed time must be finite and non-negative"))
    }
}

/// `coth(βω/2)`, or 1 at zero temperature.
fn occupation_factor(beta: Option<f64>, omega: f64) -> f64 {
    match beta {
        Some(b) => 1.0 / (0.5 * b * omega).tanh(),
        None => 1.0,
    }
}

/// Closed-form Ohmic exponent `A ln(1 + T²/τ_c²)`.
pub fn ohmic_dephasing_exponent(amplitude: f64, cutoff_time: f64, elapsed: f64) -> Result<f64> {
    check_elapsed(elapsed)?;
    if !(cutoff_time > 0.0) {
        return Err(Error::Domain("cutoff time must be positive"));
    }
    let r = elapsed / cutoff_time;
    Ok(amplitude * (r * r).ln_1p())
}

/// Closed-form thermal Ohmic exponent
/// `A[ln(1 + T²/τ_c²) + 2Σ_{k≥1} ln(1 + T²/(τ_c + kβ)²)]`, with the sum
/// collapsed to `-4 Re ln[Γ(1 + (τ_c + iT)/β)/Γ(1 + τ_c/β)]`.
pub fn thermal_ohmic_dephasing_exponent(amplitude: f64, cutoff_time: f64, beta: f64, elapsed: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain("inverse temperature must be positive"));
    }
    let ground = ohmic_dephasing_exponent(amplitude, cutoff_time, elapsed)?;
    let thermal = -4.0 * special::ln_gamma_ratio_re(1.0 + cutoff_time / beta, elapsed / beta);
    Ok(ground + amplitude * thermal)
}

fn modes_exponent(modes: &[Mode], beta: Option<f64>, elapsed: f64) -> f64 {
    modes
        .iter()
        .map(|m| m.coupling.norm_sqr() * occupation_factor(beta, m.frequency) * dephasing_kernel(m.frequency, elapsed))
        .sum()
}

/// Breakpoints over the support of a continuous spectrum, refined to half
/// periods of `e^{iωT}`.
fn spectral_breakpoints(spec: &SpectralDensity, elapsed: f64) -> Vec<f64> {
    let support = spec.support();
    let mut pts: Vec<f64> = Vec::new();
    for w in support.windows(2) {
        let seg = quad::oscillation_breakpoints(w[0], w[1], elapsed, 4);
        if !pts.is_empty() {
            pts.pop();
        }
        pts.extend(seg);
    }
    pts
}

/// `∫ dω/2π Δ̃(ω) f(ω)` over a continuous spectrum.
fn spectral_integral<F>(spec: &SpectralDensity, elapsed: f64, tol: Tolerance, mut f: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    let pts = spectral_breakpoints(spec, elapsed);
    let est = quad::integrate_over(|w| f(w) * spec.density(w).unwrap_or(0.0), &pts, tol)?;
    Ok(est.value / (2.0 * PI))
}

/// The dephasing exponent `D(T)`. Ohmic baths and discrete modes use closed
/// forms; other spectra go through [`numeric_dephasing_exponent`].
pub fn dephasing_exponent(spec: &SpectralDensity, elapsed: f64, tol: Tolerance) -> Result<f64> {
    check_elapsed(elapsed)?;
    match (spec.kind(), spec.beta()) {
        (SpectrumKind::Ohmic { amplitude, cutoff_time }, None) => {
            ohmic_dephasing_exponent(*amplitude, *cutoff_time, elapsed)
        }
        (SpectrumKind::Ohmic { amplitude, cutoff_time }, Some(beta)) => {
            thermal_ohmic_dephasing_exponent(*amplitude, *cutoff_time, beta, elapsed)
        }
        _ => numeric_dephasing_exponent(spec, elapsed, tol),
    }
}

/// `D(T)` by quadrature over the spectrum (exact sums for discrete modes).
pub fn numeric_dephasing_exponent(spec: &SpectralDensity, elapsed: f64, tol: Tolerance) -> Result<f64> {
    check_elapsed(elapsed)?;
    if elapsed == 0.0 {
        return Ok(0.0);
    }
    match spec.kind() {
        SpectrumKind::Modes(m) => Ok(modes_exponent(m, spec.beta(), elapsed)),
        _ => {
            let v = spectral_integral(spec, elapsed, tol, |w| {
                Complex64::new(dephasing_kernel(w, elapsed), 0.0)
            })?;
            Ok(v.re.max(0.0))
        }
    }
}

/// `(P_bad, P_good) = (e^{-D} sinh D, e^{-D} cosh D)`.
pub fn flip_probabilities(exponent: f64) -> Result<(f64, f64)> {
    if !(exponent >= 0.0) {
        return Err(Error::Domain("dephasing exponent must be non-negative"));
    }
    let p_bad = -0.5 * (-2.0 * exponent).exp_m1();
    Ok((p_bad, 1.0 - p_bad))
}

/// Exponent and flip probabilities at elapsed time `T`.
pub fn dephasing(spec: &SpectralDensity, elapsed: f64, tol: Tolerance) -> Result<DephasingResult> {
    let exponent = dephasing_exponent(spec, elapsed, tol)?;
    let (p_bad, p_good) = flip_probabilities(exponent)?;
    Ok(DephasingResult {
        exponent,
        p_bad,
        p_good,
        elapsed,
    })
}

/// Failure bound of the length-`n` repetition-code CNOT gadget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnotBound {
    pub n: u32,
    /// `D = 2A ln((3n+2)t₀/τ_c)`, the per-qubit bound on `P_bad`.
    pub exponent: f64,
    pub epsilon: f64,
    /// `D < 1`; outside this regime the bound is vacuous.
    pub meaningful: bool,
}

/// `4·C(n,(n+1)/2)·D^{(n+1)/2}` for a given per-qubit exponent `D`.
pub fn cnot_error_from_exponent(n: u32, exponent: f64) -> Result<f64> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Domain("repetition length must be odd and at least 3"));
    }
    if !(exponent >= 0.0) {
        return Err(Error::Domain("dephasing exponent must be non-negative"));
    }
    let majority = n.div_ceil(2);
    Ok(4.0 * binomial(u64::from(n), u64::from(majority)) * exponent.powi(majority as i32))
}

/// CNOT gadget bound for Ohmic noise. Each qubit is exposed for at most
/// `(3n+2)t₀`, where `D ≤ 2A ln((3n+2)t₀/τ_c)`.
pub fn cnot_error_bound(n: u32, amplitude: f64, t0: f64, cutoff_time: f64) -> Result<CnotBound> {
    if !(amplitude >= 0.0) || !(t0 > 0.0) || !(cutoff_time > 0.0) {
        return Err(Error::Domain("need A ≥ 0 and positive t₀, τ_c"));
    }
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Domain("repetition length must be odd and at least 3"));
    }
    let exposure = f64::from(3 * n + 2) * t0 / cutoff_time;
    let exponent = (2.0 * amplitude * exposure.ln()).max(0.0);
    let epsilon = cnot_error_from_exponent(n, exponent)?;
    Ok(CnotBound {
        n,
        exponent,
        epsilon,
        meaningful: exponent < 1.0,
    })
}

/// The three connected diagrams of the flip amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectedDiagrams {
    /// `-∫∫_{t>s} Δ(t-s)` on one branch.
    pub upper: Complex64,
    /// `-∫∫_{t<s} Δ(t-s)` on the other.
    pub lower: Complex64,
    /// The cross-branch diagram `D`.
    pub exponent: f64,
}

impl ConnectedDiagrams {
    /// `|C_U + C_L + D|`, zero for a normalized state.
    pub fn normalization_defect(&self) -> f64 {
        (self.upper + self.lower + self.exponent).norm()
    }
}

/// `C_U`, `C_L` and `D` over an interval of length `T`.
pub fn connected_diagrams(spec: &SpectralDensity, elapsed: f64, tol: Tolerance) -> Result<ConnectedDiagrams> {
    check_elapsed(elapsed)?;
    let exponent = dephasing_exponent(spec, elapsed, tol)?;
    let zero = Complex64::new(0.0, 0.0);
    if elapsed == 0.0 {
        return Ok(ConnectedDiagrams {
            upper: zero,
            lower: zero,
            exponent,
        });
    }
    let (upper, lower) = match (spec.kind(), spec.beta()) {
        (SpectrumKind::Ohmic { amplitude, cutoff_time }, None) => {
            // -∫_0^T (T-u)·(-A/(u-iτ)²) du
            let tau = *cutoff_time;
            let r = Complex64::new(0.0, elapsed / tau) + (Complex64::new(tau, 0.0) / Complex64::new(tau, elapsed)).ln();
            let upper = r * *amplitude;
            let lower_r =
                Complex64::new(0.0, -elapsed / tau) + (Complex64::new(tau, 0.0) / Complex64::new(tau, -elapsed)).ln();
            (upper, lower_r * *amplitude)
        }
        (SpectrumKind::Modes(modes), beta) => {
            let mut upper = zero;
            let mut lower = zero;
            for m in modes {
                let w = m.coupling.norm_sqr();
                let c = occupation_factor(beta, m.frequency);
                let k_plus = ordered_kernel(m.frequency, elapsed);
                let k_minus = ordered_kernel(-m.frequency, elapsed);
                upper -= (k_plus * (c + 1.0) + k_minus * (c - 1.0)) * (0.5 * w);
                lower -= (k_minus * (c + 1.0) + k_plus * (c - 1.0)) * (0.5 * w);
            }
            (upper, lower)
        }
        _ => {
            let upper = -spectral_integral(spec, elapsed, tol, |w| ordered_kernel(w, elapsed))?;
            let lower = -spectral_integral(spec, elapsed, tol, |w| ordered_kernel(-w, elapsed))?;
            (upper, lower)
        }
    };
    Ok(ConnectedDiagrams { upper, lower, exponent })
}
