//! Noise strength `ε` for the supported noise models.
//!
//! For Gaussian noise the strength follows from the integrated correlation
//!
//! ```text
//! E = max_loc Σ_{x₁∈loc} ∫_loc dt₁ Σ_{x₂} ∫_0^T dt₂ |Δ̄(x₁,t₁; x₂,t₂)|
//! ```
//!
//! as `ε = √(2e·E)`, valid while `2E ≤ 1`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::bath::{CorrelationFunction, SpatialStructure};
use crate::geometry::Schedule;
use crate::quad;
use crate::{Error, Result, STRENGTH_CONSTANT};

/// Which estimate produced a [`StrengthReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Gaussian,
    ShortRange,
    LongRange,
    AlmostMarkovian,
    OhmicClosed,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Gaussian => "gaussian",
            Model::ShortRange => "short_range",
            Model::LongRange => "long_range",
            Model::AlmostMarkovian => "almost_markovian",
            Model::OhmicClosed => "ohmic_closed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrengthReport {
    /// Integrated correlation `E`. For the operator-norm models this is the
    /// Gaussian-equivalent value `ε²/2e`.
    pub integrated: f64,
    pub epsilon: f64,
    pub model: Model,
    /// Whether the regime condition of the estimate holds.
    pub valid: bool,
    /// Location attaining the maximum, when a schedule was involved.
    pub argmax_location: Option<usize>,
}

/// Result of [`gaussian_e`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratedCorrelation {
    pub value: f64,
    pub argmax_location: usize,
}

/// The integrated correlation `E` and the location attaining it.
///
/// The inner `t₂` integral runs over the whole schedule `[0, T_total]` and is
/// done in closed form where the kernel allows it; the outer `t₁` integral
/// over the location window is adaptive.
pub fn gaussian_e(schedule: &Schedule, corr: &CorrelationFunction) -> Result<IntegratedCorrelation> {
    let total = schedule.total_duration();
    let tol = corr.tolerance();
    let partners = match corr.structure() {
        SpatialStructure::Uncorrelated => 1.0,
        SpatialStructure::Shared => schedule.num_qubits() as f64,
    };

    // Stationarity: locations sharing a window share the time integral.
    let mut cache: Vec<((f64, f64), f64)> = Vec::new();
    let mut best: Option<IntegratedCorrelation> = None;
    for loc in schedule.locations() {
        let key = (loc.start, loc.end);
        let per_qubit = match cache.iter().find(|(k, _)| *k == key) {
            Some(&(_, v)) => v,
            None => {
                let v = window_integral(corr, loc.start, loc.end, total, tol)?;
                cache.push((key, v));
                v
            }
        };
        let value = per_qubit * partners * loc.qubits.len() as f64;
        if best.is_none_or(|b| value > b.value) {
            best = Some(IntegratedCorrelation {
                value,
                argmax_location: loc.id,
            });
        }
    }
    best.ok_or(Error::Domain("schedule has no locations"))
}

/// `∫_start^end dt₁ ∫_{t₁-T}^{t₁} du |Δ̄(u)|` for one qubit pair.
fn window_integral(corr: &CorrelationFunction, start: f64, end: f64, total: f64, tol: quad::Tolerance) -> Result<f64> {
    let mut failure = None;
    // Kernels are peaked near u = 0, i.e. near t₁ = 0 and t₁ = T.
    let mut pts = alloc::vec![start];
    for edge in [0.0, total] {
        if edge > start && edge < end {
            pts.push(edge);
        }
    }
    pts.push(end);
    let est = quad::integrate_real_over(
        |t1| match corr.abs_integral(t1 - total, t1) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &pts,
        tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value.max(0.0)),
    }
}

/// `ε = √(2e·E)`; `valid` iff `2E ≤ 1`.
pub fn gaussian_epsilon(integrated: f64) -> Result<StrengthReport> {
    if !(integrated >= 0.0) || !integrated.is_finite() {
        return Err(Error::Domain("integrated correlation must be finite and non-negative"));
    }
    Ok(StrengthReport {
        integrated,
        epsilon: (STRENGTH_CONSTANT * integrated).sqrt(),
        model: Model::Gaussian,
        valid: 2.0 * integrated <= 1.0,
        argmax_location: None,
    })
}

/// `E` and `ε` for a schedule in one call.
pub fn gaussian_strength(schedule: &Schedule, corr: &CorrelationFunction) -> Result<StrengthReport> {
    let e = gaussian_e(schedule, corr)?;
    let mut report = gaussian_epsilon(e.value)?;
    report.argmax_location = Some(e.argmax_location);
    Ok(report)
}

fn check_nonnegative(x: f64, what: &'static str) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(what))
    }
}

/// Short-range operator-norm estimate `ε = max‖H_SB‖·t₀`.
pub fn short_range_epsilon(norm_max: f64, t0: f64) -> Result<f64> {
    check_nonnegative(norm_max, "coupling norm must be non-negative")?;
    check_nonnegative(t0, "gate time must be non-negative")?;
    Ok(norm_max * t0)
}

/// Long-range estimate `ε = √(2e·(row sum of ‖H_SB‖)·t₀)`.
pub fn long_range_epsilon(row_sum_norm: f64, t0: f64) -> Result<f64> {
    check_nonnegative(row_sum_norm, "row-sum norm must be non-negative")?;
    check_nonnegative(t0, "gate time must be non-negative")?;
    Ok((STRENGTH_CONSTANT * row_sum_norm * t0).sqrt())
}

fn norm_report(model: Model, epsilon: f64, valid: bool) -> StrengthReport {
    StrengthReport {
        integrated: epsilon * epsilon / STRENGTH_CONSTANT,
        epsilon,
        model,
        valid,
        argmax_location: None,
    }
}

pub fn short_range_report(norm_max: f64, t0: f64) -> Result<StrengthReport> {
    Ok(norm_report(Model::ShortRange, short_range_epsilon(norm_max, t0)?, true))
}

pub fn long_range_report(row_sum_norm: f64, t0: f64) -> Result<StrengthReport> {
    let eps = long_range_epsilon(row_sum_norm, t0)?;
    Ok(norm_report(Model::LongRange, eps, eps * eps <= core::f64::consts::E))
}

/// Almost-Markovian noise: a correlation peak of area `Γ` much narrower than
/// the gate gives `E ≈ Γt₀`.
pub fn almost_markovian(rate: f64, t0: f64) -> Result<StrengthReport> {
    check_nonnegative(rate, "rate must be non-negative")?;
    check_nonnegative(t0, "gate time must be non-negative")?;
    let mut r = gaussian_epsilon(rate * t0)?;
    r.model = Model::AlmostMarkovian;
    Ok(r)
}

/// Ohmic noise in the long-duration limit: `E = πA·t₀/τ_c`.
pub fn ohmic_closed(amplitude: f64, t0: f64, cutoff_time: f64) -> Result<StrengthReport> {
    check_nonnegative(amplitude, "amplitude must be non-negative")?;
    check_nonnegative(t0, "gate time must be non-negative")?;
    if !(cutoff_time > 0.0) {
        return Err(Error::Domain("cutoff time must be positive"));
    }
    let mut r = gaussian_epsilon(PI * amplitude * t0 / cutoff_time)?;
    r.model = Model::OhmicClosed;
    Ok(r)
}

/// Infrared convergence of the `E` integral for a critical bath: the
/// exponent is `D + z - 2δ`, convergent iff strictly negative.
pub fn ir_criterion(spatial_dimension: u32, dynamical_exponent: f64, scale_dimension: f64) -> (bool, f64) {
    let exponent = f64::from(spatial_dimension) + dynamical_exponent - 2.0 * scale_dimension;
    (exponent < 0.0, exponent)
}

/// Whether the linearly divergent operator-norm estimate `√A·t₀/τ_c` is
/// below the threshold.
pub fn linear_divergence_check(amplitude: f64, t0: f64, cutoff_time: f64, threshold: f64) -> bool {
    amplitude.sqrt() * (t0 / cutoff_time) < threshold
}
