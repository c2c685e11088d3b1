//! Bath power spectra and two-point correlation functions.
//!
//! A [`SpectralDensity`] describes the noise in the frequency domain; a
//! [`CorrelationFunction`] packages the time-domain two-point function
//! `Δ(α₁,x₁,t₁; α₂,x₂,t₂)` together with its spatial and polarization
//! structure, which is what the noise-strength integral consumes.
//!
//! Conventions: `Δ(t) = ∫ dω/2π e^{-iωt} Δ̃(ω)`, stationary in time.
//! Zero-temperature Ohmic noise has `Δ̃(ω) = 2πAω e^{-ωτ_c}` for `ω ≥ 0` and
//! zero otherwise, whose transform is `Δ(t) = -A/(t - iτ_c)²`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::quad::{self, Estimate, Tolerance};
use crate::special;
use crate::{Error, Result};

/// Frequency cutoff of Ohmic quadratures, in units of `1/τ_c`. The spectrum
/// is below `10⁻¹⁵` of its peak beyond this point.
pub const OHMIC_CUTOFF_MULTIPLE: f64 = 40.0;

/// A piecewise-linear table `(ω, value)`, zero outside its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    omega: Vec<f64>,
    value: Vec<f64>,
}

impl Table {
    pub fn new(omega: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        if omega.len() != value.len() {
            return Err(Error::Domain("table grid and values differ in length"));
        }
        if omega.len() < 2 {
            return Err(Error::Domain("table needs at least two points"));
        }
        if omega.iter().chain(value.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Domain("table entries must be finite"));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("table grid must be strictly increasing"));
        }
        Ok(Table { omega, value })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.value
    }

    /// Linear interpolation; zero outside `[ω_first, ω_last]`.
    pub fn eval(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if w < self.omega[0] || w > self.omega[n - 1] {
            return 0.0;
        }
        let idx = self.omega.partition_point(|&x| x <= w);
        if idx == 0 {
            return self.value[0];
        }
        if idx >= n {
            return self.value[n - 1];
        }
        let (w0, w1) = (self.omega[idx - 1], self.omega[idx]);
        let (v0, v1) = (self.value[idx - 1], self.value[idx]);
        v0 + (v1 - v0) * (w - w0) / (w1 - w0)
    }

    /// `lim_{ω→0⁺} value(ω)/ω`, or an error if `value(0⁺) ≠ 0`.
    fn slope_at_origin(&self) -> Result<f64> {
        let first = self.omega[0];
        if first > 0.0 {
            // Zero on (0, first): the function vanishes identically near the origin.
            return Ok(0.0);
        }
        let last = self.omega[self.omega.len() - 1];
        if last <= 0.0 {
            return Ok(0.0);
        }
        let at_zero = self.eval(0.0);
        if at_zero.abs() > 0.0 {
            return Err(Error::Domain(
                "J(0⁺) ≠ 0: the thermal spectrum diverges at zero frequency",
            ));
        }
        let idx = self.omega.partition_point(|&x| x <= 0.0);
        let w1 = self.omega[idx];
        Ok(self.eval(w1) / w1)
    }
}

/// One bath oscillator: coupling `g` (a frequency) and angular frequency `ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub coupling: Complex64,
    pub frequency: f64,
}

impl Mode {
    pub fn new(coupling: f64, frequency: f64) -> Self {
        Mode {
            coupling: Complex64::new(coupling, 0.0),
            frequency,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumKind {
    /// `Δ̃(ω) = 2πAω e^{-ωτ_c}` at zero temperature.
    Ohmic { amplitude: f64, cutoff_time: f64 },
    /// `J(ω) = Σ_k |g_k|² δ(ω - ω_k)`.
    Modes(Vec<Mode>),
    /// `Δ̃(ω)` itself on a grid, both signs of `ω` allowed.
    Tabulated(Table),
}

/// A noise power spectrum with an optional inverse temperature (absent means
/// the bath starts in its ground state).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDensity {
    kind: SpectrumKind,
    beta: Option<f64>,
}

impl SpectralDensity {
    pub fn ohmic(amplitude: f64, cutoff_time: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::Domain("Ohmic amplitude must be finite and non-negative"));
        }
        if !(cutoff_time > 0.0) || !cutoff_time.is_finite() {
            return Err(Error::Domain("Ohmic cutoff time must be positive"));
        }
        Ok(SpectralDensity {
            kind: SpectrumKind::Ohmic { amplitude, cutoff_time },
            beta: None,
        })
    }

    pub fn modes(modes: Vec<Mode>) -> Result<Self> {
        for m in &modes {
            if !(m.frequency > 0.0) || !m.frequency.is_finite() {
                return Err(Error::Domain("mode frequencies must be positive"));
            }
            if !m.coupling.re.is_finite() || !m.coupling.im.is_finite() {
                return Err(Error::Domain("mode couplings must be finite"));
            }
        }
        Ok(SpectralDensity {
            kind: SpectrumKind::Modes(modes),
            beta: None,
        })
    }

    pub fn tabulated(table: Table) -> Result<Self> {
        if table.values().iter().any(|&v| v < 0.0) {
            return Err(Error::Domain("a power spectrum cannot be negative"));
        }
        Ok(SpectralDensity {
            kind: SpectrumKind::Tabulated(table),
            beta: None,
        })
    }

    /// Sets the inverse temperature. `β = ∞` is the zero-temperature state.
    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain("inverse temperature must be positive"));
        }
        if let SpectrumKind::Tabulated(_) = self.kind {
            return Err(Error::Domain(
                "a tabulated spectrum already includes the thermal factors",
            ));
        }
        self.beta = if beta.is_infinite() { None } else { Some(beta) };
        Ok(self)
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// `Δ̃(ω)` for continuous spectra.
    pub fn density(&self, omega: f64) -> Result<f64> {
        match &self.kind {
            SpectrumKind::Ohmic { amplitude, cutoff_time } => {
                Ok(ohmic_density(*amplitude, *cutoff_time, self.beta, omega))
            }
            SpectrumKind::Tabulated(t) => Ok(t.eval(omega)),
            SpectrumKind::Modes(_) => Err(Error::Domain("a discrete spectrum has no density")),
        }
    }

    /// Frequency interval carrying the spectrum, with interior breakpoints.
    pub(crate) fn support(&self) -> Vec<f64> {
        match &self.kind {
            SpectrumKind::Ohmic { cutoff_time, .. } => {
                let hi = OHMIC_CUTOFF_MULTIPLE / cutoff_time;
                if self.beta.is_some() {
                    alloc::vec![-hi, 0.0, hi]
                } else {
                    alloc::vec![0.0, hi]
                }
            }
            SpectrumKind::Tabulated(t) => t.omega().to_vec(),
            SpectrumKind::Modes(m) => m.iter().map(|m| m.frequency).collect(),
        }
    }
}

/// `coth(x)` with the `x → 0` pole left to the caller.
fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// `|ω|·coth(β|ω|/2)`, finite at `ω = 0` where it equals `2/β`.
fn abs_omega_coth(beta: f64, omega: f64) -> f64 {
    let w = omega.abs();
    let x = beta * w;
    if x < 1e-4 {
        (2.0 / beta) * (1.0 + x * x / 12.0)
    } else {
        w * coth(0.5 * x)
    }
}

fn ohmic_density(amplitude: f64, cutoff_time: f64, beta: Option<f64>, omega: f64) -> f64 {
    let damping = (-omega.abs() * cutoff_time).exp();
    match beta {
        None => {
            if omega >= 0.0 {
                2.0 * PI * amplitude * omega * damping
            } else {
                0.0
            }
        }
        Some(b) => {
            // J(ω) = Aω e^{-ωτ_c}; Δ̃ = πJ(|ω|)(coth(β|ω|/2) ± 1).
            let wc = abs_omega_coth(b, omega);
            let sign = if omega >= 0.0 { 1.0 } else { -1.0 };
            PI * amplitude * damping * (wc + sign * omega.abs())
        }
    }
}

/// Finite-temperature power spectrum built from a tabulated `J(ω)`, `ω > 0`:
/// `πJ(ω)(coth(βω/2)+1)` for `ω > 0` and `πJ(|ω|)(coth(β|ω|/2)-1)` for
/// `ω < 0`. At `ω = 0` the symmetric limit `(2π/β)·lim J(ω)/ω` is returned,
/// which requires `J(0⁺) = 0`. `beta = None` is zero temperature.
pub fn thermal_spectrum(j: &Table, beta: Option<f64>, omega: f64) -> Result<f64> {
    let jw = j.eval(omega.abs());
    match beta {
        None => Ok(if omega > 0.0 {
            2.0 * PI * jw
        } else if omega == 0.0 {
            2.0 * PI * j.eval(0.0)
        } else {
            0.0
        }),
        Some(b) => {
            if !(b > 0.0) {
                return Err(Error::Domain("inverse temperature must be positive"));
            }
            if omega == 0.0 {
                return Ok(2.0 * PI / b * j.slope_at_origin()?);
            }
            let c = coth(0.5 * b * omega.abs());
            Ok(if omega > 0.0 {
                PI * jw * (c + 1.0)
            } else {
                PI * jw * (c - 1.0)
            })
        }
    }
}

/// Closed-form zero-temperature Ohmic correlation `-A/(t - iτ_c)²`.
pub fn ohmic_correlation(amplitude: f64, cutoff_time: f64, t: f64) -> Result<Complex64> {
    if !(cutoff_time > 0.0) {
        return Err(Error::Domain("cutoff time must be positive"));
    }
    let d = Complex64::new(t, -cutoff_time);
    Ok(-amplitude / (d * d))
}

/// Closed-form thermal Ohmic correlation
/// `(A/β²)[ψ'((τ_c + it)/β) + ψ'(1 + (τ_c - it)/β)]`, from expanding the
/// Bose factor as a geometric series in `e^{-βω}`.
pub fn thermal_ohmic_correlation(amplitude: f64, cutoff_time: f64, beta: f64, t: f64) -> Result<Complex64> {
    if !(cutoff_time > 0.0) {
        return Err(Error::Domain("cutoff time must be positive"));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain("inverse temperature must be positive"));
    }
    let forward = special::trigamma(Complex64::new(cutoff_time, t) / beta);
    let backward = special::trigamma(Complex64::new(cutoff_time, -t) / beta + 1.0);
    Ok((forward + backward) * (amplitude / (beta * beta)))
}

/// Exact two-point function of a set of modes at optional inverse
/// temperature:
/// `½Σ|g|²[(coth(βω/2)+1)e^{-iωt} + (coth(βω/2)-1)e^{iωt}]`.
pub fn modes_correlation(modes: &[Mode], beta: Option<f64>, t: f64) -> Complex64 {
    modes
        .iter()
        .map(|m| {
            let weight = m.coupling.norm_sqr();
            let c = match beta {
                Some(b) => coth(0.5 * b * m.frequency),
                None => 1.0,
            };
            let phase = Complex64::new(0.0, -m.frequency * t).exp();
            (phase * (c + 1.0) + phase.conj() * (c - 1.0)) * (0.5 * weight)
        })
        .sum()
}

/// `∫_0^1 e^{-iθs} ds` and `∫_0^1 s e^{-iθs} ds`.
fn linear_phase_moments(theta: f64) -> (Complex64, Complex64) {
    if theta.abs() < 0.25 {
        // Power series: Σ (-iθ)^k / k! · 1/(k+1), 1/(k+2).
        let z = Complex64::new(0.0, -theta);
        let mut term = Complex64::new(1.0, 0.0);
        let mut m0 = Complex64::new(0.0, 0.0);
        let mut m1 = Complex64::new(0.0, 0.0);
        for k in 0..24 {
            let kf = k as f64;
            m0 += term / (kf + 1.0);
            m1 += term / (kf + 2.0);
            term = term * z / (kf + 1.0);
        }
        (m0, m1)
    } else {
        let a = Complex64::new(0.0, -theta);
        let ea = a.exp();
        let m0 = (ea - 1.0) / a;
        let m1 = ea / a - (ea - 1.0) / (a * a);
        (m0, m1)
    }
}

/// Exact transform of a piecewise-linear spectrum.
fn tabulated_transform(table: &Table, t: f64) -> Complex64 {
    let w = table.omega();
    let v = table.values();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..w.len() - 1 {
        let h = w[i + 1] - w[i];
        let (m0, m1) = linear_phase_moments(t * h);
        let seg = m0 * v[i] + m1 * (v[i + 1] - v[i]);
        acc += Complex64::new(0.0, -w[i] * t).exp() * seg * h;
    }
    acc / (2.0 * PI)
}

/// `Δ(t) = ∫ dω/2π e^{-iωt} Δ̃(ω)`.
///
/// Ohmic spectra go through adaptive quadrature with panels no wider than
/// half an oscillation period; discrete modes are summed exactly; tables are
/// integrated exactly for their piecewise-linear interpolant.
pub fn correlation_from_spectrum(spec: &SpectralDensity, t: f64, tol: Tolerance) -> Result<Estimate<Complex64>> {
    if !t.is_finite() {
        return Err(Error::Domain("time must be finite"));
    }
    match spec.kind() {
        SpectrumKind::Modes(m) => Ok(Estimate {
            value: modes_correlation(m, spec.beta(), t),
            error: 0.0,
        }),
        SpectrumKind::Tabulated(table) => {
            let value = tabulated_transform(table, t);
            let scale: f64 = table.values().iter().fold(0.0, |a, &v| a.max(v));
            Ok(Estimate {
                value,
                error: 16.0 * f64::EPSILON * scale * (table.omega().len() as f64),
            })
        }
        SpectrumKind::Ohmic { .. } => {
            let support = spec.support();
            let mut pts = Vec::new();
            for w in support.windows(2) {
                let seg = quad::oscillation_breakpoints(w[0], w[1], t, 32);
                if !pts.is_empty() {
                    pts.pop();
                }
                pts.extend(seg);
            }
            let est = quad::integrate_over(
                |w| {
                    let d = spec.density(w).unwrap_or(0.0);
                    Complex64::new(0.0, -w * t).exp() * d
                },
                &pts,
                tol,
            )?;
            Ok(Estimate {
                value: est.value / (2.0 * PI),
                error: est.error / (2.0 * PI),
            })
        }
    }
}

/// Time-domain evaluator for one polarization pair.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    /// `-A/(t - iτ_c)²`.
    Ohmic {
        amplitude: f64,
        cutoff_time: f64,
    },
    /// Ohmic bath at inverse temperature `beta`, in closed form.
    ThermalOhmic {
        amplitude: f64,
        cutoff_time: f64,
        beta: f64,
    },
    /// `Γτ / (π(t² + τ²))`: a peak of area `Γ` and width `τ`.
    Lorentzian {
        area: f64,
        width: f64,
    },
    Modes {
        modes: Vec<Mode>,
        beta: Option<f64>,
    },
    /// Numeric Fourier transform of an arbitrary spectrum.
    Spectrum(SpectralDensity),
    Zero,
}

impl Kernel {
    /// Picks a closed form where one exists.
    pub fn from_spectrum(spec: &SpectralDensity) -> Kernel {
        match (spec.kind(), spec.beta()) {
            (SpectrumKind::Ohmic { amplitude, cutoff_time }, None) => Kernel::Ohmic {
                amplitude: *amplitude,
                cutoff_time: *cutoff_time,
            },
            (SpectrumKind::Ohmic { amplitude, cutoff_time }, Some(beta)) => Kernel::ThermalOhmic {
                amplitude: *amplitude,
                cutoff_time: *cutoff_time,
                beta,
            },
            (SpectrumKind::Modes(m), beta) => Kernel::Modes { modes: m.clone(), beta },
            _ => Kernel::Spectrum(spec.clone()),
        }
    }

    pub fn lorentzian(area: f64, width: f64) -> Result<Kernel> {
        if !(area >= 0.0) || !(width > 0.0) {
            return Err(Error::Domain("Lorentzian needs area ≥ 0 and width > 0"));
        }
        Ok(Kernel::Lorentzian { area, width })
    }

    pub fn eval(&self, t: f64, tol: Tolerance) -> Result<Complex64> {
        match self {
            Kernel::Ohmic { amplitude, cutoff_time } => ohmic_correlation(*amplitude, *cutoff_time, t),
            Kernel::ThermalOhmic {
                amplitude,
                cutoff_time,
                beta,
            } => thermal_ohmic_correlation(*amplitude, *cutoff_time, *beta, t),
            Kernel::Lorentzian { area, width } => {
                Ok(Complex64::new(area * width / (PI * (t * t + width * width)), 0.0))
            }
            Kernel::Modes { modes, beta } => Ok(modes_correlation(modes, *beta, t)),
            Kernel::Spectrum(spec) => correlation_from_spectrum(spec, t, tol).map(|e| e.value),
            Kernel::Zero => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// `∫_lo^hi |Δ(u)| du` where a closed form exists.
    pub fn abs_integral_closed(&self, lo: f64, hi: f64) -> Option<f64> {
        match self {
            Kernel::Ohmic { amplitude, cutoff_time } => {
                Some(amplitude / cutoff_time * ((hi / cutoff_time).atan() - (lo / cutoff_time).atan()))
            }
            Kernel::Lorentzian { area, width } => Some(area / PI * ((hi / width).atan() - (lo / width).atan())),
            Kernel::Zero => Some(0.0),
            _ => None,
        }
    }

    /// `∫_lo^hi |Δ(u)| du`, closed form or adaptive quadrature.
    pub fn abs_integral(&self, lo: f64, hi: f64, tol: Tolerance) -> Result<f64> {
        if let Some(v) = self.abs_integral_closed(lo, hi) {
            return Ok(v);
        }
        let mut pts = alloc::vec![lo];
        if lo < 0.0 && hi > 0.0 {
            pts.push(0.0);
        }
        pts.push(hi);
        if let Kernel::Modes { modes, .. } = self {
            // Resolve the fastest beat between modes.
            let fastest = modes.iter().map(|m| m.frequency).fold(0.0, f64::max);
            let mut refined = Vec::new();
            for w in pts.windows(2) {
                let seg = quad::oscillation_breakpoints(w[0], w[1], 2.0 * fastest, 1);
                if !refined.is_empty() {
                    refined.pop();
                }
                refined.extend(seg);
            }
            pts = refined;
        }
        let mut failure = None;
        let est = quad::integrate_real_over(
            |u| match self.eval(u, tol) {
                Ok(v) => v.norm(),
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
            None => Ok(est.value),
        }
    }
}

/// Spatial structure of the bath correlations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpatialStructure {
    /// `δ_{x₁x₂}`: every qubit has its own bath.
    Uncorrelated,
    /// Every qubit pair sees the same correlation function.
    Shared,
}

#[derive(Clone, Debug, PartialEq)]
enum Polarization {
    /// Same kernel for all `n_pol²` pairs.
    Uniform(Kernel),
    /// Row-major `(α₁, α₂)` kernels.
    PerPair(Vec<Kernel>),
}

/// A spacetime insertion point `(x, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacetimePoint {
    pub qubit: usize,
    pub time: f64,
}

/// Stationary two-point function with spatial and polarization structure.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationFunction {
    polarization: Polarization,
    n_pol: usize,
    structure: SpatialStructure,
    scale: f64,
    tol: Tolerance,
}

impl CorrelationFunction {
    /// A single coupling per qubit.
    pub fn new(kernel: Kernel, structure: SpatialStructure) -> Self {
        CorrelationFunction {
            polarization: Polarization::Uniform(kernel),
            n_pol: 1,
            structure,
            scale: 1.0,
            tol: Tolerance::new(1e-300, 1e-10),
        }
    }

    /// The same kernel for each of the `n_pol²` polarization pairs.
    pub fn uniform(kernel: Kernel, n_pol: usize, structure: SpatialStructure) -> Result<Self> {
        check_n_pol(n_pol)?;
        let mut c = CorrelationFunction::new(kernel, structure);
        c.n_pol = n_pol;
        Ok(c)
    }

    /// One kernel per polarization pair, row-major in `(α₁, α₂)`.
    pub fn polarized(kernels: Vec<Kernel>, n_pol: usize, structure: SpatialStructure) -> Result<Self> {
        check_n_pol(n_pol)?;
        if kernels.len() != n_pol * n_pol {
            return Err(Error::Domain("need one kernel per polarization pair"));
        }
        let mut c = CorrelationFunction::new(Kernel::Zero, structure);
        c.polarization = Polarization::PerPair(kernels);
        c.n_pol = n_pol;
        Ok(c)
    }

    /// Multiplies the whole correlation function by `factor ≥ 0`.
    pub fn scaled(mut self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::Domain("scale factor must be finite and non-negative"));
        }
        self.scale *= factor;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn n_pol(&self) -> usize {
        self.n_pol
    }

    pub fn structure(&self) -> SpatialStructure {
        self.structure
    }

    fn kernel(&self, a1: usize, a2: usize) -> &Kernel {
        match &self.polarization {
            Polarization::Uniform(k) => k,
            Polarization::PerPair(ks) => &ks[a1 * self.n_pol + a2],
        }
    }

    /// `Δ(α₁,x,t₁; α₂,x,t₂)` as a function of `t = t₁ - t₂` for a single
    /// qubit.
    pub fn eval(&self, a1: usize, a2: usize, t: f64) -> Result<Complex64> {
        if a1 >= self.n_pol || a2 >= self.n_pol {
            return Err(Error::NotFound("polarization index"));
        }
        Ok(self.kernel(a1, a2).eval(t, self.tol)? * self.scale)
    }

    /// Whether the qubit pair is correlated at all.
    pub fn couples(&self, x1: usize, x2: usize) -> bool {
        match self.structure {
            SpatialStructure::Uncorrelated => x1 == x2,
            SpatialStructure::Shared => true,
        }
    }

    /// `|Δ̄(1,2)| = Σ_{α₁,α₂} |Δ(α₁,x₁,t₁; α₂,x₂,t₂)|`.
    pub fn modulus_bar(&self, p1: SpacetimePoint, p2: SpacetimePoint) -> Result<f64> {
        if !self.couples(p1.qubit, p2.qubit) {
            return Ok(0.0);
        }
        let t = p1.time - p2.time;
        match &self.polarization {
            Polarization::Uniform(k) => {
                let pairs = (self.n_pol * self.n_pol) as f64;
                Ok(pairs * k.eval(t, self.tol)?.norm() * self.scale)
            }
            Polarization::PerPair(ks) => {
                let mut acc = 0.0;
                for k in ks {
                    acc += k.eval(t, self.tol)?.norm();
                }
                Ok(acc * self.scale)
            }
        }
    }

    /// `Σ_{α₁,α₂} ∫_lo^hi |Δ_{α₁α₂}(u)| du` for a single qubit pair.
    pub fn abs_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        match &self.polarization {
            Polarization::Uniform(k) => {
                let pairs = (self.n_pol * self.n_pol) as f64;
                Ok(pairs * k.abs_integral(lo, hi, self.tol)? * self.scale)
            }
            Polarization::PerPair(ks) => {
                let mut acc = 0.0;
                for k in ks {
                    acc += k.abs_integral(lo, hi, self.tol)?;
                }
                Ok(acc * self.scale)
            }
        }
    }
}

fn check_n_pol(n_pol: usize) -> Result<()> {
    if n_pol == 1 || n_pol == 3 {
        Ok(())
    } else {
        Err(Error::Domain("polarization count must be 1 or 3"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::new(1e-300, 1e-11)
    }

    #[test]
    fn ohmic_closed_form_examples() {
        let z = ohmic_correlation(1.0, 1.0, 0.0).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(ohmic_correlation(0.0, 1.0, 5.0).unwrap().norm(), 0.0);
        assert!((ohmic_correlation(1.0, 1.0, 1.0).unwrap().norm() - 0.5).abs() < 1e-15);
        assert!(ohmic_correlation(1.0, 0.0, 1.0).is_err());
        assert!(ohmic_correlation(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn ohmic_density_vanishes_at_negative_frequency() {
        let s = SpectralDensity::ohmic(1.0, 1.0).unwrap();
        assert_eq!(s.density(-0.3).unwrap(), 0.0);
        assert_eq!(s.density(-1e-300).unwrap(), 0.0);
        assert!(s.density(0.5).unwrap() > 0.0);
    }

    #[test]
    fn single_mode_vacuum() {
        let s = SpectralDensity::modes(alloc::vec![Mode::new(1.0, 2.0)]).unwrap();
        for t in [0.0, 0.3, -1.7, 4.0] {
            let v = correlation_from_spectrum(&s, t, tol()).unwrap().value;
            let expect = Complex64::new(0.0, -2.0 * t).exp();
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn thermal_spectrum_examples() {
        let j = Table::new(alloc::vec![0.0, 1.0, 2.0, 3.0], alloc::vec![0.0, 0.5, 1.0, 1.5]).unwrap();
        // zero temperature
        assert!((thermal_spectrum(&j, None, 2.0).unwrap() - 2.0 * PI * 1.0).abs() < 1e-14);
        assert_eq!(thermal_spectrum(&j, None, -2.0).unwrap(), 0.0);
        // βω = 2 → coth(1) + 1
        let v = thermal_spectrum(&j, Some(1.0), 2.0).unwrap();
        let coth1 = 1.0 / 1.0f64.tanh();
        assert!((coth1 - 1.313_035_285_499_331_3).abs() < 1e-15);
        assert!((v - PI * 1.0 * (coth1 + 1.0)).abs() < 1e-13);
        assert!((v / (PI * 1.0) - 2.3130).abs() < 1e-4);
        // detailed balance: Δ̃(-ω)/Δ̃(ω) = e^{-βω}
        let neg = thermal_spectrum(&j, Some(1.0), -2.0).unwrap();
        assert!((neg / v - (-2.0f64).exp()).abs() < 1e-13);
        // ω = 0 limit: (2π/β)·slope, slope 0.5
        let z = thermal_spectrum(&j, Some(2.0), 0.0).unwrap();
        assert!((z - PI * 0.5).abs() < 1e-14);
        let near = thermal_spectrum(&j, Some(2.0), 1e-7).unwrap();
        assert!((near - z).abs() < 1e-5);
    }

    #[test]
    fn thermal_ohmic_closed_form_matches_transform() {
        let (amp, tau) = (0.3, 0.5);
        for beta in [0.4, 3.0, 40.0] {
            let s = SpectralDensity::ohmic(amp, tau).unwrap().with_beta(beta).unwrap();
            for t in [0.0, 0.2, -1.1, 6.0] {
                let numeric = correlation_from_spectrum(&s, t, Tolerance::new(1e-300, 1e-10))
                    .unwrap()
                    .value;
                let closed = thermal_ohmic_correlation(amp, tau, beta, t).unwrap();
                assert!(
                    (numeric - closed).norm() < 1e-8 * closed.norm(),
                    "β={beta} t={t}: {numeric} {closed}"
                );
            }
        }
        // Low temperature approaches the ground-state form.
        let cold = thermal_ohmic_correlation(amp, tau, 1e6, 0.7).unwrap();
        let ground = ohmic_correlation(amp, tau, 0.7).unwrap();
        assert!((cold - ground).norm() < 1e-9 * ground.norm());
    }

    #[test]
    fn thermal_spectrum_divergent_limit_is_rejected() {
        let j = Table::new(alloc::vec![0.0, 1.0], alloc::vec![0.2, 0.5]).unwrap();
        assert!(matches!(thermal_spectrum(&j, Some(1.0), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tabulated_transform_of_flat_band() {
        // Δ̃ = 1 on [-1, 1] → Δ(t) = sin(t)/(π t)
        let table = Table::new(alloc::vec![-1.0, 0.0, 1.0], alloc::vec![1.0, 1.0, 1.0]).unwrap();
        let s = SpectralDensity::tabulated(table).unwrap();
        for t in [0.0, 0.1, 1.0, 7.5] {
            let v = correlation_from_spectrum(&s, t, tol()).unwrap().value;
            let expect = if t == 0.0 { 1.0 / PI } else { t.sin() / (PI * t) };
            assert!((v.re - expect).abs() < 1e-14, "t={t}");
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn table_rejects_negative_power() {
        let table = Table::new(alloc::vec![0.0, 1.0], alloc::vec![1.0, -0.1]).unwrap();
        assert!(SpectralDensity::tabulated(table).is_err());
        let table = Table::new(alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.1]).unwrap();
        assert!(SpectralDensity::tabulated(table).unwrap().with_beta(1.0).is_err());
        assert!(Table::new(alloc::vec![1.0, 0.0], alloc::vec![1.0, 0.1]).is_err());
    }

    #[test]
    fn modulus_bar_examples() {
        let k = Kernel::Ohmic {
            amplitude: 1.0,
            cutoff_time: 1.0,
        };
        let c = CorrelationFunction::new(k.clone(), SpatialStructure::Uncorrelated);
        let p = |q, t| SpacetimePoint { qubit: q, time: t };
        assert_eq!(c.modulus_bar(p(0, 0.0), p(1, 0.0)).unwrap(), 0.0);
        assert!((c.modulus_bar(p(0, 0.3), p(0, 0.3)).unwrap() - 1.0).abs() < 1e-15);
        let c3 = CorrelationFunction::uniform(k, 3, SpatialStructure::Uncorrelated).unwrap();
        assert!((c3.modulus_bar(p(2, 1.0), p(2, 1.0)).unwrap() - 9.0).abs() < 1e-14);
        let shared = CorrelationFunction::new(Kernel::Zero, SpatialStructure::Shared);
        assert!(shared.couples(0, 5));
        assert!(CorrelationFunction::uniform(Kernel::Zero, 2, SpatialStructure::Shared).is_err());
    }

    #[test]
    fn closed_and_numeric_abs_integrals_agree() {
        let k = Kernel::Ohmic {
            amplitude: 0.7,
            cutoff_time: 0.2,
        };
        let closed = k.abs_integral_closed(-3.0, 2.0).unwrap();
        let numeric = quad::integrate_real_over(|u| k.eval(u, tol()).unwrap().norm(), &[-3.0, 0.0, 2.0], tol())
            .unwrap()
            .value;
        assert!((closed - numeric).abs() < 1e-10 * closed);
    }
}
