//! Globally adaptive Gauss-Kronrod quadrature for complex-valued integrands.
//!
//! The 7/15-point Gauss-Kronrod pair supplies both the panel value and an
//! embedded error estimate; the panel with the largest estimated error is
//! bisected until the summed error meets the tolerance. Oscillatory
//! integrands are handled by seeding the panel list with breakpoints every
//! half period of the known oscillation, see [`oscillation_breakpoints`].

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for the adaptive integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Upper bound on the number of panels kept at once.
    pub max_panels: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_panels: 400_000,
        }
    }

    pub fn with_rel(self, rel: f64) -> Self {
        Tolerance { rel, ..self }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-300, 1e-11)
    }
}

/// A quadrature value with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Part of `error` set by floating-point resolution; splitting cannot
    /// reduce the sum of these.
    floor: f64,
}

struct ByError(f64, usize);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken by panel index so the refinement order is deterministic.
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

fn roundoff_floor(res_abs: f64) -> f64 {
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        50.0 * f64::EPSILON * res_abs
    } else {
        0.0
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    scaled.max(roundoff_floor(res_abs))
}

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_centre = f(centre);

    let mut gauss = f_centre * WG[3];
    let mut kronrod = f_centre * WGK[7];
    let mut res_abs = f_centre.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(centre - x);
        let f2 = f(centre + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        kronrod += sum * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_centre - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let width = half.abs();
    let err = ((kronrod - gauss) * half).norm();
    Panel {
        a,
        b,
        value: kronrod * half,
        error: rescale_error(err, res_abs * width, res_asc * width),
        floor: roundoff_floor(res_abs * width),
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<Complex64>>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_over(f, &[a, b], tol)
}

/// Integrates a real integrand over `[a, b]`.
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<f64>>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate_over(|x| Complex64::new(f(x), 0.0), &[a, b], tol)?;
    Ok(Estimate {
        value: est.value.re,
        error: est.error,
    })
}

/// Integrates a real integrand over consecutive panels given by `breakpoints`.
pub fn integrate_real_over<F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> Result<Estimate<f64>>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate_over(|x| Complex64::new(f(x), 0.0), breakpoints, tol)?;
    Ok(Estimate {
        value: est.value.re,
        error: est.error,
    })
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`, starting from
/// the panels delimited by the (sorted) breakpoints.
pub fn integrate_over<F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> Result<Estimate<Complex64>>
where
    F: FnMut(f64) -> Complex64,
{
    if breakpoints.len() < 2 {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    if breakpoints.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("integration limits must be finite"));
    }

    let mut panels: Vec<Panel> = Vec::with_capacity(breakpoints.len() * 2);
    let mut heap = BinaryHeap::new();
    let mut frozen_error = 0.0;

    for w in breakpoints.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let p = gk15(&mut f, w[0], w[1]);
        heap.push(ByError(p.error, panels.len()));
        panels.push(p);
    }
    if panels.len() > tol.max_panels {
        return Err(Error::Domain("too many initial quadrature panels"));
    }

    let mut total: Complex64 = panels.iter().map(|p| p.value).sum();
    let mut error: f64 = panels.iter().map(|p| p.error).sum();
    let mut floor: f64 = panels.iter().map(|p| p.floor).sum();
    loop {
        let target = tol.abs.max(tol.rel * total.norm());
        if error <= target {
            // Re-sum so the running totals carry no drift.
            let total: Complex64 = panels.iter().map(|p| p.value).sum();
            let error: f64 = panels.iter().map(|p| p.error).sum();
            if error <= target {
                return Ok(Estimate { value: total, error });
            }
        }
        let unreachable = floor + frozen_error > target;
        if unreachable || panels.len() >= tol.max_panels || heap.is_empty() {
            return Err(Error::Quadrature {
                value: total.norm(),
                error,
            });
        }

        let Some(ByError(err, idx)) = heap.pop() else {
            continue;
        };
        let p = panels[idx];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b || (p.b - p.a) <= 4.0 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
            // Panel is at floating-point resolution; keep it as is.
            frozen_error += err;
            continue;
        }
        let left = gk15(&mut f, p.a, mid);
        let right = gk15(&mut f, mid, p.b);
        total += left.value + right.value - p.value;
        error += left.error + right.error - err;
        floor += left.floor + right.floor - p.floor;
        panels[idx] = left;
        heap.push(ByError(left.error, idx));
        heap.push(ByError(right.error, panels.len()));
        panels.push(right);
    }
}

/// Breakpoints on `[a, b]` spaced at most half an oscillation period of
/// `e^{-iωt}` apart (`π/|t|` in the integration variable), and no fewer than
/// `min_panels` panels.
pub fn oscillation_breakpoints(a: f64, b: f64, t: f64, min_panels: usize) -> Vec<f64> {
    let span = b - a;
    let mut n = min_panels.max(1);
    if t != 0.0 {
        let half_period = core::f64::consts::PI / t.abs();
        let needed = (span / half_period).ceil();
        if needed.is_finite() && needed > n as f64 {
            n = needed as usize;
        }
    }
    let mut pts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        pts.push(a + span * (i as f64) / (n as f64));
    }
    pts[n] = b;
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate_real(|x| 3.0 * x * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((est.value - 8.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_integral() {
        let est = integrate_real(|x| (-x * x).exp(), -10.0, 10.0, Tolerance::default()).unwrap();
        assert!((est.value - core::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_refines() {
        // ∫ τ/(x²+τ²) over [-1,1] = 2 atan(1/τ)
        let tau = 1e-4;
        let est = integrate_real(|x| tau / (x * x + tau * tau), -1.0, 1.0, Tolerance::default()).unwrap();
        let exact = 2.0 * (1.0 / tau).atan();
        assert!((est.value - exact).abs() < 1e-9 * exact, "{} vs {}", est.value, exact);
    }

    #[test]
    fn oscillatory_with_panels() {
        // ∫_0^1 e^{-i 200 x} dx = (1 - e^{-200 i}) / (200 i)
        let t = 200.0;
        let pts = oscillation_breakpoints(0.0, 1.0, t, 4);
        let est = integrate_over(|x| Complex64::new(0.0, -t * x).exp(), &pts, Tolerance::default()).unwrap();
        let exact = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -t).exp()) / Complex64::new(0.0, t);
        assert!((est.value - exact).norm() < 1e-13);
    }

    #[test]
    fn breakpoints_cover_interval() {
        let pts = oscillation_breakpoints(-1.0, 3.0, 10.0, 2);
        assert_eq!(pts[0], -1.0);
        assert_eq!(*pts.last().unwrap(), 3.0);
        for w in pts.windows(2) {
            assert!(w[1] - w[0] <= core::f64::consts::PI / 10.0 + 1e-12);
        }
    }

    #[test]
    fn nonconvergence_is_reported() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_panels: 8,
        };
        let err = integrate_real(|x| (1.0 / x.abs().max(1e-300)).sqrt(), -1.0, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn empty_interval_is_zero() {
        let est = integrate_real(|x| x, 1.0, 1.0, Tolerance::default()).unwrap();
        assert_eq!(est.value, 0.0);
    }
}
