//! Complex trigamma and log-gamma ratios, evaluated by upward recurrence
//! followed by the asymptotic series.

use num_complex::Complex64;

/// Arguments at least this large go straight to the asymptotic series.
const ASYMPTOTIC_RADIUS: f64 = 15.0;

/// `B_{2k}` for `k = 1..=7`.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// `ψ'(z) = Σ_{k≥0} 1/(z+k)²` for `Re z > 0`.
pub fn trigamma(mut z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm() < ASYMPTOTIC_RADIUS {
        acc += (z * z).inv();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    // 1/z + 1/(2z²) + Σ B_{2k}/z^{2k+1}
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv * inv2;
    for b in BERNOULLI {
        series += power * b;
        power *= inv2;
    }
    acc + inv + inv2 * 0.5 + series
}

/// `Re ln Γ(w + iy) − ln Γ(w)` for real `w > 0`. Never positive, and
/// accurate to full relative precision as `y → 0`.
pub fn ln_gamma_ratio_re(mut w: f64, y: f64) -> f64 {
    let mut acc = 0.0;
    while w < ASYMPTOTIC_RADIUS {
        let r = y / w;
        acc -= 0.5 * (r * r).ln_1p();
        w += 1.0;
    }
    // Stirling difference: Re[(z-½)ln z - (w-½)ln w] with z = w + iy.
    let r = y / w;
    acc += 0.5 * (w - 0.5) * (r * r).ln_1p() - y * r.atan();
    let z = Complex64::new(w, y);
    let (zi, wi) = (z.inv(), 1.0 / w);
    let (zi2, wi2) = (zi * zi, wi * wi);
    let (mut zp, mut wp) = (zi, wi);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        let c = b / (n * (n - 1.0));
        acc += c * (zp.re - wp);
        zp *= zi2;
        wp *= wi2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trigamma_by_sum(z: Complex64) -> Complex64 {
        // Direct sum with an integral tail correction.
        let n = 200_000;
        let mut s = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            s += ((z + k as f64) * (z + k as f64)).inv();
        }
        let tail = z + n as f64;
        s + tail.inv() + (tail * tail).inv() * 0.5
    }

    #[test]
    fn trigamma_known_values() {
        let pi2_6 = core::f64::consts::PI.powi(2) / 6.0;
        assert!((trigamma(Complex64::new(1.0, 0.0)).re - pi2_6).abs() < 1e-14);
        assert!((trigamma(Complex64::new(0.5, 0.0)).re - 3.0 * pi2_6).abs() < 1e-13);
        for z in [
            Complex64::new(0.3, 2.0),
            Complex64::new(4.0, -7.5),
            Complex64::new(0.01, 40.0),
        ] {
            let d = (trigamma(z) - trigamma_by_sum(z)).norm() / trigamma(z).norm();
            assert!(d < 1e-10, "{z}: {d}");
        }
    }

    #[test]
    fn gamma_ratio_matches_product() {
        for (w, y) in [(1.0, 0.5), (1.02, 3.0), (6.5, 0.01), (1.5, 80.0)] {
            let direct: f64 = (0..2_000_000)
                .map(|k| {
                    let r = y / (w + k as f64);
                    -0.5 * (r * r).ln_1p()
                })
                .sum();
            // Tail of the product beyond the summed range.
            let tail = -0.5 * y * y / (w + 2_000_000.0);
            let got = ln_gamma_ratio_re(w, y);
            assert!(
                (got - (direct + tail)).abs() < 1e-9 * got.abs().max(1.0),
                "{w} {y}: {got} vs {}",
                direct + tail
            );
        }
        // |Γ(1+iy)|² = πy/sinh(πy).
        let y: f64 = 1.3;
        let pi = core::f64::consts::PI;
        let exact = 0.5 * (pi * y / (pi * y).sinh()).ln();
        assert!((ln_gamma_ratio_re(1.0, y) - exact).abs() < 1e-14);
        let small = ln_gamma_ratio_re(1.0, 1e-6);
        let leading = -0.5 * 1e-12 * pi * pi / 6.0;
        assert!((small - leading).abs() < 1e-6 * leading.abs());
    }
}
