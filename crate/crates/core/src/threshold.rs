//! Threshold calculus for concatenated codes: level reduction, overhead,
//! diagram-sum bounds, fault-counting bounds and the malignant-pair and
//! postselection threshold estimates.

use alloc::vec::Vec;

use crate::combinatorics::{binomial, binomial_exact, factorial, EXACT_BINOMIAL_LIMIT};
use crate::{Error, Result};

/// Fault-counting data for a family of 1-gadgets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GadgetCounts {
    /// Locations per 1-gadget.
    pub locations: u64,
    /// Faults needed to make a gadget fail.
    pub faults_to_fail: u64,
    /// Malignant pairs of locations.
    pub malignant_pairs: u64,
    /// Locations used to prepare and verify ancilla software.
    pub preparation: u64,
    /// Sets of three locations.
    pub triples: u64,
    /// Override for the fault-bound prefactor; `None` means the tight value.
    pub zeta: Option<f64>,
}

impl GadgetCounts {
    pub fn validate(&self) -> Result<()> {
        if self.faults_to_fail == 0 || self.locations < self.faults_to_fail {
            return Err(Error::Domain("need 1 ≤ faults_to_fail ≤ locations"));
        }
        if let Some(z) = self.zeta {
            if !(z >= 1.0) || !z.is_finite() {
                return Err(Error::Domain("zeta must be finite and at least 1"));
            }
        }
        Ok(())
    }

    /// `ζ`: the override if set, else `e^{(A-s)ε}` at the given strength (or
    /// 1 without one).
    pub fn zeta_at(&self, epsilon: Option<f64>) -> f64 {
        match (self.zeta, epsilon) {
            (Some(z), _) => z,
            (None, Some(e)) => tight_zeta(self.locations, self.faults_to_fail, e),
            (None, None) => 1.0,
        }
    }
}

/// Noise strength after each level of concatenation.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTrace {
    pub epsilon: f64,
    pub threshold: f64,
    pub faults_to_fail: u32,
    /// `per_level[k] = ε^{(k)}`, `k = 0..=k_max`.
    pub per_level: Vec<f64>,
    pub k_max: u32,
}

/// `ε^{(k)} = ε₀(ε/ε₀)^{s^k}` for `k = 0..=k_max`, evaluated through base-2
/// logarithms so that deep levels underflow gracefully to zero.
pub fn level_reduce(epsilon: f64, threshold: f64, s: u32, k_max: u32) -> Result<LevelTrace> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain("noise strength must be finite and non-negative"));
    }
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::Domain("threshold must be positive"));
    }
    if s < 2 {
        return Err(Error::Domain("need s ≥ 2 faults per failure"));
    }
    let log_ratio = (epsilon / threshold).log2();
    let mut per_level = Vec::with_capacity(k_max as usize + 1);
    per_level.push(epsilon);
    for k in 1..=k_max {
        let value = if log_ratio == 0.0 {
            threshold
        } else {
            let power = f64::from(s).powi(k as i32);
            threshold * (power * log_ratio).exp2()
        };
        per_level.push(value);
    }
    Ok(LevelTrace {
        epsilon,
        threshold,
        faults_to_fail: s,
        per_level,
        k_max,
    })
}

/// The same recursion by repeated integer powers of the ratio; underflows
/// where [`level_reduce`] does not.
pub fn level_reduce_direct(epsilon: f64, threshold: f64, s: u32, k: u32) -> f64 {
    let mut ratio = epsilon / threshold;
    for _ in 0..k {
        ratio = ratio.powi(s as i32);
    }
    threshold * ratio
}

/// Order-of-magnitude overhead factor `(ln(L/δ) / ln(ε₀/ε))^c` for a
/// circuit of `L` gates simulated to accuracy `δ`.
pub fn overhead_factor(gates: u64, target_error: f64, epsilon: f64, threshold: f64, exponent: f64) -> Result<f64> {
    if gates == 0 {
        return Err(Error::Domain("need at least one gate"));
    }
    if !(target_error > 0.0 && target_error < 1.0) {
        return Err(Error::Domain("target error must lie in (0, 1)"));
    }
    if !(epsilon > 0.0) || !(epsilon < threshold) {
        return Err(Error::Domain("need 0 < ε < ε₀ for a threshold margin"));
    }
    if !(exponent > 0.0) {
        return Err(Error::Domain("overhead exponent must be positive"));
    }
    let ratio = ((gates as f64).ln() - target_error.ln()) / (threshold.ln() - epsilon.ln());
    Ok(ratio.powf(exponent))
}

/// Truncated and closed diagram-sum bounds for `r` marked locations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagramBound {
    /// `Σ_{k=0}^{r} r^k/k! · (2E)^{2r-k}`.
    pub partial_sum: f64,
    /// `(2eE)^r`.
    pub closed_bound: f64,
}

pub fn diagram_bound(integrated: f64, r: u32) -> Result<DiagramBound> {
    if !(integrated >= 0.0) || 2.0 * integrated > 1.0 {
        return Err(Error::Domain("diagram bound needs 0 ≤ 2E ≤ 1"));
    }
    if r == 0 {
        return Err(Error::Domain("need at least one marked location"));
    }
    let two_e = 2.0 * integrated;
    let rf = f64::from(r);
    let partial_sum = (0..=r)
        .map(|k| rf.powi(k as i32) / factorial(k) * two_e.powi((2 * r - k) as i32))
        .sum();
    Ok(DiagramBound {
        partial_sum,
        closed_bound: (core::f64::consts::E * two_e).powi(r as i32),
    })
}

/// Single-location refinement: returns `(E + 4E², 3E)`; the first never
/// exceeds the second for `E ≤ 1/2`.
pub fn single_location_bound(integrated: f64) -> Result<(f64, f64)> {
    if !(integrated >= 0.0) || 2.0 * integrated > 1.0 {
        return Err(Error::Domain("bound needs 0 ≤ 2E ≤ 1"));
    }
    Ok((integrated + 4.0 * integrated * integrated, 3.0 * integrated))
}

/// `e^{(A-s)ε}`, the smallest admissible `ζ`.
pub fn tight_zeta(locations: u64, s: u64, epsilon: f64) -> f64 {
    ((locations.saturating_sub(s)) as f64 * epsilon).exp()
}

/// Bound on the probability that at least `s` of `A` locations fail:
/// `e^{(A-s)ε}·C(A,s)·ε^s`.
pub fn s_fault_bound(locations: u64, s: u64, epsilon: f64) -> Result<f64> {
    if s == 0 || s > locations {
        return Err(Error::Domain("need 1 ≤ s ≤ A"));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Domain("noise strength must be non-negative"));
    }
    Ok(tight_zeta(locations, s, epsilon) * binomial(locations, s) * epsilon.powi(s as i32))
}

/// The unsimplified tail `Σ_{ℓ=s}^{A} C(ℓ-1,s-1)·C(A,ℓ)·ε^ℓ`.
pub fn s_fault_tail(locations: u64, s: u64, epsilon: f64) -> Result<f64> {
    if s == 0 || s > locations {
        return Err(Error::Domain("need 1 ≤ s ≤ A"));
    }
    Ok((s..=locations)
        .map(|l| binomial(l - 1, s - 1) * binomial(locations, l) * epsilon.powi(l as i32))
        .sum())
}

/// `Σ_{ℓ=s}^{f} (-1)^{ℓ-s} C(ℓ-1,s-1) C(f,ℓ)` in exact integer arithmetic.
pub fn inclusion_exclusion_coefficient(f: u64, s: u64) -> Result<i128> {
    if s == 0 {
        return Err(Error::Domain("need s ≥ 1"));
    }
    if f > EXACT_BINOMIAL_LIMIT {
        return Err(Error::Domain("fault count above the exact-arithmetic limit"));
    }
    let mut acc: i128 = 0;
    for l in s..=f {
        let a = binomial_exact(l - 1, s - 1).expect("within limit");
        let b = binomial_exact(f, l).expect("within limit");
        let term = i128::try_from(a * b).map_err(|_| Error::Domain("coefficient overflow"))?;
        if (l - s).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `ε₀ = (ζ·C(A,s))^{-1/(s-1)}`.
pub fn threshold_from_counts(locations: u64, s: u64, zeta: f64) -> Result<f64> {
    if s < 2 {
        return Err(Error::Domain("need s ≥ 2 for a threshold"));
    }
    if locations < s {
        return Err(Error::Domain("need A ≥ s"));
    }
    if !(zeta >= 1.0) {
        return Err(Error::Domain("zeta must be at least 1"));
    }
    Ok((zeta * binomial(locations, s)).powf(-1.0 / (s - 1) as f64))
}

/// Relative residual tolerance of the threshold equations.
pub const THRESHOLD_RESIDUAL: f64 = 1e-12;

/// Positive root of `Bε² + Dε³ = ε`, i.e. `2/(B + √(B² + 4D))`.
pub fn malignant_threshold(malignant_pairs: u64, triples: u64) -> Result<f64> {
    if malignant_pairs == 0 {
        return Err(Error::Domain("need at least one malignant pair"));
    }
    let b = malignant_pairs as f64;
    let d = triples as f64;
    let eps = quadratic_root(b, d);
    let residual = malignant_residual(b, d, eps);
    if residual > THRESHOLD_RESIDUAL {
        return Err(Error::Convergence {
            what: "malignant-pair threshold",
            shift: residual,
            tolerance: THRESHOLD_RESIDUAL,
        });
    }
    Ok(eps)
}

/// `|Bε² + Dε³ − ε| / ε`.
pub fn malignant_residual(b: f64, d: f64, eps: f64) -> f64 {
    (b * eps * eps + d * eps * eps * eps - eps).abs() / eps
}

/// Root of `bε + dε² = 1` without cancellation.
fn quadratic_root(b: f64, d: f64) -> f64 {
    2.0 / (b + (b * b + 4.0 * d).sqrt())
}

/// Postselected threshold: closed form and bracketed root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PostselectThreshold {
    pub closed_form: f64,
    pub root: f64,
}

/// Solves `(Bε² + Dε³)/(1 − Cε) = ε`.
pub fn postselect_threshold(malignant_pairs: u64, preparation: u64, triples: u64) -> Result<PostselectThreshold> {
    if malignant_pairs == 0 {
        return Err(Error::Domain("need at least one malignant pair"));
    }
    let b = malignant_pairs as f64;
    let c = preparation as f64;
    let d = triples as f64;
    let closed_form = quadratic_root(b + c, d);

    // h(ε) = (B+C)ε + Dε² − 1 is increasing, negative at 0 and non-negative
    // at min(1/B, 1/C).
    let h = |e: f64| (b + c) * e + d * e * e - 1.0;
    let mut lo = 0.0;
    let mut hi = if c > 0.0 { (1.0 / b).min(1.0 / c) } else { 1.0 / b };
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * mid {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let shift = (root - closed_form).abs() / closed_form;
    if shift > THRESHOLD_RESIDUAL {
        return Err(Error::Convergence {
            what: "postselection root",
            shift,
            tolerance: THRESHOLD_RESIDUAL,
        });
    }
    let residual = postselect_residual(b, c, d, closed_form);
    if residual > THRESHOLD_RESIDUAL {
        return Err(Error::Convergence {
            what: "postselection threshold",
            shift: residual,
            tolerance: THRESHOLD_RESIDUAL,
        });
    }
    Ok(PostselectThreshold { closed_form, root })
}

/// `|Bε² + Dε³ − ε(1 − Cε)| / ε`, the defining equation with the
/// denominator cleared.
pub fn postselect_residual(b: f64, c: f64, d: f64, eps: f64) -> f64 {
    (b * eps * eps + d * eps * eps * eps - eps + c * eps * eps).abs() / eps
}

/// Conditional failure bound `(Bε² + Dε³)/(1 − Cε)`.
pub fn conditional_bound(malignant_pairs: u64, preparation: u64, triples: u64, epsilon: f64) -> Result<f64> {
    let (b, c, d) = (malignant_pairs as f64, preparation as f64, triples as f64);
    let denom = 1.0 - c * epsilon;
    if !(denom > 0.0) {
        return Err(Error::Domain("conditional bound needs Cε < 1"));
    }
    Ok((b * epsilon * epsilon + d * epsilon.powi(3)) / denom)
}

fn check_postselect(joint: f64, accept: f64, attempts: u32) -> Result<()> {
    if !(accept > 0.0 && accept <= 1.0) {
        return Err(Error::Domain("acceptance probability must lie in (0, 1]"));
    }
    if !(joint >= 0.0 && joint <= accept) {
        return Err(Error::Domain("need 0 ≤ P_joint ≤ P_accept"));
    }
    if attempts == 0 {
        return Err(Error::Domain("need at least one attempt"));
    }
    Ok(())
}

/// Failure probability with up to `n` preparation attempts:
/// `P_joint/P_accept + P_reject^n (1 − P_joint/P_accept)`.
pub fn postselect_fail(joint: f64, accept: f64, attempts: u32) -> Result<f64> {
    check_postselect(joint, accept, attempts)?;
    let ratio = joint / accept;
    let reject = 1.0 - accept;
    Ok(ratio + reject.powi(attempts as i32) * (1.0 - ratio))
}

/// The same probability as an explicit sum over failure scenarios:
/// `Σ_{m=1}^{n} P_reject^{m-1} P_joint + P_reject^n`.
pub fn postselect_fail_scenarios(joint: f64, accept: f64, attempts: u32) -> Result<f64> {
    check_postselect(joint, accept, attempts)?;
    let reject = 1.0 - accept;
    let mut acc = 0.0;
    let mut weight = 1.0;
    for _ in 0..attempts {
        acc += weight * joint;
        weight *= reject;
    }
    Ok(acc + weight)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_examples() {
        let t = level_reduce(1e-3, 1e-3, 3, 5).unwrap();
        assert!(t.per_level.iter().all(|&e| e == 1e-3));
        let t0 = 3.7e-4;
        let t = level_reduce(t0 / 2.0, t0, 2, 3).unwrap();
        assert_eq!(t.per_level[3], t0 / 256.0);
        let t = level_reduce(0.0, 1e-2, 2, 4).unwrap();
        assert!(t.per_level.iter().all(|&e| e == 0.0));
        assert!(level_reduce(-1.0, 1.0, 2, 1).is_err());
    }

    #[test]
    fn overhead_examples() {
        let one = overhead_factor(10, 0.1, 1e-4, 1e-2, 1.0).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let v = overhead_factor(1_000_000, 1e-3, 1e-4, 1e-3, 3.0).unwrap();
        assert!((v - 729.0).abs() < 1e-9);
        let small = overhead_factor(1, 0.999_999, 1e-4, 1e-3, 2.0).unwrap();
        assert!(small < 1e-10);
        assert!(overhead_factor(10, 0.1, 1e-3, 1e-3, 1.0).is_err());
    }

    #[test]
    fn diagram_examples() {
        let d = diagram_bound(0.1, 1).unwrap();
        assert!((d.partial_sum - 0.24).abs() < 1e-15);
        assert!((d.closed_bound - 0.2 * core::f64::consts::E).abs() < 1e-15);
        let z = diagram_bound(0.0, 4).unwrap();
        assert_eq!((z.partial_sum, z.closed_bound), (0.0, 0.0));
        let (lhs, rhs) = single_location_bound(0.1).unwrap();
        assert!((lhs - 0.14).abs() < 1e-15 && (rhs - 0.3).abs() < 1e-15);
        assert!(diagram_bound(0.6, 1).is_err());
    }

    #[test]
    fn fault_bound_examples() {
        let v = s_fault_bound(10, 2, 0.01).unwrap();
        assert!((v - 45e-4 * 0.08f64.exp()).abs() < 1e-15);
        assert!((v - 4.875e-3).abs() < 1e-6);
        assert_eq!(s_fault_bound(5, 5, 0.3).unwrap(), 0.3f64.powi(5));
        assert_eq!(s_fault_bound(5, 2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn inclusion_exclusion_examples() {
        assert_eq!(inclusion_exclusion_coefficient(3, 2).unwrap(), 1);
        assert_eq!(inclusion_exclusion_coefficient(1, 2).unwrap(), 0);
        assert_eq!(inclusion_exclusion_coefficient(7, 7).unwrap(), 1);
    }

    #[test]
    fn threshold_examples() {
        assert!((threshold_from_counts(100, 2, 1.0).unwrap() * 4950.0 - 1.0).abs() < 1e-15);
        assert_eq!(threshold_from_counts(4, 4, 1.0).unwrap(), 1.0);
        assert!((threshold_from_counts(100, 2, 1.1).unwrap() - 1.8365e-4).abs() < 1e-8);
        assert!(threshold_from_counts(100, 1, 1.0).is_err());

        assert_eq!(malignant_threshold(250, 0).unwrap(), 1.0 / 250.0);
        let e = malignant_threshold(10_000, 1_000_000).unwrap();
        assert!((e - 1.0 / (5000.0 * (1.0 + 1.04f64.sqrt()))).abs() < 1e-18);
        assert!((e - 9.902e-5).abs() < 1e-8);
        assert!(malignant_threshold(0, 5).is_err());
    }

    #[test]
    fn postselection_examples() {
        let p = postselect_threshold(100, 10, 0).unwrap();
        assert!((p.closed_form - 1.0 / 110.0).abs() < 1e-17);
        assert!((p.root - p.closed_form).abs() < 1e-12 * p.closed_form);
        assert_eq!(postselect_threshold(37, 0, 0).unwrap().closed_form, 1.0 / 37.0);
        let at = conditional_bound(100, 10, 0, p.closed_form).unwrap();
        assert!((at - p.closed_form).abs() < 1e-15);
        assert!(conditional_bound(100, 10, 0, 0.1).is_err());

        assert!((postselect_fail(0.01, 0.9, 2).unwrap() - 0.021).abs() < 1e-15);
        assert!((postselect_fail_scenarios(0.01, 0.9, 2).unwrap() - 0.021).abs() < 1e-15);
        let limit = postselect_fail(0.02, 0.8, 200).unwrap();
        assert!((limit - 0.025).abs() < 1e-12);
        assert!((postselect_fail(0.0, 0.7, 3).unwrap() - 0.3f64.powi(3)).abs() < 1e-16);
        assert!(postselect_fail(0.0, 0.0, 3).is_err());
    }
}
