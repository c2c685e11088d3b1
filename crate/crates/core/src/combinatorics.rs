//! Integer combinatorics shared by the threshold calculus and the Wick
//! oracle.

/// Largest `n` for which binomials are computed in exact integer arithmetic.
pub const EXACT_BINOMIAL_LIMIT: u64 = 64;

/// `C(n, k)` exactly, or `None` above [`EXACT_BINOMIAL_LIMIT`].
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if n > EXACT_BINOMIAL_LIMIT {
        return None;
    }
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    Some(acc)
}

/// `ln C(n, k)` via log-gamma.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let (n, k) = (n as f64, k as f64);
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// `C(n, k)` with overflow-checked integer arithmetic, any `n`.
pub fn binomial_checked(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// `C(n, k)` as a float: exact integer arithmetic while it fits, log-gamma
/// beyond.
pub fn binomial(n: u64, k: u64) -> f64 {
    match binomial_checked(n, k) {
        Some(v) => v as f64,
        None => ln_binomial(n, k).exp(),
    }
}

/// Number of ways to split `2n` labels into `n` unordered pairs,
/// `(2n)! / (2ⁿ n!) = (2n-1)!!`. `None` on `u128` overflow.
pub fn pairing_count(n: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    let mut odd: u128 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(odd)?;
        odd += 2;
    }
    Some(acc)
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial_exact(10, 2), Some(45));
        assert_eq!(binomial_exact(9, 5), Some(126));
        assert_eq!(binomial_exact(100, 2), None);
        assert_eq!(binomial_exact(3, 5), Some(0));
        assert_eq!(binomial_exact(64, 32), Some(1_832_624_140_942_590_534));
    }

    #[test]
    fn log_gamma_path_matches_exact() {
        for n in [20u64, 40, 64] {
            for k in 0..=n {
                let exact = binomial_exact(n, k).unwrap() as f64;
                let via_lgamma = ln_binomial(n, k).exp();
                assert!((via_lgamma - exact).abs() <= 1e-11 * exact, "C({n},{k})");
            }
        }
        assert_eq!(binomial(100, 2), 4950.0);
        assert_eq!(binomial_checked(64, 32), binomial_exact(64, 32));
        let big = binomial(1000, 500);
        assert!((big.ln() - ln_binomial(1000, 500)).abs() < 1e-10);
    }

    #[test]
    fn pairings() {
        assert_eq!(pairing_count(0), Some(1));
        assert_eq!(pairing_count(2), Some(3));
        assert_eq!(pairing_count(4), Some(105));
        assert_eq!(pairing_count(200), None);
    }
}
