//! Brute-force checks for the analytic layers.
//!
//! [`wick`] enumerates pairings, [`fock`] works in a truncated oscillator
//! space, and [`suite`] strings them together into the pass/fail report
//! behind the `verify` command.

pub mod fock;
pub mod suite;
pub mod wick;

pub use crate::combinatorics::pairing_count;
pub use fock::{
    build_gaussian_state, fock_moment, fock_moment_fixed, fock_two_point, number_expectation, simulate_dephasing,
    FieldInsertion, FieldTerm, FockWorkspace, GaussianStateSpec,
};
pub use wick::{wick_moment, WickMoment};

/// How many times a fault pattern on `faults` locations is counted by the
/// `s`-fault expansion, by explicit enumeration.
///
/// Each subset `S` of the pattern contributes `(-1)^{|S|-s}` times the
/// number of `s`-subsets of `S` that contain the largest element of `S`;
/// both counts come from walking bitmasks, not from binomial formulas.
pub fn enumerated_pattern_weight(faults: u32, s: u32) -> i64 {
    assert!(faults <= 20, "enumeration is exponential in the pattern size");
    let pattern: u32 = if faults == 0 { 0 } else { (1u32 << faults) - 1 };
    let mut total: i64 = 0;
    // Iterate over the non-empty submasks of the pattern.
    let mut sub = pattern;
    while sub != 0 {
        let size = sub.count_ones();
        if size >= s {
            let top = 1u32 << (31 - sub.leading_zeros());
            let rest = sub & !top;
            // s-subsets containing `top` ↔ (s-1)-subsets of `rest`.
            let mut choose: i64 = 0;
            let mut t = rest;
            loop {
                if t.count_ones() + 1 == s {
                    choose += 1;
                }
                if t == 0 {
                    break;
                }
                t = (t - 1) & rest;
            }
            if (size - s).is_multiple_of(2) {
                total += choose;
            } else {
                total -= choose;
            }
        }
        sub = (sub - 1) & pattern;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_each_pattern_once() {
        assert_eq!(enumerated_pattern_weight(3, 2), 1);
        assert_eq!(enumerated_pattern_weight(1, 2), 0);
        assert_eq!(enumerated_pattern_weight(5, 5), 1);
        assert_eq!(enumerated_pattern_weight(0, 1), 0);
    }
}
