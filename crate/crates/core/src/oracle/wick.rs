//! Gaussian moments as sums over pairings of two-point functions.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::CMatrix;

/// A Wick sum together with whether the label count was odd.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WickMoment {
    pub value: Complex64,
    /// Odd label counts have no pairings; the moment is zero.
    pub odd: bool,
}

/// `Σ_pairings Π Δ(i, j)`, each pair taken with `i < j` in operator order.
/// `two_point.get(i, j)` must hold `⟨φ_i φ_j⟩` for `i < j`.
pub fn wick_moment(two_point: &CMatrix) -> WickMoment {
    let n = two_point.dim();
    if n % 2 == 1 {
        return WickMoment {
            value: Complex64::new(0.0, 0.0),
            odd: true,
        };
    }
    let mut used = vec![false; n];
    WickMoment {
        value: pair_sum(two_point, &mut used),
        odd: false,
    }
}

fn pair_sum(two_point: &CMatrix, used: &mut [bool]) -> Complex64 {
    let Some(first) = used.iter().position(|u| !u) else {
        return Complex64::new(1.0, 0.0);
    };
    used[first] = true;
    let mut acc = Complex64::new(0.0, 0.0);
    for partner in first + 1..used.len() {
        if used[partner] {
            continue;
        }
        used[partner] = true;
        acc += two_point.get(first, partner) * pair_sum(two_point, used);
        used[partner] = false;
    }
    used[first] = false;
    acc
}

/// Every perfect matching of `0..2n`, each as a list of ordered pairs.
pub fn pairings(labels: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    if labels % 2 == 1 {
        return out;
    }
    let mut used = vec![false; labels];
    let mut current = Vec::with_capacity(labels / 2);
    collect(&mut used, &mut current, &mut out);
    out
}

fn collect(used: &mut [bool], current: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    let Some(first) = used.iter().position(|u| !u) else {
        out.push(current.clone());
        return;
    };
    used[first] = true;
    for partner in first + 1..used.len() {
        if used[partner] {
            continue;
        }
        used[partner] = true;
        current.push((first, partner));
        collect(used, current, out);
        current.pop();
        used[partner] = false;
    }
    used[first] = false;
}
