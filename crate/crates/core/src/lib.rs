//! Noise-strength and accuracy-threshold calculus for Gaussian non-Markovian
//! noise acting on a quantum circuit.
//!
//! The crate is split by concern:
//!
//! * [`bath`]: power spectra, two-point correlation functions and their
//!   numeric Fourier transforms.
//! * [`geometry`]: the spacetime layout of circuit locations that defines
//!   the integration domains of the noise-strength integral.
//! * [`strength`]: the noise strength `ε` for Gaussian, operator-norm,
//!   almost-Markovian and Ohmic noise models.
//! * [`threshold`]: level reduction, overhead estimates, diagram bounds and
//!   the combinatoric threshold estimates for concatenated codes.
//! * [`dephasing`]: the exactly solvable pure-dephasing model and the
//!   repetition-code CNOT gadget bound.
//! * [`oracle`]: brute-force verification (Wick pairing enumeration and
//!   truncated Fock-space simulation) used to check the analytic layers.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line front end live in the companion `gthresh` crate.

#![no_std]
// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bath;
pub mod combinatorics;
pub mod dephasing;
mod error;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod quad;
pub mod special;
pub mod strength;
pub mod threshold;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// `C = 2e`, the combinatoric constant relating `ε²` to the integrated
/// correlation `E`.
pub const STRENGTH_CONSTANT: f64 = 2.0 * core::f64::consts::E;
