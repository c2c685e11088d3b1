//! Spacetime layout of circuit locations.
//!
//! A location is a gate (or preparation, measurement, idle step) acting on
//! one or two qubits during a half-open window `[start, end)` of width `t₀`.
//! A [`Schedule`] collects the locations of a circuit and fixes the total
//! duration over which the noise acts.

use alloc::vec::Vec;

use crate::{Error, Result};

/// One circuit location, identified by its index in the schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Location {
    pub id: usize,
    /// Sorted, one or two qubit indices.
    pub qubits: Vec<usize>,
    pub start: f64,
    pub end: f64,
}

impl Location {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// A location before it is assigned an id.
#[derive(Clone, Debug, PartialEq)]
pub struct LocationSpec {
    pub qubits: Vec<usize>,
    pub start: f64,
    pub end: f64,
}

/// Gate locations of a circuit plus the qubit layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    locations: Vec<Location>,
    num_qubits: usize,
    gate_time: f64,
    total_duration: f64,
    spatial_dimension: usize,
}

/// Relative tolerance on window widths.
const WIDTH_TOLERANCE: f64 = 1e-12;

impl Schedule {
    /// Builds and validates an explicit schedule. The gate time is the width
    /// of the first location; every other width must match it. When absent,
    /// `num_qubits` is one past the largest qubit index and
    /// `total_duration` is the latest window end.
    pub fn new(specs: Vec<LocationSpec>, num_qubits: Option<usize>, total_duration: Option<f64>) -> Result<Self> {
        let first = specs
            .first()
            .ok_or(Error::Domain("a schedule needs at least one location"))?;
        let gate_time = first.end - first.start;

        let max_qubit = specs.iter().flat_map(|s| s.qubits.iter().copied()).max().unwrap_or(0);
        let num_qubits = num_qubits.unwrap_or(max_qubit + 1);
        if num_qubits == 0 || max_qubit >= num_qubits {
            return Err(Error::Domain("qubit index exceeds the qubit count"));
        }

        let mut locations = Vec::with_capacity(specs.len());
        for (id, spec) in specs.into_iter().enumerate() {
            let mut qubits = spec.qubits;
            qubits.sort_unstable();
            qubits.dedup();
            if qubits.is_empty() || qubits.len() > 2 {
                return Err(Error::Domain("a location acts on one or two qubits"));
            }
            if !spec.start.is_finite() || !spec.end.is_finite() || spec.start < 0.0 {
                return Err(Error::Domain("location windows must be finite and start at t ≥ 0"));
            }
            if !(spec.end > spec.start) {
                return Err(Error::Domain("location window must have end > start"));
            }
            let width = spec.end - spec.start;
            if (width - gate_time).abs() > WIDTH_TOLERANCE * gate_time {
                return Err(Error::Domain("all location windows must have the same width"));
            }
            locations.push(Location {
                id,
                qubits,
                start: spec.start,
                end: spec.end,
            });
        }

        // Per-qubit disjointness of half-open windows.
        let mut per_qubit: Vec<Vec<(f64, f64)>> = alloc::vec![Vec::new(); num_qubits];
        for loc in &locations {
            for &q in &loc.qubits {
                per_qubit[q].push((loc.start, loc.end));
            }
        }
        for windows in &mut per_qubit {
            windows.sort_by(|a, b| a.0.total_cmp(&b.0));
            if windows.windows(2).any(|w| w[1].0 < w[0].1) {
                return Err(Error::Domain("a qubit belongs to two overlapping locations"));
            }
        }

        let latest = locations.iter().map(|l| l.end).fold(0.0, f64::max);
        let total_duration = total_duration.unwrap_or(latest);
        if !(total_duration >= latest) || !total_duration.is_finite() {
            return Err(Error::Domain("total duration must cover every location window"));
        }

        Ok(Schedule {
            locations,
            num_qubits,
            gate_time,
            total_duration,
            spatial_dimension: 1,
        })
    }

    /// `depth` steps of width `t0`, each packing every qubit into gates of
    /// the given arity. Qubits sit on a line at integer positions; arity-2
    /// gates pair `(0,1), (2,3), …`. Location ids run step-major.
    pub fn uniform(num_qubits: usize, depth: usize, t0: f64, arity: usize) -> Result<Self> {
        if num_qubits == 0 || depth == 0 {
            return Err(Error::Domain("need at least one qubit and one step"));
        }
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::Domain("gate time must be positive"));
        }
        match arity {
            1 => {}
            2 if num_qubits.is_multiple_of(2) => {}
            2 => return Err(Error::Domain("arity 2 needs an even number of qubits")),
            _ => return Err(Error::Domain("arity must be 1 or 2")),
        }
        let mut specs = Vec::with_capacity(depth * num_qubits / arity);
        for step in 0..depth {
            let start = step as f64 * t0;
            let end = (step + 1) as f64 * t0;
            for first in (0..num_qubits).step_by(arity) {
                specs.push(LocationSpec {
                    qubits: (first..first + arity).collect(),
                    start,
                    end,
                });
            }
        }
        let mut s = Schedule::new(specs, Some(num_qubits), Some(depth as f64 * t0))?;
        // Windows built from products are exact multiples of t0.
        s.gate_time = t0;
        Ok(s)
    }

    /// Returns a copy with a longer total duration.
    pub fn with_total_duration(mut self, total: f64) -> Result<Self> {
        let latest = self.locations.iter().map(|l| l.end).fold(0.0, f64::max);
        if !(total >= latest) || !total.is_finite() {
            return Err(Error::Domain("total duration must cover every location window"));
        }
        self.total_duration = total;
        Ok(self)
    }

    /// The qubit set and time window of a location.
    pub fn location_domain(&self, id: usize) -> Result<(&[usize], (f64, f64))> {
        let loc = self.locations.get(id).ok_or(Error::NotFound("location id"))?;
        Ok((&loc.qubits, (loc.start, loc.end)))
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gate_time(&self) -> f64 {
        self.gate_time
    }

    pub fn total_duration(&self) -> f64 {
        self.total_duration
    }

    pub fn spatial_dimension(&self) -> usize {
        self.spatial_dimension
    }

    /// Lattice coordinate of a qubit (one-dimensional layout).
    pub fn qubit_position(&self, qubit: usize) -> Result<f64> {
        if qubit < self.num_qubits {
            Ok(qubit as f64)
        } else {
            Err(Error::NotFound("qubit index"))
        }
    }
}
