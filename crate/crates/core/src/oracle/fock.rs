//! Truncated Fock-space computations for a few bath oscillators.
//!
//! Basis states are indexed in mixed radix: with cutoff `c`, mode `k` has
//! stride `(c+1)^k`, and an optional qubit is the most significant digit.
//! Every result is computed at cutoffs `c` and `c+2`; if the two disagree
//! the cutoff is doubled until they do or the dimension cap is reached.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bath::Mode;
use crate::linalg::{inner, CMatrix, Csr};
use crate::{Error, Result};

/// Largest state-vector dimension the oracle will allocate.
pub const MAX_DIMENSION: usize = 1 << 22;
/// Smallest cutoff used by the convergence loop.
pub const DEFAULT_CUTOFF: usize = 16;
/// Occupation probability allowed above the cutoff when sizing the space.
pub const TAIL_PROBABILITY: f64 = 1e-12;
/// Largest dimension evolved with a dense matrix exponential.
pub const DENSE_EVOLUTION_LIMIT: usize = 256;

const CONSTRAINT_TOLERANCE: f64 = 1e-10;
const MOMENT_TOLERANCE: f64 = 1e-9;
const MOMENT_FLOOR: f64 = 1e-14;
const FLIP_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One independent squeezed factor of a Gaussian state.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Factor {
    /// `Σ λⁿ |n⟩_a |n⟩_b`, normalized.
    Pair { a: usize, b: usize, lambda: Complex64 },
    /// `Σ c_{2n} |2n⟩` with `c_{2n+2} = λ √((2n+1)/(2n+2)) c_{2n}`.
    Single { mode: usize, lambda: Complex64 },
}

/// An undisplaced Gaussian state of a few oscillators.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianStateSpec {
    modes: usize,
    factors: Vec<Factor>,
    kind: StateKind,
}

/// How a [`GaussianStateSpec`] was specified.
#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    Vacuum,
    /// Bath modes `0..K` purified by reference modes `K..2K`.
    ThermalPurification {
        beta: f64,
        frequencies: Vec<f64>,
    },
    Bogoliubov,
}

impl GaussianStateSpec {
    pub fn vacuum(modes: usize) -> Self {
        GaussianStateSpec {
            modes,
            factors: Vec::new(),
            kind: StateKind::Vacuum,
        }
    }

    /// Purification `⊗_k √(1-γ_k²) Σ_n γ_kⁿ |n⟩_k |n⟩_{K+k}` of a thermal
    /// state, with `γ_k² = e^{-βω_k}`.
    pub fn thermal(beta: f64, frequencies: Vec<f64>) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain("inverse temperature must be positive and finite"));
        }
        if frequencies.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain("mode frequencies must be positive"));
        }
        let k = frequencies.len();
        let factors = frequencies
            .iter()
            .enumerate()
            .map(|(i, &w)| Factor::Pair {
                a: i,
                b: k + i,
                lambda: Complex64::new((-0.5 * beta * w).exp(), 0.0),
            })
            .collect();
        Ok(GaussianStateSpec {
            modes: 2 * k,
            factors,
            kind: StateKind::ThermalPurification { beta, frequencies },
        })
    }

    /// The state annihilated by `b_j = Σ_k M_jk a_k + N_jk a_k†`.
    ///
    /// `M` must be diagonal and each row of `N` may pair a mode with at most
    /// one mode (itself for single-mode squeezing, a partner for two-mode
    /// squeezing). Other transforms are reported as unsupported.
    pub fn bogoliubov(m: &CMatrix, n: &CMatrix) -> Result<Self> {
        let dim = m.dim();
        if n.dim() != dim {
            return Err(Error::Domain("M and N must have the same dimension"));
        }
        let defect = m
            .mul(&m.adjoint())
            .sub(&n.mul(&n.adjoint()))
            .sub(&CMatrix::identity(dim));
        if defect.max_abs() > CONSTRAINT_TOLERANCE {
            return Err(Error::Domain("Bogoliubov matrices violate MM† − NN† = 1"));
        }
        let mnt = m.mul(&n.transpose());
        if mnt.sub(&mnt.transpose()).max_abs() > CONSTRAINT_TOLERANCE {
            return Err(Error::Domain("Bogoliubov matrices violate MNᵀ = (MNᵀ)ᵀ"));
        }
        for i in 0..dim {
            for j in 0..dim {
                if i != j && m.get(i, j).norm() > CONSTRAINT_TOLERANCE {
                    return Err(Error::Unsupported("Bogoliubov transform with non-diagonal M"));
                }
            }
        }

        let partners = |row: usize| -> Vec<usize> {
            (0..dim)
                .filter(|&k| n.get(row, k).norm() > CONSTRAINT_TOLERANCE)
                .collect()
        };
        let mut factors = Vec::new();
        for j in 0..dim {
            let p = partners(j);
            match p.as_slice() {
                [] => {}
                [k] if *k == j => factors.push(Factor::Single {
                    mode: j,
                    lambda: -n.get(j, j) / m.get(j, j),
                }),
                [k] => {
                    let k = *k;
                    if partners(k).as_slice() != [j] {
                        return Err(Error::Unsupported("Bogoliubov transform mixing more than two modes"));
                    }
                    if j < k {
                        factors.push(Factor::Pair {
                            a: j,
                            b: k,
                            lambda: -n.get(j, k) / m.get(j, j),
                        });
                    }
                }
                _ => return Err(Error::Unsupported("Bogoliubov transform mixing more than two modes")),
            }
        }
        Ok(GaussianStateSpec {
            modes: dim,
            factors,
            kind: StateKind::Bogoliubov,
        })
    }

    /// Two-mode squeezed vacuum of modes 0 and 1 with `γ² = tanh² r`.
    pub fn two_mode_squeezed(gamma_sq: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma_sq) {
            return Err(Error::Domain("squeezing needs 0 ≤ γ² < 1"));
        }
        let cosh = (1.0 / (1.0 - gamma_sq)).sqrt();
        let sinh = (gamma_sq / (1.0 - gamma_sq)).sqrt();
        let mut m = CMatrix::zeros(2);
        m.set(0, 0, Complex64::new(cosh, 0.0));
        m.set(1, 1, Complex64::new(cosh, 0.0));
        let mut n = CMatrix::zeros(2);
        n.set(0, 1, Complex64::new(sinh, 0.0));
        n.set(1, 0, Complex64::new(sinh, 0.0));
        GaussianStateSpec::bogoliubov(&m, &n)
    }

    /// Number of oscillators, reference modes included.
    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    /// Smallest cutoff leaving less than [`TAIL_PROBABILITY`] above it.
    pub fn required_cutoff(&self) -> usize {
        self.factors
            .iter()
            .map(|f| match *f {
                Factor::Pair { lambda, .. } => {
                    let r = lambda.norm_sqr();
                    if r == 0.0 {
                        0
                    } else {
                        // tail above c is r^{c+1}
                        let c = (TAIL_PROBABILITY.ln() / r.ln()).ceil() - 1.0;
                        c.max(0.0) as usize
                    }
                }
                Factor::Single { lambda, .. } => single_mode_cutoff(lambda.norm_sqr()),
            })
            .max()
            .unwrap_or(0)
    }
}

fn single_mode_cutoff(r: f64) -> usize {
    if r == 0.0 {
        return 0;
    }
    let mut weight = (1.0 - r).sqrt();
    let mut mass = weight;
    let mut n = 0usize;
    while 1.0 - mass > TAIL_PROBABILITY && n < 100_000 {
        weight *= r * ((2 * n + 1) as f64) / ((2 * n + 2) as f64);
        mass += weight;
        n += 1;
    }
    2 * n
}

/// A field insertion `φ(t) = Σ_terms g e^{-iωt} a_mode + g* e^{iωt} a_mode†`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldInsertion {
    pub terms: Vec<FieldTerm>,
    pub time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldTerm {
    pub mode: usize,
    pub coupling: Complex64,
    pub frequency: f64,
}

impl FieldInsertion {
    /// The field of a list of bath modes, mode `k` carrying `modes[k]`.
    pub fn from_modes(modes: &[Mode], time: f64) -> Self {
        FieldInsertion {
            terms: modes
                .iter()
                .enumerate()
                .map(|(k, m)| FieldTerm {
                    mode: k,
                    coupling: m.coupling,
                    frequency: m.frequency,
                })
                .collect(),
            time,
        }
    }
}

/// Truncated oscillator space with reusable scratch buffers.
#[derive(Clone, Debug)]
pub struct FockWorkspace {
    num_modes: usize,
    cutoff: usize,
    includes_qubit: bool,
    scratch: Vec<Complex64>,
}

impl FockWorkspace {
    pub fn new(num_modes: usize, cutoff: usize, includes_qubit: bool) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Domain("cutoff must be at least 1"));
        }
        let ws = FockWorkspace {
            num_modes,
            cutoff,
            includes_qubit,
            scratch: Vec::new(),
        };
        if ws.dimension_at(cutoff).is_none() {
            return Err(Error::Domain("Fock space exceeds the dimension cap"));
        }
        Ok(ws)
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn includes_qubit(&self) -> bool {
        self.includes_qubit
    }

    /// `(c+1)^modes`, times two with a qubit.
    pub fn dimension(&self) -> usize {
        self.dimension_at(self.cutoff).expect("checked at construction")
    }

    fn dimension_at(&self, cutoff: usize) -> Option<usize> {
        let bath = bath_dimension(self.num_modes, cutoff)?;
        let dim = if self.includes_qubit {
            bath.checked_mul(2)?
        } else {
            bath
        };
        (dim <= MAX_DIMENSION).then_some(dim)
    }

    fn check_modes(&self, modes: usize) -> Result<()> {
        if modes == self.num_modes {
            Ok(())
        } else {
            Err(Error::Domain("workspace mode count does not match the state"))
        }
    }

    /// Runs `eval` at `c` and `c+2`, doubling `c` until the two agree.
    fn converge<T, F, S>(&mut self, start: usize, mut eval: F, shift: S, what: &'static str) -> Result<T>
    where
        F: FnMut(&mut Vec<Complex64>, usize) -> Result<T>,
        S: Fn(&T, &T) -> (f64, f64),
    {
        let mut cutoff = start.max(self.cutoff).max(1);
        let mut last_shift = f64::INFINITY;
        let mut last_tol = 0.0;
        loop {
            if self.dimension_at(cutoff + 2).is_none() {
                return Err(Error::Convergence {
                    what,
                    shift: last_shift,
                    tolerance: last_tol,
                });
            }
            let coarse = eval(&mut self.scratch, cutoff)?;
            let fine = eval(&mut self.scratch, cutoff + 2)?;
            let (s, tol) = shift(&coarse, &fine);
            if s <= tol {
                self.cutoff = cutoff;
                return Ok(fine);
            }
            last_shift = s;
            last_tol = tol;
            cutoff *= 2;
        }
    }
}

fn bath_dimension(modes: usize, cutoff: usize) -> Option<usize> {
    let mut dim: usize = 1;
    for _ in 0..modes {
        dim = dim.checked_mul(cutoff + 1)?;
        if dim > MAX_DIMENSION {
            return None;
        }
    }
    Some(dim)
}

fn occupation(index: usize, mode: usize, cutoff: usize) -> usize {
    (index / (cutoff + 1).pow(mode as u32)) % (cutoff + 1)
}

fn factor_amplitude(f: &Factor, index: usize, cutoff: usize) -> Complex64 {
    match *f {
        Factor::Pair { a, b, lambda } => {
            let na = occupation(index, a, cutoff);
            if na != occupation(index, b, cutoff) {
                return ZERO;
            }
            lambda.powu(na as u32) * (1.0 - lambda.norm_sqr()).sqrt()
        }
        Factor::Single { mode, lambda } => {
            let occ = occupation(index, mode, cutoff);
            if occ % 2 == 1 {
                return ZERO;
            }
            let mut c = Complex64::new((1.0 - lambda.norm_sqr()).sqrt().sqrt(), 0.0);
            for n in 0..occ / 2 {
                c *= lambda * (((2 * n + 1) as f64) / ((2 * n + 2) as f64)).sqrt();
            }
            c
        }
    }
}

/// State vector at a given cutoff (no qubit).
fn state_vector(spec: &GaussianStateSpec, cutoff: usize) -> Result<Vec<Complex64>> {
    let dim = bath_dimension(spec.modes, cutoff).ok_or(Error::Domain("Fock space exceeds the dimension cap"))?;
    let mut psi = vec![ZERO; dim];
    let paired: Vec<usize> = spec
        .factors
        .iter()
        .flat_map(|f| match *f {
            Factor::Pair { a, b, .. } => vec![a, b],
            Factor::Single { mode, .. } => vec![mode],
        })
        .collect();
    let unpaired: Vec<usize> = (0..spec.modes).filter(|m| !paired.contains(m)).collect();
    for (idx, amp) in psi.iter_mut().enumerate() {
        if unpaired.iter().any(|&m| occupation(idx, m, cutoff) != 0) {
            continue;
        }
        let mut a = Complex64::new(1.0, 0.0);
        for f in &spec.factors {
            a *= factor_amplitude(f, idx, cutoff);
            if a == ZERO {
                break;
            }
        }
        *amp = a;
    }
    Ok(psi)
}

/// `dst += (lower·a + raise·a†) src` on one mode.
fn apply_ladder(
    cutoff: usize,
    mode: usize,
    lower: Complex64,
    raise: Complex64,
    src: &[Complex64],
    dst: &mut [Complex64],
) {
    let stride = (cutoff + 1).pow(mode as u32);
    let block = stride * (cutoff + 1);
    for base in (0..src.len()).step_by(block) {
        for n in 0..=cutoff {
            let off = base + n * stride;
            if n >= 1 {
                let f = lower * (n as f64).sqrt();
                for i in 0..stride {
                    dst[off - stride + i] += f * src[off + i];
                }
            }
            if n < cutoff {
                let f = raise * ((n + 1) as f64).sqrt();
                for i in 0..stride {
                    dst[off + stride + i] += f * src[off + i];
                }
            }
        }
    }
}

fn apply_field(cutoff: usize, field: &FieldInsertion, src: &[Complex64], dst: &mut Vec<Complex64>) {
    dst.clear();
    dst.resize(src.len(), ZERO);
    for t in &field.terms {
        let phase = Complex64::new(0.0, -t.frequency * field.time).exp();
        let lower = t.coupling * phase;
        apply_ladder(cutoff, t.mode, lower, lower.conj(), src, dst);
    }
}

fn check_string(spec: &GaussianStateSpec, string: &[FieldInsertion]) -> Result<()> {
    for f in string {
        for t in &f.terms {
            if t.mode >= spec.modes {
                return Err(Error::NotFound("field term mode index"));
            }
            if !t.frequency.is_finite() || !t.coupling.re.is_finite() || !t.coupling.im.is_finite() {
                return Err(Error::Domain("field terms must be finite"));
            }
        }
        if !f.time.is_finite() {
            return Err(Error::Domain("insertion time must be finite"));
        }
    }
    Ok(())
}

fn moment_at(
    spec: &GaussianStateSpec,
    string: &[FieldInsertion],
    cutoff: usize,
    scratch: &mut Vec<Complex64>,
) -> Result<Complex64> {
    let psi = state_vector(spec, cutoff)?;
    // ⟨ψ|φ₁…φ_L|ψ⟩ = ⟨φ_k…φ₁ψ | φ_{k+1}…φ_Lψ⟩ with φ Hermitian.
    let split = string.len() / 2;
    let mut bra = psi.clone();
    for f in &string[..split] {
        apply_field(cutoff, f, &bra, scratch);
        core::mem::swap(&mut bra, scratch);
    }
    let mut ket = psi;
    for f in string[split..].iter().rev() {
        apply_field(cutoff, f, &ket, scratch);
        core::mem::swap(&mut ket, scratch);
    }
    Ok(inner(&bra, &ket))
}

fn moment_shift(a: &Complex64, b: &Complex64) -> (f64, f64) {
    ((a - b).norm(), MOMENT_TOLERANCE * b.norm() + MOMENT_FLOOR)
}

/// Initial cutoff for a string of `len` fields.
fn start_cutoff(spec: &GaussianStateSpec, len: usize) -> usize {
    (spec.required_cutoff() + len.div_ceil(2)).max(DEFAULT_CUTOFF)
}

/// State vector at the workspace cutoff.
pub fn build_gaussian_state(spec: &GaussianStateSpec, ws: &FockWorkspace) -> Result<Vec<Complex64>> {
    ws.check_modes(spec.modes)?;
    state_vector(spec, ws.cutoff)
}

/// `⟨ψ|φ₁ φ₂ … φ_L|ψ⟩` at a converged cutoff.
pub fn fock_moment(spec: &GaussianStateSpec, string: &[FieldInsertion], ws: &mut FockWorkspace) -> Result<Complex64> {
    ws.check_modes(spec.modes)?;
    check_string(spec, string)?;
    let start = start_cutoff(spec, string.len());
    ws.converge(
        start,
        |scratch, c| moment_at(spec, string, c, scratch),
        moment_shift,
        "Fock moment cutoff",
    )
}

/// `⟨ψ|φ₁ … φ_L|ψ⟩` at the workspace cutoff, with no convergence check.
pub fn fock_moment_fixed(
    spec: &GaussianStateSpec,
    string: &[FieldInsertion],
    ws: &mut FockWorkspace,
) -> Result<Complex64> {
    ws.check_modes(spec.modes)?;
    check_string(spec, string)?;
    moment_at(spec, string, ws.cutoff, &mut ws.scratch)
}

/// `Δ(i, j) = ⟨ψ|φ_i φ_j|ψ⟩` for every ordered pair of insertions.
pub fn fock_two_point(spec: &GaussianStateSpec, string: &[FieldInsertion], ws: &mut FockWorkspace) -> Result<CMatrix> {
    ws.check_modes(spec.modes)?;
    check_string(spec, string)?;
    let start = start_cutoff(spec, 2);
    let n = string.len();
    ws.converge(
        start,
        |_, c| {
            let psi = state_vector(spec, c)?;
            let images: Vec<Vec<Complex64>> = string
                .iter()
                .map(|f| {
                    let mut out = Vec::new();
                    apply_field(c, f, &psi, &mut out);
                    out
                })
                .collect();
            let mut m = CMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, inner(&images[i], &images[j]));
                }
            }
            Ok(m)
        },
        |a, b| {
            let shift = a.sub(b).max_abs();
            (shift, MOMENT_TOLERANCE * b.max_abs() + MOMENT_FLOOR)
        },
        "Fock two-point cutoff",
    )
}

/// `⟨a_k† a_k⟩` at a converged cutoff.
pub fn number_expectation(spec: &GaussianStateSpec, mode: usize, ws: &mut FockWorkspace) -> Result<f64> {
    ws.check_modes(spec.modes)?;
    if mode >= spec.modes {
        return Err(Error::NotFound("mode index"));
    }
    let start = start_cutoff(spec, 0);
    ws.converge(
        start,
        |_, c| {
            let psi = state_vector(spec, c)?;
            let mut acc = 0.0;
            for (idx, a) in psi.iter().enumerate() {
                acc += occupation(idx, mode, c) as f64 * a.norm_sqr();
            }
            Ok(acc)
        },
        |a, b| ((a - b).abs(), MOMENT_TOLERANCE * b.abs() + MOMENT_FLOOR),
        "Fock occupation cutoff",
    )
}

/// Squared norm of the truncated state at the workspace cutoff.
pub fn state_norm(spec: &GaussianStateSpec, ws: &FockWorkspace) -> Result<f64> {
    let psi = build_gaussian_state(spec, ws)?;
    Ok(psi.iter().map(|a| a.norm_sqr()).sum())
}

/// How the dephasing evolution is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evolution {
    /// Dense exponential up to [`DENSE_EVOLUTION_LIMIT`], sparse above.
    Auto,
    Dense,
    Sparse,
}

/// `H = Σ_k ω_k n_k + σ_z ⊗ Σ_k (g_k a_k + g_k* a_k†)` on qubit ⊗ bath;
/// modes beyond `couplings.len()` are reference modes with no energy.
fn dephasing_hamiltonian(couplings: &[Mode], modes: usize, cutoff: usize) -> Result<Csr> {
    let bath = bath_dimension(modes, cutoff).ok_or(Error::Domain("Fock space exceeds the dimension cap"))?;
    let dim = 2 * bath;
    let mut trip = Vec::with_capacity(dim * (1 + 2 * couplings.len()));
    for idx in 0..dim {
        let sign = if idx < bath { 1.0 } else { -1.0 };
        let b = idx % bath;
        let mut energy = 0.0;
        for (k, m) in couplings.iter().enumerate() {
            let n = occupation(b, k, cutoff);
            energy += m.frequency * n as f64;
            let stride = (cutoff + 1).pow(k as u32);
            if n >= 1 {
                trip.push((idx - stride, idx, m.coupling * (sign * (n as f64).sqrt())));
            }
            if n < cutoff {
                trip.push((idx + stride, idx, m.coupling.conj() * (sign * ((n + 1) as f64).sqrt())));
            }
        }
        if energy != 0.0 {
            trip.push((idx, idx, Complex64::new(energy, 0.0)));
        }
    }
    Csr::from_triplets(dim, trip)
}

fn flip_probability_at(
    couplings: &[Mode],
    state: &GaussianStateSpec,
    elapsed: f64,
    cutoff: usize,
    method: Evolution,
) -> Result<f64> {
    let bath = state_vector(state, cutoff)?;
    let h = dephasing_hamiltonian(couplings, state.modes, cutoff)?;
    let half = core::f64::consts::FRAC_1_SQRT_2;
    let mut psi: Vec<Complex64> = bath.iter().map(|a| a * half).collect();
    psi.extend(bath.iter().map(|a| a * half));
    let z = Complex64::new(0.0, -elapsed);
    let dense = match method {
        Evolution::Auto => h.dim() <= DENSE_EVOLUTION_LIMIT,
        Evolution::Dense => true,
        Evolution::Sparse => false,
    };
    let evolved = if dense {
        let mut m = h.to_dense();
        m.scale(z);
        m.expm().mul_vec(&psi)
    } else {
        h.expm_action(z, &psi)
    };
    let n = bath.len();
    // σ_x = −1 amplitude: (ψ_↑ − ψ_↓)/√2
    let p: f64 = (0..n).map(|i| (evolved[i] - evolved[n + i]).norm_sqr()).sum();
    Ok(0.5 * p)
}

/// Probability that a qubit prepared in `|+⟩` reads `σ_x = −1` after
/// evolving for `elapsed` together with the bath modes, which start in
/// their ground state or, with `beta`, in a purified thermal state.
pub fn simulate_dephasing(modes: &[Mode], beta: Option<f64>, elapsed: f64, ws: &mut FockWorkspace) -> Result<f64> {
    simulate_dephasing_with(modes, beta, elapsed, ws, Evolution::Auto)
}

pub fn simulate_dephasing_with(
    modes: &[Mode],
    beta: Option<f64>,
    elapsed: f64,
    ws: &mut FockWorkspace,
    method: Evolution,
) -> Result<f64> {
    if !(elapsed >= 0.0) || !elapsed.is_finite() {
        return Err(Error::Domain("elapsed time must be finite and non-negative"));
    }
    if modes.iter().any(|m| !(m.frequency > 0.0)) {
        return Err(Error::Domain("mode frequencies must be positive"));
    }
    if !ws.includes_qubit {
        return Err(Error::Domain("dephasing simulation needs a workspace with a qubit"));
    }
    let state = match beta {
        Some(b) => GaussianStateSpec::thermal(b, modes.iter().map(|m| m.frequency).collect())?,
        None => GaussianStateSpec::vacuum(modes.len()),
    };
    ws.check_modes(state.modes)?;
    if modes.is_empty() {
        return Ok(0.0);
    }
    // Coherent displacement up to 2|g|/ω on top of the initial occupation.
    let displacement = modes
        .iter()
        .map(|m| 2.0 * m.coupling.norm() / m.frequency)
        .fold(0.0, f64::max);
    let reach = (displacement * displacement + 6.0 * displacement + 6.0).ceil() as usize;
    let start = (state.required_cutoff() + reach).max(DEFAULT_CUTOFF);
    ws.converge(
        start,
        |_, c| flip_probability_at(modes, &state, elapsed, c, method),
        |a, b| ((a - b).abs(), FLIP_TOLERANCE),
        "dephasing simulation cutoff",
    )
}
