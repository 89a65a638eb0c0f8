//! Multiqubit pure states and density matrices.
//!
//! Basis index `b` is read big-endian: subsystem 0 (party A) is the most
//! significant digit, so `|100⟩` is index 4 for three qubits.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{herm_eig, tol, ComplexMatrix, LinalgError};

/// Tolerance on `Σλᵢ² = 1` (and `Σaᵢ² = 1`) for the named state families.
pub const FAMILY_NORM_TOL: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Norms at or below this are rejected as the zero vector.
pub const MIN_NORM: f64 = 1e-12;
/// Largest qubit count accepted by the Haar sampler.
pub const MAX_SAMPLED_QUBITS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("amplitude vector has (near) zero norm")]
    ZeroVector,
    #[error("expected {expected} amplitudes for dims {dims:?}, got {got}")]
    LengthMismatch { dims: Vec<usize>, expected: usize, got: usize },
    #[error("subsystem dimension list is empty or contains a zero")]
    BadDims,
    #[error("coefficients are not normalised (sum of squares = {0})")]
    NotNormalized(f64),
    #[error("coefficient {index} is negative ({value})")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("phase {0} is outside [0, π]")]
    BadPhase(f64),
    #[error("probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("{0} qubits requested; the sampler supports 1..=6")]
    TooLarge(usize),
    #[error("subset {0:?} must be a proper, nonempty set of valid subsystem indices")]
    BadSubset(Vec<usize>),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, StateError>;

fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(StateError::BadDims);
    }
    let d: usize = dims.iter().product();
    if d > tol::MAX_DIM {
        return Err(StateError::Linalg(LinalgError::BadDimension(d)));
    }
    Ok(d)
}

/// Normalised state vector over a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
    norm_factor: f64,
}

impl PureState {
    /// Normalises `amplitudes`; the applied factor `1/‖v‖` is kept in
    /// [`PureState::norm_factor`].
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let expected = total_dim(&dims)?;
        if amplitudes.len() != expected {
            return Err(StateError::LengthMismatch {
                dims,
                expected,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= MIN_NORM {
            return Err(StateError::ZeroVector);
        }
        // already unit up to round-off: keep the bits so a re-read state is identical
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self {
                dims,
                amplitudes,
                norm_factor: 1.0,
            });
        }
        let norm_factor = 1.0 / norm;
        let amplitudes = amplitudes.into_iter().map(|a| a * norm_factor).collect();
        Ok(Self {
            dims,
            amplitudes,
            norm_factor,
        })
    }

    /// All-qubit state from real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        let n = amplitudes.len().trailing_zeros() as usize;
        if amplitudes.len() != 1 << n {
            return Err(StateError::LengthMismatch {
                dims: vec![],
                expected: 1 << (n + 1),
                got: amplitudes.len(),
            });
        }
        Self::new(
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            vec![2; n],
        )
    }

    /// Computational basis state `|b⟩` on `n` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        *amps.get_mut(index).ok_or(StateError::BadDims)? = Complex64::new(1.0, 0.0);
        Self::new(amps, vec![2; n_qubits])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }
}

/// Hermitian, positive semidefinite, unit-trace operator with subsystem structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity (1e-10), positivity (1e-9) and unit trace (1e-10).
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let expected = total_dim(&dims)?;
        if matrix.dim() != expected {
            return Err(StateError::LengthMismatch {
                dims,
                expected,
                got: matrix.dim(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol::HERMITIAN {
            return Err(LinalgError::NotHermitian(defect).into());
        }
        let spec = herm_eig(&matrix)?;
        if spec.min_eigenvalue() < -tol::PSD {
            return Err(LinalgError::NotPsd(spec.min_eigenvalue()).into());
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(StateError::BadTrace(tr.re));
        }
        Ok(Self { dims, matrix })
    }

    /// For matrices produced by trace-preserving constructions in this crate.
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.dim(), dims.iter().product::<usize>());
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.entries().iter().map(Complex64::norm_sqr).sum()
    }
}

/// A bipartition of subsystem indices into `focus | rest`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteSplit {
    focus: Vec<usize>,
    rest: Vec<usize>,
}

impl BipartiteSplit {
    pub fn new(focus: &[usize], num_subsystems: usize) -> Result<Self> {
        let mut f = focus.to_vec();
        f.sort_unstable();
        f.dedup();
        if f.is_empty() || f.len() >= num_subsystems || f.iter().any(|&i| i >= num_subsystems) {
            return Err(StateError::BadSubset(focus.to_vec()));
        }
        let rest = (0..num_subsystems).filter(|i| !f.contains(i)).collect();
        Ok(Self { focus: f, rest })
    }

    pub fn focus(&self) -> &[usize] {
        &self.focus
    }

    pub fn rest(&self) -> &[usize] {
        &self.rest
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_of(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_parts_unchecked(ComplexMatrix::outer(&psi.amplitudes), psi.dims.clone())
}

/// Big-endian place values of each subsystem.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Full-register offsets contributed by every joint value of `subset`,
/// enumerated big-endian over the subset.
fn subset_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offsets = vec![0usize];
    for &s in subset {
        let (d, stride) = (dims[s], st[s]);
        offsets = offsets
            .iter()
            .flat_map(|&o| (0..d).map(move |v| o + v * stride))
            .collect();
    }
    offsets
}

fn validate_subset(subset: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.is_empty() || s.len() >= n || s.iter().any(|&i| i >= n) {
        return Err(StateError::BadSubset(subset.to_vec()));
    }
    Ok(s)
}

/// Traces out the subsystems in `discard`; the kept subsystems stay in their
/// original order.
pub fn partial_trace(rho: &DensityMatrix, discard: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_subsystems();
    let discard = validate_subset(discard, n)?;
    let keep: Vec<usize> = (0..n).filter(|i| !discard.contains(i)).collect();
    let keep_off = subset_offsets(&rho.dims, &keep);
    let disc_off = subset_offsets(&rho.dims, &discard);
    let m = &rho.matrix;
    let mut out = ComplexMatrix::zeros(keep_off.len());
    for (i, &ri) in keep_off.iter().enumerate() {
        for (j, &rj) in keep_off.iter().enumerate() {
            out[(i, j)] = disc_off.iter().map(|&t| m[(ri + t, rj + t)]).sum();
        }
    }
    let dims = keep.iter().map(|&i| rho.dims[i]).collect();
    Ok(DensityMatrix::from_parts_unchecked(out, dims))
}

/// Amplitudes of `psi` arranged as a matrix with rows indexed by the joint
/// value of `rows` and columns by the joint value of the remaining subsystems:
/// `ρ_rows = M M†`.
pub(crate) fn amplitude_matrix(psi: &PureState, rows: &[usize]) -> Vec<Vec<Complex64>> {
    let cols: Vec<usize> = (0..psi.num_subsystems()).filter(|i| !rows.contains(i)).collect();
    let row_off = subset_offsets(&psi.dims, rows);
    let col_off = subset_offsets(&psi.dims, &cols);
    row_off
        .iter()
        .map(|&r| col_off.iter().map(|&c| psi.amplitudes[r + c]).collect())
        .collect()
}

/// Three-qubit canonical form
/// `λ0|000⟩ + λ1 e^{iφ}|100⟩ + λ2|101⟩ + λ3|110⟩ + λ4|111⟩`.
pub fn acin_state(lambdas: [f64; 5], phi: f64) -> Result<PureState> {
    if let Some((index, &value)) = lambdas.iter().enumerate().find(|(_, &l)| l < 0.0) {
        return Err(StateError::NegativeCoefficient { index, value });
    }
    let s: f64 = lambdas.iter().map(|l| l * l).sum();
    if (s - 1.0).abs() > FAMILY_NORM_TOL {
        return Err(StateError::NotNormalized(s));
    }
    if !(0.0..=PI).contains(&phi) {
        return Err(StateError::BadPhase(phi));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b000] = Complex64::new(lambdas[0], 0.0);
    amps[0b100] = Complex64::from_polar(lambdas[1], phi);
    amps[0b101] = Complex64::new(lambdas[2], 0.0);
    amps[0b110] = Complex64::new(lambdas[3], 0.0);
    amps[0b111] = Complex64::new(lambdas[4], 0.0);
    // already unit norm to 1e-10; keep the coefficients exactly as given
    Ok(PureState {
        dims: vec![2; 3],
        amplitudes: amps,
        norm_factor: 1.0,
    })
}

/// `p |W⟩⟨W| + (1 - p)|000⟩⟨000|` with `|W⟩ = a1|100⟩ + a2|010⟩ + a3|001⟩`.
pub fn w_mixture(a: [f64; 3], p: f64) -> Result<DensityMatrix> {
    if let Some((index, &value)) = a.iter().enumerate().find(|(_, &x)| x < 0.0) {
        return Err(StateError::NegativeCoefficient { index, value });
    }
    let s: f64 = a.iter().map(|x| x * x).sum();
    if (s - 1.0).abs() > FAMILY_NORM_TOL {
        return Err(StateError::NotNormalized(s));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::BadProbability(p));
    }
    let mut w = vec![Complex64::new(0.0, 0.0); 8];
    w[0b100] = Complex64::new(a[0], 0.0);
    w[0b010] = Complex64::new(a[1], 0.0);
    w[0b001] = Complex64::new(a[2], 0.0);
    let mut m = ComplexMatrix::outer(&w).scale(Complex64::new(p, 0.0));
    m[(0, 0)] += Complex64::new(1.0 - p, 0.0);
    Ok(DensityMatrix::from_parts_unchecked(m, vec![2; 3]))
}

/// Seeded source of standard complex Gaussians.
///
/// Backed by ChaCha8 (`rand_chacha`), whose output stream is fixed across
/// platforms for a given seed and stream id. Normal deviates come from the
/// Box–Muller transform so the whole pipeline is reproducible bit for bit.
#[derive(Debug, Clone)]
pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream under the same seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// One complex number with independent N(0,1) real and imaginary parts.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        // 1 - U maps [0,1) onto (0,1] so the log is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * PI * u2;
        Complex64::new(r * t.cos(), r * t.sin())
    }

    /// Haar-random `n`-qubit pure state.
    pub fn pure(&mut self, n_qubits: usize) -> Result<PureState> {
        if n_qubits > MAX_SAMPLED_QUBITS {
            return Err(StateError::TooLarge(n_qubits));
        }
        if n_qubits == 0 {
            return Err(StateError::BadDims);
        }
        let amps = (0..1usize << n_qubits).map(|_| self.complex_gaussian()).collect();
        PureState::new(amps, vec![2; n_qubits])
    }

    /// Haar-random 2×2 unitary (QR of a Ginibre matrix with phase fix).
    pub fn unitary2(&mut self) -> ComplexMatrix {
        let (a, b) = (self.complex_gaussian(), self.complex_gaussian());
        let (c, d) = (self.complex_gaussian(), self.complex_gaussian());
        // Gram–Schmidt on columns (a, b) and (c, d)
        let n1 = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (q0, q1) = (a / n1, b / n1);
        let proj = q0.conj() * c + q1.conj() * d;
        let (r0, r1) = (c - proj * q0, d - proj * q1);
        let n2 = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
        ComplexMatrix::from_entries(2, vec![q0, r0 / n2, q1, r1 / n2]).expect("2x2")
    }
}

/// Haar-random pure state of `n_qubits` qubits, fully determined by `seed`.
pub fn haar_random_pure(n_qubits: usize, seed: u64) -> Result<PureState> {
    StateSampler::new(seed).pure(n_qubits)
}
