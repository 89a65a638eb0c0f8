//! Concurrence: the pure-state formula, Wootters' two-qubit formula, and the
//! focus-versus-rest entanglement vector fed to the bound evaluators.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{herm_eig, kron, singular_values, ComplexMatrix, LinalgError};
use crate::states::{amplitude_matrix, partial_trace, BipartiteSplit, DensityMatrix, PureState, StateError};

/// Concurrences below this are reported as exactly zero.
pub const ZERO_CUTOFF: f64 = 1e-12;
/// Eigenvalues of a two-qubit density matrix at or below this are dropped
/// when factoring `ρ = W W†`.
pub const RANK_CUTOFF: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("all subsystems must be qubits, got dims {0:?}")]
    NotQubits(Vec<usize>),
    #[error("expected a two-qubit state, got dims {0:?}")]
    WrongDimension(Vec<usize>),
    #[error("invalid split: {0}")]
    BadSplit(#[source] StateError),
    #[error("focus index {focus} out of range for {n} subsystems")]
    BadFocus { focus: usize, n: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, EntanglementError>;

/// Either kind of state accepted by [`concurrence_vector`].
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Pure(p) => p.dims(),
            State::Mixed(m) => m.dims(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, State::Pure(_))
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityMatrix> for State {
    fn from(m: DensityMatrix) -> Self {
        State::Mixed(m)
    }
}

/// `E(ρ_{A|B₁⋯B_{N−1}})` (when known) together with every `E(ρ_{A|B_i})`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementVector {
    pub total: Option<f64>,
    pub pairwise: Vec<f64>,
    pub measure_tag: String,
    pub alpha_default: f64,
}

impl EntanglementVector {
    pub fn new(total: Option<f64>, pairwise: Vec<f64>) -> Self {
        Self {
            total,
            pairwise,
            measure_tag: "concurrence".to_string(),
            alpha_default: 2.0,
        }
    }

    /// Number of parties `N` (focus plus the `pairwise.len()` others).
    pub fn parties(&self) -> usize {
        self.pairwise.len() + 1
    }

    /// Convenience: the same vector with `pairwise` sorted descending.
    /// The bound evaluators never reorder on their own.
    pub fn sorted_descending(&self) -> Self {
        let mut out = self.clone();
        out.pairwise.sort_by(|a, b| b.total_cmp(a));
        out
    }
}

fn snap(c: f64) -> f64 {
    if c < ZERO_CUTOFF {
        0.0
    } else {
        c
    }
}

/// `√(2(1 − Tr ρ_A²))` for the reduction onto `split.focus()`.
///
/// Evaluated as `2·√e₂(ρ_A)` where `e₂(M M†)` is the sum of squared 2×2 minors
/// of the amplitude matrix `M` (Cauchy–Binet). For unit-norm states this is
/// the same quantity without subtracting the purity from one.
pub fn pure_concurrence(psi: &PureState, split: &BipartiteSplit) -> Result<f64> {
    let n = psi.num_subsystems();
    if split.focus().iter().chain(split.rest()).any(|&i| i >= n) || split.focus().len() + split.rest().len() != n {
        return Err(EntanglementError::BadSplit(StateError::BadSubset(split.focus().to_vec())));
    }
    let m = amplitude_matrix(psi, split.focus());
    let (rows, cols) = (m.len(), m[0].len());
    let mut e2 = 0.0;
    for i in 0..rows {
        for j in (i + 1)..rows {
            for k in 0..cols {
                for l in (k + 1)..cols {
                    e2 += (m[i][k] * m[j][l] - m[i][l] * m[j][k]).norm_sqr();
                }
            }
        }
    }
    Ok(snap(2.0 * e2.sqrt()))
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(EntanglementError::WrongDimension(rho.dims().to_vec()));
    }
    Ok(())
}

/// `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_two_qubits(rho)?;
    let yy = kron(&ComplexMatrix::pauli_y(), &ComplexMatrix::pauli_y());
    Ok(&(&yy * &rho.matrix().conj()) * &yy)
}

/// `(σ_y ⊗ σ_y) w`.
fn spin_flip_vector(w: &[Complex64; 4]) -> [Complex64; 4] {
    [-w[3], w[2], w[1], -w[0]]
}

/// Wootters concurrence from any factor `ρ = Σ_k w_k w_k†` (unnormalised
/// columns). The `λ_i` are the singular values of the symmetric matrix
/// `τ_kl = w_kᵀ (σ_y ⊗ σ_y) w_l`.
pub(crate) fn concurrence_from_factor(columns: &[[Complex64; 4]]) -> f64 {
    let r = columns.len();
    if r == 0 {
        return 0.0;
    }
    let flipped: Vec<[Complex64; 4]> = columns.iter().map(spin_flip_vector).collect();
    let mut tau = ComplexMatrix::zeros(r);
    for k in 0..r {
        for l in 0..r {
            tau[(k, l)] = columns[k].iter().zip(&flipped[l]).map(|(a, b)| a * b).sum();
        }
    }
    let mut lambda = singular_values(&tau);
    lambda.resize(lambda.len().max(4), 0.0);
    snap((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

/// `max{0, λ₁ − λ₂ − λ₃ − λ₄}` for a two-qubit density matrix.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let spec = herm_eig(rho.matrix())?;
    let columns: Vec<[Complex64; 4]> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > RANK_CUTOFF)
        .map(|(j, &p)| {
            let s = p.sqrt();
            let v = spec.eigenvector(j);
            [v[0] * s, v[1] * s, v[2] * s, v[3] * s]
        })
        .collect();
    Ok(concurrence_from_factor(&columns))
}

/// Two-qubit concurrence of the reduction of `psi` onto `(a, b)`, factored
/// straight from the amplitudes.
fn pairwise_from_pure(psi: &PureState, a: usize, b: usize) -> f64 {
    let m = amplitude_matrix(psi, &[a, b]);
    let columns: Vec<[Complex64; 4]> = (0..m[0].len())
        .map(|k| [m[0][k], m[1][k], m[2][k], m[3][k]])
        .collect();
    concurrence_from_factor(&columns)
}

/// Entanglement vector with subsystem `focus` as party A and the remaining
/// subsystems, in index order, as `B_1 … B_{N−1}`.
pub fn concurrence_vector(state: &State, focus: usize) -> Result<EntanglementVector> {
    let dims = state.dims();
    if dims.iter().any(|&d| d != 2) {
        return Err(EntanglementError::NotQubits(dims.to_vec()));
    }
    let n = dims.len();
    if focus >= n {
        return Err(EntanglementError::BadFocus { focus, n });
    }
    let split = BipartiteSplit::new(&[focus], n).map_err(EntanglementError::BadSplit)?;
    let others = split.rest().to_vec();
    match state {
        State::Pure(psi) => {
            let total = pure_concurrence(psi, &split)?;
            let pairwise = others.iter().map(|&b| pairwise_from_pure(psi, focus, b)).collect();
            Ok(EntanglementVector::new(Some(total), pairwise))
        }
        State::Mixed(rho) => {
            let pairwise = others
                .iter()
                .map(|&b| {
                    let discard: Vec<usize> = others.iter().copied().filter(|&x| x != b).collect();
                    let two = if discard.is_empty() {
                        rho.clone()
                    } else {
                        partial_trace(rho, &discard).map_err(EntanglementError::BadSplit)?
                    };
                    wootters_concurrence(&two)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(EntanglementVector::new(None, pairwise))
        }
    }
}
