//! Reflection-contract checks against the exact reflection from diagonalization.
//!
//! An operator `A` on ancilla ⊗ system is simulated once per system basis vector.
//! The ancilla-zero block `M = (⟨0| ⊗ 𝟙) A (|0⟩ ⊗ 𝟙)` then gives, for any `ξ`,
//!
//! ```text
//!   ‖A|0⟩|ξ⟩ − |0⟩R|ξ⟩‖² = ‖Mξ − Rξ‖² + (1 − ‖Mξ‖²)
//! ```
//!
//! because `A` is unitary and everything outside the block is orthogonal to `|0⟩`.
//! The leak term is evaluated as `ξ†Gξ` with `G` the Gram matrix of the simulated
//! columns outside the block, which keeps full relative precision when the error
//! is near roundoff. `1 − ‖Mξ‖²` would lose it to cancellation.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{apply, RegisterLayout, StateVec};
use crate::spectral::EigenUnitary;
use crate::{Op, StateVector, C64};

/// Ancilla-zero block of `op` and how far each simulated column strays from norm 1.
#[derive(Clone, Debug)]
pub struct Block {
    pub matrix: DMatrix<C64>,
    /// Gram matrix of the column parts outside the block.
    pub leak_gram: DMatrix<C64>,
    pub column_norm_deviation: f64,
}

pub fn ancilla_zero_block(op: &Op, layout: &RegisterLayout) -> Result<Block> {
    if op.num_qubits() != layout.total_qubits() {
        return Err(Error::LayoutMismatch(format!(
            "operator has {} qubits, layout {}",
            op.num_qubits(),
            layout.total_qubits()
        )));
    }
    let d = layout.system_dim();
    let wires = layout.all_wires();
    let mut matrix = DMatrix::zeros(d, d);
    let mut outside = Vec::with_capacity(d);
    let mut dev = 0.0f64;
    for j in 0..d {
        let input = StateVec::basis(layout.total_qubits(), layout.index(0, j))?;
        let out = apply(op, &input, &wires)?;
        dev = dev.max((out.norm() - 1.0).abs());
        for (r, a) in out.amplitudes()[..d].iter().enumerate() {
            matrix[(r, j)] = *a;
        }
        let mut amps = out.into_amplitudes();
        amps.drain(..d);
        outside.push(amps);
    }
    let mut leak_gram = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let g: C64 = outside[i].iter().zip(&outside[j]).map(|(a, b)| a.conj() * b).sum();
            leak_gram[(i, j)] = g;
            leak_gram[(j, i)] = g.conj();
        }
    }
    Ok(Block { matrix, leak_gram, column_norm_deviation: dev })
}

fn as_vector(state: &StateVector) -> DVector<C64> {
    DVector::from_column_slice(state.amplitudes())
}

/// Contract distance for one normalized system state, from the block.
pub fn block_error(block: &Block, exact: &DMatrix<C64>, xi: &DVector<C64>) -> f64 {
    let mx = &block.matrix * xi;
    let rx = exact * xi;
    let leak = xi.dotc(&(&block.leak_gram * xi)).re.max(0.0);
    ((&mx - rx).norm_squared() + leak).sqrt()
}

/// `‖A|0⟩|ξ⟩ − |0⟩R|ξ⟩‖` by simulating `A` on the given state.
pub fn direct_error(op: &Op, layout: &RegisterLayout, u: &EigenUnitary, xi: &StateVector) -> Result<f64> {
    let input = StateVec::with_zero_ancilla(layout.ancilla_qubits, xi);
    let out = apply(op, &input, &layout.all_wires())?;
    let target = StateVec::with_zero_ancilla(layout.ancilla_qubits, &u.reflect(xi)?);
    out.distance(&target)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub seed: u64,
    /// Contract distance for each Haar trial, in draw order.
    pub trial_errors: Vec<f64>,
    pub max_error: f64,
    /// Contract distance on each eigenvector `|ψ_j⟩`.
    pub eigen_errors: Vec<f64>,
    pub column_norm_deviation: f64,
}

impl VerifyReport {
    /// Largest error over the gapped eigenvectors `j > 0`.
    pub fn max_gapped_eigen_error(&self) -> f64 {
        self.eigen_errors[1..].iter().copied().fold(0.0, f64::max)
    }
}

/// Samples `trials` Haar states and reports the largest contract distance. The
/// eigenvector errors are reported alongside.
pub fn verify_reflection(
    op: &Op,
    layout: &RegisterLayout,
    u: &EigenUnitary,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    if layout.system_dim() != u.dimension() {
        return Err(Error::DimensionMismatch { expected: u.dimension(), got: layout.system_dim() });
    }
    let block = ancilla_zero_block(op, layout)?;
    verify_with_block(&block, u, trials, seed)
}

pub fn verify_with_block(block: &Block, u: &EigenUnitary, trials: usize, seed: u64) -> Result<VerifyReport> {
    let exact = u.reflection_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qubits = u.system_qubits()?;
    let trial_errors: Vec<f64> = (0..trials)
        .map(|_| block_error(block, &exact, &as_vector(&StateVec::haar_random(qubits, &mut rng))))
        .collect();
    let eigen_errors = (0..u.dimension())
        .map(|j| Ok(block_error(block, &exact, &as_vector(&u.eigenvector(j)?))))
        .collect::<Result<Vec<_>>>()?;
    let max_error = trial_errors.iter().copied().fold(0.0, f64::max);
    Ok(VerifyReport {
        trials,
        seed,
        trial_errors,
        max_error,
        eigen_errors,
        column_norm_deviation: block.column_norm_deviation,
    })
}

/// The Haar trial states drawn by [`verify_reflection`] for `seed`.
pub fn trial_states(qubits: usize, trials: usize, seed: u64) -> Vec<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| StateVec::haar_random(qubits, &mut rng)).collect()
}
