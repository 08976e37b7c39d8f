//! Unitaries with a certified eigenphase gap around a unique fixed eigenvector.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::accounting::ResourceLedger;
use crate::error::{Error, Result};
use crate::sim::{CircuitOp, DenseMatrix, ResourceFootprint, StateVec};
use crate::{StateVector, C64};

/// Tolerance for unitarity of the stored eigenbasis.
const BASIS_TOL: f64 = 1e-10;
/// Tolerance when matching a requested eigenvalue.
const EIGEN_MATCH_TOL: f64 = 1e-8;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `U = V diag(e^{iλ_j}) V†` with `λ_0 = 0` simple and every other phase in
/// `[gap, 2π − gap]`. Column `j` of the eigenbasis is `|ψ_j⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "EigenUnitaryDoc", try_from = "EigenUnitaryDoc")]
pub struct EigenUnitary {
    eigenphases: Vec<f64>,
    eigenbasis: DMatrix<C64>,
    gap: f64,
}

/// Serialized form; `eigenbasis` is row-major `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct EigenUnitaryDoc {
    dimension: usize,
    eigenphases: Vec<f64>,
    eigenbasis: Vec<[f64; 2]>,
    gap: f64,
}

impl From<EigenUnitary> for EigenUnitaryDoc {
    fn from(u: EigenUnitary) -> Self {
        let d = u.dimension();
        let mut eigenbasis = Vec::with_capacity(d * d);
        for r in 0..d {
            for col in 0..d {
                let z = u.eigenbasis[(r, col)];
                eigenbasis.push([z.re, z.im]);
            }
        }
        Self { dimension: d, eigenphases: u.eigenphases, eigenbasis, gap: u.gap }
    }
}

impl TryFrom<EigenUnitaryDoc> for EigenUnitary {
    type Error = Error;
    fn try_from(doc: EigenUnitaryDoc) -> Result<Self> {
        let d = doc.dimension;
        if doc.eigenbasis.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: doc.eigenbasis.len() });
        }
        let v = DMatrix::from_row_iterator(d, d, doc.eigenbasis.iter().map(|p| c(p[0], p[1])));
        EigenUnitary::new(doc.eigenphases, v, doc.gap)
    }
}

impl EigenUnitary {
    pub fn new(eigenphases: Vec<f64>, eigenbasis: DMatrix<C64>, gap: f64) -> Result<Self> {
        let d = eigenphases.len();
        if d < 2 || eigenbasis.nrows() != d || eigenbasis.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: eigenbasis.nrows() });
        }
        if !(gap > 0.0) {
            return Err(Error::InvalidParameter(format!("gap {gap} must be positive")));
        }
        if eigenphases[0] != 0.0 {
            return Err(Error::InvalidParameter("target eigenphase must be 0".into()));
        }
        for (j, &l) in eigenphases.iter().enumerate().skip(1) {
            if !(l >= gap - 1e-12 && l <= TAU - gap + 1e-12) {
                return Err(Error::InvalidParameter(format!("eigenphase {j} = {l} violates gap {gap}")));
            }
        }
        let dev = (eigenbasis.adjoint() * &eigenbasis - DMatrix::identity(d, d)).camax();
        if dev > BASIS_TOL {
            return Err(Error::InvalidParameter(format!("eigenbasis not unitary (deviation {dev})")));
        }
        Ok(Self { eigenphases, eigenbasis, gap })
    }

    pub fn dimension(&self) -> usize {
        self.eigenphases.len()
    }

    pub fn eigenphases(&self) -> &[f64] {
        &self.eigenphases
    }

    pub fn eigenbasis(&self) -> &DMatrix<C64> {
        &self.eigenbasis
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn system_qubits(&self) -> Result<usize> {
        let d = self.dimension();
        if !d.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(d));
        }
        Ok(d.trailing_zeros() as usize)
    }

    /// `|ψ_j⟩`.
    pub fn eigenvector(&self, j: usize) -> Result<StateVector> {
        self.system_qubits()?;
        StateVec::from_unnormalized(self.eigenbasis.column(j).iter().copied().collect())
    }

    pub fn target(&self) -> Result<StateVector> {
        self.eigenvector(0)
    }

    /// `U^k = V diag(e^{ikλ_j}) V†`.
    pub fn power_matrix(&self, k: i64) -> DMatrix<C64> {
        let phases: Vec<C64> = self.eigenphases.iter().map(|&l| C64::from_polar(1.0, k as f64 * l)).collect();
        let mut scaled = self.eigenbasis.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        scaled * self.eigenbasis.adjoint()
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        self.power_matrix(1)
    }

    /// `U^k` as an operator charged `|k|` queries.
    pub fn power_op(&self, k: i64) -> Result<CircuitOp<f64>> {
        self.system_qubits()?;
        let m = to_dense(&self.power_matrix(k));
        Ok(CircuitOp::dense(m, ResourceFootprint::queries(k.unsigned_abs()))?.with_label(format!("U^{k}")))
    }

    /// `U^k|state⟩` through the eigendecomposition, charging `|k|` queries.
    pub fn power_apply(&self, k: i64, state: &StateVector, ledger: &mut ResourceLedger) -> Result<StateVector> {
        let d = self.dimension();
        if state.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: state.dim() });
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        let mut coeffs = self.eigenbasis.adjoint() * v;
        for (j, x) in coeffs.iter_mut().enumerate() {
            *x *= C64::from_polar(1.0, k as f64 * self.eigenphases[j]);
        }
        let out = &self.eigenbasis * coeffs;
        ledger.charge_queries(k.unsigned_abs());
        StateVec::from_unnormalized(out.iter().copied().collect())
    }

    /// Exact `R = 2|ψ_0⟩⟨ψ_0| − 𝟙`.
    pub fn reflection_matrix(&self) -> DMatrix<C64> {
        let psi = self.eigenbasis.column(0);
        let d = self.dimension();
        psi * psi.adjoint() * c(2.0, 0.0) - DMatrix::identity(d, d)
    }

    pub fn reflect(&self, state: &StateVector) -> Result<StateVector> {
        let psi = self.target()?;
        let overlap = psi.inner(state)?;
        let amps = psi
            .amplitudes()
            .iter()
            .zip(state.amplitudes())
            .map(|(p, x)| p * overlap * 2.0 - x)
            .collect();
        StateVec::from_unnormalized(amps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("eigen unitary serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }
}

pub(crate) fn to_dense(m: &DMatrix<C64>) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(m.nrows(), |r, col| m[(r, col)])
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random instance: Haar eigenbasis, `λ_0 = 0` and the rest uniform on `[Δ, 2π − Δ]`.
pub fn synth_unitary(dim: usize, gap: f64, seed: u64) -> Result<EigenUnitary> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dimension {dim} must be at least 2")));
    }
    if !(gap > 0.0 && gap <= PI) {
        return Err(Error::InvalidParameter(format!("gap {gap} outside (0, pi]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = haar_unitary(dim, &mut rng);
    let mut phases = vec![0.0];
    for _ in 1..dim {
        let u: f64 = rng.gen();
        phases.push(gap + (TAU - 2.0 * gap) * u);
    }
    EigenUnitary::new(phases, v, gap)
}

/// Eigenphases in `[0, 2π)` and orthonormal eigenvectors of a unitary matrix.
///
/// Diagonalizes the Hermitian part `(U + U†)/2`, then splits each of its degenerate
/// clusters (phases `λ` and `2π − λ`, or a genuinely degenerate phase) with the
/// anti-Hermitian part `(U − U†)/2i` compressed to the cluster.
pub fn diagonalize_unitary(u: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let d = u.nrows();
    let re_part = (u + u.adjoint()) * c(0.5, 0.0);
    let im_part = (u - u.adjoint()) * c(0.0, -0.5);
    let eig = nalgebra::SymmetricEigen::new(re_part);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut vectors = DMatrix::<C64>::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < 1e-8 {
            end += 1;
        }
        let cluster = DMatrix::from_fn(d, end - start, |r, col| eig.eigenvectors[(r, order[start + col])]);
        let compressed = cluster.adjoint() * &im_part * &cluster;
        let compressed = (&compressed + compressed.adjoint()) * c(0.5, 0.0);
        let inner = nalgebra::SymmetricEigen::new(compressed);
        let rotated = cluster * inner.eigenvectors;
        vectors.columns_mut(start, end - start).copy_from(&rotated);
        start = end;
    }

    let mut phases = Vec::with_capacity(d);
    for j in 0..d {
        let v = vectors.column(j);
        let ph = (v.adjoint() * u * v)[(0, 0)].arg();
        phases.push(if ph < 0.0 { ph + TAU } else { ph });
    }
    let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        phases.iter().map(|&p| C64::from_polar(1.0, p)),
    ));
    let residual = (u * &vectors - &vectors * lam).camax();
    if residual > 1e-9 {
        return Err(Error::InvalidParameter(format!("matrix is not unitary (residual {residual})")));
    }
    Ok((phases, vectors))
}

/// Brings the eigenpair with phase nearest 0 to the front, rotates every phase by
/// it so the target phase is exactly 0, and measures the gap.
fn normalize_target(phases: Vec<f64>, vectors: DMatrix<C64>) -> Result<EigenUnitary> {
    let d = phases.len();
    let dist = |p: f64| p.min(TAU - p);
    let i0 = (0..d).min_by(|&a, &b| dist(phases[a]).total_cmp(&dist(phases[b]))).unwrap();
    let shift = phases[i0];
    let mut order = vec![i0];
    order.extend((0..d).filter(|&j| j != i0));
    let rotated: Vec<f64> = order
        .iter()
        .map(|&j| {
            let p = (phases[j] - shift).rem_euclid(TAU);
            if j == i0 {
                0.0
            } else {
                p
            }
        })
        .collect();
    let gap = rotated[1..].iter().map(|&p| dist(p)).fold(f64::INFINITY, f64::min);
    if gap < EIGEN_MATCH_TOL {
        return Err(Error::DegenerateTarget(d));
    }
    let basis = DMatrix::from_fn(d, d, |r, col| vectors[(r, order[col])]);
    EigenUnitary::new(rotated, basis, gap)
}

/// The search-derived instance: `U = −e^{−i cos⁻¹(1 − 2/D)} V† R_s R_t V`.
#[derive(Clone, Debug)]
pub struct GroverInstance {
    pub dimension: usize,
    pub marked: usize,
    pub uniform: StateVector,
    /// `U` exactly as assembled, before the global-phase normalization.
    pub raw_matrix: DMatrix<C64>,
    /// `U` with the eigenvalue nearest 1 rotated onto 1, in eigendecomposed form.
    pub unitary: EigenUnitary,
    /// Global phase removed by the normalization, `arg` of the nearest-to-1 eigenvalue.
    pub phase_correction: f64,
    /// `(|s⟩ + |t⟩)/√(2(1 + 1/√D))`.
    pub ideal_target: StateVector,
}

impl GroverInstance {
    pub fn marked_state(&self) -> StateVector {
        StateVec::basis(self.unitary.system_qubits().unwrap(), self.marked).unwrap()
    }
}

pub fn grover_unitary(dim: usize, marked: usize) -> Result<GroverInstance> {
    if dim < 4 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if marked >= dim {
        return Err(Error::InvalidParameter(format!("marked index {marked} outside dimension {dim}")));
    }
    let d = dim as f64;
    let s = DMatrix::from_element(dim, 1, c(1.0 / d.sqrt(), 0.0));
    let ss = &s * s.adjoint();
    let id = DMatrix::<C64>::identity(dim, dim);
    let v = &id + &ss * c(-1.0, 1.0);
    let r_s = &ss * c(2.0, 0.0) - &id;
    let mut r_t = -id.clone();
    r_t[(marked, marked)] = c(1.0, 0.0);
    let prefactor = -C64::from_polar(1.0, -(1.0 - 2.0 / d).acos());
    let raw = v.adjoint() * r_s * r_t * v * prefactor;

    let (phases, vectors) = diagonalize_unitary(&raw)?;
    let dist = |p: f64| p.min(TAU - p);
    let nearest = phases.iter().copied().min_by(|a, b| dist(*a).total_cmp(&dist(*b))).unwrap();
    let unitary = normalize_target(phases, vectors)?;

    let qubits = dim.trailing_zeros() as usize;
    let uniform = StateVec::from_amplitudes(vec![c(1.0 / d.sqrt(), 0.0); dim])?;
    let norm = (2.0 * (1.0 + 1.0 / d.sqrt())).sqrt();
    let mut ideal = vec![c(1.0 / d.sqrt() / norm, 0.0); dim];
    ideal[marked] += c(1.0 / norm, 0.0);
    let ideal_target = StateVec::from_amplitudes(ideal)?;
    debug_assert_eq!(uniform.num_qubits(), qubits);
    let phase_correction = if nearest > PI { nearest - TAU } else { nearest };
    Ok(GroverInstance { dimension: dim, marked, uniform, raw_matrix: raw, unitary, phase_correction, ideal_target })
}

fn is_hermitian(h: &DMatrix<C64>) -> bool {
    h.is_square() && (h - h.adjoint()).camax() <= 1e-10
}

/// `U = e^{i(H − λ_0)}` by exact eigendecomposition of `H`.
pub fn hamiltonian_unitary(h: &DMatrix<C64>, lambda0: f64) -> Result<EigenUnitary> {
    if !is_hermitian(h) {
        return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
    }
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let norm = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if norm > 1.0 + 1e-12 {
        return Err(Error::NormTooLarge(norm));
    }
    let d = values.len();
    let matches: Vec<usize> = (0..d).filter(|&j| (values[j] - lambda0).abs() <= EIGEN_MATCH_TOL).collect();
    let i0 = match matches.as_slice() {
        [] => return Err(Error::EigenvalueNotFound(lambda0)),
        [i] => *i,
        _ => return Err(Error::DegenerateTarget(matches.len())),
    };
    let mut order = vec![i0];
    order.extend((0..d).filter(|&j| j != i0));
    let phases: Vec<f64> =
        order.iter().map(|&j| if j == i0 { 0.0 } else { (values[j] - lambda0).rem_euclid(TAU) }).collect();
    let gap = phases[1..].iter().map(|&p| p.min(TAU - p)).fold(f64::INFINITY, f64::min);
    let basis = DMatrix::from_fn(d, d, |r, col| eig.eigenvectors[(r, order[col])]);
    EigenUnitary::new(phases, basis, gap)
}
