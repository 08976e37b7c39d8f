//! Preparation of the LCU coefficient state.
//!
//! `B̂` prepares the compact Gaussian on `k = log₂(2L*)` qubits with a rotation tree,
//! shifts it to the middle of the `m`-qubit register and applies the centered
//! Fourier transform. `B` adds a two-qubit header that carries the three extra
//! terms of the reflection combination and runs `B̂` on header `|00⟩`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{phi_amplitudes, KernelParams};
use crate::scalar::{pairwise_sum, Real};
use crate::sim::{apply, gates, CircuitOp, DenseMatrix, ResourceFootprint, StateVec, Step};

/// Label attached to footprints that come from decomposition models.
pub const MODELED_HEADER: &str = "header-prep";
pub const MODELED_CONTROLLED_PREP: &str = "controlled-prep";
pub const MODELED_PHASES: &str = "phase-diagonal";

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Angles of a uniformly controlled `R_y` cascade. Level `d` holds `2^d` angles,
/// indexed by the value of the `d` already-prepared high qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationTree<T> {
    pub depth: usize,
    pub angles: Vec<T>,
}

impl<T: Real> RotationTree<T> {
    pub fn from_amplitudes(amplitudes: &[Complex<T>]) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let sq: Vec<T> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        let norm = pairwise_sum(&sq).sqrt();
        if (norm - T::one()).abs() > T::unitary_tol() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        let depth = len.trailing_zeros() as usize;
        // masses[d][p]: probability of the high-bit prefix p of length d
        let mut masses = vec![sq];
        for _ in 0..depth {
            let prev = masses.last().unwrap();
            let next: Vec<T> = prev.chunks(2).map(|c| c[0] + c[1]).collect();
            masses.push(next);
        }
        masses.reverse();
        let mut angles = Vec::with_capacity(len - 1);
        for d in 0..depth {
            let children = &masses[d + 1];
            for p in 0..(1usize << d) {
                let (m0, m1) = (children[2 * p], children[2 * p + 1]);
                angles.push(T::lit(2.0) * m1.sqrt().atan2(m0.sqrt()));
            }
        }
        Ok(Self { depth, angles })
    }

    pub fn level(&self, d: usize) -> &[T] {
        let start = (1usize << d) - 1;
        &self.angles[start..start + (1usize << d)]
    }
}

/// Sequence of uniformly controlled rotations preparing `amplitudes` from `|0…0⟩`.
///
/// Level `d` rotates qubit `k−1−d` conditioned on the `d` qubits above it and is
/// charged `2^d` CNOTs plus `2^d` rotations; level 0 is a single rotation. Complex
/// phases, when present, are fixed by a trailing diagonal.
pub fn rotation_tree_prep<T: Real>(amplitudes: &[Complex<T>]) -> Result<CircuitOp<T>> {
    let tree = RotationTree::from_amplitudes(amplitudes)?;
    let k = tree.depth;
    let mut steps = Vec::new();
    for d in 0..k {
        let target = k - 1 - d;
        let controls: Vec<usize> = (target + 1..k).collect();
        for (p, &theta) in tree.level(d).iter().enumerate() {
            if d == 0 {
                steps.push(Step::new(gates::ry(theta), vec![target]));
                continue;
            }
            // prefix bit i (from the low end) sits on qubit target + 1 + i
            let pattern: Vec<bool> = (0..d).map(|i| p >> i & 1 == 1).collect();
            let op = CircuitOp::controlled(gates::ry(theta), d + 1, vec![0], (1..=d).collect(), pattern)?
                .with_footprint(ResourceFootprint::gates(1, 1));
            let mut wires = vec![target];
            wires.extend(&controls);
            steps.push(Step::new(op, wires));
        }
    }
    let phases: Vec<Complex<T>> = amplitudes
        .iter()
        .map(|a| if a.norm() > T::zero() { a / a.norm() } else { Complex::new(T::one(), T::zero()) })
        .collect();
    if phases.iter().any(|p| p.im.abs() > T::unitary_tol() || p.re < T::zero()) {
        let fp = ResourceFootprint::gates(1u64 << k, 1u64 << k).modeled_as(MODELED_PHASES);
        steps.push(Step::new(CircuitOp::diagonal(phases, fp)?, (0..k).collect()));
    }
    Ok(CircuitOp::sequence(k, steps)?.with_label("rotation-tree"))
}

/// Embeds a `k`-qubit register in the middle of `m` qubits: basis index `j` goes to
/// `j + 2^{m−1} − 2^{k−1}`. One CNOT and one X per appended qubit.
pub fn centering_circuit<T: Real>(k: usize, m: usize) -> Result<CircuitOp<T>> {
    if k == 0 || k >= m {
        return Err(Error::InvalidParameter(format!("centering needs 1 <= k < m, got k={k}, m={m}")));
    }
    let mut steps = Vec::new();
    for j in k..m {
        steps.push(Step::new(gates::cnot(), vec![j, j - 1]));
        steps.push(Step::new(gates::pauli_x(), vec![j - 1]));
    }
    Ok(CircuitOp::sequence(m, steps)?.with_label("centering"))
}

/// Fourier transform on `m` qubits. A truncated transform drops every controlled
/// phase `2π/2^b` with `b > cutoff_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QftSpec {
    pub m: usize,
    pub cutoff_b: usize,
    pub exact: bool,
}

impl QftSpec {
    pub fn exact(m: usize) -> Self {
        Self { m, cutoff_b: m.max(1), exact: true }
    }

    /// Truncation with operator-norm error at most `budget`.
    pub fn with_budget(m: usize, budget: f64) -> Result<Self> {
        if !(budget > 0.0) {
            return Err(Error::InvalidParameter(format!("QFT budget {budget} must be positive")));
        }
        let cutoff_b = ((m as f64 / budget).log2().ceil().max(0.0) as usize + 2).max(1);
        Ok(Self { m, cutoff_b, exact: false })
    }

    fn keeps(&self, b: usize) -> bool {
        self.exact || b <= self.cutoff_b
    }

    /// Controlled phases kept by this spec.
    pub fn kept_rotations(&self) -> usize {
        (0..self.m).map(|w| (0..w).filter(|&j| self.keeps(w - j + 1)).count()).sum()
    }
}

fn swap<T: Real>() -> CircuitOp<T> {
    CircuitOp::permutation(vec![0, 2, 1, 3], ResourceFootprint::gates(3, 0)).unwrap().with_label("swap")
}

/// `F|j⟩ = 2^{−m/2} Σ_k e^{2πijk/2^m}|k⟩`, or its truncation.
pub fn qft<T: Real>(spec: QftSpec) -> CircuitOp<T> {
    let m = spec.m;
    let mut steps = Vec::new();
    for w in (0..m).rev() {
        steps.push(Step::new(gates::hadamard(), vec![w]));
        for j in (0..w).rev() {
            let b = w - j + 1;
            if spec.keeps(b) {
                let theta = T::TAU() / T::lit((1u64 << b) as f64);
                steps.push(Step::new(gates::controlled_phase(theta), vec![w, j]));
            }
        }
    }
    for i in 0..m / 2 {
        steps.push(Step::new(swap(), vec![i, m - 1 - i]));
    }
    CircuitOp::sequence(m, steps).unwrap().with_label(if spec.exact { "qft" } else { "aqft" })
}

/// Centered transform `F σ_z F σ_z F†`, with `σ_z` on the least significant qubit.
/// With the exact transform this equals `X^L F X^L`, `X` the cyclic shift by one.
pub fn centered_qft<T: Real>(spec: QftSpec) -> CircuitOp<T> {
    let m = spec.m;
    let f = qft::<T>(spec);
    let all: Vec<usize> = (0..m).collect();
    let steps = vec![
        Step::new(f.adjoint(), all.clone()),
        Step::new(gates::pauli_z(), vec![0]),
        Step::new(f.clone(), all.clone()),
        Step::new(gates::pauli_z(), vec![0]),
        Step::new(f, all),
    ];
    CircuitOp::sequence(m, steps).unwrap().with_label("centered-qft")
}

/// Dense `2^m`-point DFT matrix in the convention of [`qft`].
pub fn dft_matrix<T: Real>(m: usize) -> DenseMatrix<T> {
    let n = 1usize << m;
    let scale = T::one() / T::lit(n as f64).sqrt();
    DenseMatrix::from_fn(n, |r, c| {
        let e = (r * c) % n;
        Complex::from_polar(scale, T::TAU() * T::lit(e as f64) / T::lit(n as f64))
    })
}

/// Cyclic shift `|j⟩ ↦ |j + shift mod 2^m⟩` as a dense matrix.
pub fn shift_matrix<T: Real>(m: usize, shift: usize) -> DenseMatrix<T> {
    let n = 1usize << m;
    DenseMatrix::from_fn(n, |r, c| {
        if r == (c + shift) % n {
            Complex::new(T::one(), T::zero())
        } else {
            czero()
        }
    })
}

/// `B̂` with the weights `β_l = 2|⟨l|B̂|0⟩|²` it produces.
#[derive(Clone, Debug)]
pub struct BHat<T> {
    pub op: CircuitOp<T>,
    /// `β_{−L} … β_{L−1}`, basis index `l + L`.
    pub beta: Vec<T>,
    /// `B̂|0⟩`.
    pub state: StateVec<T>,
}

pub fn build_b_hat<T: Real>(params: &KernelParams, spec: QftSpec) -> Result<BHat<T>> {
    if params.l_star > params.l {
        return Err(Error::InvalidParameter(format!("L* = {} exceeds L = {}", params.l_star, params.l)));
    }
    if spec.m != params.m {
        return Err(Error::DimensionMismatch { expected: params.m, got: spec.m });
    }
    let m = params.m;
    let k = params.k();
    let mut steps = vec![Step::new(rotation_tree_prep(&phi_amplitudes::<T>(params))?, (0..k).collect())];
    if k < m {
        steps.push(Step::new(centering_circuit(k, m)?, (0..m).collect()));
    }
    steps.push(Step::new(centered_qft(spec), (0..m).collect()));
    let op = CircuitOp::sequence(m, steps)?.with_label("B-hat");
    let state = apply(&op, &StateVec::zero(m), &(0..m).collect::<Vec<_>>())?;
    let beta = state.amplitudes().iter().map(|a| T::lit(2.0) * a.norm_sqr()).collect();
    Ok(BHat { op, beta, state })
}

/// `1/sin(π/10)`, the normalization at which two rounds of amplitude amplification
/// are exact.
pub fn target_normalization<T: Real>() -> T {
    T::one() / (T::PI() / T::lit(10.0)).sin()
}

/// Weight of each of the two sign-correcting header terms, `(1/sin(π/10) − 3)/2`.
pub fn header_weight<T: Real>() -> T {
    (target_normalization::<T>() - T::lit(3.0)) / T::lit(2.0)
}

/// Real orthogonal matrix whose first column is the unit vector `a` (Householder).
fn householder<T: Real>(a: &[T]) -> DenseMatrix<T> {
    let n = a.len();
    let mut v: Vec<T> = a.iter().map(|&x| -x).collect();
    v[0] += T::one();
    let vv: T = v.iter().map(|&x| x * x).fold(T::zero(), |s, x| s + x);
    DenseMatrix::from_fn(n, |r, c| {
        let id = if r == c { T::one() } else { T::zero() };
        let h = if vv > T::zero() { id - T::lit(2.0) * v[r] * v[c] / vv } else { id };
        Complex::new(h, T::zero())
    })
}

/// The full preparation unitary on `m + 2` qubits. The header occupies local qubits
/// `m` (low header bit) and `m + 1` (high header bit).
#[derive(Clone, Debug)]
pub struct BOperator<T> {
    pub n: usize,
    pub op: CircuitOp<T>,
    pub b_hat: BHat<T>,
    /// `|β_{−L}| … |β_{L+2}|`.
    pub beta_magnitudes: Vec<T>,
    pub s: T,
}

pub fn build_b<T: Real>(params: &KernelParams, spec: QftSpec) -> Result<BOperator<T>> {
    let b_hat = build_b_hat::<T>(params, spec)?;
    let m = params.m;
    let h = header_weight::<T>();
    let mut beta_magnitudes: Vec<T> = b_hat.beta.iter().map(|b| b.abs()).collect();
    beta_magnitudes.extend([T::one(), h, h]);
    let s = pairwise_sum(&beta_magnitudes);

    let sum_inner = pairwise_sum(&b_hat.beta);
    let header: Vec<T> = [sum_inner, T::one(), h, h].iter().map(|&w| (w / s).sqrt()).collect();
    let header_op = CircuitOp::dense(householder(&header), ResourceFootprint::gates(3, 0).modeled_as(MODELED_HEADER))?
        .with_label("header");
    let controlled = CircuitOp::controlled(b_hat.op.clone(), m + 2, (0..m).collect(), vec![m, m + 1], vec![false, false])?;
    let fp = b_hat.op.footprint().times(2).modeled_as(MODELED_CONTROLLED_PREP);
    let controlled = controlled.with_footprint(fp);
    let op = CircuitOp::sequence(
        m + 2,
        vec![Step::new(header_op, vec![m, m + 1]), Step::new(controlled, (0..m + 2).collect())],
    )?
    .with_label("B");
    Ok(BOperator { n: m + 2, op, b_hat, beta_magnitudes, s })
}
