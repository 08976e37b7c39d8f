use std::collections::BTreeSet;
use std::ops::{Add, AddAssign};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Declared cost of an operator: controlled-`U` queries and `U`-independent gates.
///
/// `modeled` collects labels of costs that come from an analytic decomposition
/// model rather than from an explicit gate list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceFootprint {
    pub queries: u64,
    pub two_qubit_gates: u64,
    pub single_qubit_gates: u64,
    pub modeled: BTreeSet<String>,
}

impl ResourceFootprint {
    pub fn queries(n: u64) -> Self {
        Self { queries: n, ..Self::default() }
    }

    pub fn gates(two_qubit: u64, single_qubit: u64) -> Self {
        Self { two_qubit_gates: two_qubit, single_qubit_gates: single_qubit, ..Self::default() }
    }

    pub fn modeled_as(mut self, label: &str) -> Self {
        self.modeled.insert(label.to_string());
        self
    }

    /// Cost of running the same operator `times` times.
    pub fn times(&self, times: u64) -> Self {
        Self {
            queries: self.queries * times,
            two_qubit_gates: self.two_qubit_gates * times,
            single_qubit_gates: self.single_qubit_gates * times,
            modeled: self.modeled.clone(),
        }
    }
}

impl AddAssign<&ResourceFootprint> for ResourceFootprint {
    fn add_assign(&mut self, rhs: &ResourceFootprint) {
        self.queries += rhs.queries;
        self.two_qubit_gates += rhs.two_qubit_gates;
        self.single_qubit_gates += rhs.single_qubit_gates;
        self.modeled.extend(rhs.modeled.iter().cloned());
    }
}

impl Add for ResourceFootprint {
    type Output = ResourceFootprint;
    fn add(mut self, rhs: ResourceFootprint) -> ResourceFootprint {
        self += &rhs;
        self
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { Complex::new(T::one(), T::zero()) } else { zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex<T>] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = vec![zero::<T>(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == zero() {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        Self { dim: n, data: out }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(r, c) - rhs.get(r, c))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.norm()))
    }

    /// `‖M†M − I‖_max`.
    pub fn unitarity_deviation(&self) -> T {
        self.adjoint().matmul(self).sub(&Self::identity(self.dim)).max_abs()
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).fold(zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// Spectral norm by power iteration on `M†M`.
    pub fn spectral_norm(&self) -> T {
        let n = self.dim;
        let gram = self.adjoint().matmul(self);
        let mut v: Vec<Complex<T>> =
            (0..n).map(|i| Complex::new(T::one() + T::lit(i as f64 * 1e-3), T::lit(0.37 * i as f64).sin())).collect();
        let mut lambda = T::zero();
        for _ in 0..500 {
            let w = gram.mul_vec(&v);
            let nw = w.iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt();
            if nw == T::zero() {
                return T::zero();
            }
            let next = nw;
            v = w.into_iter().map(|x| x / nw).collect();
            if (next - lambda).abs() <= T::epsilon() * next * T::lit(4.0) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }
}

pub(crate) fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// A member of a [`OpKind::Sequence`]: `wires[i]` is the parent-local qubit bound to
/// bit `i` of the member's index.
#[derive(Clone, Debug)]
pub struct Step<T> {
    pub op: CircuitOp<T>,
    pub wires: Vec<usize>,
}

impl<T> Step<T> {
    pub fn new(op: CircuitOp<T>, wires: Vec<usize>) -> Self {
        Self { op, wires }
    }
}

#[derive(Clone, Debug)]
pub enum OpKind<T> {
    Dense(DenseMatrix<T>),
    Diagonal(Vec<Complex<T>>),
    /// Basis index `j` is sent to `perm[j]`.
    Permutation(Vec<usize>),
    /// `inner` acts on `wires` when every qubit in `controls` holds the matching
    /// `pattern` bit.
    Controlled { inner: Box<CircuitOp<T>>, wires: Vec<usize>, controls: Vec<usize>, pattern: Vec<bool> },
    Sequence(Vec<Step<T>>),
}

/// An applicable unitary on `num_qubits` local qubits together with its declared cost.
///
/// Local qubit `i` is bit `i` of the operator's matrix index (least significant
/// first). The same convention binds `targets` in [`crate::sim::apply`] and `wires`
/// in sequence steps.
#[derive(Clone, Debug)]
pub struct CircuitOp<T> {
    num_qubits: usize,
    kind: OpKind<T>,
    footprint: ResourceFootprint,
    label: String,
}

fn check_wires(wires: &[usize], width: usize) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &w in wires {
        if w >= width {
            return Err(Error::TargetOutOfRange { qubit: w, num_qubits: width });
        }
        if !seen.insert(w) {
            return Err(Error::DuplicateTarget(w));
        }
    }
    Ok(())
}

fn check_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

impl<T: Real> CircuitOp<T> {
    pub fn dense(matrix: DenseMatrix<T>, footprint: ResourceFootprint) -> Result<Self> {
        let k = check_len(matrix.dim())?;
        let dev = matrix.unitarity_deviation();
        if dev > T::unitary_tol() {
            return Err(Error::InvalidParameter(format!("matrix is not unitary (deviation {dev})")));
        }
        Ok(Self { num_qubits: k, kind: OpKind::Dense(matrix), footprint, label: "dense".into() })
    }

    pub fn diagonal(entries: Vec<Complex<T>>, footprint: ResourceFootprint) -> Result<Self> {
        let k = check_len(entries.len())?;
        if entries.iter().any(|d| (d.norm() - T::one()).abs() > T::unitary_tol()) {
            return Err(Error::InvalidParameter("diagonal entry off the unit circle".into()));
        }
        Ok(Self { num_qubits: k, kind: OpKind::Diagonal(entries), footprint, label: "diag".into() })
    }

    pub fn permutation(perm: Vec<usize>, footprint: ResourceFootprint) -> Result<Self> {
        let k = check_len(perm.len())?;
        let mut hit = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || hit[p] {
                return Err(Error::InvalidParameter("not a bijection".into()));
            }
            hit[p] = true;
        }
        Ok(Self { num_qubits: k, kind: OpKind::Permutation(perm), footprint, label: "perm".into() })
    }

    /// Controlled operator of width `num_qubits`. The footprint defaults to the
    /// inner operator's; use [`CircuitOp::with_footprint`] to apply a decomposition model.
    pub fn controlled(
        inner: CircuitOp<T>,
        num_qubits: usize,
        wires: Vec<usize>,
        controls: Vec<usize>,
        pattern: Vec<bool>,
    ) -> Result<Self> {
        if wires.len() != inner.num_qubits {
            return Err(Error::DimensionMismatch { expected: inner.num_qubits, got: wires.len() });
        }
        if controls.len() != pattern.len() {
            return Err(Error::DimensionMismatch { expected: controls.len(), got: pattern.len() });
        }
        let all: Vec<usize> = wires.iter().chain(&controls).copied().collect();
        check_wires(&all, num_qubits)?;
        let footprint = inner.footprint.clone();
        let label = format!("c-{}", inner.label);
        Ok(Self {
            num_qubits,
            kind: OpKind::Controlled { inner: Box::new(inner), wires, controls, pattern },
            footprint,
            label,
        })
    }

    /// Ordered product, first step applied first. The footprint is the sum of the steps.
    pub fn sequence(num_qubits: usize, steps: Vec<Step<T>>) -> Result<Self> {
        let mut footprint = ResourceFootprint::default();
        for s in &steps {
            if s.wires.len() != s.op.num_qubits {
                return Err(Error::DimensionMismatch { expected: s.op.num_qubits, got: s.wires.len() });
            }
            check_wires(&s.wires, num_qubits)?;
            footprint += &s.op.footprint;
        }
        Ok(Self { num_qubits, kind: OpKind::Sequence(steps), footprint, label: "seq".into() })
    }

    /// Overrides the declared footprint of a leaf or controlled operator.
    /// Sequences always carry the sum of their members.
    pub fn with_footprint(mut self, footprint: ResourceFootprint) -> Self {
        debug_assert!(!matches!(self.kind, OpKind::Sequence(_)), "sequence footprints are derived");
        if !matches!(self.kind, OpKind::Sequence(_)) {
            self.footprint = footprint;
        }
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn kind(&self) -> &OpKind<T> {
        &self.kind
    }

    pub fn footprint(&self) -> &ResourceFootprint {
        &self.footprint
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn adjoint(&self) -> Self {
        let kind = match &self.kind {
            OpKind::Dense(m) => OpKind::Dense(m.adjoint()),
            OpKind::Diagonal(d) => OpKind::Diagonal(d.iter().map(|x| x.conj()).collect()),
            OpKind::Permutation(p) => {
                let mut inv = vec![0; p.len()];
                for (j, &pj) in p.iter().enumerate() {
                    inv[pj] = j;
                }
                OpKind::Permutation(inv)
            }
            OpKind::Controlled { inner, wires, controls, pattern } => OpKind::Controlled {
                inner: Box::new(inner.adjoint()),
                wires: wires.clone(),
                controls: controls.clone(),
                pattern: pattern.clone(),
            },
            OpKind::Sequence(steps) => OpKind::Sequence(
                steps.iter().rev().map(|s| Step::new(s.op.adjoint(), s.wires.clone())).collect(),
            ),
        };
        let label = match self.label.strip_suffix('†') {
            Some(base) => base.to_string(),
            None => format!("{}†", self.label),
        };
        Self { num_qubits: self.num_qubits, kind, footprint: self.footprint.clone(), label }
    }

    /// Dense matrix of the operator, built column by column through the simulator.
    pub fn to_dense(&self) -> DenseMatrix<T> {
        let dim = 1usize << self.num_qubits;
        let wires: Vec<usize> = (0..self.num_qubits).collect();
        let mut data = vec![zero::<T>(); dim * dim];
        let mut col = vec![zero::<T>(); dim];
        for c in 0..dim {
            col.iter_mut().for_each(|x| *x = zero());
            col[c] = one();
            super::apply::run_in_place(self, &mut col, &wires, None);
            for r in 0..dim {
                data[r * dim + c] = col[r];
            }
        }
        DenseMatrix { dim, data }
    }

    /// `‖Op†Op − I‖_max`, evaluated densely.
    pub fn unitarity_deviation(&self) -> T {
        self.to_dense().unitarity_deviation()
    }

    /// Number of leaf kernels that run when the operator is applied.
    pub fn leaf_count(&self) -> usize {
        match &self.kind {
            OpKind::Sequence(steps) => steps.iter().map(|s| s.op.leaf_count()).sum(),
            OpKind::Controlled { inner, .. } => inner.leaf_count(),
            _ => 1,
        }
    }
}

/// Standard gates. Two-qubit gates bind local bit 0 to the target and bit 1 to the
/// control, so a step `Step::new(cnot(), vec![target, control])` reads naturally.
pub mod gates {
    use super::*;

    fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
        Complex::new(T::lit(re), T::lit(im))
    }

    pub fn hadamard<T: Real>() -> CircuitOp<T> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = DenseMatrix::new(2, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]).unwrap();
        CircuitOp::dense(m, ResourceFootprint::gates(0, 1)).unwrap().with_label("H")
    }

    pub fn pauli_x<T: Real>() -> CircuitOp<T> {
        CircuitOp::permutation(vec![1, 0], ResourceFootprint::gates(0, 1)).unwrap().with_label("X")
    }

    pub fn pauli_z<T: Real>() -> CircuitOp<T> {
        CircuitOp::diagonal(vec![one(), c(-1.0, 0.0)], ResourceFootprint::gates(0, 1))
            .unwrap()
            .with_label("Z")
    }

    /// `R_y(θ)`: `|0⟩ ↦ cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
    pub fn ry<T: Real>(theta: T) -> CircuitOp<T> {
        let half = theta / T::lit(2.0);
        let (s, co) = (half.sin(), half.cos());
        let z = T::zero();
        let m = DenseMatrix::new(
            2,
            vec![Complex::new(co, z), Complex::new(-s, z), Complex::new(s, z), Complex::new(co, z)],
        )
        .unwrap();
        CircuitOp::dense(m, ResourceFootprint::gates(0, 1)).unwrap().with_label("Ry")
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase<T: Real>(theta: T) -> CircuitOp<T> {
        CircuitOp::diagonal(vec![one(), Complex::from_polar(T::one(), theta)], ResourceFootprint::gates(0, 1))
            .unwrap()
            .with_label("P")
    }

    /// Local bit 0 is the target, bit 1 the control.
    pub fn cnot<T: Real>() -> CircuitOp<T> {
        CircuitOp::permutation(vec![0, 1, 3, 2], ResourceFootprint::gates(1, 0)).unwrap().with_label("CX")
    }

    /// Symmetric controlled phase `diag(1, 1, 1, e^{iθ})`.
    pub fn controlled_phase<T: Real>(theta: T) -> CircuitOp<T> {
        CircuitOp::diagonal(
            vec![one(), one(), one(), Complex::from_polar(T::one(), theta)],
            ResourceFootprint::gates(1, 0),
        )
        .unwrap()
        .with_label("CP")
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;

    #[test]
    fn footprint_of_sequence_is_sum() {
        let seq = CircuitOp::<f64>::sequence(
            2,
            vec![
                Step::new(hadamard(), vec![1]),
                Step::new(cnot(), vec![0, 1]),
                Step::new(pauli_x::<f64>().with_footprint(ResourceFootprint::queries(3)), vec![0]),
            ],
        )
        .unwrap();
        let fp = seq.footprint();
        assert_eq!((fp.queries, fp.two_qubit_gates, fp.single_qubit_gates), (3, 1, 1));
    }

    #[test]
    fn constructors_validate() {
        let bad = DenseMatrix::<f64>::new(2, vec![one(), one(), zero(), one()]).unwrap();
        assert!(CircuitOp::dense(bad, ResourceFootprint::default()).is_err());
        assert!(CircuitOp::<f64>::permutation(vec![0, 0], ResourceFootprint::default()).is_err());
        assert!(CircuitOp::<f64>::diagonal(vec![one(); 3], ResourceFootprint::default()).is_err());
        assert!(matches!(
            CircuitOp::sequence(2, vec![Step::new(cnot::<f64>(), vec![1, 1])]),
            Err(Error::DuplicateTarget(1))
        ));
        assert!(matches!(
            CircuitOp::sequence(2, vec![Step::new(hadamard::<f64>(), vec![2])]),
            Err(Error::TargetOutOfRange { .. })
        ));
        assert!(CircuitOp::controlled(hadamard::<f64>(), 2, vec![0], vec![0], vec![true]).is_err());
    }

    #[test]
    fn adjoint_of_sequence_inverts() {
        let seq = CircuitOp::<f64>::sequence(
            2,
            vec![
                Step::new(hadamard(), vec![1]),
                Step::new(controlled_phase(0.3), vec![0, 1]),
                Step::new(ry(1.1), vec![0]),
                Step::new(cnot(), vec![1, 0]),
            ],
        )
        .unwrap();
        let prod = seq.adjoint().to_dense().matmul(&seq.to_dense());
        assert!(prod.sub(&DenseMatrix::identity(4)).max_abs() < 1e-14);
        assert_eq!(seq.adjoint().adjoint().label(), seq.label());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = DenseMatrix::<f64>::from_fn(3, |r, c| if r == c { Complex::new(r as f64 + 0.5, 0.0) } else { zero() });
        assert!((d.spectral_norm() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn cnot_convention() {
        let m = cnot::<f64>().to_dense();
        // index = target + 2*control; control set flips target
        assert_eq!(m.get(3, 2), one());
        assert_eq!(m.get(2, 3), one());
        assert_eq!(m.get(1, 1), one());
    }
}
