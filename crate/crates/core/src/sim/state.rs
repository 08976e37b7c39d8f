use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, pairwise_sum_complex, Real};

/// Splits a register into an ancilla block and a system block.
///
/// The ancilla occupies the most-significant bits of a basis index, so
/// `index = (ancilla_index << system_qubits) | system_index`. System qubits are
/// global qubits `0..system_qubits`, ancilla qubits follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub ancilla_qubits: usize,
    pub system_qubits: usize,
}

impl RegisterLayout {
    pub fn new(ancilla_qubits: usize, system_qubits: usize) -> Result<Self> {
        if system_qubits == 0 {
            return Err(Error::InvalidParameter("system register needs at least one qubit".into()));
        }
        Ok(Self { ancilla_qubits, system_qubits })
    }

    pub fn total_qubits(&self) -> usize {
        self.ancilla_qubits + self.system_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.total_qubits()
    }

    pub fn system_dim(&self) -> usize {
        1 << self.system_qubits
    }

    pub fn index(&self, ancilla: usize, system: usize) -> usize {
        debug_assert!(ancilla < (1 << self.ancilla_qubits) && system < self.system_dim());
        (ancilla << self.system_qubits) | system
    }

    pub fn split(&self, index: usize) -> (usize, usize) {
        (index >> self.system_qubits, index & (self.system_dim() - 1))
    }

    /// Global qubits of the system register, least significant first.
    pub fn system_wires(&self) -> Vec<usize> {
        (0..self.system_qubits).collect()
    }

    /// Global qubits of the ancilla register, least significant first.
    pub fn ancilla_wires(&self) -> Vec<usize> {
        (self.system_qubits..self.total_qubits()).collect()
    }

    /// Every qubit, with the system register first; matches the local bit order of
    /// operators built on `system ⊗ ancilla` layouts.
    pub fn all_wires(&self) -> Vec<usize> {
        (0..self.total_qubits()).collect()
    }
}

/// Dense complex amplitude vector over `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVec<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVec<T> {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Self { num_qubits, amps }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, got: index });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { num_qubits, amps })
    }

    /// Checked constructor: length must be a power of two and the vector normalized.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let state = Self::from_unnormalized(amps)?;
        let norm = state.norm();
        if (norm - T::one()).abs() > T::unitary_tol() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(state)
    }

    /// Builds a vector without the normalization check. Used for projections and
    /// operator columns, which are legitimately sub-normalized.
    pub fn from_unnormalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amps })
    }

    /// Haar-random pure state: normalized complex Gaussian vector.
    pub fn haar_random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << num_qubits;
        let mut amps: Vec<Complex<T>> = (0..dim)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        let norm = norm_of(&amps);
        for a in &mut amps {
            *a = *a / norm;
        }
        Self { num_qubits, amps }
    }

    /// `|ancilla⟩ ⊗ |system⟩` with the ancilla in the high bits.
    pub fn tensor(ancilla: &StateVec<T>, system: &StateVec<T>) -> Self {
        let mut amps = Vec::with_capacity(ancilla.dim() * system.dim());
        for a in &ancilla.amps {
            for s in &system.amps {
                amps.push(*a * *s);
            }
        }
        Self { num_qubits: ancilla.num_qubits + system.num_qubits, amps }
    }

    /// `|0…0⟩_ancilla ⊗ |system⟩`.
    pub fn with_zero_ancilla(ancilla_qubits: usize, system: &StateVec<T>) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); system.dim() << ancilla_qubits];
        amps[..system.dim()].copy_from_slice(&system.amps);
        Self { num_qubits: ancilla_qubits + system.num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn norm(&self) -> T {
        norm_of(&self.amps)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same(other)?;
        let terms: Vec<Complex<T>> =
            self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).collect();
        Ok(pairwise_sum_complex(&terms))
    }

    /// Euclidean distance `‖self − other‖₂`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        let terms: Vec<T> =
            self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).collect();
        Ok(pairwise_sum(&terms).sqrt())
    }

    fn check_layout(&self, layout: &RegisterLayout) -> Result<()> {
        if layout.total_qubits() != self.num_qubits {
            return Err(Error::LayoutMismatch(format!(
                "layout has {} qubits, state has {}",
                layout.total_qubits(),
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// `P|self⟩` with `P = |0⟩⟨0|_ancilla ⊗ 𝟙`, together with its squared norm.
    /// The returned vector is not renormalized.
    pub fn project_ancilla_zero(&self, layout: &RegisterLayout) -> Result<(StateVec<T>, T)> {
        self.check_layout(layout)?;
        let sys = layout.system_dim();
        let mut amps = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        amps[..sys].copy_from_slice(&self.amps[..sys]);
        let weights: Vec<T> = amps[..sys].iter().map(|a| a.norm_sqr()).collect();
        let weight = pairwise_sum(&weights);
        Ok((StateVec { num_qubits: self.num_qubits, amps }, weight))
    }

    /// System amplitudes of the ancilla-`|0⟩` block, `(⟨0| ⊗ 𝟙)|self⟩`.
    pub fn ancilla_zero_block(&self, layout: &RegisterLayout) -> Result<StateVec<T>> {
        self.check_layout(layout)?;
        Ok(StateVec {
            num_qubits: layout.system_qubits,
            amps: self.amps[..layout.system_dim()].to_vec(),
        })
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self { num_qubits: self.num_qubits, amps: self.amps.iter().map(|a| a * factor).collect() }
    }
}

fn norm_of<T: Real>(amps: &[Complex<T>]) -> T {
    let sq: Vec<T> = amps.iter().map(|a| a.norm_sqr()).collect();
    pairwise_sum(&sq).sqrt()
}
