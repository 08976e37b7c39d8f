//! Phase-estimation reflector: `q` estimation blocks sharing one system register,
//! a multi-controlled reflection on all estimation qubits, and `A = W† R W`.

use serde::{Deserialize, Serialize};

use crate::accounting::ResourceLedger;
use crate::error::{Error, Result};
use crate::lcu::{ancilla_reflection, QftMode};
use crate::prep::{qft, QftSpec};
use crate::sim::{gates, CircuitOp, RegisterLayout, Step};
use crate::spectral::EigenUnitary;
use crate::Op;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeaParams {
    /// Qubits per estimation register.
    pub n_prime: usize,
    /// Number of registers.
    pub q: usize,
    pub epsilon: f64,
    pub delta: f64,
}

impl PeaParams {
    pub fn ancilla_qubits(&self) -> usize {
        self.q * self.n_prime
    }

    /// `2^{n'}`.
    pub fn register_dim(&self) -> u64 {
        1u64 << self.n_prime
    }

    /// Controlled-`U` queries of `A = W† R W`.
    pub fn queries(&self) -> u64 {
        2 * self.q as u64 * (self.register_dim() - 1)
    }
}

/// `n' = ⌈log₂(4/sin(Δ/2))⌉` keeps every gapped all-zero amplitude of one register
/// at most `1/4`; `q = ⌈log₁₆(4/ε²)⌉` brings the product below `ε/2`.
pub fn choose_pea_params(epsilon: f64, delta: f64) -> Result<PeaParams> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta <= std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("gap {delta} outside (0, pi]")));
    }
    let n_prime = ((4.0 / (delta / 2.0).sin()).log2().ceil() as usize).max(1);
    let q = (((4.0 / (epsilon * epsilon)).log2() / 4.0).ceil() as usize).max(1);
    Ok(PeaParams { n_prime, q, epsilon, delta })
}

/// `|⟨0|W₁|0, λ⟩| = |Σ_x e^{ixλ}|/M` for a register of `n'` qubits.
pub fn zero_amplitude(n_prime: usize, lambda: f64) -> f64 {
    let m = (1u64 << n_prime) as f64;
    let half = lambda / 2.0;
    if half.sin().abs() < 1e-15 {
        return 1.0;
    }
    ((m * half).sin() / (m * half.sin())).abs()
}

/// One estimation block on `s + n'` qubits (register above the system): Hadamards,
/// controlled `U^{2^j}` by register bit `j`, inverse transform.
pub fn pea_block(u: &EigenUnitary, n_prime: usize, spec: QftSpec) -> Result<Op> {
    if n_prime == 0 || spec.m != n_prime {
        return Err(Error::InvalidParameter(format!("register of {n_prime} qubits with a {}-qubit transform", spec.m)));
    }
    let s = u.system_qubits()?;
    let width = s + n_prime;
    let system: Vec<usize> = (0..s).collect();
    let mut steps = Vec::new();
    for j in 0..n_prime {
        steps.push(Step::new(gates::hadamard(), vec![s + j]));
    }
    for j in 0..n_prime {
        let leg = CircuitOp::controlled(u.power_op(1i64 << j)?, width, system.clone(), vec![s + j], vec![true])?;
        steps.push(Step::new(leg, (0..width).collect()));
    }
    steps.push(Step::new(qft::<f64>(spec).adjoint(), (s..width).collect()));
    Ok(CircuitOp::sequence(width, steps)?.with_label("pea-block"))
}

/// `q` blocks applied in turn, block `r` on register qubits `s + r·n' ..`.
pub fn build_w_pea(u: &EigenUnitary, params: &PeaParams, spec: QftSpec) -> Result<Op> {
    let s = u.system_qubits()?;
    let width = s + params.ancilla_qubits();
    let block = pea_block(u, params.n_prime, spec)?;
    let steps = (0..params.q)
        .map(|r| {
            let base = s + r * params.n_prime;
            let mut wires: Vec<usize> = (0..s).collect();
            wires.extend(base..base + params.n_prime);
            Step::new(block.clone(), wires)
        })
        .collect();
    Ok(CircuitOp::sequence(width, steps)?.with_label("W-pea"))
}

/// `A = W† R W` with `R` on the top `n_total` qubits.
pub fn build_a_pea(w: &Op, n_total: usize) -> Result<Op> {
    let width = w.num_qubits();
    if n_total == 0 || n_total >= width {
        return Err(Error::DimensionMismatch { expected: width - 1, got: n_total });
    }
    let all: Vec<usize> = (0..width).collect();
    let steps = vec![
        Step::new(w.clone(), all.clone()),
        Step::new(ancilla_reflection(n_total)?, (width - n_total..width).collect()),
        Step::new(w.adjoint(), all),
    ];
    Ok(CircuitOp::sequence(width, steps)?.with_label("A-pea"))
}

#[derive(Clone, Debug)]
pub struct PeaReflector {
    pub params: PeaParams,
    pub qft: QftSpec,
    pub w: Op,
    pub a: Op,
    pub layout: RegisterLayout,
    pub ledger: ResourceLedger,
}

impl PeaReflector {
    /// Parameters from `choose_pea_params(ε, gap)`. A budgeted transform uses `ε/2`
    /// unless `qft` says otherwise.
    pub fn build(u: &EigenUnitary, epsilon: f64, qft: QftMode) -> Result<Self> {
        let params = choose_pea_params(epsilon, u.gap())?;
        Self::with_params(u, params, qft)
    }

    pub fn with_params(u: &EigenUnitary, params: PeaParams, qft: QftMode) -> Result<Self> {
        let spec = qft.spec(params.n_prime)?;
        let w = build_w_pea(u, &params, spec)?;
        let a = build_a_pea(&w, params.ancilla_qubits())?;
        let layout = RegisterLayout::new(params.ancilla_qubits(), u.system_qubits()?)?;
        let ledger = ResourceLedger::from_footprint(a.footprint(), params.ancilla_qubits() as u64);
        Ok(Self { params, qft: spec, w, a, layout, ledger })
    }
}
