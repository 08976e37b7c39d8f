//! Search benchmark: one approximate reflection maps the uniform state close to the
//! marked state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::accounting::ResourceLedger;
use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::lcu::{LcuConfig, ReflectorA};
use crate::sim::{apply, StateVec};
use crate::spectral::grover_unitary;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverReport {
    pub dimension: usize,
    pub marked: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub gap: f64,
    pub params: KernelParams,
    pub s: f64,
    /// `|⟨s|R|s⟩|` for the exact reflection over the fixed eigenvector.
    pub s_reflect_s: f64,
    /// `|⟨ψ_0|ψ̃_0⟩|²`.
    pub ideal_fidelity: f64,
    /// `|⟨t|R_ideal|s⟩|²` for the ideal reflection over `(|s⟩+|t⟩)` normalized.
    pub ideal_success: f64,
    /// `1 − |⟨t|R|s⟩|²` with the exact reflection over the fixed eigenvector.
    pub nu_exact: f64,
    /// `1 − |⟨0, t|A|0, s⟩|²` with the approximate reflector.
    pub nu: f64,
    /// `4 (1/√D + 10ε)²`.
    pub nu_bound: f64,
    pub ledger: ResourceLedger,
    pub passed: bool,
}

/// Marked index drawn from `seed`.
pub fn marked_index(dim: usize, seed: u64) -> usize {
    ChaCha8Rng::seed_from_u64(seed).gen_range(0..dim)
}

pub fn grover_benchmark(dim: usize, epsilon: f64, seed: u64) -> Result<GroverReport> {
    if dim < 16 || !dim.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("dimension {dim} must be a power of two >= 16")));
    }
    let marked = marked_index(dim, seed);
    let g = grover_unitary(dim, marked)?;
    let u = &g.unitary;
    let target = g.marked_state();

    let reflected = u.reflect(&g.uniform)?;
    let s_reflect_s = g.uniform.inner(&reflected)?.norm();
    let nu_exact = 1.0 - target.inner(&reflected)?.norm_sqr();
    let ideal_fidelity = u.target()?.inner(&g.ideal_target)?.norm_sqr();
    let overlap = g.ideal_target.inner(&g.uniform)?;
    let ideal: Vec<_> = g
        .ideal_target
        .amplitudes()
        .iter()
        .zip(g.uniform.amplitudes())
        .map(|(p, s)| p * overlap * 2.0 - s)
        .collect();
    let ideal_success = target.inner(&StateVec::from_unnormalized(ideal)?)?.norm_sqr();

    let rf = ReflectorA::build(u, &LcuConfig::new(epsilon))?;
    let input = StateVec::with_zero_ancilla(rf.layout.ancilla_qubits, &g.uniform);
    let out = apply(&rf.a, &input, &rf.layout.all_wires())?;
    let nu = 1.0 - out.amplitude(rf.layout.index(0, marked)).norm_sqr();
    let nu_bound = 4.0 * (1.0 / (dim as f64).sqrt() + 10.0 * epsilon).powi(2);
    Ok(GroverReport {
        dimension: dim,
        marked,
        epsilon,
        seed,
        gap: u.gap(),
        params: rf.params.clone(),
        s: rf.s(),
        s_reflect_s,
        ideal_fidelity,
        ideal_success,
        nu_exact,
        nu,
        nu_bound,
        ledger: rf.ledger.clone(),
        passed: nu <= nu_bound && s_reflect_s <= 1e-10,
    })
}
