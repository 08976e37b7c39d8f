//! Resource ledgers and the ancilla/query scaling comparison.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{select_params, KernelParams};
use crate::lcu::{mcx_two_qubit_gates, MODELED_MCX};
use crate::pea::{choose_pea_params, PeaParams};
use crate::prep::{QftSpec, MODELED_CONTROLLED_PREP, MODELED_HEADER};
use crate::sim::ResourceFootprint;

/// Totals for one construction: queries to controlled-`U`, `U`-independent gates
/// and ancilla width. `modeled` lists costs taken from analytic models.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub queries_u: u64,
    pub two_qubit_gates: u64,
    pub single_qubit_gates: u64,
    pub ancilla_qubits: u64,
    pub modeled: BTreeSet<String>,
}

impl ResourceLedger {
    pub fn from_footprint(footprint: &ResourceFootprint, ancilla_qubits: u64) -> Self {
        Self {
            queries_u: footprint.queries,
            two_qubit_gates: footprint.two_qubit_gates,
            single_qubit_gates: footprint.single_qubit_gates,
            ancilla_qubits,
            modeled: footprint.modeled.clone(),
        }
    }

    pub fn charge_queries(&mut self, n: u64) {
        self.queries_u += n;
    }

    /// Counters add; the ancilla width of two stages run on the same register is
    /// the larger of the two.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            queries_u: self.queries_u + other.queries_u,
            two_qubit_gates: self.two_qubit_gates + other.two_qubit_gates,
            single_qubit_gates: self.single_qubit_gates + other.single_qubit_gates,
            ancilla_qubits: self.ancilla_qubits.max(other.ancilla_qubits),
            modeled: self.modeled.union(&other.modeled).cloned().collect(),
        }
    }
}

/// `(two-qubit, single-qubit)` gates of the transform: kept controlled phases plus
/// three CNOTs per swap, and one Hadamard per qubit.
pub fn qft_gates(spec: &QftSpec) -> (u64, u64) {
    let two = spec.kept_rotations() as u64 + 3 * (spec.m / 2) as u64;
    (two, spec.m as u64)
}

fn reflection_footprint(n: usize) -> ResourceFootprint {
    ResourceFootprint::gates(mcx_two_qubit_gates(n - 1), 2 * n as u64 + 2).modeled_as(MODELED_MCX)
}

/// Footprint of the coefficient-state preparation `B̂`.
pub fn b_hat_footprint(params: &KernelParams, spec: &QftSpec) -> ResourceFootprint {
    let k = params.k() as u64;
    let m = params.m as u64;
    let (q2, q1) = qft_gates(spec);
    let tree = ResourceFootprint::gates((1 << k) - 2, (1 << k) - 1);
    let centering = ResourceFootprint::gates(m - k, m - k);
    let centered = ResourceFootprint::gates(3 * q2, 3 * q1 + 2);
    tree + centering + centered
}

/// Declared footprint of the LCU operator `A`, with raw cascade query counts.
pub fn lcu_footprint(params: &KernelParams, spec: &QftSpec) -> ResourceFootprint {
    let b_hat = b_hat_footprint(params, spec);
    let b = ResourceFootprint::gates(3, 0).modeled_as(MODELED_HEADER) + b_hat.times(2).modeled_as(MODELED_CONTROLLED_PREP);
    let select = ResourceFootprint { queries: 3 * params.l as u64 - 1, single_qubit_gates: 1, ..Default::default() };
    let w = b.times(2) + select;
    w.times(5) + reflection_footprint(params.m + 2).times(4)
}

/// Declared footprint of the PEA operator `A = W† R W`.
pub fn pea_footprint(params: &PeaParams, spec: &QftSpec) -> ResourceFootprint {
    let (q2, q1) = qft_gates(spec);
    let block = ResourceFootprint {
        queries: params.register_dim() - 1,
        two_qubit_gates: q2,
        single_qubit_gates: params.n_prime as u64 + q1,
        ..Default::default()
    };
    block.times(2 * params.q as u64) + reflection_footprint(params.ancilla_qubits())
}

/// One row of the ancilla/query comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub delta: f64,
    pub n_lcu: u64,
    pub n_pea: u64,
    /// Five selects of `L` queries each.
    pub cu_lcu: u64,
    pub cu_pea: u64,
    pub cb_lcu_model: u64,
    pub cb_pea_model: u64,
    /// Queries of the cascade as built, `5(3L − 1)`.
    pub cu_lcu_raw: u64,
    pub l: u64,
    pub n_prime: u64,
    pub q: u64,
}

/// Rows in `eps_grid`-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
}

pub fn compare_scaling(eps_grid: &[f64], delta_grid: &[f64], kernel_constant: f64) -> Result<ScalingTable> {
    if eps_grid.is_empty() || delta_grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let mut rows = Vec::new();
    for &epsilon in eps_grid {
        for &delta in delta_grid {
            let kp = select_params(epsilon, delta, kernel_constant)?;
            let pp = choose_pea_params(epsilon, delta)?;
            let lcu = lcu_footprint(&kp, &QftSpec::with_budget(kp.m, epsilon / 2.0)?);
            let pea = pea_footprint(&pp, &QftSpec::with_budget(pp.n_prime, epsilon / 2.0)?);
            rows.push(ScalingRow {
                epsilon,
                delta,
                n_lcu: kp.m as u64 + 2,
                n_pea: pp.ancilla_qubits() as u64,
                cu_lcu: 5 * kp.l as u64,
                cu_pea: pea.queries,
                cb_lcu_model: lcu.two_qubit_gates,
                cb_pea_model: pea.two_qubit_gates,
                cu_lcu_raw: lcu.queries,
                l: kp.l as u64,
                n_prime: pp.n_prime as u64,
                q: pp.q as u64,
            });
        }
    }
    Ok(ScalingTable { rows })
}

impl ScalingTable {
    /// Named checks of the headline comparison: LCU never needs more ancillas, and
    /// along each gap the PEA width grows with `log(1/ε)` while the LCU width grows
    /// by at most one qubit per squaring of `1/ε`.
    pub fn checks(&self) -> Vec<(String, bool)> {
        let mut out = vec![("n_lcu <= n_pea".to_string(), self.rows.iter().all(|r| r.n_lcu <= r.n_pea))];
        let mut deltas: Vec<f64> = self.rows.iter().map(|r| r.delta).collect();
        deltas.sort_by(f64::total_cmp);
        deltas.dedup();
        for delta in deltas {
            let mut col: Vec<&ScalingRow> = self.rows.iter().filter(|r| r.delta == delta).collect();
            col.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
            for pair in col.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let squarings = ((b.epsilon.ln() / a.epsilon.ln()).log2()).ceil().max(1.0) as u64;
                out.push((
                    format!("delta={delta}: n_lcu {} -> {} within {squarings}", a.n_lcu, b.n_lcu),
                    b.n_lcu <= a.n_lcu + squarings,
                ));
                out.push((format!("delta={delta}: n_pea {} -> {} grows", a.n_pea, b.n_pea), b.n_pea >= a.n_pea));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcu::{LcuConfig, QftMode, ReflectorA};
    use crate::pea::PeaReflector;
    use crate::sim::{apply_counted, StateVec};
    use crate::spectral::synth_unitary;

    #[test]
    fn merge_is_commutative_and_associative() {
        let a = ResourceLedger { queries_u: 3, two_qubit_gates: 1, single_qubit_gates: 0, ancilla_qubits: 4, modeled: ["x".into()].into() };
        let b = ResourceLedger { queries_u: 5, two_qubit_gates: 2, single_qubit_gates: 7, ancilla_qubits: 2, modeled: ["y".into()].into() };
        let c = ResourceLedger { ancilla_qubits: 9, ..ResourceLedger::default() };
        assert_eq!(a.merge(&b), b.merge(&a));
        assert_eq!(a.merge(&b).merge(&c), a.merge(&b.merge(&c)));
    }

    #[test]
    fn closed_forms_match_built_operators() {
        let u = synth_unitary(2, 0.5, 1).unwrap();
        for cfg in [LcuConfig::new(0.1), LcuConfig::new(0.1).exact_qft()] {
            let rf = ReflectorA::build(&u, &cfg).unwrap();
            let spec = cfg.qft.spec(rf.params.m).unwrap();
            assert_eq!(rf.a.footprint(), &lcu_footprint(&rf.params, &spec));
            assert_eq!(rf.ledger.ancilla_qubits, rf.params.m as u64 + 2);
            let mut executed = ResourceFootprint::default();
            let input = StateVec::zero(rf.layout.total_qubits());
            apply_counted(&rf.a, &input, &rf.layout.all_wires(), &mut executed).unwrap();
            assert_eq!(&executed, rf.a.footprint());
        }
        let rf = PeaReflector::build(&u, 0.1, QftMode::Budget(0.05)).unwrap();
        assert_eq!(rf.a.footprint(), &pea_footprint(&rf.params, &rf.qft));
        let mut executed = ResourceFootprint::default();
        let input = StateVec::zero(rf.layout.total_qubits());
        apply_counted(&rf.a, &input, &rf.layout.all_wires(), &mut executed).unwrap();
        assert_eq!(&executed, rf.a.footprint());
    }

    #[test]
    fn scaling_table_is_deterministic_and_consistent() {
        let a = compare_scaling(&[1e-2, 1e-4], &[0.1, 0.01], 40.0).unwrap();
        let b = compare_scaling(&[1e-2, 1e-4], &[0.1, 0.01], 40.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 4);
        assert!(a.checks().iter().all(|(_, ok)| *ok));
        assert!(compare_scaling(&[], &[0.1], 40.0).is_err());
        assert!(compare_scaling(&[0.5], &[0.1], 40.0).is_err());
    }
}
