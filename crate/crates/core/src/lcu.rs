//! Gaussian LCU reflector with two rounds of oblivious amplitude amplification.
//!
//! Register layout of every operator here: system on local qubits `0..s`, then the
//! `m` coefficient qubits, then the two header qubits (low header bit first).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::accounting::ResourceLedger;
use crate::error::{Error, Result};
use crate::kernel::{select_params, KernelParams, DEFAULT_KERNEL_CONSTANT};
use crate::prep::{build_b, BOperator, QftSpec};
use crate::sim::{gates, CircuitOp, RegisterLayout, ResourceFootprint, Step};
use crate::spectral::EigenUnitary;
use crate::verify::ancilla_zero_block;
use crate::{Op, C64};

pub const MODELED_MCX: &str = "mcx";

/// Two-qubit gates charged for a multi-controlled X with `controls` controls.
/// One CNOT, one Toffoli at six, then twelve per control with a borrowed helper.
pub fn mcx_two_qubit_gates(controls: usize) -> u64 {
    match controls {
        0 => 0,
        1 => 1,
        2 => 6,
        k => 12 * k as u64,
    }
}

/// `R = 2|0⟩⟨0| − 𝟙` on `n` qubits: a global sign and a multi-controlled phase on
/// the all-zero pattern. Charged `2n` X gates, two Hadamards and the MCX model.
pub fn ancilla_reflection(n: usize) -> Result<Op> {
    if n == 0 {
        return Err(Error::InvalidParameter("reflection needs at least one qubit".into()));
    }
    let minus = C64::new(-1.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let global = CircuitOp::diagonal(vec![minus, minus], ResourceFootprint::default())?;
    let flip = CircuitOp::diagonal(vec![minus, one], ResourceFootprint::default())?;
    let fp = ResourceFootprint::gates(mcx_two_qubit_gates(n - 1), 2 * n as u64 + 2).modeled_as(MODELED_MCX);
    let flip = CircuitOp::controlled(flip, n, vec![0], (1..n).collect(), vec![false; n - 1])?.with_footprint(fp);
    Ok(CircuitOp::sequence(n, vec![Step::new(global, vec![0]), Step::new(flip, (0..n).collect())])?.with_label("R"))
}

/// `select(Ū)`: on header `|00⟩` and coefficient register `|l⟩` applies `U^{l−L}`;
/// header `|01⟩` gives `−𝟙`, `|10⟩` gives `𝟙`, `|11⟩` gives `−𝟙`.
#[derive(Clone, Debug)]
pub struct SelectU {
    pub n: usize,
    pub l: usize,
    pub op: Op,
    /// Queries of the cascade as built: `L` for the offset plus `2L − 1`.
    pub raw_queries: u64,
    /// Largest single power, the per-application convention of the literature.
    pub normalized_queries: u64,
}

pub fn build_select(params: &KernelParams, u: &EigenUnitary) -> Result<SelectU> {
    let s = u.system_qubits()?;
    let m = params.m;
    let l = params.l;
    if 1usize << (m - 1) != l {
        return Err(Error::InvalidParameter(format!("L = {l} does not match m = {m}")));
    }
    let width = s + m + 2;
    let system: Vec<usize> = (0..s).collect();
    let (h_lo, h_hi) = (s + m, s + m + 1);
    let mut steps = vec![Step::new(gates::pauli_z(), vec![h_lo])];

    let offset = CircuitOp::controlled(u.power_op(-(l as i64))?, width, system.clone(), vec![h_lo, h_hi], vec![false, false])?;
    steps.push(Step::new(offset, (0..width).collect()));
    for i in 0..m {
        let power = u.power_op(1i64 << i)?;
        let leg = CircuitOp::controlled(power, width, system.clone(), vec![h_lo, h_hi, s + i], vec![false, false, true])?;
        steps.push(Step::new(leg, (0..width).collect()));
    }
    let op = CircuitOp::sequence(width, steps)?.with_label("select");
    let raw_queries = op.footprint().queries;
    Ok(SelectU { n: m + 2, l, op, raw_queries, normalized_queries: l as u64 })
}

/// `W = (B† ⊗ 𝟙) select (B ⊗ 𝟙)`.
pub fn build_w(b: &BOperator<f64>, select: &SelectU, system_qubits: usize) -> Result<Op> {
    if b.n != select.n {
        return Err(Error::DimensionMismatch { expected: select.n, got: b.n });
    }
    let width = system_qubits + b.n;
    let anc: Vec<usize> = (system_qubits..width).collect();
    let steps = vec![
        Step::new(b.op.clone(), anc.clone()),
        Step::new(select.op.clone(), (0..width).collect()),
        Step::new(b.op.adjoint(), anc),
    ];
    Ok(CircuitOp::sequence(width, steps)?.with_label("W"))
}

/// `A = W R W† R W R W† R W` for `R` acting on the high `r.num_qubits()` qubits.
pub fn oaa_operator(w: &Op, r: &Op) -> Result<Op> {
    let width = w.num_qubits();
    if r.num_qubits() > width {
        return Err(Error::DimensionMismatch { expected: width, got: r.num_qubits() });
    }
    let all: Vec<usize> = (0..width).collect();
    let anc: Vec<usize> = (width - r.num_qubits()..width).collect();
    let wd = w.adjoint();
    let mut steps = Vec::with_capacity(9);
    for i in 0..9 {
        let step = match i {
            _ if i % 2 == 1 => Step::new(r.clone(), anc.clone()),
            0 | 4 | 8 => Step::new(w.clone(), all.clone()),
            _ => Step::new(wd.clone(), all.clone()),
        };
        steps.push(step);
    }
    Ok(CircuitOp::sequence(width, steps)?.with_label("A"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "budget", rename_all = "lowercase")]
pub enum QftMode {
    Exact,
    /// Truncated transform with this operator-norm budget.
    Budget(f64),
}

impl QftMode {
    pub fn spec(&self, m: usize) -> Result<QftSpec> {
        match *self {
            QftMode::Exact => Ok(QftSpec::exact(m)),
            QftMode::Budget(b) => QftSpec::with_budget(m, b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcuConfig {
    pub epsilon: f64,
    pub kernel_constant: f64,
    pub qft: QftMode,
}

impl LcuConfig {
    /// Half of `ε` goes to QFT truncation.
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon, kernel_constant: DEFAULT_KERNEL_CONSTANT, qft: QftMode::Budget(epsilon / 2.0) }
    }

    pub fn exact_qft(mut self) -> Self {
        self.qft = QftMode::Exact;
        self
    }
}

/// Every operator of the construction, with its layout and ledger.
#[derive(Clone, Debug)]
pub struct ReflectorA {
    pub params: KernelParams,
    pub b: BOperator<f64>,
    pub select: SelectU,
    pub w: Op,
    pub r: Op,
    pub a: Op,
    pub layout: RegisterLayout,
    pub ledger: ResourceLedger,
}

impl ReflectorA {
    pub fn build(u: &EigenUnitary, config: &LcuConfig) -> Result<Self> {
        let params = select_params(config.epsilon, u.gap(), config.kernel_constant)?;
        Self::with_params(u, params, config.qft)
    }

    pub fn with_params(u: &EigenUnitary, params: KernelParams, qft: QftMode) -> Result<Self> {
        let s = u.system_qubits()?;
        let b = build_b::<f64>(&params, qft.spec(params.m)?)?;
        let select = build_select(&params, u)?;
        let w = build_w(&b, &select, s)?;
        let r = ancilla_reflection(b.n)?;
        let a = oaa_operator(&w, &r)?;
        let layout = RegisterLayout::new(b.n, s)?;
        let ledger = ResourceLedger::from_footprint(a.footprint(), b.n as u64);
        Ok(Self { params, b, select, w, r, a, layout, ledger })
    }

    pub fn s(&self) -> f64 {
        self.b.s
    }

    /// Queries of `A` under the per-select convention, five selects of `L` each.
    pub fn normalized_queries(&self) -> u64 {
        5 * self.select.normalized_queries
    }
}

/// `5Q − 20QQ†Q + 16QQ†QQ†Q` with `Q = PWP`.
pub fn oaa_expansion(q: &DMatrix<C64>) -> DMatrix<C64> {
    let qd = q.adjoint();
    let q3 = q * &qd * q;
    let q5 = &q3 * &qd * q;
    q * C64::new(5.0, 0.0) - q3 * C64::new(20.0, 0.0) + q5 * C64::new(16.0, 0.0)
}

/// Result of comparing `PAP` with its three-term expansion in `PWP`.
#[derive(Clone, Debug)]
pub struct OaaCheck {
    /// `max |PAP − (5Q − 20QQ†Q + 16QQ†QQ†Q)|`.
    pub expansion_deviation: f64,
    /// `PWP` on the system.
    pub q: DMatrix<C64>,
    /// `PAP` on the system.
    pub pap: DMatrix<C64>,
}

pub fn oaa_expansion_check(w: &Op, a: &Op, layout: &RegisterLayout) -> Result<OaaCheck> {
    let q = ancilla_zero_block(w, layout)?.matrix;
    let pap = ancilla_zero_block(a, layout)?.matrix;
    let expansion_deviation = (&pap - oaa_expansion(&q)).camax();
    Ok(OaaCheck { expansion_deviation, q, pap })
}

/// `1 − 5/s + 20/s³ − 16/s⁵`, zero at `s = 1/sin(π/10)`.
pub fn chebyshev_residual(s: f64) -> f64 {
    let x = 1.0 / s;
    1.0 - (5.0 * x - 20.0 * x.powi(3) + 16.0 * x.powi(5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::kernel_value;
    use crate::sim::{apply, StateVec};
    use crate::spectral::synth_unitary;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn small_params(l: usize) -> KernelParams {
        let m = (2 * l).trailing_zeros() as usize;
        KernelParams { epsilon: 0.1, delta: 0.5, c: 40.0, dz: 0.3, l, l_star: 2, m }
    }

    #[test]
    fn reflection_examples() {
        let r = ancilla_reflection(3).unwrap().to_dense();
        for x in 0..8 {
            let expected = if x == 0 { 1.0 } else { -1.0 };
            assert_eq!(r.get(x, x), c(expected));
        }
        assert!(r.matmul(&r).sub(&crate::sim::DenseMatrix::identity(8)).max_abs() < 1e-12);
        let one = ancilla_reflection(1).unwrap().to_dense();
        assert_eq!(one.get(0, 0), c(1.0));
        assert_eq!(one.get(1, 1), c(-1.0));
        let fp = ancilla_reflection(5).unwrap().footprint().clone();
        assert_eq!(fp.single_qubit_gates, 12);
        assert_eq!(fp.two_qubit_gates, 48);
        assert!(fp.modeled.contains(MODELED_MCX));
    }

    #[test]
    fn select_table_for_eight_terms() {
        // n = 6 ancilla qubits, L = 8
        let params = small_params(8);
        let u = synth_unitary(2, 0.5, 1).unwrap();
        let sel = build_select(&params, &u).unwrap();
        assert_eq!(sel.n, 6);
        assert_eq!(sel.raw_queries, 3 * 8 - 1);
        let layout = RegisterLayout::new(6, 1).unwrap();
        for anc in 0..64usize {
            let header = anc >> 4;
            let data = anc & 15;
            let expected: DMatrix<C64> = match header {
                0 => u.power_matrix(data as i64 - 8),
                1 | 3 => -DMatrix::identity(2, 2),
                _ => DMatrix::identity(2, 2),
            };
            for j in 0..2 {
                let input = StateVec::basis(7, layout.index(anc, j)).unwrap();
                let out = apply(&sel.op, &input, &layout.all_wires()).unwrap();
                for idx in 0..128 {
                    let (a, sys) = layout.split(idx);
                    let want = if a == anc { expected[(sys, j)] } else { c(0.0) };
                    assert!((out.amplitude(idx) - want).norm() < 1e-12, "anc={anc} j={j}");
                }
            }
        }
    }

    #[test]
    fn w_block_is_scaled_reflection_combination() {
        let u = synth_unitary(4, 0.5, 3).unwrap();
        let rf = ReflectorA::build(&u, &LcuConfig::new(0.1).exact_qft()).unwrap();
        let block = ancilla_zero_block(&rf.w, &rf.layout).unwrap();
        assert!(block.column_norm_deviation < 1e-10);
        let q = block.matrix;
        // (1/s)(Σ_l |β_l| U^{l−L} − 𝟙) evaluated through the eigenbasis
        let v = u.eigenbasis();
        let mut diag = Vec::new();
        for &lam in u.eigenphases() {
            let mut acc = c(-1.0);
            for (i, b) in rf.b.b_hat.beta.iter().enumerate() {
                acc += C64::from_polar(*b, (i as f64 - rf.params.l as f64) * lam);
            }
            diag.push(acc / rf.s());
        }
        let expected = v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)) * v.adjoint();
        assert!((&q - expected).camax() < 1e-12);
        // against the kernel oracle
        let kernel_diag: Vec<C64> =
            u.eigenphases().iter().map(|&lam| (kernel_value(lam, &rf.params) * 2.0 - 1.0) / rf.s()).collect();
        let kernel = v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(kernel_diag)) * v.adjoint();
        assert!((&q - kernel).camax() <= 10.0 * 0.1);

        let psi0 = u.target().unwrap();
        let out = apply(&rf.w, &StateVec::with_zero_ancilla(rf.layout.ancilla_qubits, &psi0), &rf.layout.all_wires())
            .unwrap();
        let (_, weight) = out.project_ancilla_zero(&rf.layout).unwrap();
        let rtilde_norm = (&q * c(rf.s()) * nalgebra::DVector::from_column_slice(psi0.amplitudes())).norm();
        assert!((weight.sqrt() - rtilde_norm / rf.s()).abs() < 1e-12);
        assert!((weight.sqrt() - 1.0 / rf.s()).abs() < 0.1);
    }

    #[test]
    fn expansion_is_exact_for_any_unitary_w() {
        let u = synth_unitary(4, 0.5, 5).unwrap();
        let rf = ReflectorA::build(&u, &LcuConfig::new(0.1)).unwrap();
        let check = oaa_expansion_check(&rf.w, &rf.a, &rf.layout).unwrap();
        assert!(check.expansion_deviation <= 1e-10);
        assert_eq!(rf.a.footprint().queries, 5 * rf.select.raw_queries);
    }

    #[test]
    fn exact_amplification_at_target_normalization() {
        // W = [[xV, yV], [yV, −xV]] on one ancilla with x = sin(π/10)
        let x = (PI / 10.0).sin();
        let y = (1.0 - x * x).sqrt();
        let v = synth_unitary(4, 0.4, 9).unwrap().matrix();
        let w = DMatrix::from_fn(8, 8, |r, col| {
            let (ar, sr) = (r / 4, r % 4);
            let (ac, sc) = (col / 4, col % 4);
            let coef = match (ar, ac) {
                (0, 0) => x,
                (1, 1) => -x,
                _ => y,
            };
            v[(sr, sc)] * coef
        });
        let w = CircuitOp::dense(crate::spectral::to_dense(&w), ResourceFootprint::default()).unwrap();
        let r = ancilla_reflection(1).unwrap();
        let a = oaa_operator(&w, &r).unwrap();
        let layout = RegisterLayout::new(1, 2).unwrap();
        let block = ancilla_zero_block(&a, &layout).unwrap().matrix;
        assert!((block - v).camax() < 1e-12);
        assert!(chebyshev_residual(1.0 / x).abs() < 1e-12);
    }

    #[test]
    fn reflector_fixes_target_and_negates_gapped() {
        let u = synth_unitary(4, 0.5, 2).unwrap();
        let rf = ReflectorA::build(&u, &LcuConfig::new(0.1)).unwrap();
        let layout = rf.layout;
        for j in 0..4 {
            let psi = u.eigenvector(j).unwrap();
            let out = apply(&rf.a, &StateVec::with_zero_ancilla(layout.ancilla_qubits, &psi), &layout.all_wires())
                .unwrap();
            let sign = if j == 0 { 1.0 } else { -1.0 };
            let target = StateVec::with_zero_ancilla(layout.ancilla_qubits, &psi.scale(c(sign)));
            assert!(out.distance(&target).unwrap() <= 10.0 * 0.1, "j={j}");
        }
    }
}
