//! Acceptance checks at desk scale. Each check returns a [`Criterion`] record; none
//! of them panic on failure.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::accounting::compare_scaling;
use crate::error::Result;
use crate::grover::grover_benchmark;
use crate::kernel::{
    alpha_coeffs, kernel_sup_over_gap, kernel_value, poisson_check, psi_amplitudes, select_params, sup_over_gap,
    DEFAULT_KERNEL_CONSTANT,
};
use crate::lcu::{
    ancilla_reflection, chebyshev_residual, oaa_expansion_check, LcuConfig, QftMode, ReflectorA,
};
use crate::pea::{choose_pea_params, pea_block, PeaParams, PeaReflector};
use crate::prep::{
    build_b_hat, centered_qft, centering_circuit, dft_matrix, qft, shift_matrix, target_normalization, QftSpec,
};
use crate::sim::{apply, OpKind, RegisterLayout, StateVec};
use crate::spectral::{grover_unitary, synth_unitary, EigenUnitary};
use crate::verify::{direct_error, trial_states, verify_reflection};
use crate::Op;

/// Seed of the synthetic `D = 8` instance shared by the end-to-end checks. Its
/// smallest nonzero eigenphase sits near the gap edge, where the reflection error
/// is not zero to roundoff.
pub const INSTANCE_SEED: u64 = 0;
/// Seed of the Haar trial states.
pub const TRIAL_SEED: u64 = 2024;
/// Multiplier in every `≤ c·ε` threshold.
pub const THRESHOLD_CONSTANT: f64 = 10.0;

const EPS_GRID: [f64; 3] = [1e-1, 1e-2, 1e-3];
const GAP_GRID: [f64; 3] = [0.5, 0.1, 0.02];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

fn run(id: u32, title: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Criterion {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Criterion { id, title: title.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn with_time_limit(start: Instant, limit: f64, passed: bool, detail: String) -> (bool, String) {
    let t = start.elapsed().as_secs_f64();
    (passed && t < limit, format!("{detail}; {t:.2}s of {limit}s"))
}

pub fn kernel_bounds() -> Criterion {
    run(1, "kernel bounds on the gap grid", || {
        let start = Instant::now();
        let mut ok = true;
        let mut worst = (0.0f64, 0.0f64);
        for eps in EPS_GRID {
            for delta in GAP_GRID {
                let p = select_params(eps, delta, DEFAULT_KERNEL_CONSTANT)?;
                let at_zero = (kernel_value(0.0f64, &p) - Complex::new(1.0, 0.0)).norm();
                let (sup, _) = kernel_sup_over_gap(&p);
                ok &= at_zero <= eps && sup <= eps;
                worst.0 = worst.0.max(at_zero / eps);
                worst.1 = worst.1.max(sup / eps);
            }
        }
        let detail = format!("max |K(0)-1|/eps = {:.3e}, max sup|K|/eps = {:.3e}", worst.0, worst.1);
        Ok(with_time_limit(start, 10.0, ok, detail))
    })
}

fn l2_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn state_prep_chain() -> Criterion {
    run(2, "Gaussian preparation chain", || {
        let start = Instant::now();
        let mut ok = true;
        let (mut worst_exact, mut worst_trunc) = (0.0f64, 0.0f64);
        for eps in EPS_GRID {
            for delta in GAP_GRID {
                let p = select_params(eps, delta, DEFAULT_KERNEL_CONSTANT)?;
                let psi = psi_amplitudes::<f64>(&p);
                let exact = build_b_hat::<f64>(&p, QftSpec::exact(p.m))?;
                let trunc = build_b_hat::<f64>(&p, QftSpec::with_budget(p.m, eps / 2.0)?)?;
                let (de, dt) = (l2_distance(&psi, exact.state.amplitudes()), l2_distance(&psi, trunc.state.amplitudes()));
                ok &= de <= eps && dt <= 2.0 * eps;
                worst_exact = worst_exact.max(de / eps);
                worst_trunc = worst_trunc.max(dt / eps);
            }
        }
        let detail = format!("max dist/eps exact = {worst_exact:.3e}, truncated = {worst_trunc:.3e}");
        Ok(with_time_limit(start, 30.0, ok, detail))
    })
}

pub fn scalar_lcu() -> Criterion {
    run(3, "scalar LCU coefficient error", || {
        let mut ok = true;
        let mut worst = 0.0f64;
        for eps in EPS_GRID {
            for delta in GAP_GRID {
                let p = select_params(eps, delta, DEFAULT_KERNEL_CONSTANT)?;
                let bh = build_b_hat::<f64>(&p, QftSpec::with_budget(p.m, eps / 2.0)?)?;
                let alpha = alpha_coeffs::<f64>(&p);
                let diff: Vec<f64> = alpha.as_slice().iter().zip(&bh.beta).map(|(a, b)| a - b.abs() / 2.0).collect();
                let (sup, _) = sup_over_gap(&diff, p.l, 0.0);
                ok &= sup <= THRESHOLD_CONSTANT * eps;
                worst = worst.max(sup / eps);
            }
        }
        Ok((ok, format!("max sup|sum (alpha - |beta|/2) e^(il lambda)|/eps = {worst:.3e}")))
    })
}

pub fn eight_dim_instance() -> Result<EigenUnitary> {
    synth_unitary(8, 0.5, INSTANCE_SEED)
}

pub fn lcu_reflection() -> Criterion {
    run(4, "end-to-end LCU reflection", || {
        let start = Instant::now();
        let u = eight_dim_instance()?;
        let mut errors = Vec::new();
        let (mut cross, mut columns) = (0.0f64, 0.0f64);
        let mut ok = true;
        for eps in [1e-2, 1e-3] {
            let rf = ReflectorA::build(&u, &LcuConfig::new(eps))?;
            let report = verify_reflection(&rf.a, &rf.layout, &u, 20, TRIAL_SEED)?;
            let xi = &trial_states(3, 1, TRIAL_SEED)[0];
            let direct = direct_error(&rf.a, &rf.layout, &u, xi)?;
            cross = cross.max((direct - report.trial_errors[0]).abs());
            columns = columns.max(report.column_norm_deviation);
            ok &= report.max_error <= THRESHOLD_CONSTANT * eps;
            errors.push(report.max_error);
        }
        ok &= errors[1] < errors[0] && cross <= 1e-9 && columns <= 1e-10;
        let detail = format!(
            "max error eps=1e-2: {:.3e}, eps=1e-3: {:.3e}; block vs direct {cross:.2e}, column norm deviation {columns:.2e}",
            errors[0], errors[1]
        );
        Ok(with_time_limit(start, 120.0, ok, detail))
    })
}

pub fn oaa_algebra() -> Criterion {
    run(5, "amplitude amplification algebra", || {
        let u = eight_dim_instance()?;
        let eps = 1e-2;
        let rf = ReflectorA::build(&u, &LcuConfig::new(eps))?;
        let check = oaa_expansion_check(&rf.w, &rf.a, &rf.layout)?;
        let s_dev = (rf.s() - target_normalization::<f64>()).abs();
        let x = (PI / 10.0).sin();
        let cheb = (5.0 * x - 20.0 * x.powi(3) + 16.0 * x.powi(5) - 1.0).abs();
        let coeff = chebyshev_residual(rf.s()).abs();
        let ok = check.expansion_deviation <= 1e-10 && s_dev <= THRESHOLD_CONSTANT * eps && cheb <= 1e-12;
        Ok((
            ok,
            format!(
                "expansion deviation {:.3e}, |s - 1/sin(pi/10)| = {s_dev:.3e}, Chebyshev residual {cheb:.3e}, coefficient residual {coeff:.3e}",
                check.expansion_deviation
            ),
        ))
    })
}

pub fn pea_baseline() -> Criterion {
    run(6, "phase-estimation baseline", || {
        let u = eight_dim_instance()?;
        let eps = 1e-2;
        let params = choose_pea_params(eps, u.gap())?;
        let spec = QftSpec::with_budget(params.n_prime, eps / 2.0)?;

        let block = pea_block(&u, params.n_prime, spec)?;
        let block_layout = RegisterLayout::new(params.n_prime, 3)?;
        let mut worst_p = 0.0f64;
        for j in 1..u.dimension() {
            let psi = u.eigenvector(j)?;
            let out = apply(&block, &StateVec::with_zero_ancilla(params.n_prime, &psi), &block_layout.all_wires())?;
            worst_p = worst_p.max(psi.inner(&out.ancilla_zero_block(&block_layout)?)?.norm_sqr());
        }

        let rf = PeaReflector::with_params(&u, params, QftMode::Budget(eps / 2.0))?;
        let report = verify_reflection(&rf.a, &rf.layout, &u, 20, TRIAL_SEED)?;
        drop(rf);

        let exact = PeaReflector::with_params(&u, params, QftMode::Exact)?;
        let psi0 = u.target()?;
        let input = StateVec::with_zero_ancilla(exact.layout.ancilla_qubits, &psi0);
        let fixed = apply(&exact.a, &input, &exact.layout.all_wires())?.distance(&input)?;

        let ok = worst_p <= 1.0 / 16.0 && report.max_error <= THRESHOLD_CONSTANT * eps && fixed <= 1e-10;
        Ok((
            ok,
            format!(
                "n'={} q={} ancillas={}: max block |p| = {worst_p:.3e}, max error {:.3e}, exact fixed-point deviation {fixed:.3e}",
                params.n_prime,
                params.q,
                params.ancilla_qubits(),
                report.max_error
            ),
        ))
    })
}

pub fn ancilla_scaling() -> Criterion {
    run(7, "ancilla scaling against phase estimation", || {
        let table = compare_scaling(&[1e-2, 1e-4, 1e-8], &[1e-2], DEFAULT_KERNEL_CONSTANT)?;
        let r = &table.rows;
        let q_doubles = r[2].q >= 2 * r[0].q;
        let lcu_growth = r[2].n_lcu - r[0].n_lcu;
        let below = r.iter().all(|x| x.n_lcu <= x.n_pea);
        let ratios: Vec<f64> = r.iter().map(|x| x.cu_lcu as f64 / x.cu_pea as f64).collect();
        let ratio_ok = ratios.iter().all(|&x| (0.125..=8.0).contains(&x));
        let ok = q_doubles && lcu_growth <= 2 && below && ratio_ok;
        let widths: Vec<String> = r.iter().map(|x| format!("{}/{}", x.n_lcu, x.n_pea)).collect();
        Ok((
            ok,
            format!(
                "n_lcu/n_pea = [{}], q = [{}, {}, {}], C_U ratios = [{}]",
                widths.join(", "),
                r[0].q,
                r[1].q,
                r[2].q,
                ratios.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
            ),
        ))
    })
}

pub fn grover() -> Criterion {
    run(8, "search benchmark", || {
        let start = Instant::now();
        let report = grover_benchmark(64, 0.02, TRIAL_SEED)?;
        let mut scaled = Vec::new();
        for d in [16usize, 64, 256] {
            let g = grover_unitary(d, 0)?;
            scaled.push(g.unitary.gap() * (d as f64).sqrt());
        }
        let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        let ok = report.nu <= report.nu_bound && report.s_reflect_s <= 1e-10 && hi / lo <= 2.0;
        let detail = format!(
            "nu = {:.4e} (bound {:.4e}), |<s|R|s>| = {:.2e}, gap*sqrt(D) = [{}]",
            report.nu,
            report.nu_bound,
            report.s_reflect_s,
            scaled.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
        );
        Ok(with_time_limit(start, 120.0, ok, detail))
    })
}

fn is_exact_permutation(op: &Op) -> bool {
    let d = op.to_dense();
    (0..d.dim()).all(|c| {
        let nz: Vec<usize> = (0..d.dim()).filter(|&r| d.get(r, c).norm() > 1e-12).collect();
        nz.len() == 1 && (d.get(nz[0], c).norm() - 1.0).abs() <= 1e-12
    })
}

pub fn structural() -> Criterion {
    run(9, "structural properties", || {
        let mut notes = Vec::new();
        // unitarity of every operator of both constructions on instances of at most 9 qubits
        let u = synth_unitary(2, 1.0, INSTANCE_SEED)?;
        let rf = ReflectorA::build(&u, &LcuConfig::new(0.2))?;
        let pea = PeaReflector::with_params(&u, PeaParams { n_prime: 3, q: 2, epsilon: 0.2, delta: 1.0 }, QftMode::Budget(0.1))?;
        let ops: Vec<(&str, Op)> = vec![
            ("B", rf.b.op.clone()),
            ("select", rf.select.op.clone()),
            ("W", rf.w.clone()),
            ("R", rf.r.clone()),
            ("A", rf.a.clone()),
            ("W_pea", pea.w.clone()),
            ("A_pea", pea.a.clone()),
            ("R_8", ancilla_reflection(8)?),
            ("F_8", qft(QftSpec::exact(8))),
            ("F~_8", qft(QftSpec::with_budget(8, 1e-3)?)),
            ("Fc_8", centered_qft(QftSpec::exact(8))),
        ];
        let worst_unitary = ops.iter().map(|(_, op)| op.unitarity_deviation()).fold(0.0, f64::max);
        notes.push(format!("max unitarity deviation {worst_unitary:.2e} over {} operators", ops.len()));
        let mut ok = worst_unitary <= 1e-10;

        let mut centering_ok = true;
        for m in 2..=8usize {
            for k in 1..m {
                let op = centering_circuit::<f64>(k, m)?;
                let shift = (1usize << (m - 1)) - (1usize << (k - 1));
                centering_ok &= is_exact_permutation(&op);
                if let OpKind::Sequence(_) = op.kind() {
                    for j in 0..(1usize << k) {
                        let out = apply(&op, &StateVec::basis(m, j)?, &(0..m).collect::<Vec<_>>())?;
                        centering_ok &= out.amplitude(j + shift).norm() > 1.0 - 1e-12;
                    }
                }
            }
        }
        notes.push(format!("centering permutations {}", if centering_ok { "exact" } else { "WRONG" }));
        ok &= centering_ok;

        let mut fc_worst = 0.0f64;
        for m in 1..=6usize {
            let fc = centered_qft::<f64>(QftSpec::exact(m)).to_dense();
            let x = shift_matrix::<f64>(m, 1 << (m - 1));
            fc_worst = fc_worst.max(fc.sub(&x.matmul(&dft_matrix(m)).matmul(&x)).max_abs());
        }
        notes.push(format!("centered transform deviation {fc_worst:.2e}"));
        ok &= fc_worst <= 1e-12;

        let mut poisson_worst = 0.0f64;
        for &dz in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            for &lam in &[0.0, 0.3, 1.7, PI, -2.5, TAU + 0.4] {
                let (lhs, rhs) = poisson_check(lam, dz, 30);
                poisson_worst = poisson_worst.max((rhs - Complex::new(lhs, 0.0)).norm());
            }
        }
        notes.push(format!("Poisson identity deviation {poisson_worst:.2e}"));
        ok &= poisson_worst <= 1e-10;
        Ok((ok, notes.join("; ")))
    })
}

/// Every acceptance check in order.
pub fn run_all() -> Vec<Criterion> {
    vec![
        kernel_bounds(),
        state_prep_chain(),
        scalar_lcu(),
        lcu_reflection(),
        oaa_algebra(),
        pea_baseline(),
        ancilla_scaling(),
        grover(),
        structural(),
    ]
}
