use eigenreflect::kernel::{phi_amplitudes, psi_amplitudes, select_params};
use eigenreflect::lcu::{LcuConfig, QftMode, ReflectorA};
use eigenreflect::pea::{PeaParams, PeaReflector};
use eigenreflect::prep::{build_b, build_b_hat, QftSpec};
use eigenreflect::sim::{apply, StateVec};
use eigenreflect::spectral::{grover_unitary, hamiltonian_unitary, haar_unitary, synth_unitary};
use eigenreflect::suite::{eight_dim_instance, TRIAL_SEED};
use eigenreflect::verify::verify_reflection;
use eigenreflect::C64;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn error_shrinks_with_epsilon_near_the_gap_edge() {
    let u = eight_dim_instance().unwrap();
    let mut last = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3] {
        let rf = ReflectorA::build(&u, &LcuConfig::new(eps)).unwrap();
        let report = verify_reflection(&rf.a, &rf.layout, &u, 10, TRIAL_SEED).unwrap();
        assert!(report.max_error <= 10.0 * eps, "eps {eps}: {}", report.max_error);
        assert!(report.max_error < last, "eps {eps}: {} not below {last}", report.max_error);
        // the fixed eigenvector is reproduced far more accurately than the bound
        assert!(report.eigen_errors[0] <= eps);
        last = report.max_error;
    }
}

#[test]
fn prepared_state_is_nearly_real() {
    // |φ⟩ has one unpaired end point, so F_c|φ⟩ is real only up to that amplitude
    for (eps, delta) in [(1e-1, 0.5), (1e-2, 0.1), (1e-3, 0.02)] {
        let p = select_params(eps, delta, 40.0).unwrap();
        let edge = phi_amplitudes::<f64>(&p)[0].norm();
        let b = build_b_hat::<f64>(&p, QftSpec::exact(p.m)).unwrap();
        let worst_im = b.state.amplitudes().iter().map(|a| a.im.abs()).fold(0.0, f64::max);
        assert!(worst_im <= edge, "eps {eps}: {worst_im} > {edge}");
        let total: f64 = b.beta.iter().sum();
        assert!((total - 2.0).abs() <= 1e-12);
    }
}

#[test]
fn header_weights_reach_target_normalization() {
    let p = select_params(1e-2, 0.3, 40.0).unwrap();
    let b = build_b::<f64>(&p, QftSpec::with_budget(p.m, 5e-3).unwrap()).unwrap();
    let target = 1.0 / (std::f64::consts::PI / 10.0).sin();
    assert!((b.s - target).abs() <= 1e-2);
    assert_eq!(b.beta_magnitudes.len(), 2 * p.l + 3);
    let psi = psi_amplitudes::<f64>(&p);
    let dist: f64 = psi.iter().zip(b.b_hat.state.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    assert!(dist <= 2e-2);
}

#[test]
fn truncated_phase_estimation_still_fixes_the_target() {
    let u = synth_unitary(4, 0.9, 5).unwrap();
    let params = PeaParams { n_prime: 3, q: 2, epsilon: 0.1, delta: 0.9 };
    let psi0 = u.target().unwrap();
    for mode in [QftMode::Budget(0.3), QftMode::Budget(0.05), QftMode::Exact] {
        let rf = PeaReflector::with_params(&u, params, mode).unwrap();
        let input = StateVec::with_zero_ancilla(rf.layout.ancilla_qubits, &psi0);
        let out = apply(&rf.a, &input, &rf.layout.all_wires()).unwrap();
        assert!(out.distance(&input).unwrap() <= 1e-10, "{mode:?}");
    }
}

#[test]
fn phase_estimation_meets_its_bound() {
    let u = synth_unitary(4, 1.2, 2).unwrap();
    let rf = PeaReflector::build(&u, 0.05, QftMode::Budget(0.025)).unwrap();
    let report = verify_reflection(&rf.a, &rf.layout, &u, 10, TRIAL_SEED).unwrap();
    assert!(report.max_error <= 0.5, "{}", report.max_error);
    assert_eq!(rf.ledger.queries_u, rf.params.queries());
    assert_eq!(rf.ledger.ancilla_qubits as usize, rf.params.ancilla_qubits());
}

/// `H = V diag(values) V†` with a Haar `V`.
fn hamiltonian(values: &[f64], seed: u64) -> DMatrix<C64> {
    let d = values.len();
    let v = haar_unitary(d, &mut ChaCha8Rng::seed_from_u64(seed));
    let diag = DMatrix::from_fn(d, d, |r, c| if r == c { C64::new(values[r], 0.0) } else { C64::new(0.0, 0.0) });
    &v * diag * v.adjoint()
}

#[test]
fn hamiltonian_front_end_feeds_the_reflector() {
    let values = [0.2, -0.7, 0.9, -0.15];
    let h = hamiltonian(&values, 17);
    let u = hamiltonian_unitary(&h, 0.2).unwrap();
    assert!((u.gap() - 0.35).abs() <= 1e-9);
    let eps = 1e-2;
    let rf = ReflectorA::build(&u, &LcuConfig::new(eps)).unwrap();
    let report = verify_reflection(&rf.a, &rf.layout, &u, 10, TRIAL_SEED).unwrap();
    assert!(report.max_error <= 10.0 * eps);
    // the fixed vector is the eigenvector of H at 0.2
    let psi0 = u.target().unwrap();
    let x = nalgebra::DVector::from_column_slice(psi0.amplitudes());
    assert!((&h * &x - x.scale(0.2)).norm() <= 1e-9);
}

#[test]
fn exact_and_truncated_transforms_agree_to_budget() {
    let u = synth_unitary(2, 0.6, 4).unwrap();
    let eps = 1e-2;
    let exact = ReflectorA::build(&u, &LcuConfig::new(eps).exact_qft()).unwrap();
    let trunc = ReflectorA::build(&u, &LcuConfig::new(eps)).unwrap();
    let a = verify_reflection(&exact.a, &exact.layout, &u, 8, 1).unwrap();
    let b = verify_reflection(&trunc.a, &trunc.layout, &u, 8, 1).unwrap();
    for (x, y) in a.trial_errors.iter().zip(&b.trial_errors) {
        assert!((x - y).abs() <= 10.0 * eps);
    }
    assert!(exact.ledger.two_qubit_gates >= trunc.ledger.two_qubit_gates);
}

#[test]
fn search_benchmark_small_sizes() {
    for d in [16usize, 32] {
        let r = eigenreflect::grover::grover_benchmark(d, 0.05, 3).unwrap();
        assert!(r.passed, "D = {d}: nu {} bound {}", r.nu, r.nu_bound);
        assert!(r.ideal_success > 1.0 - 1e-10);
        let g = grover_unitary(d, r.marked).unwrap();
        assert_eq!(g.marked, r.marked);
    }
}

#[test]
fn single_precision_preparation_tracks_double() {
    let p = select_params(1e-2, 0.4, 40.0).unwrap();
    let lo = build_b_hat::<f32>(&p, QftSpec::exact(p.m)).unwrap();
    let hi = build_b_hat::<f64>(&p, QftSpec::exact(p.m)).unwrap();
    let worst = lo
        .state
        .amplitudes()
        .iter()
        .zip(hi.state.amplitudes())
        .map(|(a, b)| ((a.re as f64 - b.re).powi(2) + (a.im as f64 - b.im).powi(2)).sqrt())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-5, "{worst}");
}
