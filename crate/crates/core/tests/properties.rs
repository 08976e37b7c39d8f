use std::collections::BTreeSet;

use eigenreflect::accounting::ResourceLedger;
use eigenreflect::kernel::{kernel_value, select_params};
use eigenreflect::prep::centering_circuit;
use eigenreflect::sim::{apply, CircuitOp, DenseMatrix, RegisterLayout, ResourceFootprint, StateVec, Step};
use eigenreflect::spectral::{haar_unitary, synth_unitary, EigenUnitary};
use eigenreflect::{Op, StateVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_op(qubits: usize, seed: u64) -> Op {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 1usize << qubits;
    let u = haar_unitary(d, &mut rng);
    let data = (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).map(|(r, c)| u[(r, c)]).collect();
    CircuitOp::dense(DenseMatrix::new(d, data).unwrap(), ResourceFootprint::gates(1, 0)).unwrap()
}

fn random_state(qubits: usize, seed: u64) -> StateVector {
    StateVec::haar_random(qubits, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Distinct wires drawn from `0..width` by a seeded shuffle.
fn wires(width: usize, count: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut all: Vec<usize> = (0..width).collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    all.truncate(count);
    all
}

fn ledger(q: u64, two: u64, one: u64, anc: u64, labels: &[&str]) -> ResourceLedger {
    ResourceLedger {
        queries_u: q,
        two_qubit_gates: two,
        single_qubit_gates: one,
        ancilla_qubits: anc,
        modeled: labels.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apply_then_adjoint_restores_the_state(width in 1usize..6, k in 1usize..4, seed in any::<u64>()) {
        let k = k.min(width);
        let op = random_op(k, seed);
        let targets = wires(width, k, seed ^ 1);
        let psi = random_state(width, seed ^ 2);
        let out = apply(&op, &psi, &targets).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
        let back = apply(&op.adjoint(), &out, &targets).unwrap();
        prop_assert!(back.distance(&psi).unwrap() <= 1e-12);
    }

    #[test]
    fn sequence_matches_stepwise_application(width in 2usize..6, seed in any::<u64>()) {
        let a = random_op(1, seed);
        let b = random_op(2, seed ^ 3);
        let wa = wires(width, 1, seed ^ 4);
        let wb = wires(width, 2, seed ^ 5);
        let seq = CircuitOp::sequence(width, vec![Step::new(a.clone(), wa.clone()), Step::new(b.clone(), wb.clone())]).unwrap();
        let psi = random_state(width, seed ^ 6);
        let all: Vec<usize> = (0..width).collect();
        let joint = apply(&seq, &psi, &all).unwrap();
        let stepwise = apply(&b, &apply(&a, &psi, &wa).unwrap(), &wb).unwrap();
        prop_assert!(joint.distance(&stepwise).unwrap() <= 1e-13);
        prop_assert_eq!(seq.footprint().two_qubit_gates, 2);
    }

    #[test]
    fn powers_add(a in -60i64..60, b in -60i64..60, seed in 0u64..500, gap in 0.05f64..3.0) {
        let u = synth_unitary(4, gap, seed).unwrap();
        let xi = random_state(2, seed + 11);
        let mut ledger = ResourceLedger::default();
        let two_steps = u.power_apply(b, &u.power_apply(a, &xi, &mut ledger).unwrap(), &mut ledger).unwrap();
        let one_step = u.power_apply(a + b, &xi, &mut ResourceLedger::default()).unwrap();
        prop_assert!(two_steps.distance(&one_step).unwrap() <= 1e-11);
        prop_assert_eq!(ledger.queries_u, a.unsigned_abs() + b.unsigned_abs());
    }

    #[test]
    fn merge_commutes(x in any::<[u32; 8]>(), la in 0usize..3, lb in 0usize..3) {
        let names = ["mcx", "header-prep", "phase-diagonal"];
        let p = ledger(x[0] as u64, x[1] as u64, x[2] as u64, x[3] as u64, &names[..la]);
        let q = ledger(x[4] as u64, x[5] as u64, x[6] as u64, x[7] as u64, &names[lb..]);
        prop_assert_eq!(p.merge(&q), q.merge(&p));
        prop_assert_eq!(p.merge(&q).ancilla_qubits, (x[3].max(x[7])) as u64);
    }

    #[test]
    fn ancilla_projection_is_idempotent(anc in 1usize..4, sys in 1usize..4, seed in any::<u64>()) {
        let layout = RegisterLayout::new(anc, sys).unwrap();
        let psi = random_state(anc + sys, seed);
        let (once, w1) = psi.project_ancilla_zero(&layout).unwrap();
        let (twice, w2) = once.project_ancilla_zero(&layout).unwrap();
        prop_assert_eq!(once.amplitudes(), twice.amplitudes());
        prop_assert!((w1 - w2).abs() <= 1e-15);
        prop_assert!(w1 <= 1.0 + 1e-12);
    }

    #[test]
    fn kernel_parameters_and_bounds(log_eps in -3.0f64..-0.7, delta in 0.02f64..3.1, u in 0.0f64..1.0) {
        let eps = 10f64.powf(log_eps);
        let p = select_params(eps, delta, 40.0).unwrap();
        prop_assert!(p.l.is_power_of_two() && p.l_star.is_power_of_two() && p.l_star <= p.l);
        prop_assert!(p.conditions().iter().all(|(_, ok)| *ok));
        // any point of the gap region, off the sweep grid
        let lambda = delta + u * (2.0 * std::f64::consts::PI - 2.0 * delta);
        prop_assert!(kernel_value(lambda, &p).norm() <= eps);
        prop_assert!((kernel_value(0.0f64, &p).re - 1.0).abs() <= eps);
        // real coefficients: K(−λ) = K(λ)*
        let (k, m) = (kernel_value(lambda, &p), kernel_value(-lambda, &p));
        prop_assert!((k.conj() - m).norm() <= 1e-12);
    }

    #[test]
    fn centering_shifts_to_the_middle(m in 2usize..9, k_frac in 0.0f64..1.0, j_frac in 0.0f64..1.0) {
        let k = 1 + ((m - 1) as f64 * k_frac) as usize % (m - 1);
        let j = ((1usize << k) as f64 * j_frac) as usize % (1 << k);
        let op = centering_circuit::<f64>(k, m).unwrap();
        let out = apply(&op, &StateVec::basis(m, j).unwrap(), &(0..m).collect::<Vec<_>>()).unwrap();
        let shift = (1usize << (m - 1)) - (1usize << (k - 1));
        prop_assert!((out.amplitude(j + shift).norm() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn instances_roundtrip_through_json(seed in 0u64..1000, gap in 0.05f64..3.1) {
        let u = synth_unitary(4, gap, seed).unwrap();
        let back = EigenUnitary::from_json(&u.to_json()).unwrap();
        prop_assert_eq!(back.eigenphases(), u.eigenphases());
        prop_assert_eq!(back.eigenbasis(), u.eigenbasis());
        prop_assert_eq!(back.gap(), u.gap());
    }
}
