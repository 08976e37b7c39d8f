use std::collections::BTreeSet;

use num_complex::Complex;

use super::op::{zero, CircuitOp, DenseMatrix, OpKind, ResourceFootprint};
use super::state::StateVec;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn validate<T: Real>(op: &CircuitOp<T>, state: &StateVec<T>, targets: &[usize]) -> Result<()> {
    if targets.len() != op.num_qubits() {
        return Err(Error::DimensionMismatch { expected: 1 << op.num_qubits(), got: 1 << targets.len() });
    }
    let mut seen = BTreeSet::new();
    for &t in targets {
        if t >= state.num_qubits() {
            return Err(Error::TargetOutOfRange { qubit: t, num_qubits: state.num_qubits() });
        }
        if !seen.insert(t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Returns `Op|state⟩` with local qubit `i` of `op` bound to global qubit `targets[i]`.
pub fn apply<T: Real>(op: &CircuitOp<T>, state: &StateVec<T>, targets: &[usize]) -> Result<StateVec<T>> {
    validate(op, state, targets)?;
    let mut out = state.clone();
    run_in_place(op, out.amps_mut(), targets, None);
    Ok(out)
}

/// Like [`apply`], also adding the executed cost to `executed`. Costs are charged at
/// the outermost non-sequence node, so the total equals the declared footprint.
pub fn apply_counted<T: Real>(
    op: &CircuitOp<T>,
    state: &StateVec<T>,
    targets: &[usize],
    executed: &mut ResourceFootprint,
) -> Result<StateVec<T>> {
    validate(op, state, targets)?;
    let mut out = state.clone();
    run_in_place(op, out.amps_mut(), targets, Some(executed));
    Ok(out)
}

pub(crate) fn run_in_place<T: Real>(
    op: &CircuitOp<T>,
    amps: &mut [Complex<T>],
    targets: &[usize],
    counter: Option<&mut ResourceFootprint>,
) {
    let mut scratch = Scratch { a: Vec::new(), b: Vec::new(), offsets: Vec::new() };
    let mut counter = counter;
    let full = amps.len() - 1;
    run(op, amps, full, targets, 0, 0, &mut scratch, &mut counter);
}

struct Scratch<T> {
    a: Vec<Complex<T>>,
    b: Vec<Complex<T>>,
    offsets: Vec<usize>,
}

#[allow(clippy::too_many_arguments)]
fn run<T: Real>(
    op: &CircuitOp<T>,
    amps: &mut [Complex<T>],
    full: usize,
    map: &[usize],
    cmask: usize,
    cval: usize,
    scratch: &mut Scratch<T>,
    counter: &mut Option<&mut ResourceFootprint>,
) {
    if let (Some(c), false) = (counter.as_deref_mut(), matches!(op.kind(), OpKind::Sequence(_))) {
        *c += op.footprint();
    }
    match op.kind() {
        OpKind::Sequence(steps) => {
            for step in steps {
                let child: Vec<usize> = step.wires.iter().map(|&w| map[w]).collect();
                run(&step.op, amps, full, &child, cmask, cval, scratch, counter);
            }
        }
        OpKind::Controlled { inner, wires, controls, pattern } => {
            let mut cm = cmask;
            let mut cv = cval;
            for (&q, &bit) in controls.iter().zip(pattern) {
                cm |= 1 << map[q];
                if bit {
                    cv |= 1 << map[q];
                }
            }
            let child: Vec<usize> = wires.iter().map(|&w| map[w]).collect();
            // already charged at this node
            let mut none = None;
            run(inner, amps, full, &child, cm, cv, scratch, &mut none);
        }
        OpKind::Dense(m) => leaf(amps, full, map, cmask, cval, scratch, Leaf::Dense(m)),
        OpKind::Diagonal(d) => leaf(amps, full, map, cmask, cval, scratch, Leaf::Diagonal(d)),
        OpKind::Permutation(p) => leaf(amps, full, map, cmask, cval, scratch, Leaf::Permutation(p)),
    }
}

enum Leaf<'a, T> {
    Dense(&'a DenseMatrix<T>),
    Diagonal(&'a [Complex<T>]),
    Permutation(&'a [usize]),
}

fn leaf<T: Real>(
    amps: &mut [Complex<T>],
    full: usize,
    map: &[usize],
    cmask: usize,
    cval: usize,
    scratch: &mut Scratch<T>,
    kind: Leaf<'_, T>,
) {
    let k = map.len();
    let dim = 1usize << k;
    let tmask = map.iter().fold(0usize, |m, &q| m | (1 << q));
    debug_assert_eq!(tmask & cmask, 0, "control overlaps a target");
    let free = full & !(tmask | cmask);

    scratch.offsets.clear();
    scratch.offsets.extend((0..dim).map(|j| {
        (0..k).filter(|b| j >> b & 1 == 1).fold(0usize, |o, b| o | (1 << map[b]))
    }));
    scratch.a.resize(dim, zero());
    scratch.b.resize(dim, zero());
    let off = &scratch.offsets;

    // Enumerate the submasks of `free` in increasing order.
    let mut x = 0usize;
    loop {
        let base = x | cval;
        match &kind {
            Leaf::Dense(m) if dim == 2 => {
                let (i0, i1) = (base, base | off[1]);
                let (a0, a1) = (amps[i0], amps[i1]);
                amps[i0] = m.get(0, 0) * a0 + m.get(0, 1) * a1;
                amps[i1] = m.get(1, 0) * a0 + m.get(1, 1) * a1;
            }
            Leaf::Dense(m) => {
                for j in 0..dim {
                    scratch.a[j] = amps[base | off[j]];
                }
                for r in 0..dim {
                    let row = m.row(r);
                    let mut acc = zero::<T>();
                    for (c, v) in row.iter().zip(&scratch.a) {
                        acc += c * v;
                    }
                    amps[base | off[r]] = acc;
                }
            }
            Leaf::Diagonal(d) => {
                for j in 0..dim {
                    let i = base | off[j];
                    amps[i] = amps[i] * d[j];
                }
            }
            Leaf::Permutation(p) => {
                for j in 0..dim {
                    scratch.b[j] = amps[base | off[j]];
                }
                for j in 0..dim {
                    amps[base | off[p[j]]] = scratch.b[j];
                }
            }
        }
        x = x.wrapping_sub(free) & free;
        if x == 0 {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::op::{gates::*, Step};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    #[test]
    fn x_flips_zero() {
        let s = apply(&pauli_x::<f64>(), &StateVec::zero(1), &[0]).unwrap();
        assert_eq!(s, StateVec::basis(1, 1).unwrap());
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply(&hadamard::<f64>(), &StateVec::zero(1), &[0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - C::new(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(1) - C::new(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn f32_instantiation() {
        let s = apply(&hadamard::<f32>(), &StateVec::<f32>::zero(1), &[0]).unwrap();
        assert!((s.amplitude(0).re - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn target_errors() {
        let s = StateVec::<f64>::zero(2);
        assert!(matches!(apply(&cnot(), &s, &[0, 0]), Err(Error::DuplicateTarget(0))));
        assert!(matches!(apply(&cnot(), &s, &[0, 2]), Err(Error::TargetOutOfRange { .. })));
        assert!(matches!(apply(&cnot(), &s, &[0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn target_embedding_on_high_qubit() {
        // X on global qubit 2 of a 3-qubit register maps |000> to |100> = index 4
        let s = apply(&pauli_x::<f64>(), &StateVec::zero(3), &[2]).unwrap();
        assert_eq!(s, StateVec::basis(3, 4).unwrap());
        // CNOT with control on qubit 2 (set) and target qubit 0
        let s = apply(&cnot::<f64>(), &s, &[0, 2]).unwrap();
        assert_eq!(s, StateVec::basis(3, 5).unwrap());
    }

    #[test]
    fn controlled_respects_pattern() {
        let cx0 = CircuitOp::controlled(pauli_x::<f64>(), 3, vec![0], vec![1, 2], vec![false, true]).unwrap();
        // control pattern: qubit1 = 0, qubit2 = 1
        let s = apply(&cx0, &StateVec::basis(3, 0b100).unwrap(), &[0, 1, 2]).unwrap();
        assert_eq!(s, StateVec::basis(3, 0b101).unwrap());
        let s = apply(&cx0, &StateVec::basis(3, 0b110).unwrap(), &[0, 1, 2]).unwrap();
        assert_eq!(s, StateVec::basis(3, 0b110).unwrap());
    }

    fn random_circuit(rng: &mut ChaCha8Rng) -> CircuitOp<f64> {
        use rand::Rng;
        let mut steps = Vec::new();
        for _ in 0..12 {
            let a = rng.gen_range(0..3);
            let b = (a + rng.gen_range(1..3)) % 3;
            match rng.gen_range(0..4) {
                0 => steps.push(Step::new(hadamard(), vec![a])),
                1 => steps.push(Step::new(ry(rng.gen_range(0.0..3.0)), vec![a])),
                2 => steps.push(Step::new(cnot(), vec![a, b])),
                _ => steps.push(Step::new(controlled_phase(rng.gen_range(0.0..6.0)), vec![a, b])),
            }
        }
        CircuitOp::sequence(3, steps).unwrap()
    }

    #[test]
    fn op_then_adjoint_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let op = random_circuit(&mut rng);
        let s = StateVec::<f64>::haar_random(3, &mut rng);
        let t = apply(&op, &s, &[0, 1, 2]).unwrap();
        assert!((t.norm() - 1.0).abs() < 1e-12);
        let back = apply(&op.adjoint(), &t, &[0, 1, 2]).unwrap();
        assert!(back.distance(&s).unwrap() < 1e-12);
    }

    #[test]
    fn sequence_equals_member_composition_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let op = random_circuit(&mut rng);
        let s = StateVec::<f64>::haar_random(4, &mut rng);
        let targets = [3, 0, 2];
        let whole = apply(&op, &s, &targets).unwrap();
        let OpKind::Sequence(steps) = op.kind() else { unreachable!() };
        let mut cur = s;
        for step in steps {
            let t: Vec<usize> = step.wires.iter().map(|&w| targets[w]).collect();
            cur = apply(&step.op, &cur, &t).unwrap();
        }
        assert_eq!(whole, cur);
    }

    #[test]
    fn counted_matches_declared() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let op = random_circuit(&mut rng);
        let ctl = CircuitOp::controlled(op.clone(), 4, vec![0, 1, 2], vec![3], vec![true])
            .unwrap()
            .with_footprint(op.footprint().times(2));
        let seq = CircuitOp::sequence(4, vec![Step::new(op.clone(), vec![0, 1, 2]), Step::new(ctl, vec![0, 1, 2, 3])])
            .unwrap();
        let mut executed = ResourceFootprint::default();
        apply_counted(&seq, &StateVec::zero(4), &[0, 1, 2, 3], &mut executed).unwrap();
        assert_eq!(&executed, seq.footprint());
    }
}
