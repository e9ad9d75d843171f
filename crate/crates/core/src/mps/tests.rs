use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gate::matrices::*;
use super::*;
use crate::oracle::Dense;
use crate::linalg::SvdBackend;
use crate::pauli::dense::{expectation_brute_force, inner};
use crate::pauli::{Pauli, PauliString, QubitOperator};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Gram-Schmidt on a random complex matrix, row-major output.
fn random_unitary<const N: usize, const D: usize>(rng: &mut ChaCha8Rng) -> [Complex64; N] {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < D {
        let mut v: Vec<Complex64> = (0..D)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for u in &cols {
            let d: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= d * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let mut m = [c(0.0); N];
    for r in 0..D {
        for k in 0..D {
            m[r * D + k] = cols[k][r];
        }
    }
    m
}

fn random_circuit(n: usize, n_two: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut circ = Circuit::new(n);
    for _ in 0..n_two {
        if rng.gen_bool(0.3) {
            let s = rng.gen_range(0..n);
            circ.push(Gate::one(s, random_unitary::<4, 2>(rng), GateLabel::Custom).unwrap()).unwrap();
        }
        let s = rng.gen_range(0..n - 1);
        circ.push(Gate::two(s, random_unitary::<16, 4>(rng), GateLabel::Custom).unwrap()).unwrap();
    }
    circ
}

fn random_string(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    let mut p = PauliString::identity();
    for q in 0..n {
        let axis = match rng.gen_range(0..4) {
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        };
        p.set(q, axis);
    }
    p
}

fn exact(n: usize) -> MpsConfig {
    MpsConfig {
        max_bond: 1 << (n / 2 + 1),
        ..MpsConfig::default()
    }
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    inner(a, b).norm()
}

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

#[test]
fn basis_state_expectations() {
    let s = MpsState::basis_state("000", MpsConfig::default()).unwrap();
    for k in 0..3 {
        assert_eq!(s.expect_pauli(&PauliString::single(k, Pauli::Z)).unwrap(), 1.0);
    }
    let s = MpsState::basis_state("1100", MpsConfig::default()).unwrap();
    let z: Vec<f64> = (0..4).map(|k| s.expect_pauli(&PauliString::single(k, Pauli::Z)).unwrap()).collect();
    assert_eq!(z, [-1.0, -1.0, 1.0, 1.0]);
    let s = MpsState::basis_state("10", MpsConfig::default()).unwrap();
    assert_eq!(s.to_statevector().unwrap(), [c(0.0), c(0.0), c(1.0), c(0.0)]);
    assert!(MpsState::basis_state("102", MpsConfig::default()).is_err());
}

#[test]
fn single_qubit_gates() {
    let mut s = MpsState::basis_state("0", MpsConfig::default()).unwrap();
    s.apply_1q(0, &pauli_x()).unwrap();
    assert_eq!(s.to_statevector().unwrap(), [c(0.0), c(1.0)]);
    let mut s = MpsState::basis_state("01", MpsConfig::default()).unwrap();
    let before = s.to_statevector().unwrap();
    s.apply_1q(1, &hadamard()).unwrap();
    s.apply_1q(1, &hadamard()).unwrap();
    assert!((overlap(&before, &s.to_statevector().unwrap()) - 1.0).abs() < 1e-12);
}

#[test]
fn cnot_on_product_state_keeps_bond_one() {
    let mut s = MpsState::basis_state("10", MpsConfig::default()).unwrap();
    let w = s.apply_2q(0, &cnot()).unwrap();
    assert_eq!(w, 0.0);
    assert_eq!(s.bond_dims(), [1]);
    assert_eq!(s.to_statevector().unwrap(), [c(0.0), c(0.0), c(0.0), c(1.0)]);
}

#[test]
fn bell_state() {
    let mut s = MpsState::basis_state("00", MpsConfig::default()).unwrap();
    s.apply_1q(0, &hadamard()).unwrap();
    s.apply_2q(0, &cnot()).unwrap();
    let h = core::f64::consts::FRAC_1_SQRT_2;
    for l in s.lambda(1) {
        assert!((l - h).abs() < 1e-14);
    }
    let v = s.to_statevector().unwrap();
    for (a, b) in v.iter().zip([h, 0.0, 0.0, h]) {
        assert!((a - b).norm() < 1e-14);
    }
    assert!((s.expect_pauli(&ps("X0X1")).unwrap() - 1.0).abs() < 1e-14);
    assert!((s.expect_pauli(&ps("Z0Z1")).unwrap() - 1.0).abs() < 1e-14);
    assert!(s.expect_pauli(&ps("Z0")).unwrap().abs() < 1e-14);
    assert_eq!(s.expect_pauli(&PauliString::identity()).unwrap(), 1.0);
}

#[test]
fn circuit_edge_cases() {
    let mut s = MpsState::basis_state("0110", MpsConfig::default()).unwrap();
    let before = s.clone();
    assert_eq!(s.apply_circuit(&Circuit::new(4)).unwrap(), 0.0);
    assert_eq!(s, before);
    let mut xx = Circuit::new(4);
    xx.push_1q(0, pauli_x(), GateLabel::X).unwrap();
    xx.push_1q(0, pauli_x(), GateLabel::X).unwrap();
    s.apply_circuit(&xx).unwrap();
    assert_eq!(s.to_statevector().unwrap(), before.to_statevector().unwrap());
    assert!(s.apply_circuit(&Circuit::new(3)).is_err());
    assert!(matches!(s.apply_2q(3, &cnot()), Err(crate::Error::NonAdjacent(3, 4))));
    assert!(s.expect_pauli(&ps("Z4")).is_err());
}

#[test]
fn random_one_qubit_gate_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let circ = random_circuit(8, 30, &mut rng);
    let mut s = MpsState::basis_state("00000000", exact(8)).unwrap();
    let mut d = Dense::basis("00000000");
    s.apply_circuit(&circ).unwrap();
    for g in circ.gates() {
        d.apply(g);
    }
    let u = Gate::one(5, random_unitary::<4, 2>(&mut rng), GateLabel::Custom).unwrap();
    s.apply_gate(&u).unwrap();
    d.apply(&u);
    assert!(overlap(&d.amp, &s.to_statevector().unwrap()) > 1.0 - 1e-10);
}

#[test]
fn untruncated_random_circuit_matches_amplitudes() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let n = 10;
    let mut circ = Circuit::new(n);
    for _ in 0..50 {
        let s = rng.gen_range(0..n - 1);
        circ.push(Gate::two(s, random_unitary::<16, 4>(&mut rng), GateLabel::Custom).unwrap()).unwrap();
    }
    let mut s = MpsState::basis_state(&"0".repeat(n), MpsConfig::with_max_bond(1024)).unwrap();
    let mut d = Dense::basis(&"0".repeat(n));
    let w = s.apply_circuit(&circ).unwrap();
    for g in circ.gates() {
        d.apply(g);
    }
    let v = s.to_statevector().unwrap();
    let worst = v.iter().zip(&d.amp).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "max amplitude error {worst:e}");
    assert!(w < 1e-20);
}

#[test]
fn expectations_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = 9;
    let circ = random_circuit(n, 60, &mut rng);
    let mut s = MpsState::basis_state(&"0".repeat(n), exact(n)).unwrap();
    s.apply_circuit(&circ).unwrap();
    let psi = s.to_statevector().unwrap();
    let strings: Vec<_> = (0..50).map(|_| random_string(n, &mut rng)).collect();
    let many = s.expect_many(&strings).unwrap();
    for (p, m) in strings.iter().zip(&many) {
        let want = expectation_brute_force(&psi, &QubitOperator::from_term(p.clone(), c(1.0))).unwrap();
        let got = s.expect_pauli(p).unwrap();
        assert!((got - want.re).abs() < 1e-9, "{p}: {got} vs {want}");
        assert!((got - m).abs() < 1e-12);
    }
}

#[test]
fn operator_expectation() {
    let s = MpsState::basis_state("0101", MpsConfig::default()).unwrap();
    assert!((s.expect_operator(&QubitOperator::constant(2.0)).unwrap() - 2.0).abs() < 1e-15);
    let mut op = QubitOperator::constant(0.5);
    op.add_term(ps("Z1"), c(0.25));
    op.add_term(ps("Z0Z1"), c(-1.0));
    assert!((s.expect_operator(&op).unwrap() - (0.5 - 0.25 + 1.0)).abs() < 1e-15);
}

#[test]
fn statevector_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut psi: Vec<Complex64> = (0..64)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = inner(&psi, &psi).re.sqrt();
    psi.iter_mut().for_each(|a| *a /= norm);
    let s = MpsState::from_statevector(&psi, MpsConfig::default()).unwrap();
    assert_eq!(s.bond_dims(), [2, 4, 8, 4, 2]);
    assert!(s.max_canonical_residual() < 1e-12);
    let back = s.to_statevector().unwrap();
    let worst = back.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-13);
}

#[test]
fn bond_cap_one_on_entangling_circuit() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let circ = random_circuit(6, 20, &mut rng);
    let mut s = MpsState::basis_state("000000", MpsConfig::with_max_bond(1)).unwrap();
    let w = s.apply_circuit(&circ).unwrap();
    assert!(w > 0.1);
    assert_eq!(s.max_bond_dim(), 1);
    let e = s.expect_pauli(&ps("Z0Z3")).unwrap();
    assert!(e.is_finite());
}

#[test]
fn truncation_is_monotone_in_bond_cap() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let circ = random_circuit(10, 80, &mut rng);
    let mut prev = f64::INFINITY;
    for d in [1, 2, 4, 8, 16, 32] {
        let mut s = MpsState::basis_state(&"0".repeat(10), MpsConfig::with_max_bond(d)).unwrap();
        let w = s.apply_circuit(&circ).unwrap();
        assert!(w <= prev + 1e-12, "D={d}: {w} > {prev}");
        prev = w;
    }
    assert!(prev < 1e-20);
}

#[test]
fn norm_drift_over_many_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let circ = random_circuit(6, 10_000, &mut rng);
    let mut s = MpsState::basis_state("000000", exact(6)).unwrap();
    s.apply_circuit(&circ).unwrap();
    let v = s.to_statevector().unwrap();
    assert!((inner(&v, &v).re - 1.0).abs() < 1e-8);
    assert!(s.max_lambda_norm_residual() < 1e-10);
}

/// With `B_k` from the contraction form, `diag(λ_k) B^i diag(1/λ_{k+1})`
/// must be left-orthonormal, which is the division form of the update.
#[test]
fn contraction_and_division_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let circ = random_circuit(6, 25, &mut rng);
    let mut s = MpsState::basis_state("000000", exact(6)).unwrap();
    s.apply_circuit(&circ).unwrap();
    for k in 0..5 {
        let (ll, lr) = (s.lambda(k), s.lambda(k + 1));
        if lr.iter().chain(ll).any(|&l| l < 1e-6) {
            continue;
        }
        let t = s.site(k);
        for b in 0..t.dr() {
            for b2 in 0..t.dr() {
                let mut sum = c(0.0);
                for i in 0..2 {
                    for a in 0..t.dl() {
                        let x = t.get(i, a, b) * ll[a] / lr[b];
                        let y = t.get(i, a, b2) * ll[a] / lr[b2];
                        sum += x.conj() * y;
                    }
                }
                let want = if b == b2 { 1.0 } else { 0.0 };
                assert!((sum - want).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn fused_circuit_is_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut circ = random_circuit(5, 40, &mut rng);
    for _ in 0..20 {
        let s = rng.gen_range(0..5);
        circ.push_1q(s, rz(rng.gen_range(-3.0..3.0)), GateLabel::Custom).unwrap();
        let s = rng.gen_range(0..4);
        circ.push_cnot(s, s + 1).unwrap();
    }
    let fused = circ.fused();
    assert!(fused.len() < circ.len());
    let mut a = Dense::basis("01101");
    let mut b = Dense::basis("01101");
    circ.gates().iter().for_each(|g| a.apply(g));
    fused.gates().iter().for_each(|g| b.apply(g));
    assert!(overlap(&a.amp, &b.amp) > 1.0 - 1e-12);
}

#[test]
fn backends_agree_on_a_circuit() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let circ = random_circuit(8, 40, &mut rng);
    let mut results = Vec::new();
    for backend in [SvdBackend::default(), SvdBackend::from_name("jacobi-qr").unwrap(), SvdBackend::Reference] {
        let mut s = MpsState::basis_state("00000000", MpsConfig { backend, ..exact(8) }).unwrap();
        s.apply_circuit(&circ).unwrap();
        results.push(s.to_statevector().unwrap());
    }
    assert!(overlap(&results[0], &results[1]) > 1.0 - 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_form_after_every_gate(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = random_circuit(n, 30, &mut rng);
        let mut s = MpsState::basis_state(&"0".repeat(n), exact(n)).unwrap();
        let mut d = Dense::basis(&"0".repeat(n));
        for g in circ.gates() {
            s.apply_gate(g).unwrap();
            d.apply(g);
            prop_assert!(s.max_canonical_residual() <= 1e-10);
            prop_assert!(s.max_lambda_norm_residual() <= 1e-10);
            for l in s.lambdas() {
                prop_assert!(l.windows(2).all(|w| w[0] >= w[1]) && l.iter().all(|&v| v >= 0.0));
            }
        }
        prop_assert!(overlap(&d.amp, &s.to_statevector().unwrap()) > 1.0 - 1e-9);
    }

    #[test]
    fn transfer_and_statevector_expectations_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..9);
        let circ = random_circuit(n, 20, &mut rng);
        let mut s = MpsState::basis_state(&"0".repeat(n), exact(n)).unwrap();
        s.apply_circuit(&circ).unwrap();
        let psi = s.to_statevector().unwrap();
        let p = random_string(n, &mut rng);
        let want = expectation_brute_force(&psi, &QubitOperator::from_term(p.clone(), c(1.0))).unwrap().re;
        prop_assert!((s.expect_pauli(&p).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn batched_and_single_string_expectations_agree(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = if n == 1 {
            let mut c1 = Circuit::new(1);
            c1.push(Gate::one(0, random_unitary::<4, 2>(&mut rng), GateLabel::Custom).unwrap()).unwrap();
            c1
        } else {
            random_circuit(n, 25, &mut rng)
        };
        let mut s = MpsState::basis_state(&"0".repeat(n), exact(n)).unwrap();
        s.apply_circuit(&circ).unwrap();
        // duplicates and the identity exercise the shared-prefix bookkeeping
        let mut strings: Vec<PauliString> = (0..40).map(|_| random_string(n, &mut rng)).collect();
        strings.push(PauliString::identity());
        strings.push(strings[3].clone());
        let batched = s.expect_many(&strings).unwrap();
        for (p, got) in strings.iter().zip(&batched) {
            prop_assert!((s.expect_pauli(p).unwrap() - got).abs() < 1e-12, "{p}");
        }
    }
}
