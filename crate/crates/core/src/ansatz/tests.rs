use alloc::vec::Vec;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::linalg::{gemm, DenseMatrix, Op};
use crate::mps::{MpsConfig, MpsState};
use crate::oracle::{circuit_unitary, expm, random_integrals, Dense};
use crate::pauli::dense::{basis_state, expectation_brute_force, inner, operator_matrix};
use crate::pauli::{molecular_qubit_hamiltonian, QubitOperator};

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    inner(a, b).norm()
}

#[test]
fn uccsd_at_zero_keeps_hartree_fock_energy() {
    let ints = random_integrals(3, 11);
    let h = molecular_qubit_hamiltonian(&ints).unwrap();
    let t = uccsd_template(2, 6).unwrap();
    let circ = t.bind(&alloc::vec![0.0; t.n_params()]).unwrap();
    let mut s = MpsState::basis_state("110000", MpsConfig::default()).unwrap();
    s.apply_circuit(&circ).unwrap();
    let want = expectation_brute_force(&basis_state("110000").unwrap(), &h).unwrap().re;
    assert!((s.expect_operator(&h).unwrap() - want).abs() < 1e-12);
}

#[test]
fn three_orbital_pool_matches_dense_product() {
    let pool = build_windowed_gsd_pool(3, 3).unwrap();
    assert_eq!(pool.len(), 36);
    let params: Vec<f64> = (0..pool.len()).map(|k| 0.05 * (k as f64 - 17.0)).collect();
    let mut want = DenseMatrix::identity(64);
    for (p, th) in pool.iter().zip(&params) {
        let gen = QubitOperator::from_term(p.clone(), Complex64::new(0.0, *th));
        want = gemm(&expm(&operator_matrix(&gen, 6).unwrap()), &want, Op::N, Op::N).unwrap();
    }
    let got = circuit_unitary(&pool_to_circuit(&pool, 6, &params).unwrap());
    assert!(got.max_abs_diff(&want) < 1e-12);
}

#[test]
fn pool_cnot_count_formula() {
    let pool = build_windowed_gsd_pool(8, 5).unwrap();
    let t = pool_template(&pool, 16).unwrap();
    let circ = t.bind(&alloc::vec![0.1; pool.len()]).unwrap();
    let want: usize = pool.iter().map(|p| 2 * (p.weight() - 1)).sum();
    assert_eq!(circ.cnot_count(), want);
    assert_eq!(t.cnot_count(), want);
}

#[test]
fn uccsd_cnot_count_formula() {
    let t = uccsd_template(2, 4).unwrap();
    let circ = t.bind(&[0.2, -0.1, 0.3]).unwrap();
    assert_eq!(circ.cnot_count(), 64);
    assert_eq!(circ.cnot_count(), t.cnot_count());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn template_then_inverse_restores_state(seed in any::<u64>(), pool_ansatz in any::<bool>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = if pool_ansatz {
            pool_template(&build_windowed_gsd_pool(4, 3).unwrap(), 8).unwrap()
        } else {
            uccsd_template(4, 8).unwrap()
        };
        let params: Vec<f64> = (0..t.n_params()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut s = MpsState::basis_state("11110000", MpsConfig::with_max_bond(256)).unwrap();
        let before = s.to_statevector().unwrap();
        s.apply_circuit(&t.bind(&params).unwrap()).unwrap();
        s.apply_circuit(&t.inverse().bind(&params).unwrap()).unwrap();
        prop_assert!(overlap(&before, &s.to_statevector().unwrap()) > 1.0 - 1e-10);
    }

    #[test]
    fn compiled_uccsd_agrees_with_dense_run(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = uccsd_template(2, 6).unwrap();
        let params: Vec<f64> = (0..t.n_params()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let circ = t.bind(&params).unwrap();
        let mut d = Dense::basis("110000");
        d.run(&circ);
        let mut s = MpsState::basis_state("110000", MpsConfig::default()).unwrap();
        s.apply_circuit(&circ.fused()).unwrap();
        prop_assert!(overlap(&d.amp, &s.to_statevector().unwrap()) > 1.0 - 1e-10);
    }
}
