use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::mps::Circuit;
use crate::pauli::{jordan_wigner, FermionOperator, Ladder, Pauli, PauliString};
use crate::{Error, Result};

use super::template::{AnsatzTemplate, TemplateBlock};

/// Default number of consecutive spatial orbitals per window.
pub const DEFAULT_WINDOW: usize = 5;

fn anti_hermitian(t: FermionOperator) -> FermionOperator {
    (&t - &t.adjoint()).normal_ordered()
}

/// Generalized excitations among the spatial orbitals `lo..hi`: for each
/// pair `p > q`, the alpha and beta singles `q → p` followed by the pair
/// double `(qα, qβ) → (pα, pβ)`.
fn window_generators(lo: usize, hi: usize) -> Vec<FermionOperator> {
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    for p in lo..hi {
        for q in lo..p {
            for s in 0..2 {
                let t = FermionOperator::from_term(&[Ladder::create(2 * p + s), Ladder::annihilate(2 * q + s)], one);
                out.push(anti_hermitian(t));
            }
            let t = FermionOperator::from_term(
                &[
                    Ladder::create(2 * p),
                    Ladder::create(2 * p + 1),
                    Ladder::annihilate(2 * q + 1),
                    Ladder::annihilate(2 * q),
                ],
                one,
            );
            out.push(anti_hermitian(t));
        }
    }
    out
}

/// Pauli strings of the windowed generalized-singles-and-doubles pool.
///
/// Every `window` consecutive spatial orbitals contribute the generators of
/// [`window_generators`]; their Jordan-Wigner strings are stripped of Z
/// factors, strings with an even number of Y are dropped, and duplicates are
/// removed keeping the first occurrence.
pub fn build_windowed_gsd_pool(n_spatial_orbitals: usize, window: usize) -> Result<Vec<PauliString>> {
    if window == 0 || window > n_spatial_orbitals {
        return Err(Error::Invalid(format!(
            "window {window} invalid for {n_spatial_orbitals} spatial orbitals"
        )));
    }
    let n_qubits = 2 * n_spatial_orbitals;
    let mut seen = BTreeSet::new();
    let mut pool = Vec::new();
    for start in 0..=n_spatial_orbitals - window {
        for g in window_generators(start, start + window) {
            for (p, _) in jordan_wigner(&g, n_qubits)?.iter() {
                let stripped = p.without_z();
                if stripped.is_identity() || stripped.count(Pauli::Y) % 2 == 0 {
                    continue;
                }
                if seen.insert(stripped.clone()) {
                    pool.push(stripped);
                }
            }
        }
    }
    Ok(pool)
}

/// Number of windows the pool enumerates.
pub fn window_count(n_spatial_orbitals: usize, window: usize) -> usize {
    if window == 0 || window > n_spatial_orbitals {
        0
    } else {
        n_spatial_orbitals - window + 1
    }
}

/// One block `exp(i·θ_k·P_k)` per pool string, parameters in pool order.
pub fn pool_template(pool: &[PauliString], n_qubits: usize) -> Result<AnsatzTemplate> {
    let blocks = pool
        .iter()
        .enumerate()
        .map(|(param, p)| TemplateBlock { string: p.clone(), param, coeff: 1.0 })
        .collect();
    AnsatzTemplate::new(n_qubits, pool.len(), blocks)
}

/// Pool template bound to `params`.
pub fn pool_to_circuit(pool: &[PauliString], n_qubits: usize, params: &[f64]) -> Result<Circuit> {
    pool_template(pool, n_qubits)?.bind(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::circuit_unitary;
    use crate::pauli::dense::operator_matrix;
    use crate::pauli::QubitOperator;

    /// Hand enumeration: per spatial pair `q < p` inside some window, the
    /// two-site strings `XY`, `YX` for each spin and the eight odd-Y strings
    /// on the four pair qubits.
    fn oracle(n: usize, window: usize) -> BTreeSet<PauliString> {
        let mut out = BTreeSet::new();
        for q in 0..n {
            for p in q + 1..n.min(q + window) {
                for s in 0..2 {
                    for (a, b) in [(Pauli::X, Pauli::Y), (Pauli::Y, Pauli::X)] {
                        out.insert(PauliString::from_ops([(2 * q + s, a), (2 * p + s, b)]).unwrap());
                    }
                }
                let sites = [2 * q, 2 * q + 1, 2 * p, 2 * p + 1];
                for mask in 0u32..16 {
                    if mask.count_ones() % 2 == 1 {
                        let ops = sites
                            .iter()
                            .enumerate()
                            .map(|(k, &site)| (site, if mask >> k & 1 == 1 { Pauli::Y } else { Pauli::X }));
                        out.insert(PauliString::from_ops(ops).unwrap());
                    }
                }
            }
        }
        out
    }

    #[test]
    fn single_window_pool() {
        let pool = build_windowed_gsd_pool(5, 5).unwrap();
        assert_eq!(window_count(5, 5), 1);
        assert_eq!(pool.len(), 120);
        for p in &pool {
            assert_eq!(p.count(Pauli::Z), 0);
            assert_eq!(p.count(Pauli::Y) % 2, 1);
        }
        let set: BTreeSet<_> = pool.iter().cloned().collect();
        assert_eq!(set.len(), pool.len());
        assert_eq!(set, oracle(5, 5));
    }

    #[test]
    fn overlapping_windows_match_oracle() {
        for (n, w) in [(8, 5), (6, 3), (4, 2), (7, 7), (3, 1)] {
            let pool = build_windowed_gsd_pool(n, w).unwrap();
            let set: BTreeSet<_> = pool.iter().cloned().collect();
            assert_eq!(set, oracle(n, w), "n={n} w={w}");
        }
        assert_eq!(build_windowed_gsd_pool(8, 5).unwrap().len(), 264);
        assert_eq!(window_count(100, 5), 96);
    }

    #[test]
    fn invalid_windows() {
        assert!(build_windowed_gsd_pool(4, 5).is_err());
        assert!(build_windowed_gsd_pool(4, 0).is_err());
    }

    #[test]
    fn pool_exponentials_are_real_orthogonal() {
        let pool = build_windowed_gsd_pool(2, 2).unwrap();
        for p in &pool {
            let m = operator_matrix(&QubitOperator::from_term(p.clone(), Complex64::new(1.0, 0.0)), 4).unwrap();
            assert!(m.data().iter().all(|z| z.re.abs() < 1e-15));
            let u = circuit_unitary(&pool_to_circuit(core::slice::from_ref(p), 4, &[0.3]).unwrap());
            assert!(u.data().iter().all(|z| z.im.abs() < 1e-12), "{p}");
        }
    }

    #[test]
    fn empty_and_zero_parameter_circuits_are_identity() {
        assert!(pool_to_circuit(&[], 4, &[]).unwrap().is_empty());
        let pool = build_windowed_gsd_pool(2, 2).unwrap();
        let u = circuit_unitary(&pool_to_circuit(&pool, 4, &alloc::vec![0.0; pool.len()]).unwrap());
        assert!(u.max_abs_diff(&crate::linalg::DenseMatrix::identity(16)) < 1e-12);
        assert!(pool_to_circuit(&pool, 4, &[0.0]).is_err());
    }
}
