use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fermion::{FermionOperator, Ladder};
use super::jw::jordan_wigner;
use super::qubit::QubitOperator;
use crate::{Error, Result};

/// Tolerance for the Hermiticity of `h` and the permutation symmetry of `g`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Real one- and two-electron integrals over `n` orbitals.
///
/// `h` is row-major `n × n`; `g` holds chemists' `(pq|rs)` at
/// `((p·n + q)·n + r)·n + s`. Construction validates shapes, finiteness,
/// `h = hᵀ`, and the 8-fold symmetry of `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrals {
    n: usize,
    h: Vec<f64>,
    g: Vec<f64>,
    e_core: f64,
}

impl Integrals {
    pub fn new(n: usize, h: Vec<f64>, g: Vec<f64>, e_core: f64) -> Result<Self> {
        if h.len() != n * n {
            return Err(Error::Dimension(alloc::format!(
                "one-electron table has {} entries, expected {}",
                h.len(),
                n * n
            )));
        }
        if g.len() != n * n * n * n {
            return Err(Error::Dimension(alloc::format!(
                "two-electron table has {} entries, expected {}",
                g.len(),
                n * n * n * n
            )));
        }
        if !e_core.is_finite() || h.iter().chain(&g).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("integral table".into()));
        }
        let ints = Self { n, h, g, e_core };
        ints.check_symmetry()?;
        Ok(ints)
    }

    fn check_symmetry(&self) -> Result<()> {
        let n = self.n;
        for p in 0..n {
            for q in 0..p {
                let d = (self.h(p, q) - self.h(q, p)).abs();
                if d > SYMMETRY_TOLERANCE {
                    return Err(Error::NotHermitian {
                        expected: "one-electron integrals",
                        detail: alloc::format!("|h[{p},{q}] - h[{q},{p}]| = {d:e}"),
                    });
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g(p, q, r, s);
                        for (a, b, c, d) in [(q, p, r, s), (p, q, s, r), (r, s, p, q)] {
                            let w = self.g(a, b, c, d);
                            if (v - w).abs() > SYMMETRY_TOLERANCE {
                                return Err(Error::Symmetry(alloc::format!(
                                    "(pq|rs) at ({p},{q},{r},{s}) = {v:e} but ({a},{b},{c},{d}) = {w:e}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_orbitals(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n + q]
    }

    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.g[((p * self.n + q) * self.n + r) * self.n + s]
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    pub fn h_table(&self) -> &[f64] {
        &self.h
    }

    pub fn g_table(&self) -> &[f64] {
        &self.g
    }

    /// Spin-orbital integrals over `2n` interleaved modes, mode `2p + σ`.
    pub fn spin_expanded(&self) -> Self {
        let n = self.n;
        let m = 2 * n;
        let mut h = vec![0.0; m * m];
        let mut g = vec![0.0; m * m * m * m];
        for p in 0..m {
            for q in 0..m {
                if p % 2 == q % 2 {
                    h[p * m + q] = self.h(p / 2, q / 2);
                }
            }
        }
        for p in 0..m {
            for q in (p % 2..m).step_by(2) {
                for r in 0..m {
                    for s in (r % 2..m).step_by(2) {
                        g[((p * m + q) * m + r) * m + s] = self.g(p / 2, q / 2, r / 2, s / 2);
                    }
                }
            }
        }
        Self {
            n: m,
            h,
            g,
            e_core: self.e_core,
        }
    }
}

/// Second-quantized Hamiltonian over the modes of `ints`:
/// `e_core + Σ h_pq a†_p a_q + ½ Σ (pq|rs) a†_p a†_r a_s a_q`.
///
/// `ints` must already be spin-orbital integrals (see
/// [`Integrals::spin_expanded`]). Terms are emitted normal ordered.
pub fn build_molecular_hamiltonian(ints: &Integrals) -> FermionOperator {
    let n = ints.n_orbitals();
    let mut op = FermionOperator::new();
    if ints.e_core() != 0.0 {
        op.add_term(&[], Complex64::new(ints.e_core(), 0.0));
    }
    for p in 0..n {
        for q in 0..n {
            let v = ints.h(p, q);
            if v != 0.0 {
                op.add_term(&[Ladder::create(p), Ladder::annihilate(q)], Complex64::new(v, 0.0));
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                if r == p {
                    continue;
                }
                for s in 0..n {
                    if s == q {
                        continue;
                    }
                    let v = ints.g(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    // a†_p a†_r a_s a_q with creators and annihilators each
                    // in descending order.
                    let mut sign = 0.5;
                    let (c0, c1) = if p > r { (p, r) } else { (r, p) };
                    if p < r {
                        sign = -sign;
                    }
                    let (a0, a1) = if s > q { (s, q) } else { (q, s) };
                    if s < q {
                        sign = -sign;
                    }
                    op.add_term(
                        &[
                            Ladder::create(c0),
                            Ladder::create(c1),
                            Ladder::annihilate(a0),
                            Ladder::annihilate(a1),
                        ],
                        Complex64::new(sign * v, 0.0),
                    );
                }
            }
        }
    }
    op.simplify();
    op
}

/// Qubit Hamiltonian of spatial-orbital integrals: spin expansion,
/// second quantization, and the Jordan-Wigner map.
pub fn molecular_qubit_hamiltonian(spatial: &Integrals) -> Result<QubitOperator> {
    let so = spatial.spin_expanded();
    let fermion = build_molecular_hamiltonian(&so);
    let q = jordan_wigner(&fermion, so.n_orbitals())?;
    // The image of a Hermitian operator is real up to rounding.
    Ok(q.iter().map(|(p, c)| (p.clone(), Complex64::new(c.re, 0.0))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::dense::{basis_state, expectation_brute_force, sector_ground_state, spectrum};
    use crate::oracle::random_integrals;

    #[test]
    fn single_mode_hamiltonian() {
        let ints = Integrals::new(1, vec![-1.0], vec![0.0], 0.0).unwrap();
        let op = build_molecular_hamiltonian(&ints);
        let expected = FermionOperator::from_term(
            &[Ladder::create(0), Ladder::annihilate(0)],
            Complex64::new(-1.0, 0.0),
        );
        assert_eq!(op, expected);
    }

    #[test]
    fn broken_symmetry_is_rejected() {
        let mut g = vec![0.0; 16];
        g[0b0001] = 0.3;
        assert!(matches!(
            Integrals::new(2, vec![0.0; 4], g, 0.0),
            Err(Error::Symmetry(_))
        ));
        assert!(matches!(
            Integrals::new(2, vec![0.0, 1.0, 0.5, 0.0], vec![0.0; 16], 0.0),
            Err(Error::NotHermitian { .. })
        ));
        assert!(Integrals::new(2, vec![0.0; 3], vec![0.0; 16], 0.0).is_err());
    }

    /// Two-site Hubbard-like toy with hand-derivable spectrum: a single
    /// orbital with `h = ε`, `(00|00) = U` gives energies `0, ε, ε, 2ε + U`.
    #[test]
    fn single_orbital_spectrum() {
        let (eps, u) = (-0.7, 0.45);
        let ints = Integrals::new(1, vec![eps], vec![u], 0.25).unwrap();
        let q = molecular_qubit_hamiltonian(&ints).unwrap();
        let mut got = spectrum(&q, 2).unwrap();
        let mut want = vec![0.25, eps + 0.25, eps + 0.25, 2.0 * eps + u + 0.25];
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14, "{got:?} vs {want:?}");
        }
        let (e, _) = sector_ground_state(&q, 2, 1, 1).unwrap();
        assert!((e - (2.0 * eps + u + 0.25)).abs() < 1e-14);
    }

    /// ⟨HF|H|HF⟩ equals the closed-shell formula
    /// `e_core + Σ_i 2h_ii + Σ_ij [2(ii|jj) − (ij|ji)]` over occupied `i, j`.
    #[test]
    fn hartree_fock_expectation_matches_closed_shell_formula() {
        let n = 3;
        let ints = random_integrals(n, 5);
        let q = molecular_qubit_hamiltonian(&ints).unwrap();
        let hf = basis_state("110000").unwrap();
        let got = expectation_brute_force(&hf, &q).unwrap();
        let i = 0;
        let want = ints.e_core() + 2.0 * ints.h(i, i) + 2.0 * ints.g(i, i, i, i) - ints.g(i, i, i, i);
        assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-14);
        let hf2 = basis_state("111100").unwrap();
        let got = expectation_brute_force(&hf2, &q).unwrap().re;
        let mut want = ints.e_core();
        for i in 0..2 {
            want += 2.0 * ints.h(i, i);
            for j in 0..2 {
                want += 2.0 * ints.g(i, i, j, j) - ints.g(i, j, j, i);
            }
        }
        assert!((got - want).abs() < 1e-12);
    }
}
