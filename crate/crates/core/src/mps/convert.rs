use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::state::{MpsConfig, MpsState, SiteTensor};
use crate::linalg::{gemm_ref, truncated_svd, DenseMatrix, MatRef, Op};
use crate::pauli::dense::{qubit_count, MAX_DENSE_QUBITS};
use crate::{Error, Result};

/// Largest qubit count [`MpsState::to_statevector`] accepts.
pub const MAX_EXPORT_QUBITS: usize = 16;

impl MpsState {
    /// Contracts all sites into the `2^n` amplitudes, qubit 0 most
    /// significant.
    pub fn to_statevector(&self) -> Result<Vec<Complex64>> {
        let n = self.n_qubits();
        if n > MAX_EXPORT_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        // psi is (2^k) × D_k, column-major.
        let mut psi = vec![Complex64::new(self.lambda(0)[0], 0.0)];
        let mut rows = 1usize;
        for t in self.sites() {
            let prod = gemm_ref(MatRef::new(rows, t.dl(), &psi)?, t.wide(), Op::N, Op::N)?;
            // prod columns are (i, β); regroup rows as (idx, i).
            let dr = t.dr();
            let mut next = vec![Complex64::new(0.0, 0.0); 2 * rows * dr];
            for b in 0..dr {
                for i in 0..2 {
                    let col = prod.col(i * dr + b);
                    for (idx, v) in col.iter().enumerate() {
                        next[b * 2 * rows + 2 * idx + i] = *v;
                    }
                }
            }
            psi = next;
            rows *= 2;
        }
        Ok(psi)
    }

    /// Right-canonical decomposition of a normalized statevector by SVDs
    /// from the right end, truncated per `config`.
    pub fn from_statevector(psi: &[Complex64], config: MpsConfig) -> Result<Self> {
        let n = qubit_count(psi.len())?;
        debug_assert!(n <= MAX_DENSE_QUBITS);
        if n == 0 {
            return Err(Error::Invalid("zero-qubit state".into()));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NonFinite("statevector norm".into()));
        }
        let mut sites: Vec<Option<SiteTensor>> = vec![None; n];
        let mut lambdas = vec![vec![1.0]; n + 1];
        let mut discarded = 0.0;
        // rest is (2^k) × (2 · D) with columns (i_k, β) for the current site k.
        let mut rest: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        let mut dr = 1usize;
        for k in (1..n).rev() {
            let rows = 1usize << (k + 1);
            // Regroup amplitudes (idx, i) × β into idx × (i, β).
            let mut m = vec![Complex64::new(0.0, 0.0); rows / 2 * 2 * dr];
            let half = rows / 2;
            for b in 0..dr {
                for idx in 0..half {
                    for i in 0..2 {
                        m[(i * dr + b) * half + idx] = rest[b * rows + 2 * idx + i];
                    }
                }
            }
            let mat = DenseMatrix::from_col_major(half, 2 * dr, m)?;
            let (svd, w) = truncated_svd(&mat, config.max_bond, config.threshold, config.backend)?;
            discarded += w;
            let chi = svd.s.len();
            let s_norm = svd.s.iter().map(|s| s * s).sum::<f64>().sqrt();
            let mut site = vec![Complex64::new(0.0, 0.0); chi * 2 * dr];
            for b in 0..chi {
                for c in 0..2 * dr {
                    site[c * chi + b] = svd.v[(c, b)].conj();
                }
            }
            sites[k] = Some(SiteTensor::new(chi, dr, site)?);
            lambdas[k] = svd.s.iter().map(|s| s / s_norm).collect();
            // rest = U·diag(s)/‖s‖, half × chi.
            let mut next = svd.u.into_data();
            for b in 0..chi {
                for v in &mut next[b * half..(b + 1) * half] {
                    *v *= svd.s[b] / s_norm;
                }
            }
            rest = next;
            dr = chi;
        }
        // rest is 2 × dr with rows i_0: site 0 has dl = 1.
        let mut first = vec![Complex64::new(0.0, 0.0); 2 * dr];
        for b in 0..dr {
            for i in 0..2 {
                first[i * dr + b] = rest[b * 2 + i];
            }
        }
        sites[0] = Some(SiteTensor::new(1, dr, first)?);
        let sites = sites.into_iter().map(Option::unwrap).collect();
        let mut state = Self::from_parts(sites, lambdas, config)?;
        state.add_discarded(discarded);
        Ok(state)
    }
}
