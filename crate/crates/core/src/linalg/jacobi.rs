//! Hestenes one-sided Jacobi SVD.
//!
//! Column pairs are visited cyclic-by-rows. A pair is rotated when
//! `|a_i† a_j| >= eps * ‖a_i‖ ‖a_j‖`; the sweep loop ends at the first sweep
//! in which every pair is skipped. Complex columns are handled by folding the
//! phase of `a_i† a_j` into column `j` before applying the real rotation
//!
//! ```text
//! tau = (‖a_i‖² - ‖a_j‖²) / (2 |a_i† a_j|)
//! t   = sign(tau) / (|tau| + sqrt(1 + tau²))
//! c   = 1 / sqrt(1 + t²),   s = t c
//! a_i <- c a_i + s w a_j,   a_j <- -s a_i + c w a_j,   w = conj(phase)
//! ```
//!
//! The same transform is accumulated into `V`. Singular values are the final
//! column norms and `U` holds the normalized columns. Columns that shrink to
//! rounding level are frozen at zero so rank-deficient input converges.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::matrix::DenseMatrix;
use super::svd::{complete_orthonormal, sort_descending, SvdResult};
use crate::{Error, Result};

/// Default relative orthogonality threshold.
pub const DEFAULT_EPS: f64 = 1e-12;
/// Default sweep budget.
pub const DEFAULT_MAX_SWEEPS: usize = 30;
/// Columns with norm below this fraction of `‖A‖_F` are rounding residue:
/// they take no further rotations and report a zero singular value.
pub const NEGLIGIBLE_COLUMN: f64 = 1e-13;

/// Diagnostics of one Jacobi run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiStats {
    /// Sweeps that performed at least one rotation.
    pub sweeps: usize,
    pub rotations: usize,
}

/// Split-storage column block: column `c` lives at `[c * rows, (c + 1) * rows)`.
struct Columns {
    rows: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Columns {
    fn from_matrix(a: &DenseMatrix) -> Self {
        Self {
            rows: a.rows(),
            re: a.data().iter().map(|z| z.re).collect(),
            im: a.data().iter().map(|z| z.im).collect(),
        }
    }

    fn identity(n: usize) -> Self {
        let mut re = vec![0.0; n * n];
        for i in 0..n {
            re[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            re,
            im: vec![0.0; n * n],
        }
    }

    fn norm_sqr(&self, c: usize) -> f64 {
        let r = c * self.rows..(c + 1) * self.rows;
        self.re[r.clone()]
            .iter()
            .zip(&self.im[r])
            .map(|(x, y)| x * x + y * y)
            .sum()
    }

    /// `a_i† a_j`.
    fn dot(&self, i: usize, j: usize) -> Complex64 {
        const L: usize = 4;
        let n = self.rows;
        let (xr, xi) = (&self.re[i * n..(i + 1) * n], &self.im[i * n..(i + 1) * n]);
        let (yr, yi) = (&self.re[j * n..(j + 1) * n], &self.im[j * n..(j + 1) * n]);
        // independent lanes so the reduction vectorizes
        let mut re = [0.0f64; L];
        let mut im = [0.0f64; L];
        let body = n - n % L;
        for k in (0..body).step_by(L) {
            for l in 0..L {
                re[l] += xr[k + l] * yr[k + l] + xi[k + l] * yi[k + l];
                im[l] += xr[k + l] * yi[k + l] - xi[k + l] * yr[k + l];
            }
        }
        for k in body..n {
            re[0] += xr[k] * yr[k] + xi[k] * yi[k];
            im[0] += xr[k] * yi[k] - xi[k] * yr[k];
        }
        Complex64::new(
            (re[0] + re[1]) + (re[2] + re[3]),
            (im[0] + im[1]) + (im[2] + im[3]),
        )
    }

    /// `a_i <- c a_i + s w a_j`, `a_j <- -s a_i + c w a_j`.
    fn rotate(&mut self, i: usize, j: usize, c: f64, s: f64, w: Complex64) {
        let n = self.rows;
        debug_assert!(i < j);
        let (head_re, tail_re) = self.re.split_at_mut(j * n);
        let (head_im, tail_im) = self.im.split_at_mut(j * n);
        let (ir, ii) = (&mut head_re[i * n..(i + 1) * n], &mut head_im[i * n..(i + 1) * n]);
        let (jr, ji) = (&mut tail_re[..n], &mut tail_im[..n]);
        let (wr, wi) = (w.re, w.im);
        for k in 0..n {
            let (ar, ai) = (ir[k], ii[k]);
            let br = wr * jr[k] - wi * ji[k];
            let bi = wr * ji[k] + wi * jr[k];
            ir[k] = c * ar + s * br;
            ii[k] = c * ai + s * bi;
            jr[k] = c * br - s * ar;
            ji[k] = c * bi - s * ai;
        }
    }

    fn column(&self, c: usize) -> impl Iterator<Item = Complex64> + '_ {
        let r = c * self.rows..(c + 1) * self.rows;
        self.re[r.clone()]
            .iter()
            .zip(&self.im[r])
            .map(|(&re, &im)| Complex64::new(re, im))
    }
}

/// One-sided Jacobi SVD with relative orthogonality tolerance `eps`.
///
/// Matrices with more columns than rows are decomposed through their adjoint.
pub fn one_sided_jacobi_svd(a: &DenseMatrix, eps: f64, max_sweeps: usize) -> Result<SvdResult> {
    jacobi_svd_with_stats(a, eps, max_sweeps).map(|(svd, _)| svd)
}

/// [`one_sided_jacobi_svd`] that also reports sweep statistics.
pub fn jacobi_svd_with_stats(
    a: &DenseMatrix,
    eps: f64,
    max_sweeps: usize,
) -> Result<(SvdResult, JacobiStats)> {
    jacobi_impl(a, eps, max_sweeps, true)
}

/// Jacobi SVD whose `U` columns for zero singular values are left zero.
pub(crate) fn jacobi_uncompleted(a: &DenseMatrix, eps: f64, max_sweeps: usize) -> Result<SvdResult> {
    jacobi_impl(a, eps, max_sweeps, false).map(|(svd, _)| svd)
}

fn jacobi_impl(a: &DenseMatrix, eps: f64, max_sweeps: usize, complete: bool) -> Result<(SvdResult, JacobiStats)> {
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input".into()));
    }
    if a.rows() < a.cols() {
        let (svd, stats) = jacobi_tall(&a.adjoint(), eps, max_sweeps, complete)?;
        return Ok((
            SvdResult {
                u: svd.v,
                s: svd.s,
                v: svd.u,
            },
            stats,
        ));
    }
    jacobi_tall(a, eps, max_sweeps, complete)
}

pub(super) fn jacobi_tall(a: &DenseMatrix, eps: f64, max_sweeps: usize, complete: bool) -> Result<(SvdResult, JacobiStats)> {
    let (m, n) = (a.rows(), a.cols());
    let mut work = Columns::from_matrix(a);
    let mut v = Columns::identity(n);
    let mut norms: Vec<f64> = (0..n).map(|c| work.norm_sqr(c)).collect();
    let tiny = NEGLIGIBLE_COLUMN * NEGLIGIBLE_COLUMN * norms.iter().sum::<f64>();
    let mut stats = JacobiStats {
        sweeps: 0,
        rotations: 0,
    };

    let mut converged = n < 2;
    let mut off = 0.0f64;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        let mut pass = true;
        off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let (bii, bjj) = (norms[i], norms[j]);
                if bii <= tiny || bjj <= tiny {
                    continue;
                }
                let bij = work.dot(i, j);
                let abs = bij.norm();
                let scale = (bii * bjj).sqrt();
                off = off.max(abs / scale);
                if abs == 0.0 || abs < eps * scale {
                    continue;
                }
                let tau = (bii - bjj) / (2.0 * abs);
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let w = (bij / abs).conj();
                work.rotate(i, j, c, s, w);
                v.rotate(i, j, c, s, w);
                norms[i] = bii + t * abs;
                norms[j] = bjj - t * abs;
                pass = false;
                stats.rotations += 1;
            }
        }
        if pass {
            converged = true;
            break;
        }
        stats.sweeps += 1;
        // refresh against drift of the incremental norm updates
        for (c, norm) in norms.iter_mut().enumerate() {
            *norm = work.norm_sqr(c);
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: max_sweeps,
            off_orthogonality: off,
        });
    }

    let mut sigma = Vec::with_capacity(n);
    let mut u = DenseMatrix::zeros(m, n);
    for c in 0..n {
        let s2 = work.norm_sqr(c);
        let s = s2.sqrt();
        sigma.push(s);
        if s2 > tiny && s.is_normal() {
            for (dst, src) in u.col_mut(c).iter_mut().zip(work.column(c)) {
                *dst = src / s;
            }
        } else {
            sigma[c] = 0.0;
        }
    }
    let vm = DenseMatrix::from_col_major(n, n, v.column_all())?;
    let mut svd = SvdResult { u, s: sigma, v: vm };
    sort_descending(&mut svd);
    if complete {
        complete_orthonormal(&mut svd.u, &svd.s);
    }
    Ok((svd, stats))
}

impl Columns {
    fn column_all(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gemm::{gemm, Op};

    fn real(rows: usize, cols: usize, vals: &[f64]) -> DenseMatrix {
        let data: Vec<Complex64> = vals.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        DenseMatrix::from_row_major(rows, cols, &data).unwrap()
    }

    #[test]
    fn repeated_columns_converge() {
        let mut rng_state = 7u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let base: Vec<Complex64> = (0..24).map(|_| Complex64::new(next(), next())).collect();
        // columns 2..8 repeat columns 0 and 1 with phases: rank 2
        let a = DenseMatrix::from_fn(12, 8, |r, c| {
            let phase = Complex64::from_polar(1.0, c as f64);
            phase * base[(c % 2) * 12 + r]
        });
        let svd = one_sided_jacobi_svd(&a, DEFAULT_EPS, DEFAULT_MAX_SWEEPS).unwrap();
        assert!(svd.s[2..].iter().all(|&x| x < 1e-12 * svd.s[0]));
        assert!(svd.u.orthonormality_residual() < 1e-10);
        assert!(svd.v.orthonormality_residual() < 1e-10);
        let mut diff = svd.reconstruct();
        for (d, x) in diff.data_mut().iter_mut().zip(a.data()) {
            *d -= x;
        }
        assert!(diff.frobenius_norm() < 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn identity_needs_no_rotation() {
        let (svd, stats) = jacobi_svd_with_stats(&DenseMatrix::identity(3), 1e-12, 30).unwrap();
        assert_eq!(svd.s, vec![1.0, 1.0, 1.0]);
        assert_eq!(stats.rotations, 0);
        assert_eq!(stats.sweeps, 0);
    }

    #[test]
    fn diagonal_values_are_sorted_with_permuted_vectors() {
        let a = real(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let svd = one_sided_jacobi_svd(&a, 1e-12, 30).unwrap();
        assert_eq!(svd.s, vec![3.0, 2.0, 1.0]);
        // column order (0, 2, 1)
        assert_eq!(svd.u[(0, 0)].re, 1.0);
        assert_eq!(svd.u[(2, 1)].re, 1.0);
        assert_eq!(svd.u[(1, 2)].re, 1.0);
        assert_eq!(svd.v[(2, 1)].re, 1.0);
        assert!(svd.reconstruct().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn zero_column_gets_a_deterministic_completion() {
        let a = real(3, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let svd = one_sided_jacobi_svd(&a, 1e-12, 30).unwrap();
        assert_eq!(svd.s[1], 0.0);
        assert!(svd.u.orthonormality_residual() < 1e-14);
        // first standard basis vector orthogonal to u_0 = (1,1,0)/√2 after
        // projection is (1,-1,0)/√2
        let expected = 1.0 / 2.0f64.sqrt();
        assert!((svd.u[(0, 1)].re - expected).abs() < 1e-14);
        assert!((svd.u[(1, 1)].re + expected).abs() < 1e-14);
    }

    #[test]
    fn wide_matrix_goes_through_the_adjoint() {
        let data: Vec<Complex64> = (0..12)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.7).cos()))
            .collect();
        let a = DenseMatrix::from_col_major(3, 4, data).unwrap();
        let svd = one_sided_jacobi_svd(&a, 1e-12, 30).unwrap();
        assert_eq!((svd.u.rows(), svd.u.cols()), (3, 3));
        assert_eq!((svd.v.rows(), svd.v.cols()), (4, 3));
        assert!(svd.reconstruct().max_abs_diff(&a) < 1e-13);
        let vhv = gemm(&svd.v, &svd.v, Op::C, Op::N).unwrap();
        assert!(vhv.max_abs_diff(&DenseMatrix::identity(3)) < 1e-13);
    }

    #[test]
    fn sweep_budget_exhaustion_is_reported() {
        let data: Vec<Complex64> = (0..64)
            .map(|k| Complex64::new((k as f64 * 1.3).sin(), (k as f64 * 0.4).cos()))
            .collect();
        let a = DenseMatrix::from_col_major(8, 8, data).unwrap();
        match one_sided_jacobi_svd(&a, 1e-12, 1) {
            Err(Error::NoConvergence {
                sweeps,
                off_orthogonality,
            }) => {
                assert_eq!(sweeps, 1);
                assert!(off_orthogonality > 1e-12);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut a = DenseMatrix::identity(2);
        a[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            one_sided_jacobi_svd(&a, 1e-12, 30),
            Err(Error::NonFinite(_))
        ));
    }
}
