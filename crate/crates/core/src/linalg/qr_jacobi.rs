//! One-sided Jacobi preceded by a column-pivoted Householder QR.
//!
//! `A P = Q R` is formed first and rows of `R` whose pivot norm falls below
//! [`NEGLIGIBLE_COLUMN`]` · ‖A‖_F` are dropped. Jacobi then runs on `R†`,
//! whose columns are graded by the pivoting and close to orthogonal, so far
//! fewer sweeps are needed. With `R† = U_x Σ V_x†`:
//!
//! ```text
//! U = Q [V_x; 0],   V = P U_x
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use super::jacobi::{jacobi_tall, NEGLIGIBLE_COLUMN};
use super::matrix::DenseMatrix;
use super::svd::{complete_orthonormal, SvdResult};
use crate::{Error, Result};

/// Jacobi SVD on the triangular factor of a pivoted QR of `a`.
pub fn pivoted_jacobi_svd(a: &DenseMatrix, eps: f64, max_sweeps: usize) -> Result<SvdResult> {
    pivoted_impl(a, eps, max_sweeps, true)
}

/// As [`pivoted_jacobi_svd`] with zero columns left in place of the
/// completion for zero singular values.
pub(crate) fn pivoted_uncompleted(a: &DenseMatrix, eps: f64, max_sweeps: usize) -> Result<SvdResult> {
    pivoted_impl(a, eps, max_sweeps, false)
}

fn pivoted_impl(a: &DenseMatrix, eps: f64, max_sweeps: usize, complete: bool) -> Result<SvdResult> {
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input".into()));
    }
    if a.rows() < a.cols() {
        let svd = pivoted_tall(&a.adjoint(), eps, max_sweeps, complete)?;
        return Ok(SvdResult { u: svd.v, s: svd.s, v: svd.u });
    }
    pivoted_tall(a, eps, max_sweeps, complete)
}

fn col_norm_sqr(col: &[Complex64]) -> f64 {
    col.iter().map(|z| z.norm_sqr()).sum()
}

/// Householder reflector `I − β v v†` stored from row `k` down.
struct Reflector {
    k: usize,
    v: Vec<Complex64>,
    beta: f64,
}

impl Reflector {
    fn apply(&self, col: &mut [Complex64]) {
        let tail = &mut col[self.k..];
        let d: Complex64 = self.v.iter().zip(tail.iter()).map(|(v, x)| v.conj() * x).sum();
        let f = d * self.beta;
        for (x, v) in tail.iter_mut().zip(&self.v) {
            *x -= f * v;
        }
    }
}

fn pivoted_tall(a: &DenseMatrix, eps: f64, max_sweeps: usize, complete: bool) -> Result<SvdResult> {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<f64> = (0..n).map(|c| col_norm_sqr(w.col(c))).collect();
    let mut reference = norms.clone();
    let tiny = NEGLIGIBLE_COLUMN * NEGLIGIBLE_COLUMN * norms.iter().sum::<f64>();
    let mut reflectors: Vec<Reflector> = Vec::new();

    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| norms[x].partial_cmp(&norms[y]).unwrap_or(core::cmp::Ordering::Equal))
            .expect("non-empty pivot range");
        if norms[p] <= tiny {
            break;
        }
        if p != k {
            swap_cols(&mut w, k, p);
            perm.swap(k, p);
            norms.swap(k, p);
            reference.swap(k, p);
        }
        let x = &w.col(k)[k..];
        let xnorm = col_norm_sqr(x).sqrt();
        let phase = if x[0] == Complex64::zero() { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm = col_norm_sqr(&v);
        let h = Reflector { k, v, beta: if vnorm > 0.0 { 2.0 / vnorm } else { 0.0 } };
        {
            let col = w.col_mut(k);
            col[k] = alpha;
            for z in &mut col[k + 1..] {
                *z = Complex64::zero();
            }
        }
        for j in k + 1..n {
            h.apply(w.col_mut(j));
            norms[j] -= w.col(j)[k].norm_sqr();
            // downdating loses digits once most of the norm is gone
            if norms[j] <= 1e-6 * reference[j] {
                norms[j] = col_norm_sqr(&w.col(j)[k + 1..]);
                reference[j] = norms[j];
            }
        }
        reflectors.push(h);
    }

    let r = reflectors.len();
    // R† is n x r: row j, column i holds conj(R[i, j]) for j >= i
    let rt = DenseMatrix::from_fn(n, r, |j, i| if j >= i { w[(i, j)].conj() } else { Complex64::zero() });
    let (inner, _) = jacobi_tall(&rt, eps, max_sweeps, false)?;

    let mut u = DenseMatrix::zeros(m, n);
    for c in 0..r {
        let col = u.col_mut(c);
        col[..r].copy_from_slice(inner.v.col(c));
        for h in reflectors.iter().rev() {
            h.apply(col);
        }
    }
    let mut v = DenseMatrix::zeros(n, n);
    for c in 0..r {
        for i in 0..n {
            v[(perm[i], c)] = inner.u[(i, c)];
        }
    }
    let mut s = inner.s;
    s.resize(n, 0.0);
    for c in 0..r {
        if s[c] == 0.0 {
            u.col_mut(c).iter_mut().for_each(|z| *z = Complex64::zero());
        }
    }
    if complete {
        complete_orthonormal(&mut u, &s);
        complete_orthonormal(&mut v, &s);
    }
    Ok(SvdResult { u, s, v })
}

fn swap_cols(w: &mut DenseMatrix, a: usize, b: usize) {
    let rows = w.rows();
    let (lo, hi) = (a.min(b), a.max(b));
    let (head, tail) = w.data_mut().split_at_mut(hi * rows);
    head[lo * rows..(lo + 1) * rows].swap_with_slice(&mut tail[..rows]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::jacobi::{DEFAULT_EPS, DEFAULT_MAX_SWEEPS};
    use alloc::vec;
    use crate::linalg::reference_svd;

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    fn random(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut next = lcg(seed);
        DenseMatrix::from_fn(m, n, |_, _| Complex64::new(next(), next()))
    }

    fn check(a: &DenseMatrix) {
        let svd = pivoted_jacobi_svd(a, DEFAULT_EPS, DEFAULT_MAX_SWEEPS).unwrap();
        let k = a.rows().min(a.cols());
        assert_eq!(svd.s.len(), k);
        assert!(svd.s.windows(2).all(|p| p[0] >= p[1]));
        assert!(svd.u.orthonormality_residual() < 1e-10);
        assert!(svd.v.orthonormality_residual() < 1e-10);
        let scale = a.frobenius_norm().max(1e-300);
        assert!(svd.reconstruct().max_abs_diff(a) < 1e-12 * scale);
        let want = reference_svd(a).unwrap();
        for (x, y) in svd.s.iter().zip(&want.s) {
            assert!((x - y).abs() < 1e-12 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn random_shapes_match_reference() {
        for (m, n, seed) in [(1, 1, 1), (6, 6, 2), (9, 4, 3), (4, 9, 4), (32, 20, 5), (17, 1, 6)] {
            check(&random(m, n, seed));
        }
    }

    #[test]
    fn rank_deficient_input_is_cut_at_the_pivot() {
        let b = random(10, 3, 8);
        let c = random(3, 7, 9);
        let a = crate::linalg::gemm(&b, &c, crate::linalg::Op::N, crate::linalg::Op::N).unwrap();
        check(&a);
        let svd = pivoted_jacobi_svd(&a, DEFAULT_EPS, DEFAULT_MAX_SWEEPS).unwrap();
        assert!(svd.s[3..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_matrix() {
        let svd = pivoted_jacobi_svd(&DenseMatrix::zeros(3, 2), DEFAULT_EPS, DEFAULT_MAX_SWEEPS).unwrap();
        assert_eq!(svd.s, vec![0.0, 0.0]);
        assert!(svd.u.orthonormality_residual() < 1e-14);
        assert!(svd.v.orthonormality_residual() < 1e-14);
    }

    #[test]
    fn graded_columns() {
        let mut a = random(8, 8, 10);
        for c in 0..8 {
            let f = 10f64.powi(-(c as i32) * 2);
            a.col_mut(c).iter_mut().for_each(|z| *z *= f);
        }
        let svd = pivoted_jacobi_svd(&a, DEFAULT_EPS, DEFAULT_MAX_SWEEPS).unwrap();
        assert!(svd.reconstruct().max_abs_diff(&a) < 1e-13);
    }
}
