use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Float, Zero};

use super::gemm::{gemm, Op};
use super::jacobi::{self, one_sided_jacobi_svd};
use super::matrix::DenseMatrix;
use super::qr_jacobi::{pivoted_jacobi_svd, pivoted_uncompleted};
use crate::{Error, Result};

/// Thin SVD `A = U · diag(s) · V†`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// `m x k` left singular vectors.
    pub u: DenseMatrix,
    /// Singular values, descending and non-negative.
    pub s: Vec<f64>,
    /// `n x k` right singular vectors.
    pub v: DenseMatrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// `U · diag(s) · V†`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (c, &s) in self.s.iter().enumerate() {
            for x in us.col_mut(c) {
                *x *= s;
            }
        }
        gemm(&us, &self.v, Op::N, Op::C).expect("SVD factors have consistent shapes")
    }

    /// Keeps the leading `k` triples.
    pub fn truncate(&mut self, k: usize) {
        let k = k.min(self.s.len());
        self.s.truncate(k);
        self.u.truncate_cols(k);
        self.v.truncate_cols(k);
    }
}

/// Stable sort by singular value (descending), ties by original column.
pub(crate) fn sort_descending(svd: &mut SvdResult) {
    let k = svd.s.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.s[b]
            .partial_cmp(&svd.s[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return;
    }
    let permute = |m: &DenseMatrix| {
        DenseMatrix::from_fn(m.rows(), k, |r, c| m[(r, order[c])])
    };
    svd.u = permute(&svd.u);
    svd.v = permute(&svd.v);
    svd.s = order.iter().map(|&i| svd.s[i]).collect();
}

/// Replaces the columns of `u` that belong to zero singular values by an
/// orthonormal completion, seeded with standard basis vectors in order. A
/// seed is taken as soon as its residual norm exceeds 1/2; otherwise the
/// seed with the largest residual is used.
pub(crate) fn complete_orthonormal(u: &mut DenseMatrix, s: &[f64]) {
    let rows = u.rows();
    let first_zero = match s.iter().position(|&x| x == 0.0) {
        Some(p) => p,
        None => return,
    };
    let residual = |u: &DenseMatrix, c: usize, seed: usize| {
        let mut cand = alloc::vec![Complex64::zero(); rows];
        cand[seed] = Complex64::new(1.0, 0.0);
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for prev in 0..c {
                let col = u.col(prev);
                let proj: Complex64 = col.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in cand.iter_mut().zip(col) {
                    *x -= proj * a;
                }
            }
        }
        let norm = cand.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        (norm, cand)
    };
    let mut next_seed = 0usize;
    for c in first_zero..s.len() {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for k in 0..rows {
            let seed = (next_seed + k) % rows;
            let (norm, cand) = residual(u, c, seed);
            if norm > 0.5 {
                next_seed = seed + 1;
                best = Some((norm, cand));
                break;
            }
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, cand));
            }
        }
        let (norm, cand) = best.expect("completion needs at least one row");
        for (dst, x) in u.col_mut(c).iter_mut().zip(cand) {
            *dst = x / norm;
        }
    }
}

/// SVD backend selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SvdBackend {
    /// One-sided Jacobi with relative tolerance and sweep budget.
    Jacobi { eps: f64, max_sweeps: usize },
    /// Jacobi on the triangular factor of a column-pivoted QR.
    PivotedJacobi { eps: f64, max_sweeps: usize },
    /// Householder bidiagonalization followed by implicit-shift QR.
    Reference,
    /// Eigendecomposition of `A†A`; squares the condition number.
    CrossProduct,
}

impl Default for SvdBackend {
    fn default() -> Self {
        SvdBackend::Jacobi {
            eps: jacobi::DEFAULT_EPS,
            max_sweeps: jacobi::DEFAULT_MAX_SWEEPS,
        }
    }
}

impl SvdBackend {
    pub fn name(&self) -> &'static str {
        match self {
            SvdBackend::Jacobi { .. } => "jacobi",
            SvdBackend::PivotedJacobi { .. } => "jacobi-qr",
            SvdBackend::Reference => "reference",
            SvdBackend::CrossProduct => "crossproduct",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "jacobi" => Some(Self::default()),
            "jacobi-qr" => Some(SvdBackend::PivotedJacobi {
                eps: jacobi::DEFAULT_EPS,
                max_sweeps: jacobi::DEFAULT_MAX_SWEEPS,
            }),
            "reference" => Some(SvdBackend::Reference),
            "crossproduct" => Some(SvdBackend::CrossProduct),
            _ => None,
        }
    }

    pub fn svd(&self, a: &DenseMatrix) -> Result<SvdResult> {
        match *self {
            SvdBackend::Jacobi { eps, max_sweeps } => one_sided_jacobi_svd(a, eps, max_sweeps),
            SvdBackend::PivotedJacobi { eps, max_sweeps } => pivoted_jacobi_svd(a, eps, max_sweeps),
            SvdBackend::Reference => reference_svd(a),
            SvdBackend::CrossProduct => cross_product_svd(a),
        }
    }
}

fn to_nalgebra(a: &DenseMatrix) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(a.rows(), a.cols(), a.data())
}

fn from_nalgebra(m: &DMatrix<Complex64>) -> DenseMatrix {
    DenseMatrix::from_col_major(m.nrows(), m.ncols(), m.as_slice().to_vec())
        .expect("nalgebra matrices are dense")
}

/// Golub-Kahan SVD through `nalgebra`, used as the validation backend.
pub fn reference_svd(a: &DenseMatrix) -> Result<SvdResult> {
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input".into()));
    }
    let k = a.rows().min(a.cols());
    if k == 0 {
        return Ok(SvdResult {
            u: DenseMatrix::zeros(a.rows(), 0),
            s: Vec::new(),
            v: DenseMatrix::zeros(a.cols(), 0),
        });
    }
    let svd = to_nalgebra(a)
        // tighter tolerances than 5 ulp produce wrong complex factorizations
        .try_svd(true, true, 5.0 * f64::EPSILON, 0)
        .ok_or_else(|| Error::Backend("reference SVD did not converge".into()))?;
    let u = svd.u.ok_or_else(|| Error::Backend("missing U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Backend("missing V†".into()))?;
    let mut out = SvdResult {
        u: from_nalgebra(&u),
        s: svd.singular_values.iter().copied().collect(),
        v: from_nalgebra(&v_t.adjoint()),
    };
    sort_descending(&mut out);
    Ok(out)
}

/// SVD from the Hermitian eigendecomposition of `A†A`.
///
/// Small singular values lose relative accuracy because the condition number
/// is squared; kept as a comparison backend only.
pub fn cross_product_svd(a: &DenseMatrix) -> Result<SvdResult> {
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input".into()));
    }
    if a.rows() < a.cols() {
        let t = cross_product_svd(&a.adjoint())?;
        return Ok(SvdResult {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    let n = a.cols();
    let gram = gemm(a, a, Op::C, Op::N)?;
    let eig = to_nalgebra(&gram).symmetric_eigen();
    let v = from_nalgebra(&eig.eigenvectors);
    let mut s: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let av = gemm(a, &v, Op::N, Op::N)?;
    let mut u = DenseMatrix::zeros(a.rows(), n);
    for c in 0..n {
        if s[c] > 0.0 && s[c].is_normal() {
            for (dst, src) in u.col_mut(c).iter_mut().zip(av.col(c)) {
                *dst = src / s[c];
            }
        } else {
            s[c] = 0.0;
        }
    }
    let mut out = SvdResult { u, s, v };
    sort_descending(&mut out);
    complete_orthonormal(&mut out.u, &out.s);
    Ok(out)
}

/// Truncated SVD keeping `k = min(max_rank, #{s_i >= threshold * s_1})`
/// triples (at least one). Returns the discarded weight
/// `sum_{i>k} s_i² / sum_i s_i²`.
pub fn truncated_svd(
    a: &DenseMatrix,
    max_rank: usize,
    threshold: f64,
    backend: SvdBackend,
) -> Result<(SvdResult, f64)> {
    if max_rank == 0 {
        return Err(Error::Invalid("max_rank must be at least 1".into()));
    }
    // completion of discarded null-space columns is wasted work here
    let mut svd = match backend {
        SvdBackend::Jacobi { eps, max_sweeps } => jacobi::jacobi_uncompleted(a, eps, max_sweeps)?,
        SvdBackend::PivotedJacobi { eps, max_sweeps } => pivoted_uncompleted(a, eps, max_sweeps)?,
        _ => backend.svd(a)?,
    };
    let weight = truncate_spectrum(&mut svd, max_rank, threshold);
    complete_orthonormal(&mut svd.u, &svd.s);
    complete_orthonormal(&mut svd.v, &svd.s);
    Ok((svd, weight))
}

pub(crate) fn truncate_spectrum(svd: &mut SvdResult, max_rank: usize, threshold: f64) -> f64 {
    let total: f64 = svd.s.iter().map(|x| x * x).sum();
    let cutoff = threshold * svd.s.first().copied().unwrap_or(0.0);
    let kept = svd.s.iter().take_while(|&&x| x >= cutoff && x > 0.0).count();
    let k = kept.min(max_rank).max(1).min(svd.s.len());
    let discarded: f64 = svd.s[k..].iter().map(|x| x * x).sum();
    svd.truncate(k);
    if total > 0.0 {
        discarded / total
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let a = DenseMatrix::from_col_major(1, 1, alloc::vec![Complex64::new(2.0, 0.0)]).unwrap();
        for backend in [SvdBackend::default(), SvdBackend::Reference, SvdBackend::CrossProduct] {
            let svd = backend.svd(&a).unwrap();
            assert!((svd.s[0] - 2.0).abs() < 1e-15, "{}", backend.name());
        }
    }

    #[test]
    fn rank_one_outer_product() {
        let x: Vec<Complex64> = (0..5).map(|k| Complex64::new(k as f64 + 1.0, 0.5)).collect();
        let y: Vec<Complex64> = (0..4).map(|k| Complex64::new(0.3, -(k as f64))).collect();
        let a = DenseMatrix::from_fn(5, 4, |r, c| x[r] * y[c].conj());
        let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let ny = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for backend in [SvdBackend::default(), SvdBackend::Reference] {
            let svd = backend.svd(&a).unwrap();
            assert!((svd.s[0] - nx * ny).abs() < 1e-12 * nx * ny, "{} {:?} {}", backend.name(), svd.s, nx * ny);
            for &s in &svd.s[1..] {
                assert!(s < 1e-12 * nx * ny, "{} {s}", backend.name());
            }
            assert!(svd.u.orthonormality_residual() < 1e-10, "{}", backend.name());
            assert!(svd.v.orthonormality_residual() < 1e-10);
        }
    }

    fn diag_svd(s: &[f64]) -> SvdResult {
        SvdResult {
            u: DenseMatrix::identity(s.len()),
            s: s.to_vec(),
            v: DenseMatrix::identity(s.len()),
        }
    }

    #[test]
    fn truncation_by_threshold() {
        let mut svd = diag_svd(&[1.0, 1e-16]);
        let w = truncate_spectrum(&mut svd, 8, 1e-12);
        assert_eq!(svd.rank(), 1);
        assert!((w - 1e-32).abs() < 1e-45);
    }

    #[test]
    fn truncation_by_rank() {
        let mut svd = diag_svd(&[2.0, 2.0, 2.0, 2.0]);
        let w = truncate_spectrum(&mut svd, 2, 1e-12);
        assert_eq!(svd.rank(), 2);
        assert_eq!(w, 0.5);
    }

    #[test]
    fn zero_matrix_keeps_one_triple() {
        let a = DenseMatrix::zeros(3, 3);
        let (svd, w) = truncated_svd(&a, 4, 1e-12, SvdBackend::default()).unwrap();
        assert_eq!(svd.rank(), 1);
        assert_eq!(w, 0.0);
        assert!(matches!(
            truncated_svd(&a, 0, 1e-12, SvdBackend::default()),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn sort_is_stable_on_ties() {
        let mut svd = diag_svd(&[1.0, 3.0, 1.0, 3.0]);
        sort_descending(&mut svd);
        assert_eq!(svd.s, alloc::vec![3.0, 3.0, 1.0, 1.0]);
        // columns 1, 3, 0, 2
        assert_eq!(svd.u[(1, 0)].re, 1.0);
        assert_eq!(svd.u[(3, 1)].re, 1.0);
        assert_eq!(svd.u[(0, 2)].re, 1.0);
        assert_eq!(svd.u[(2, 3)].re, 1.0);
    }

    #[test]
    fn backend_names_round_trip() {
        for name in ["jacobi", "reference", "crossproduct"] {
            assert_eq!(SvdBackend::from_name(name).unwrap().name(), name);
        }
        assert!(SvdBackend::from_name("qr").is_none());
    }
}
