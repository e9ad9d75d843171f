//! Cache-blocked complex matrix multiplication.
//!
//! Operands are packed into split real/imaginary panels so the inner update
//! is four independent real AXPYs, which the compiler vectorizes well.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::matrix::{DenseMatrix, MatRef};
use crate::{Error, Result};

/// Operand transform applied before multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    /// As stored.
    N,
    /// Transpose.
    T,
    /// Conjugate transpose.
    C,
}

impl Op {
    fn dims(self, m: MatRef<'_>) -> (usize, usize) {
        match self {
            Op::N => (m.rows, m.cols),
            Op::T | Op::C => (m.cols, m.rows),
        }
    }
}

const KC: usize = 128;
const MC: usize = 256;

/// `op_a(A) · op_b(B)`.
pub fn gemm(a: &DenseMatrix, b: &DenseMatrix, op_a: Op, op_b: Op) -> Result<DenseMatrix> {
    gemm_ref(a.as_ref(), b.as_ref(), op_a, op_b)
}

/// [`gemm`] on borrowed views.
pub fn gemm_ref(a: MatRef<'_>, b: MatRef<'_>, op_a: Op, op_b: Op) -> Result<DenseMatrix> {
    let (m, k) = op_a.dims(a);
    let (kb, n) = op_b.dims(b);
    if k != kb {
        return Err(Error::Dimension(alloc::format!(
            "gemm inner dimensions {k} and {kb} differ"
        )));
    }
    let mut out_re = vec![0.0f64; m * n];
    let mut out_im = vec![0.0f64; m * n];
    if m == 0 || n == 0 || k == 0 {
        return DenseMatrix::from_col_major(m, n, vec![Complex64::new(0.0, 0.0); m * n]);
    }

    // op_b(B) is read element-wise, so it is materialized once in
    // column-major order (k x n).
    let bb = materialize(b, op_b);

    let panel = MC.min(m) * KC.min(k);
    let mut a_re = vec![0.0f64; panel];
    let mut a_im = vec![0.0f64; panel];
    for p0 in (0..k).step_by(KC) {
        let kc = KC.min(k - p0);
        for i0 in (0..m).step_by(MC) {
            let mc = MC.min(m - i0);
            pack_a(a, op_a, i0, mc, p0, kc, &mut a_re, &mut a_im);
            for j in 0..n {
                let c_re = &mut out_re[j * m + i0..j * m + i0 + mc];
                let c_im = &mut out_im[j * m + i0..j * m + i0 + mc];
                let bcol = &bb[j * k + p0..j * k + p0 + kc];
                for (p, bv) in bcol.iter().enumerate() {
                    let (br, bi) = (bv.re, bv.im);
                    if br == 0.0 && bi == 0.0 {
                        continue;
                    }
                    let ar = &a_re[p * mc..(p + 1) * mc];
                    let ai = &a_im[p * mc..(p + 1) * mc];
                    for ((cr, ci), (&xr, &xi)) in c_re
                        .iter_mut()
                        .zip(c_im.iter_mut())
                        .zip(ar.iter().zip(ai))
                    {
                        *cr += xr * br - xi * bi;
                        *ci += xr * bi + xi * br;
                    }
                }
            }
        }
    }
    let data = out_re
        .into_iter()
        .zip(out_im)
        .map(|(re, im)| Complex64::new(re, im))
        .collect();
    DenseMatrix::from_col_major(m, n, data)
}

fn materialize(b: MatRef<'_>, op: Op) -> Vec<Complex64> {
    match op {
        Op::N => b.data.to_vec(),
        Op::T | Op::C => {
            let (rows, cols) = (b.cols, b.rows);
            let mut out = Vec::with_capacity(rows * cols);
            for c in 0..cols {
                for r in 0..rows {
                    let v = b.get(c, r);
                    out.push(if op == Op::C { v.conj() } else { v });
                }
            }
            out
        }
    }
}

/// Packs the `mc x kc` block of `op(A)` starting at `(i0, p0)` column by
/// column into split panels.
#[allow(clippy::too_many_arguments)]
fn pack_a(
    a: MatRef<'_>,
    op: Op,
    i0: usize,
    mc: usize,
    p0: usize,
    kc: usize,
    re: &mut [f64],
    im: &mut [f64],
) {
    for p in 0..kc {
        let dst_re = &mut re[p * mc..(p + 1) * mc];
        let dst_im = &mut im[p * mc..(p + 1) * mc];
        match op {
            Op::N => {
                let col = &a.data[(p0 + p) * a.rows + i0..(p0 + p) * a.rows + i0 + mc];
                for (i, v) in col.iter().enumerate() {
                    dst_re[i] = v.re;
                    dst_im[i] = v.im;
                }
            }
            Op::T | Op::C => {
                let sign = if op == Op::C { -1.0 } else { 1.0 };
                for i in 0..mc {
                    // op(A)[i0+i, p0+p] = A[p0+p, i0+i]
                    let v = a.get(p0 + p, i0 + i);
                    dst_re[i] = v.re;
                    dst_im[i] = sign * v.im;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn naive(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|p| a[(i, p)] * b[(p, j)]).sum()
        })
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random(7, 5, &mut rng);
        let out = gemm(&a, &DenseMatrix::identity(5), Op::N, Op::N).unwrap();
        assert_eq!(out, a);
    }

    #[test]
    fn adjoint_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random(13, 9, &mut rng);
        let b = random(9, 17, &mut rng);
        let ab = gemm(&a, &b, Op::N, Op::N).unwrap();
        let bhah = gemm(&b, &a, Op::C, Op::C).unwrap();
        assert!(ab.adjoint().max_abs_diff(&bhah) < 1e-13);
    }

    #[test]
    fn transpose_flags_match_explicit_transposes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(6, 11, &mut rng);
        let b = random(8, 6, &mut rng);
        let got = gemm(&a, &b, Op::T, Op::T).unwrap();
        let want = naive(&a.transpose(), &b.transpose());
        assert!(got.max_abs_diff(&want) < 1e-13);
        let got = gemm(&a, &a, Op::C, Op::N).unwrap();
        let want = naive(&a.adjoint(), &a);
        assert!(got.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn large_product_matches_naive_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random(300, 300, &mut rng);
        let b = random(300, 300, &mut rng);
        let got = gemm(&a, &b, Op::N, Op::N).unwrap();
        assert!(got.max_abs_diff(&naive(&a, &b)) < 1e-11);
    }

    #[test]
    fn mismatched_inner_dimension_is_rejected() {
        let a = DenseMatrix::zeros(3, 4);
        let b = DenseMatrix::zeros(5, 2);
        assert!(matches!(
            gemm(&a, &b, Op::N, Op::N),
            Err(Error::Dimension(_))
        ));
        assert!(gemm(&a, &b, Op::T, Op::N).is_err());
    }
}
