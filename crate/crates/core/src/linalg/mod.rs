//! Dense complex linear algebra: GEMM and the SVD backends used by the MPS
//! engine.

mod gemm;
mod jacobi;
mod matrix;
mod qr_jacobi;
mod svd;

pub use gemm::{gemm, gemm_ref, Op};
pub use jacobi::{jacobi_svd_with_stats, one_sided_jacobi_svd, JacobiStats, DEFAULT_EPS, DEFAULT_MAX_SWEEPS, NEGLIGIBLE_COLUMN};
pub use matrix::{DenseMatrix, MatRef};
pub use qr_jacobi::pivoted_jacobi_svd;
pub use svd::{cross_product_svd, reference_svd, truncated_svd, SvdBackend, SvdResult};
