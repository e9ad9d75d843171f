//! Right-canonical matrix-product-state engine.

mod convert;
mod expect;
mod gate;
mod state;
#[cfg(test)]
mod tests;

pub use convert::MAX_EXPORT_QUBITS;
pub use expect::IMAGINARY_TOLERANCE;
pub use gate::{flip, kron, matmul, matrices, Circuit, Gate, GateLabel, Mat2, Mat4, UNITARITY_TOLERANCE};
pub use state::{MpsConfig, MpsState, SiteTensor};
