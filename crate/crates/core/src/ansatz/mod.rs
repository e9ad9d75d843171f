//! Ansatz construction: UCCSD excitations, first-order Trotterization into
//! Pauli exponentials, gate synthesis, and the windowed generalized pool used
//! for hydrogen chains.
//!
//! Templates keep parameters symbolic; [`AnsatzTemplate::bind`] produces the
//! gate [`Circuit`](crate::mps::Circuit) for concrete values.

mod excitation;
mod pool;
mod template;
#[cfg(test)]
mod tests;

pub use excitation::{anti_hermitian_cluster, build_uccsd, parameter_count, ExcitationKind, ExcitationOperator};
pub use pool::{build_windowed_gsd_pool, pool_template, pool_to_circuit, window_count, DEFAULT_WINDOW};
pub use template::{
    compile_pauli_exponential, trotterize_first_order, uccsd_template, AnsatzTemplate, ClusterTerm,
    TemplateBlock, GENERATOR_TOLERANCE,
};
