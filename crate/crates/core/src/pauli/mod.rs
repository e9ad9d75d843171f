//! Pauli-string algebra, fermion operators, and the Jordan-Wigner map.

pub mod dense;
mod fermion;
mod hamiltonian;
mod jw;
mod qubit;
mod string;

pub use fermion::{hopping, number_operator, FermionOperator, Ladder, LadderString};
pub use hamiltonian::{build_molecular_hamiltonian, molecular_qubit_hamiltonian, Integrals, SYMMETRY_TOLERANCE};
pub use jw::{jordan_wigner, ladder_image};
pub use qubit::QubitOperator;
pub use string::{Pauli, PauliString};

pub use dense::expectation_brute_force;
