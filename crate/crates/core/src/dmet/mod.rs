//! Density matrix embedding: reduced density matrices measured on MPS
//! states, fragment energies, and the electron-count check.
//!
//! One pass only. Bath orbitals and the environment density come from the
//! fragment input; nothing here fits a correlation potential.
//!
//! Index conventions: `rdm1.get(p, q) = ⟨a†_p a_q⟩` and
//! `rdm2.get(p, q, r, s) = ⟨a†_p a†_q a_r a_s⟩`. In the spatial basis both
//! are summed over spin, so `rdm2.get(p, q, r, s)` is
//! `Σ_{στ} ⟨a†_{pσ} a†_{qτ} a_{rτ} a_{sσ}⟩`.

mod fragment;
mod rdm;

pub use fragment::{
    assemble_total, fragment_energy, DmetTotal, FragmentResult, FragmentSolver, FragmentSpec, ELECTRON_TOLERANCE,
};
pub use rdm::{measure_rdm1, measure_rdm2, measure_rdms, Rdm1, Rdm2, RdmPair, SpinMode};
