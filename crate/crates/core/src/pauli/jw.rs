use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fermion::{FermionOperator, Ladder};
use super::qubit::QubitOperator;
use super::string::{Pauli, PauliString};
use crate::{Error, Result};

/// Jordan-Wigner image of a fermion operator on `n_qubits` modes.
///
/// `a†_p = ½(X_p − iY_p) Z_{p−1}…Z_0` and `a_p = ½(X_p + iY_p) Z_{p−1}…Z_0`:
/// mode `p` is qubit `p`, and the parity string runs over lower modes.
pub fn jordan_wigner(op: &FermionOperator, n_qubits: usize) -> Result<QubitOperator> {
    if let Some(mode) = op.max_mode().filter(|&m| m >= n_qubits) {
        return Err(Error::ModeOutOfRange {
            mode,
            n_modes: n_qubits,
        });
    }
    let mut out = QubitOperator::new();
    let mut scratch = Vec::new();
    for (ladders, c) in op.iter() {
        expand_product(ladders, c, &mut scratch);
        for (p, c) in scratch.drain(..) {
            out.add_term(p, c);
        }
    }
    out.simplify();
    Ok(out)
}

/// Two-term image of one ladder operator.
pub fn ladder_image(l: Ladder) -> [(PauliString, Complex64); 2] {
    let mut x = PauliString::identity();
    for q in 0..l.mode {
        x.set(q, Some(Pauli::Z));
    }
    let mut y = x.clone();
    x.set(l.mode, Some(Pauli::X));
    y.set(l.mode, Some(Pauli::Y));
    let sign = if l.dagger { -0.5 } else { 0.5 };
    [(x, Complex64::new(0.5, 0.0)), (y, Complex64::new(0.0, sign))]
}

/// Expands `c · l_0 l_1 … l_k` into at most `2^k` weighted strings.
fn expand_product(ladders: &[Ladder], c: Complex64, out: &mut Vec<(PauliString, Complex64)>) {
    out.clear();
    out.push((PauliString::identity(), c));
    let mut next = vec![];
    for &l in ladders {
        let image = ladder_image(l);
        next.clear();
        for (p, c) in out.iter() {
            for (q, d) in &image {
                let (phase, r) = p.mul(q);
                next.push((r, phase * c * d));
            }
        }
        core::mem::swap(out, &mut next);
    }
}
