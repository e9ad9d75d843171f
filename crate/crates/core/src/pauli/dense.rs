//! Dense statevector helpers used as oracles for small systems.
//!
//! Basis index convention: qubit 0 is the most significant bit, so the
//! bitstring `b_0 b_1 … b_{n−1}` read left to right is the binary index.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::qubit::QubitOperator;
use super::string::PauliString;
use crate::linalg::DenseMatrix;
use crate::{Error, Result};

/// Largest qubit count accepted by the statevector routines.
pub const MAX_DENSE_QUBITS: usize = 14;
/// Largest qubit count for explicit `2^n × 2^n` matrices.
pub const MAX_MATRIX_QUBITS: usize = 12;

/// Qubit count of a statevector, checking the length is a power of two.
pub fn qubit_count(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Dimension(alloc::format!(
            "statevector length {len} is not a power of two"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(n)
}

/// `(x, z, y_count)` masks of `p` over basis-index bits.
fn index_masks(p: &PauliString, n: usize) -> Result<(usize, usize, usize)> {
    let (mut x, mut z, mut ys) = (0usize, 0usize, 0usize);
    for (site, axis) in p.ops() {
        if site >= n {
            return Err(Error::QubitOutOfRange {
                qubit: site,
                n_qubits: n,
            });
        }
        let bit = 1usize << (n - 1 - site);
        match axis {
            super::Pauli::X => x |= bit,
            super::Pauli::Y => {
                x |= bit;
                z |= bit;
                ys += 1;
            }
            super::Pauli::Z => z |= bit,
        }
    }
    Ok((x, z, ys))
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Adds `c · P|ψ⟩` into `out`.
fn accumulate_pauli(state: &[Complex64], p: &PauliString, c: Complex64, n: usize, out: &mut [Complex64]) -> Result<()> {
    let (x, z, ys) = index_masks(p, n)?;
    // Y = iXZ, so P|b⟩ = i^{#Y} (−1)^{|b ∧ z|} |b ⊕ x⟩.
    let base = c * I_POWERS[ys % 4];
    for (b, &amp) in state.iter().enumerate() {
        let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out[b ^ x] += base * amp * sign;
    }
    Ok(())
}

/// `P|ψ⟩`.
pub fn apply_pauli(state: &[Complex64], p: &PauliString) -> Result<Vec<Complex64>> {
    let n = qubit_count(state.len())?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    accumulate_pauli(state, p, Complex64::new(1.0, 0.0), n, &mut out)?;
    Ok(out)
}

/// `O|ψ⟩`.
pub fn apply_operator(state: &[Complex64], op: &QubitOperator) -> Result<Vec<Complex64>> {
    let n = qubit_count(state.len())?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (p, &c) in op.iter() {
        accumulate_pauli(state, p, c, n, &mut out)?;
    }
    Ok(out)
}

/// `⟨ψ|O|ψ⟩` by direct Pauli action on the amplitudes.
pub fn expectation_brute_force(state: &[Complex64], op: &QubitOperator) -> Result<Complex64> {
    let applied = apply_operator(state, op)?;
    Ok(inner(state, &applied))
}

/// `⟨a|b⟩`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Computational basis state from a `0`/`1` string.
pub fn basis_state(bits: &str) -> Result<Vec<Complex64>> {
    let n = bits.len();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let index = usize::from_str_radix(bits, 2)
        .map_err(|_| Error::Invalid(alloc::format!("bitstring {bits:?} is not binary")))?;
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
    v[index] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// Explicit matrix of `op` on `n` qubits.
pub fn operator_matrix(op: &QubitOperator, n: usize) -> Result<DenseMatrix> {
    if n > MAX_MATRIX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let dim = 1usize << n;
    let mut m = DenseMatrix::zeros(dim, dim);
    for (p, &c) in op.iter() {
        let (x, z, ys) = index_masks(p, n)?;
        let base = c * I_POWERS[ys % 4];
        for b in 0..dim {
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(b ^ x, b)] += base * sign;
        }
    }
    Ok(m)
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension(alloc::format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    let a = DMatrix::from_column_slice(n, n, m.data());
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Full spectrum of a Hermitian operator, ascending.
pub fn spectrum(op: &QubitOperator, n: usize) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(&operator_matrix(op, n)?)?.0)
}

/// Lowest eigenpair within the sector of `n_alpha` even-qubit and `n_beta`
/// odd-qubit excitations (spin-up and spin-down electrons for interleaved
/// spin orbitals). The vector is returned over the full `2^n` space.
pub fn sector_ground_state(
    op: &QubitOperator,
    n: usize,
    n_alpha: usize,
    n_beta: usize,
) -> Result<(f64, Vec<Complex64>)> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let dim = 1usize << n;
    let even: usize = (0..n).step_by(2).map(|q| 1usize << (n - 1 - q)).sum();
    let basis: Vec<usize> = (0..dim)
        .filter(|&b| (b & even).count_ones() as usize == n_alpha && (b & !even).count_ones() as usize == n_beta)
        .collect();
    if basis.is_empty() {
        return Err(Error::Invalid(alloc::format!(
            "no {n}-qubit states with {n_alpha} alpha and {n_beta} beta electrons"
        )));
    }
    let mut position = vec![usize::MAX; dim];
    for (i, &b) in basis.iter().enumerate() {
        position[b] = i;
    }
    let k = basis.len();
    let mut h = DenseMatrix::zeros(k, k);
    for (p, &c) in op.iter() {
        let (x, z, ys) = index_masks(p, n)?;
        let base = c * I_POWERS[ys % 4];
        for (col, &b) in basis.iter().enumerate() {
            let row = position[b ^ x];
            if row == usize::MAX {
                continue;
            }
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            h[(row, col)] += base * sign;
        }
    }
    let (values, vectors) = hermitian_eigen(&h)?;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for (i, &b) in basis.iter().enumerate() {
        psi[b] = vectors[(i, 0)];
    }
    Ok((values[0], psi))
}
