use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::pauli::{FermionOperator, Ladder};
use crate::{Error, Result};

/// Occupied-to-virtual spin-orbital indices of one excitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExcitationKind {
    /// `a†_a a_i`.
    Single { i: usize, a: usize },
    /// `a†_a a†_b a_j a_i` with `i < j`, `a < b`.
    Double { i: usize, j: usize, a: usize, b: usize },
}

/// One cluster amplitude together with the parameter it reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExcitationOperator {
    pub kind: ExcitationKind,
    pub param: usize,
}

fn spin(mode: usize) -> usize {
    mode % 2
}

impl ExcitationOperator {
    /// The excitation term `T_k` with unit amplitude.
    pub fn excitation(&self) -> FermionOperator {
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            ExcitationKind::Single { i, a } => {
                FermionOperator::from_term(&[Ladder::create(a), Ladder::annihilate(i)], one)
            }
            ExcitationKind::Double { i, j, a, b } => FermionOperator::from_term(
                &[Ladder::create(a), Ladder::create(b), Ladder::annihilate(j), Ladder::annihilate(i)],
                one,
            ),
        }
    }

    /// `T_k − T_k†`, normal ordered.
    pub fn generator(&self) -> FermionOperator {
        let t = self.excitation();
        (&t - &t.adjoint()).normal_ordered()
    }

    /// Largest spin-orbital index touched.
    pub fn max_mode(&self) -> usize {
        match self.kind {
            ExcitationKind::Single { i, a } => i.max(a),
            ExcitationKind::Double { i, j, a, b } => i.max(j).max(a).max(b),
        }
    }
}

/// Spin-conserving singles and doubles from the first `n_electrons` spin
/// orbitals into the rest, singles first, each block in lexicographic index
/// order. Parameter ids follow list order.
pub fn build_uccsd(n_electrons: usize, n_spin_orbitals: usize) -> Result<Vec<ExcitationOperator>> {
    if n_electrons > n_spin_orbitals {
        return Err(Error::Invalid(format!(
            "{n_electrons} electrons exceed {n_spin_orbitals} spin orbitals"
        )));
    }
    if n_spin_orbitals % 2 != 0 {
        return Err(Error::Invalid(format!("odd spin-orbital count {n_spin_orbitals}")));
    }
    let occ = 0..n_electrons;
    let virt = n_electrons..n_spin_orbitals;
    let mut kinds = Vec::new();
    for i in occ.clone() {
        for a in virt.clone() {
            if spin(i) == spin(a) {
                kinds.push(ExcitationKind::Single { i, a });
            }
        }
    }
    for i in occ.clone() {
        for j in i + 1..n_electrons {
            for a in virt.clone() {
                for b in a + 1..n_spin_orbitals {
                    if spin(i) + spin(j) == spin(a) + spin(b) {
                        kinds.push(ExcitationKind::Double { i, j, a, b });
                    }
                }
            }
        }
    }
    Ok(kinds
        .into_iter()
        .enumerate()
        .map(|(param, kind)| ExcitationOperator { kind, param })
        .collect())
}

/// Number of distinct parameters referenced (one past the largest id).
pub fn parameter_count(excitations: &[ExcitationOperator]) -> usize {
    excitations.iter().map(|e| e.param + 1).max().unwrap_or(0)
}

/// `T(θ) − T(θ)†` as a single normal-ordered operator.
pub fn anti_hermitian_cluster(excitations: &[ExcitationOperator], params: &[f64]) -> Result<FermionOperator> {
    let n = parameter_count(excitations);
    if params.len() != n {
        return Err(Error::Dimension(format!("{} parameters for {n} amplitudes", params.len())));
    }
    let mut total = FermionOperator::new();
    for e in excitations {
        for (ladders, c) in e.generator().iter() {
            total.add_term(ladders, c * params[e.param]);
        }
    }
    total.simplify();
    Ok(total)
}
