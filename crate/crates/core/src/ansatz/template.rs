use alloc::format;
use alloc::vec::Vec;

use crate::mps::{matrices, Circuit, GateLabel};
use crate::pauli::{jordan_wigner, FermionOperator, Pauli, PauliString};
use crate::{Error, Result};

use super::excitation::ExcitationOperator;

/// Tolerance for the anti-Hermiticity check on generators.
pub const GENERATOR_TOLERANCE: f64 = 1e-12;

/// One factor `exp(i·coeff·θ[param]·string)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateBlock {
    pub string: PauliString,
    pub param: usize,
    pub coeff: f64,
}

/// Ordered product of parametrized Pauli exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzTemplate {
    n_qubits: usize,
    n_params: usize,
    blocks: Vec<TemplateBlock>,
}

impl AnsatzTemplate {
    /// Validates that strings fit in `n_qubits` and that every parameter id
    /// below `n_params` is referenced.
    pub fn new(n_qubits: usize, n_params: usize, blocks: Vec<TemplateBlock>) -> Result<Self> {
        let mut used = alloc::vec![false; n_params];
        for b in &blocks {
            if b.string.min_qubits() > n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: b.string.min_qubits() - 1,
                    n_qubits,
                });
            }
            if b.param >= n_params {
                return Err(Error::Invalid(format!("parameter id {} >= {n_params}", b.param)));
            }
            if !b.coeff.is_finite() {
                return Err(Error::NonFinite("template coefficient".into()));
            }
            used[b.param] = true;
        }
        if let Some(p) = used.iter().position(|u| !u) {
            return Err(Error::Invalid(format!("parameter {p} is never referenced")));
        }
        Ok(Self { n_qubits, n_params, blocks })
    }

    pub fn empty(n_qubits: usize) -> Self {
        Self { n_qubits, n_params: 0, blocks: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn blocks(&self) -> &[TemplateBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Reversed blocks with negated coefficients: `bind(p)` of the result
    /// undoes `bind(p)` of `self`.
    pub fn inverse(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .rev()
            .map(|b| TemplateBlock { coeff: -b.coeff, ..b.clone() })
            .collect();
        Self { blocks, ..self.clone() }
    }

    /// CNOTs in the compiled circuit: `2·Σ(weight − 1)`.
    pub fn cnot_count(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| !b.string.is_identity())
            .map(|b| 2 * (b.string.weight() - 1))
            .sum()
    }

    /// Gate circuit at the given parameter values.
    pub fn bind(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.n_params {
            return Err(Error::Dimension(format!(
                "{} parameters for a template with {}",
                params.len(),
                self.n_params
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("parameters".into()));
        }
        let mut circ = Circuit::new(self.n_qubits);
        for b in &self.blocks {
            append_pauli_exponential(&mut circ, &b.string, b.coeff * params[b.param])?;
        }
        Ok(circ)
    }
}

/// Gates for `exp(i·angle·P)`.
///
/// Each support qubit is rotated into the Z basis, the parity is carried
/// rightward along adjacent bonds (CNOT onto the next support qubit, SWAP
/// across gaps), `Rz(−2·angle)` acts on the last support qubit, and the
/// sequence is mirrored. The identity string only contributes a global phase
/// and emits nothing.
pub fn compile_pauli_exponential(p: &PauliString, angle: f64, n_qubits: usize) -> Result<Circuit> {
    let mut circ = Circuit::new(n_qubits);
    append_pauli_exponential(&mut circ, p, angle)?;
    Ok(circ)
}

fn append_pauli_exponential(circ: &mut Circuit, p: &PauliString, angle: f64) -> Result<()> {
    let (Some(first), Some(last)) = (p.first_site(), p.last_site()) else {
        log::debug!("identity string in Pauli exponential skipped");
        return Ok(());
    };
    let half_pi = core::f64::consts::FRAC_PI_2;
    for (q, op) in p.ops() {
        match op {
            Pauli::X => circ.push_1q(q, matrices::hadamard(), GateLabel::H)?,
            Pauli::Y => circ.push_1q(q, matrices::rx(half_pi), GateLabel::Rx(half_pi))?,
            Pauli::Z => {}
        }
    }
    let ladder = |circ: &mut Circuit, k: usize| -> Result<()> {
        if p.get(k + 1).is_some() {
            circ.push_cnot(k, k + 1)
        } else {
            circ.push_2q(k, k + 1, matrices::swap(), GateLabel::Swap)
        }
    };
    for k in first..last {
        ladder(circ, k)?;
    }
    circ.push_1q(last, matrices::rz(-2.0 * angle), GateLabel::Rz(-2.0 * angle))?;
    for k in (first..last).rev() {
        ladder(circ, k)?;
    }
    for (q, op) in p.ops() {
        match op {
            Pauli::X => circ.push_1q(q, matrices::hadamard(), GateLabel::H)?,
            Pauli::Y => circ.push_1q(q, matrices::rx(-half_pi), GateLabel::Rx(-half_pi))?,
            Pauli::Z => {}
        }
    }
    Ok(())
}

/// A generator `G` (anti-Hermitian) whose exponential `exp(θ·G)` is
/// parametrized by `param`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTerm {
    pub generator: FermionOperator,
    pub param: usize,
}

impl From<&ExcitationOperator> for ClusterTerm {
    fn from(e: &ExcitationOperator) -> Self {
        Self { generator: e.generator(), param: e.param }
    }
}

/// One Trotter step: each term's Jordan-Wigner image `Σ i·c_k·P_k` becomes
/// blocks `exp(i·c_k·θ·P_k)` in term order, strings in canonical order.
pub fn trotterize_first_order(terms: &[ClusterTerm], n_qubits: usize) -> Result<AnsatzTemplate> {
    let mut blocks = Vec::new();
    let mut n_params = 0;
    for t in terms {
        if !t.generator.is_anti_hermitian(GENERATOR_TOLERANCE) {
            return Err(Error::NotHermitian {
                expected: "anti-Hermitian",
                detail: format!("generator of parameter {}", t.param),
            });
        }
        let image = jordan_wigner(&t.generator, n_qubits)?;
        for (p, c) in image.iter() {
            if p.is_identity() {
                continue;
            }
            blocks.push(TemplateBlock { string: p.clone(), param: t.param, coeff: c.im });
        }
        n_params = n_params.max(t.param + 1);
    }
    AnsatzTemplate::new(n_qubits, n_params, blocks)
}

/// First-order Trotterized UCCSD template over `n_spin_orbitals` qubits.
pub fn uccsd_template(n_electrons: usize, n_spin_orbitals: usize) -> Result<AnsatzTemplate> {
    let ex = super::build_uccsd(n_electrons, n_spin_orbitals)?;
    let terms: Vec<ClusterTerm> = ex.iter().map(ClusterTerm::from).collect();
    trotterize_first_order(&terms, n_spin_orbitals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gemm, DenseMatrix, Op};
    use crate::oracle::{circuit_unitary, expm};
    use crate::pauli::dense::operator_matrix;
    use crate::pauli::QubitOperator;
    use num_complex::Complex64;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn exp_i(p: &PauliString, angle: f64, n: usize) -> DenseMatrix {
        let op = QubitOperator::from_term(p.clone(), Complex64::new(0.0, angle));
        expm(&operator_matrix(&op, n).unwrap())
    }

    #[test]
    fn zz_exponential() {
        let c = compile_pauli_exponential(&ps("Z0Z1"), 0.3, 2).unwrap();
        let labels: Vec<_> = c.gates().iter().map(|g| g.label()).collect();
        assert_eq!(
            labels,
            [GateLabel::Cnot { control_left: true }, GateLabel::Rz(-0.6), GateLabel::Cnot { control_left: true }]
        );
        assert!(circuit_unitary(&c).max_abs_diff(&exp_i(&ps("Z0Z1"), 0.3, 2)) < 1e-12);
    }

    #[test]
    fn weight_one_and_identity() {
        let c = compile_pauli_exponential(&ps("Z0"), 0.2, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.cnot_count(), 0);
        assert!(compile_pauli_exponential(&PauliString::identity(), 0.2, 1).unwrap().is_empty());
    }

    #[test]
    fn strings_with_gaps_match_expm() {
        for (s, n) in [("X0X1X2", 3), ("Y0X2", 3), ("X0Z1Y3", 4), ("Y1", 3), ("Y0Y1Y2X3", 4), ("X0Y4", 5)] {
            let p = ps(s);
            let c = compile_pauli_exponential(&p, 0.37, n).unwrap();
            assert_eq!(c.cnot_count(), 2 * (p.weight() - 1), "{s}");
            let err = circuit_unitary(&c).max_abs_diff(&exp_i(&p, 0.37, n));
            assert!(err < 1e-12, "{s}: {err:e}");
        }
    }

    #[test]
    fn single_excitation_gives_two_blocks() {
        let e = ExcitationOperator { kind: super::super::ExcitationKind::Single { i: 0, a: 1 }, param: 0 };
        let t = trotterize_first_order(&[ClusterTerm::from(&e)], 2).unwrap();
        let strings: Vec<_> = t.blocks().iter().map(|b| b.string.to_string()).collect();
        assert_eq!(strings, ["X0Y1", "Y0X1"]);
        assert!(t.blocks().iter().all(|b| (b.coeff.abs() - 0.5).abs() < 1e-15));
        assert!(trotterize_first_order(&[], 2).unwrap().is_empty());
    }

    #[test]
    fn hermitian_generator_is_rejected() {
        let term = ClusterTerm { generator: crate::pauli::hopping(0, 1), param: 0 };
        assert!(matches!(trotterize_first_order(&[term], 2), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn h2_template_matches_ordered_exponentials() {
        let ex = super::super::build_uccsd(2, 4).unwrap();
        let t = uccsd_template(2, 4).unwrap();
        let params = [0.1, 0.1, 0.1];
        let mut want = DenseMatrix::identity(16);
        for e in &ex {
            let g = jordan_wigner(&e.generator(), 4).unwrap().scaled(Complex64::new(params[e.param], 0.0));
            want = gemm(&expm(&operator_matrix(&g, 4).unwrap()), &want, Op::N, Op::N).unwrap();
        }
        let got = circuit_unitary(&t.bind(&params).unwrap());
        assert!(got.max_abs_diff(&want) < 1e-12);
        assert_eq!(t.bind(&params).unwrap().cnot_count(), t.cnot_count());
        let direct: usize = t.blocks().iter().map(|b| 2 * (b.string.weight() - 1)).sum();
        assert_eq!(direct, 4 * 4 + 8 * 6);
    }

    #[test]
    fn template_validation() {
        let b = |param| TemplateBlock { string: ps("X0"), param, coeff: 1.0 };
        assert!(AnsatzTemplate::new(1, 1, alloc::vec![b(0)]).is_ok());
        assert!(AnsatzTemplate::new(1, 2, alloc::vec![b(0)]).is_err());
        assert!(AnsatzTemplate::new(1, 1, alloc::vec![b(1)]).is_err());
        assert!(AnsatzTemplate::new(0, 1, alloc::vec![b(0)]).is_err());
        let t = AnsatzTemplate::new(1, 1, alloc::vec![b(0)]).unwrap();
        assert!(t.bind(&[]).is_err());
        assert!(t.bind(&[f64::NAN]).is_err());
        assert!(AnsatzTemplate::empty(3).bind(&[]).unwrap().is_empty());
    }
}
