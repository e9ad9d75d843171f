use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

/// Row-major single-qubit matrix.
pub type Mat2 = [Complex64; 4];
/// Row-major two-qubit matrix; basis index `2·i_left + i_right`.
pub type Mat4 = [Complex64; 16];

/// Unitarity tolerance checked at gate construction.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// What a gate is, for counting and dumps. Angles are the gate's own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateLabel {
    H,
    X,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// CNOT with control on the left site when `control_left`.
    Cnot { control_left: bool },
    Swap,
    /// Product of several gates merged by [`Circuit::fused`].
    Fused,
    Custom,
}

/// A gate on one site, or on the adjacent sites `site`, `site + 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    One { site: usize, matrix: Mat2, label: GateLabel },
    Two { site: usize, matrix: Mat4, label: GateLabel },
}

impl Gate {
    /// Single-qubit gate; fails if `matrix` is not unitary.
    pub fn one(site: usize, matrix: Mat2, label: GateLabel) -> Result<Self> {
        check_unitary(&matrix, 2)?;
        Ok(Gate::One { site, matrix, label })
    }

    /// Two-qubit gate on `site`, `site + 1`; fails if `matrix` is not unitary.
    pub fn two(site: usize, matrix: Mat4, label: GateLabel) -> Result<Self> {
        check_unitary(&matrix, 4)?;
        Ok(Gate::Two { site, matrix, label })
    }

    pub fn label(&self) -> GateLabel {
        match self {
            Gate::One { label, .. } | Gate::Two { label, .. } => *label,
        }
    }

    /// Lowest site acted on.
    pub fn site(&self) -> usize {
        match self {
            Gate::One { site, .. } | Gate::Two { site, .. } => *site,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Two { .. })
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Self {
        match self {
            Gate::One { site, matrix, label } => Gate::One {
                site: *site,
                matrix: adjoint::<4, 2>(matrix),
                label: match label {
                    GateLabel::Rx(t) => GateLabel::Rx(-t),
                    GateLabel::Ry(t) => GateLabel::Ry(-t),
                    GateLabel::Rz(t) => GateLabel::Rz(-t),
                    other => *other,
                },
            },
            Gate::Two { site, matrix, label } => Gate::Two {
                site: *site,
                matrix: adjoint::<16, 4>(matrix),
                label: *label,
            },
        }
    }
}

fn check_unitary(m: &[Complex64], dim: usize) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("gate matrix".into()));
    }
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let dot: Complex64 = (0..dim).map(|k| m[k * dim + i].conj() * m[k * dim + j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    if worst > UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary { residual: worst });
    }
    Ok(())
}

fn adjoint<const N: usize, const D: usize>(m: &[Complex64; N]) -> [Complex64; N] {
    let mut out = [Complex64::new(0.0, 0.0); N];
    for r in 0..D {
        for c in 0..D {
            out[r * D + c] = m[c * D + r].conj();
        }
    }
    out
}

/// `a · b` for row-major square matrices of size `D`.
pub fn matmul<const N: usize, const D: usize>(a: &[Complex64; N], b: &[Complex64; N]) -> [Complex64; N] {
    let mut out = [Complex64::new(0.0, 0.0); N];
    for r in 0..D {
        for c in 0..D {
            out[r * D + c] = (0..D).map(|k| a[r * D + k] * b[k * D + c]).sum();
        }
    }
    out
}

/// `a ⊗ b` with `a` on the left site.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [Complex64::new(0.0, 0.0); 16];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k) * 4 + (2 * j + l)] = a[2 * i + j] * b[2 * k + l];
                }
            }
        }
    }
    out
}

/// Same operator with the roles of the two qubits exchanged.
pub fn flip(m: &Mat4) -> Mat4 {
    let perm = [0, 2, 1, 3];
    let mut out = [Complex64::new(0.0, 0.0); 16];
    for r in 0..4 {
        for c in 0..4 {
            out[perm[r] * 4 + perm[c]] = m[r * 4 + c];
        }
    }
    out
}

/// Standard gate matrices.
pub mod matrices {
    use super::{Mat2, Mat4};
    use num_complex::Complex64;
    use num_traits::Float;

    const O: Complex64 = Complex64::new(0.0, 0.0);
    const L: Complex64 = Complex64::new(1.0, 0.0);

    pub fn identity2() -> Mat2 {
        [L, O, O, L]
    }

    pub fn identity4() -> Mat4 {
        let mut m = [O; 16];
        for i in 0..4 {
            m[i * 5] = L;
        }
        m
    }

    pub fn hadamard() -> Mat2 {
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        [h, h, h, -h]
    }

    pub fn pauli_x() -> Mat2 {
        [O, L, L, O]
    }

    pub fn pauli_y() -> Mat2 {
        let i = Complex64::new(0.0, 1.0);
        [O, -i, i, O]
    }

    pub fn pauli_z() -> Mat2 {
        [L, O, O, -L]
    }

    /// `exp(−iθX/2)`.
    pub fn rx(theta: f64) -> Mat2 {
        let (s, c) = (theta / 2.0).sin_cos();
        let ms = Complex64::new(0.0, -s);
        [Complex64::new(c, 0.0), ms, ms, Complex64::new(c, 0.0)]
    }

    /// `exp(−iθY/2)`.
    pub fn ry(theta: f64) -> Mat2 {
        let (s, c) = (theta / 2.0).sin_cos();
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)]
    }

    /// `exp(−iθZ/2)`.
    pub fn rz(theta: f64) -> Mat2 {
        let (s, c) = (theta / 2.0).sin_cos();
        [Complex64::new(c, -s), O, O, Complex64::new(c, s)]
    }

    /// CNOT with control on the left qubit.
    pub fn cnot() -> Mat4 {
        let mut m = [O; 16];
        m[0] = L;
        m[5] = L;
        m[2 * 4 + 3] = L;
        m[3 * 4 + 2] = L;
        m
    }

    pub fn swap() -> Mat4 {
        let mut m = [O; 16];
        m[0] = L;
        m[4 + 2] = L;
        m[2 * 4 + 1] = L;
        m[15] = L;
        m
    }
}

/// Ordered gate list over `n_qubits` with adjacent two-qubit gates only.
#[derive(Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    /// Free-form provenance, e.g. the ansatz that produced the circuit.
    pub description: String,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            description: String::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate after checking its sites.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let last = match &gate {
            Gate::One { site, .. } => *site,
            Gate::Two { site, .. } => site + 1,
        };
        if last >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: last,
                n_qubits: self.n_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn push_1q(&mut self, site: usize, matrix: Mat2, label: GateLabel) -> Result<()> {
        self.push(Gate::one(site, matrix, label)?)
    }

    /// Appends `matrix` acting on qubits `(q0, q1)` (basis index
    /// `2·i_q0 + i_q1`). Non-adjacent pairs are routed by moving `q1`
    /// next to `q0` with SWAPs and moving it back afterwards.
    pub fn push_2q(&mut self, q0: usize, q1: usize, matrix: Mat4, label: GateLabel) -> Result<()> {
        if q0 == q1 {
            return Err(Error::Invalid(alloc::format!("two-qubit gate on repeated qubit {q0}")));
        }
        let (lo, hi, m, label) = if q0 < q1 {
            (q0, q1, matrix, label)
        } else {
            let label = match label {
                GateLabel::Cnot { control_left } => GateLabel::Cnot {
                    control_left: !control_left,
                },
                other => other,
            };
            (q1, q0, flip(&matrix), label)
        };
        if hi >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: hi,
                n_qubits: self.n_qubits,
            });
        }
        let gate = Gate::two(lo, m, label)?;
        for s in (lo + 1..hi).rev() {
            self.push(Gate::two(s, matrices::swap(), GateLabel::Swap)?)?;
        }
        self.push(gate)?;
        for s in lo + 1..hi {
            self.push(Gate::two(s, matrices::swap(), GateLabel::Swap)?)?;
        }
        Ok(())
    }

    /// CNOT between adjacent or distant qubits.
    pub fn push_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.push_2q(control, target, matrices::cnot(), GateLabel::Cnot { control_left: true })
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// Circuit implementing the inverse unitary.
    pub fn inverse(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            description: self.description.clone(),
        }
    }

    pub fn count(&self, pred: impl Fn(GateLabel) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g.label())).count()
    }

    pub fn cnot_count(&self) -> usize {
        self.count(|l| matches!(l, GateLabel::Cnot { .. }))
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Equivalent circuit with fewer gates: single-qubit gates are absorbed
    /// into a neighbouring two-qubit gate where one exists, and consecutive
    /// two-qubit gates on the same bond are multiplied together. Each merge
    /// only commutes gates past others acting on disjoint sites.
    pub fn fused(&self) -> Self {
        let n = self.n_qubits;
        let mut out: Vec<Gate> = Vec::with_capacity(self.gates.len());
        // Index in `out` of the last gate touching each site.
        let mut last: Vec<Option<usize>> = alloc::vec![None; n];
        // Single-qubit matrices waiting for the next gate on their site.
        let mut pending: Vec<Option<Mat2>> = alloc::vec![None; n];

        for gate in &self.gates {
            match gate {
                Gate::One { site, matrix, .. } => {
                    let s = *site;
                    if let Some(p) = pending[s] {
                        pending[s] = Some(matmul::<4, 2>(matrix, &p));
                        continue;
                    }
                    match last[s].map(|i| &mut out[i]) {
                        Some(Gate::Two { site: b, matrix: m, label }) => {
                            let one = if s == *b {
                                kron(matrix, &matrices::identity2())
                            } else {
                                kron(&matrices::identity2(), matrix)
                            };
                            *m = matmul::<16, 4>(&one, m);
                            *label = GateLabel::Fused;
                        }
                        _ => pending[s] = Some(*matrix),
                    }
                }
                Gate::Two { site, matrix, label } => {
                    let (a, b) = (*site, site + 1);
                    let mut m = *matrix;
                    let mut lab = *label;
                    let pa = pending[a].take();
                    let pb = pending[b].take();
                    if pa.is_some() || pb.is_some() {
                        let before = kron(
                            &pa.unwrap_or_else(matrices::identity2),
                            &pb.unwrap_or_else(matrices::identity2),
                        );
                        m = matmul::<16, 4>(&m, &before);
                        lab = GateLabel::Fused;
                    }
                    let same_bond = match (last[a], last[b]) {
                        (Some(i), Some(j)) if i == j => matches!(out[i], Gate::Two { site: s, .. } if s == a),
                        _ => false,
                    };
                    if same_bond {
                        let i = last[a].unwrap();
                        if let Gate::Two { matrix: prev, label, .. } = &mut out[i] {
                            *prev = matmul::<16, 4>(&m, prev);
                            *label = GateLabel::Fused;
                        }
                    } else {
                        out.push(Gate::Two {
                            site: a,
                            matrix: m,
                            label: lab,
                        });
                        last[a] = Some(out.len() - 1);
                        last[b] = Some(out.len() - 1);
                    }
                }
            }
        }
        for (s, p) in pending.into_iter().enumerate() {
            if let Some(matrix) = p {
                out.push(Gate::One {
                    site: s,
                    matrix,
                    label: GateLabel::Fused,
                });
            }
        }
        Self {
            n_qubits: n,
            gates: out,
            description: self.description.clone(),
        }
    }
}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Circuit({} qubits, {} gates)", self.n_qubits, self.gates.len())
    }
}
