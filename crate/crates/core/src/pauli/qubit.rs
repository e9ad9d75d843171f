use alloc::collections::btree_map::{self, BTreeMap};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::string::PauliString;
use crate::DROP_TOLERANCE;

/// Weighted sum of Pauli strings.
#[derive(Clone, Default, PartialEq)]
pub struct QubitOperator {
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub fn new() -> Self {
        Self::default()
    }

    /// `c · I`.
    pub fn constant(c: f64) -> Self {
        let mut op = Self::new();
        op.add_term(PauliString::identity(), Complex64::new(c, 0.0));
        op.simplify();
        op
    }

    pub fn from_term(p: PauliString, c: Complex64) -> Self {
        let mut op = Self::new();
        op.add_term(p, c);
        op
    }

    /// Adds `c · p`, merging with an existing term. Does not drop small
    /// coefficients; call [`simplify`](Self::simplify) afterwards.
    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        match self.terms.entry(p) {
            btree_map::Entry::Occupied(mut e) => *e.get_mut() += c,
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// Removes terms with `|c| < DROP_TOLERANCE`.
    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= DROP_TOLERANCE);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical string order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> + '_ {
        self.terms.iter()
    }

    pub fn get(&self, p: &PauliString) -> Option<Complex64> {
        self.terms.get(p).copied()
    }

    /// Coefficient of the identity string.
    pub fn constant_term(&self) -> Complex64 {
        self.get(&PauliString::identity()).unwrap_or_default()
    }

    /// Smallest qubit count every term fits in.
    pub fn min_qubits(&self) -> usize {
        self.terms.keys().map(PauliString::min_qubits).max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.simplify();
        out
    }

    /// Pauli strings are self-adjoint, so only coefficients conjugate.
    pub fn adjoint(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c.conj())).collect(),
        }
    }

    /// Hermitian iff every coefficient is real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Anti-Hermitian iff every coefficient is imaginary within `tol`.
    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.re.abs() <= tol)
    }

    pub fn into_terms(self) -> Vec<(PauliString, Complex64)> {
        self.terms.into_iter().collect()
    }
}

impl FromIterator<(PauliString, Complex64)> for QubitOperator {
    fn from_iter<I: IntoIterator<Item = (PauliString, Complex64)>>(iter: I) -> Self {
        let mut op = Self::new();
        for (p, c) in iter {
            op.add_term(p, c);
        }
        op.simplify();
        op
    }
}

impl Add for &QubitOperator {
    type Output = QubitOperator;

    fn add(self, rhs: &QubitOperator) -> QubitOperator {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(p.clone(), *c);
        }
        out.simplify();
        out
    }
}

impl Sub for &QubitOperator {
    type Output = QubitOperator;

    fn sub(self, rhs: &QubitOperator) -> QubitOperator {
        self + &rhs.scaled(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &QubitOperator {
    type Output = QubitOperator;

    fn mul(self, rhs: &QubitOperator) -> QubitOperator {
        let mut out = QubitOperator::new();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &rhs.terms {
                let (phase, p) = pa.mul(pb);
                out.add_term(p, phase * ca * cb);
            }
        }
        out.simplify();
        out
    }
}

impl fmt::Debug for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("QubitOperator {")?;
        for (i, (p, c)) in self.terms.iter().enumerate() {
            let sep = if i == 0 { " " } else { " + " };
            write!(f, "{sep}({:+e}{:+e}i) {p}", c.re, c.im)?;
        }
        f.write_str(" }")
    }
}
