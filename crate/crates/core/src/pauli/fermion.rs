use alloc::collections::btree_map::{self, BTreeMap};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::DROP_TOLERANCE;

/// One creation (`dagger`) or annihilation operator on a spin-orbital mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub const fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub const fn annihilate(mode: usize) -> Self {
        Self { mode, dagger: false }
    }

    fn adjoint(self) -> Self {
        Self {
            mode: self.mode,
            dagger: !self.dagger,
        }
    }
}

/// Product of ladder operators, applied right to left.
pub type LadderString = SmallVec<[Ladder; 4]>;

/// Weighted sum of ladder-operator products.
///
/// Terms are stored as written; [`normal_ordered`](Self::normal_ordered)
/// brings them to the canonical form (creators left, each block in
/// descending mode order) in which equal operators compare equal.
#[derive(Clone, Default, PartialEq)]
pub struct FermionOperator {
    terms: BTreeMap<LadderString, Complex64>,
}

impl FermionOperator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_term(ladders: &[Ladder], c: Complex64) -> Self {
        let mut op = Self::new();
        op.add_term(ladders, c);
        op
    }

    /// `c · I`.
    pub fn constant(c: f64) -> Self {
        Self::from_term(&[], Complex64::new(c, 0.0))
    }

    /// Adds `c · ladders`, merging with an identical existing term.
    pub fn add_term(&mut self, ladders: &[Ladder], c: Complex64) {
        self.add_string(LadderString::from_slice(ladders), c);
    }

    fn add_string(&mut self, key: LadderString, c: Complex64) {
        match self.terms.entry(key) {
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

    pub fn iter(&self) -> impl Iterator<Item = (&[Ladder], Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    /// Largest mode index referenced, if any.
    pub fn max_mode(&self) -> Option<usize> {
        self.terms.keys().flat_map(|k| k.iter().map(|l| l.mode)).max()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.simplify();
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            let key: LadderString = k.iter().rev().map(|l| l.adjoint()).collect();
            out.add_string(key, c.conj());
        }
        out
    }

    /// Equivalent operator in normal order, simplified.
    pub fn normal_ordered(&self) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            normal_order_term(k.clone(), *c, &mut out);
        }
        out.simplify();
        out
    }

    /// `op == op†` after normal ordering, within `tol` per coefficient.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = (self - &self.adjoint()).normal_ordered();
        diff.terms.values().all(|c| c.norm() <= tol)
    }

    /// `op == −op†` after normal ordering, within `tol` per coefficient.
    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        let sum = (self + &self.adjoint()).normal_ordered();
        sum.terms.values().all(|c| c.norm() <= tol)
    }
}

/// Bubble-sorts one product into normal order, emitting the contraction
/// terms `a_p a†_q = δ_pq − a†_q a_p` recursively.
fn normal_order_term(mut term: LadderString, mut coeff: Complex64, out: &mut FermionOperator) {
    for i in 1..term.len() {
        for j in (1..=i).rev() {
            let (left, right) = (term[j - 1], term[j]);
            if right.dagger && !left.dagger {
                if right.mode == left.mode {
                    let mut contracted = term.clone();
                    contracted.remove(j);
                    contracted.remove(j - 1);
                    normal_order_term(contracted, coeff, out);
                }
                term.swap(j - 1, j);
                coeff = -coeff;
            } else if right.dagger == left.dagger {
                if right.mode == left.mode {
                    return;
                }
                if right.mode > left.mode {
                    term.swap(j - 1, j);
                    coeff = -coeff;
                }
            }
        }
    }
    out.add_string(term, coeff);
}

impl Add for &FermionOperator {
    type Output = FermionOperator;

    fn add(self, rhs: &FermionOperator) -> FermionOperator {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_string(k.clone(), *c);
        }
        out.simplify();
        out
    }
}

impl Sub for &FermionOperator {
    type Output = FermionOperator;

    fn sub(self, rhs: &FermionOperator) -> FermionOperator {
        self + &rhs.scaled(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &FermionOperator {
    type Output = FermionOperator;

    fn mul(self, rhs: &FermionOperator) -> FermionOperator {
        let mut out = FermionOperator::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                out.add_string(key, ca * cb);
            }
        }
        out.simplify();
        out
    }
}

impl fmt::Debug for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FermionOperator {")?;
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let sep = if i == 0 { " " } else { " + " };
            write!(f, "{sep}({:+e}{:+e}i)", c.re, c.im)?;
            let ops: Vec<_> = k
                .iter()
                .map(|l| if l.dagger { alloc::format!("{}^", l.mode) } else { alloc::format!("{}", l.mode) })
                .collect();
            write!(f, " [{}]", ops.join(" "))?;
        }
        f.write_str(" }")
    }
}

/// `a†_p a_q`.
pub fn hopping(p: usize, q: usize) -> FermionOperator {
    FermionOperator::from_term(&[Ladder::create(p), Ladder::annihilate(q)], Complex64::new(1.0, 0.0))
}

/// `Σ_p a†_p a_p` over `n` modes.
pub fn number_operator(n: usize) -> FermionOperator {
    let mut op = FermionOperator::new();
    for p in 0..n {
        op.add_term(&[Ladder::create(p), Ladder::annihilate(p)], Complex64::new(1.0, 0.0));
    }
    op
}
