use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::{Error, Result};

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Option<Self> {
        match (x, z) {
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
            (false, false) => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

type Words = SmallVec<[u64; 1]>;

/// Tensor product of single-qubit Paulis, without phase.
///
/// Stored in symplectic form (`x`, `z` bit words, `Y = X·Z` up to phase `i`)
/// with trailing zero words trimmed, so equal strings compare equal
/// regardless of how they were built. Identity factors are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    x: Words,
    z: Words,
}

impl PauliString {
    /// The identity string.
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a string from `(site, axis)` pairs; sites must be distinct.
    pub fn from_ops<I: IntoIterator<Item = (usize, Pauli)>>(ops: I) -> Result<Self> {
        let mut s = Self::identity();
        for (site, p) in ops {
            if s.get(site).is_some() {
                return Err(Error::Invalid(alloc::format!("site {site} repeated in Pauli string")));
            }
            s.set(site, Some(p));
        }
        Ok(s)
    }

    pub fn single(site: usize, p: Pauli) -> Self {
        let mut s = Self::identity();
        s.set(site, Some(p));
        s
    }

    pub fn get(&self, site: usize) -> Option<Pauli> {
        let (w, b) = (site / 64, site % 64);
        let x = self.x.get(w).is_some_and(|v| v >> b & 1 == 1);
        let z = self.z.get(w).is_some_and(|v| v >> b & 1 == 1);
        Pauli::from_bits(x, z)
    }

    pub fn set(&mut self, site: usize, p: Option<Pauli>) {
        let (w, b) = (site / 64, site % 64);
        if self.x.len() <= w {
            if p.is_none() {
                return;
            }
            self.x.resize(w + 1, 0);
            self.z.resize(w + 1, 0);
        }
        let (x, z) = p.map_or((false, false), Pauli::bits);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | if x { mask } else { 0 };
        self.z[w] = (self.z[w] & !mask) | if z { mask } else { 0 };
        self.trim();
    }

    fn trim(&mut self) {
        while let (Some(&0), Some(&0)) = (self.x.last(), self.z.last()) {
            self.x.pop();
            self.z.pop();
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_empty()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn count(&self, p: Pauli) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&x, &z)| {
                let bits = match p {
                    Pauli::X => x & !z,
                    Pauli::Y => x & z,
                    Pauli::Z => !x & z,
                };
                bits.count_ones() as usize
            })
            .sum()
    }

    /// Non-identity factors in increasing site order.
    pub fn ops(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.x.iter().zip(&self.z).enumerate().flat_map(|(w, (&x, &z))| {
            let mut support = x | z;
            core::iter::from_fn(move || {
                if support == 0 {
                    return None;
                }
                let b = support.trailing_zeros() as usize;
                support &= support - 1;
                let p = Pauli::from_bits(x >> b & 1 == 1, z >> b & 1 == 1).unwrap();
                Some((w * 64 + b, p))
            })
        })
    }

    pub fn support(&self) -> Vec<usize> {
        self.ops().map(|(s, _)| s).collect()
    }

    pub fn first_site(&self) -> Option<usize> {
        self.ops().next().map(|(s, _)| s)
    }

    pub fn last_site(&self) -> Option<usize> {
        let w = self.x.len().checked_sub(1)?;
        let support = self.x[w] | self.z[w];
        Some(w * 64 + 63 - support.leading_zeros() as usize)
    }

    /// Smallest qubit count the string fits in.
    pub fn min_qubits(&self) -> usize {
        self.last_site().map_or(0, |s| s + 1)
    }

    /// Bit masks over sites `0..n` (`x`, `z`) for dense kernels; site `s` maps
    /// to bit `s` of the masks.
    pub fn masks_u64(&self) -> Option<(u64, u64)> {
        match self.x.len() {
            0 => Some((0, 0)),
            1 => Some((self.x[0], self.z[0])),
            _ => None,
        }
    }

    /// `self · other = phase · result`.
    pub fn mul(&self, other: &Self) -> (Complex64, Self) {
        let len = self.x.len().max(other.x.len());
        let word = |v: &Words, i: usize| v.get(i).copied().unwrap_or(0);
        let mut x = Words::with_capacity(len);
        let mut z = Words::with_capacity(len);
        // P = i^{|x∧z|} X^x Z^z; P1 P2 = i^{a1 + a2 - a3 + 2|z1∧x2|} P3
        let mut exponent: i64 = 0;
        for i in 0..len {
            let (x1, z1) = (word(&self.x, i), word(&self.z, i));
            let (x2, z2) = (word(&other.x, i), word(&other.z, i));
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            exponent += (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64
                - (x3 & z3).count_ones() as i64
                + 2 * (z1 & x2).count_ones() as i64;
            x.push(x3);
            z.push(z3);
        }
        let mut out = Self { x, z };
        out.trim();
        let phase = match exponent.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        (phase, out)
    }

    /// Whether the two strings commute.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let len = self.x.len().min(other.x.len());
        let anti: u32 = (0..len)
            .map(|i| ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones())
            .sum();
        anti % 2 == 0
    }

    fn has_support_above(&self, w: usize, b: u32) -> bool {
        let high = if b == 63 { 0 } else { !0u64 << (b + 1) };
        let here = self.x.get(w).map_or(0, |x| (x | self.z[w]) & high);
        here != 0 || self.x.len() > w + 1
    }

    /// Drops every `Z` factor.
    pub fn without_z(&self) -> Self {
        let mut out = Self {
            z: self.z.iter().zip(&self.x).map(|(z, x)| z & x).collect(),
            x: self.x.clone(),
        };
        out.trim();
        out
    }
}

impl Ord for PauliString {
    /// Site-lexicographic order on the sparse form: strings are compared
    /// factor by factor in increasing site order, an earlier site sorting
    /// first, then `X < Y < Z`; a proper prefix sorts first.
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.x.len().max(other.x.len());
        let word = |v: &Words, i: usize| v.get(i).copied().unwrap_or(0);
        for w in 0..len {
            let (xa, za) = (word(&self.x, w), word(&self.z, w));
            let (xb, zb) = (word(&other.x, w), word(&other.z, w));
            let diff = (xa ^ xb) | (za ^ zb);
            if diff == 0 {
                continue;
            }
            let b = diff.trailing_zeros();
            let has_a = (xa | za) >> b & 1 == 1;
            let has_b = (xb | zb) >> b & 1 == 1;
            return match (has_a, has_b) {
                (true, true) => {
                    let pa = Pauli::from_bits(xa >> b & 1 == 1, za >> b & 1 == 1);
                    let pb = Pauli::from_bits(xb >> b & 1 == 1, zb >> b & 1 == 1);
                    pa.cmp(&pb)
                }
                // The string without a factor here either ends (a prefix,
                // sorts first) or continues at a later site (sorts last).
                (false, _) => {
                    if self.has_support_above(w, b) {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    }
                }
                (true, false) => {
                    if other.has_support_above(w, b) {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    }
                }
            };
        }
        Ordering::Equal
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    /// Compact form such as `X0Y3Z10`; the identity prints as `I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        for (site, p) in self.ops() {
            write!(f, "{}{}", p.as_char(), site)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "I" {
            return Ok(Self::identity());
        }
        let bad = || Error::Invalid(alloc::format!("malformed Pauli string {s:?}"));
        let mut ops = Vec::new();
        let mut chars = s.char_indices().peekable();
        while let Some((_, c)) = chars.next() {
            let p = match c {
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(bad()),
            };
            let mut digits = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let site: usize = digits.parse().map_err(|_| bad())?;
            ops.push((site, p));
        }
        if ops.is_empty() {
            return Err(bad());
        }
        Self::from_ops(ops)
    }
}
