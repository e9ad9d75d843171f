use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::mps::MpsState;
use crate::pauli::{jordan_wigner, FermionOperator, Ladder, PauliString, QubitOperator};
use crate::{Error, Result};

/// Orbital basis of an RDM or integral table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinMode {
    /// Spatial orbitals; spin-orbital quantities are summed over spin.
    Spatial,
    /// Interleaved spin orbitals, mode `2p + σ`.
    SpinOrbital,
}

impl SpinMode {
    pub fn name(self) -> &'static str {
        match self {
            SpinMode::Spatial => "spatial",
            SpinMode::SpinOrbital => "spin-orbital",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "spatial" => Some(SpinMode::Spatial),
            "spin-orbital" => Some(SpinMode::SpinOrbital),
            _ => None,
        }
    }

    /// Largest occupation of one orbital.
    pub fn max_occupation(self) -> f64 {
        match self {
            SpinMode::Spatial => 2.0,
            SpinMode::SpinOrbital => 1.0,
        }
    }
}

/// One-particle RDM, `d[p, q] = ⟨a†_p a_q⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rdm1 {
    n: usize,
    data: Vec<Complex64>,
}

/// Two-particle RDM, `P[p, q, r, s] = ⟨a†_p a†_q a_r a_s⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rdm2 {
    n: usize,
    data: Vec<Complex64>,
}

/// Both RDMs in one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RdmPair {
    pub rdm1: Rdm1,
    pub rdm2: Rdm2,
    pub mode: SpinMode,
}

impl Rdm1 {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                data.push(f(p, q));
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> Complex64 {
        self.data[p * self.n + q]
    }

    /// `Σ_p d[p, p]`: the electron count.
    pub fn trace(&self) -> f64 {
        (0..self.n).map(|p| self.get(p, p).re).sum()
    }

    /// Largest `|d[p, q] − conj(d[q, p])|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for p in 0..self.n {
            for q in 0..self.n {
                worst = worst.max((self.get(p, q) - self.get(q, p).conj()).norm());
            }
        }
        worst
    }

    /// Spin-summed spatial RDM of a spin-orbital RDM.
    pub fn spin_traced(&self) -> Result<Self> {
        if self.n % 2 != 0 {
            return Err(Error::Dimension(format!("odd spin-orbital count {}", self.n)));
        }
        let m = self.n / 2;
        Ok(Self::from_fn(m, |p, q| (0..2).map(|s| self.get(2 * p + s, 2 * q + s)).sum()))
    }
}

impl Rdm2 {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n.pow(4));
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        data.push(f(p, q, r, s));
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
        let n = self.n;
        self.data[((p * n + q) * n + r) * n + s]
    }

    /// Largest deviation from `P[p,q,r,s] = −P[q,p,r,s] = −P[p,q,s,r]`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.get(p, q, r, s);
                        worst = worst.max((v + self.get(q, p, r, s)).norm());
                        worst = worst.max((v + self.get(p, q, s, r)).norm());
                    }
                }
            }
        }
        worst
    }

    /// `P[p,q,r,s] = Σ_{στ} ⟨a†_{pσ} a†_{qτ} a_{rτ} a_{sσ}⟩`.
    pub fn spin_traced(&self) -> Result<Self> {
        if self.n % 2 != 0 {
            return Err(Error::Dimension(format!("odd spin-orbital count {}", self.n)));
        }
        let m = self.n / 2;
        Ok(Self::from_fn(m, |p, q, r, s| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += self.get(2 * p + a, 2 * q + b, 2 * r + b, 2 * s + a);
                }
            }
            acc
        }))
    }
}

/// Evaluates many fermion operators with one batched Pauli measurement.
fn measure_all(state: &MpsState, ops: &[FermionOperator]) -> Result<Vec<Complex64>> {
    let n = state.n_qubits();
    let images: Vec<QubitOperator> = ops.iter().map(|op| jordan_wigner(op, n)).collect::<Result<_>>()?;
    let mut index: BTreeMap<PauliString, usize> = BTreeMap::new();
    let mut strings = Vec::new();
    for img in &images {
        for (p, _) in img.iter() {
            index.entry(p.clone()).or_insert_with(|| {
                strings.push(p.clone());
                strings.len() - 1
            });
        }
    }
    let values = state.expect_many(&strings)?;
    Ok(images
        .iter()
        .map(|img| img.iter().map(|(p, c)| c * values[index[p]]).sum())
        .collect())
}

fn term(ladders: &[Ladder]) -> FermionOperator {
    FermionOperator::from_term(ladders, Complex64::new(1.0, 0.0))
}

/// Spin-orbital 1-RDM over all qubits of `state`.
///
/// The upper triangle is measured; the lower follows from Hermiticity.
pub fn measure_rdm1(state: &MpsState) -> Result<Rdm1> {
    let n = state.n_qubits();
    let mut pairs = Vec::new();
    let mut ops = Vec::new();
    for p in 0..n {
        for q in p..n {
            pairs.push((p, q));
            ops.push(term(&[Ladder::create(p), Ladder::annihilate(q)]));
        }
    }
    let vals = measure_all(state, &ops)?;
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for (&(p, q), v) in pairs.iter().zip(vals) {
        data[p * n + q] = v;
        data[q * n + p] = v.conj();
    }
    for p in 0..n {
        data[p * n + p].im = 0.0;
    }
    Ok(Rdm1 { n, data })
}

/// Spin-orbital 2-RDM over all qubits of `state`.
///
/// Only `p < q`, `r > s` with the creation pair not after the Hermitian
/// partner pair are measured; antisymmetry and
/// `P[p,q,r,s] = conj(P[s,r,q,p])` fill the rest.
pub fn measure_rdm2(state: &MpsState) -> Result<Rdm2> {
    let n = state.n_qubits();
    let pair_list: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
    let mut keys = Vec::new();
    let mut ops = Vec::new();
    for (i, &(p, q)) in pair_list.iter().enumerate() {
        for &(s, r) in &pair_list[i..] {
            keys.push((p, q, r, s));
            ops.push(term(&[Ladder::create(p), Ladder::create(q), Ladder::annihilate(r), Ladder::annihilate(s)]));
        }
    }
    let vals = measure_all(state, &ops)?;
    let mut data = vec![Complex64::new(0.0, 0.0); n.pow(4)];
    let idx = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
    for (&(p, q, r, s), v) in keys.iter().zip(vals) {
        for (a, b, c, d, w) in [(p, q, r, s, v), (s, r, q, p, v.conj())] {
            data[idx(a, b, c, d)] = w;
            data[idx(b, a, c, d)] = -w;
            data[idx(a, b, d, c)] = -w;
            data[idx(b, a, d, c)] = w;
        }
    }
    Ok(Rdm2 { n, data })
}

/// Both RDMs, spin-traced when `mode` is [`SpinMode::Spatial`].
pub fn measure_rdms(state: &MpsState, mode: SpinMode) -> Result<RdmPair> {
    let rdm1 = measure_rdm1(state)?;
    let rdm2 = measure_rdm2(state)?;
    Ok(match mode {
        SpinMode::SpinOrbital => RdmPair { rdm1, rdm2, mode },
        SpinMode::Spatial => RdmPair { rdm1: rdm1.spin_traced()?, rdm2: rdm2.spin_traced()?, mode },
    })
}
