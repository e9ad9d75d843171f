use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::rdm::{measure_rdms, RdmPair, SpinMode};
use crate::ansatz::uccsd_template;
use crate::mps::MpsConfig;
use crate::pauli::{build_molecular_hamiltonian, jordan_wigner, Integrals, QubitOperator};
use crate::vqe::{Clock, InitialParameters, OptimizerConfig, VqeProblem, VqeResult};
use crate::{Complex64, Error, Result};

/// Default bound on `|N_DMET − N|` for the electron-count check.
pub const ELECTRON_TOLERANCE: f64 = 1e-5;

/// Tolerance for the symmetry and spectrum checks on `Γ^env`.
const GAMMA_TOLERANCE: f64 = 1e-8;

/// One DMET fragment as read from an input file.
///
/// `integrals` cover all `N_orb` orbitals in the basis named by `spin`.
/// The embedding space is `fragment` followed by `bath`; RDMs are indexed
/// by position in that list. `gamma_env` is the row-major `N_orb × N_orb`
/// environment density.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentSpec {
    pub id: String,
    pub spin: SpinMode,
    pub fragment: Vec<usize>,
    pub bath: Vec<usize>,
    pub integrals: Integrals,
    pub gamma_env: Vec<f64>,
    /// Electrons in the embedding space, used for the reference occupation.
    pub embedding_electrons: usize,
    /// This fragment's share of the molecular electron count.
    pub electron_target: f64,
}

impl FragmentSpec {
    /// Validates index sets, `Γ^env` shape, symmetry and spectrum.
    pub fn new(
        id: impl Into<String>,
        spin: SpinMode,
        fragment: Vec<usize>,
        bath: Vec<usize>,
        integrals: Integrals,
        gamma_env: Vec<f64>,
        embedding_electrons: usize,
        electron_target: f64,
    ) -> Result<Self> {
        let spec = Self {
            id: id.into(),
            spin,
            fragment,
            bath,
            integrals,
            gamma_env,
            embedding_electrons,
            electron_target,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn n_orbitals(&self) -> usize {
        self.integrals.n_orbitals()
    }

    /// Fragment orbitals followed by bath orbitals.
    pub fn embedding(&self) -> Vec<usize> {
        self.fragment.iter().chain(&self.bath).copied().collect()
    }

    pub fn gamma(&self, r: usize, s: usize) -> f64 {
        self.gamma_env[r * self.n_orbitals() + s]
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_orbitals();
        if self.fragment.is_empty() {
            return Err(Error::Invalid(format!("fragment {:?} has no orbitals", self.id)));
        }
        let mut seen = vec![false; n];
        for &p in self.fragment.iter().chain(&self.bath) {
            if p >= n {
                return Err(Error::ModeOutOfRange { mode: p, n_modes: n });
            }
            if core::mem::replace(&mut seen[p], true) {
                return Err(Error::Invalid(format!("orbital {p} listed twice in fragment {:?}", self.id)));
            }
        }
        if self.gamma_env.len() != n * n {
            return Err(Error::Dimension(format!(
                "environment density has {} entries, expected {}",
                self.gamma_env.len(),
                n * n
            )));
        }
        if self.gamma_env.iter().any(|v| !v.is_finite()) || !self.electron_target.is_finite() {
            return Err(Error::NonFinite(format!("fragment {:?}", self.id)));
        }
        for r in 0..n {
            for s in 0..r {
                let d = (self.gamma(r, s) - self.gamma(s, r)).abs();
                if d > GAMMA_TOLERANCE {
                    return Err(Error::NotHermitian {
                        expected: "environment density",
                        detail: format!("|Γ[{r},{s}] - Γ[{s},{r}]| = {d:e}"),
                    });
                }
            }
        }
        let top = self.spin.max_occupation();
        let eig = DMatrix::from_row_slice(n, n, &self.gamma_env).symmetric_eigenvalues();
        if let Some(v) = eig.iter().find(|&&v| v < -GAMMA_TOLERANCE || v > top + GAMMA_TOLERANCE) {
            return Err(Error::Invalid(format!("environment density eigenvalue {v} outside [0, {top}]")));
        }
        let modes = self.embedding().len() * if self.spin == SpinMode::Spatial { 2 } else { 1 };
        if self.embedding_electrons > modes {
            return Err(Error::Invalid(format!(
                "{} electrons in {modes} embedding spin orbitals",
                self.embedding_electrons
            )));
        }
        Ok(())
    }

    /// `h_pq + ½ Σ_rs [(pq|rs) − (ps|rq)] Γ^env_rs`, with `r, s` over all
    /// `N_orb` orbitals.
    pub fn dressed_h(&self, p: usize, q: usize) -> f64 {
        let n = self.n_orbitals();
        let ints = &self.integrals;
        let mut v = 0.0;
        for r in 0..n {
            for s in 0..n {
                let gamma = self.gamma(r, s);
                if gamma != 0.0 {
                    v += (ints.g(p, q, r, s) - ints.g(p, s, r, q)) * gamma;
                }
            }
        }
        ints.h(p, q) + 0.5 * v
    }

    /// Integrals over the embedding space with the dressed one-body part and
    /// no core energy.
    pub fn embedding_integrals(&self) -> Result<Integrals> {
        let emb = self.embedding();
        let m = emb.len();
        let mut h = vec![0.0; m * m];
        let mut g = vec![0.0; m.pow(4)];
        for (i, &p) in emb.iter().enumerate() {
            for (j, &q) in emb.iter().enumerate() {
                h[i * m + j] = self.dressed_h(p, q);
                for (k, &r) in emb.iter().enumerate() {
                    for (l, &s) in emb.iter().enumerate() {
                        g[((i * m + j) * m + k) * m + l] = self.integrals.g(p, q, r, s);
                    }
                }
            }
        }
        // Rounding in the dressing sum can break exact symmetry.
        for i in 0..m {
            for j in 0..i {
                let avg = 0.5 * (h[i * m + j] + h[j * m + i]);
                h[i * m + j] = avg;
                h[j * m + i] = avg;
            }
        }
        Integrals::new(m, h, g, 0.0)
    }

    /// Qubit Hamiltonian of [`Self::embedding_integrals`].
    pub fn embedding_hamiltonian(&self) -> Result<QubitOperator> {
        let ints = self.embedding_integrals()?;
        let so = match self.spin {
            SpinMode::Spatial => ints.spin_expanded(),
            SpinMode::SpinOrbital => ints,
        };
        let q = jordan_wigner(&build_molecular_hamiltonian(&so), so.n_orbitals())?;
        Ok(q.iter().map(|(p, c)| (p.clone(), Complex64::new(c.re, 0.0))).collect())
    }

    /// Qubit count of the embedding problem.
    pub fn n_qubits(&self) -> usize {
        match self.spin {
            SpinMode::Spatial => 2 * self.embedding().len(),
            SpinMode::SpinOrbital => self.embedding().len(),
        }
    }

    /// Occupation with the lowest `embedding_electrons` spin orbitals filled.
    pub fn reference(&self) -> String {
        (0..self.n_qubits()).map(|q| if q < self.embedding_electrons { '1' } else { '0' }).collect()
    }
}

/// Fragment energy and electron count from embedding-space RDMs.
///
/// `E_A = Σ_{p∈A} [ Σ_q dressed_h(p, q) ⟨a†_p a_q⟩ + ½ Σ_{qrs} (pq|rs) ⟨a†_p a†_r a_s a_q⟩ ]`
/// with `q, r, s` over the embedding space and `N_A = Σ_{p∈A} ⟨a†_p a_p⟩`.
pub fn fragment_energy(spec: &FragmentSpec, rdms: &RdmPair) -> Result<(f64, f64)> {
    let emb = spec.embedding();
    let m = emb.len();
    if rdms.mode != spec.spin {
        return Err(Error::Invalid(format!(
            "{} RDMs for a {} fragment",
            rdms.mode.name(),
            spec.spin.name()
        )));
    }
    if rdms.rdm1.n() != m || rdms.rdm2.n() != m {
        return Err(Error::Dimension(format!(
            "RDMs over {} and {} orbitals for an embedding space of {m}",
            rdms.rdm1.n(),
            rdms.rdm2.n()
        )));
    }
    let ints = &spec.integrals;
    let (mut energy, mut electrons) = (0.0, 0.0);
    for (i, &p) in spec.fragment.iter().enumerate() {
        electrons += rdms.rdm1.get(i, i).re;
        for (j, &q) in emb.iter().enumerate() {
            energy += spec.dressed_h(p, q) * rdms.rdm1.get(i, j).re;
            let mut two = 0.0;
            for (k, &r) in emb.iter().enumerate() {
                for (l, &s) in emb.iter().enumerate() {
                    let g = ints.g(p, q, r, s);
                    if g != 0.0 {
                        two += g * rdms.rdm2.get(i, k, l, j).re;
                    }
                }
            }
            energy += 0.5 * two;
        }
    }
    if !energy.is_finite() || !electrons.is_finite() {
        return Err(Error::NonFinite(format!("energy of fragment {:?}", spec.id)));
    }
    Ok((energy, electrons))
}

/// Outcome of one fragment calculation.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentResult {
    pub id: String,
    pub energy: f64,
    pub electrons: f64,
    pub electron_target: f64,
    /// Energy of the embedding Hamiltonian at the VQE optimum.
    pub vqe_energy: f64,
    pub vqe_converged: bool,
    pub evaluations: usize,
}

/// Summed DMET energy and electron count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmetTotal {
    pub energy: f64,
    pub electrons: f64,
    pub electron_target: f64,
    pub converged: bool,
}

/// Sums fragment energies and electron counts in fragment-id order.
pub fn assemble_total(results: &[FragmentResult], tolerance: f64) -> Result<DmetTotal> {
    if results.is_empty() {
        return Err(Error::Invalid("no fragments to assemble".into()));
    }
    let mut order: Vec<&FragmentResult> = results.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    let (mut energy, mut electrons, mut target) = (0.0, 0.0, 0.0);
    for r in order {
        energy += r.energy;
        electrons += r.electrons;
        target += r.electron_target;
    }
    Ok(DmetTotal { energy, electrons, electron_target: target, converged: (electrons - target).abs() < tolerance })
}

/// Settings shared by all fragment solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FragmentSolver {
    pub mps: MpsConfig,
    pub optimizer: OptimizerConfig,
    pub init: InitialParameters,
}

impl Default for FragmentSolver {
    fn default() -> Self {
        Self { mps: MpsConfig::default(), optimizer: OptimizerConfig::default(), init: InitialParameters::Zeros }
    }
}

impl FragmentSolver {
    /// UCCSD-VQE on the embedding Hamiltonian, then RDMs and the fragment
    /// energy at the optimum.
    pub fn solve(&self, spec: &FragmentSpec, clock: &dyn Clock) -> Result<FragmentResult> {
        let n = spec.n_qubits();
        let template = uccsd_template(spec.embedding_electrons, n)?;
        let problem =
            VqeProblem::new(spec.embedding_hamiltonian()?, template, &spec.reference(), self.mps, self.optimizer)?;
        let vqe: VqeResult = problem.optimize(self.init, clock)?;
        let (state, _) = problem.state(&vqe.params)?;
        let rdms = measure_rdms(&state, spec.spin)?;
        let (energy, electrons) = fragment_energy(spec, &rdms)?;
        Ok(FragmentResult {
            id: spec.id.clone(),
            energy,
            electrons,
            electron_target: spec.electron_target,
            vqe_energy: vqe.energy,
            vqe_converged: vqe.converged,
            evaluations: vqe.evaluations,
        })
    }

    /// Solves every fragment; in parallel with the `std` feature. Results
    /// come back in input order.
    pub fn solve_all<C: Clock + Sync>(&self, specs: &[FragmentSpec], clock: &C) -> Result<Vec<FragmentResult>> {
        #[cfg(feature = "std")]
        {
            use rayon::prelude::*;
            specs.par_iter().map(|s| self.solve(s, clock)).collect()
        }
        #[cfg(not(feature = "std"))]
        {
            specs.iter().map(|s| self.solve(s, clock)).collect()
        }
    }
}
