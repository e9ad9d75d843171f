use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::nelder_mead::{minimize_nelder_mead, NelderMeadConfig};
use super::trust_region::{minimize_trust_region, Minimum, TrustRegionConfig};
use crate::ansatz::AnsatzTemplate;
use crate::mps::{Circuit, MpsConfig, MpsState};
use crate::pauli::QubitOperator;
use crate::{Error, Result};

/// Seconds since an arbitrary origin. Lets the no-std core time work without
/// a system clock; timings read 0 with [`NoClock`].
pub trait Clock {
    fn seconds(&self) -> f64;
}

impl<F: Fn() -> f64> Clock for F {
    fn seconds(&self) -> f64 {
        self()
    }
}

/// Clock that always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn seconds(&self) -> f64 {
        0.0
    }
}

/// Monotonic wall clock.
#[cfg(feature = "std")]
#[derive(Debug, Clone, Copy)]
pub struct SystemClock(std::time::Instant);

#[cfg(feature = "std")]
impl SystemClock {
    pub fn start() -> Self {
        Self(std::time::Instant::now())
    }
}

#[cfg(feature = "std")]
impl Clock for SystemClock {
    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Optimizer selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerConfig {
    TrustRegion(TrustRegionConfig),
    NelderMead(NelderMeadConfig),
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig::TrustRegion(TrustRegionConfig::default())
    }
}

impl OptimizerConfig {
    pub fn name(&self) -> &'static str {
        match self {
            OptimizerConfig::TrustRegion(_) => "bobyqa",
            OptimizerConfig::NelderMead(_) => "neldermead",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "bobyqa" => Some(OptimizerConfig::TrustRegion(TrustRegionConfig::default())),
            "neldermead" => Some(OptimizerConfig::NelderMead(NelderMeadConfig::default())),
            _ => None,
        }
    }

    pub fn with_max_evaluations(self, cap: Option<usize>) -> Self {
        match self {
            OptimizerConfig::TrustRegion(c) => OptimizerConfig::TrustRegion(TrustRegionConfig { max_evaluations: cap, ..c }),
            OptimizerConfig::NelderMead(c) => OptimizerConfig::NelderMead(NelderMeadConfig { max_evaluations: cap, ..c }),
        }
    }
}

/// Starting-point rule for the variational parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialParameters {
    Zeros,
    /// Independent draws from `U[-half_width, half_width)`.
    Uniform { half_width: f64, seed: u64 },
}

impl InitialParameters {
    /// Pool ansatz default: zeros can be a stationary point there.
    pub fn pool(seed: u64) -> Self {
        InitialParameters::Uniform { half_width: 0.01, seed }
    }

    pub fn generate(&self, n: usize) -> Vec<f64> {
        match *self {
            InitialParameters::Zeros => alloc::vec![0.0; n],
            InitialParameters::Uniform { half_width, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| rng.gen_range(-half_width..half_width)).collect()
            }
        }
    }
}

/// A VQE instance: Hamiltonian, ansatz, reference occupation, simulator and
/// optimizer settings.
#[derive(Debug, Clone)]
pub struct VqeProblem {
    hamiltonian: QubitOperator,
    template: AnsatzTemplate,
    reference: String,
    pub mps: MpsConfig,
    pub optimizer: OptimizerConfig,
}

/// One energy evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub energy: f64,
    /// Summed discarded weight over all truncations of the circuit.
    pub discarded_weight: f64,
    pub max_bond: usize,
}

/// Outcome of [`VqeProblem::optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub params: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Energy of every evaluation in order.
    pub trace: Vec<f64>,
    pub discarded_weight: f64,
    pub wall_seconds: f64,
    pub converged: bool,
}

impl VqeResult {
    /// Running minimum of the trace: the energy of the accepted iterate after
    /// each evaluation.
    pub fn accepted_trace(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.trace
            .iter()
            .map(|&e| {
                best = best.min(e);
                best
            })
            .collect()
    }
}

/// Timing record of [`VqeProblem::one_shot`].
#[derive(Debug, Clone, PartialEq)]
pub struct OneShot {
    pub params: Vec<f64>,
    pub energy: f64,
    pub discarded_weight: f64,
    pub max_bond: usize,
    pub wall_seconds: f64,
    pub compile_seconds: f64,
    pub one_qubit_gates: usize,
    pub one_qubit_seconds: f64,
    pub two_qubit_gates: usize,
    pub two_qubit_seconds: f64,
    pub expectation_seconds: f64,
}

impl VqeProblem {
    /// Checks that the Hamiltonian is Hermitian and fits the template's
    /// register, and that `reference` is a bitstring of that length.
    pub fn new(
        hamiltonian: QubitOperator,
        template: AnsatzTemplate,
        reference: &str,
        mps: MpsConfig,
        optimizer: OptimizerConfig,
    ) -> Result<Self> {
        let n = template.n_qubits();
        if reference.len() != n || !reference.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Dimension(format!("reference {reference:?} for a {n}-qubit ansatz")));
        }
        if hamiltonian.min_qubits() > n {
            return Err(Error::Dimension(format!(
                "Hamiltonian acts on {} qubits, ansatz on {n}",
                hamiltonian.min_qubits()
            )));
        }
        if !hamiltonian.is_hermitian(1e-10) {
            return Err(Error::NotHermitian { expected: "Hermitian", detail: "VQE Hamiltonian".into() });
        }
        Ok(Self { hamiltonian, template, reference: reference.into(), mps, optimizer })
    }

    pub fn hamiltonian(&self) -> &QubitOperator {
        &self.hamiltonian
    }

    pub fn template(&self) -> &AnsatzTemplate {
        &self.template
    }

    pub fn reference(&self) -> &str {
        &self.reference
    }

    pub fn n_params(&self) -> usize {
        self.template.n_params()
    }

    /// Compiled, fused circuit for `params`.
    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        Ok(self.template.bind(params)?.fused())
    }

    /// Final MPS for `params`, with the summed discarded weight.
    pub fn state(&self, params: &[f64]) -> Result<(MpsState, f64)> {
        let circuit = self.circuit(params)?;
        let mut state = MpsState::basis_state(&self.reference, self.mps)?;
        let w = state.apply_circuit(&circuit)?;
        Ok((state, w))
    }

    /// `⟨ψ(θ)|H|ψ(θ)⟩` on the truncated MPS.
    pub fn energy(&self, params: &[f64]) -> Result<Evaluation> {
        let (state, discarded_weight) = self.state(params)?;
        let energy = state.expect_operator(&self.hamiltonian)?;
        Ok(Evaluation { energy, discarded_weight, max_bond: state.max_bond_dim() })
    }

    /// Minimizes the energy from `start` with the configured optimizer.
    pub fn optimize_from(&self, start: &[f64], clock: &dyn Clock) -> Result<VqeResult> {
        if start.len() != self.n_params() {
            return Err(Error::Dimension(format!(
                "{} starting values for {} parameters",
                start.len(),
                self.n_params()
            )));
        }
        let t0 = clock.seconds();
        let objective = |x: &[f64]| self.energy(x).map(|e| e.energy);
        let min: Minimum = match &self.optimizer {
            OptimizerConfig::TrustRegion(c) => minimize_trust_region(objective, start, c)?,
            OptimizerConfig::NelderMead(c) => minimize_nelder_mead(objective, start, c)?,
        };
        let wall_seconds = clock.seconds() - t0;
        let discarded_weight = self.energy(&min.x)?.discarded_weight;
        Ok(VqeResult {
            energy: min.f,
            evaluations: min.evaluations(),
            iterations: min.iterations,
            converged: min.converged,
            trace: min.trace,
            params: min.x,
            discarded_weight,
            wall_seconds,
        })
    }

    /// [`Self::optimize_from`] at the parameters drawn by `init`.
    pub fn optimize(&self, init: InitialParameters, clock: &dyn Clock) -> Result<VqeResult> {
        self.optimize_from(&init.generate(self.n_params()), clock)
    }

    /// Single timed energy evaluation at parameters drawn from `U[-π, π)`.
    pub fn one_shot(&self, seed: u64, clock: &dyn Clock) -> Result<OneShot> {
        let params = InitialParameters::Uniform { half_width: core::f64::consts::PI, seed }.generate(self.n_params());
        let t0 = clock.seconds();
        let circuit = self.circuit(&params)?;
        let t1 = clock.seconds();
        let mut state = MpsState::basis_state(&self.reference, self.mps)?;
        let (mut n1, mut n2, mut t_1q, mut t_2q, mut weight) = (0, 0, 0.0, 0.0, 0.0);
        for g in circuit.gates() {
            let s = clock.seconds();
            weight += state.apply_gate(g)?;
            let dt = clock.seconds() - s;
            if g.is_two_qubit() {
                n2 += 1;
                t_2q += dt;
            } else {
                n1 += 1;
                t_1q += dt;
            }
        }
        let t2 = clock.seconds();
        let energy = state.expect_operator(&self.hamiltonian)?;
        let t3 = clock.seconds();
        Ok(OneShot {
            params,
            energy,
            discarded_weight: weight,
            max_bond: state.max_bond_dim(),
            wall_seconds: t3 - t0,
            compile_seconds: t1 - t0,
            one_qubit_gates: n1,
            one_qubit_seconds: t_1q,
            two_qubit_gates: n2,
            two_qubit_seconds: t_2q,
            expectation_seconds: t3 - t2,
        })
    }
}
