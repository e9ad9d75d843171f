//! JSON results.
//!
//! Every command writes one [`Report`]:
//!
//! ```text
//! { "schema_version": 1, "build": "...", "config": { ... },
//!   "output": { "command": "run-vqe", "result": { ... } } }
//! ```
//!
//! All types deny unknown fields, so deserializing a document into
//! [`Report`] is the schema check. Wall-clock values live only in fields
//! named `timings` or `seconds`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bench::{BondModel, FlopEstimate, ScalingReport, SvdBenchRow};
use crate::config::RunConfig;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// `git describe` of the source tree, or the crate version outside git.
pub const BUILD_ID: &str = env!("MPSVQE_BUILD_ID");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub build: String,
    pub config: RunConfig,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "result", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Output {
    RunVqe(VqeOutput),
    RunDmet(DmetOutput),
    BenchChain(ScalingReport),
    SvdBench(SvdBenchOutput),
    FlopModel(FlopOutput),
    DumpCircuit(CircuitOutput),
    ValidateHamiltonian(ValidationOutput),
}

impl Output {
    pub fn command(&self) -> &'static str {
        match self {
            Output::RunVqe(_) => "run-vqe",
            Output::RunDmet(_) => "run-dmet",
            Output::BenchChain(_) => "bench-chain",
            Output::SvdBench(_) => "svd-bench",
            Output::FlopModel(_) => "flop-model",
            Output::DumpCircuit(_) => "dump-circuit",
            Output::ValidateHamiltonian(_) => "validate-hamiltonian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub setup_seconds: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeOutput {
    pub n_qubits: usize,
    pub n_params: usize,
    pub n_terms: usize,
    pub ansatz: String,
    pub reference: String,
    /// Energy of the reference determinant.
    pub reference_energy: f64,
    pub energy: f64,
    /// `fci_energy` recorded in the Hamiltonian file, if any.
    pub recorded_fci_energy: Option<f64>,
    pub error_vs_recorded: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    pub discarded_weight: f64,
    pub max_bond_reached: usize,
    pub params: Vec<f64>,
    /// Energy of every evaluation in order.
    pub trace: Vec<f64>,
    pub checkpoint: Option<PathBuf>,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentOutput {
    pub id: String,
    pub path: PathBuf,
    pub spin_mode: String,
    pub n_qubits: usize,
    pub energy: f64,
    pub electrons: f64,
    pub electron_target: f64,
    pub vqe_energy: f64,
    pub vqe_converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmetOutput {
    pub fragments: Vec<FragmentOutput>,
    /// Sum of fragment energies, without the core energy.
    pub energy: f64,
    /// Core energy when all fragment files agree on it.
    pub e_core: Option<f64>,
    pub electrons: f64,
    pub electron_target: f64,
    pub electron_tolerance: f64,
    pub converged: bool,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvdBenchOutput {
    pub rows: Vec<SvdBenchRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlopOutput {
    pub n_qubits: usize,
    pub n_params: usize,
    pub max_bond: usize,
    pub bond_model: BondModel,
    pub gates: usize,
    pub two_qubit_gates: usize,
    pub estimate: FlopEstimate,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitOutput {
    pub n_qubits: usize,
    pub n_params: usize,
    pub gates: usize,
    pub two_qubit_gates: usize,
    pub params: Vec<f64>,
    /// Ansatz template text.
    pub template: String,
    /// Fused gate list.
    pub circuit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationOutput {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub n_qubits: usize,
    pub n_terms: usize,
    pub e_core: f64,
    pub hf_bitstring: String,
    /// Re-serializing the parsed file reproduces its bytes.
    pub canonical: bool,
    pub hf_energy: f64,
    pub recorded_hf_energy: Option<f64>,
    /// Dense sector ground energy, for registers small enough to diagonalize.
    pub fci_energy: Option<f64>,
    pub recorded_fci_energy: Option<f64>,
    pub tolerance: f64,
    pub consistent: bool,
}

impl Report {
    pub fn new(config: RunConfig, output: Output) -> Self {
        Self { schema_version: SCHEMA_VERSION, build: BUILD_ID.into(), config, output }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Parses and schema-checks a result document.
pub fn validate(text: &str) -> Result<Report> {
    let report: Report = serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid result: {e}")))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "schema version {}, this build writes {SCHEMA_VERSION}",
            report.schema_version
        )));
    }
    Ok(report)
}

/// Removes wall-clock fields so two runs can be compared.
pub fn strip_timings(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.retain(|k, _| k != "timings" && k != "seconds" && k != "gflops");
            map.values_mut().for_each(strip_timings);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}
