//! Run configuration: `key = value` files with command-line overrides.
//!
//! ```text
//! # comment
//! hamiltonian = "fixtures/h2_sto3g_0.7414.ham"
//! ansatz = uccsd
//! max_bond = 64
//! sizes = 6, 12, 24
//! ```
//!
//! Values may be quoted. Lists are comma separated, optionally in
//! brackets. Unknown keys are errors. Later sources win: defaults, then the
//! file, then flags.

use std::path::{Path, PathBuf};

use mpsvqe_core::ansatz::DEFAULT_WINDOW;
use mpsvqe_core::dmet::ELECTRON_TOLERANCE;
use mpsvqe_core::linalg::SvdBackend;
use mpsvqe_core::mps::MpsConfig;
use mpsvqe_core::vqe::{InitialParameters, OptimizerConfig};
use serde::{Deserialize, Serialize};

use crate::bench::{BondModel, Metric};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzChoice {
    Uccsd,
    Pool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitChoice {
    /// Zeros for UCCSD, small random angles for the pool.
    Auto,
    Zeros,
    Uniform,
}

/// Every setting a subcommand may read. Echoed into each result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hamiltonian: Option<PathBuf>,
    pub fragments: Option<PathBuf>,
    pub template: Option<PathBuf>,
    pub ansatz: AnsatzChoice,
    pub pool_window: usize,
    pub max_bond: usize,
    pub threshold: f64,
    pub svd_backend: String,
    pub optimizer: String,
    pub max_evaluations: Option<usize>,
    pub init: InitChoice,
    pub init_width: f64,
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub require_converged: bool,
    pub electron_tolerance: f64,
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub metric: Metric,
    pub backends: Vec<String>,
    pub bond_model: BondModel,
    pub atoms: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hamiltonian: None,
            fragments: None,
            template: None,
            ansatz: AnsatzChoice::Uccsd,
            pool_window: DEFAULT_WINDOW,
            max_bond: MpsConfig::default().max_bond,
            threshold: MpsConfig::default().threshold,
            svd_backend: MpsConfig::default().backend.name().into(),
            optimizer: OptimizerConfig::default().name().into(),
            max_evaluations: None,
            init: InitChoice::Auto,
            init_width: 0.01,
            seed: 0,
            threads: 0,
            out: None,
            csv: None,
            checkpoint: None,
            require_converged: false,
            electron_tolerance: ELECTRON_TOLERANCE,
            sizes: Vec::new(),
            repetitions: 3,
            metric: Metric::Terms,
            backends: vec!["jacobi".into(), "reference".into()],
            bond_model: BondModel::Capped,
            atoms: None,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| usage(format!("invalid value {value:?} for {key}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let inner = value.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s.trim_matches('"')))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(usage(format!("invalid value {value:?} for {key}; expected true or false"))),
    }
}

fn parse_enum<T: for<'de> Deserialize<'de>>(key: &str, value: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(value.into()))
        .map_err(|_| usage(format!("invalid value {value:?} for {key}")))
}

fn optional<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value == "none" || value.is_empty() {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

impl RunConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let value = value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value);
        match key {
            "hamiltonian" => self.hamiltonian = Some(value.into()),
            "fragments" => self.fragments = Some(value.into()),
            "template" => self.template = Some(value.into()),
            "ansatz" => self.ansatz = parse_enum(key, value)?,
            "pool_window" => self.pool_window = parse(key, value)?,
            "max_bond" => self.max_bond = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "svd_backend" => self.svd_backend = value.into(),
            "optimizer" => self.optimizer = value.into(),
            "max_evaluations" => self.max_evaluations = optional(key, value)?,
            "init" => self.init = parse_enum(key, value)?,
            "init_width" => self.init_width = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "out" => self.out = Some(value.into()),
            "csv" => self.csv = Some(value.into()),
            "checkpoint" => self.checkpoint = Some(value.into()),
            "require_converged" => self.require_converged = parse_bool(key, value)?,
            "electron_tolerance" => self.electron_tolerance = parse(key, value)?,
            "sizes" => self.sizes = parse_list(key, value)?,
            "repetitions" => self.repetitions = parse(key, value)?,
            "metric" => self.metric = parse_enum(key, value)?,
            "backends" => self.backends = parse_list(key, value)?,
            "bond_model" => self.bond_model = parse_enum(key, value)?,
            "atoms" => self.atoms = optional(key, value)?,
            other => return Err(usage(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` text; errors name the line.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value).map_err(|e| usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    /// Checks value ranges and names that are only known at run time.
    pub fn validate(&self) -> Result<()> {
        if self.max_bond == 0 {
            return Err(usage("max_bond must be at least 1"));
        }
        if !(self.threshold >= 0.0 && self.threshold < 1.0) {
            return Err(usage(format!("threshold {} outside [0, 1)", self.threshold)));
        }
        self.backend()?;
        self.optimizer_config()?;
        for b in &self.backends {
            SvdBackend::from_name(b).ok_or_else(|| usage(format!("unknown SVD backend {b:?}")))?;
        }
        if self.pool_window == 0 {
            return Err(usage("pool_window must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(usage("repetitions must be at least 1"));
        }
        if !(self.electron_tolerance > 0.0) {
            return Err(usage("electron_tolerance must be positive"));
        }
        if !(self.init_width > 0.0 && self.init_width.is_finite()) {
            return Err(usage("init_width must be positive"));
        }
        Ok(())
    }

    pub fn backend(&self) -> Result<SvdBackend> {
        SvdBackend::from_name(&self.svd_backend)
            .ok_or_else(|| usage(format!("unknown SVD backend {:?}", self.svd_backend)))
    }

    pub fn mps_config(&self) -> Result<MpsConfig> {
        Ok(MpsConfig { max_bond: self.max_bond, threshold: self.threshold, backend: self.backend()? })
    }

    pub fn optimizer_config(&self) -> Result<OptimizerConfig> {
        let opt = OptimizerConfig::from_name(&self.optimizer)
            .ok_or_else(|| usage(format!("unknown optimizer {:?}", self.optimizer)))?;
        Ok(opt.with_max_evaluations(self.max_evaluations))
    }

    pub fn initial_parameters(&self) -> InitialParameters {
        match (self.init, self.ansatz) {
            (InitChoice::Zeros, _) | (InitChoice::Auto, AnsatzChoice::Uccsd) => InitialParameters::Zeros,
            (InitChoice::Auto, AnsatzChoice::Pool) => InitialParameters::pool(self.seed),
            (InitChoice::Uniform, _) => InitialParameters::Uniform { half_width: self.init_width, seed: self.seed },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut c = RunConfig::default();
        c.apply_text("# run\nhamiltonian = \"a.ham\"\nmax_bond = 32  # small\nsizes = [6, 12, 24]\nansatz = pool\n")
            .unwrap();
        c.set("max_bond", "64").unwrap();
        assert_eq!(c.hamiltonian.as_deref(), Some(Path::new("a.ham")));
        assert_eq!(c.max_bond, 64);
        assert_eq!(c.sizes, [6, 12, 24]);
        assert_eq!(c.ansatz, AnsatzChoice::Pool);
        assert!(matches!(c.initial_parameters(), InitialParameters::Uniform { half_width, .. } if half_width == 0.01));
        c.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let mut c = RunConfig::default();
        assert!(matches!(c.apply_text("bond = 3\n"), Err(Error::Usage(_))));
        assert!(c.apply_text("max_bond 3\n").is_err());
        assert!(c.set("max_bond", "x").is_err());
        assert!(c.set("ansatz", "adapt").is_err());
        assert!(c.set("require_converged", "maybe").is_err());
        c.set("svd_backend", "lapack").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("max_bond", "0").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn defaults_validate_and_echo() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.mps_config().unwrap(), MpsConfig::default());
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), c);
        let mut c2 = c.clone();
        c2.set("max_evaluations", "none").unwrap();
        assert_eq!(c2, c);
    }
}
