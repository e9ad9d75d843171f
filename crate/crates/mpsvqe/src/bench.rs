//! Desk-scale performance experiments on hydrogen chains.
//!
//! Everything here measures shapes, not absolute numbers: fitted power-law
//! exponents, monotonicity, and model-versus-measurement ratios. Timings
//! use a monotonic clock and report the median of the repetitions.
//!
//! # FLOP model
//!
//! Complex multiply-adds count 8 real flops, so an `m×k · k×n` GEMM is
//! `8mnk`. A two-qubit gate on sites `k, k+1` with bonds `dl, dm, dr`
//! costs
//!
//! - contraction of the two site tensors: `8 · 2dl · dm · 2dr`,
//! - the 4×4 gate on the `(2dl)×(2dr)` block: `128 · dl · dr`,
//! - a one-sided Jacobi SVD of the `2dl × 2dr` block: per sweep and column
//!   pair, [`FlopModel::pair_flops_per_row`] per row of the block plus
//!   [`FlopModel::vector_flops_per_row`] per row of `V`,
//! - rebuilding the left tensor: `8 · 2dl · 2dr · dm'`, `dm' = min(D, 2dl, 2dr)`.
//!
//! The two tensor GEMMs are the `D³` part reported as `gemm`. Single-qubit
//! gates cost `32 · dl · dr`.

use std::time::Instant;

use mpsvqe_core::ansatz::{build_windowed_gsd_pool, pool_template, DEFAULT_WINDOW};
use mpsvqe_core::linalg::{jacobi_svd_with_stats, DenseMatrix, SvdBackend};
use mpsvqe_core::mps::{Circuit, Gate, MpsConfig};
use mpsvqe_core::pauli::molecular_qubit_hamiltonian;
use mpsvqe_core::vqe::{NoClock, OptimizerConfig, VqeProblem};
use mpsvqe_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formats::hamiltonian::HamiltonianFile;
use crate::{Error, Result};

/// H–H distance inside one H₂ unit, Å.
pub const INTRA_BOND: f64 = 0.741441;
/// Distance between the closest atoms of neighbouring units, Å.
pub const INTER_BOND: f64 = 1.322943;

/// Linear chain of H₂ units with alternating bond lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_units: usize,
    pub intra: f64,
    pub inter: f64,
}

impl ChainSpec {
    pub fn new(n_units: usize) -> Result<Self> {
        Self::with_distances(n_units, INTRA_BOND, INTER_BOND)
    }

    pub fn with_distances(n_units: usize, intra: f64, inter: f64) -> Result<Self> {
        if n_units == 0 {
            return Err(Error::Format("a chain needs at least one H2 unit".into()));
        }
        if !(intra > 0.0 && inter > 0.0 && intra.is_finite() && inter.is_finite()) {
            return Err(Error::Format(format!("bond lengths must be positive, got {intra} and {inter}")));
        }
        Ok(Self { n_units, intra, inter })
    }

    pub fn n_atoms(&self) -> usize {
        2 * self.n_units
    }

    /// Spin orbitals in a minimal basis.
    pub fn n_qubits(&self) -> usize {
        2 * self.n_atoms()
    }

    /// Atom positions along the chain axis.
    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_units)
            .flat_map(|u| {
                let x = u as f64 * (self.intra + self.inter);
                [x, x + self.intra]
            })
            .collect()
    }

    /// XYZ geometry text.
    pub fn xyz(&self) -> String {
        let mut out = format!("{}\nH{} chain\n", self.n_atoms(), self.n_atoms());
        for x in self.positions() {
            out.push_str(&format!("H {x:.6} 0.000000 0.000000\n"));
        }
        out
    }
}

/// Least-squares fit of `y = c · x^alpha` on log-log axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub alpha: f64,
    pub c: f64,
    /// RMS residual of `ln y`.
    pub residual: f64,
}

impl PowerFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.c * x.powf(self.alpha)
    }
}

pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    if x.len() != y.len() {
        return Err(Error::Format(format!("{} sizes but {} values", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::Format(format!("power-law fit needs at least 3 points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Format("power-law fit needs positive finite data".into()));
    }
    for (i, a) in x.iter().enumerate() {
        if x[..i].contains(a) {
            return Err(Error::Format(format!("duplicate size {a} in fit")));
        }
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let alpha = sxy / sxx;
    let ln_c = my - alpha * mx;
    let residual = (lx.iter().zip(&ly).map(|(a, b)| (b - ln_c - alpha * a).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PowerFit { alpha, c: ln_c.exp(), residual })
}

/// One chain size in a [`ScalingReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingRecord {
    pub n_atoms: usize,
    pub n_qubits: usize,
    pub n_terms: usize,
    /// Median wall time of one energy evaluation.
    pub seconds: Option<f64>,
    pub flops: Option<f64>,
    pub n_params: Option<usize>,
    pub two_qubit_gates: Option<usize>,
    pub max_bond_reached: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Terms,
    Time,
}

/// Per-size records and the fitted exponent of the chosen metric against
/// the atom count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingReport {
    pub metric: Metric,
    pub records: Vec<ScalingRecord>,
    pub fit: PowerFit,
}

impl ScalingReport {
    fn values(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| match self.metric {
                Metric::Terms => r.n_terms as f64,
                Metric::Time => r.seconds.unwrap_or(f64::NAN),
            })
            .collect()
    }

    /// Metric strictly increasing with size.
    pub fn is_monotone(&self) -> bool {
        self.values().windows(2).all(|w| w[1] > w[0])
    }

    /// Fitted exponent above one.
    pub fn is_super_linear(&self) -> bool {
        self.fit.alpha > 1.0
    }

    /// Plot-ready CSV: `n_atoms,n_qubits,n_terms,seconds,flops,fitted`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_atoms,n_qubits,n_terms,seconds,flops,fitted\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{:e}\n",
                r.n_atoms,
                r.n_qubits,
                r.n_terms,
                opt(r.seconds),
                opt(r.flops),
                self.fit.predict(r.n_atoms as f64)
            ));
        }
        out
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 3 {
        return Err(Error::Format(format!("scaling needs at least 3 sizes, got {}", sizes.len())));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Format(format!("sizes must be strictly increasing: {sizes:?}")));
    }
    Ok(())
}

fn fit_report(metric: Metric, records: Vec<ScalingRecord>) -> Result<ScalingReport> {
    let mut report = ScalingReport {
        metric,
        records,
        fit: PowerFit { alpha: f64::NAN, c: f64::NAN, residual: f64::NAN },
    };
    let x: Vec<f64> = report.records.iter().map(|r| r.n_atoms as f64).collect();
    report.fit = fit_power_law(&x, &report.values())?;
    Ok(report)
}

/// Qubit-Hamiltonian term counts (identity included) against chain size.
pub fn term_count_scaling(
    sizes: &[usize],
    source: impl Fn(usize) -> Result<HamiltonianFile>,
) -> Result<ScalingReport> {
    check_sizes(sizes)?;
    let mut records = Vec::new();
    for &atoms in sizes {
        let file = source(atoms)?;
        let h = molecular_qubit_hamiltonian(&file.integrals)?;
        records.push(ScalingRecord {
            n_atoms: atoms,
            n_qubits: 2 * file.n_orbitals(),
            n_terms: h.len(),
            seconds: None,
            flops: None,
            n_params: None,
            two_qubit_gates: None,
            max_bond_reached: None,
        });
    }
    fit_report(Metric::Terms, records)
}

/// Settings of [`iteration_time_scaling`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    pub max_bond: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub window: usize,
    #[serde(with = "backend_name")]
    pub backend: SvdBackend,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            max_bond: 128,
            repetitions: 3,
            seed: 0,
            window: DEFAULT_WINDOW,
            backend: MpsConfig::default().backend,
        }
    }
}

/// Serializes an [`SvdBackend`] by name.
pub mod backend_name {
    use mpsvqe_core::linalg::SvdBackend;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &SvdBackend, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(b.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SvdBackend, D::Error> {
        let name = String::deserialize(d)?;
        SvdBackend::from_name(&name).ok_or_else(|| serde::de::Error::custom(format!("unknown SVD backend {name:?}")))
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Pool-ansatz problem on a chain Hamiltonian.
pub fn pool_problem(file: &HamiltonianFile, mps: MpsConfig, window: usize) -> Result<VqeProblem> {
    let n = file.n_orbitals();
    let pool = build_windowed_gsd_pool(n, window.min(n))?;
    let template = pool_template(&pool, 2 * n)?;
    let h = molecular_qubit_hamiltonian(&file.integrals)?;
    Ok(VqeProblem::new(h, template, &file.hf_bitstring(), mps, OptimizerConfig::default())?)
}

/// Median one-shot wall time of one chain at the settings of `config`.
pub fn one_shot_record(file: &HamiltonianFile, config: &TimingConfig) -> Result<ScalingRecord> {
    if config.repetitions == 0 {
        return Err(Error::Format("at least one repetition required".into()));
    }
    let mps = MpsConfig { max_bond: config.max_bond, backend: config.backend, ..MpsConfig::default() };
    let problem = pool_problem(file, mps, config.window)?;
    let mut times = Vec::new();
    let mut shot = None;
    for _ in 0..config.repetitions {
        let t = Instant::now();
        let s = problem.one_shot(config.seed, &NoClock)?;
        times.push(t.elapsed().as_secs_f64());
        shot = Some(s);
    }
    let shot = shot.expect("at least one repetition");
    let circuit = problem.circuit(&shot.params)?;
    Ok(ScalingRecord {
        n_atoms: file.n_orbitals(),
        n_qubits: problem.template().n_qubits(),
        n_terms: problem.hamiltonian().len(),
        seconds: Some(median(times)),
        flops: Some(flop_estimate(&circuit, config.max_bond, &FlopModel::default()).total()),
        n_params: Some(problem.n_params()),
        two_qubit_gates: Some(shot.two_qubit_gates),
        max_bond_reached: Some(shot.max_bond),
    })
}

/// Median one-shot wall time per chain size.
pub fn iteration_time_scaling(
    sizes: &[usize],
    config: &TimingConfig,
    source: impl Fn(usize) -> Result<HamiltonianFile>,
) -> Result<ScalingReport> {
    check_sizes(sizes)?;
    let mut records = Vec::new();
    for &atoms in sizes {
        let mut r = one_shot_record(&source(atoms)?, config)?;
        r.n_atoms = atoms;
        log::info!("{atoms} atoms: {:.3} s", r.seconds.unwrap_or_default());
        records.push(r);
    }
    fit_report(Metric::Time, records)
}

/// How bond dimensions are assumed to grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BondModel {
    /// Every interior bond at `D`.
    Saturated,
    /// Bond `k` at `min(D, 2^k, 2^(n−k))`.
    Capped,
}

/// Parameters of [`flop_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlopModel {
    pub svd_sweeps: f64,
    /// Three complex inner products and a two-column rotation.
    pub pair_flops_per_row: f64,
    /// Rotation of two columns of `V`.
    pub vector_flops_per_row: f64,
    pub bonds: BondModel,
}

impl Default for FlopModel {
    fn default() -> Self {
        Self { svd_sweeps: 6.0, pair_flops_per_row: 44.0, vector_flops_per_row: 28.0, bonds: BondModel::Capped }
    }
}

/// Flop count by category.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FlopEstimate {
    pub gemm: f64,
    pub gate: f64,
    pub svd: f64,
}

impl FlopEstimate {
    pub fn total(&self) -> f64 {
        self.gemm + self.gate + self.svd
    }
}

impl FlopModel {
    fn bond(&self, k: usize, n: usize, max_bond: usize) -> f64 {
        if k == 0 || k == n {
            return 1.0;
        }
        match self.bonds {
            BondModel::Saturated => max_bond as f64,
            BondModel::Capped => {
                let edge = k.min(n - k).min(62) as u32;
                (max_bond as f64).min(2f64.powi(edge as i32))
            }
        }
    }

    /// Jacobi SVD of an `m × n` block; the sweep runs over the smaller side.
    pub fn svd_flops(&self, m: f64, n: f64) -> f64 {
        let (rows, cols) = if m >= n { (m, n) } else { (n, m) };
        self.svd_sweeps * cols * (cols - 1.0) / 2.0 * (self.pair_flops_per_row * rows + self.vector_flops_per_row * cols)
    }
}

/// Analytic flop count of evolving an MPS through `circuit` at bond cap
/// `max_bond`.
pub fn flop_estimate(circuit: &Circuit, max_bond: usize, model: &FlopModel) -> FlopEstimate {
    let n = circuit.n_qubits();
    let mut est = FlopEstimate::default();
    for g in circuit.gates() {
        match g {
            Gate::One { site, .. } => {
                est.gate += 32.0 * model.bond(*site, n, max_bond) * model.bond(site + 1, n, max_bond);
            }
            Gate::Two { site, .. } => {
                let dl = model.bond(*site, n, max_bond);
                let dm = model.bond(site + 1, n, max_bond);
                let dr = model.bond(site + 2, n, max_bond);
                let kept = (max_bond as f64).min(2.0 * dl).min(2.0 * dr);
                est.gemm += 8.0 * (2.0 * dl) * dm * (2.0 * dr) + 8.0 * (2.0 * dl) * (2.0 * dr) * kept;
                est.gate += 128.0 * dl * dr;
                est.svd += model.svd_flops(2.0 * dl, 2.0 * dr);
            }
        }
    }
    est
}

/// One row of [`svd_bench`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvdBenchRow {
    pub size: usize,
    pub backend: String,
    pub seconds: f64,
    /// Nominal `4·(4n³ + 22n³)` flops over the median time.
    pub gflops: f64,
    pub orthogonality: f64,
    pub reconstruction: f64,
    pub sweeps: Option<usize>,
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Times each backend on random square complex matrices.
pub fn svd_bench(sizes: &[usize], backends: &[SvdBackend], repetitions: usize, seed: u64) -> Result<Vec<SvdBenchRow>> {
    if repetitions == 0 || sizes.is_empty() || backends.is_empty() {
        return Err(Error::Format("svd bench needs sizes, backends and at least one repetition".into()));
    }
    let mut rows = Vec::new();
    for &n in sizes {
        if n == 0 {
            return Err(Error::Format("matrix size must be positive".into()));
        }
        let a = random_matrix(n, n, seed ^ n as u64);
        let norm = a.frobenius_norm();
        for backend in backends {
            let mut times = Vec::new();
            let mut result = None;
            for _ in 0..repetitions {
                let t = Instant::now();
                let svd = backend.svd(&a)?;
                times.push(t.elapsed().as_secs_f64());
                result = Some(svd);
            }
            let svd = result.expect("at least one repetition");
            let sweeps = match backend {
                SvdBackend::Jacobi { eps, max_sweeps } => Some(jacobi_svd_with_stats(&a, *eps, *max_sweeps)?.1.sweeps),
                _ => None,
            };
            let seconds = median(times);
            let nf = n as f64;
            rows.push(SvdBenchRow {
                size: n,
                backend: backend.name().into(),
                seconds,
                gflops: 4.0 * 26.0 * nf.powi(3) / seconds.max(1e-12) / 1e9,
                orthogonality: svd.u.orthonormality_residual().max(svd.v.orthonormality_residual()),
                reconstruction: svd.reconstruct().max_abs_diff(&a) / norm,
                sweeps,
            });
        }
    }
    Ok(rows)
}

/// CSV: `size,backend,seconds,gflops,orthogonality,reconstruction`.
pub fn svd_bench_csv(rows: &[SvdBenchRow]) -> String {
    let mut out = String::from("size,backend,seconds,gflops,orthogonality,reconstruction\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:e},{:e},{:e},{:e}\n",
            r.size, r.backend, r.seconds, r.gflops, r.orthogonality, r.reconstruction
        ));
    }
    out
}
