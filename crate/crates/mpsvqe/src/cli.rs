//! Command-line driver.
//!
//! Settings resolve in order: defaults, `--config FILE`, `--set KEY=VALUE`,
//! then dedicated flags. Exit codes: 0 success, 1 domain error, 2 usage
//! error.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mpsvqe_core::ansatz::{build_windowed_gsd_pool, pool_template, uccsd_template, AnsatzTemplate};
use mpsvqe_core::dmet::{assemble_total, FragmentSolver};
use mpsvqe_core::mps::MpsState;
use mpsvqe_core::pauli::dense::{sector_ground_state, MAX_DENSE_QUBITS};
use mpsvqe_core::pauli::{molecular_qubit_hamiltonian, QubitOperator};
use mpsvqe_core::vqe::{InitialParameters, NoClock, SystemClock, VqeProblem};

use crate::bench::{self, FlopModel, Metric, TimingConfig};
use crate::config::{AnsatzChoice, RunConfig};
use crate::formats::fragment::read_fragment_dir;
use crate::formats::hamiltonian::HamiltonianFile;
use crate::formats::{checkpoint, circuit, template};
use crate::report::{
    CircuitOutput, DmetOutput, FlopOutput, FragmentOutput, Output, Report, SvdBenchOutput, Timings,
    ValidationOutput, VqeOutput, BUILD_ID,
};
use crate::{fixtures, Error, Result};

/// Largest register `validate-hamiltonian` diagonalizes.
pub const VALIDATION_MAX_QUBITS: usize = 12;

/// Agreement required between computed and recorded reference energies.
pub const VALIDATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "mpsvqe", version = BUILD_ID, about = "Matrix-product-state VQE emulator")]
struct Cli {
    /// Log more (repeat for debug output).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize the VQE energy of one Hamiltonian file.
    RunVqe {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: Sim,
        #[command(flatten)]
        vqe: Vqe,
        /// Write the optimized MPS here.
        #[arg(long)]
        checkpoint: Option<String>,
    },
    /// Solve every fragment file in a directory and sum the DMET energy.
    RunDmet {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: Sim,
        /// Directory of `.frag` files.
        #[arg(long)]
        fragments: Option<String>,
        #[arg(long)]
        optimizer: Option<String>,
        #[arg(long)]
        max_evaluations: Option<String>,
        #[arg(long)]
        electron_tolerance: Option<String>,
        /// Fail when the electron count misses its target.
        #[arg(long)]
        require_converged: bool,
    },
    /// Term-count or one-shot timing scaling over hydrogen chains.
    BenchChain {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: Sim,
        /// Chain sizes in atoms, comma separated.
        #[arg(long)]
        sizes: Option<String>,
        /// terms or time.
        #[arg(long)]
        metric: Option<String>,
        #[arg(long)]
        repetitions: Option<String>,
        #[arg(long)]
        pool_window: Option<String>,
        /// Also write the records as CSV.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Time and check the SVD backends on random complex matrices.
    SvdBench {
        #[command(flatten)]
        common: Common,
        /// Square matrix sizes, comma separated.
        #[arg(long)]
        sizes: Option<String>,
        /// Backend names, comma separated.
        #[arg(long)]
        backends: Option<String>,
        #[arg(long)]
        repetitions: Option<String>,
        #[arg(long)]
        csv: Option<String>,
    },
    /// Analytic flop count of one pool-ansatz circuit.
    FlopModel {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        hamiltonian: Option<String>,
        /// Use the bundled chain fixture with this many atoms.
        #[arg(long)]
        atoms: Option<String>,
        #[arg(long)]
        max_bond: Option<String>,
        /// capped or saturated.
        #[arg(long)]
        bond_model: Option<String>,
        #[arg(long)]
        pool_window: Option<String>,
    },
    /// Print the ansatz template and compiled gate list.
    DumpCircuit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        vqe: Vqe,
    },
    /// Check a Hamiltonian file and its recorded reference energies.
    ValidateHamiltonian {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        hamiltonian: Option<String>,
    },
}

type Overrides = Vec<(&'static str, String)>;

fn push(out: &mut Overrides, key: &'static str, value: &Option<String>) {
    if let Some(v) = value {
        out.push((key, v.clone()));
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Set any configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<String>,
    /// Write the JSON result here instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

impl Common {
    fn overrides(&self, out: &mut Overrides) {
        push(out, "seed", &self.seed);
        push(out, "threads", &self.threads);
        push(out, "out", &self.out);
    }
}

#[derive(Debug, Args)]
struct Sim {
    #[arg(long)]
    max_bond: Option<String>,
    /// jacobi, jacobi-qr, reference or crossproduct.
    #[arg(long)]
    svd_backend: Option<String>,
    /// Relative singular-value cutoff.
    #[arg(long)]
    threshold: Option<String>,
}

impl Sim {
    fn overrides(&self, out: &mut Overrides) {
        push(out, "max_bond", &self.max_bond);
        push(out, "svd_backend", &self.svd_backend);
        push(out, "threshold", &self.threshold);
    }
}

#[derive(Debug, Args)]
struct Vqe {
    #[arg(long)]
    hamiltonian: Option<String>,
    /// uccsd or pool.
    #[arg(long)]
    ansatz: Option<String>,
    /// Ansatz template file; replaces --ansatz.
    #[arg(long)]
    template: Option<String>,
    #[arg(long)]
    pool_window: Option<String>,
    /// bobyqa or neldermead.
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    max_evaluations: Option<String>,
    /// auto, zeros or uniform.
    #[arg(long)]
    init: Option<String>,
}

impl Vqe {
    fn overrides(&self, out: &mut Overrides) {
        push(out, "hamiltonian", &self.hamiltonian);
        push(out, "ansatz", &self.ansatz);
        push(out, "template", &self.template);
        push(out, "pool_window", &self.pool_window);
        push(out, "optimizer", &self.optimizer);
        push(out, "max_evaluations", &self.max_evaluations);
        push(out, "init", &self.init);
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::RunVqe { common, .. }
            | Command::RunDmet { common, .. }
            | Command::BenchChain { common, .. }
            | Command::SvdBench { common, .. }
            | Command::FlopModel { common, .. }
            | Command::DumpCircuit { common, .. }
            | Command::ValidateHamiltonian { common, .. } => common,
        }
    }

    fn overrides(&self) -> Overrides {
        let mut o = Overrides::new();
        self.common().overrides(&mut o);
        match self {
            Command::RunVqe { sim, vqe, checkpoint, .. } => {
                sim.overrides(&mut o);
                vqe.overrides(&mut o);
                push(&mut o, "checkpoint", checkpoint);
            }
            Command::RunDmet { sim, fragments, optimizer, max_evaluations, electron_tolerance, require_converged, .. } => {
                sim.overrides(&mut o);
                push(&mut o, "fragments", fragments);
                push(&mut o, "optimizer", optimizer);
                push(&mut o, "max_evaluations", max_evaluations);
                push(&mut o, "electron_tolerance", electron_tolerance);
                if *require_converged {
                    o.push(("require_converged", "true".into()));
                }
            }
            Command::BenchChain { sim, sizes, metric, repetitions, pool_window, csv, .. } => {
                sim.overrides(&mut o);
                push(&mut o, "sizes", sizes);
                push(&mut o, "metric", metric);
                push(&mut o, "repetitions", repetitions);
                push(&mut o, "pool_window", pool_window);
                push(&mut o, "csv", csv);
            }
            Command::SvdBench { sizes, backends, repetitions, csv, .. } => {
                push(&mut o, "sizes", sizes);
                push(&mut o, "backends", backends);
                push(&mut o, "repetitions", repetitions);
                push(&mut o, "csv", csv);
            }
            Command::FlopModel { hamiltonian, atoms, max_bond, bond_model, pool_window, .. } => {
                push(&mut o, "hamiltonian", hamiltonian);
                push(&mut o, "atoms", atoms);
                push(&mut o, "max_bond", max_bond);
                push(&mut o, "bond_model", bond_model);
                push(&mut o, "pool_window", pool_window);
            }
            Command::DumpCircuit { vqe, .. } => vqe.overrides(&mut o),
            Command::ValidateHamiltonian { hamiltonian, .. } => push(&mut o, "hamiltonian", hamiltonian),
        }
        o
    }

    /// Defaults, then the config file, then `--set`, then flags.
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let common = self.common();
        if let Some(path) = &common.config {
            cfg.apply_file(path)?;
        }
        for kv in &common.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k.trim(), v)?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match run(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mpsvqe: error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => 2,
        _ => 1,
    }
}

fn run(command: &Command) -> Result<()> {
    let cfg = command.resolve()?;
    let execute = || execute(command, &cfg);
    let (output, failure) = if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start {} threads: {e}", cfg.threads)))?;
        pool.install(execute)?
    } else {
        execute()?
    };
    emit(&Report::new(cfg.clone(), output), cfg.out.as_deref())?;
    failure.map_or(Ok(()), Err)
}

fn emit(report: &Report, out: Option<&Path>) -> Result<()> {
    let json = report.to_json();
    match out {
        Some(path) => std::fs::write(path, json).map_err(|e| Error::io(path, e)),
        None => std::io::stdout().write_all(json.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

/// The result plus an error raised after it was computed; the result is
/// still written.
type Outcome = (Output, Option<Error>);

fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        Command::RunVqe { .. } => run_vqe(cfg).map(|o| (Output::RunVqe(o), None)),
        Command::RunDmet { .. } => run_dmet(cfg),
        Command::BenchChain { .. } => bench_chain(cfg).map(|o| (Output::BenchChain(o), None)),
        Command::SvdBench { .. } => svd_bench(cfg).map(|o| (Output::SvdBench(o), None)),
        Command::FlopModel { .. } => flop_model(cfg).map(|o| (Output::FlopModel(o), None)),
        Command::DumpCircuit { .. } => dump_circuit(cfg).map(|o| (Output::DumpCircuit(o), None)),
        Command::ValidateHamiltonian { .. } => validate_hamiltonian(cfg),
    }
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    value.as_deref().ok_or_else(|| Error::Usage(format!("--{flag} is required")))
}

fn load_hamiltonian(cfg: &RunConfig) -> Result<HamiltonianFile> {
    HamiltonianFile::read(required(&cfg.hamiltonian, "hamiltonian")?)
}

fn ansatz_template(cfg: &RunConfig, file: &HamiltonianFile) -> Result<(AnsatzTemplate, &'static str)> {
    let n = file.n_orbitals();
    if let Some(path) = &cfg.template {
        return Ok((template::read(path)?, "template"));
    }
    Ok(match cfg.ansatz {
        AnsatzChoice::Uccsd => (uccsd_template(file.n_electrons, 2 * n)?, "uccsd"),
        AnsatzChoice::Pool => {
            let pool = build_windowed_gsd_pool(n, cfg.pool_window.min(n))?;
            (pool_template(&pool, 2 * n)?, "pool")
        }
    })
}

fn vqe_problem(cfg: &RunConfig, file: &HamiltonianFile) -> Result<(VqeProblem, &'static str)> {
    let (template, name) = ansatz_template(cfg, file)?;
    let h = molecular_qubit_hamiltonian(&file.integrals)?;
    let problem = VqeProblem::new(h, template, &file.hf_bitstring(), cfg.mps_config()?, cfg.optimizer_config()?)?;
    Ok((problem, name))
}

fn basis_energy(h: &QubitOperator, bits: &str) -> Result<f64> {
    Ok(MpsState::basis_state(bits, Default::default())?.expect_operator(h)?)
}

fn run_vqe(cfg: &RunConfig) -> Result<VqeOutput> {
    let start = Instant::now();
    let file = load_hamiltonian(cfg)?;
    let (problem, ansatz) = vqe_problem(cfg, &file)?;
    let reference_energy = basis_energy(problem.hamiltonian(), problem.reference())?;
    let setup_seconds = start.elapsed().as_secs_f64();
    let result = problem.optimize(cfg.initial_parameters(), &SystemClock::start())?;
    let (state, _) = problem.state(&result.params)?;
    if let Some(path) = &cfg.checkpoint {
        checkpoint::write(path, &state)?;
    }
    let recorded = file.metadata_f64("fci_energy");
    log::info!("energy {:.12} after {} evaluations", result.energy, result.evaluations);
    Ok(VqeOutput {
        n_qubits: problem.template().n_qubits(),
        n_params: problem.n_params(),
        n_terms: problem.hamiltonian().len(),
        ansatz: ansatz.into(),
        reference: problem.reference().into(),
        reference_energy,
        energy: result.energy,
        recorded_fci_energy: recorded,
        error_vs_recorded: recorded.map(|e| result.energy - e),
        converged: result.converged,
        iterations: result.iterations,
        evaluations: result.evaluations,
        discarded_weight: result.discarded_weight,
        max_bond_reached: state.max_bond_dim(),
        params: result.params,
        trace: result.trace,
        checkpoint: cfg.checkpoint.clone(),
        timings: Timings { setup_seconds, wall_seconds: result.wall_seconds },
    })
}

fn run_dmet(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    if cfg.ansatz != AnsatzChoice::Uccsd || cfg.template.is_some() {
        return Err(Error::Usage("run-dmet solves fragments with the uccsd ansatz only".into()));
    }
    let files = read_fragment_dir(required(&cfg.fragments, "fragments")?)?;
    let specs: Vec<_> = files.iter().map(|(_, f)| f.spec.clone()).collect();
    let setup_seconds = start.elapsed().as_secs_f64();
    let solver =
        FragmentSolver { mps: cfg.mps_config()?, optimizer: cfg.optimizer_config()?, init: cfg.initial_parameters() };
    let results = solver.solve_all(&specs, &NoClock)?;
    let total = assemble_total(&results, cfg.electron_tolerance)?;
    let e_core = specs[0].integrals.e_core();
    let e_core = specs.iter().all(|s| s.integrals.e_core() == e_core).then_some(e_core);
    let fragments = files
        .iter()
        .zip(&results)
        .map(|((path, f), r)| FragmentOutput {
            id: r.id.clone(),
            path: path.clone(),
            spin_mode: f.spec.spin.name().into(),
            n_qubits: f.spec.n_qubits(),
            energy: r.energy,
            electrons: r.electrons,
            electron_target: r.electron_target,
            vqe_energy: r.vqe_energy,
            vqe_converged: r.vqe_converged,
            evaluations: r.evaluations,
        })
        .collect();
    let failure = (cfg.require_converged && !total.converged).then(|| {
        Error::Format(format!(
            "DMET electron count {:.8} misses target {:.8} by more than {:e}",
            total.electrons, total.electron_target, cfg.electron_tolerance
        ))
    });
    let out = DmetOutput {
        fragments,
        energy: total.energy,
        e_core,
        electrons: total.electrons,
        electron_target: total.electron_target,
        electron_tolerance: cfg.electron_tolerance,
        converged: total.converged,
        timings: Timings { setup_seconds, wall_seconds: start.elapsed().as_secs_f64() },
    };
    Ok((Output::RunDmet(out), failure))
}

fn bench_chain(cfg: &RunConfig) -> Result<bench::ScalingReport> {
    let report = match cfg.metric {
        Metric::Terms => {
            let sizes = if cfg.sizes.is_empty() { vec![6, 12, 24] } else { cfg.sizes.clone() };
            bench::term_count_scaling(&sizes, fixtures::load_chain)?
        }
        Metric::Time => {
            let sizes = if cfg.sizes.is_empty() { vec![4, 6, 8] } else { cfg.sizes.clone() };
            let timing = TimingConfig {
                max_bond: cfg.max_bond,
                repetitions: cfg.repetitions,
                seed: cfg.seed,
                window: cfg.pool_window,
                backend: cfg.backend()?,
            };
            bench::iteration_time_scaling(&sizes, &timing, fixtures::load_chain)?
        }
    };
    if let Some(path) = &cfg.csv {
        std::fs::write(path, report.to_csv()).map_err(|e| Error::io(path, e))?;
    }
    Ok(report)
}

fn svd_bench(cfg: &RunConfig) -> Result<SvdBenchOutput> {
    let sizes = if cfg.sizes.is_empty() { vec![16, 32, 64, 128] } else { cfg.sizes.clone() };
    let backends: Vec<_> = cfg
        .backends
        .iter()
        .map(|b| mpsvqe_core::linalg::SvdBackend::from_name(b).expect("validated backend"))
        .collect();
    let rows = bench::svd_bench(&sizes, &backends, cfg.repetitions, cfg.seed)?;
    if let Some(path) = &cfg.csv {
        std::fs::write(path, bench::svd_bench_csv(&rows)).map_err(|e| Error::io(path, e))?;
    }
    Ok(SvdBenchOutput { rows })
}

fn flop_model(cfg: &RunConfig) -> Result<FlopOutput> {
    let file = match (&cfg.hamiltonian, cfg.atoms) {
        (Some(path), _) => HamiltonianFile::read(path)?,
        (None, Some(atoms)) => fixtures::load_chain(atoms)?,
        (None, None) => return Err(Error::Usage("flop-model needs --hamiltonian or --atoms".into())),
    };
    let problem = bench::pool_problem(&file, cfg.mps_config()?, cfg.pool_window)?;
    let params =
        InitialParameters::Uniform { half_width: std::f64::consts::PI, seed: cfg.seed }.generate(problem.n_params());
    let circuit = problem.circuit(&params)?;
    let model = FlopModel { bonds: cfg.bond_model, ..FlopModel::default() };
    let estimate = bench::flop_estimate(&circuit, cfg.max_bond, &model);
    Ok(FlopOutput {
        n_qubits: circuit.n_qubits(),
        n_params: problem.n_params(),
        max_bond: cfg.max_bond,
        bond_model: cfg.bond_model,
        gates: circuit.len(),
        two_qubit_gates: circuit.two_qubit_count(),
        total: estimate.total(),
        estimate,
    })
}

fn dump_circuit(cfg: &RunConfig) -> Result<CircuitOutput> {
    let file = load_hamiltonian(cfg)?;
    let (problem, _) = vqe_problem(cfg, &file)?;
    let params = cfg.initial_parameters().generate(problem.n_params());
    let c = problem.circuit(&params)?;
    Ok(CircuitOutput {
        n_qubits: c.n_qubits(),
        n_params: problem.n_params(),
        gates: c.len(),
        two_qubit_gates: c.two_qubit_count(),
        template: template::to_text(problem.template()),
        circuit: circuit::dump(&c),
        params,
    })
}

fn validate_hamiltonian(cfg: &RunConfig) -> Result<Outcome> {
    let path = required(&cfg.hamiltonian, "hamiltonian")?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file = HamiltonianFile::read(path)?;
    let canonical = file.to_string() == text;
    let n_qubits = 2 * file.n_orbitals();
    let h = molecular_qubit_hamiltonian(&file.integrals)?;
    let hf_energy = basis_energy(&h, &file.hf_bitstring())?;
    let fci_energy = if n_qubits <= VALIDATION_MAX_QUBITS.min(MAX_DENSE_QUBITS) {
        let n_alpha = file.n_electrons.div_ceil(2);
        Some(sector_ground_state(&h, n_qubits, n_alpha, file.n_electrons - n_alpha)?.0)
    } else {
        None
    };
    let recorded_hf_energy = file.metadata_f64("hf_energy");
    let recorded_fci_energy = file.metadata_f64("fci_energy");
    let agrees = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() < VALIDATION_TOLERANCE,
        _ => true,
    };
    let hf_ok = agrees(Some(hf_energy), recorded_hf_energy);
    let fci_ok = agrees(fci_energy, recorded_fci_energy);
    let consistent = canonical && hf_ok && fci_ok;
    let failure = (!consistent).then(|| {
        let mut why = Vec::new();
        if !canonical {
            why.push("file is not in canonical form");
        }
        if !hf_ok {
            why.push("hf_energy disagrees with the reference determinant");
        }
        if !fci_ok {
            why.push("fci_energy disagrees with dense diagonalization");
        }
        Error::Format(format!("{}: {}", path.display(), why.join("; ")))
    });
    let out = ValidationOutput {
        n_orbitals: file.n_orbitals(),
        n_electrons: file.n_electrons,
        n_qubits,
        n_terms: h.len(),
        e_core: file.integrals.e_core(),
        hf_bitstring: file.hf_bitstring(),
        canonical,
        hf_energy,
        recorded_hf_energy,
        fci_energy,
        recorded_fci_energy,
        tolerance: VALIDATION_TOLERANCE,
        consistent,
    };
    Ok((Output::ValidateHamiltonian(out), failure))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(std::iter::once("mpsvqe").chain(args.iter().copied())).unwrap().command
    }

    #[test]
    fn flags_override_set_and_file() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("run.conf");
        std::fs::write(&conf, "max_bond = 16\nseed = 4\nansatz = pool\n").unwrap();
        let conf = conf.to_str().unwrap();
        let cmd = parse(&["run-vqe", "--config", conf, "--set", "max_bond=24", "--set", "seed=5", "--max-bond", "32"]);
        let cfg = cmd.resolve().unwrap();
        assert_eq!((cfg.max_bond, cfg.seed, cfg.ansatz), (32, 5, AnsatzChoice::Pool));
    }

    #[test]
    fn bad_settings_are_usage_errors() {
        for args in [
            &["run-vqe", "--max-bond", "many"][..],
            &["run-vqe", "--set", "colour=blue"],
            &["run-vqe", "--set", "max_bond"],
            &["svd-bench", "--backends", "jacobi,lapack"],
            &["run-dmet", "--optimizer", "adam"],
        ] {
            let err = parse(args).resolve().unwrap_err();
            assert_eq!(exit_code(&err), 2, "{args:?}: {err}");
        }
    }

    #[test]
    fn missing_inputs() {
        let cfg = parse(&["run-vqe"]).resolve().unwrap();
        assert!(matches!(run_vqe(&cfg), Err(Error::Usage(_))));
        let cfg = parse(&["run-vqe", "--hamiltonian", "/nonexistent/h.ham"]).resolve().unwrap();
        let err = run_vqe(&cfg).unwrap_err();
        assert_eq!(exit_code(&err), 1);
        assert!(err.to_string().contains("/nonexistent/h.ham"));
    }

    #[test]
    fn dump_and_flops_on_fixture() {
        let ham = fixtures::fixture_path("h2_sto3g_0.7414.ham");
        let cfg = parse(&["dump-circuit", "--hamiltonian", ham.to_str().unwrap()]).resolve().unwrap();
        let out = dump_circuit(&cfg).unwrap();
        assert_eq!((out.n_qubits, out.n_params), (4, 3));
        assert!(out.circuit.starts_with("n_qubits 4\n"));
        assert_eq!(template::from_text(&out.template).unwrap().n_params(), 3);
        let cfg = parse(&["flop-model", "--atoms", "4", "--max-bond", "8"]).resolve().unwrap();
        let flops = flop_model(&cfg).unwrap();
        assert_eq!(flops.n_qubits, 8);
        assert!(flops.total > 0.0 && flops.total == flops.estimate.total());
    }

    #[test]
    fn bundled_fixtures_validate() {
        for name in ["h2_sto3g_0.7414.ham", "h2_sto3g_2.4000.ham", "hchain_04_sto3g.ham", "hchain_06_sto3g.ham"] {
            let path = fixtures::fixture_path(name);
            let cfg = parse(&["validate-hamiltonian", "--hamiltonian", path.to_str().unwrap()]).resolve().unwrap();
            let (out, failure) = validate_hamiltonian(&cfg).unwrap();
            let Output::ValidateHamiltonian(v) = out else { unreachable!() };
            assert!(failure.is_none(), "{name}: {v:?}");
            assert!(v.canonical && v.consistent && v.fci_energy.is_some());
        }
    }
}
