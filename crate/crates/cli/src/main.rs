//! `ising-rise` command-line front end.
//!
//! Exit codes: 0 success, 1 a verification oracle failed, 2 input error,
//! 3 capability error, 4 solver non-convergence (output is still written).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ising_rise::estimator::{lambda_schedule, rise_fit, square_error, structure_rise, LambdaMode};
use ising_rise::experiment::{
    error_csv, nmin_csv, run_error_curve, run_nmin_search, ExperimentKind, ExperimentManifest,
    PRESETS,
};
use ising_rise::theory::{verify, VerifyOptions};
use ising_rise::{CouplingScheme, Error, IsingModel, SampleSet, SamplerKind, SolverConfig};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "ising-rise",
    version,
    about = "Learn zero-field Ising models with the interaction screening estimator"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a model JSON file.
    GenModel(GenModel),
    /// Draw samples from a model.
    Sample(Sample),
    /// Convert a sample file between text and binary.
    Convert(Convert),
    /// Fit the couplings around one node.
    Fit(Fit),
    /// Recover the edge set from samples.
    Learn(Learn),
    /// Run the verification oracles on a model.
    Verify(Verify),
    /// Search for the smallest sample size that recovers the structure.
    Nmin(Experiment),
    /// Mean node error against sample size.
    ErrorCurve(Experiment),
}

#[derive(Args)]
struct GenModel {
    /// Periodic square grid with this side.
    #[arg(long, conflicts_with = "random")]
    grid: Option<usize>,
    /// Random graph on this many spins.
    #[arg(long)]
    random: Option<usize>,
    /// Coupling magnitude (grid) or largest magnitude (random).
    #[arg(long)]
    beta: f64,
    /// Smallest magnitude for random models.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    edge_prob: f64,
    /// All couplings positive.
    #[arg(long, conflicts_with = "spin_glass")]
    ferro: bool,
    /// Random coupling signs; needs --seed.
    #[arg(long)]
    spin_glass: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SamplerFlags {
    #[arg(long, conflicts_with = "glauber")]
    exact: bool,
    #[arg(long)]
    glauber: bool,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    #[arg(long, default_value_t = 10)]
    thin: usize,
}

impl SamplerFlags {
    fn kind(&self, p: usize) -> SamplerKind {
        let glauber = SamplerKind::Glauber {
            burn_in_sweeps: self.burn_in,
            thinning_sweeps: self.thin,
        };
        match (self.exact, self.glauber) {
            (true, _) => SamplerKind::Exact,
            (_, true) => glauber,
            _ if p <= ising_rise::MAX_ENUMERATION_SPINS => SamplerKind::Exact,
            _ => glauber,
        }
    }
}

#[derive(Args)]
struct Sample {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    sampler: SamplerFlags,
    #[arg(long)]
    seed: u64,
    /// `.bin` writes the binary format, anything else text.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Convert {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Penalty {
    /// Explicit penalty.
    #[arg(long, conflicts_with = "epsilon")]
    lambda: Option<f64>,
    /// Failure probability for the penalty schedule.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 1e-7)]
    kkt_tolerance: f64,
    #[arg(long, default_value_t = 50_000)]
    max_iterations: usize,
}

impl Penalty {
    fn resolve(&self, p: usize, n: usize, mode: LambdaMode) -> ising_rise::Result<f64> {
        match self.lambda {
            Some(l) => Ok(l),
            None => lambda_schedule(p, n, self.epsilon.unwrap_or(0.05), mode),
        }
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            kkt_tolerance: self.kkt_tolerance,
            max_iterations: self.max_iterations,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args)]
struct Fit {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    node: usize,
    #[command(flatten)]
    penalty: Penalty,
    /// Ground truth, to report the l2 error.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Learn {
    #[arg(long)]
    samples: PathBuf,
    #[command(flatten)]
    penalty: Penalty,
    /// Threshold on |theta_ij + theta_ji|; defaults to the model's smallest coupling.
    #[arg(long)]
    threshold: Option<f64>,
    /// Ground truth, used for the default threshold and a recovery summary.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Verify {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: Option<usize>,
    /// Monte Carlo sample sets for the gradient concentration check.
    #[arg(long)]
    runs: Option<usize>,
    /// Random directions for the remainder checks.
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Experiment {
    /// Manifest JSON file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    manifest: Option<PathBuf>,
    /// Built-in manifest by name.
    #[arg(long)]
    preset: Option<String>,
    /// Root seed; overrides the manifest.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Experiment {
    fn manifest(&self) -> ising_rise::Result<ExperimentManifest> {
        let mut m = match (&self.manifest, &self.preset) {
            (Some(path), _) => ExperimentManifest::load(path)?,
            (None, Some(name)) => ExperimentManifest::preset(name, self.seed)
                .map_err(|e| Error::Input(format!("{e} (presets: {})", PRESETS.join(", "))))?,
            (None, None) => unreachable!("clap requires one of --manifest, --preset"),
        };
        m.seed = self.seed;
        if let Some(t) = self.trials {
            m.trials = t;
            m.required_successes = m.required_successes.map(|r| r.min(t));
        }
        if let Some(e) = self.epsilon {
            m.epsilon = e;
        }
        m.validate()?;
        Ok(m)
    }

    fn out(&self, m: &ExperimentManifest) -> Option<PathBuf> {
        self.out.clone().or_else(|| m.output.clone())
    }
}

enum Failure {
    Lib(Error),
    Unconverged,
    OracleFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn gen_model(a: &GenModel) -> Result<(), Failure> {
    let model = match (a.grid, a.random) {
        (Some(side), None) => {
            let scheme = if a.spin_glass {
                let seed = a
                    .seed
                    .ok_or_else(|| Error::Input("--spin-glass needs --seed".into()))?;
                CouplingScheme::SpinGlass { beta: a.beta, seed }
            } else {
                CouplingScheme::Ferromagnet { beta: a.beta }
            };
            IsingModel::grid(side, scheme)?
        }
        (None, Some(p)) => {
            let seed = a
                .seed
                .ok_or_else(|| Error::Input("--random needs --seed".into()))?;
            IsingModel::random(p, a.edge_prob, a.alpha.unwrap_or(a.beta), a.beta, seed)?
        }
        _ => return Err(Error::Input("give exactly one of --grid, --random".into()).into()),
    };
    model.save(&a.out)?;
    Ok(())
}

fn sample(a: &Sample) -> Result<(), Failure> {
    let model = IsingModel::load(&a.model)?;
    let samples = a.sampler.kind(model.p()).draw(&model, a.n, a.seed)?;
    samples.save(&a.out)?;
    Ok(())
}

fn fit(a: &Fit) -> Result<(), Failure> {
    let samples = SampleSet::load(&a.samples)?;
    let lambda = a
        .penalty
        .resolve(samples.p(), samples.n(), LambdaMode::Node)?;
    let est = rise_fit(&samples, a.node, lambda, &a.penalty.solver())?;
    let mut report = json!({
        "u": est.u,
        "lambda": est.lambda_used,
        "theta_hat": est.theta_hat.values(),
        "iterations": est.report.iterations,
        "kkt": est.report.final_kkt_residual,
        "objective": est.report.objective_value,
        "converged": est.report.converged,
        "saturated": est.report.saturated,
    });
    if let Some(path) = &a.model {
        let model = IsingModel::load(path)?;
        report["l2_error"] = json!(square_error(&est.theta_hat, &model, a.node)?);
    }
    write_output(
        a.out.as_deref(),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&report).map_err(Error::from)?
        ),
    )?;
    if est.report.converged {
        Ok(())
    } else {
        Err(Failure::Unconverged)
    }
}

fn learn(a: &Learn) -> Result<(), Failure> {
    let samples = SampleSet::load(&a.samples)?;
    let model = a.model.as_ref().map(IsingModel::load).transpose()?;
    let threshold = match (a.threshold, &model) {
        (Some(t), _) => t,
        (None, Some(m)) => m
            .min_coupling()
            .ok_or_else(|| Error::Input("model has no edges; pass --threshold".into()))?,
        (None, None) => {
            return Err(Error::Input("--threshold is required without --model".into()).into())
        }
    };
    let lambda = a
        .penalty
        .resolve(samples.p(), samples.n(), LambdaMode::Structure)?;
    let est = structure_rise(&samples, lambda, threshold, &a.penalty.solver())?;
    let text = serde_json::to_string_pretty(&est.to_json()).map_err(Error::from)?;
    write_output(a.out.as_deref(), &format!("{text}\n"))?;
    if let Some(m) = &model {
        eprintln!(
            "recovered {} edges; exact match with model: {}",
            est.edges.len(),
            est.edges.matches_model(m)
        );
    }
    if est.all_converged() {
        Ok(())
    } else {
        Err(Failure::Unconverged)
    }
}

fn run_verify(a: &Verify) -> Result<(), Failure> {
    let model = IsingModel::load(&a.model)?;
    let defaults = VerifyOptions::default();
    let options = VerifyOptions {
        n: a.n.unwrap_or(defaults.n),
        gradient_runs: a.runs.unwrap_or(defaults.gradient_runs),
        delta_draws: a.draws.unwrap_or(defaults.delta_draws),
        ..defaults
    };
    let report = verify(&model, a.seed, &options)?;
    let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    write_output(a.out.as_deref(), &format!("{text}\n"))?;
    if report.all_passed {
        Ok(())
    } else {
        Err(Failure::OracleFailed)
    }
}

fn nmin(a: &Experiment) -> Result<(), Failure> {
    let m = a.manifest()?;
    if m.kind == ExperimentKind::ErrorVsN {
        return Err(Error::Input("this manifest is an error curve; use error-curve".into()).into());
    }
    let rows = run_nmin_search(&m)?;
    write_output(a.out(&m).as_deref(), &nmin_csv(&rows))
}

fn error_curve(a: &Experiment) -> Result<(), Failure> {
    let m = a.manifest()?;
    let rows = run_error_curve(&m)?;
    write_output(a.out(&m).as_deref(), &error_csv(&rows))?;
    if rows.iter().all(|r| r.converged) {
        Ok(())
    } else {
        Err(Failure::Unconverged)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::GenModel(a) => gen_model(a),
        Command::Sample(a) => sample(a),
        Command::Convert(a) => SampleSet::load(&a.samples)
            .and_then(|s| s.save(&a.out))
            .map_err(Failure::from),
        Command::Fit(a) => fit(a),
        Command::Learn(a) => learn(a),
        Command::Verify(a) => run_verify(a),
        Command::Nmin(a) => nmin(a),
        Command::ErrorCurve(a) => error_curve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Unconverged) => {
            eprintln!("warning: solver did not reach the KKT tolerance");
            ExitCode::from(4)
        }
        Err(Failure::OracleFailed) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Capability(_) => 3,
                _ => 2,
            })
        }
    }
}
