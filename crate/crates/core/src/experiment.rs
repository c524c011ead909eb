//! Sample-complexity experiments: the `n_min` search over a swept parameter
//! and the error-versus-`n` curve.
//!
//! Seeds: row `r` of an experiment with root seed `s` uses `derive_seed(s, r)`,
//! and trial `t` of that row uses `derive_seed(derive_seed(s, r), t)`. The same
//! trial seeds are reused at every candidate `n`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{lambda_schedule, rise_fit, square_error, structure_rise, LambdaMode};
use crate::model::{CouplingScheme, IsingModel};
use crate::numeric::fit_slope;
use crate::rng::derive_seed;
use crate::sampler::{GlauberConfig, SamplerKind};
use crate::solver::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Sweep `p` over square tori; `values` are spin counts.
    NminVsP,
    /// Sweep the coupling magnitude; `values` are betas.
    NminVsBeta,
    /// Mean node error at each `n` in `values`.
    ErrorVsN,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ferromagnet,
    /// Fair random signs from `sign_seed`, shared by every swept value.
    SpinGlass,
}

/// How samples are drawn. `Auto` enumerates up to `exact_limit` spins and
/// runs Glauber dynamics with default settings above that.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SamplerChoice {
    Auto,
    Exact,
    Glauber {
        burn_in_sweeps: usize,
        thinning_sweeps: usize,
    },
}

impl SamplerChoice {
    pub fn resolve(&self, p: usize, exact_limit: usize) -> SamplerKind {
        match *self {
            SamplerChoice::Exact => SamplerKind::Exact,
            SamplerChoice::Glauber {
                burn_in_sweeps,
                thinning_sweeps,
            } => SamplerKind::Glauber {
                burn_in_sweeps,
                thinning_sweeps,
            },
            SamplerChoice::Auto if p <= exact_limit => SamplerKind::Exact,
            SamplerChoice::Auto => SamplerKind::Glauber {
                burn_in_sweeps: GlauberConfig::DEFAULT_BURN_IN,
                thinning_sweeps: GlauberConfig::DEFAULT_THINNING,
            },
        }
    }
}

/// Doubling then bisection over `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub n_start: usize,
    pub n_max: usize,
    /// Bisection stops once `(hi - lo) / hi` is at most this.
    pub relative_width: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_start: 1000,
            n_max: 1 << 24,
            relative_width: 0.1,
        }
    }
}

fn default_trials() -> usize {
    45
}
fn default_epsilon() -> f64 {
    0.05
}
fn default_side() -> usize {
    4
}
fn default_beta() -> f64 {
    0.7
}
fn default_sampler() -> SamplerChoice {
    SamplerChoice::Auto
}
fn default_exact_limit() -> usize {
    25
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub kind: ExperimentKind,
    pub family: Family,
    /// Swept values: spin counts, betas, or sample sizes depending on `kind`.
    pub values: Vec<f64>,
    /// Torus side when `p` is not swept.
    #[serde(default = "default_side")]
    pub side: usize,
    /// Coupling magnitude when beta is not swept.
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub sign_seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Successful trials needed at a candidate `n`; defaults to all of them.
    #[serde(default)]
    pub required_successes: Option<usize>,
    pub seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Threshold on the symmetrized sum; defaults to the model's minimum coupling.
    #[serde(default)]
    pub threshold: Option<f64>,
    /// Fixed penalty for error curves; defaults to the node schedule.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default = "default_sampler")]
    pub sampler: SamplerChoice,
    #[serde(default = "default_exact_limit")]
    pub exact_limit: usize,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub output: Option<std::path::PathBuf>,
}

impl ExperimentManifest {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let manifest: Self =
            serde_json::from_str(text).map_err(|e| Error::input(format!("bad manifest: {e}")))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::input("trial count must be at least 1"));
        }
        if self
            .required_successes
            .is_some_and(|r| r == 0 || r > self.trials)
        {
            return Err(Error::input("required_successes must lie in [1, trials]"));
        }
        if self.values.is_empty() {
            return Err(Error::input("manifest sweeps no values"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::input("epsilon must lie in (0, 1)"));
        }
        let s = &self.search;
        if s.n_start == 0
            || s.n_start > s.n_max
            || !(s.relative_width > 0.0 && s.relative_width < 1.0)
        {
            return Err(Error::input(
                "search needs 0 < n_start <= n_max and relative_width in (0, 1)",
            ));
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0) {
                return Err(Error::input("threshold must be positive"));
            }
        }
        for &v in &self.values {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::input(format!("swept value {v} must be positive")));
            }
            if matches!(self.kind, ExperimentKind::NminVsP) {
                let side = (v.sqrt().round()) as usize;
                if side * side != v as usize || v.fract() != 0.0 || side < 2 {
                    return Err(Error::input(format!(
                        "p = {v} is not the size of a square torus"
                    )));
                }
            }
            if matches!(self.kind, ExperimentKind::ErrorVsN) && v.fract() != 0.0 {
                return Err(Error::input(format!("sample size {v} is not an integer")));
            }
        }
        if self.side < 2 {
            return Err(Error::input("torus side must be at least 2"));
        }
        if let Some(solver) = &self.solver {
            solver.validate()?;
        }
        Ok(())
    }

    /// The model at swept value `value`.
    pub fn model_for(&self, value: f64) -> Result<IsingModel> {
        let (side, beta) = match self.kind {
            ExperimentKind::NminVsP => ((value.sqrt().round()) as usize, self.beta),
            ExperimentKind::NminVsBeta => (self.side, value),
            ExperimentKind::ErrorVsN => (self.side, self.beta),
        };
        let scheme = match self.family {
            Family::Ferromagnet => CouplingScheme::Ferromagnet { beta },
            Family::SpinGlass => CouplingScheme::SpinGlass {
                beta,
                seed: self.sign_seed,
            },
        };
        IsingModel::grid(side, scheme)
    }

    fn solver(&self) -> SolverConfig {
        self.solver.unwrap_or_default()
    }

    fn required(&self) -> usize {
        self.required_successes.unwrap_or(self.trials)
    }

    /// Built-in manifests.
    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        let base = |kind, family, values: Vec<f64>| ExperimentManifest {
            kind,
            family,
            values,
            side: 4,
            beta: 0.7,
            sign_seed: 0,
            trials: 45,
            required_successes: None,
            seed,
            epsilon: 0.05,
            threshold: None,
            lambda: None,
            sampler: SamplerChoice::Auto,
            exact_limit: 25,
            search: SearchConfig::default(),
            solver: None,
            output: None,
        };
        let manifest = match name {
            "beta-spin-glass-smoke" => ExperimentManifest {
                trials: 10,
                sampler: SamplerChoice::Exact,
                ..base(
                    ExperimentKind::NminVsBeta,
                    Family::SpinGlass,
                    vec![0.6, 0.9, 1.2],
                )
            },
            "beta-spin-glass" => ExperimentManifest {
                sampler: SamplerChoice::Exact,
                ..base(
                    ExperimentKind::NminVsBeta,
                    Family::SpinGlass,
                    vec![0.4, 0.6, 0.8, 1.0, 1.2, 1.4],
                )
            },
            "beta-ferro" => ExperimentManifest {
                sampler: SamplerChoice::Exact,
                ..base(
                    ExperimentKind::NminVsBeta,
                    Family::Ferromagnet,
                    vec![0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
                )
            },
            "p-ferro" => base(
                ExperimentKind::NminVsP,
                Family::Ferromagnet,
                vec![9.0, 16.0, 25.0],
            ),
            "p-ferro-smoke" => ExperimentManifest {
                trials: 10,
                ..base(
                    ExperimentKind::NminVsP,
                    Family::Ferromagnet,
                    vec![9.0, 16.0],
                )
            },
            "error-curve" => ExperimentManifest {
                beta: 0.5,
                trials: 4,
                ..base(
                    ExperimentKind::ErrorVsN,
                    Family::Ferromagnet,
                    vec![1e3, 4e3, 1.6e4, 6.4e4],
                )
            },
            other => {
                return Err(Error::input(format!(
                    "unknown preset {other:?}; known: {}",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(manifest)
    }
}

pub const PRESETS: &[&str] = &[
    "beta-spin-glass-smoke",
    "beta-spin-glass",
    "beta-ferro",
    "p-ferro",
    "p-ferro-smoke",
    "error-curve",
];

/// One swept parameter value of an `n_min` search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NminRow {
    pub param: f64,
    /// `None` when no candidate up to `n_max` succeeded.
    pub n_min: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub wall_seconds: f64,
    /// Every candidate tried, in order, with its outcome.
    pub evaluations: Vec<(usize, bool)>,
}

impl NminRow {
    pub fn resolved(&self) -> bool {
        self.n_min.is_some()
    }
}

/// Whether at least `required` of `trials` seeded runs at `n` recover the exact edge set.
pub fn recovery_succeeds(
    model: &IsingModel,
    n: usize,
    manifest: &ExperimentManifest,
    row_seed: u64,
) -> Result<bool> {
    let sampler = manifest.sampler.resolve(model.p(), manifest.exact_limit);
    let lambda = lambda_schedule(model.p(), n, manifest.epsilon, LambdaMode::Structure)?;
    let threshold = match manifest.threshold {
        Some(t) => t,
        None => model
            .min_coupling()
            .ok_or_else(|| Error::input("model has no edges to recover"))?,
    };
    let solver = manifest.solver();
    let required = manifest.required();
    let allowed_failures = manifest.trials - required;
    // Sequential over trials when all must pass, so a failure stops the rest.
    let run = |t: usize| -> Result<bool> {
        let samples = sampler.draw(model, n, derive_seed(row_seed, t as u64))?;
        Ok(structure_rise(&samples, lambda, threshold, &solver)?
            .edges
            .matches_model(model))
    };
    if allowed_failures == 0 {
        for t in 0..manifest.trials {
            if !run(t)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let outcomes = (0..manifest.trials)
        .into_par_iter()
        .map(run)
        .collect::<Result<Vec<bool>>>()?;
    Ok(outcomes.iter().filter(|&&ok| ok).count() >= required)
}

/// Smallest `n` (to the configured relative resolution) at which `succeeds` holds,
/// found by halving or doubling from `n_start` to a bracket and then bisecting.
pub fn search_nmin(
    search: &SearchConfig,
    mut succeeds: impl FnMut(usize) -> Result<bool>,
) -> Result<(Option<usize>, Vec<(usize, bool)>)> {
    let mut log = Vec::new();
    let mut test = |n: usize, log: &mut Vec<(usize, bool)>| -> Result<bool> {
        let ok = succeeds(n)?;
        log.push((n, ok));
        Ok(ok)
    };
    let mut n = search.n_start;
    let (mut lo, mut hi);
    if test(n, &mut log)? {
        hi = n;
        lo = 0;
        while hi > 1 {
            let half = hi / 2;
            if test(half, &mut log)? {
                hi = half;
            } else {
                lo = half;
                break;
            }
        }
    } else {
        lo = n;
        loop {
            if n >= search.n_max {
                return Ok((None, log));
            }
            n = (n * 2).min(search.n_max);
            if test(n, &mut log)? {
                hi = n;
                break;
            }
            lo = n;
        }
    }
    while hi - lo > 1 && (hi - lo) as f64 / hi as f64 > search.relative_width {
        let mid = lo + (hi - lo) / 2;
        if test(mid, &mut log)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((Some(hi), log))
}

/// Runs the `n_min` search for every swept value. Rows whose search exhausts
/// `n_max` are reported unresolved and the sweep continues.
pub fn run_nmin_search(manifest: &ExperimentManifest) -> Result<Vec<NminRow>> {
    manifest.validate()?;
    if manifest.kind == ExperimentKind::ErrorVsN {
        return Err(Error::input(
            "error_vs_n manifests are run by the error-curve harness",
        ));
    }
    let mut rows = Vec::with_capacity(manifest.values.len());
    for (r, &value) in manifest.values.iter().enumerate() {
        let start = Instant::now();
        let model = manifest.model_for(value)?;
        let row_seed = derive_seed(manifest.seed, r as u64);
        let (n_min, evaluations) = search_nmin(&manifest.search, |n| {
            recovery_succeeds(&model, n, manifest, row_seed)
        })?;
        rows.push(NminRow {
            param: value,
            n_min,
            trials: manifest.trials,
            seed: row_seed,
            wall_seconds: start.elapsed().as_secs_f64(),
            evaluations,
        });
    }
    Ok(rows)
}

pub const NMIN_CSV_HEADER: &str = "param,n_min,trials,success,seed,wall_seconds";

/// CSV with a leading `#` comment carrying the generation time. Unresolved
/// rows leave `n_min` empty and report `success` false.
pub fn nmin_csv(rows: &[NminRow]) -> String {
    let mut out = String::new();
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let _ = writeln!(out, "# generated at unix time {stamp}");
    let _ = writeln!(out, "{NMIN_CSV_HEADER}");
    for row in rows {
        let n_min = row.n_min.map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.3}",
            row.param,
            n_min,
            row.trials,
            row.resolved(),
            row.seed,
            row.wall_seconds
        );
    }
    out
}

/// Least-squares slope of `ln n_min` against the swept parameter, over resolved rows.
pub fn log_nmin_slope(rows: &[NminRow]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.n_min.map(|n| (r.param, (n as f64).ln())))
        .unzip();
    (x.len() >= 2).then(|| fit_slope(&x, &y))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRow {
    pub n: usize,
    /// Mean over trials and nodes of `||theta_hat_u - theta*_u||_2`.
    pub mean_error: f64,
    pub trials: usize,
    pub lambda: f64,
    pub converged: bool,
}

/// Fits every node at every `n` in `values`, averaging the l2 error over
/// nodes and trials. Trial `t` uses the same seed at every `n`.
pub fn run_error_curve(manifest: &ExperimentManifest) -> Result<Vec<ErrorRow>> {
    manifest.validate()?;
    if manifest.kind != ExperimentKind::ErrorVsN {
        return Err(Error::input("error curves need an error_vs_n manifest"));
    }
    let model = manifest.model_for(0.0)?;
    let p = model.p();
    let sampler = manifest.sampler.resolve(p, manifest.exact_limit);
    let solver = manifest.solver();
    let mut rows = Vec::with_capacity(manifest.values.len());
    for &value in &manifest.values {
        let n = value as usize;
        let lambda = match manifest.lambda {
            Some(l) => l,
            None => lambda_schedule(p, n, manifest.epsilon, LambdaMode::Node)?,
        };
        let per_trial = (0..manifest.trials)
            .into_par_iter()
            .map(|t| {
                let samples = sampler.draw(&model, n, derive_seed(manifest.seed, t as u64))?;
                let mut total = 0.0;
                let mut converged = true;
                for u in 0..p {
                    let fit = rise_fit(&samples, u, lambda, &solver)?;
                    converged &= fit.report.converged;
                    total += square_error(&fit.theta_hat, &model, u)?;
                }
                Ok((total / p as f64, converged))
            })
            .collect::<Result<Vec<(f64, bool)>>>()?;
        rows.push(ErrorRow {
            n,
            mean_error: per_trial.iter().map(|e| e.0).sum::<f64>() / manifest.trials as f64,
            trials: manifest.trials,
            lambda,
            converged: per_trial.iter().all(|e| e.1),
        });
    }
    Ok(rows)
}

pub const ERROR_CSV_HEADER: &str = "n,mean_l2_error,trials,lambda,converged";

pub fn error_csv(rows: &[ErrorRow]) -> String {
    let mut out = format!("{ERROR_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.17e},{},{:.17e},{}",
            r.n, r.mean_error, r.trials, r.lambda, r.converged
        );
    }
    out
}

/// Log-log slope of mean error against `n`.
pub fn error_slope(rows: &[ErrorRow]) -> f64 {
    let x: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean_error.ln()).collect();
    fit_slope(&x, &y)
}
