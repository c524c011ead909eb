//! Sample-complexity calculators and executable checks of the analysis.
//!
//! The calculators return real-valued sample counts; callers round up.
//! The checks evaluate each intermediate inequality of the error analysis
//! on concrete models, either exactly (by enumeration) or by Monte Carlo.
//! Monte Carlo trial `t` under root seed `s` uses seed `derive_seed(s, t)`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::IsingModel;
use crate::numeric::{l1_norm, l2_norm, linf_norm, min_symmetric_eigenvalue, quadratic_form};
use crate::objective::{
    f_lower_bound_check, iso_gradient, iso_value, taylor_remainder, CouplingVector, NodeView,
};
use crate::rng::{derive_seed, rng_from_seed, RNG_ALGORITHM};
use crate::sampler::{empirical_covariance, SampleSet, SamplerKind};

/// Graph and coupling parameters that every bound depends on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub p: usize,
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(p: usize, d: usize, alpha: f64, beta: f64) -> Result<Self> {
        if p < 2 {
            return Err(Error::input(format!("bounds need p >= 2, got {p}")));
        }
        if d == 0 || d > p - 1 {
            return Err(Error::input(format!(
                "degree d = {d} must lie in [1, p - 1]"
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite() && beta.is_finite()) || alpha > beta {
            return Err(Error::input(format!(
                "need 0 < alpha <= beta, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(ModelParams { p, d, alpha, beta })
    }

    pub fn of_model(model: &IsingModel) -> Result<Self> {
        match (model.min_coupling(), model.max_coupling()) {
            (Some(alpha), Some(beta)) => Self::new(model.p(), model.max_degree(), alpha, beta),
            _ => Err(Error::input(
                "model has no edges; alpha and beta are undefined",
            )),
        }
    }

    fn beta_d(&self) -> f64 {
        self.beta * self.d as f64
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::input(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

/// Information-theoretic lower bound on the number of samples, with its branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    /// `e^{beta d} ln(p d / 4 - 1) / (4 d alpha e^alpha)`, present when `p d / 4 - 1 > 1`.
    pub degree_branch: Option<f64>,
    /// `ln p / (2 alpha tanh alpha)`.
    pub coupling_branch: f64,
}

pub fn info_lower_bound(params: &ModelParams) -> Result<LowerBound> {
    let ModelParams { p, d, alpha, .. } = *params;
    let (pf, df) = (p as f64, d as f64);
    let log_arg = pf * df / 4.0 - 1.0;
    let degree_branch = (log_arg > 1.0)
        .then(|| params.beta_d().exp() * log_arg.ln() / (4.0 * df * alpha * alpha.exp()));
    let coupling_branch = pf.ln() / (2.0 * alpha * alpha.tanh());
    Ok(LowerBound {
        value: degree_branch.map_or(coupling_branch, |b| b.max(coupling_branch)),
        degree_branch,
        coupling_branch,
    })
}

/// Sample count above which an (intractable) exhaustive-search reconstruction
/// exists. `log p` is read as the natural logarithm.
pub fn existence_upper_bound(params: &ModelParams, epsilon: f64) -> Result<f64> {
    existence_upper_bound_with_log(params, epsilon, f64::ln)
}

/// Same bound with `log p` read as base 2.
pub fn existence_upper_bound_log2(params: &ModelParams, epsilon: f64) -> Result<f64> {
    existence_upper_bound_with_log(params, epsilon, f64::log2)
}

fn existence_upper_bound_with_log(
    params: &ModelParams,
    epsilon: f64,
    log: fn(f64) -> f64,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    let bd = params.beta_d();
    let ratio = bd * (3.0 * (2.0 * bd).exp() + 1.0) / (params.alpha / 4.0).sinh().powi(2);
    Ok(ratio * ratio * (16.0 * log(params.p as f64) + 4.0 * (2.0 / epsilon).ln()))
}

/// Samples sufficient for the single-node coupling error guarantee.
pub fn coupling_sample_requirement(params: &ModelParams, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let (pf, df) = (params.p as f64, params.d as f64);
    Ok(2f64.powi(14)
        * df
        * df
        * (df + 1.0).powi(2)
        * (6.0 * params.beta_d()).exp()
        * (3.0 * pf * pf / epsilon).ln())
}

/// The l2 coupling-error bound that holds with probability `1 - epsilon` at `n` samples.
pub fn coupling_error_bound(params: &ModelParams, n: usize, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let df = params.d as f64;
    let log_term = (3.0 * params.p as f64 / epsilon).ln();
    Ok(2f64.powi(8)
        * df.sqrt()
        * (df + 1.0)
        * (3.0 * params.beta_d()).exp()
        * (log_term / n as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureBranch {
    /// `d / 16` dominates.
    Degree,
    /// `alpha^-2` dominates.
    InverseAlphaSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StructureRequirement {
    pub value: f64,
    pub branch: StructureBranch,
    /// Everything except the `ln(3 p^3 / epsilon)` factor.
    pub prefactor: f64,
    /// Coefficient of `ln p` for large `p`: three times the prefactor.
    pub ln_p_coefficient: f64,
}

/// Samples sufficient for exact structure recovery.
pub fn structure_sample_requirement(
    params: &ModelParams,
    epsilon: f64,
) -> Result<StructureRequirement> {
    check_epsilon(epsilon)?;
    let (pf, df) = (params.p as f64, params.d as f64);
    let degree = df / 16.0;
    let inv_alpha_sq = params.alpha.powi(-2);
    let branch = if degree > inv_alpha_sq {
        StructureBranch::Degree
    } else {
        StructureBranch::InverseAlphaSquared
    };
    let prefactor = degree.max(inv_alpha_sq)
        * 2f64.powi(18)
        * df
        * (df + 1.0).powi(2)
        * (6.0 * params.beta_d()).exp();
    Ok(StructureRequirement {
        value: prefactor * (3.0 * pf.powi(3) / epsilon).ln(),
        branch,
        prefactor,
        ln_p_coefficient: 3.0 * prefactor,
    })
}

/// High-probability bound on `||grad S(theta*)||_inf`: `2 sqrt(ln(2p / eps) / n)`.
pub fn gradient_concentration_bound(p: usize, n: usize, epsilon3: f64) -> Result<f64> {
    check_epsilon(epsilon3)?;
    if p < 2 || n == 0 {
        return Err(Error::input("gradient bound needs p >= 2 and n >= 1"));
    }
    Ok(2.0 * ((2.0 * p as f64 / epsilon3).ln() / n as f64).sqrt())
}

/// Whether `n >= e^{2 beta d} ln(2p / eps)`, the regime where the gradient bound applies.
pub fn gradient_bound_applies(p: usize, n: usize, epsilon3: f64, beta_d: f64) -> bool {
    n as f64 >= (2.0 * beta_d).exp() * (2.0 * p as f64 / epsilon3).ln()
}

/// Samples under which restricted strong convexity holds with probability `1 - eps4`.
pub fn rsc_sample_requirement(params: &ModelParams, epsilon4: f64) -> Result<f64> {
    check_epsilon(epsilon4)?;
    let (pf, df) = (params.p as f64, params.d as f64);
    Ok(2f64.powi(11)
        * df
        * df
        * (df + 1.0).powi(2)
        * (4.0 * params.beta_d()).exp()
        * (pf * pf / epsilon4).ln())
}

/// Restricted strong convexity constant `e^{-3 beta d} / (4 (d+1) (1 + 2 sqrt(d) R))`.
pub fn rsc_constant(beta: f64, d: usize, radius: f64) -> f64 {
    let df = d as f64;
    (-3.0 * beta * df).exp() / (4.0 * (df + 1.0) * (1.0 + 2.0 * df.sqrt() * radius))
}

/// `(beta, d)` of a model, with `beta = 0` for an empty edge set.
fn beta_and_degree(model: &IsingModel) -> (f64, usize) {
    (model.max_coupling().unwrap_or(0.0), model.max_degree())
}

/// Population moments `(E[X_ul(theta*)], E[X_ul(theta*)^2])` for every `l != u`,
/// computed by enumeration.
pub fn screening_moments(model: &IsingModel, u: usize) -> Result<Vec<(f64, f64)>> {
    model.check_vertex(u)?;
    let dist = model.exact_distribution()?;
    let view = NodeView::from_distribution(&dist, u)?;
    let truth = CouplingVector::new(model.node_couplings(u)?)?;
    let mean = iso_gradient(&view, &truth)?;
    // X_ul^2 = exp(-2 <theta*, x>), which is the objective at 2 theta*.
    let doubled = CouplingVector::new(truth.values().iter().map(|t| 2.0 * t).collect())?;
    let second = iso_value(&view, &doubled)?;
    Ok(mean.values().iter().map(|&m| (m, second)).collect())
}

/// Largest `|X_ul(theta*)|` over all samples and all `u`, `l`.
pub fn max_screening_magnitude(samples: &SampleSet, model: &IsingModel) -> Result<f64> {
    if samples.p() != model.p() {
        return Err(Error::input("samples and model disagree on p"));
    }
    let adjacency = model.neighbors();
    let mut worst: f64 = 0.0;
    for row in samples.rows() {
        for (u, nbrs) in adjacency.iter().enumerate() {
            let z: f64 = nbrs
                .iter()
                .map(|&(i, t)| t * f64::from(row[u] * row[i]))
                .sum();
            worst = worst.max((-z).exp());
        }
    }
    Ok(worst)
}

/// Both sides of the deterministic remainder bound
/// `dS(delta) >= e^{-beta d} / (2 + ||delta||_1) * delta^T H^n delta`.
pub fn remainder_bound_sides(
    view: &NodeView,
    truth: &CouplingVector,
    delta: &CouplingVector,
    covariance: &[Vec<f64>],
    beta_d: f64,
) -> Result<(f64, f64)> {
    let lhs = taylor_remainder(view, truth, delta)?;
    let rhs = (-beta_d).exp() / (2.0 + l1_norm(delta.values()))
        * quadratic_form(covariance, delta.values());
    Ok((lhs, rhs))
}

/// Smallest eigenvalue of the exact covariance with `u` removed, and the
/// lower bound `e^{-2 beta d} / (d + 1)`.
pub fn min_eigenvalue_check(model: &IsingModel, u: usize) -> Result<(f64, f64)> {
    model.check_vertex(u)?;
    let corr = model.exact_correlations()?;
    let reduced: Vec<Vec<f64>> = (0..model.p())
        .filter(|&i| i != u)
        .map(|i| {
            (0..model.p())
                .filter(|&j| j != u)
                .map(|j| corr[i][j])
                .collect()
        })
        .collect();
    let (beta, d) = beta_and_degree(model);
    Ok((
        min_symmetric_eigenvalue(&reduced),
        (-2.0 * beta * d as f64).exp() / (d as f64 + 1.0),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RscReport {
    pub trials: usize,
    pub radius: f64,
    pub kappa: f64,
    /// Minimum over trials of `dS(delta) / (kappa ||delta||_2^2)`; at least 1 when all pass.
    pub worst_ratio: f64,
    pub violations: usize,
}

/// Smallest norm of a tested direction.
pub const RSC_MIN_NORM: f64 = 1e-3;

/// Draws `trials` random `delta` in the cone `||delta||_1 <= 4 sqrt(d) ||delta||_2`
/// with `||delta||_2` log-uniform in `[1e-3, R]`, `R = 2 / sqrt(d)`, and compares the
/// Taylor remainder at the true couplings against the strong convexity constant.
pub fn rsc_check(
    view: &NodeView,
    model: &IsingModel,
    u: usize,
    trials: usize,
    seed: u64,
) -> Result<RscReport> {
    if trials == 0 {
        return Err(Error::input("rsc_check needs at least one trial"));
    }
    if view.u() != u || view.dim() + 1 != model.p() {
        return Err(Error::input(
            "view does not match the model and focal vertex",
        ));
    }
    let (beta, d) = beta_and_degree(model);
    let d_eff = d.max(1);
    let radius = 2.0 / (d_eff as f64).sqrt();
    let kappa = rsc_constant(beta, d, radius);
    let truth = CouplingVector::new(model.node_couplings(u)?)?;
    let dim = view.dim();
    let cone = 4.0 * (d_eff as f64).sqrt();
    let mut rng = rng_from_seed(seed);
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for trial in 0..trials {
        let mut direction = vec![0.0; dim];
        if trial % 2 == 0 {
            for v in direction.iter_mut() {
                *v = 2.0 * rng.random::<f64>() - 1.0;
            }
        }
        if trial % 2 == 1
            || l1_norm(&direction) > cone * l2_norm(&direction)
            || l2_norm(&direction) == 0.0
        {
            // At most d nonzeros: inside the cone by Cauchy-Schwarz.
            direction.iter_mut().for_each(|v| *v = 0.0);
            for _ in 0..d_eff.min(dim) {
                let k = rng.random_range(0..dim);
                direction[k] = 2.0 * rng.random::<f64>() - 1.0;
            }
            if l2_norm(&direction) == 0.0 {
                direction[0] = 1.0;
            }
        }
        let norm =
            (RSC_MIN_NORM.ln() + rng.random::<f64>() * (radius.ln() - RSC_MIN_NORM.ln())).exp();
        let scale = norm / l2_norm(&direction);
        let delta = CouplingVector::new(direction.iter().map(|v| v * scale).collect())?;
        let remainder = taylor_remainder(view, &truth, &delta)?;
        let ratio = remainder / (kappa * norm * norm);
        if ratio < 1.0 {
            violations += 1;
        }
        worst = worst.min(ratio);
    }
    Ok(RscReport {
        trials,
        radius,
        kappa,
        worst_ratio: worst,
        violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExceedanceReport {
    pub runs: usize,
    pub exceedances: usize,
    pub bound: f64,
    /// `epsilon3 + 3 sqrt(epsilon3 (1 - epsilon3) / runs)`.
    pub allowed_frequency: f64,
    pub applies: bool,
}

impl ExceedanceReport {
    pub fn frequency(&self) -> f64 {
        self.exceedances as f64 / self.runs as f64
    }

    pub fn passed(&self) -> bool {
        self.frequency() <= self.allowed_frequency
    }
}

/// Monte Carlo frequency with which `||grad S(theta*_u)||_inf` exceeds the
/// gradient concentration bound over `runs` independent sample sets of size `n`.
pub fn gradient_exceedance(
    model: &IsingModel,
    u: usize,
    n: usize,
    epsilon3: f64,
    runs: usize,
    sampler: SamplerKind,
    seed: u64,
) -> Result<ExceedanceReport> {
    if runs == 0 {
        return Err(Error::input("need at least one run"));
    }
    let bound = gradient_concentration_bound(model.p(), n, epsilon3)?;
    let truth = CouplingVector::new(model.node_couplings(u)?)?;
    let norms = (0..runs)
        .into_par_iter()
        .map(|run| {
            let samples = sampler.draw(model, n, derive_seed(seed, run as u64))?;
            let view = NodeView::new(&samples, u)?;
            Ok(linf_norm(iso_gradient(&view, &truth)?.values()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (beta, d) = beta_and_degree(model);
    Ok(ExceedanceReport {
        runs,
        exceedances: norms.iter().filter(|&&g| g > bound).count(),
        bound,
        allowed_frequency: epsilon3 + 3.0 * (epsilon3 * (1.0 - epsilon3) / runs as f64).sqrt(),
        applies: gradient_bound_applies(model.p(), n, epsilon3, beta * d as f64),
    })
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub name: String,
    pub pass: bool,
    pub statistic: f64,
    pub bound: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub rng: &'static str,
    pub p: usize,
    pub max_degree: usize,
    pub beta: f64,
    pub all_passed: bool,
    pub oracles: Vec<OracleResult>,
}

/// Sizes used by [`verify`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Samples per generated sample set.
    pub n: usize,
    /// Monte Carlo sample sets for the gradient concentration check.
    pub gradient_runs: usize,
    /// Random directions for the remainder and strong convexity checks.
    pub delta_draws: usize,
    pub epsilon3: f64,
    /// Points in the `f(z)` grid over `[-30, 30]`.
    pub f_grid_points: usize,
    /// Enumeration-based checks are skipped above this `p`.
    pub max_exact_p: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n: 10_000,
            gradient_runs: 200,
            delta_draws: 1000,
            epsilon3: 0.1,
            f_grid_points: 10_000,
            max_exact_p: 16,
        }
    }
}

/// Relative tolerance for the deterministic remainder inequality.
pub const REMAINDER_REL_TOL: f64 = 1e-10;
/// Absolute tolerance for the exact screening identities.
pub const SCREENING_TOL: f64 = 1e-12;

/// Runs every oracle that applies to `model` and collects the outcomes.
pub fn verify(
    model: &IsingModel,
    seed: u64,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let p = model.p();
    if p < 2 {
        return Err(Error::input("verification needs at least two spins"));
    }
    let (beta, d) = beta_and_degree(model);
    let beta_d = beta * d as f64;
    let exact = p <= options.max_exact_p.min(crate::model::MAX_ENUMERATION_SPINS);
    let sampler = if exact {
        SamplerKind::Exact
    } else {
        SamplerKind::Glauber {
            burn_in_sweeps: 1000,
            thinning_sweeps: 10,
        }
    };
    let mut oracles = Vec::new();
    let mut push =
        |name: &str, pass: bool, statistic: f64, bound: f64, seed: u64, note: Option<String>| {
            oracles.push(OracleResult {
                name: name.to_string(),
                pass,
                statistic,
                bound,
                seed,
                note,
            })
        };

    if exact {
        let mut worst_mean: f64 = 0.0;
        let mut worst_var: f64 = 0.0;
        for u in 0..p {
            for (m, v) in screening_moments(model, u)? {
                worst_mean = worst_mean.max(m.abs());
                worst_var = worst_var.max((v - 1.0).abs());
            }
        }
        push(
            "screening_mean_zero",
            worst_mean <= SCREENING_TOL,
            worst_mean,
            SCREENING_TOL,
            seed,
            None,
        );
        push(
            "screening_variance_one",
            worst_var <= SCREENING_TOL,
            worst_var,
            SCREENING_TOL,
            seed,
            None,
        );

        let mut worst_gap = f64::INFINITY;
        let mut worst_eig = f64::INFINITY;
        let mut eig_bound = 0.0;
        for u in 0..p {
            let (eig, bound) = min_eigenvalue_check(model, u)?;
            if eig - bound < worst_gap {
                worst_gap = eig - bound;
                worst_eig = eig;
                eig_bound = bound;
            }
        }
        push(
            "covariance_min_eigenvalue",
            worst_gap >= 0.0,
            worst_eig,
            eig_bound,
            seed,
            None,
        );
    } else {
        let note = Some(format!(
            "skipped: p = {p} above exact limit {}",
            options.max_exact_p
        ));
        push(
            "screening_mean_zero",
            true,
            f64::NAN,
            SCREENING_TOL,
            seed,
            note.clone(),
        );
        push(
            "screening_variance_one",
            true,
            f64::NAN,
            SCREENING_TOL,
            seed,
            note.clone(),
        );
        push(
            "covariance_min_eigenvalue",
            true,
            f64::NAN,
            f64::NAN,
            seed,
            note,
        );
    }

    let sample_seed = derive_seed(seed, 0);
    let samples = sampler.draw(model, options.n, sample_seed)?;
    let support = max_screening_magnitude(&samples, model)?;
    let support_bound = beta_d.exp();
    push(
        "gradient_support",
        support <= support_bound * (1.0 + 1e-12),
        support,
        support_bound,
        sample_seed,
        None,
    );

    let points = options.f_grid_points.max(2);
    let mut f_violations = 0usize;
    let mut f_worst = f64::INFINITY;
    for k in 0..points {
        let z = -30.0 + 60.0 * k as f64 / (points - 1) as f64;
        let (f, lower) = f_lower_bound_check(z);
        if f < lower {
            f_violations += 1;
        }
        f_worst = f_worst.min(f - lower);
    }
    push(
        "taylor_function_lower_bound",
        f_violations == 0,
        f_worst,
        0.0,
        seed,
        None,
    );

    let delta_seed = derive_seed(seed, 1);
    let mut rng = rng_from_seed(delta_seed);
    let views: Vec<NodeView> = (0..p)
        .map(|u| NodeView::new(&samples, u))
        .collect::<Result<_>>()?;
    let covariances: Vec<Vec<Vec<f64>>> = (0..p)
        .map(|u| empirical_covariance(&samples, u))
        .collect::<Result<_>>()?;
    let truths: Vec<CouplingVector> = (0..p)
        .map(|u| CouplingVector::new(model.node_couplings(u)?))
        .collect::<Result<_>>()?;
    let mut l5_violations = 0usize;
    let mut l5_worst = f64::INFINITY;
    for draw in 0..options.delta_draws {
        let u = draw % p;
        let scale = 10f64.powf(-3.0 + 4.0 * rng.random::<f64>());
        let delta = CouplingVector::new(
            (0..p - 1)
                .map(|_| scale * (2.0 * rng.random::<f64>() - 1.0))
                .collect(),
        )?;
        let (lhs, rhs) =
            remainder_bound_sides(&views[u], &truths[u], &delta, &covariances[u], beta_d)?;
        if lhs < rhs * (1.0 - REMAINDER_REL_TOL) {
            l5_violations += 1;
        }
        if rhs > 0.0 {
            l5_worst = l5_worst.min(lhs / rhs);
        }
    }
    push(
        "taylor_remainder_lower_bound",
        l5_violations == 0,
        l5_worst,
        1.0,
        delta_seed,
        None,
    );

    let gradient_seed = derive_seed(seed, 2);
    let exceed = gradient_exceedance(
        model,
        0,
        options.n,
        options.epsilon3,
        options.gradient_runs,
        sampler,
        gradient_seed,
    )?;
    push(
        "gradient_concentration",
        exceed.passed(),
        exceed.frequency(),
        exceed.allowed_frequency,
        gradient_seed,
        (!exceed.applies).then(|| "n below the regime where the bound is guaranteed".to_string()),
    );

    let rsc_seed = derive_seed(seed, 3);
    let rsc = rsc_check(&views[0], model, 0, options.delta_draws, rsc_seed)?;
    let rsc_note = ModelParams::of_model(model)
        .and_then(|params| rsc_sample_requirement(&params, 0.1))
        .ok()
        .filter(|&needed| (options.n as f64) < needed)
        .map(|needed| format!("n below the guaranteed regime n >= {needed:.3e}"));
    push(
        "restricted_strong_convexity",
        rsc.violations == 0,
        rsc.worst_ratio,
        1.0,
        rsc_seed,
        rsc_note,
    );

    if let Ok(params) = ModelParams::of_model(model) {
        let eps = 0.05;
        let calculators = [
            ("info_lower_bound", info_lower_bound(&params)?.value, None),
            (
                "existence_upper_bound",
                existence_upper_bound(&params, eps)?,
                Some("natural log reading".to_string()),
            ),
            (
                "existence_upper_bound_log2",
                existence_upper_bound_log2(&params, eps)?,
                Some("base-2 log reading".to_string()),
            ),
            (
                "coupling_sample_requirement",
                coupling_sample_requirement(&params, eps)?,
                None,
            ),
            (
                "structure_sample_requirement",
                structure_sample_requirement(&params, eps)?.value,
                None,
            ),
        ];
        for (name, value, note) in calculators {
            push(
                name,
                value.is_finite() && value > 0.0,
                value,
                0.0,
                seed,
                note,
            );
        }
    }

    let all_passed = oracles.iter().all(|o| o.pass);
    Ok(VerificationReport {
        rng: RNG_ALGORITHM,
        p,
        max_degree: d,
        beta,
        all_passed,
        oracles,
    })
}
