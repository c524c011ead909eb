//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Reference values are recomputed here
//! from raw samples or brute-force enumeration, independently of the library.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ising_rise::estimator::{lambda_schedule, structure_rise, LambdaMode};
use ising_rise::experiment::{
    error_slope, log_nmin_slope, run_error_curve, run_nmin_search, ExperimentManifest,
};
use ising_rise::numeric::min_symmetric_eigenvalue;
use ising_rise::objective::{iso_gradient, taylor_function, taylor_remainder};
use ising_rise::rng::{derive_seed, rng_from_seed};
use ising_rise::solver::kkt_residual;
use ising_rise::theory::{
    max_screening_magnitude, min_eigenvalue_check, screening_moments, structure_sample_requirement,
    ModelParams,
};
use ising_rise::{
    minimize, sample_exact, CouplingScheme, CouplingVector, IsingModel, NodeView, SampleSet,
    SolverConfig,
};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---- independent reference computations ----

/// Products `s_u s_i` for `i != u` of one row.
fn products(row: &[i8], u: usize) -> Vec<f64> {
    (0..row.len())
        .filter(|&i| i != u)
        .map(|i| f64::from(row[u] * row[i]))
        .collect()
}

fn raw_iso(samples: &SampleSet, u: usize, theta: &[f64]) -> f64 {
    samples
        .rows()
        .map(|r| {
            (-products(r, u)
                .iter()
                .zip(theta)
                .map(|(x, t)| x * t)
                .sum::<f64>())
            .exp()
        })
        .sum::<f64>()
        / samples.n() as f64
}

fn raw_gradient(samples: &SampleSet, u: usize, theta: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; theta.len()];
    for r in samples.rows() {
        let x = products(r, u);
        let e = (-x.iter().zip(theta).map(|(a, t)| a * t).sum::<f64>()).exp();
        for (gl, xl) in g.iter_mut().zip(&x) {
            *gl -= xl * e;
        }
    }
    g.iter().map(|v| v / samples.n() as f64).collect()
}

fn raw_covariance(samples: &SampleSet, u: usize) -> Vec<Vec<f64>> {
    let m = samples.p() - 1;
    let mut h = vec![vec![0.0; m]; m];
    for r in samples.rows() {
        let x: Vec<f64> = (0..r.len())
            .filter(|&i| i != u)
            .map(|i| f64::from(r[i]))
            .collect();
        for a in 0..m {
            for b in 0..m {
                h[a][b] += x[a] * x[b];
            }
        }
    }
    h.iter()
        .map(|row| row.iter().map(|v| v / samples.n() as f64).collect())
        .collect()
}

fn f_ref(z: f64) -> f64 {
    (-z).exp_m1() + z
}

/// Covariance of the spins other than `u` by direct summation over all states.
fn enumerated_covariance(model: &IsingModel, u: usize) -> Vec<Vec<f64>> {
    let p = model.p();
    let edges: Vec<((usize, usize), f64)> = model.edges().collect();
    let mut weights = Vec::with_capacity(1 << p);
    let mut energies = Vec::with_capacity(1 << p);
    for bits in 0u64..1 << p {
        let s = |i: usize| if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
        energies.push(
            edges
                .iter()
                .map(|&((i, j), t)| t * s(i) * s(j))
                .sum::<f64>(),
        );
    }
    let top = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    weights.extend(energies.iter().map(|e| (e - top).exp()));
    let z: f64 = weights.iter().sum();
    let others: Vec<usize> = (0..p).filter(|&i| i != u).collect();
    let mut h = vec![vec![0.0; p - 1]; p - 1];
    for (bits, w) in weights.iter().enumerate() {
        let s = |i: usize| if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
        for (a, &i) in others.iter().enumerate() {
            for (b, &j) in others.iter().enumerate() {
                h[a][b] += w / z * s(i) * s(j);
            }
        }
    }
    h
}

fn beta_and_d(model: &IsingModel) -> (f64, usize) {
    let beta = model.edges().map(|(_, t)| t.abs()).fold(0.0, f64::max);
    let d = (0..model.p())
        .map(|u| {
            model
                .edges()
                .filter(|&((i, j), _)| i == u || j == u)
                .count()
        })
        .max()
        .unwrap_or(0);
    (beta, d)
}

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

// ---- criteria ----

fn screening_identities() -> Outcome {
    let mut worst_mean: f64 = 0.0;
    let mut worst_second: f64 = 0.0;
    for seed in 0..20u64 {
        let p = 2 + (seed % 3) as usize;
        let model = IsingModel::random(p, 0.8, 0.05, 1.0, seed).unwrap();
        for u in 0..p {
            for (m, s) in screening_moments(&model, u).unwrap() {
                worst_mean = worst_mean.max(m.abs());
                worst_second = worst_second.max((s - 1.0).abs());
            }
        }
    }
    outcome(
        worst_mean <= 1e-12 && worst_second <= 1e-12,
        format!("max |E X| = {worst_mean:.2e}, max |E X^2 - 1| = {worst_second:.2e} (tol 1e-12)"),
    )
}

fn support_bound() -> Outcome {
    let model = IsingModel::grid(3, CouplingScheme::Ferromagnet { beta: 0.7 }).unwrap();
    let samples = sample_exact(&model, 100_000, 2).unwrap();
    let bound = 2.8f64.exp();
    let library = max_screening_magnitude(&samples, &model).unwrap();
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for r in samples.rows() {
        for u in 0..9 {
            let theta = model.node_couplings(u).unwrap();
            let x = (-products(r, u)
                .iter()
                .zip(&theta)
                .map(|(a, t)| a * t)
                .sum::<f64>())
            .exp();
            worst = worst.max(x);
            if x > bound {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0 && (library - worst).abs() <= 1e-12 * worst,
        format!("max |X| = {worst:.6} vs e^2.8 = {bound:.6}, {violations} violations"),
    )
}

fn gradient_correctness() -> Outcome {
    let mut rng = rng_from_seed(31);
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let p = 3 + (k % 5) as usize;
        let model = IsingModel::random(p, 0.6, 0.2, 1.0, k).unwrap();
        let samples = sample_exact(&model, 200, derive_seed(31, k)).unwrap();
        let u = (k as usize) % p;
        let theta: Vec<f64> = (0..p - 1)
            .map(|_| 2.0 * rng.random::<f64>() - 1.0)
            .collect();
        let view = NodeView::new(&samples, u).unwrap();
        let g = iso_gradient(&view, &CouplingVector::new(theta.clone()).unwrap()).unwrap();
        let h = 1e-5;
        let mut err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for l in 0..p - 1 {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[l] += h;
            minus[l] -= h;
            let fd = (raw_iso(&samples, u, &plus) - raw_iso(&samples, u, &minus)) / (2.0 * h);
            err = err.max((g[l] - fd).abs());
            scale = scale.max(g[l].abs());
        }
        worst = worst.max(err / scale);
    }
    outcome(
        worst <= 1e-6,
        format!("worst relative error {worst:.2e} over 100 points (tol 1e-6)"),
    )
}

fn deterministic_inequalities() -> Outcome {
    let mut f_violations = 0;
    for k in 0..10_000 {
        let z = -30.0 + 60.0 * k as f64 / 9_999.0;
        let lower = z * z / (2.0 + z.abs());
        if f_ref(z) < lower || taylor_function(z) < lower {
            f_violations += 1;
        }
    }
    let mut rng = rng_from_seed(41);
    let mut violations = 0;
    let mut worst_ratio = f64::INFINITY;
    let mut worst_mismatch: f64 = 0.0;
    for k in 0..1000u64 {
        let p = 4 + (k % 4) as usize;
        let model = IsingModel::random(p, 0.5, 0.2, 1.0, 1000 + k).unwrap();
        let samples = sample_exact(&model, 100, derive_seed(41, k)).unwrap();
        let u = (k as usize) % p;
        let (beta, d) = beta_and_d(&model);
        let truth = model.node_couplings(u).unwrap();
        let scale = 10f64.powf(-3.0 + 4.0 * rng.random::<f64>());
        let delta: Vec<f64> = (0..p - 1)
            .map(|_| scale * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let reference = samples
            .rows()
            .map(|r| {
                let x = products(r, u);
                let z: f64 = x.iter().zip(&truth).map(|(a, t)| a * t).sum();
                let zd: f64 = x.iter().zip(&delta).map(|(a, t)| a * t).sum();
                (-z).exp() * f_ref(zd)
            })
            .sum::<f64>()
            / samples.n() as f64;
        let view = NodeView::new(&samples, u).unwrap();
        let lhs = taylor_remainder(
            &view,
            &CouplingVector::new(truth.clone()).unwrap(),
            &CouplingVector::new(delta.clone()).unwrap(),
        )
        .unwrap();
        worst_mismatch = worst_mismatch.max((lhs - reference).abs() / reference.max(1e-300));
        let h = raw_covariance(&samples, u);
        let quad: f64 = (0..p - 1)
            .map(|a| {
                (0..p - 1)
                    .map(|b| delta[a] * h[a][b] * delta[b])
                    .sum::<f64>()
            })
            .sum();
        let l1: f64 = delta.iter().map(|v| v.abs()).sum();
        let rhs = (-beta * d as f64).exp() / (2.0 + l1) * quad;
        if lhs < rhs {
            violations += 1;
        }
        if rhs > 0.0 {
            worst_ratio = worst_ratio.min(lhs / rhs);
        }
    }
    outcome(
        f_violations == 0 && violations == 0 && worst_mismatch < 1e-9,
        format!(
            "f grid: {f_violations} violations; remainder: {violations} violations, min lhs/rhs {worst_ratio:.4}, \
             library vs reference rel {worst_mismatch:.1e}"
        ),
    )
}

fn covariance_lower_bound() -> Outcome {
    let mut models = vec![
        IsingModel::grid(3, CouplingScheme::Ferromagnet { beta: 0.7 }).unwrap(),
        IsingModel::grid(3, CouplingScheme::SpinGlass { beta: 0.7, seed: 1 }).unwrap(),
        IsingModel::new(4, [((0, 1), 0.7), ((1, 2), 0.7), ((2, 3), 0.7)]).unwrap(),
        IsingModel::independent(5).unwrap(),
    ];
    models.extend(
        (0..20).map(|s| IsingModel::random(3 + (s % 6) as usize, 0.5, 0.1, 1.0, 500 + s).unwrap()),
    );
    let mut violations = 0;
    let mut mismatch: f64 = 0.0;
    let mut torus_detail = String::new();
    for (k, model) in models.iter().enumerate() {
        let (beta, d) = beta_and_d(model);
        let bound = (-2.0 * beta * d as f64).exp() / (d as f64 + 1.0);
        for u in 0..model.p() {
            let (eig, lib_bound) = min_eigenvalue_check(model, u).unwrap();
            let reference = min_symmetric_eigenvalue(&enumerated_covariance(model, u));
            mismatch = mismatch.max((eig - reference).abs());
            if eig < bound || (lib_bound - bound).abs() > 1e-15 {
                violations += 1;
            }
            if k == 0 && u == 0 {
                torus_detail = format!("3x3 torus: min eig {eig:.4e} >= bound {bound:.4e}");
            }
        }
    }
    outcome(
        violations == 0 && mismatch < 1e-10,
        format!(
            "{torus_detail}; {violations} violations over {} models",
            models.len()
        ),
    )
}

fn solver_certification() -> Outcome {
    let mut worst_kkt: f64 = 0.0;
    let mut zero_failures = 0;
    let mut worst_atanh: f64 = 0.0;
    let mut unconverged = 0;
    for k in 0..30u64 {
        let p = 4 + (k % 6) as usize;
        let model = IsingModel::random(p, 0.5, 0.3, 1.2, 2000 + k).unwrap();
        let n = 500 * (1 + k as usize % 4);
        let samples = sample_exact(&model, n, derive_seed(61, k)).unwrap();
        let u = k as usize % p;
        let lambda =
            lambda_schedule(p, n, 0.05, LambdaMode::Node).unwrap() * (0.2 + 0.3 * (k % 3) as f64);
        let report = minimize(
            &NodeView::new(&samples, u).unwrap(),
            &SolverConfig::with_lambda(lambda),
        )
        .unwrap();
        unconverged += usize::from(!report.converged);
        let g = raw_gradient(&samples, u, report.solution.values());
        worst_kkt = worst_kkt.max(kkt_residual(report.solution.values(), &g, lambda));
    }
    for k in 0..10u64 {
        let p = 5;
        let model = IsingModel::random(p, 0.6, 0.3, 1.0, 3000 + k).unwrap();
        let samples = sample_exact(&model, 400, derive_seed(62, k)).unwrap();
        let g0 = raw_gradient(&samples, 0, &[0.0; 4]);
        let lambda = 1.001 * g0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let report = minimize(
            &NodeView::new(&samples, 0).unwrap(),
            &SolverConfig::with_lambda(lambda),
        )
        .unwrap();
        unconverged += usize::from(!report.converged);
        if report.solution.values().iter().any(|&v| v != 0.0) {
            zero_failures += 1;
        }
        worst_kkt = worst_kkt.max(kkt_residual(
            report.solution.values(),
            &raw_gradient(&samples, 0, report.solution.values()),
            lambda,
        ));
    }
    for k in 0..10u64 {
        let coupling = -1.0 + 0.2 * k as f64 + 0.05;
        let model = IsingModel::new(2, [((0, 1), coupling)]).unwrap();
        let samples = sample_exact(&model, 1000, derive_seed(63, k)).unwrap();
        let c = samples.rows().map(|r| f64::from(r[0] * r[1])).sum::<f64>() / samples.n() as f64;
        let config = SolverConfig {
            kkt_tolerance: 1e-12,
            ..SolverConfig::with_lambda(0.0)
        };
        let report = minimize(&NodeView::new(&samples, 0).unwrap(), &config).unwrap();
        unconverged += usize::from(!report.converged);
        worst_atanh = worst_atanh.max((report.solution[0] - c.atanh()).abs());
        worst_kkt = worst_kkt.max(kkt_residual(
            report.solution.values(),
            &raw_gradient(&samples, 0, report.solution.values()),
            0.0,
        ));
    }
    outcome(
        worst_kkt <= 1e-7 && zero_failures == 0 && worst_atanh <= 1e-8 && unconverged == 0,
        format!(
            "50 instances: max KKT {worst_kkt:.2e}, {zero_failures} nonzero large-lambda fits, \
             max |theta - atanh(c)| {worst_atanh:.2e}, {unconverged} unconverged"
        ),
    )
}

fn end_to_end_recovery() -> Outcome {
    let model = IsingModel::grid(3, CouplingScheme::Ferromagnet { beta: 0.7 }).unwrap();
    let n = 250_000;
    let lambda = 4.0 * ((3.0 * 81.0 / 0.05f64).ln() / n as f64).sqrt();
    let mut successes = 0;
    for t in 0..10 {
        let samples = sample_exact(&model, n, derive_seed(71, t)).unwrap();
        let estimate = structure_rise(&samples, lambda, 0.7, &SolverConfig::default()).unwrap();
        let truth: Vec<(usize, usize)> = model.edges().map(|(e, _)| e).collect();
        let found: Vec<(usize, usize)> = estimate.edges.pairs().collect();
        successes += usize::from(found == truth);
    }
    outcome(
        successes >= 9,
        format!("exact edge set in {successes}/10 trials at n = {n}, lambda = {lambda:.5}"),
    )
}

fn rate_check() -> Outcome {
    let manifest = ExperimentManifest::preset("error-curve", 81).unwrap();
    let rows = run_error_curve(&manifest).unwrap();
    let x: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean_error.ln()).collect();
    let slope = ols_slope(&x, &y);
    let library = error_slope(&rows);
    let errors: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{:.4}", r.n, r.mean_error))
        .collect();
    outcome(
        (slope + 0.5).abs() <= 0.1 && (library - slope).abs() < 1e-12,
        format!(
            "slope {slope:.3} (target -0.5 +/- 0.1); errors {}",
            errors.join(" ")
        ),
    )
}

fn beta_scaling() -> Outcome {
    let manifest = ExperimentManifest::preset("beta-spin-glass-smoke", 91).unwrap();
    let rows = run_nmin_search(&manifest).unwrap();
    let resolved: Vec<(f64, usize)> = rows
        .iter()
        .filter_map(|r| r.n_min.map(|n| (r.param, n)))
        .collect();
    let increasing = resolved.len() == rows.len() && resolved.windows(2).all(|w| w[1].1 > w[0].1);
    let x: Vec<f64> = resolved.iter().map(|r| r.0).collect();
    let y: Vec<f64> = resolved.iter().map(|r| (r.1 as f64).ln()).collect();
    let slope = if x.len() >= 2 {
        ols_slope(&x, &y)
    } else {
        f64::NAN
    };
    let library = log_nmin_slope(&rows).unwrap_or(f64::NAN);
    let table: Vec<String> = resolved
        .iter()
        .map(|(b, n)| format!("beta {b}: {n}"))
        .collect();
    outcome(
        increasing && (3.5..=8.0).contains(&slope) && (library - slope).abs() < 1e-12,
        format!(
            "n_min {}; slope {slope:.2} (target [3.5, 8])",
            table.join(", ")
        ),
    )
}

fn theory_constant() -> Outcome {
    let params = ModelParams::new(16, 4, 0.7, 0.7).unwrap();
    let r = structure_sample_requirement(&params, 0.05).unwrap();
    let reference = 3.0 * 0.7f64.powi(-2) * 2f64.powi(18) * 4.0 * 25.0 * 16.8f64.exp();
    let rel = (r.ln_p_coefficient / 3.2e15 - 1.0).abs();
    outcome(
        rel <= 0.1 && (r.ln_p_coefficient - reference).abs() <= 1e-10 * reference,
        format!(
            "ln p coefficient {:.4e} vs 3.2e15 (relative gap {:.3})",
            r.ln_p_coefficient, rel
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        (
            "screening identities",
            screening_identities,
            Duration::from_secs(10),
        ),
        ("support bound", support_bound, Duration::from_secs(10)),
        (
            "gradient correctness",
            gradient_correctness,
            Duration::from_secs(30),
        ),
        (
            "deterministic inequalities",
            deterministic_inequalities,
            Duration::from_secs(60),
        ),
        (
            "covariance lower bound",
            covariance_lower_bound,
            Duration::from_secs(60),
        ),
        (
            "solver certification",
            solver_certification,
            Duration::from_secs(60),
        ),
        (
            "end-to-end recovery",
            end_to_end_recovery,
            Duration::from_secs(600),
        ),
        ("error rate", rate_check, Duration::from_secs(600)),
        ("beta scaling", beta_scaling, Duration::from_secs(1800)),
        ("theory constant", theory_constant, Duration::from_secs(1)),
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= *budget;
        failed += usize::from(!pass);
        println!(
            "criterion {id:>2} [{}] {name}: {} ({:.1}s of {}s budget)",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
