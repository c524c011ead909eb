//! Accelerated proximal gradient for `f(x) + lambda * ||x||_1`.
//!
//! The smooth part is handled by backtracking line search on the quadratic
//! upper model, the l1 part by its proximal map (soft thresholding). With
//! acceleration on, Nesterov momentum is used and reset whenever a step would
//! increase the composite objective, so accepted iterates are monotone.
//! Termination is on the KKT residual of the composite problem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::l1_norm;
use crate::objective::{CouplingVector, Evaluation, NodeView};

/// Smallest step before the line search gives up.
const MIN_STEP: f64 = 1e-30;
/// Relative objective increase attributed to floating-point rounding.
pub const ROUNDING_SLACK: f64 = 64.0 * f64::EPSILON;

/// A differentiable convex function of a real vector.
pub trait SmoothObjective {
    fn dim(&self) -> usize;
    /// Returns `f(x)` and writes `grad f(x)` into `grad`.
    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> Evaluation;
}

impl SmoothObjective for NodeView {
    fn dim(&self) -> usize {
        NodeView::dim(self)
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> Evaluation {
        NodeView::value_and_gradient(self, x, grad)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub lambda: f64,
    pub kkt_tolerance: f64,
    pub max_iterations: usize,
    pub backtrack_shrink: f64,
    pub initial_step: f64,
    pub acceleration: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: 0.0,
            kkt_tolerance: 1e-7,
            max_iterations: 50_000,
            backtrack_shrink: 0.5,
            initial_step: 1.0,
            acceleration: true,
        }
    }
}

impl SolverConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        SolverConfig {
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::input(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.kkt_tolerance > 0.0) {
            return Err(Error::input("kkt_tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::input("max_iterations must be positive"));
        }
        if !(self.backtrack_shrink > 0.0 && self.backtrack_shrink < 1.0) {
            return Err(Error::input("backtrack_shrink must lie in (0, 1)"));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::input("initial_step must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solution: CouplingVector,
    pub iterations: usize,
    pub final_kkt_residual: f64,
    /// Composite objective `f + lambda * ||x||_1` at the solution.
    pub objective_value: f64,
    pub converged: bool,
    /// Some exponent hit the clamp during the solve.
    pub saturated: bool,
}

/// Componentwise `sign(x) * max(|x| - t, 0)`.
pub fn soft_threshold(x: &[f64], t: f64) -> Vec<f64> {
    x.iter().map(|&v| shrink(v, t)).collect()
}

#[inline]
fn shrink(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Largest violation of the optimality conditions of `f + lambda ||x||_1`:
/// `|g_l + lambda sign(x_l)|` where `x_l != 0`, `max(|g_l| - lambda, 0)` where `x_l == 0`.
pub fn kkt_residual(x: &[f64], grad: &[f64], lambda: f64) -> f64 {
    x.iter()
        .zip(grad)
        .map(|(&xl, &gl)| {
            if xl != 0.0 {
                (gl + lambda * xl.signum()).abs()
            } else {
                (gl.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Minimizes the regularized screening objective of `view` from the origin.
pub fn minimize(view: &NodeView, config: &SolverConfig) -> Result<SolveReport> {
    minimize_from(view, config, &vec![0.0; view.dim()], |_, _| {})
}

/// General entry point: any smooth objective, any start, and an observer
/// called with `(iteration, composite objective)` after every accepted step
/// (iteration 0 is the start point).
pub fn minimize_from<O: SmoothObjective + ?Sized>(
    objective: &O,
    config: &SolverConfig,
    start: &[f64],
    mut observer: impl FnMut(usize, f64),
) -> Result<SolveReport> {
    config.validate()?;
    let dim = objective.dim();
    if start.len() != dim {
        return Err(Error::input(format!(
            "start point has length {}, expected {dim}",
            start.len()
        )));
    }
    if start.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("start point must be finite"));
    }
    let lambda = config.lambda;
    let composite = |f: f64, x: &[f64]| f + lambda * l1_norm(x);

    let mut x = start.to_vec();
    let mut grad_x = vec![0.0; dim];
    let eval = objective.value_and_gradient(&x, &mut grad_x);
    let mut saturated = eval.saturated;
    let mut f_x = eval.value;
    let mut obj_x = composite(f_x, &x);
    observer(0, obj_x);

    let mut residual = kkt_residual(&x, &grad_x, lambda);
    let mut iterations = 0;
    let mut converged = residual <= config.kkt_tolerance;

    let mut y = x.clone();
    let mut grad_y = grad_x.clone();
    let mut f_y = f_x;
    let mut momentum_active = false;
    let mut t: f64 = 1.0;
    let mut step = config.initial_step;

    let mut cand = vec![0.0; dim];
    let mut grad_c = vec![0.0; dim];
    let mut x_prev = vec![0.0; dim];

    while !converged && iterations < config.max_iterations {
        iterations += 1;

        // Backtracking on the smooth part from the extrapolated point.
        let mut f_c;
        loop {
            for l in 0..dim {
                cand[l] = shrink(y[l] - step * grad_y[l], step * lambda);
            }
            let eval = objective.value_and_gradient(&cand, &mut grad_c);
            saturated |= eval.saturated;
            f_c = eval.value;
            let mut lin = 0.0;
            let mut sq = 0.0;
            for l in 0..dim {
                let d = cand[l] - y[l];
                lin += grad_y[l] * d;
                sq += d * d;
            }
            if f_c <= f_y + lin + sq / (2.0 * step) + ROUNDING_SLACK * f_y.abs().max(1.0)
                || step < MIN_STEP
            {
                break;
            }
            step *= config.backtrack_shrink;
        }
        if step < MIN_STEP {
            break;
        }

        let obj_c = composite(f_c, &cand);
        if obj_c > obj_x {
            if momentum_active {
                // Restart from the last accepted iterate without momentum.
                y.copy_from_slice(&x);
                grad_y.copy_from_slice(&grad_x);
                f_y = f_x;
                t = 1.0;
                momentum_active = false;
                continue;
            }
            // A plain proximal step that passed backtracking cannot increase
            // the objective beyond rounding; anything larger means the step is too long.
            if obj_c > obj_x + ROUNDING_SLACK * obj_x.abs().max(1.0) {
                step *= config.backtrack_shrink;
                continue;
            }
        }

        x_prev.copy_from_slice(&x);
        x.copy_from_slice(&cand);
        grad_x.copy_from_slice(&grad_c);
        f_x = f_c;
        obj_x = obj_c;
        observer(iterations, obj_x);

        residual = kkt_residual(&x, &grad_x, lambda);
        if residual <= config.kkt_tolerance {
            converged = true;
            break;
        }

        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = if config.acceleration {
            (t - 1.0) / t_next
        } else {
            0.0
        };
        t = t_next;
        if beta > 0.0 {
            for l in 0..dim {
                y[l] = x[l] + beta * (x[l] - x_prev[l]);
            }
            let eval = objective.value_and_gradient(&y, &mut grad_y);
            saturated |= eval.saturated;
            f_y = eval.value;
            momentum_active = true;
        } else {
            y.copy_from_slice(&x);
            grad_y.copy_from_slice(&grad_x);
            f_y = f_x;
            momentum_active = false;
        }
    }

    Ok(SolveReport {
        solution: CouplingVector::new(x)?,
        iterations,
        final_kkt_residual: residual,
        objective_value: obj_x,
        converged,
        saturated,
    })
}
