//! Per-node regularized screening fits and edge-set recovery.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::model::IsingModel;
use crate::objective::{CouplingVector, NodeView};
use crate::sampler::SampleSet;
use crate::solver::{minimize, SolveReport, SolverConfig};

/// Which guarantee the penalty is tuned for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// Coupling error around a single node: `4 sqrt(ln(3p / eps) / n)`.
    Node,
    /// Exact recovery of the whole edge set: `4 sqrt(ln(3p^2 / eps) / n)`.
    Structure,
}

pub fn lambda_schedule(p: usize, n: usize, epsilon: f64, mode: LambdaMode) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::input(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if p < 2 || n == 0 {
        return Err(Error::input(format!(
            "penalty schedule needs p >= 2 and n >= 1, got p = {p}, n = {n}"
        )));
    }
    let p = p as f64;
    let numerator = match mode {
        LambdaMode::Node => 3.0 * p,
        LambdaMode::Structure => 3.0 * p * p,
    };
    Ok(4.0 * ((numerator / epsilon).ln() / n as f64).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeEstimate {
    pub u: usize,
    /// Estimated couplings to the other vertices in ascending order.
    pub theta_hat: CouplingVector,
    pub lambda_used: f64,
    pub report: SolveReport,
}

impl NodeEstimate {
    /// Estimated coupling between `u` and `j != u`.
    pub fn coupling_to(&self, j: usize) -> f64 {
        assert_ne!(j, self.u, "no self-coupling");
        self.theta_hat[if j < self.u { j } else { j - 1 }]
    }
}

/// Regularized screening estimate of the couplings around `u`. The penalty
/// passed here overrides `solver.lambda`.
pub fn rise_fit(
    samples: &SampleSet,
    u: usize,
    lambda: f64,
    solver: &SolverConfig,
) -> Result<NodeEstimate> {
    let view = NodeView::new(samples, u)?;
    fit_view(&view, lambda, solver)
}

pub(crate) fn fit_view(
    view: &NodeView,
    lambda: f64,
    solver: &SolverConfig,
) -> Result<NodeEstimate> {
    let config = SolverConfig { lambda, ..*solver };
    let report = minimize(view, &config)?;
    Ok(NodeEstimate {
        u: view.u(),
        theta_hat: report.solution.clone(),
        lambda_used: lambda,
        report,
    })
}

/// Undirected edges `(i, j)`, `i < j`, each with a symmetrized weight.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeSet {
    edges: BTreeMap<(usize, usize), f64>,
}

impl EdgeSet {
    pub fn from_weighted(edges: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for ((i, j), w) in edges {
            if i == j {
                return Err(Error::input(format!("self-loop on vertex {i}")));
            }
            out.insert((i.min(j), i.max(j)), w);
        }
        Ok(EdgeSet { edges: out })
    }

    /// The edge set of a model, weighted by its couplings.
    pub fn of_model(model: &IsingModel) -> Self {
        EdgeSet {
            edges: model.edges().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i.min(j), i.max(j)))
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.edges.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.edges.iter().map(|(&e, &w)| (e, w))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.keys().copied()
    }

    /// Same unordered pairs, ignoring weights.
    pub fn same_pairs(&self, other: &EdgeSet) -> bool {
        self.edges.keys().eq(other.edges.keys())
    }

    /// Same pairs as the edge set of `model`.
    pub fn matches_model(&self, model: &IsingModel) -> bool {
        self.edges.len() == model.num_edges()
            && model.edges().all(|((i, j), _)| self.contains(i, j))
    }
}

/// Output of [`structure_rise`].
#[derive(Clone, Debug)]
pub struct StructureEstimate {
    pub p: usize,
    pub lambda: f64,
    pub threshold: f64,
    pub edges: EdgeSet,
    pub nodes: Vec<NodeEstimate>,
}

impl StructureEstimate {
    fn build(p: usize, lambda: f64, threshold: f64, nodes: Vec<NodeEstimate>) -> Self {
        let mut edges = BTreeMap::new();
        for i in 0..p {
            for j in i + 1..p {
                let sum = nodes[i].coupling_to(j) + nodes[j].coupling_to(i);
                if sum.abs() >= threshold {
                    edges.insert((i, j), sum / 2.0);
                }
            }
        }
        StructureEstimate {
            p,
            lambda,
            threshold,
            edges: EdgeSet { edges },
            nodes,
        }
    }

    /// Re-thresholds the same per-node fits.
    pub fn with_threshold(&self, threshold: f64) -> Self {
        Self::build(self.p, self.lambda, threshold, self.nodes.clone())
    }

    /// `theta_hat_ij + theta_hat_ji` for a pair.
    pub fn symmetrized_sum(&self, i: usize, j: usize) -> f64 {
        self.nodes[i].coupling_to(j) + self.nodes[j].coupling_to(i)
    }

    pub fn all_converged(&self) -> bool {
        self.nodes.iter().all(|n| n.report.converged)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "lambda": self.lambda,
            "threshold": self.threshold,
            "edges": self.edges.iter().map(|((i, j), w)| json!({"i": i, "j": j, "weight": w})).collect::<Vec<_>>(),
            "node_reports": self.nodes.iter().map(|n| json!({
                "u": n.u,
                "iterations": n.report.iterations,
                "kkt": n.report.final_kkt_residual,
                "converged": n.report.converged,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Fits every node and keeps pair `(i, j)` when
/// `|theta_hat_ij + theta_hat_ji| >= alpha_threshold`.
pub fn structure_rise(
    samples: &SampleSet,
    lambda: f64,
    alpha_threshold: f64,
    solver: &SolverConfig,
) -> Result<StructureEstimate> {
    if !(alpha_threshold > 0.0) {
        return Err(Error::input(format!(
            "threshold must be positive, got {alpha_threshold}"
        )));
    }
    let p = samples.p();
    if p < 2 {
        return Err(Error::input("structure recovery needs at least two spins"));
    }
    let nodes = (0..p)
        .into_par_iter()
        .map(|u| rise_fit(samples, u, lambda, solver))
        .collect::<Result<Vec<_>>>()?;
    Ok(StructureEstimate::build(p, lambda, alpha_threshold, nodes))
}

/// `||theta_hat - theta*_u||_2` with `theta*_u` taken from `model`.
pub fn square_error(theta_hat: &CouplingVector, model: &IsingModel, u: usize) -> Result<f64> {
    let truth = model.node_couplings(u)?;
    if truth.len() != theta_hat.len() {
        return Err(Error::input(format!(
            "estimate has {} entries, model node {u} has {}",
            theta_hat.len(),
            truth.len()
        )));
    }
    Ok(theta_hat
        .values()
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}
