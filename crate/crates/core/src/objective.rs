//! The interaction screening objective around one focal spin.
//!
//! For focal vertex `u` and couplings `theta` over the other `p - 1` spins,
//!
//! ```text
//! S(theta) = (1/n) sum_k exp(-sum_i theta_i * s_u^(k) * s_i^(k))
//! ```
//!
//! Its gradient is the same average with each summand multiplied by
//! `-s_u * s_l`, so value and gradient share one exponential per sample.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::ExactDistribution;
use crate::numeric::NeumaierSum;
use crate::sampler::SampleSet;

/// Bound applied to the linear form before exponentiation.
pub const EXPONENT_CLAMP: f64 = 700.0;

/// Rows accumulated in plain arithmetic before folding into the compensated sums.
const BLOCK: usize = 256;

/// Coupling vector around a focal vertex, aligned with [`NodeView::others`].
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingVector(Vec<f64>);

impl CouplingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("coupling vector entries must be finite"));
        }
        Ok(CouplingVector(values))
    }

    pub fn zeros(dim: usize) -> Self {
        CouplingVector(vec![0.0; dim])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for CouplingVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Value of the objective plus a flag raised when any linear form hit
/// [`EXPONENT_CLAMP`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub saturated: bool,
}

/// Products `s_u * s_i` for every distinct sample pattern around `u`.
///
/// Rows with identical products are merged and carry their multiplicity as
/// a weight, which leaves the objective unchanged and makes evaluation cost
/// scale with the number of distinct patterns rather than with `n`.
#[derive(Clone, Debug)]
pub struct NodeView {
    u: usize,
    others: Vec<usize>,
    products: Vec<i8>,
    weights: Vec<f64>,
    total_weight: f64,
}

struct PatternCounter {
    p: usize,
    u: usize,
    others: Vec<usize>,
    index: HashMap<Box<[u64]>, usize>,
    products: Vec<i8>,
    weights: Vec<f64>,
    n: usize,
}

impl PatternCounter {
    fn new(p: usize, u: usize) -> Result<Self> {
        if u >= p {
            return Err(Error::input(format!("vertex {u} out of range for p = {p}")));
        }
        let others = (0..p).filter(|&i| i != u).collect();
        Ok(PatternCounter {
            p,
            u,
            others,
            index: HashMap::new(),
            products: Vec::new(),
            weights: Vec::new(),
            n: 0,
        })
    }

    fn add(&mut self, samples: &SampleSet) -> Result<()> {
        if samples.p() != self.p {
            return Err(Error::input(format!(
                "batch has p = {}, expected {}",
                samples.p(),
                self.p
            )));
        }
        let dim = self.others.len();
        let mut key = vec![0u64; dim.div_ceil(64).max(1)];
        let mut row_products = vec![0i8; dim];
        for row in samples.rows() {
            key.iter_mut().for_each(|w| *w = 0);
            let su = row[self.u];
            for (a, &i) in self.others.iter().enumerate() {
                let x = su * row[i];
                row_products[a] = x;
                if x > 0 {
                    key[a / 64] |= 1 << (a % 64);
                }
            }
            match self.index.get(key.as_slice()) {
                Some(&slot) => self.weights[slot] += 1.0,
                None => {
                    self.index
                        .insert(key.clone().into_boxed_slice(), self.weights.len());
                    self.weights.push(1.0);
                    self.products.extend_from_slice(&row_products);
                }
            }
        }
        self.n += samples.n();
        Ok(())
    }

    fn finish(self) -> NodeView {
        NodeView {
            u: self.u,
            others: self.others,
            products: self.products,
            weights: self.weights,
            total_weight: self.n as f64,
        }
    }
}

impl NodeView {
    pub fn new(samples: &SampleSet, u: usize) -> Result<Self> {
        let mut acc = PatternCounter::new(samples.p(), u)?;
        acc.add(samples)?;
        Ok(acc.finish())
    }

    /// Builds the view from sample sets delivered in batches, so that very
    /// large `n` never has to be held in memory at once.
    pub fn from_batches(
        p: usize,
        u: usize,
        batches: impl IntoIterator<Item = Result<SampleSet>>,
    ) -> Result<Self> {
        let mut acc = PatternCounter::new(p, u)?;
        for batch in batches {
            acc.add(&batch?)?;
        }
        Ok(acc.finish())
    }

    /// Population view: every configuration weighted by its exact probability.
    pub fn from_distribution(dist: &ExactDistribution, u: usize) -> Result<Self> {
        let p = dist.p;
        if u >= p {
            return Err(Error::input(format!("vertex {u} out of range for p = {p}")));
        }
        let others: Vec<usize> = (0..p).filter(|&i| i != u).collect();
        let mut products = Vec::with_capacity(dist.probs.len() * others.len());
        for bits in 0..dist.probs.len() as u64 {
            let spin = |i: usize| if bits >> i & 1 == 1 { 1i8 } else { -1 };
            let su = spin(u);
            products.extend(others.iter().map(|&i| su * spin(i)));
        }
        let mut total = NeumaierSum::default();
        dist.probs.iter().for_each(|&w| total.add(w));
        Ok(NodeView {
            u,
            others,
            products,
            weights: dist.probs.clone(),
            total_weight: total.value(),
        })
    }

    pub fn u(&self) -> usize {
        self.u
    }

    /// The `p - 1` vertices other than `u`, ascending.
    pub fn others(&self) -> &[usize] {
        &self.others
    }

    pub fn dim(&self) -> usize {
        self.others.len()
    }

    /// Number of distinct product patterns retained.
    pub fn distinct_patterns(&self) -> usize {
        self.weights.len()
    }

    /// Pattern rows `s_u * s_i` with their weights.
    pub fn patterns(&self) -> impl Iterator<Item = (&[i8], f64)> + '_ {
        let dim = self.dim().max(1);
        self.products
            .chunks_exact(dim)
            .zip(self.weights.iter().copied())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::input(format!(
                "coupling vector has length {len}, expected {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Linear form `sum_i theta_i x_i`, clamped.
    #[inline]
    fn linear_form(theta: &[f64], x: &[i8]) -> (f64, bool) {
        let z: f64 = theta.iter().zip(x).map(|(t, &s)| t * f64::from(s)).sum();
        if z.abs() > EXPONENT_CLAMP {
            (z.clamp(-EXPONENT_CLAMP, EXPONENT_CLAMP), true)
        } else {
            (z, false)
        }
    }

    /// Objective value and gradient in one pass. `grad` is overwritten.
    pub fn value_and_gradient(&self, theta: &[f64], grad: &mut [f64]) -> Evaluation {
        let dim = self.dim();
        debug_assert_eq!(theta.len(), dim);
        debug_assert_eq!(grad.len(), dim);
        let mut value = NeumaierSum::default();
        let mut gsum = vec![NeumaierSum::default(); dim];
        let mut block_grad = vec![0.0; dim];
        let mut saturated = false;
        if dim == 0 {
            self.weights.iter().for_each(|&w| value.add(w));
            return Evaluation {
                value: value.value() / self.total_weight,
                saturated,
            };
        }
        for (rows, weights) in self
            .products
            .chunks(BLOCK * dim)
            .zip(self.weights.chunks(BLOCK))
        {
            let mut block_value = 0.0;
            block_grad.iter_mut().for_each(|g| *g = 0.0);
            for (x, &w) in rows.chunks_exact(dim).zip(weights) {
                let (z, sat) = Self::linear_form(theta, x);
                saturated |= sat;
                let a = w * (-z).exp();
                block_value += a;
                for (g, &s) in block_grad.iter_mut().zip(x.iter()) {
                    *g -= a * f64::from(s);
                }
            }
            value.add(block_value);
            for (acc, &g) in gsum.iter_mut().zip(&block_grad) {
                acc.add(g);
            }
        }
        for (g, acc) in grad.iter_mut().zip(&gsum) {
            *g = acc.value() / self.total_weight;
        }
        Evaluation {
            value: value.value() / self.total_weight,
            saturated,
        }
    }

    /// Objective value alone.
    pub fn evaluate(&self, theta: &[f64]) -> Evaluation {
        let dim = self.dim();
        let mut value = NeumaierSum::default();
        let mut saturated = false;
        for (x, w) in self.patterns() {
            let (z, sat) = if dim == 0 {
                (0.0, false)
            } else {
                Self::linear_form(theta, x)
            };
            saturated |= sat;
            value.add(w * (-z).exp());
        }
        Evaluation {
            value: value.value() / self.total_weight,
            saturated,
        }
    }
}

/// `S(theta)`.
pub fn iso_value(view: &NodeView, theta: &CouplingVector) -> Result<f64> {
    view.check_dim(theta.len())?;
    Ok(view.evaluate(theta.values()).value)
}

/// Gradient of `S` at `theta`; component `l` is the average of
/// `-x_l * exp(-sum_i theta_i x_i)` with `x = s_u * s`.
pub fn iso_gradient(view: &NodeView, theta: &CouplingVector) -> Result<CouplingVector> {
    view.check_dim(theta.len())?;
    let mut grad = vec![0.0; view.dim()];
    view.value_and_gradient(theta.values(), &mut grad);
    Ok(CouplingVector(grad))
}

/// `f(z) = exp(-z) - 1 + z`, accurate near zero.
pub fn taylor_function(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // Alternating series; the first omitted term is below 1e-16 relative.
        let mut term = z * z / 2.0;
        let mut sum = term;
        for k in 3..=12 {
            term *= -z / k as f64;
            sum += term;
        }
        sum
    } else {
        (-z).exp_m1() + z
    }
}

/// First-order Taylor remainder `S(theta + delta) - S(theta) - <grad S(theta), delta>`,
/// evaluated through the equivalent form
/// `(1/n) sum_k exp(-<theta, x_k>) f(<delta, x_k>)`, which is nonnegative term by term.
pub fn taylor_remainder(
    view: &NodeView,
    theta: &CouplingVector,
    delta: &CouplingVector,
) -> Result<f64> {
    view.check_dim(theta.len())?;
    view.check_dim(delta.len())?;
    let mut acc = NeumaierSum::default();
    for (x, w) in view.patterns() {
        let (z, _) = NodeView::linear_form(theta.values(), x);
        let zd: f64 = delta
            .values()
            .iter()
            .zip(x)
            .map(|(d, &s)| d * f64::from(s))
            .sum();
        acc.add(w * (-z).exp() * taylor_function(zd));
    }
    Ok(acc.value() / view.total_weight)
}

/// Both sides of `f(z) >= z^2 / (2 + |z|)`.
pub fn f_lower_bound_check(z: f64) -> (f64, f64) {
    (taylor_function(z), z * z / (2.0 + z.abs()))
}
