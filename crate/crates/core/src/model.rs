//! Zero-field Ising models over `p` spins.
//!
//! A model is a sparse symmetric coupling map keyed by canonical edges
//! `(i, j)` with `i < j`. The unnormalized log-weight of a configuration is
//! `sum_{(i,j)} theta_ij * s_i * s_j`; exact quantities (partition function,
//! probabilities, covariances) are obtained by enumerating all `2^p`
//! configurations and are therefore guarded by [`MAX_ENUMERATION_SPINS`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Largest `p` for which exhaustive enumeration is attempted.
pub const MAX_ENUMERATION_SPINS: usize = 25;

/// Recompute the running energy from scratch this often during Gray-code walks.
const ENERGY_REFRESH_PERIOD: u64 = 1 << 10;

/// A spin configuration with entries in `{-1, +1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::input(format!("spin value {bad} is not -1 or +1")));
        }
        Ok(SpinConfig(spins))
    }

    /// Configuration whose spin `i` is `+1` iff bit `i` of `bits` is set.
    pub fn from_bits(bits: u64, p: usize) -> Self {
        SpinConfig(
            (0..p)
                .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn to_bits(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0u64, |acc, (i, _)| acc | 1 << i)
    }

    pub fn flipped(&self) -> Self {
        SpinConfig(self.0.iter().map(|s| -s).collect())
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sign pattern used by [`IsingModel::grid`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingScheme {
    /// Every coupling equals `+beta`.
    Ferromagnet { beta: f64 },
    /// Every coupling is `+beta` or `-beta` with i.i.d. fair signs drawn from `seed`.
    SpinGlass { beta: f64, seed: u64 },
}

impl CouplingScheme {
    pub fn beta(&self) -> f64 {
        match *self {
            CouplingScheme::Ferromagnet { beta } | CouplingScheme::SpinGlass { beta, .. } => beta,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    p: usize,
    couplings: BTreeMap<(usize, usize), f64>,
}

impl IsingModel {
    /// Builds a model from `((i, j), theta)` pairs. Pairs may be given in
    /// either orientation; they are stored canonically with `i < j`.
    pub fn new(p: usize, edges: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        if p == 0 {
            return Err(Error::input("a model needs at least one spin"));
        }
        let mut couplings = BTreeMap::new();
        for ((a, b), theta) in edges {
            if a >= p || b >= p {
                return Err(Error::input(format!(
                    "edge ({a},{b}) out of range for p = {p}"
                )));
            }
            if a == b {
                return Err(Error::input(format!("self-loop on vertex {a}")));
            }
            if !theta.is_finite() || theta == 0.0 {
                return Err(Error::input(format!(
                    "coupling on ({a},{b}) must be finite and nonzero, got {theta}"
                )));
            }
            let key = (a.min(b), a.max(b));
            if couplings.insert(key, theta).is_some() {
                return Err(Error::input(format!("duplicate edge {key:?}")));
            }
        }
        Ok(IsingModel { p, couplings })
    }

    /// Model without any couplings: all `2^p` configurations equally likely.
    pub fn independent(p: usize) -> Result<Self> {
        Self::new(p, std::iter::empty())
    }

    /// Periodic `side x side` grid. Vertex `(r, c)` has id `r * side + c`.
    /// For `side = 2` the wraparound edges coincide with the direct ones and
    /// are kept once, leaving a 4-cycle.
    pub fn grid(side: usize, scheme: CouplingScheme) -> Result<Self> {
        if side < 2 {
            return Err(Error::input(format!(
                "grid side must be at least 2, got {side}"
            )));
        }
        let beta = scheme.beta();
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::input(format!(
                "coupling magnitude must be positive, got {beta}"
            )));
        }
        let id = |r: usize, c: usize| (r % side) * side + (c % side);
        let mut pairs = std::collections::BTreeSet::new();
        for r in 0..side {
            for c in 0..side {
                for other in [id(r, c + 1), id(r + 1, c)] {
                    let me = id(r, c);
                    pairs.insert((me.min(other), me.max(other)));
                }
            }
        }
        let mut rng = match scheme {
            CouplingScheme::SpinGlass { seed, .. } => Some(rng_from_seed(seed)),
            CouplingScheme::Ferromagnet { .. } => None,
        };
        let edges = pairs.into_iter().map(|e| {
            let negative = rng.as_mut().is_some_and(|rng| rng.random_bool(0.5));
            let sign = if negative { -1.0 } else { 1.0 };
            (e, sign * beta)
        });
        let edges: Vec<_> = edges.collect();
        Self::new(side * side, edges)
    }

    /// Erdős–Rényi style test instance: each pair is an edge with probability
    /// `edge_probability`, magnitudes uniform on `[alpha, beta]`, fair signs.
    pub fn random(
        p: usize,
        edge_probability: f64,
        alpha: f64,
        beta: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&edge_probability) {
            return Err(Error::input(format!(
                "edge probability {edge_probability} not in [0, 1]"
            )));
        }
        if !(alpha > 0.0) || !beta.is_finite() {
            return Err(Error::input(
                "coupling magnitudes must be positive and finite",
            ));
        }
        if alpha > beta {
            return Err(Error::input(format!(
                "alpha = {alpha} exceeds beta = {beta}"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let mut edges = Vec::new();
        for i in 0..p {
            for j in i + 1..p {
                if rng.random::<f64>() < edge_probability {
                    let magnitude = alpha + (beta - alpha) * rng.random::<f64>();
                    let sign = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
                    edges.push(((i, j), sign * magnitude));
                }
            }
        }
        Self::new(p, edges)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn num_edges(&self) -> usize {
        self.couplings.len()
    }

    /// Canonical edges with their couplings, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.couplings.iter().map(|(&e, &t)| (e, t))
    }

    /// Coupling between `i` and `j` in either order, `0.0` if absent.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Adjacency lists `(neighbor, theta)` sorted by neighbor.
    pub fn neighbors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.p];
        for (&(i, j), &t) in &self.couplings {
            adj[i].push((j, t));
            adj[j].push((i, t));
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        adj
    }

    pub fn degree(&self, u: usize) -> usize {
        self.couplings
            .keys()
            .filter(|&&(i, j)| i == u || j == u)
            .count()
    }

    /// Maximum node degree `d`.
    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.p];
        for &(i, j) in self.couplings.keys() {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Minimum coupling magnitude `alpha`, `None` for an empty edge set.
    pub fn min_coupling(&self) -> Option<f64> {
        self.couplings.values().map(|t| t.abs()).reduce(f64::min)
    }

    /// Maximum coupling magnitude `beta`, `None` for an empty edge set.
    pub fn max_coupling(&self) -> Option<f64> {
        self.couplings.values().map(|t| t.abs()).reduce(f64::max)
    }

    /// Couplings around `u` ordered by the remaining vertices in ascending order.
    pub fn node_couplings(&self, u: usize) -> Result<Vec<f64>> {
        self.check_vertex(u)?;
        Ok((0..self.p)
            .filter(|&i| i != u)
            .map(|i| self.coupling(u, i))
            .collect())
    }

    pub(crate) fn check_vertex(&self, u: usize) -> Result<()> {
        if u >= self.p {
            return Err(Error::input(format!(
                "vertex {u} out of range for p = {}",
                self.p
            )));
        }
        Ok(())
    }

    fn check_config(&self, spins: &[i8]) -> Result<()> {
        if spins.len() != self.p {
            return Err(Error::input(format!(
                "configuration has {} spins, model has {}",
                spins.len(),
                self.p
            )));
        }
        Ok(())
    }

    pub(crate) fn energy_of(&self, spins: &[i8]) -> f64 {
        self.couplings
            .iter()
            .map(|(&(i, j), &t)| t * f64::from(spins[i] * spins[j]))
            .sum()
    }

    /// `sum_{(i,j) in E} theta_ij s_i s_j`.
    pub fn energy_exponent(&self, config: &SpinConfig) -> Result<f64> {
        self.check_config(config.spins())?;
        Ok(self.energy_of(config.spins()))
    }

    pub(crate) fn check_enumerable(&self) -> Result<()> {
        if self.p > MAX_ENUMERATION_SPINS {
            return Err(Error::capability(format!(
                "exact enumeration limited to p <= {MAX_ENUMERATION_SPINS}, model has p = {}",
                self.p
            )));
        }
        Ok(())
    }

    /// Visits every configuration of the lowest `free` spins (remaining spins
    /// held at `+1`) in Gray-code order, passing the bit pattern and energy.
    pub(crate) fn walk_states(&self, free: usize, mut visit: impl FnMut(u64, f64)) {
        debug_assert!(free <= self.p && free < 64);
        let adj = self.neighbors();
        let mut spins: Vec<i8> = (0..self.p).map(|i| if i < free { -1 } else { 1 }).collect();
        let fixed_bits: u64 = (free..self.p).fold(0, |acc, i| acc | 1 << i);
        let mut bits = fixed_bits;
        let mut energy = self.energy_of(&spins);
        visit(bits, energy);
        let total: u64 = 1 << free;
        for k in 1..total {
            let i = k.trailing_zeros() as usize;
            let s = f64::from(spins[i]);
            let field: f64 = adj[i].iter().map(|&(j, t)| t * f64::from(spins[j])).sum();
            spins[i] = -spins[i];
            bits ^= 1 << i;
            if k % ENERGY_REFRESH_PERIOD == 0 {
                energy = self.energy_of(&spins);
            } else {
                energy -= 2.0 * s * field;
            }
            visit(bits, energy);
        }
    }

    /// Natural log of the partition function by exhaustive enumeration.
    pub fn log_partition(&self) -> Result<f64> {
        self.check_enumerable()?;
        // Half the states suffice: the measure is invariant under a global flip.
        let mut acc = LogSumExp::default();
        self.walk_states(self.p - 1, |_, e| acc.push(e));
        Ok(acc.value() + std::f64::consts::LN_2)
    }

    pub fn exact_probability(&self, config: &SpinConfig) -> Result<f64> {
        let log_z = self.log_partition()?;
        Ok((self.energy_exponent(config)? - log_z).exp())
    }

    /// Full probability table indexed by [`SpinConfig::to_bits`].
    pub fn exact_distribution(&self) -> Result<ExactDistribution> {
        let log_z = self.log_partition()?;
        let mut probs = vec![0.0; 1usize << self.p];
        self.walk_states(self.p, |bits, e| probs[bits as usize] = (e - log_z).exp());
        Ok(ExactDistribution {
            p: self.p,
            log_partition: log_z,
            probs,
        })
    }

    /// Exact second moments `E[s_i s_j]` for all pairs.
    pub fn exact_correlations(&self) -> Result<Vec<Vec<f64>>> {
        self.check_enumerable()?;
        let log_z = self.log_partition()?;
        let p = self.p;
        let mut corr = vec![vec![0.0; p]; p];
        self.walk_states(p - 1, |bits, e| {
            // Each half-state stands for itself and its mirror image; both
            // contribute the same products.
            let w = 2.0 * (e - log_z).exp();
            for i in 0..p {
                let si = if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
                for j in i + 1..p {
                    let sj = if bits >> j & 1 == 1 { 1.0 } else { -1.0 };
                    corr[i][j] += w * si * sj;
                }
            }
        });
        for i in 0..p {
            corr[i][i] = 1.0;
            for j in i + 1..p {
                corr[j][i] = corr[i][j];
            }
        }
        Ok(corr)
    }

    /// Relabels vertices: old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.p)?;
        Self::new(
            self.p,
            self.edges().map(|((i, j), t)| ((perm[i], perm[j]), t)),
        )
    }

    /// Serializes as `{"p": .., "edges": [{"i", "j", "theta"}, ..]}` with
    /// couplings printed to 17 significant digits.
    pub fn to_json_string(&self) -> String {
        let mut out = format!("{{\"p\": {}, \"edges\": [", self.p);
        for (k, ((i, j), t)) in self.edges().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            write!(out, "{{\"i\": {i}, \"j\": {j}, \"theta\": {t:.16e}}}").unwrap();
        }
        out.push_str("]}\n");
        out
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct EdgeRecord {
            i: usize,
            j: usize,
            theta: f64,
        }
        #[derive(Deserialize)]
        struct ModelRecord {
            p: usize,
            edges: Vec<EdgeRecord>,
        }
        let record: ModelRecord =
            serde_json::from_str(text).map_err(|e| Error::input(format!("model file: {e}")))?;
        if let Some(e) = record.edges.iter().find(|e| e.i >= e.j) {
            return Err(Error::input(format!(
                "model file edge ({}, {}) is not canonical (i < j)",
                e.i, e.j
            )));
        }
        Self::new(
            record.p,
            record.edges.into_iter().map(|e| ((e.i, e.j), e.theta)),
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

pub(crate) fn check_permutation(perm: &[usize], p: usize) -> Result<()> {
    let mut seen = vec![false; p];
    if perm.len() != p {
        return Err(Error::input("permutation length differs from p"));
    }
    for &v in perm {
        if v >= p || std::mem::replace(&mut seen[v], true) {
            return Err(Error::input("not a permutation"));
        }
    }
    Ok(())
}

/// Probabilities of all `2^p` configurations of an enumerable model.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    pub p: usize,
    pub log_partition: f64,
    /// Indexed by the configuration bit pattern (bit `i` set means `s_i = +1`).
    pub probs: Vec<f64>,
}

impl ExactDistribution {
    /// Expectation of `g` over the distribution.
    pub fn expect(&self, mut g: impl FnMut(&SpinConfig) -> f64) -> f64 {
        let mut acc = crate::numeric::NeumaierSum::default();
        for (bits, &prob) in self.probs.iter().enumerate() {
            acc.add(prob * g(&SpinConfig::from_bits(bits as u64, self.p)));
        }
        acc.value()
    }
}

/// Streaming log-sum-exp with a running max shift.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub(crate) fn push(&mut self, x: f64) {
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    pub(crate) fn value(&self) -> f64 {
        self.max + self.scaled.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> IsingModel {
        IsingModel::new(3, [((0, 1), 0.7), ((1, 2), -0.7)]).unwrap()
    }

    #[test]
    fn energy_examples() {
        let empty = IsingModel::independent(4).unwrap();
        let cfg = SpinConfig::new(vec![1, -1, 1, 1]).unwrap();
        assert_eq!(empty.energy_exponent(&cfg).unwrap(), 0.0);

        let pair = IsingModel::new(2, [((0, 1), 0.5)]).unwrap();
        assert_eq!(
            pair.energy_exponent(&SpinConfig::new(vec![1, 1]).unwrap())
                .unwrap(),
            0.5
        );

        let all_up = SpinConfig::new(vec![1, 1, 1]).unwrap();
        assert!(chain3().energy_exponent(&all_up).unwrap().abs() < 1e-15);
    }

    #[test]
    fn energy_dimension_mismatch() {
        let cfg = SpinConfig::new(vec![1, 1]).unwrap();
        assert!(matches!(
            chain3().energy_exponent(&cfg),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn spin_config_rejects_zero() {
        assert!(SpinConfig::new(vec![1, 0]).is_err());
    }

    #[test]
    fn log_partition_examples() {
        let one = IsingModel::independent(1).unwrap();
        assert!((one.log_partition().unwrap() - 2f64.ln()).abs() < 1e-15);
        let two = IsingModel::independent(2).unwrap();
        assert!((two.log_partition().unwrap() - 4f64.ln()).abs() < 1e-15);
        let pair = IsingModel::new(2, [((0, 1), 0.5)]).unwrap();
        let expected = (2.0 * 0.5f64.exp() + 2.0 * (-0.5f64).exp()).ln();
        assert!((pair.log_partition().unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn enumeration_guard() {
        let big = IsingModel::independent(MAX_ENUMERATION_SPINS + 1).unwrap();
        assert!(matches!(big.log_partition(), Err(Error::Capability(_))));
        let cfg = SpinConfig::new(vec![1; MAX_ENUMERATION_SPINS + 1]).unwrap();
        assert!(matches!(
            big.exact_probability(&cfg),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn exact_probability_examples() {
        let one = IsingModel::independent(1).unwrap();
        for s in [-1, 1] {
            let p = one
                .exact_probability(&SpinConfig::new(vec![s]).unwrap())
                .unwrap();
            assert!((p - 0.5).abs() < 1e-15);
        }
        let pair = IsingModel::new(2, [((0, 1), 0.5)]).unwrap();
        let aligned = pair
            .exact_probability(&SpinConfig::new(vec![1, 1]).unwrap())
            .unwrap()
            + pair
                .exact_probability(&SpinConfig::new(vec![-1, -1]).unwrap())
                .unwrap();
        assert!((aligned - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-14);
        assert!((aligned - 0.73106).abs() < 1e-5);
    }

    #[test]
    fn log_partition_matches_direct_sum() {
        // Direct sum without the Gray-code walk or mirror symmetry.
        let model = IsingModel::random(10, 0.4, 0.2, 1.3, 5).unwrap();
        let direct: f64 = (0..1u64 << 10)
            .map(|b| model.energy_of(SpinConfig::from_bits(b, 10).spins()).exp())
            .sum::<f64>()
            .ln();
        assert!((model.log_partition().unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn probabilities_normalize_and_are_flip_symmetric() {
        for seed in 0..5 {
            let model = IsingModel::random(10, 0.3, 0.1, 1.0, seed).unwrap();
            let dist = model.exact_distribution().unwrap();
            let total: f64 = dist.probs.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "sum = {total}");
            for bits in [0u64, 5, 77, 1000] {
                let cfg = SpinConfig::from_bits(bits, 10);
                assert_eq!(
                    model.exact_probability(&cfg).unwrap(),
                    model.exact_probability(&cfg.flipped()).unwrap()
                );
            }
        }
    }

    #[test]
    fn grid_models() {
        let ferro = IsingModel::grid(3, CouplingScheme::Ferromagnet { beta: 0.7 }).unwrap();
        assert_eq!(ferro.p(), 9);
        assert_eq!(ferro.num_edges(), 18);
        assert!(ferro.edges().all(|(_, t)| t == 0.7));
        assert!((0..9).all(|u| ferro.degree(u) == 4));
        assert_eq!(ferro.min_coupling(), Some(0.7));
        assert_eq!(ferro.max_coupling(), Some(0.7));

        let glass = IsingModel::grid(4, CouplingScheme::SpinGlass { beta: 1.0, seed: 3 }).unwrap();
        assert_eq!(glass.p(), 16);
        assert_eq!(glass.num_edges(), 32);
        assert!(glass.edges().all(|(_, t)| t.abs() == 1.0));
        let again = IsingModel::grid(4, CouplingScheme::SpinGlass { beta: 1.0, seed: 3 }).unwrap();
        assert_eq!(glass, again);
        assert!(glass.edges().any(|(_, t)| t < 0.0) && glass.edges().any(|(_, t)| t > 0.0));

        let square = IsingModel::grid(2, CouplingScheme::Ferromagnet { beta: 1.0 }).unwrap();
        assert_eq!(square.num_edges(), 4);
        assert!((0..4).all(|u| square.degree(u) == 2));

        assert!(IsingModel::grid(1, CouplingScheme::Ferromagnet { beta: 1.0 }).is_err());
        assert!(IsingModel::grid(3, CouplingScheme::Ferromagnet { beta: 0.0 }).is_err());
    }

    #[test]
    fn random_models() {
        assert_eq!(
            IsingModel::random(6, 0.0, 0.5, 1.0, 1).unwrap().num_edges(),
            0
        );
        assert_eq!(
            IsingModel::random(3, 1.0, 0.5, 1.0, 1).unwrap().num_edges(),
            3
        );
        assert_eq!(
            IsingModel::random(8, 0.5, 0.5, 1.0, 9).unwrap(),
            IsingModel::random(8, 0.5, 0.5, 1.0, 9).unwrap()
        );
        assert!(matches!(
            IsingModel::random(3, 0.5, 1.0, 0.5, 1),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn derived_parameters_match_brute_force() {
        for seed in 0..20 {
            let model = IsingModel::random(9, 0.35, 0.2, 1.5, seed).unwrap();
            let mut deg = vec![0; 9];
            let mut mags = Vec::new();
            for i in 0..9 {
                for j in i + 1..9 {
                    let t = model.coupling(i, j);
                    if t != 0.0 {
                        deg[i] += 1;
                        deg[j] += 1;
                        mags.push(t.abs());
                    }
                }
            }
            assert!(model.edges().all(|(_, t)| t != 0.0));
            assert_eq!(model.max_degree(), deg.iter().copied().max().unwrap());
            if !mags.is_empty() {
                assert_eq!(
                    model.min_coupling().unwrap(),
                    mags.iter().copied().fold(f64::INFINITY, f64::min)
                );
                assert_eq!(
                    model.max_coupling().unwrap(),
                    mags.iter().copied().fold(0.0, f64::max)
                );
            }
        }
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(IsingModel::new(3, [((0, 0), 1.0)]).is_err());
        assert!(IsingModel::new(3, [((0, 3), 1.0)]).is_err());
        assert!(IsingModel::new(3, [((0, 1), 0.0)]).is_err());
        assert!(IsingModel::new(3, [((0, 1), 1.0), ((1, 0), 2.0)]).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let model = IsingModel::random(12, 0.4, 0.1, 2.0, 17).unwrap();
        let text = model.to_json_string();
        let back = IsingModel::from_json_str(&text).unwrap();
        assert_eq!(model, back);
        assert!(text.starts_with("{\"p\": 12, \"edges\": [{\"i\": 0"));
        assert!(IsingModel::from_json_str(
            "{\"p\": 3, \"edges\": [{\"i\": 2, \"j\": 1, \"theta\": 1.0}]}"
        )
        .is_err());
    }

    #[test]
    fn exact_correlations_match_distribution() {
        let model = IsingModel::random(6, 0.5, 0.3, 1.0, 2).unwrap();
        let dist = model.exact_distribution().unwrap();
        let corr = model.exact_correlations().unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let direct = dist.expect(|c| f64::from(c.spins()[i] * c.spins()[j]));
                assert!((corr[i][j] - direct).abs() < 1e-12);
            }
        }
    }
}
