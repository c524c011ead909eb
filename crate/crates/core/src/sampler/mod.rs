//! Drawing spin configurations from an [`IsingModel`].
//!
//! Two samplers are provided: exact inverse-CDF sampling over the enumerated
//! distribution (small `p` only) and single-site heat-bath Glauber dynamics.
//! Both are deterministic functions of their seed.

mod io;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::IsingModel;
use crate::rng::{rng_from_seed, SpinRng};

/// `n` configurations of `p` spins stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    p: usize,
    n: usize,
    data: Vec<i8>,
}

impl SampleSet {
    pub fn new(p: usize, n: usize, data: Vec<i8>) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::input(format!(
                "sample set needs p >= 1 and n >= 1, got p = {p}, n = {n}"
            )));
        }
        if data.len() != n * p {
            return Err(Error::input(format!(
                "expected {} spins, got {}",
                n * p,
                data.len()
            )));
        }
        if data.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::input("sample entries must be -1 or +1"));
        }
        Ok(SampleSet { p, n, data })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::input("rows of unequal length"));
        }
        Self::new(p, rows.len(), rows.concat())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, k: usize) -> &[i8] {
        &self.data[k * self.p..(k + 1) * self.p]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[i8]> + '_ {
        self.data.chunks_exact(self.p)
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.data
    }

    /// The first `n` rows.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n {
            return Err(Error::input(format!(
                "cannot truncate {} samples to {n}",
                self.n
            )));
        }
        Ok(SampleSet {
            p: self.p,
            n,
            data: self.data[..n * self.p].to_vec(),
        })
    }

    /// Every row repeated `times` times in place.
    pub fn repeated(&self, times: usize) -> Self {
        let data = self
            .rows()
            .flat_map(|r| std::iter::repeat_n(r, times).flatten().copied())
            .collect();
        SampleSet {
            p: self.p,
            n: self.n * times,
            data,
        }
    }

    /// Relabels columns: old spin `v` becomes spin `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        crate::model::check_permutation(perm, self.p)?;
        let mut data = vec![0i8; self.data.len()];
        for (src, dst) in self.rows().zip(data.chunks_exact_mut(self.p)) {
            for (v, &s) in src.iter().enumerate() {
                dst[perm[v]] = s;
            }
        }
        Ok(SampleSet {
            p: self.p,
            n: self.n,
            data,
        })
    }
}

/// Schedule for [`sample_glauber`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlauberConfig {
    pub burn_in_sweeps: usize,
    pub thinning_sweeps: usize,
    pub seed: u64,
}

impl GlauberConfig {
    pub const DEFAULT_BURN_IN: usize = 1000;
    pub const DEFAULT_THINNING: usize = 10;

    pub fn with_seed(seed: u64) -> Self {
        GlauberConfig {
            burn_in_sweeps: Self::DEFAULT_BURN_IN,
            thinning_sweeps: Self::DEFAULT_THINNING,
            seed,
        }
    }
}

/// Cumulative weights of the half-space of configurations with the top spin
/// fixed to `+1`, in Gray-code order. The mirror half is reached by a fair
/// global flip.
struct ExactTable {
    p: usize,
    cumulative: Vec<f64>,
}

impl ExactTable {
    fn new(model: &IsingModel) -> Result<Self> {
        model.check_enumerable()?;
        let p = model.p();
        let log_z = model.log_partition()?;
        let mut cumulative = Vec::with_capacity(1 << (p - 1));
        let mut running = 0.0;
        model.walk_states(p - 1, |_, e| {
            running += 2.0 * (e - log_z).exp();
            cumulative.push(running);
        });
        Ok(ExactTable { p, cumulative })
    }

    fn draw(&self, rng: &mut SpinRng, out: &mut [i8]) {
        let total = *self.cumulative.last().unwrap();
        let target = rng.random::<f64>() * total;
        let k = self
            .cumulative
            .partition_point(|&c| c <= target)
            .min(self.cumulative.len() - 1) as u64;
        let gray = k ^ (k >> 1);
        let flip: i8 = if rng.random_bool(0.5) { -1 } else { 1 };
        for (i, s) in out.iter_mut().enumerate() {
            let up = i == self.p - 1 || gray >> i & 1 == 1;
            *s = flip * if up { 1 } else { -1 };
        }
    }
}

/// `n` i.i.d. draws from the exact distribution of an enumerable model.
pub fn sample_exact(model: &IsingModel, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    let table = ExactTable::new(model)?;
    let p = model.p();
    let mut rng = rng_from_seed(seed);
    let mut data = vec![0i8; n * p];
    for row in data.chunks_exact_mut(p) {
        table.draw(&mut rng, row);
    }
    Ok(SampleSet { p, n, data })
}

/// Heat-bath update of every site in order `0..p`.
pub fn glauber_sweep(adjacency: &[Vec<(usize, f64)>], state: &mut [i8], rng: &mut SpinRng) {
    for i in 0..state.len() {
        let field: f64 = adjacency[i]
            .iter()
            .map(|&(j, t)| t * f64::from(state[j]))
            .sum();
        let prob_up = 1.0 / (1.0 + (-2.0 * field).exp());
        state[i] = if rng.random::<f64>() < prob_up { 1 } else { -1 };
    }
}

/// Samples recorded from a single Glauber chain started at a uniformly random
/// configuration: `burn_in_sweeps` discarded sweeps, then one recorded state
/// after every `thinning_sweeps` sweeps.
pub fn sample_glauber(model: &IsingModel, n: usize, config: &GlauberConfig) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    if config.thinning_sweeps == 0 {
        return Err(Error::input("thinning_sweeps must be at least 1"));
    }
    let p = model.p();
    let adjacency = model.neighbors();
    let mut rng = rng_from_seed(config.seed);
    let mut state: Vec<i8> = (0..p)
        .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
        .collect();
    for _ in 0..config.burn_in_sweeps {
        glauber_sweep(&adjacency, &mut state, &mut rng);
    }
    let mut data = Vec::with_capacity(n * p);
    for _ in 0..n {
        for _ in 0..config.thinning_sweeps {
            glauber_sweep(&adjacency, &mut state, &mut rng);
        }
        data.extend_from_slice(&state);
    }
    Ok(SampleSet { p, n, data })
}

/// Which sampler to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SamplerKind {
    Exact,
    Glauber {
        burn_in_sweeps: usize,
        thinning_sweeps: usize,
    },
}

impl SamplerKind {
    pub fn draw(&self, model: &IsingModel, n: usize, seed: u64) -> Result<SampleSet> {
        match *self {
            SamplerKind::Exact => sample_exact(model, n, seed),
            SamplerKind::Glauber {
                burn_in_sweeps,
                thinning_sweeps,
            } => sample_glauber(
                model,
                n,
                &GlauberConfig {
                    burn_in_sweeps,
                    thinning_sweeps,
                    seed,
                },
            ),
        }
    }
}

/// Empirical second-moment matrix `H^n_ij = (1/n) sum_k s_i s_j` over the
/// spins other than `exclude`, in ascending vertex order.
pub fn empirical_covariance(samples: &SampleSet, exclude: usize) -> Result<Vec<Vec<f64>>> {
    let p = samples.p();
    if exclude >= p {
        return Err(Error::input(format!(
            "vertex {exclude} out of range for p = {p}"
        )));
    }
    let others: Vec<usize> = (0..p).filter(|&i| i != exclude).collect();
    let m = others.len();
    let mut counts = vec![0i64; m * m];
    for row in samples.rows() {
        for (a, &i) in others.iter().enumerate() {
            let si = row[i];
            for (b, &j) in others.iter().enumerate().skip(a + 1) {
                counts[a * m + b] += i64::from(si * row[j]);
            }
        }
    }
    let n = samples.n() as f64;
    let mut h = vec![vec![0.0; m]; m];
    for a in 0..m {
        h[a][a] = 1.0;
        for b in a + 1..m {
            let v = counts[a * m + b] as f64 / n;
            h[a][b] = v;
            h[b][a] = v;
        }
    }
    Ok(h)
}
