//! Learning zero-field Ising models from i.i.d. samples with the
//! regularized interaction screening estimator.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`]: coupling graphs, benchmark instances, exact enumeration.
//! * [`sampler`]: exact and Glauber sampling, sample file formats.
//! * [`objective`]: the interaction screening objective around one spin.
//! * [`solver`]: proximal gradient minimization of smooth + l1 objectives.
//! * [`estimator`]: per-node fits, penalty schedules, structure recovery.
//! * [`theory`]: sample-complexity calculators and verification oracles.
//! * [`experiment`]: sample-complexity sweeps and error curves.

pub mod error;
pub mod estimator;
pub mod experiment;
pub mod model;
pub mod numeric;
pub mod objective;
pub mod rng;
pub mod sampler;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
pub use estimator::{
    lambda_schedule, rise_fit, square_error, structure_rise, EdgeSet, LambdaMode, NodeEstimate,
    StructureEstimate,
};
pub use model::{CouplingScheme, IsingModel, SpinConfig, MAX_ENUMERATION_SPINS};
pub use objective::{CouplingVector, NodeView};
pub use sampler::{sample_exact, sample_glauber, GlauberConfig, SampleSet, SamplerKind};
pub use solver::{minimize, SolveReport, SolverConfig};
