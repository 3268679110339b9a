//! Sampling and counting labeled graphs with degree intervals.
//!
//! The core types are generic over the scalar type of transition
//! probabilities (any [`Scalar`]: `f32`, `f64` or exact rationals); the
//! aliases below fix the common choices.

pub mod chains;
pub mod counting;
pub mod error;
pub mod family;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod projection;
pub mod scalar;
pub mod verify;
pub mod weights;

pub use chains::{ChainKind, Move, RunConfig, TransitionKernel};
pub use counting::{estimate_count, estimate_count_m, sample_interval, CountConfig, CountEstimate, IntervalSampler};
pub use error::{Error, Result};
pub use graph::{
    feasible_edge_counts, find_degree_sequence, intervals_from_observation, is_graphical, realize, realize_in_interval, DegreeInterval,
    DegreeSequence, Graph, NearRegularParams,
};
pub use scalar::Scalar;
pub use weights::WeightModel;

/// Transition matrix in double precision.
pub type Matrix = oracle::StochasticMatrix<f64>;
/// Transition matrix in single precision.
pub type MatrixF32 = oracle::StochasticMatrix<f32>;
/// Transition matrix with exact rational entries.
pub type ExactMatrix = oracle::StochasticMatrix<num_rational::BigRational>;
/// Sequence statistics in double precision.
pub type Stats = weights::SequenceStats<f64>;
