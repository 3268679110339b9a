//! Exact desk-scale ground truth: enumeration, counting, explicit matrices
//! and their spectra, alternating structures, and exhaustive checks of the
//! structural claims the samplers rely on.

mod alternating;
mod count;
mod decomposition;
mod enumerate;
mod matrix;
mod spectral;
pub mod theorems;

pub use alternating::{find_alternating_path, satisfies_stability_inequality, short_cycle_transform, AlternatingPath, TransformGoal};
pub use count::{
    binomial, count_interval, count_interval_m, count_realizations, for_each_in_box, interval_counts, DegreeCountTable, COUNT_MEMO_CAP,
    TABLE_MAX_N,
};
pub use decomposition::{canonical_decomposition, path_balance, Component, ComponentKind};
pub use enumerate::{enumerate_graphs, Constraint, StateSpace, ENUMERATION_MAX_N};
pub use matrix::{build_count_matrix, build_matrix, is_connected, CountMatrix, StochasticMatrix};
pub use spectral::{
    congestion_check, eigenvalues, mixing_time, mixing_time_bound, spectral_gap, stationarity_residual, stationary_distribution, tv_curve,
    CongestionReport, DENSE_EIGEN_CAP,
};
