//! Cardinality-constrained maximization of weakly submodular set functions.
//!
//! The crate provides greedy, stochastic greedy and distributed greedy selection over any
//! [`SetFunction`], brute-force submodularity and subadditivity ratios for small ground sets,
//! approximation certificates, and two concrete objective families: the R² of least-squares
//! regression and the support objective of a smooth concave function (quadratic or logistic).
//! The [`experiment`] module runs the synthetic feature-selection benchmarks.

pub mod certificate;
pub mod concave;
pub mod data;
pub mod error;
pub mod experiment;
pub mod greedy;
pub mod linalg;
pub mod ratio;
pub mod regression;
pub mod rng;
pub mod set_function;

pub use certificate::{make_certificate, BoundCertificate, BoundKind, RatioSource};
pub use error::{Error, Result};
pub use greedy::{distributed_greedy, greedy, stochastic_greedy, DistributedResult, PartitionScheme};
pub use ratio::{RatioReport, RatioScope};
pub use regression::{R2Objective, RegressionInstance};
pub use rng::RandomSource;
pub use set_function::{GroundSet, Incremental, Oracle, SelectionTrace, SetFunction, Step};
