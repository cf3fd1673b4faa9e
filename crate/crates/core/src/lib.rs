//! Exact joint statistics of the number of parts and the maximum part of a
//! uniformly random integer composition.
//!
//! A composition of `N` corresponds to a bitstring of length `n = N - 1` with
//! a `1` appended: every part is the waiting time until the next `1`. Under
//! this correspondence the number of parts is one more than the number of
//! `1`s, and the maximum part is one more than the longest run of `0`s.
//! Four bitstring ensembles are supported (see [`Ensemble`]); the pinned
//! solus ensemble corresponds to compositions with every part at least two.
//!
//! Everything that counts is computed with arbitrary-precision integers and
//! rationals. Real-valued quantities (asymptotic predictions, the conjecture
//! probe, sequence acceleration) use 50-digit binary floating point.

pub mod acceleration;
pub mod asymptotics;
pub mod cache;
pub mod cli;
pub mod count_tables;
pub mod ensemble;
pub mod gap_counts;
pub mod oracle;
pub mod real;
pub mod series;
pub mod statistics;

pub use count_tables::{build_table, ensemble_size, JointCountTable, TableError};
pub use ensemble::{Ensemble, Family};
pub use statistics::{Method, MomentSums, MomentSummary, StatsError};

/// Arbitrary-precision signed integer used for every count.
pub type ExactInteger = num_bigint::BigInt;

/// Arbitrary-precision rational used for every exact moment.
pub type ExactRational = num_rational::BigRational;
