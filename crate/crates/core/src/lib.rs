//! Murmurations of elliptic curves, from first principles.
//!
//! The crate computes Frobenius traces `a_p = p + 1 - #E_p` by exact point
//! counting over prime fields, aggregates them over conductor/parity
//! datasets into murmuration series, reproduces the Chebyshev prime bias
//! mod 4, and runs two interpretable ML probes (PCA by deflated power
//! iteration, softmax logistic regression) on the resulting a_p vectors.
//!
//! Modules follow the pipeline order:
//!
//! * [`ecpoint`]  — curves, point counts, traces, a_p vectors
//! * [`chebyshev`] — prime remainder bias mod 4
//! * [`dataset`]  — corpus ingestion and S(parity, interval) selection
//! * [`murmur`]   — murmuration averages, dyadic windows, scale alignment
//! * [`learn`]    — PCA and multinomial logistic regression
//! * [`svg`]      — self-contained scatter plot emission

pub mod chebyshev;
pub mod dataset;
pub mod ecpoint;
pub mod error;
pub mod learn;
pub mod murmur;
pub mod svg;

pub use dataset::{ApMatrix, DatasetSelection, IsogenyClassRecord};
pub use ecpoint::{ApVector, CurveEquation, FrobeniusTrace, Reduction, ResidueTable};
pub use error::Error;
pub use learn::{LogisticModel, PcaModel, TrainConfig, TrainReport};
pub use murmur::MurmurationSeries;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
