//! Algebraic-connectivity maximization for UAV networks assisted by
//! reconfigurable intelligent surfaces (RIS).
//!
//! UEs and UAVs form a graph whose direct links clear SNR thresholds. Each
//! RIS can add one reflected UE-UAV link; the solvers in [`optimize`] pick
//! which links to add so that the second-smallest Laplacian eigenvalue
//! (lambda_2, the Fiedler value) grows the most.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the usual `f64` choice.

pub mod candidates;
pub mod channel;
pub mod config;
pub mod error;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod optimize;
pub mod scalar;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point = scenario::Point3<f64>;
pub type RadioParams64 = scenario::RadioParams<f64>;
pub type Scenario64 = scenario::Scenario<f64>;
pub type Layout64 = scenario::Layout<f64>;
pub type Graph64 = graph::Graph<f64>;
pub type Laplacian64 = graph::Laplacian<f64>;
pub type SpectralResult64 = graph::SpectralResult<f64>;
pub type CandidateLink64 = candidates::CandidateLink<f64>;
pub type Selection64 = optimize::Selection<f64>;

pub type Scenario32 = scenario::Scenario<f32>;
pub type Graph32 = graph::Graph<f32>;
pub type Laplacian32 = graph::Laplacian<f32>;
