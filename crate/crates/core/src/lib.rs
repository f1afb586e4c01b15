//! Max-stable sketches of non-negative signals.
//!
//! A sketch of width `K` stores `E_j(f) = max_i f(i) Z_j(i)` where the
//! `Z_j(i)` are standard α-Fréchet variates regenerated on demand from a
//! master seed. Each `E_j(f)` is α-Fréchet with scale `‖f‖_α`, and the map
//! `f ↦ E(f)` is max-linear, so sketches:
//!
//! * build in one pass over a stream, independent of order and duplicates,
//! * merge exactly by component-wise maximum ([`MaxStableSketch::merge`]),
//! * estimate `‖f‖_α`, the distance `ρ_α(f, g) = Σ |f^α - g^α|` and the
//!   dominance norm `‖max_r f_r‖_α` ([`estimators`]),
//! * recover large entries `f(i₀)` exactly with a self-certifying
//!   criterion ([`pointquery`]).

pub mod calibrate;
pub mod error;
pub mod estimators;
pub mod frechet;
pub mod oracle;
pub mod pointquery;
pub mod sketch;
pub mod variate;

pub use error::{Error, FormatError, Result};
pub use estimators::{
    distance, dominance_norm, estimate_norm, k_for_norm, norm_median, norm_moment,
    DistanceEstimate, EstimatorKind, MomentRange, NormEstimate, SizingParams,
};
pub use frechet::FrechetParams;
pub use pointquery::{
    c_theta, criterion, k_for_criterion, k_for_point, point_estimate, point_query,
    success_probability, PointQueryResult, DEFAULT_TOLERANCE,
};
pub use sketch::{MaxStableSketch, Signal, SketchConfig, StreamItem, FORMAT_VERSION};
pub use variate::SeedSpec;
