//! Numerical laboratory for volume ratios between projections of convex bodies.
//!
//! Bodies are centrally symmetric polytopes given by generators (absolute
//! convex hulls), their polars, and general V-polytopes. On top of exact and
//! Monte Carlo volumes the crate provides Gaussian random polytopes, Haar
//! projections, Löwner normalization and a determinant-maximization solver for
//! the volume ratio `vr(K, L)`. The [`experiments`] module turns the
//! finitely-checkable inequalities of the theory into seeded, reproducible runs.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod random;
pub mod ratio;
pub mod rng;
pub mod tol;
pub mod volume;

pub use error::{Error, Result};
pub use geometry::{
    difference_body, h_to_v, minkowski_norm, op_norm_between, polar, project_body, support,
    FacetGauge, GeneralVPolytope, HPolytope, LinearMap, Projection, SymVPolytope,
};
pub use ratio::{loewner_normalize, mvee, vr_projected, vr_upper, Ellipsoid, VrOptions, VrResult};
pub use volume::{ball_volume, exact_volume, mc_volume, VolumeEstimate, VolumeMethod};
