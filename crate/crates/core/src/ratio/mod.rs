//! Volume ratios, ellipsoidal normalization and the derived quantities.

pub mod bounds;
mod ellipsoid;
mod search;
mod solver;

pub use bounds::{
    ball_reference, main_bound, main_bound_terms, qzn_bracket, regime_reference, sharpness_reference, trivial_bound,
};
pub use ellipsoid::{loewner_normalize, loewner_normalize_with_map, mvee, mvee_with_tolerance, Ellipsoid, MVEE_TOLERANCE};
pub use search::{pvr_povr_estimate, pvr_povr_with_pairs, sample_pairs, sharpness_search, PvrMode, SharpnessResult};
pub use solver::{
    vr_projected, vr_projected_with, vr_upper, vr_upper_affine, vr_upper_with, VrOptions, VrResult,
};
