//! Tolerances shared across modules. Every function that uses one of these
//! also has a variant or option that accepts an override.

/// Algebraic identities: homogeneity, scaling contracts, determinant checks.
pub const ALGEBRAIC: f64 = 1e-9;

/// Geometric round trips that pass through hull enumeration or an LP.
pub const GEOMETRIC: f64 = 1e-6;

/// Orthonormality of projection frames.
pub const FRAME: f64 = 1e-10;

/// Symmetry of ellipsoid shape matrices.
pub const SYMMETRY: f64 = 1e-10;

/// Feasibility slack allowed for a volume-ratio witness.
pub const FEASIBILITY: f64 = 1e-7;

/// Relative tolerance for rank decisions (singular value / largest singular value).
pub const RANK: f64 = 1e-10;

/// Relative hyperplane-distance tolerance used by the convex hull.
pub const HULL: f64 = 1e-10;

/// Largest dimension for which vertex enumeration / exact volumes are offered.
pub const MAX_EXACT_DIM: usize = 6;
