//! Numerical tolerances shared by every module.
//!
//! Algebraic checks (antisymmetry, Jacobi, ranks) are relative to the largest
//! structure constant; geometric checks scale with `1 + max |input|`.

/// Relative tolerance for algebraic identities on structure constants.
pub const ALG_REL: f64 = 1e-9;

/// Base tolerance for geometric quantities.
pub const NUM_BASE: f64 = 1e-9;

/// Default acceptance threshold for a Weyl–Einstein root (relative to `1 + |Ric|`).
pub const ROOT_TOL: f64 = 1e-8;

/// Absolute distance (orthonormal frame) under which two roots are merged.
pub const DEDUP_TOL: f64 = 1e-6;

/// Relative tolerance for grouping eigenvalues of `S` into clusters.
pub const EIGEN_CLUSTER_REL: f64 = 1e-7;

/// `tau_num = 1e-9 * (1 + scale)`.
pub fn num_tol(scale: f64) -> f64 {
    NUM_BASE * (1.0 + scale)
}
