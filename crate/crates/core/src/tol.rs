//! Numerical tolerances shared across the crate.
//!
//! Relative tolerances multiply the natural scale of the quantity being
//! compared (a Frobenius norm, the largest singular value, or a product of
//! input norms).

/// Eigen/polar reconstruction, relative to the Frobenius norm.
pub const TOL_EIG: f64 = 1e-11;

/// Singular values below `RANK_TOL · σ_max` count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Largest relative anti-Hermitian part accepted as Hermitian input.
pub const TOL_HERM: f64 = 1e-10;

/// Algebraic identity checks, relative to the product of input norms.
pub const TOL_ALG: f64 = 1e-10;

/// Relative agreement for determinant identities.
pub const REL_TOL_DET: f64 = 1e-9;

/// Fuglede-Kadison determinant (relative to the operator norm) below which
/// an element is treated as singular and factorization is refused.
pub const DET_FLOOR: f64 = 1e-8;

/// Subspace membership and principal-angle distance.
pub const TOL_SUB: f64 = 1e-8;

/// Agreement between independently computed canonical factorizations.
pub const CROSS_TOL: f64 = 1e-8;

/// Residual bound for the outer certificate `h x = 1`.
pub const OUTER_CERT_TOL: f64 = 1e-8;

/// Relative floor under which a distance counts as zero.
pub const DIST_FLOOR: f64 = 1e-8;

/// Required decrease `Δ(1 − t h) < 1 − margin` for an Arens-Hoffman witness.
pub const AH_MARGIN: f64 = 1e-6;
pub const AH_GRID: usize = 64;
pub const AH_GRID_MAX: usize = 4096;

/// Szegő minimization: relative value tolerance for scalar (all blocks of
/// size one) and block partitions.
pub const OPT_TOL_SCALAR: f64 = 1e-4;
pub const OPT_TOL_BLOCK: f64 = 1e-3;
pub const GRAD_TOL: f64 = 1e-8;
pub const MAX_ITERS: usize = 5000;
pub const RESTARTS: usize = 8;
/// Central-difference step, scaled by `max(1, |coordinate|)`.
pub const FD_STEP: f64 = 1e-5;
