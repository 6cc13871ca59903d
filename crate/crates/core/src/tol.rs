//! Numerical tolerances shared by the checks in this crate.

/// Unitarity, completeness and trace preservation.
pub const UNITARY: f64 = 1e-12;
/// Eigen-relations and cross-path agreement of long series.
pub const EIGEN: f64 = 1e-10;
/// Relative error allowed for small-parameter physics approximations.
pub const PHYSICS_REL: f64 = 1e-2;
/// Smallest eigenvalue a density matrix may have before it counts as non-PSD.
pub const PSD_FLOOR: f64 = -1e-10;
/// Kraus operators whose largest entry falls below this are dropped.
pub const PRUNE: f64 = 1e-300;
/// Walk angles above this are outside the small-angle Dirac regime.
pub const SMALL_ANGLE_WARN: f64 = 0.3;
