//! Numerical thresholds used across the crate.

/// Relative tolerance for structural identities (scaled by the max-norm).
pub const STRUCTURE: f64 = 1e-9;
/// Absolute tolerance for reconstruction residuals.
pub const NUMERIC: f64 = 1e-10;
/// Relative LU pivot below which the Lyapunov operator counts as singular.
pub const PIVOT: f64 = 1e-12;
/// Multiplier in the Kalman rank threshold `factor * n * eps * sigma_max`.
pub const RANK_FACTOR: f64 = 64.0;
/// Gap separating eigenvalue clusters of T_S.
pub const CLUSTER_GAP: f64 = 1e-8;
/// Distance from 1 below which a covariance eigenvalue counts as pinned.
pub const PIN: f64 = 1e-7;
/// G is Hurwitz when its spectral abscissa is below `-HURWITZ`.
pub const HURWITZ: f64 = 1e-12;
/// Jump-operator eigenvalues in `[-JUMP_CLAMP, 0)` are set to zero.
pub const JUMP_CLAMP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub structure: f64,
    pub numeric: f64,
    pub pivot: f64,
    pub rank_factor: f64,
    pub cluster_gap: f64,
    pub pin: f64,
    pub hurwitz: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structure: STRUCTURE,
            numeric: NUMERIC,
            pivot: PIVOT,
            rank_factor: RANK_FACTOR,
            cluster_gap: CLUSTER_GAP,
            pin: PIN,
            hurwitz: HURWITZ,
        }
    }
}
