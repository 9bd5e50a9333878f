//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building profiles, tracing rays, or
/// evaluating placement and coverage.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Profile parameters are non-physical or inconsistent.
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// A depth argument fell outside the profile domain `[0, z_max]`.
    #[error("depth {depth} m outside profile domain [0, {z_max}] m")]
    DepthOutOfRange { depth: f64, z_max: f64 },

    /// The profile has no sound-channel axis (constant or monotone speed).
    #[error("no sound-channel axis: {0}")]
    NoAxis(String),

    /// A ray with the given launch angle cannot span the requested depths.
    #[error("no ray path: {0}")]
    NoPath(String),

    /// Surface-duct geometry requires the duct-bottom speed to exceed the
    /// source speed.
    #[error("no surface duct: source speed {c_source} m/s is not below duct speed {c_duct} m/s")]
    NoDuct { c_source: f64, c_duct: f64 },

    /// A configuration value (step sizes, grid shape, angle bounds, ...) is
    /// out of its documented domain.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A reflector placement violates its feasibility condition.
    #[error("infeasible placement: {0}")]
    InfeasiblePlacement(String),

    /// The requested link cannot be closed within the array-size cap.
    #[error("infeasible unit count: needed gain {needed_db:.2} dB exceeds cap {cap_db:.2} dB")]
    InfeasibleUnits { needed_db: f64, cap_db: f64 },

    /// A modeling assumption of the called operation does not hold for the
    /// supplied inputs.
    #[error("model assumption violated: {0}")]
    ModelAssumption(String),
}
