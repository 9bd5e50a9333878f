//! Ray-acoustics modeling of underwater sound channels.
//!
//! The crate is organized bottom-up:
//!
//! - [`ssp`]: sound-speed profiles c(z) and channel-axis location;
//! - [`ray`]: ray tracing through stratified water and analytic span
//!   integrals;
//! - [`field`]: transmission-loss fields sampled on range-depth grids;
//! - [`shadow`]: shadow-zone geometry and coverage accounting;
//! - [`ris`]: reflecting surface arrays, their gain, phase profiles, and
//!   unit-count sizing;
//! - [`deploy`]: placement analysis — span ratios, reachable range of a
//!   duct-mounted reflector, depth optimization, multi-hop planning;
//! - [`dynamics`]: pose disturbances of a moored array and phase
//!   compensation from gyro measurements.
//!
//! Supporting modules: [`error`], [`optim`] (bounded 1-D optimizers),
//! [`quad`] (adaptive quadrature).
//!
//! Conventions: depth `z` is positive downward in meters, range `r` is
//! horizontal distance in meters, grazing angles are in radians and
//! positive for downward travel, frequencies in Hz, losses in dB.

pub mod deploy;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod optim;
pub mod quad;
pub mod ray;
pub mod ris;
pub mod shadow;
pub mod ssp;

pub use error::{Error, Result};
pub use field::{GridSpec, LinkBudget, Region, TLGrid};
pub use ray::{RayPath, RayState, TraceConfig};
pub use ssp::SoundSpeedProfile;
