//! Reflect-array modeling: beamforming gain, element phasing, and sizing.
//!
//! The array is treated as a phase-controlled mirror with an aggregate
//! power gain; once steered, it re-radiates as a point source and the rest
//! of the toolkit traces it like any other source.

use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{LinkBudget, SourceGeometry};
use crate::shadow::AngularBounds;

/// Largest aggregate gain the sizing search will entertain; beyond this the
/// element count (10^8) stops being a deployable quantity.
pub const MAX_GAIN_DB: f64 = 80.0;

/// A phase-controlled reflecting array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisArray {
    /// Total element count.
    pub n_units: u64,
    /// Elements arranged on a square grid (metadata; the gain model only
    /// sees the total count).
    pub square: bool,
    /// Element spacing, m.
    pub spacing: f64,
    /// Placement depth, m.
    pub depth: f64,
    /// Placement range, m.
    pub range: f64,
    /// Operating frequency, Hz.
    pub frequency: f64,
}

impl RisArray {
    pub fn validate(&self) -> Result<()> {
        if self.n_units < 1 {
            return Err(Error::InvalidConfig("array needs at least one element".into()));
        }
        if !(self.spacing > 0.0) {
            return Err(Error::InvalidConfig("element spacing must be positive".into()));
        }
        if !(self.frequency > 0.0) {
            return Err(Error::InvalidConfig("frequency must be positive".into()));
        }
        Ok(())
    }

    pub fn gain_db(&self) -> f64 {
        beamforming_gain(self.n_units)
    }
}

/// Coherent power gain of `n_units` phase-aligned elements: `10 log10(N)`.
pub fn beamforming_gain(n_units: u64) -> f64 {
    10.0 * (n_units.max(1) as f64).log10()
}

/// Per-element phase compensation steering an incident plane wave at
/// `theta_in` into `theta_out`, with the array face tilted by `beta`.
///
/// Element `n` (1-based) gets `(n-1) * k * d * (sin(theta_in + beta) -
/// sin(theta_out - beta))`, `k = 2 pi f / c_local`. A zero tilt with equal
/// angles is specular and needs no phasing.
pub fn phase_profile(
    array: &RisArray,
    theta_in: f64,
    theta_out: f64,
    beta: f64,
    c_local: f64,
) -> Result<Vec<f64>> {
    array.validate()?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    if !(theta_in.abs() < half_pi) || !(theta_out.abs() < half_pi) {
        return Err(Error::InvalidConfig(
            "steering angles must lie strictly between -90 and 90 degrees".into(),
        ));
    }
    if !(c_local > 0.0) {
        return Err(Error::InvalidConfig("local sound speed must be positive".into()));
    }
    let k = 2.0 * std::f64::consts::PI * array.frequency / c_local;
    let step = k * array.spacing * ((theta_in + beta).sin() - (theta_out - beta).sin());
    Ok((0..array.n_units).map(|n| n as f64 * step).collect())
}

/// Write a phase profile as CSV: header `n,phase_rad`, 1-based element index.
pub fn write_phase_csv<W: io::Write>(phases: &[f64], w: &mut W) -> io::Result<()> {
    writeln!(w, "n,phase_rad")?;
    for (i, p) in phases.iter().enumerate() {
        writeln!(w, "{},{:.8e}", i + 1, p)?;
    }
    Ok(())
}

/// A steered array re-emitting as a point source with its coherent gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualSource {
    pub depth: f64,
    pub range: f64,
    pub bounds: AngularBounds,
    /// Aggregate gain added to the link budget, dB.
    pub gain: f64,
}

impl VirtualSource {
    /// Placement for field accumulation; `mirror` re-emits toward
    /// decreasing range.
    pub fn geometry(&self, mirror: bool) -> SourceGeometry {
        SourceGeometry {
            depth: self.depth,
            range_offset: self.range,
            mirror,
        }
    }
}

/// Collapse a steered array into the equivalent point source at its
/// position, radiating `bounds` with the array's coherent gain.
pub fn reflect_as_source(array: &RisArray, bounds: AngularBounds) -> Result<VirtualSource> {
    array.validate()?;
    Ok(VirtualSource {
        depth: array.depth,
        range: array.range,
        bounds,
        gain: array.gain_db(),
    })
}

/// Smallest element count whose gain closes the two-leg budget
/// `tl_to_ris + tl_ris_to_target` against `budget.allowed_loss_db()`.
///
/// With `square`, the count is rounded up to the next full square grid.
/// Fails once the needed gain exceeds [`MAX_GAIN_DB`].
pub fn required_units(
    budget: &LinkBudget,
    tl_to_ris: f64,
    tl_ris_to_target: f64,
    square: bool,
) -> Result<u64> {
    if !(tl_to_ris >= 0.0) || !(tl_ris_to_target >= 0.0) {
        return Err(Error::InvalidConfig("transmission losses must be nonnegative".into()));
    }
    let needed_db = tl_to_ris + tl_ris_to_target - budget.allowed_loss_db();
    if needed_db <= 0.0 {
        return Ok(1);
    }
    if needed_db > MAX_GAIN_DB {
        return Err(Error::InfeasibleUnits {
            needed_db,
            cap_db: MAX_GAIN_DB,
        });
    }
    // Back off one ulp-scale epsilon so an exactly-achievable gain does not
    // round up to the next count.
    if square {
        let side = (10f64.powf(needed_db / 20.0) - 1e-9).ceil() as u64;
        Ok(side * side)
    } else {
        Ok((10f64.powf(needed_db / 10.0) - 1e-9).ceil() as u64)
    }
}
