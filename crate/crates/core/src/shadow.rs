//! Shadow-zone geometry and coverage accounting.
//!
//! Two regimes are handled. In deep water, a fan of rays from a shallow
//! source sweeps a belt across each deep depth exactly once on its way to
//! the seabed, so coverage of a range-depth window is the belt clipped to
//! the window, strip by strip. In shallow water with a surface duct, rays
//! below a critical grazing angle never leave the duct; the region beneath
//! it is dark beyond the steepest trajectory that barely escapes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Region;
use crate::ray::{self, TraceConfig};
use crate::ssp::SoundSpeedProfile;

/// Angular aperture of a source fan, radians; `theta_min < theta_max`,
/// positive angles point downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularBounds {
    pub theta_min: f64,
    pub theta_max: f64,
}

impl AngularBounds {
    pub fn symmetric(half_width: f64) -> Self {
        Self {
            theta_min: -half_width,
            theta_max: half_width,
        }
    }
}

/// Range at which the ray launched from `z0` at `theta0` first reaches the
/// deeper depth `z_deep`, composed from span quadrature.
///
/// Upward launches are followed through their refractive turn (or a surface
/// mirror when no turning depth exists above the source) and down to
/// `z_deep`. A ray that turns back up before `z_deep` has no arrival and
/// fails with [`Error::NoPath`].
pub fn first_arrival_range(
    profile: &SoundSpeedProfile,
    z0: f64,
    theta0: f64,
    z_deep: f64,
) -> Result<f64> {
    if !(z_deep > z0) {
        return Err(Error::InvalidConfig(
            "first arrival is defined below the source".into(),
        ));
    }
    if theta0 >= 0.0 {
        return ray::horizontal_span(profile, z0, theta0, z0, z_deep);
    }
    match ray::turning_depth(profile, z0, theta0, false) {
        Ok(z_t) => Ok(ray::horizontal_span(profile, z0, theta0, z_t, z0)?
            + ray::horizontal_span(profile, z0, theta0, z_t, z_deep)?),
        Err(Error::NoPath(_)) => {
            // No turn above the source: the ray mirrors off the surface.
            Ok(ray::horizontal_span(profile, z0, theta0, 0.0, z0)?
                + ray::horizontal_span(profile, z0, theta0, 0.0, z_deep)?)
        }
        Err(e) => Err(e),
    }
}

/// Coverage accounting for a deep range-depth window, entirely below the
/// source, insonified by a single downward pass of a fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeepShadowReport {
    pub window: Region,
    /// Window area, m^2.
    pub area_total: f64,
    /// Area swept by the fan's belt, m^2.
    pub area_covered: f64,
    /// Remainder, m^2.
    pub area_shadow: f64,
    /// `area_shadow / area_total`.
    pub proportion_shadow: f64,
}

/// Strip-integrate the fan's coverage belt over `window`.
///
/// At each depth, the steepest ray of the fan arrives nearest and the
/// shallowest (most upward) ray arrives farthest; the belt between them,
/// clipped to the window, is the covered part of that strip. This is exact
/// when every fan ray crosses each window depth exactly once (true for a
/// fan that dives to an absorbing seabed without turning).
pub fn deep_shadow_report(
    profile: &SoundSpeedProfile,
    z0: f64,
    bounds: AngularBounds,
    window: Region,
    n_strips: usize,
) -> Result<DeepShadowReport> {
    if !(bounds.theta_min < bounds.theta_max) {
        return Err(Error::InvalidConfig(
            "angular bounds must satisfy theta_min < theta_max".into(),
        ));
    }
    if !(window.z_min > z0) {
        return Err(Error::InvalidConfig(
            "deep window must lie entirely below the source".into(),
        ));
    }
    let n = n_strips.max(1);
    let dz = (window.z_max - window.z_min) / n as f64;
    let mut covered = 0.0;
    for j in 0..n {
        let z = window.z_min + (j as f64 + 0.5) * dz;
        let r_near = first_arrival_range(profile, z0, bounds.theta_max, z)?;
        let r_far = first_arrival_range(profile, z0, bounds.theta_min, z)?;
        let lo = r_near.max(window.r_min);
        let hi = r_far.min(window.r_max);
        covered += (hi - lo).max(0.0) * dz;
    }
    let area_total = window.area();
    let area_covered = covered.min(area_total);
    let area_shadow = area_total - area_covered;
    Ok(DeepShadowReport {
        window,
        area_total,
        area_covered,
        area_shadow,
        proportion_shadow: area_shadow / area_total,
    })
}

/// Largest grazing angle at `z_source` whose ray turns back before
/// reaching the speed barrier at `z_barrier`: `arccos(c_source / c_barrier)`.
///
/// Rays launched flatter than this stay trapped on the source's side of the
/// barrier. Fails with [`Error::NoDuct`] when the source speed is not below
/// the barrier speed.
pub fn critical_grazing_angle(
    profile: &SoundSpeedProfile,
    z_source: f64,
    z_barrier: f64,
) -> Result<f64> {
    let c_source = profile.sound_speed(z_source)?;
    let c_duct = profile.sound_speed(z_barrier)?;
    if c_source >= c_duct {
        return Err(Error::NoDuct { c_source, c_duct });
    }
    Ok((c_source / c_duct).acos())
}

/// Surface-shadow extent `(r_start, r_end)` carved by the surface-tangent
/// ray from a source at `z0`.
///
/// The tangent ray grazes the surface at `r_start`; near-surface ranges
/// beyond that lose direct sound until the ray completes one full
/// excursion down and back at `r_end`. An excursion that would pass the
/// seabed is capped there, which bounds the return distance from below —
/// with an absorbing bottom the true shadow reaches even farther.
pub fn first_bending_region(profile: &SoundSpeedProfile, z0: f64) -> Result<(f64, f64)> {
    let c_src = profile.sound_speed(z0)?;
    let c_surf = profile.surface_speed();
    if !(c_src < c_surf) {
        return Err(Error::ModelAssumption(
            "surface-tangent geometry needs the source slower than the surface".into(),
        ));
    }
    let theta_t = (c_src / c_surf).acos();
    let r_graze = ray::horizontal_span(profile, z0, theta_t, 0.0, z0)?;
    let z_floor = match ray::turning_depth(profile, z0, theta_t, true) {
        Ok(z_t) => z_t.min(profile.z_max()),
        Err(Error::NoPath(_)) => profile.z_max(),
        Err(e) => return Err(e),
    };
    let excursion = ray::horizontal_span(profile, z0, theta_t, 0.0, z_floor)?;
    Ok((r_graze, r_graze + 2.0 * excursion))
}

/// Area of the window `[0, r_max] x strips` left of nothing and right of a
/// reach curve: `sum over strips of (r_max - r_strip)+ * dz`.
pub fn area_above_curve(dz: f64, reach: &[f64], r_max: f64) -> f64 {
    reach.iter().map(|&r| (r_max - r).max(0.0) * dz).sum()
}

/// Shadow accounting beneath a surface duct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShallowShadowReport {
    /// Critical grazing angle at the source, rad.
    pub theta_critical: f64,
    /// Range extent of the window, m.
    pub r_max: f64,
    /// Depth extent of the window: duct bottom to seabed, m.
    pub z_top: f64,
    pub z_bottom: f64,
    pub area_total: f64,
    pub area_shadow: f64,
    pub proportion_shadow: f64,
}

/// Shadow area of the sub-duct window `[0, r_max] x [z_duct_bottom, seabed]`
/// for a source inside the duct at `z_source`.
///
/// Rays flatter than the critical angle never leave the duct; the window is
/// dark beyond the trajectory of the first ray that escapes, approximated
/// by tracing a ray 0.01 degrees steeper than critical.
pub fn shallow_shadow_area(
    profile: &SoundSpeedProfile,
    z_source: f64,
    z_duct_bottom: f64,
    r_max: f64,
    n_strips: usize,
) -> Result<ShallowShadowReport> {
    if !(r_max > 0.0) {
        return Err(Error::InvalidConfig("window range must be positive".into()));
    }
    let z_max = profile.z_max();
    if !(z_duct_bottom > z_source) || !(z_duct_bottom < z_max) {
        return Err(Error::InvalidConfig(
            "duct bottom must lie between the source and the seabed".into(),
        ));
    }
    let theta_c = critical_grazing_angle(profile, z_source, z_duct_bottom)?;
    let theta_escape = theta_c + 0.01f64.to_radians();
    let cfg = TraceConfig {
        max_range: 4.0 * r_max,
        ..TraceConfig::default()
    };
    let path = ray::trace_ray(profile, z_source, theta_escape, &cfg)?;

    // First crossing range of each depth strip along the escape ray.
    let n = n_strips.max(1);
    let dz = (z_max - z_duct_bottom) / n as f64;
    let mut reach = Vec::with_capacity(n);
    for j in 0..n {
        let z = z_duct_bottom + (j as f64 + 0.5) * dz;
        let mut r_cross = None;
        for w in path.states.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a.z <= z && b.z >= z) || (a.z >= z && b.z <= z) {
                let t = if (b.z - a.z).abs() < 1e-12 {
                    0.0
                } else {
                    (z - a.z) / (b.z - a.z)
                };
                r_cross = Some(a.r + t * (b.r - a.r));
                break;
            }
        }
        // The escape ray steepens monotonically below the duct, so it
        // reaches every strip unless the trace window was too small; treat
        // an unreached strip as fully dark.
        reach.push(r_cross.unwrap_or(r_max));
    }
    let area_shadow = area_above_curve(dz, &reach, r_max);
    let area_total = r_max * (z_max - z_duct_bottom);
    Ok(ShallowShadowReport {
        theta_critical: theta_c,
        r_max,
        z_top: z_duct_bottom,
        z_bottom: z_max,
        area_total,
        area_shadow,
        proportion_shadow: area_shadow / area_total,
    })
}
