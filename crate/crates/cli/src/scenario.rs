//! Scenario files: the JSON schema, bundled presets, and validation.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sofar_core::deploy::PlacementMethod;
use sofar_core::field::{GridSpec, LinkBudget, Region};
use sofar_core::ray::TraceConfig;
use sofar_core::ris::RisArray;
use sofar_core::ssp::SoundSpeedProfile;

use crate::{CliError, CliResult};

/// Bundled presets shipped inside the binary, addressable by name.
const BUNDLED: &[(&str, &str)] = &[
    ("deepsea_munk", include_str!("../scenarios/deepsea_munk.json")),
    (
        "shallowsea_bilinear",
        include_str!("../scenarios/shallowsea_bilinear.json"),
    ),
];

/// Source fan: where rays start and what they carry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub depth_m: f64,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub n_rays: usize,
    pub source_level_db: f64,
    pub frequency_hz: f64,
}

/// Ray-marching controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    pub max_range_m: f64,
    pub step_dz_m: f64,
    #[serde(default)]
    pub bottom_reflect: bool,
    /// Arc-length spacing of loss samples deposited on the grid, m.
    pub sample_ds_m: f64,
}

/// One reflecting array: placement, size, and how its re-emitted fan is
/// discretized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisPlacement {
    pub n_units: u64,
    #[serde(default)]
    pub square: bool,
    pub spacing_m: f64,
    pub depth_m: f64,
    pub range_m: f64,
    pub emit_half_width_deg: f64,
    pub emit_step_deg: f64,
    #[serde(default = "default_true")]
    pub two_sided: bool,
}

fn default_true() -> bool {
    true
}

impl RisPlacement {
    pub fn to_array(&self, frequency_hz: f64) -> RisArray {
        RisArray {
            n_units: self.n_units,
            square: self.square,
            spacing: self.spacing_m,
            depth: self.depth_m,
            range: self.range_m,
            frequency: frequency_hz,
        }
    }

    /// Emission angles, radians, symmetric about horizontal.
    pub fn emit_thetas(&self) -> Vec<f64> {
        let half = self.emit_half_width_deg;
        let n = (2.0 * half / self.emit_step_deg).round() as usize + 1;
        (0..n)
            .map(|i| (-half + i as f64 * self.emit_step_deg).to_radians())
            .collect()
    }
}

/// Gyro error constants in the units instruments quote them in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GyroSpec {
    pub scale_error: f64,
    pub bias_deg_per_s: f64,
    pub noise_std_deg_per_s: f64,
}

/// Platform motion to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionSpec {
    GaussianWalk {
        n_steps: usize,
        dt_s: f64,
        step_std_m: f64,
        max_abs_m: f64,
    },
    Sinusoid {
        amplitude_deg: f64,
        period_s: f64,
        dt_s: f64,
        duration_s: f64,
    },
}

/// Pose-correction experiment: motion, sensors, geometry, trial count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub motion: MotionSpec,
    pub gyro: GyroSpec,
    pub theta_deg: f64,
    #[serde(default)]
    pub alpha_out_deg: f64,
    pub array_units: u64,
    pub spacing_m: f64,
    #[serde(default = "default_true")]
    pub skip_below_spacing: bool,
    #[serde(default)]
    pub pose_noise_std_m: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
}

fn default_trials() -> u64 {
    1
}

/// What the optimize pipeline should do for this scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizeSpec {
    /// Deep water: sweep candidate mooring depths against the channel axis.
    AxisSweep {
        #[serde(default = "default_sweep")]
        depths_m: Vec<f64>,
    },
    /// Shallow water: search the below-duct interval for the best mooring.
    DuctPlacement {
        duct_bottom_m: f64,
        #[serde(default = "default_method")]
        method: PlacementMethod,
        #[serde(default)]
        target_range_m: Option<f64>,
    },
}

fn default_sweep() -> Vec<f64> {
    (1..=20).map(|i| 100.0 * i as f64).collect()
}

fn default_method() -> PlacementMethod {
    PlacementMethod::GoldenSection
}

/// A full experiment description, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub profile: SoundSpeedProfile,
    pub source: SourceSpec,
    pub trace: TraceSpec,
    pub grid: GridSpec,
    pub window: Region,
    pub thresholds_db: Vec<f64>,
    #[serde(default)]
    pub ris: Vec<RisPlacement>,
    #[serde(default)]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub optimize: Option<OptimizeSpec>,
}

impl Scenario {
    /// Rebuild the profile through its checked constructor; deserialization
    /// alone bypasses the structural invariants.
    pub fn profile(&self) -> CliResult<SoundSpeedProfile> {
        let rebuilt = match &self.profile {
            SoundSpeedProfile::Munk(m) => {
                SoundSpeedProfile::munk(m.c0, m.z_axis, m.z_scale, m.epsilon, m.z_max)
            }
            SoundSpeedProfile::Layered(l) => SoundSpeedProfile::layered(l.layers.clone()),
        };
        rebuilt.map_err(|e| CliError::Config(format!("profile: {e}")))
    }

    /// Launch angles of the source fan, radians.
    pub fn source_thetas(&self) -> Vec<f64> {
        linspace_deg(
            self.source.theta_min_deg,
            self.source.theta_max_deg,
            self.source.n_rays,
        )
    }

    pub fn trace_config(&self) -> TraceConfig {
        TraceConfig {
            max_range: self.trace.max_range_m,
            dz: self.trace.step_dz_m,
            bottom_reflect: self.trace.bottom_reflect,
            max_steps: 50_000_000,
        }
    }

    pub fn budget(&self, threshold_db: f64) -> LinkBudget {
        LinkBudget {
            source_level_db: self.source.source_level_db,
            threshold_db,
        }
    }

    /// Duct-bottom depth for shallow pipelines: the optimize block if it
    /// names one, otherwise the first layer interface.
    pub fn duct_bottom(&self) -> Option<f64> {
        if let Some(OptimizeSpec::DuctPlacement { duct_bottom_m, .. }) = &self.optimize {
            return Some(*duct_bottom_m);
        }
        match &self.profile {
            SoundSpeedProfile::Layered(_) => {
                self.profile.interface_depths().first().copied()
            }
            SoundSpeedProfile::Munk(_) => None,
        }
    }

    /// Field-by-field invariant checks; messages name the offending field.
    pub fn validate(&self) -> CliResult<()> {
        let profile = self.profile()?;
        let z_max = profile.z_max();
        let fail = |msg: String| Err(CliError::Config(msg));

        if self.name.is_empty() {
            return fail("name: must not be empty".into());
        }
        let s = &self.source;
        if !(0.0..=z_max).contains(&s.depth_m) {
            return fail(format!(
                "source.depth_m: {} m outside the water column [0, {z_max}] m",
                s.depth_m
            ));
        }
        if !(s.theta_min_deg < s.theta_max_deg) {
            return fail("source.theta_min_deg: must be below theta_max_deg".into());
        }
        if s.n_rays == 0 {
            return fail("source.n_rays: need at least one ray".into());
        }
        if !(s.frequency_hz > 0.0) {
            return fail("source.frequency_hz: must be positive".into());
        }
        let t = &self.trace;
        if !(t.max_range_m > 0.0) {
            return fail("trace.max_range_m: must be positive".into());
        }
        if !(t.step_dz_m > 0.0) {
            return fail("trace.step_dz_m: must be positive".into());
        }
        if !(t.sample_ds_m > 0.0) {
            return fail("trace.sample_ds_m: must be positive".into());
        }
        if !(self.grid.r_max > self.grid.r_min) || !(self.grid.z_max > self.grid.z_min) {
            return fail("grid: extents must have positive size".into());
        }
        if self.grid.nr == 0 || self.grid.nz == 0 {
            return fail("grid.nr: need at least one cell per axis".into());
        }
        if !(self.window.r_max > self.window.r_min) || !(self.window.z_max > self.window.z_min) {
            return fail("window: extents must have positive size".into());
        }
        if self.window.z_max > z_max + 1e-9 {
            return fail(format!(
                "window.z_max: {} m deeper than the seabed {z_max} m",
                self.window.z_max
            ));
        }
        if self.thresholds_db.is_empty() {
            return fail("thresholds_db: need at least one threshold".into());
        }
        if self.thresholds_db.windows(2).any(|w| w[0] > w[1]) {
            return fail("thresholds_db: must be sorted ascending".into());
        }
        for (i, r) in self.ris.iter().enumerate() {
            if r.n_units == 0 {
                return fail(format!("ris[{i}].n_units: need at least one element"));
            }
            if !(r.spacing_m > 0.0) {
                return fail(format!("ris[{i}].spacing_m: must be positive"));
            }
            if !(0.0..=z_max).contains(&r.depth_m) {
                return fail(format!(
                    "ris[{i}].depth_m: {} m outside the water column [0, {z_max}] m",
                    r.depth_m
                ));
            }
            if !(r.emit_half_width_deg > 0.0) || r.emit_half_width_deg >= 90.0 {
                return fail(format!(
                    "ris[{i}].emit_half_width_deg: must lie in (0, 90)"
                ));
            }
            if !(r.emit_step_deg > 0.0) {
                return fail(format!("ris[{i}].emit_step_deg: must be positive"));
            }
        }
        if let Some(d) = &self.dynamics {
            if d.trials == 0 {
                return fail("dynamics.trials: need at least one trial".into());
            }
            if d.array_units == 0 {
                return fail("dynamics.array_units: need at least one element".into());
            }
            if !(d.spacing_m > 0.0) {
                return fail("dynamics.spacing_m: must be positive".into());
            }
            if !(d.pose_noise_std_m >= 0.0) {
                return fail("dynamics.pose_noise_std_m: must be nonnegative".into());
            }
            match d.motion {
                MotionSpec::GaussianWalk { n_steps, dt_s, step_std_m, max_abs_m } => {
                    if n_steps == 0 || !(dt_s > 0.0) {
                        return fail(
                            "dynamics.motion: need steps and a positive dt_s".into(),
                        );
                    }
                    if !(step_std_m >= 0.0) || !(max_abs_m >= 0.0) {
                        return fail(
                            "dynamics.motion.step_std_m: spreads must be nonnegative".into(),
                        );
                    }
                }
                MotionSpec::Sinusoid { period_s, dt_s, duration_s, .. } => {
                    if !(period_s > 0.0) || !(dt_s > 0.0) || !(duration_s >= dt_s) {
                        return fail(
                            "dynamics.motion.period_s: need positive period and at least one step"
                                .into(),
                        );
                    }
                }
            }
        }
        if let Some(OptimizeSpec::DuctPlacement { duct_bottom_m, target_range_m, .. }) =
            &self.optimize
        {
            if !(*duct_bottom_m > 0.0) || *duct_bottom_m >= z_max {
                return fail(format!(
                    "optimize.duct_bottom_m: {duct_bottom_m} m must lie strictly inside (0, {z_max}) m"
                ));
            }
            if let Some(t) = target_range_m {
                if !(*t >= 0.0) {
                    return fail("optimize.target_range_m: must be nonnegative".into());
                }
            }
        }
        if let Some(OptimizeSpec::AxisSweep { depths_m }) = &self.optimize {
            if depths_m.iter().any(|&h| !(h > 0.0) || h >= z_max) {
                return fail(
                    "optimize.depths_m: every depth must lie strictly inside (0, seabed)".into(),
                );
            }
        }
        Ok(())
    }
}

/// Inclusive linear spacing in degrees, returned in radians; a single ray
/// sits at the midpoint.
pub fn linspace_deg(lo_deg: f64, hi_deg: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(0.5 * (lo_deg + hi_deg)).to_radians()];
    }
    (0..n)
        .map(|i| {
            (lo_deg + (hi_deg - lo_deg) * i as f64 / (n - 1) as f64).to_radians()
        })
        .collect()
}

/// Content of a bundled scenario, if `name` (with or without `.json`)
/// matches one.
pub fn bundled(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED
        .iter()
        .find(|(n, _)| *n == stem)
        .map(|(_, text)| *text)
}

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Load and validate a scenario from a path, falling back to a bundled
/// preset when the path names one.
pub fn load_scenario(path: &str) -> CliResult<Scenario> {
    let p = Path::new(path);
    let text = if p.is_file() {
        fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read scenario {path}: {e}")))?
    } else if let Some(text) = bundled(path) {
        text.to_string()
    } else {
        return Err(CliError::Config(format!(
            "scenario {path} is neither a file nor a bundled preset {:?}",
            bundled_names()
        )));
    };
    let sc: Scenario = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("scenario {path}: {e}")))?;
    sc.validate()?;
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_spacing_is_inclusive_and_centered() {
        let t = linspace_deg(-4.0, 4.0, 41);
        assert_eq!(t.len(), 41);
        assert!((t[0].to_degrees() + 4.0).abs() < 1e-12);
        assert!((t[40].to_degrees() - 4.0).abs() < 1e-12);
        assert!(t[20].abs() < 1e-15, "odd counts hit the center exactly");
        let single = linspace_deg(2.0, 6.0, 1);
        assert!((single[0].to_degrees() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn bundled_lookup_tolerates_the_extension() {
        assert!(bundled("deepsea_munk").is_some());
        assert!(bundled("deepsea_munk.json").is_some());
        assert!(bundled("atlantis").is_none());
        assert_eq!(bundled_names().len(), 2);
    }

    #[test]
    fn emit_fan_is_symmetric() {
        let r = RisPlacement {
            n_units: 4,
            square: false,
            spacing_m: 0.075,
            depth_m: 100.0,
            range_m: 0.0,
            emit_half_width_deg: 60.0,
            emit_step_deg: 0.5,
            two_sided: true,
        };
        let t = r.emit_thetas();
        assert_eq!(t.len(), 241);
        assert!((t[0] + t[240]).abs() < 1e-15);
        assert!(t[120].abs() < 1e-15);
    }
}
