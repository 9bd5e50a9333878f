//! Pipeline drivers: one function per subcommand, each returning the
//! plot-ready JSON value it also writes (when given an output directory).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use sofar_core::deploy::{self, PlacementMethod};
use sofar_core::dynamics::{
    simulate_correction, CorrectionOptions, GyroModel, PoseTrajectory,
};
use sofar_core::field::{
    accumulate_fan, straight_line_loss, SourceGeometry, TLGrid,
};
use sofar_core::ray::trace_fan;
use sofar_core::ris::RisArray;
use sofar_core::shadow::{self, AngularBounds};
use sofar_core::ssp::SoundSpeedProfile;

use crate::scenario::{MotionSpec, OptimizeSpec, Scenario};
use crate::{CliError, CliResult};

fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, v)?;
    f.write_all(b"\n")?;
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Trace the source fan; write one polyline CSV per ray plus a summary.
pub fn cmd_trace(sc: &Scenario, out: Option<&Path>) -> CliResult<Value> {
    let profile = sc.profile()?;
    let cfg = sc.trace_config();
    let thetas = sc.source_thetas();
    let paths = trace_fan(&profile, sc.source.depth_m, &thetas, &cfg)?;
    if let Some(dir) = out {
        for (i, p) in paths.iter().enumerate() {
            let mut f = BufWriter::new(File::create(dir.join(format!("ray_{i:03}.csv")))?);
            p.to_csv(&mut f)?;
        }
    }
    let rays: Vec<Value> = paths
        .iter()
        .map(|p| {
            let end = p.final_state();
            json!({
                "theta_deg": p.theta0.to_degrees(),
                "termination": format!("{:?}", p.termination),
                "states": p.states.len(),
                "end_r_m": end.r,
                "end_z_m": end.z,
                "end_s_m": end.s,
                "turning_depths_m": p.turning_depths(),
            })
        })
        .collect();
    let v = json!({ "source_depth_m": sc.source.depth_m, "rays": rays });
    if let Some(dir) = out {
        write_json(&dir.join("trace_summary.json"), &v)?;
    }
    Ok(v)
}

/// Transmission loss a reflector's feed path suffers: the direct-field
/// grid value when a ray sample covers the reflector's cell, otherwise
/// the straight-line loss from the source.
fn feed_loss(direct: &TLGrid, sc: &Scenario, range_m: f64, depth_m: f64) -> f64 {
    match direct.value_at(range_m, depth_m) {
        Some(v) if v.is_finite() => v,
        _ => straight_line_loss(
            (0.0, sc.source.depth_m),
            (range_m, depth_m),
            sc.source.frequency_hz,
        ),
    }
}

/// Accumulate the direct field and each reflector's re-emitted field;
/// write both grids and the coverage curves.
pub fn cmd_field(sc: &Scenario, out: Option<&Path>) -> CliResult<Value> {
    let profile = sc.profile()?;
    let cfg = sc.trace_config();
    let f_hz = sc.source.frequency_hz;
    let ds = sc.trace.sample_ds_m;

    let mut direct = TLGrid::new(sc.grid)?;
    accumulate_fan(
        &mut direct,
        &profile,
        SourceGeometry::at_origin(sc.source.depth_m),
        &sc.source_thetas(),
        &cfg,
        f_hz,
        ds,
    )?;

    let mut merged = direct.clone();
    let mut ris_meta = Vec::new();
    for r in &sc.ris {
        let array = r.to_array(f_hz);
        array.validate()?;
        let feed = feed_loss(&direct, sc, r.range_m, r.depth_m);
        // The re-emitted leg starts offset by what the feed path lost,
        // minus what the array's coherent gain claws back.
        let offset = feed - array.gain_db();
        let mut contrib = TLGrid::new(sc.grid)?;
        let emit = r.emit_thetas();
        accumulate_fan(
            &mut contrib,
            &profile,
            SourceGeometry { depth: r.depth_m, range_offset: r.range_m, mirror: false },
            &emit,
            &cfg,
            f_hz,
            ds,
        )?;
        if r.two_sided {
            accumulate_fan(
                &mut contrib,
                &profile,
                SourceGeometry { depth: r.depth_m, range_offset: r.range_m, mirror: true },
                &emit,
                &cfg,
                f_hz,
                ds,
            )?;
        }
        contrib.add_offset(offset);
        merged.min_merge(&contrib)?;
        ris_meta.push(json!({
            "range_m": r.range_m,
            "depth_m": r.depth_m,
            "n_units": r.n_units,
            "gain_db": array.gain_db(),
            "feed_tl_db": feed,
            "offset_db": offset,
        }));
    }

    let coverage = |grid: &TLGrid| -> Vec<f64> {
        sc.thresholds_db
            .iter()
            .map(|&t| grid.coverage_proportion(&sc.window, sc.budget(t).allowed_loss_db()))
            .collect()
    };
    let v = json!({
        "window": to_value(&sc.window)?,
        "thresholds_db": sc.thresholds_db,
        "direct": coverage(&direct),
        "with_ris": coverage(&merged),
        "ris": ris_meta,
    });
    if let Some(dir) = out {
        let mut f = BufWriter::new(File::create(dir.join("tl_direct.csv"))?);
        direct.to_csv(&mut f)?;
        let mut f = BufWriter::new(File::create(dir.join("tl_with_ris.csv"))?);
        merged.to_csv(&mut f)?;
        write_json(&dir.join("coverage.json"), &v)?;
    }
    Ok(v)
}

/// Shadow accounting: coverage of the deep window for channel profiles,
/// duct escape and sub-duct darkness for layered ones.
pub fn cmd_shadow(sc: &Scenario, out: Option<&Path>) -> CliResult<Value> {
    let profile = sc.profile()?;
    let v = match &profile {
        SoundSpeedProfile::Munk(_) => {
            let bounds = AngularBounds {
                theta_min: sc.source.theta_min_deg.to_radians(),
                theta_max: sc.source.theta_max_deg.to_radians(),
            };
            let report =
                shadow::deep_shadow_report(&profile, sc.source.depth_m, bounds, sc.window, 400)?;
            let (gap_start, gap_end) = shadow::first_bending_region(&profile, sc.source.depth_m)?;
            json!({
                "kind": "deep",
                "report": to_value(&report)?,
                "surface_gap_start_m": gap_start,
                "surface_gap_end_m": gap_end,
            })
        }
        SoundSpeedProfile::Layered(_) => {
            let duct_bottom = sc.duct_bottom().ok_or_else(|| {
                CliError::Config(
                    "optimize.duct_bottom_m: needed to locate the duct in this profile".into(),
                )
            })?;
            let critical =
                shadow::critical_grazing_angle(&profile, sc.source.depth_m, duct_bottom)?;
            let report = shadow::shallow_shadow_area(
                &profile,
                sc.source.depth_m,
                duct_bottom,
                sc.window.r_max,
                200,
            )?;
            json!({
                "kind": "shallow",
                "critical_angle_deg": critical.to_degrees(),
                "report": to_value(&report)?,
            })
        }
    };
    if let Some(dir) = out {
        write_json(&dir.join("shadow.json"), &v)?;
    }
    Ok(v)
}

/// Mooring-depth optimization: an axis-advantage sweep for channel
/// profiles, a reach-maximizing search (plus optional relay plan) for
/// layered ones.
pub fn cmd_optimize(sc: &Scenario, out: Option<&Path>) -> CliResult<Value> {
    let profile = sc.profile()?;
    let v = match &profile {
        SoundSpeedProfile::Munk(_) => {
            let depths = match &sc.optimize {
                Some(OptimizeSpec::AxisSweep { depths_m }) => depths_m.clone(),
                _ => (1..=20).map(|i| 100.0 * i as f64).collect(),
            };
            let axis = profile.channel_axis()?;
            let report = deploy::verify_axis_advantage(&profile, axis.depth, &depths)?;
            json!({
                "kind": "axis_sweep",
                "axis_depth_m": axis.depth,
                "report": to_value(&report)?,
            })
        }
        SoundSpeedProfile::Layered(_) => {
            let duct_bottom = sc.duct_bottom().ok_or_else(|| {
                CliError::Config(
                    "optimize.duct_bottom_m: needed to bound the mooring search".into(),
                )
            })?;
            let (method, target) = match &sc.optimize {
                Some(OptimizeSpec::DuctPlacement { method, target_range_m, .. }) => {
                    (*method, *target_range_m)
                }
                _ => (PlacementMethod::GoldenSection, None),
            };
            let placement =
                deploy::optimize_ris_depth(&profile, duct_bottom, profile.z_max(), method)?;
            let relay = match target {
                Some(t) => Some(deploy::multihop_plan(
                    &profile,
                    duct_bottom,
                    profile.z_max(),
                    placement.z_ris,
                    t,
                )?),
                None => None,
            };
            json!({
                "kind": "duct_placement",
                "placement": to_value(&placement.export())?,
                "relay": match &relay {
                    Some(r) => to_value(r)?,
                    None => Value::Null,
                },
            })
        }
    };
    if let Some(dir) = out {
        write_json(&dir.join("optimize.json"), &v)?;
    }
    Ok(v)
}

/// Run the pose-correction experiment over its trials; write the first
/// trial's deviation series and the per-trial reductions.
pub fn cmd_dynamics(sc: &Scenario, out: Option<&Path>, seed: u64) -> CliResult<Value> {
    let spec = sc
        .dynamics
        .ok_or_else(|| CliError::Config("dynamics: missing from scenario".into()))?;
    let array = RisArray {
        n_units: spec.array_units,
        square: false,
        spacing: spec.spacing_m,
        depth: 0.0,
        range: 0.0,
        frequency: sc.source.frequency_hz,
    };
    let mut reductions = Vec::with_capacity(spec.trials as usize);
    let mut first = None;
    for trial in 0..spec.trials {
        let tseed = seed.wrapping_add(trial);
        let traj = match spec.motion {
            MotionSpec::GaussianWalk { n_steps, dt_s, step_std_m, max_abs_m } => {
                PoseTrajectory::gaussian_walk(n_steps, dt_s, step_std_m, max_abs_m, tseed)?
            }
            MotionSpec::Sinusoid { amplitude_deg, period_s, dt_s, duration_s } => {
                PoseTrajectory::sinusoid(
                    amplitude_deg.to_radians(),
                    period_s,
                    dt_s,
                    duration_s,
                    tseed,
                )?
            }
        };
        let gyro = GyroModel {
            scale_error: spec.gyro.scale_error,
            bias: spec.gyro.bias_deg_per_s.to_radians(),
            noise_std: spec.gyro.noise_std_deg_per_s.to_radians(),
            seed: tseed,
        };
        let opts = CorrectionOptions {
            skip_below_spacing: spec.skip_below_spacing,
            pose_noise_std: spec.pose_noise_std_m,
            seed: tseed,
            c_local: 1500.0,
        };
        let trace = simulate_correction(
            &traj,
            &gyro,
            &array,
            spec.theta_deg.to_radians(),
            spec.alpha_out_deg.to_radians(),
            &opts,
        )?;
        reductions.push(trace.reduction_percent);
        if first.is_none() {
            first = Some(trace);
        }
    }
    let first = first.expect("at least one trial was validated");
    let mean = reductions.iter().sum::<f64>() / reductions.len() as f64;
    let v = json!({
        "trials": spec.trials,
        "mean_reduction_percent": mean,
        "reductions_percent": reductions,
        "first_trial": to_value(&first.summary())?,
    });
    if let Some(dir) = out {
        let mut f = BufWriter::new(File::create(dir.join("dynamics_trace.csv"))?);
        first.to_csv(&mut f)?;
        write_json(&dir.join("dynamics.json"), &v)?;
    }
    Ok(v)
}

/// Aggregate every pipeline's plot-ready values into one report file.
pub fn cmd_report(sc: &Scenario, out: Option<&Path>, seed: u64) -> CliResult<Value> {
    let trace = cmd_trace(sc, None)?;
    let coverage = cmd_field(sc, None)?;
    let shadow = cmd_shadow(sc, None)?;
    let optimize = cmd_optimize(sc, None)?;
    let dynamics = match sc.dynamics {
        Some(_) => cmd_dynamics(sc, None, seed)?,
        None => Value::Null,
    };
    let v = json!({
        "scenario": sc.name,
        "seed": seed,
        "trace": trace,
        "coverage": coverage,
        "shadow": shadow,
        "optimize": optimize,
        "dynamics": dynamics,
    });
    if let Some(dir) = out {
        write_json(&dir.join("report.json"), &v)?;
    }
    Ok(v)
}

/// Dispatch a named subcommand; creates `out` if needed.
pub fn run(command: &str, sc: &Scenario, out: &Path, seed: u64) -> CliResult<()> {
    fs::create_dir_all(out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    match command {
        "trace" => cmd_trace(sc, Some(out))?,
        "field" => cmd_field(sc, Some(out))?,
        "shadow" => cmd_shadow(sc, Some(out))?,
        "optimize" => cmd_optimize(sc, Some(out))?,
        "dynamics" => cmd_dynamics(sc, Some(out), seed)?,
        "report" => cmd_report(sc, Some(out), seed)?,
        other => return Err(CliError::Config(format!("unknown command {other}"))),
    };
    Ok(())
}
