//! Placement analysis: where to moor a reflecting array.
//!
//! Deep water admits a closed argument — the span of a surface-tangent ray
//! re-emitted from the channel axis beats the span from any shallower
//! depth, by exactly the ratio of two profile integrals. Shallow water gets
//! a reach objective maximized numerically over mooring depth, plus a
//! relay chain planner built on the per-hop reach.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{self, GeneticOptions};
use crate::quad;
use crate::ray;
use crate::ssp::SoundSpeedProfile;

/// Span comparison between a mooring at `depth_shallow` and one at
/// `depth_axis`, both re-emitting surface-tangent rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpanRatioResult {
    pub depth_shallow: f64,
    pub depth_axis: f64,
    /// Surface-tangent span from `depth_shallow`, m.
    pub r_max_shallow: f64,
    /// Surface-tangent span from `depth_axis`, m.
    pub r_max_axis: f64,
    /// `r_max_axis / r_max_shallow`.
    pub ratio: f64,
    /// Coverage gain computed by the independent integral route;
    /// `ratio = 1 + xi` up to quadrature error.
    pub xi: f64,
}

/// `∫ dz / sqrt(1/c^2 - 1/c_s^2)` over `[a, b]`, the profile integral both
/// span routes reduce to. Singular at `a = 0` where `c = c_s`.
fn profile_integral(profile: &SoundSpeedProfile, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let c_s = profile.surface_speed();
    let qw = |z: f64| {
        let c = profile.sound_speed(z).expect("scan stays in domain");
        1.0 / (c * c) - 1.0 / (c_s * c_s)
    };
    // Slope of qw at the surface, for the same sub-resolution guard the
    // span quadrature uses: within ~1e-11 m of the surface c(z) - c_s
    // underflows and qw flattens to zero.
    let g0 = profile.gradient(0.0)?;
    let c0 = c_s;
    let slope = (2.0 * g0 / (c0 * c0 * c0)).abs();
    let f = move |z: f64| {
        let mut q = qw(z);
        if q < 1e-22 {
            q = q.max(slope * z);
        }
        1.0 / q.max(1e-40).sqrt()
    };
    if a == 0.0 {
        Ok(quad::integrate_sqrt_endpoints(f, a, b, true, false, rel_tol))
    } else {
        Ok(quad::integrate(f, a, b, rel_tol))
    }
}

/// Compare surface-tangent spans from two mooring depths by two
/// independent routes: ray-geometry quadratures for each span, and the
/// profile-integral ratio for the gain `xi`.
///
/// Preconditions: `0 < depth_shallow < depth_axis` and the speed stays
/// below the surface speed over the whole column — the regime where a
/// surface-tangent ray exists from every depth.
pub fn deep_span_ratio(
    profile: &SoundSpeedProfile,
    depth_shallow: f64,
    depth_axis: f64,
) -> Result<SpanRatioResult> {
    if !(depth_shallow > 0.0 && depth_shallow < depth_axis && depth_axis <= profile.z_max()) {
        return Err(Error::InvalidConfig(
            "need 0 < shallow depth < axis depth <= seabed".into(),
        ));
    }
    let c_s = profile.surface_speed();
    const SCAN: usize = 512;
    for i in 1..=SCAN {
        let z = depth_axis * i as f64 / SCAN as f64;
        if profile.sound_speed(z)? >= c_s {
            return Err(Error::ModelAssumption(format!(
                "speed at {z:.1} m reaches the surface speed; no surface-tangent ray exists"
            )));
        }
    }

    let tol = 1e-11;
    let theta_shallow = (profile.sound_speed(depth_shallow)? / c_s).acos();
    let theta_axis = (profile.sound_speed(depth_axis)? / c_s).acos();
    let r_max_shallow = ray::horizontal_span_with_tol(
        profile,
        depth_shallow,
        theta_shallow,
        0.0,
        depth_shallow,
        tol,
    )?;
    let r_max_axis =
        ray::horizontal_span_with_tol(profile, depth_axis, theta_axis, 0.0, depth_axis, tol)?;

    let lower = profile_integral(profile, 0.0, depth_shallow, tol)?;
    let upper = profile_integral(profile, depth_shallow, depth_axis, tol)?;

    Ok(SpanRatioResult {
        depth_shallow,
        depth_axis,
        r_max_shallow,
        r_max_axis,
        ratio: r_max_axis / r_max_shallow,
        xi: upper / lower,
    })
}

/// Outcome of sweeping [`deep_span_ratio`] over candidate depths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisAdvantageReport {
    /// `(depth, ratio)` per sample, in input order.
    pub ratios: Vec<(f64, f64)>,
    /// Smallest ratio and the depth attaining it; absent for no samples.
    pub min_ratio: Option<(f64, f64)>,
    /// Every sampled ratio exceeded 1 by a clear margin. A false value
    /// signals an implementation defect, not a property of the ocean.
    pub holds: bool,
    /// No samples were provided; `holds` is then vacuous.
    pub empty: bool,
}

/// Check that the axis mooring out-spans every candidate depth in
/// `samples`. Candidates must lie strictly between the surface and the
/// axis.
pub fn verify_axis_advantage(
    profile: &SoundSpeedProfile,
    depth_axis: f64,
    samples: &[f64],
) -> Result<AxisAdvantageReport> {
    if samples.is_empty() {
        return Ok(AxisAdvantageReport {
            ratios: Vec::new(),
            min_ratio: None,
            holds: true,
            empty: true,
        });
    }
    let ratios: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|&h| deep_span_ratio(profile, h, depth_axis).map(|r| (h, r.ratio)))
        .collect::<Result<_>>()?;
    let min_ratio = ratios
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let holds = ratios.iter().all(|&(_, r)| r > 1.0 + 1e-9);
    Ok(AxisAdvantageReport {
        ratios,
        min_ratio,
        holds,
        empty: false,
    })
}

/// A mooring depth with the reach it buys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementResult {
    pub z_ris: f64,
    /// Grazing angle of the duct-tangent ray at the array, rad.
    pub theta_reflect: f64,
    /// Grazing angle of the same ray at the seabed, rad.
    pub theta_d: f64,
    /// Horizontal coverage distance, m.
    pub reach: f64,
    /// How the depth was chosen.
    pub method: String,
    /// Objective evaluations spent choosing it.
    pub iterations: u64,
    /// `(depth, reach)` pairs evaluated along the way; empty for a direct
    /// evaluation.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub history: Vec<(f64, f64)>,
}

/// Flat export shape for placement results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacementExport {
    pub z_ris_m: f64,
    pub theta_reflect_deg: f64,
    pub theta_d_deg: f64,
    pub reach_m: f64,
    pub method: String,
    pub iterations: u64,
}

impl PlacementResult {
    pub fn export(&self) -> PlacementExport {
        PlacementExport {
            z_ris_m: self.z_ris,
            theta_reflect_deg: self.theta_reflect.to_degrees(),
            theta_d_deg: self.theta_d.to_degrees(),
            reach_m: self.reach,
            method: self.method.clone(),
            iterations: self.iterations,
        }
    }
}

/// Coverage distance of an array moored at `z_ris` under a duct whose
/// fastest speed sits at `h`, over a seabed at `depth_bottom`.
///
/// The steepest ray the array can keep below the duct leaves at
/// `theta_reflect = arccos(c(z_ris)/c_h)`; one chord climbs from the array
/// to the duct, a second falls to the seabed and back up. Each chord of
/// height `dz` and mean grazing angle `theta` advances `dz / tan(theta/2)`.
pub fn shallow_reach(
    profile: &SoundSpeedProfile,
    z_ris: f64,
    h: f64,
    depth_bottom: f64,
) -> Result<PlacementResult> {
    if !(h >= 0.0 && h < z_ris && z_ris <= depth_bottom && depth_bottom <= profile.z_max()) {
        return Err(Error::InvalidConfig(
            "need duct top <= array depth <= seabed inside the profile".into(),
        ));
    }
    let c_h = profile.sound_speed(h)?;
    let c_z = profile.sound_speed(z_ris)?;
    let c_d = profile.sound_speed(depth_bottom)?;

    let a_reflect = c_z / c_h;
    if a_reflect > 1.0 + 1e-12 {
        return Err(Error::InfeasiblePlacement(format!(
            "speed at the array ({c_z:.3}) exceeds the duct speed ({c_h:.3}); \
             no duct-tangent ray"
        )));
    }
    let theta_reflect = a_reflect.min(1.0).acos();

    let a_bottom = c_d * theta_reflect.cos() / c_z;
    if a_bottom > 1.0 + 1e-12 {
        return Err(Error::InfeasiblePlacement(
            "duct-tangent ray cannot reach the seabed".into(),
        ));
    }
    let theta_d = a_bottom.min(1.0).acos();
    if theta_d < 1e-9 {
        return Err(Error::InfeasiblePlacement(
            "no speed drop below the duct; the seabed chord degenerates".into(),
        ));
    }

    // theta_reflect -> 0 as z_ris -> h, and the chord height vanishes with
    // it; the limit of the term is 0.
    let term_up = if theta_reflect < 1e-9 {
        0.0
    } else {
        (z_ris - h) / (0.5 * theta_reflect).tan()
    };
    let term_down = (depth_bottom - h) / (0.5 * theta_d).tan();

    Ok(PlacementResult {
        z_ris,
        theta_reflect,
        theta_d,
        reach: term_up + term_down,
        method: "direct".into(),
        iterations: 0,
        history: Vec::new(),
    })
}

/// How [`optimize_ris_depth`] searches the mooring interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlacementMethod {
    /// Golden-section search; right choice when reach is unimodal in depth.
    GoldenSection,
    /// Coarse grid recursively refined around the incumbent; robust to
    /// multiple local optima at moderate cost.
    GridRefine,
    /// Seeded real-coded genetic search for awkward profiles.
    Genetic { seed: u64 },
}

/// Depth bracket below which the search stops refining, m.
const DEPTH_RESOLUTION: f64 = 0.5;

/// Find the mooring depth in `(h, depth_bottom]` that maximizes
/// [`shallow_reach`].
///
/// Deterministic methods reproduce bit-for-bit; the genetic method is
/// reproducible for a fixed seed.
pub fn optimize_ris_depth(
    profile: &SoundSpeedProfile,
    h: f64,
    depth_bottom: f64,
    method: PlacementMethod,
) -> Result<PlacementResult> {
    if !(h >= 0.0 && h < depth_bottom && depth_bottom <= profile.z_max()) {
        return Err(Error::InvalidConfig(
            "need duct top < seabed inside the profile".into(),
        ));
    }
    let lo = h + 1e-6;
    let hi = depth_bottom;
    let history = RefCell::new(Vec::new());
    let objective = |z: f64| {
        let r = shallow_reach(profile, z, h, depth_bottom)
            .map(|p| p.reach)
            .unwrap_or(f64::NEG_INFINITY);
        history.borrow_mut().push((z, r));
        r
    };

    let (name, (z_best, r_best)) = match method {
        PlacementMethod::GoldenSection => (
            "golden_section",
            optim::golden_section_max(&objective, lo, hi, DEPTH_RESOLUTION),
        ),
        PlacementMethod::GridRefine => (
            "grid_refine",
            optim::grid_refine_max(&objective, lo, hi, DEPTH_RESOLUTION),
        ),
        PlacementMethod::Genetic { seed } => (
            "genetic",
            optim::genetic_max(
                &objective,
                lo,
                hi,
                GeneticOptions {
                    seed,
                    ..GeneticOptions::default()
                },
            ),
        ),
    };
    if !r_best.is_finite() {
        return Err(Error::InfeasiblePlacement(
            "no feasible mooring depth in the interval".into(),
        ));
    }
    let history = history.into_inner();
    let mut result = shallow_reach(profile, z_best, h, depth_bottom)?;
    result.method = name.into();
    result.iterations = history.len() as u64;
    result.history = history;
    Ok(result)
}

/// A chain of equally-spaced relays extending duct coverage along range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayPlan {
    pub unit_count: u64,
    /// `(range, depth)` of each relay, nearest first.
    pub positions: Vec<(f64, f64)>,
    pub per_hop_reach: f64,
}

/// Plan a relay chain at mooring depth `z_ris` covering `target_range`:
/// one relay per reach-length, each handing off to the next.
pub fn multihop_plan(
    profile: &SoundSpeedProfile,
    h: f64,
    depth_bottom: f64,
    z_ris: f64,
    target_range: f64,
) -> Result<RelayPlan> {
    if !(target_range >= 0.0) {
        return Err(Error::InvalidConfig("target range must be nonnegative".into()));
    }
    let per_hop = shallow_reach(profile, z_ris, h, depth_bottom)?.reach;
    let unit_count = (target_range / per_hop).ceil() as u64;
    let positions = (1..=unit_count)
        .map(|i| (i as f64 * per_hop, z_ris))
        .collect();
    Ok(RelayPlan {
        unit_count,
        positions,
        per_hop_reach: per_hop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const AXIS: f64 = 2100.0;

    #[test]
    fn span_ratio_reference_values() {
        // 40-digit quadrature references for the standard deep profile.
        let p = SoundSpeedProfile::munk_standard();
        let r = deep_span_ratio(&p, 100.0, AXIS).unwrap();
        assert!((r.r_max_axis - 16_206.602).abs() < 0.05, "got {}", r.r_max_axis);
        assert!((r.r_max_shallow - 3007.351).abs() < 0.05, "got {}", r.r_max_shallow);
        assert!((r.ratio - 5.388996).abs() < 1e-4, "got {}", r.ratio);

        let r = deep_span_ratio(&p, 2000.0, AXIS).unwrap();
        assert!((r.ratio - 1.033667).abs() < 1e-5, "got {}", r.ratio);
    }

    #[test]
    fn two_span_routes_agree() {
        let p = SoundSpeedProfile::munk_standard();
        for h in [100.0, 500.0, 1000.0, 2000.0, 2099.0] {
            let r = deep_span_ratio(&p, h, AXIS).unwrap();
            // Identical integrals in disguise; only quadrature error
            // separates the two routes at tolerance 1e-11.
            assert!(
                (r.ratio - (1.0 + r.xi)).abs() < 1e-9,
                "h={h}: ratio {} vs 1+xi {}",
                r.ratio,
                1.0 + r.xi
            );
        }
    }

    #[test]
    fn span_ratio_rejects_fast_layers() {
        // Bilinear: speed exceeds the surface value inside the duct.
        let p = SoundSpeedProfile::bilinear();
        assert!(matches!(
            deep_span_ratio(&p, 30.0, 120.0),
            Err(Error::ModelAssumption(_))
        ));
    }

    #[test]
    fn axis_mooring_beats_every_shallower_depth() {
        let p = SoundSpeedProfile::munk_standard();
        let samples: Vec<f64> = (1..=20).map(|i| 100.0 * i as f64).collect();
        let report = verify_axis_advantage(&p, AXIS, &samples).unwrap();
        assert!(report.holds && !report.empty);
        assert_eq!(report.ratios.len(), 20);
        let (h_min, r_min) = report.min_ratio.unwrap();
        // The advantage shrinks to nothing as the candidate approaches the
        // axis, so the minimum sits at the deepest sample.
        assert_eq!(h_min, 2000.0);
        assert!((r_min - 1.033667).abs() < 1e-5);
        for w in report.ratios.windows(2) {
            assert!(w[1].1 < w[0].1, "ratio must fall as depth grows");
        }
    }

    #[test]
    fn empty_sweep_is_vacuously_true() {
        let p = SoundSpeedProfile::munk_standard();
        let report = verify_axis_advantage(&p, AXIS, &[]).unwrap();
        assert!(report.holds && report.empty);
        assert!(report.min_ratio.is_none());
    }

    #[test]
    fn seabed_mooring_reach_reference() {
        let p = SoundSpeedProfile::bilinear();
        let r = shallow_reach(&p, 120.0, 60.0, 120.0).unwrap();
        // Both chords see the same angles when the array sits on the seabed.
        assert!((r.theta_reflect.to_degrees() - 13.4092).abs() < 1e-3);
        assert!((r.theta_d.to_degrees() - 13.4092).abs() < 1e-3);
        assert!((r.reach - 1020.804).abs() < 0.01, "got {}", r.reach);
    }

    #[test]
    fn mooring_just_below_the_duct_keeps_only_the_seabed_chord() {
        let p = SoundSpeedProfile::bilinear();
        let r = shallow_reach(&p, 60.01, 60.0, 120.0).unwrap();
        assert!((r.theta_reflect.to_degrees() - 1.15077).abs() < 1e-4);
        // The climb chord is a metre tall and nearly vanishes.
        assert!((r.reach - 511.398).abs() < 0.01, "got {}", r.reach);
    }

    #[test]
    fn seabed_chord_angle_ignores_mooring_depth() {
        // Chaining the two direction cosines cancels c(z_ris): the seabed
        // angle is arccos(c_D/c_h) regardless of where the array sits.
        let p = SoundSpeedProfile::bilinear();
        let c_h = p.sound_speed(60.0).unwrap();
        let c_d = p.sound_speed(120.0).unwrap();
        let expect = c_d / c_h;
        let mut z = 60.5;
        while z <= 120.0 {
            let r = shallow_reach(&p, z, 60.0, 120.0).unwrap();
            assert!(
                (r.theta_d.cos() - expect).abs() < 1e-12,
                "z={z}: cos {} vs {}",
                r.theta_d.cos(),
                expect
            );
            z += 0.5;
        }
    }

    #[test]
    fn reach_grows_monotonically_toward_the_seabed() {
        let p = SoundSpeedProfile::bilinear();
        let mut prev = 0.0;
        let mut best = (0.0, 0.0);
        for i in 61..=120 {
            let z = i as f64;
            let r = shallow_reach(&p, z, 60.0, 120.0).unwrap().reach;
            assert!(r > prev, "reach fell between {} and {z}", z - 1.0);
            if r > best.1 {
                best = (z, r);
            }
            prev = r;
        }
        assert_eq!(best.0, 120.0);

        let opt = optimize_ris_depth(&p, 60.0, 120.0, PlacementMethod::GoldenSection).unwrap();
        assert!((opt.z_ris - best.0).abs() < 0.5, "optimizer found {}", opt.z_ris);
    }

    #[test]
    fn optimizer_methods_agree_on_the_duct_profile() {
        let p = SoundSpeedProfile::bilinear();
        let gs = optimize_ris_depth(&p, 60.0, 120.0, PlacementMethod::GoldenSection).unwrap();
        let gr = optimize_ris_depth(&p, 60.0, 120.0, PlacementMethod::GridRefine).unwrap();
        let ga =
            optimize_ris_depth(&p, 60.0, 120.0, PlacementMethod::Genetic { seed: 7 }).unwrap();
        assert!((gs.z_ris - 120.0).abs() < 0.5, "gs found {}", gs.z_ris);
        assert!((gr.z_ris - 120.0).abs() < 0.5, "gr found {}", gr.z_ris);
        assert!((ga.z_ris - 120.0).abs() < 0.5, "ga found {}", ga.z_ris);
        assert!((gs.z_ris - gr.z_ris).abs() < 0.5);
        assert!((gs.reach - 1020.8).abs() < 10.0);
        assert!(!gs.history.is_empty() && gs.iterations == gs.history.len() as u64);

        // Seeded search reproduces exactly.
        let ga2 =
            optimize_ris_depth(&p, 60.0, 120.0, PlacementMethod::Genetic { seed: 7 }).unwrap();
        assert_eq!(ga.z_ris, ga2.z_ris);
        assert_eq!(ga.reach, ga2.reach);
    }

    /// Duct profile with a second, deeper speed minimum: best mooring sits
    /// at the interior kink at 108 m, not on the seabed.
    fn wavy_profile() -> SoundSpeedProfile {
        use crate::ssp::Layer;
        SoundSpeedProfile::layered(vec![
            Layer {
                z_top: 0.0,
                z_bottom: 60.0,
                c_top: 1500.0,
                gradient: 0.1883,
            },
            Layer {
                z_top: 60.0,
                z_bottom: 90.0,
                c_top: 1511.0,
                gradient: -16.0 / 30.0,
            },
            Layer {
                z_top: 90.0,
                z_bottom: 108.0,
                c_top: 1495.0,
                gradient: 0.9,
            },
            Layer {
                z_top: 108.0,
                z_bottom: 120.0,
                c_top: 1511.2,
                gradient: -15.2 / 12.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn interior_optimum_found_against_brute_force() {
        let p = wavy_profile();
        // 0.1 m brute-force reference.
        let mut brute = (0.0, f64::NEG_INFINITY);
        let mut z = 60.1;
        while z <= 120.0 {
            if let Ok(r) = shallow_reach(&p, z, 60.0, 120.0) {
                if r.reach > brute.1 {
                    brute = (z, r.reach);
                }
            }
            z += 0.1;
        }
        assert!((brute.0 - 108.0).abs() < 0.11, "brute force at {}", brute.0);
        assert!((brute.1 - 9270.93).abs() < 20.0, "brute reach {}", brute.1);

        let gr = optimize_ris_depth(&p, 60.0, 120.0, PlacementMethod::GridRefine).unwrap();
        assert!((gr.z_ris - brute.0).abs() < 0.5, "gr found {}", gr.z_ris);
        let ga =
            optimize_ris_depth(&p, 60.0, 120.0, PlacementMethod::Genetic { seed: 42 }).unwrap();
        assert!((ga.z_ris - brute.0).abs() < 0.5, "ga found {}", ga.z_ris);
    }

    #[test]
    fn relay_chain_counts() {
        let p = SoundSpeedProfile::bilinear();
        let plan = multihop_plan(&p, 60.0, 120.0, 120.0, 10_000.0).unwrap();
        assert_eq!(plan.unit_count, 10);
        assert_eq!(plan.positions.len(), 10);
        for w in plan.positions.windows(2) {
            assert!(w[1].0 > w[0].0);
        }
        assert!(plan.positions.last().unwrap().0 >= 10_000.0 - plan.per_hop_reach);
        assert!(plan.positions.iter().all(|&(_, z)| z == 120.0));

        let plan = multihop_plan(&p, 60.0, 120.0, 60.01, 10_000.0).unwrap();
        assert_eq!(plan.unit_count, 20);

        let plan = multihop_plan(&p, 60.0, 120.0, 120.0, 0.0).unwrap();
        assert_eq!(plan.unit_count, 0);
        assert!(plan.positions.is_empty());
    }

    #[test]
    fn placement_export_shape() {
        let p = SoundSpeedProfile::bilinear();
        let r = shallow_reach(&p, 120.0, 60.0, 120.0).unwrap();
        let e = r.export();
        assert_eq!(e.method, "direct");
        assert!((e.theta_reflect_deg - 13.4092).abs() < 1e-3);
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains("\"z_ris_m\":120.0"));
        assert!(json.contains("\"reach_m\""));
    }
}
