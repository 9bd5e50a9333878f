//! Release gate: one test per acceptance criterion, each printing a
//! PASS line with its measured numbers so a run reads as a checklist.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sofar_core::deploy::{self, PlacementMethod};
use sofar_core::dynamics::{
    rotation_error_budget, simulate_correction, CorrectionOptions, GyroModel, PoseTrajectory,
};
use sofar_core::field::{
    accumulate_fan, straight_line_loss, LinkBudget, Region, SourceGeometry, TLGrid,
};
use sofar_core::field::GridSpec;
use sofar_core::ray::{self, RayEvent, TraceConfig};
use sofar_core::ris::{required_units, RisArray};
use sofar_core::ssp::SoundSpeedProfile;

fn munk() -> SoundSpeedProfile {
    SoundSpeedProfile::munk_standard()
}

fn bilinear() -> SoundSpeedProfile {
    SoundSpeedProfile::bilinear()
}

#[test]
fn criterion_01_channel_axis_sanity() {
    let t0 = Instant::now();
    let p = munk();
    let c_axis = p.sound_speed(2100.0).unwrap();
    assert!(
        (c_axis - 1500.0).abs() / 1500.0 < 1e-9,
        "axis speed {c_axis}"
    );
    let g_axis = p.gradient(2100.0).unwrap();
    assert!(g_axis.abs() < 1e-12, "axis gradient {g_axis}");
    // The axis must be the global minimum over the whole column.
    let mut best = (f64::INFINITY, f64::NAN);
    for i in 0..=4000 {
        let z = i as f64;
        let c = p.sound_speed(z).unwrap();
        if c < best.0 {
            best = (c, z);
        }
    }
    assert_eq!(best.1, 2100.0, "minimum found at {} m", best.1);
    let axis = p.channel_axis().unwrap();
    assert!((axis.depth - 2100.0).abs() < 0.01);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:?}");
    println!(
        "criterion 01 (channel-axis sanity: c(2100)={c_axis:.6}, zero gradient, global minimum): PASS"
    );
}

#[test]
fn criterion_02_axis_span_dominance_and_ratio_identity() {
    let t0 = Instant::now();
    let p = munk();
    let mut worst_gap = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for i in 1..=20 {
        let h = 100.0 * i as f64;
        let res = deploy::deep_span_ratio(&p, h, 2100.0).unwrap();
        assert!(
            res.ratio > 1.0 + 1e-6,
            "h={h}: ratio {} not above 1",
            res.ratio
        );
        let gap = (res.ratio - (1.0 + res.xi)).abs();
        assert!(gap < 1e-6, "h={h}: identity violated by {gap:.3e}");
        worst_gap = worst_gap.max(gap);
        min_ratio = min_ratio.min(res.ratio);
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    println!(
        "criterion 02 (axis span ratio > 1 at 20 depths, identity gap <= {worst_gap:.1e}, min ratio {min_ratio:.5}): PASS"
    );
}

#[test]
fn criterion_03_tracer_matches_quadrature() {
    let t0 = Instant::now();
    let p = munk();
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let cfg = TraceConfig {
        max_range: 100_000.0,
        dz: 1.0,
        bottom_reflect: false,
        max_steps: 50_000_000,
    };
    let mut worst = 0.0f64;
    for trial in 0..20 {
        // Launch off the axis steeply enough to leave it but flat enough
        // to turn inside the column in both directions (the seabed caps
        // downward turns near 5.8 degrees).
        let mag = rng.gen_range(1.0f64..5.5).to_radians();
        let theta0 = if trial % 2 == 0 { mag } else { -mag };
        let z0 = 2100.0;
        let z_turn = ray::turning_depth(&p, z0, theta0, theta0 > 0.0).unwrap();
        let span = ray::horizontal_span(
            &p,
            z0,
            theta0,
            z0.min(z_turn),
            z0.max(z_turn),
        )
        .unwrap();
        let path = ray::trace_ray(&p, z0, theta0, &cfg).unwrap();
        let traced = path
            .events
            .iter()
            .find_map(|e| match e {
                RayEvent::TurnUp { r, .. } | RayEvent::TurnDown { r, .. } => Some(*r),
                _ => None,
            })
            .expect("ray must turn");
        let rel = (traced - span).abs() / span;
        assert!(
            rel < 1e-3,
            "theta {:.3} deg: traced {traced:.2} vs quadrature {span:.2} ({rel:.2e})",
            theta0.to_degrees()
        );
        worst = worst.max(rel);
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:?}");
    println!(
        "criterion 03 (tracer vs quadrature, 20 random angles, worst {worst:.2e} rel): PASS"
    );
}

#[test]
fn criterion_04_duct_mooring_optimum() {
    let t0 = Instant::now();
    let p = bilinear();
    let res = deploy::optimize_ris_depth(&p, 60.0, 120.0, PlacementMethod::GoldenSection).unwrap();
    assert!((res.z_ris - 120.0).abs() < 0.5, "z* {}", res.z_ris);
    assert!((res.reach - 1019.0).abs() < 10.0, "reach {}", res.reach);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "took {dt:?}");
    println!(
        "criterion 04 (duct mooring optimum z*={:.2} m, reach {:.1} m): PASS",
        res.z_ris, res.reach
    );
}

#[test]
fn criterion_05_relay_chain_counts() {
    let p = bilinear();
    let at_bottom = deploy::multihop_plan(&p, 60.0, 120.0, 120.0, 10_000.0).unwrap();
    assert!(
        (at_bottom.unit_count as i64 - 10).abs() <= 1,
        "bottom mooring needs {}",
        at_bottom.unit_count
    );
    let under_duct = deploy::multihop_plan(&p, 60.0, 120.0, 60.01, 10_000.0).unwrap();
    assert!(
        (under_duct.unit_count as i64 - 20).abs() <= 1,
        "under-duct mooring needs {}",
        under_duct.unit_count
    );
    println!(
        "criterion 05 (relay counts over 10 km: {} at the bottom, {} under the duct): PASS",
        at_bottom.unit_count, under_duct.unit_count
    );
}

#[test]
fn criterion_06_twist_error_budget() {
    let deterministic = rotation_error_budget(0.001, 0.01, 0.0, 5.0, 10.0, 1.0);
    assert!(
        (deterministic - 0.105).abs() < 1e-12,
        "deterministic part {deterministic}"
    );
    let full = rotation_error_budget(0.001, 0.01, 0.005, 5.0, 10.0, 1.0);
    assert!((full - 0.121).abs() <= 0.002, "full budget {full}");
    println!(
        "criterion 06 (twist budget {deterministic:.3} deg deterministic, {full:.4} deg full): PASS"
    );
}

#[test]
fn criterion_07_correction_rmse_targets() {
    let t0 = Instant::now();
    let array = RisArray {
        n_units: 2,
        square: false,
        spacing: 0.075,
        depth: 100.0,
        range: 0.0,
        frequency: 10_000.0,
    };
    let theta = 45f64.to_radians();

    // Sway experiment: measured pose is exact, every axis compensated.
    let sway_opts = CorrectionOptions {
        skip_below_spacing: false,
        ..CorrectionOptions::default()
    };
    let mut sway_min = f64::INFINITY;
    for seed in 0..100 {
        let traj = PoseTrajectory::gaussian_walk(20, 0.5, 0.05, 0.5, seed).unwrap();
        let trace =
            simulate_correction(&traj, &GyroModel::ideal(), &array, theta, 0.0, &sway_opts)
                .unwrap();
        sway_min = sway_min.min(trace.reduction_percent);
    }
    assert!(sway_min >= 99.0, "worst sway reduction {sway_min}%");

    // Twist experiment: wave-driven rotation read through the lossy gyro.
    let mut reductions = Vec::with_capacity(100);
    for seed in 0..100 {
        let traj = PoseTrajectory::sinusoid(5f64.to_radians(), 10.0, 0.5, 10.0, seed).unwrap();
        let gyro = GyroModel {
            scale_error: 0.001,
            bias: 0.01f64.to_radians(),
            noise_std: 0.005f64.to_radians(),
            seed,
        };
        let trace = simulate_correction(
            &traj,
            &gyro,
            &array,
            theta,
            0.0,
            &CorrectionOptions::default(),
        )
        .unwrap();
        reductions.push(trace.reduction_percent);
    }
    let twist_mean = reductions.iter().sum::<f64>() / reductions.len() as f64;
    assert!(
        (70.0..=90.0).contains(&twist_mean),
        "twist mean {twist_mean}%"
    );
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "took {dt:?}");
    println!(
        "criterion 07 (sway reduction >= {sway_min:.1}%, twist mean {twist_mean:.1}% over 100 trials): PASS"
    );
}

#[test]
fn criterion_08_reflectors_light_the_first_shadow_zone() {
    let t0 = Instant::now();
    let p = munk();
    let cfg = TraceConfig {
        max_range: 35_000.0,
        dz: 1.0,
        bottom_reflect: false,
        max_steps: 50_000_000,
    };
    let spec = GridSpec {
        r_min: 0.0,
        r_max: 35_000.0,
        z_min: 0.0,
        z_max: 4000.0,
        nr: 350,
        nz: 200,
    };
    let window = Region {
        r_min: 20_000.0,
        r_max: 30_000.0,
        z_min: 200.0,
        z_max: 4000.0,
    };
    let thresholds: Vec<f64> = (0..6).map(|i| 100.0 + 10.0 * i as f64).collect();
    let frequency = 10_000.0;
    let source_depth = 200.0;

    let fan: Vec<f64> = (0..41)
        .map(|i| (-4.0 + 0.2 * i as f64).to_radians())
        .collect();
    let mut direct = TLGrid::new(spec).unwrap();
    accumulate_fan(
        &mut direct,
        &p,
        SourceGeometry::at_origin(source_depth),
        &fan,
        &cfg,
        frequency,
        5.0,
    )
    .unwrap();

    let budget = |t: f64| LinkBudget { source_level_db: 0.0, threshold_db: t };
    let direct_cov: Vec<f64> = thresholds
        .iter()
        .map(|&t| direct.coverage_proportion(&window, budget(t).allowed_loss_db()))
        .collect();
    for w in direct_cov.windows(2) {
        assert!(w[1] >= w[0], "coverage must be nondecreasing in threshold");
    }
    for (t, c) in thresholds.iter().zip(&direct_cov) {
        assert!(*c < 0.3, "direct coverage {c:.3} at {t} dB too high");
    }

    // Two axis-moored reflectors re-radiating into the window.
    let emit: Vec<f64> = (0..3201)
        .map(|i| (-80.0 + 0.05 * i as f64).to_radians())
        .collect();
    let mut merged = direct.clone();
    for range in [22_500.0, 27_500.0] {
        let array = RisArray {
            n_units: 1_000_000,
            square: false,
            spacing: 0.075,
            depth: 2100.0,
            range,
            frequency,
        };
        let feed = straight_line_loss((0.0, source_depth), (range, array.depth), frequency);
        let offset = feed - array.gain_db();
        let mut contrib = TLGrid::new(spec).unwrap();
        for mirror in [false, true] {
            accumulate_fan(
                &mut contrib,
                &p,
                SourceGeometry { depth: array.depth, range_offset: range, mirror },
                &emit,
                &cfg,
                frequency,
                5.0,
            )
            .unwrap();
        }
        contrib.add_offset(offset);
        merged.min_merge(&contrib).unwrap();
    }

    let merged_cov: Vec<f64> = thresholds
        .iter()
        .map(|&t| merged.coverage_proportion(&window, budget(t).allowed_loss_db()))
        .collect();
    for (d, m) in direct_cov.iter().zip(&merged_cov) {
        assert!(m >= d, "reflectors must never reduce coverage");
    }
    let top = *merged_cov.last().unwrap();
    assert!(top >= 0.95, "top-threshold coverage {top:.3}");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 300.0, "took {dt:?}");
    println!(
        "criterion 08 (window coverage {:.3} -> {top:.3} at 150 dB, ordered at all {} thresholds): PASS",
        direct_cov.last().unwrap(),
        thresholds.len()
    );
}

#[test]
fn criterion_09_unit_demand_is_flat_across_depth() {
    let frequency = 10_000.0;
    let budget = LinkBudget { source_level_db: 0.0, threshold_db: 150.0 };
    let mut panels = Vec::new();
    for depth in [500.0, 1000.0, 1500.0, 2100.0] {
        let tl1 = straight_line_loss((0.0, 200.0), (20_000.0, depth), frequency);
        let tl2 = straight_line_loss((20_000.0, depth), (25_000.0, 2100.0), frequency);
        let units = required_units(&budget, tl1, tl2, true).unwrap();
        // 20 x 20 elements per panel.
        panels.push((depth, (units as f64 / 400.0).ceil() as u64));
    }
    let max = panels.iter().map(|&(_, n)| n).max().unwrap();
    let min = panels.iter().map(|&(_, n)| n).min().unwrap();
    assert!(
        max <= 2 * min,
        "panel demand swings too much: {panels:?}"
    );
    println!(
        "criterion 09 (panel demand across depths {panels:?}, max/min <= 2): PASS"
    );
}
