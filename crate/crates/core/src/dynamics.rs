//! Platform motion, gyro error, and phase-correction bookkeeping.
//!
//! A moored array sways and twists; both motions detune its element
//! phasing. This module generates pose trajectories, pushes them through a
//! rate-gyro error model, applies the phase corrections a controller would
//! compute from the measured pose, and scores the residual against the
//! uncompensated deviation.

use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ris::RisArray;

/// Which motion generator produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    GaussianWalk,
    Sinusoid,
    Constant,
}

/// Platform pose over uniform time steps: sway displacements and a twist
/// angle, plus the true twist rate the gyro will sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseTrajectory {
    pub kind: TrajectoryKind,
    pub seed: u64,
    /// Uniform step, s.
    pub dt: f64,
    /// Sample instants `(i+1)*dt`, s.
    pub t: Vec<f64>,
    /// Vertical displacement per step, m.
    pub dz: Vec<f64>,
    /// Horizontal displacement per step, m.
    pub dx: Vec<f64>,
    /// Twist angle per step, rad.
    pub beta: Vec<f64>,
    /// True twist rate over each step's left endpoint, rad/s.
    pub omega: Vec<f64>,
}

impl PoseTrajectory {
    /// Clipped Gaussian random walks in both displacement axes; no twist.
    /// Each step adds a zero-mean draw of `step_std` and the walk is
    /// clamped to `[-max_abs, max_abs]`.
    pub fn gaussian_walk(
        n_steps: usize,
        dt: f64,
        step_std: f64,
        max_abs: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(dt > 0.0) || n_steps == 0 {
            return Err(Error::InvalidConfig("need a positive step and length".into()));
        }
        if !(step_std >= 0.0) || !(max_abs >= 0.0) {
            return Err(Error::InvalidConfig("spreads must be nonnegative".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, step_std)
            .map_err(|e| Error::InvalidConfig(format!("bad walk spread: {e}")))?;
        let walk = |rng: &mut ChaCha8Rng| {
            let mut cur = 0.0f64;
            (0..n_steps)
                .map(|_| {
                    cur = (cur + normal.sample(rng)).clamp(-max_abs, max_abs);
                    cur
                })
                .collect::<Vec<_>>()
        };
        let dz = walk(&mut rng);
        let dx = walk(&mut rng);
        Ok(Self {
            kind: TrajectoryKind::GaussianWalk,
            seed,
            dt,
            t: (1..=n_steps).map(|i| i as f64 * dt).collect(),
            dz,
            dx,
            beta: vec![0.0; n_steps],
            omega: vec![0.0; n_steps],
        })
    }

    /// Wave-forced twist `beta(t) = A sin(2 pi t / T + phase) - A sin(phase)`
    /// starting from zero, with the phase drawn from the seed; no sway.
    pub fn sinusoid(
        amplitude: f64,
        period: f64,
        dt: f64,
        duration: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(dt > 0.0) || !(period > 0.0) || !(duration >= dt) {
            return Err(Error::InvalidConfig(
                "need positive period and at least one step".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phase = Uniform::new(0.0, 2.0 * std::f64::consts::PI).sample(&mut rng);
        let n_steps = (duration / dt).round() as usize;
        let om = 2.0 * std::f64::consts::PI / period;
        let t: Vec<f64> = (1..=n_steps).map(|i| i as f64 * dt).collect();
        let beta = t
            .iter()
            .map(|&ti| amplitude * ((om * ti + phase).sin() - phase.sin()))
            .collect();
        // The gyro samples the true rate at the left end of each step.
        let omega = t
            .iter()
            .map(|&ti| amplitude * om * (om * (ti - dt) + phase).cos())
            .collect();
        Ok(Self {
            kind: TrajectoryKind::Sinusoid,
            seed,
            dt,
            t,
            dz: vec![0.0; n_steps],
            dx: vec![0.0; n_steps],
            beta,
            omega,
        })
    }

    /// Fixed pose held for `n_steps`; twist rate zero (a gyro sees nothing).
    pub fn constant(n_steps: usize, dt: f64, dz: f64, dx: f64, beta: f64) -> Result<Self> {
        if !(dt > 0.0) || n_steps == 0 {
            return Err(Error::InvalidConfig("need a positive step and length".into()));
        }
        Ok(Self {
            kind: TrajectoryKind::Constant,
            seed: 0,
            dt,
            t: (1..=n_steps).map(|i| i as f64 * dt).collect(),
            dz: vec![dz; n_steps],
            dx: vec![dx; n_steps],
            beta: vec![beta; n_steps],
            omega: vec![0.0; n_steps],
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Rate-gyro error model: scale error, constant bias, and white noise on
/// the measured angular rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GyroModel {
    /// Multiplicative scale error on the true rate.
    pub scale_error: f64,
    /// Constant rate bias, rad/s.
    pub bias: f64,
    /// White-noise standard deviation on the rate, rad/s.
    pub noise_std: f64,
    pub seed: u64,
}

impl GyroModel {
    pub fn ideal() -> Self {
        Self {
            scale_error: 0.0,
            bias: 0.0,
            noise_std: 0.0,
            seed: 0,
        }
    }
}

/// Integrate measured rates into a twist-angle series by the left
/// rectangle rule: `beta[k] = sum_{i<=k} ((1+scale)*omega[i] + bias +
/// noise[i]) * dt`.
pub fn gyro_integrate(true_omega: &[f64], dt: f64, model: &GyroModel) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig("time step must be positive".into()));
    }
    if !(model.noise_std >= 0.0) {
        return Err(Error::InvalidConfig("noise spread must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let noise = Normal::new(0.0, model.noise_std)
        .map_err(|e| Error::InvalidConfig(format!("bad noise spread: {e}")))?;
    let mut acc = 0.0;
    Ok(true_omega
        .iter()
        .map(|&w| {
            acc += ((1.0 + model.scale_error) * w + model.bias + noise.sample(&mut rng)) * dt;
            acc
        })
        .collect())
}

/// Axis a displacement acts along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplacementKind {
    Vertical,
    Horizontal,
}

/// Phase deviation a rigid displacement of the whole array imposes on a
/// wave arriving at grazing angle `theta`: the path-length change times
/// the wavenumber.
pub fn displacement_phase_dev(k: f64, delta: f64, theta: f64, kind: DisplacementKind) -> f64 {
    match kind {
        DisplacementKind::Vertical => k * delta * theta.cos(),
        DisplacementKind::Horizontal => k * delta * theta.sin(),
    }
}

/// Steering phase of element `n` (1-based) for arrival `theta` and
/// departure `alpha_out` with the array face twisted by `beta`:
/// `(n-1)*k*d*(sin(theta+beta) - sin(alpha_out-beta))`.
pub fn rotation_phase_comp(
    n: u64,
    k: f64,
    d: f64,
    theta: f64,
    alpha_out: f64,
    beta: f64,
) -> f64 {
    let step = k * d * ((theta + beta).sin() - (alpha_out - beta).sin());
    n.saturating_sub(1) as f64 * step
}

/// Twist-angle error budget in degrees after time `t_s`: scale error on
/// the excursion, accumulated bias, and the white-noise random walk
/// referenced to `dt_ref_s`.
pub fn rotation_error_budget(
    scale_error: f64,
    bias_deg_per_s: f64,
    noise_std_deg_per_s: f64,
    beta_deg: f64,
    t_s: f64,
    dt_ref_s: f64,
) -> f64 {
    scale_error * beta_deg + bias_deg_per_s * t_s + noise_std_deg_per_s * (t_s * dt_ref_s).sqrt()
}

/// Residual of the first-order expansion `sin(theta+beta+dbeta) approx
/// sin(theta+beta) + dbeta*cos(theta+beta)`; bounded by `dbeta^2 / 2`.
pub fn small_angle_residual(theta: f64, beta: f64, dbeta: f64) -> f64 {
    (theta + beta + dbeta).sin() - ((theta + beta).sin() + dbeta * (theta + beta).cos())
}

/// Knobs for [`simulate_correction`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionOptions {
    /// Leave displacements smaller than the element spacing uncompensated.
    pub skip_below_spacing: bool,
    /// White noise on the measured displacements, m.
    pub pose_noise_std: f64,
    /// Seed for the pose-measurement noise.
    pub seed: u64,
    /// Sound speed at the array, m/s; sets the wavenumber.
    pub c_local: f64,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        Self {
            skip_below_spacing: true,
            pose_noise_std: 0.0,
            seed: 0,
            c_local: 1500.0,
        }
    }
}

/// One simulated control step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsStep {
    pub t: f64,
    pub dz: f64,
    pub dx: f64,
    pub beta: f64,
    pub dz_meas: f64,
    pub dx_meas: f64,
    pub beta_meas: f64,
    pub dphi_uncorrected: f64,
    pub dphi_corrected: f64,
}

/// Deviation series with its summary scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub steps: Vec<DynamicsStep>,
    pub rmse_uncorrected: f64,
    pub rmse_corrected: f64,
    /// `100 * (1 - corrected/uncorrected)`; zero for a dead-still platform.
    pub reduction_percent: f64,
}

/// Summary shape for JSON export.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DynamicsSummary {
    pub rmse_uncorrected_rad: f64,
    pub rmse_corrected_rad: f64,
    pub reduction_percent: f64,
}

impl DynamicsTrace {
    pub fn summary(&self) -> DynamicsSummary {
        DynamicsSummary {
            rmse_uncorrected_rad: self.rmse_uncorrected,
            rmse_corrected_rad: self.rmse_corrected,
            reduction_percent: self.reduction_percent,
        }
    }

    /// CSV with header `t_s,dphi_uncorrected_rad,dphi_corrected_rad`.
    pub fn to_csv<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "t_s,dphi_uncorrected_rad,dphi_corrected_rad")?;
        for s in &self.steps {
            writeln!(
                w,
                "{:.8e},{:.8e},{:.8e}",
                s.t, s.dphi_uncorrected, s.dphi_corrected
            )?;
        }
        Ok(())
    }
}

fn rms(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0u64);
    for x in xs {
        sum += x * x;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Run the pose series through the sensor models and the phase controller.
///
/// Per step, the uncorrected deviation is what the nominal steering
/// profile suffers under the true pose; the corrected deviation is the
/// residual after re-phasing with the measured pose — gyro-integrated
/// twist, noisy displacements, and optionally the skip rule that ignores
/// sub-spacing sway. Deviations are scored at the far element of the
/// array, where steering error is largest.
pub fn simulate_correction(
    traj: &PoseTrajectory,
    gyro: &GyroModel,
    array: &RisArray,
    theta: f64,
    alpha_out: f64,
    opts: &CorrectionOptions,
) -> Result<DynamicsTrace> {
    array.validate()?;
    if traj.is_empty() {
        return Err(Error::InvalidConfig("trajectory has no steps".into()));
    }
    if !(opts.c_local > 0.0) || !(opts.pose_noise_std >= 0.0) {
        return Err(Error::InvalidConfig("bad correction options".into()));
    }
    let k = 2.0 * std::f64::consts::PI * array.frequency / opts.c_local;
    let d = array.spacing;
    let n = array.n_units;
    let beta_meas = gyro_integrate(&traj.omega, traj.dt, gyro)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pose_noise = Normal::new(0.0, opts.pose_noise_std)
        .map_err(|e| Error::InvalidConfig(format!("bad pose noise: {e}")))?;

    let steer = |beta: f64| rotation_phase_comp(n, k, d, theta, alpha_out, beta);
    let steer0 = steer(0.0);

    let mut steps = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let (dz, dx, beta) = (traj.dz[i], traj.dx[i], traj.beta[i]);
        let dz_meas = dz + pose_noise.sample(&mut rng);
        let dx_meas = dx + pose_noise.sample(&mut rng);

        let dev_z = displacement_phase_dev(k, dz, theta, DisplacementKind::Vertical);
        let dev_x = displacement_phase_dev(k, dx, theta, DisplacementKind::Horizontal);
        // Residual after subtracting the compensation computed from the
        // measured pose; a skipped axis keeps its full deviation.
        let res_z = if opts.skip_below_spacing && dz.abs() < d {
            dev_z
        } else {
            dev_z - displacement_phase_dev(k, dz_meas, theta, DisplacementKind::Vertical)
        };
        let res_x = if opts.skip_below_spacing && dx.abs() < d {
            dev_x
        } else {
            dev_x - displacement_phase_dev(k, dx_meas, theta, DisplacementKind::Horizontal)
        };

        let rot_true = steer(beta);
        let dphi_uncorrected = dev_z + dev_x + (rot_true - steer0);
        let dphi_corrected = res_z + res_x + (rot_true - steer(beta_meas[i]));

        steps.push(DynamicsStep {
            t: traj.t[i],
            dz,
            dx,
            beta,
            dz_meas,
            dx_meas,
            beta_meas: beta_meas[i],
            dphi_uncorrected,
            dphi_corrected,
        });
    }
    let rmse_uncorrected = rms(steps.iter().map(|s| s.dphi_uncorrected));
    let rmse_corrected = rms(steps.iter().map(|s| s.dphi_corrected));
    let reduction_percent = if rmse_uncorrected > 0.0 {
        100.0 * (1.0 - rmse_corrected / rmse_uncorrected)
    } else {
        0.0
    };
    Ok(DynamicsTrace {
        steps,
        rmse_uncorrected,
        rmse_corrected,
        reduction_percent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const K_10K: f64 = 2.0 * std::f64::consts::PI * 10_000.0 / 1500.0;

    fn test_array() -> RisArray {
        RisArray {
            n_units: 2,
            square: false,
            spacing: 0.075,
            depth: 100.0,
            range: 0.0,
            frequency: 10_000.0,
        }
    }

    #[test]
    fn displacement_deviation_references() {
        assert_eq!(
            displacement_phase_dev(K_10K, 0.0, 0.3, DisplacementKind::Vertical),
            0.0
        );
        // 41.888 rad/m over half a metre at 45 degrees.
        let v = displacement_phase_dev(K_10K, 0.5, 45f64.to_radians(), DisplacementKind::Vertical);
        assert!((v - 14.8096).abs() < 1e-3, "got {v}");
        // Geometry nulls: vertical motion along a vertical wavefront,
        // horizontal motion along a horizontal one.
        let z90 =
            displacement_phase_dev(K_10K, 0.5, 90f64.to_radians(), DisplacementKind::Vertical);
        assert!(z90.abs() < 1e-12);
        let x0 = displacement_phase_dev(K_10K, 0.5, 0.0, DisplacementKind::Horizontal);
        assert_eq!(x0, 0.0);
    }

    #[test]
    fn displacement_deviation_is_linear() {
        for i in 1..20 {
            let delta = 0.03 * i as f64;
            let k = 10.0 + 3.0 * i as f64;
            let one = displacement_phase_dev(1.0, 1.0, 0.7, DisplacementKind::Horizontal);
            let v = displacement_phase_dev(k, delta, 0.7, DisplacementKind::Horizontal);
            assert!((v - k * delta * one).abs() < 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn steering_phase_references() {
        assert_eq!(rotation_phase_comp(1, K_10K, 0.075, 0.5, 0.2, 0.1), 0.0);
        assert_eq!(rotation_phase_comp(5, K_10K, 0.075, 0.4, 0.4, 0.0), 0.0);
        // k*d = pi here: element 2 twisted 5 degrees between two 45-degree
        // legs gets pi*(sin 50 - sin 40).
        let v = rotation_phase_comp(
            2,
            K_10K,
            0.075,
            45f64.to_radians(),
            45f64.to_radians(),
            5f64.to_radians(),
        );
        assert!((v - 0.387223).abs() < 1e-5, "got {v}");
    }

    #[test]
    fn steering_phase_scales_with_element_index() {
        let step = rotation_phase_comp(2, K_10K, 0.075, 0.5, -0.1, 0.03);
        for n in 1..=40u64 {
            let v = rotation_phase_comp(n, K_10K, 0.075, 0.5, -0.1, 0.03);
            assert_eq!(v, (n - 1) as f64 * step);
        }
    }

    #[test]
    fn error_free_gyro_reproduces_the_rectangle_sum() {
        let omega = [0.01, -0.02, 0.03, 0.005, -0.015];
        let beta = gyro_integrate(&omega, 0.5, &GyroModel::ideal()).unwrap();
        let mut acc = 0.0;
        for (w, b) in omega.iter().zip(&beta) {
            acc += w * 0.5;
            assert!((b - acc).abs() < 1e-15);
        }
    }

    #[test]
    fn bias_alone_accumulates_linearly() {
        let model = GyroModel {
            bias: 0.01f64.to_radians(),
            ..GyroModel::ideal()
        };
        let omega = vec![0.0; 100];
        let beta = gyro_integrate(&omega, 0.1, &model).unwrap();
        // 0.01 deg/s for 10 s.
        assert!((beta.last().unwrap().to_degrees() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn gyro_noise_random_walks_like_sqrt_t() {
        let omega = vec![0.0; 100];
        let (dt, std) = (0.1, 0.02);
        let mut finals = Vec::with_capacity(2000);
        for seed in 0..2000 {
            let model = GyroModel {
                noise_std: std,
                seed,
                ..GyroModel::ideal()
            };
            finals.push(*gyro_integrate(&omega, dt, &model).unwrap().last().unwrap());
        }
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        let var =
            finals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / finals.len() as f64;
        let expect = std * (10.0 * dt).sqrt();
        // 2000 samples pin the ensemble spread to a few percent.
        assert!(
            (var.sqrt() - expect).abs() < 0.05 * expect,
            "std {} vs {expect}",
            var.sqrt()
        );
    }

    #[test]
    fn twist_budget_references() {
        let det = rotation_error_budget(0.001, 0.01, 0.0, 5.0, 10.0, 1.0);
        assert!((det - 0.105).abs() < 1e-12);
        let full = rotation_error_budget(0.001, 0.01, 0.005, 5.0, 10.0, 1.0);
        assert!((full - 0.12081).abs() < 1e-4, "got {full}");
        assert_eq!(rotation_error_budget(0.0, 0.0, 0.0, 5.0, 10.0, 1.0), 0.0);
    }

    #[test]
    fn linearization_residual_is_second_order() {
        assert_eq!(small_angle_residual(0.5, 0.02, 0.0), 0.0);
        let dbeta = 0.121f64.to_radians();
        let r = small_angle_residual(30f64.to_radians(), 0.0, dbeta);
        assert!(r.abs() < 2.3e-6, "got {r}");
        assert!(r.abs() <= 0.5 * dbeta * dbeta);
        // Halving the angle quarters the residual.
        let r_half = small_angle_residual(30f64.to_radians(), 0.0, dbeta / 2.0);
        let ratio = r / r_half;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn perfect_pose_measurement_cancels_sway_exactly() {
        let traj = PoseTrajectory::gaussian_walk(200, 0.1, 0.05, 0.5, 3).unwrap();
        let opts = CorrectionOptions {
            skip_below_spacing: false,
            ..CorrectionOptions::default()
        };
        let trace = simulate_correction(
            &traj,
            &GyroModel::ideal(),
            &test_array(),
            45f64.to_radians(),
            0.0,
            &opts,
        )
        .unwrap();
        assert!(trace.rmse_uncorrected > 0.0);
        assert_eq!(trace.rmse_corrected, 0.0);
        assert_eq!(trace.reduction_percent, 100.0);
    }

    #[test]
    fn skip_rule_leaves_small_sway_uncompensated() {
        let traj = PoseTrajectory::gaussian_walk(200, 0.1, 0.05, 0.5, 3).unwrap();
        let trace = simulate_correction(
            &traj,
            &GyroModel::ideal(),
            &test_array(),
            45f64.to_radians(),
            0.0,
            &CorrectionOptions::default(),
        )
        .unwrap();
        assert!(trace.rmse_corrected > 0.0, "skipped steps must leave residue");
        assert!(
            trace.reduction_percent > 50.0 && trace.reduction_percent < 99.99,
            "got {}",
            trace.reduction_percent
        );
    }

    #[test]
    fn wave_twist_correction_lands_near_eighty_percent() {
        // 5-degree swell over a 10 s period, 0.5 s control steps, the
        // reference gyro error constants.
        let gyro = GyroModel {
            scale_error: 0.001,
            bias: 0.01f64.to_radians(),
            noise_std: 0.005f64.to_radians(),
            seed: 0,
        };
        let mut reductions = Vec::new();
        for seed in 0..100 {
            let traj =
                PoseTrajectory::sinusoid(5f64.to_radians(), 10.0, 0.5, 10.0, seed).unwrap();
            let trace = simulate_correction(
                &traj,
                &GyroModel { seed, ..gyro },
                &test_array(),
                45f64.to_radians(),
                0.0,
                &CorrectionOptions::default(),
            )
            .unwrap();
            assert!(trace.rmse_corrected <= trace.rmse_uncorrected);
            reductions.push(trace.reduction_percent);
        }
        let mean = reductions.iter().sum::<f64>() / reductions.len() as f64;
        assert!(
            (70.0..=90.0).contains(&mean),
            "mean reduction {mean}% out of band"
        );
    }

    #[test]
    fn simulation_is_reproducible() {
        let traj = PoseTrajectory::gaussian_walk(50, 0.1, 0.05, 0.5, 11).unwrap();
        let gyro = GyroModel {
            scale_error: 0.001,
            bias: 2e-4,
            noise_std: 1e-4,
            seed: 5,
        };
        let opts = CorrectionOptions {
            pose_noise_std: 0.01,
            seed: 9,
            ..CorrectionOptions::default()
        };
        let run = || {
            simulate_correction(
                &traj,
                &gyro,
                &test_array(),
                45f64.to_radians(),
                0.1,
                &opts,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn correction_never_hurts_across_random_trials() {
        for seed in 0..40 {
            let traj = PoseTrajectory::gaussian_walk(100, 0.1, 0.05, 0.5, seed).unwrap();
            let opts = CorrectionOptions {
                skip_below_spacing: false,
                pose_noise_std: 0.005,
                seed,
                ..CorrectionOptions::default()
            };
            let trace = simulate_correction(
                &traj,
                &GyroModel::ideal(),
                &test_array(),
                30f64.to_radians(),
                0.0,
                &opts,
            )
            .unwrap();
            assert!(
                trace.rmse_corrected <= trace.rmse_uncorrected,
                "seed {seed}: corrected {} vs {}",
                trace.rmse_corrected,
                trace.rmse_uncorrected
            );
        }
    }

    #[test]
    fn trajectory_generators_respect_their_bounds() {
        let walk = PoseTrajectory::gaussian_walk(500, 0.1, 0.05, 0.5, 1).unwrap();
        assert!(walk.dz.iter().chain(&walk.dx).all(|v| v.abs() <= 0.5));
        assert_eq!(walk.len(), 500);
        assert!((walk.t[1] - walk.t[0] - 0.1).abs() < 1e-12);

        let sin = PoseTrajectory::sinusoid(0.1, 10.0, 0.5, 10.0, 2).unwrap();
        assert_eq!(sin.len(), 20);
        assert!(sin.beta.iter().all(|b| b.abs() <= 0.2 + 1e-12));
        // Twist starts from rest at t = 0.
        assert!(sin.beta[0].abs() < 0.1 * 2.0 * std::f64::consts::PI * 0.5 / 10.0 + 1e-9);

        let cst = PoseTrajectory::constant(5, 1.0, 0.1, -0.2, 0.05).unwrap();
        assert!(cst.dz.iter().all(|&v| v == 0.1));
        assert!(cst.omega.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn trace_exports() {
        let traj = PoseTrajectory::constant(3, 1.0, 0.1, 0.0, 0.0).unwrap();
        let opts = CorrectionOptions {
            skip_below_spacing: false,
            ..CorrectionOptions::default()
        };
        let trace = simulate_correction(
            &traj,
            &GyroModel::ideal(),
            &test_array(),
            0.5,
            0.0,
            &opts,
        )
        .unwrap();
        let mut csv = Vec::new();
        trace.to_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("t_s,dphi_uncorrected_rad,dphi_corrected_rad\n"));
        assert_eq!(text.lines().count(), 4);

        let s = trace.summary();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"reduction_percent\":100.0"));
    }
}
