//! Ray tracing through horizontally stratified water.
//!
//! Rays are marched slab by slab using the exact circular-arc solution for
//! a linear sound-speed gradient; smooth profiles are linearized over a
//! configurable depth step with a directed secant gradient. The Snell
//! constant `xi = cos(theta)/c` is re-imposed at every step, so the traced
//! angles never drift from the invariant. Turning depths are located by
//! bisection on the profile itself; the surface mirrors rays and the seabed
//! absorbs or mirrors depending on configuration.
//!
//! The module also evaluates the horizontal distance covered by a
//! refracted ray between two depths by direct quadrature of
//! `dr = cos(theta0) / sqrt(n^2 - cos^2(theta0)) dz`, which serves as an
//! independent cross-check on the tracer.

use std::f64::consts::FRAC_PI_2;
use std::io;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad;
use crate::ssp::SoundSpeedProfile;

/// Position and direction at one point along a traced ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    /// Arc length from the source, m.
    pub s: f64,
    /// Horizontal range from the source, m.
    pub r: f64,
    /// Depth, m.
    pub z: f64,
    /// Grazing angle, rad; positive when heading downward. At boundary and
    /// interface states this is the outgoing angle.
    pub theta: f64,
}

/// Discrete events recorded along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayEvent {
    /// Mirror reflection at the sea surface.
    SurfaceReflect { s: f64, r: f64 },
    /// Mirror reflection at the seabed (only with a reflective bottom).
    BottomReflect { s: f64, r: f64 },
    /// Downward travel turned upward, by refraction or total internal
    /// reflection at a layer interface.
    TurnUp { s: f64, r: f64, z: f64 },
    /// Upward travel turned downward.
    TurnDown { s: f64, r: f64, z: f64 },
}

impl RayEvent {
    fn shifted(self, dr: f64, mirror: bool) -> Self {
        let map = |r: f64| if mirror { dr - r } else { r + dr };
        match self {
            Self::SurfaceReflect { s, r } => Self::SurfaceReflect { s, r: map(r) },
            Self::BottomReflect { s, r } => Self::BottomReflect { s, r: map(r) },
            Self::TurnUp { s, r, z } => Self::TurnUp { s, r: map(r), z },
            Self::TurnDown { s, r, z } => Self::TurnDown { s, r: map(r), z },
        }
    }
}

/// Why tracing stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached the configured maximum range.
    MaxRange,
    /// Absorbed at the seabed.
    BottomAbsorbed,
    /// Hit the step-count safety cap.
    StepLimit,
}

/// Tracing controls.
#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    /// Range at which tracing stops, m.
    pub max_range: f64,
    /// Nominal depth extent of one marching step, m. The in-slab arc is
    /// exact for linear gradients at any step size; smaller steps give a
    /// finer polyline and a closer linearization of smooth profiles.
    pub dz: f64,
    /// Mirror rays at the seabed instead of absorbing them.
    pub bottom_reflect: bool,
    /// Safety cap on marching steps.
    pub max_steps: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            max_range: 10_000.0,
            dz: 1.0,
            bottom_reflect: false,
            max_steps: 10_000_000,
        }
    }
}

/// A traced ray: the launch parameters, the polyline of states, the events
/// along the way, and why tracing stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct RayPath {
    /// Grazing angle at launch, rad.
    pub theta0: f64,
    /// Source depth, m.
    pub z0: f64,
    pub states: Vec<RayState>,
    pub events: Vec<RayEvent>,
    pub termination: Termination,
}

impl RayPath {
    pub fn final_state(&self) -> RayState {
        *self
            .states
            .last()
            .expect("a path holds at least its launch state")
    }

    /// States interpolated every `ds` meters of arc length, starting at the
    /// source and always including the terminal state.
    pub fn sample_every(&self, ds: f64) -> Vec<RayState> {
        if self.states.len() < 2 || !(ds > 0.0) {
            return self.states.clone();
        }
        let mut out = vec![self.states[0]];
        let mut k = 1u64;
        for w in self.states.windows(2) {
            let (a, b) = (w[0], w[1]);
            let seg = b.s - a.s;
            if seg <= 0.0 {
                continue;
            }
            loop {
                let target = k as f64 * ds;
                if target > b.s + 1e-9 {
                    break;
                }
                let t = ((target - a.s) / seg).clamp(0.0, 1.0);
                out.push(RayState {
                    s: target,
                    r: a.r + t * (b.r - a.r),
                    z: a.z + t * (b.z - a.z),
                    theta: a.theta + t * (b.theta - a.theta),
                });
                k += 1;
            }
        }
        let last = self.final_state();
        if last.s > out.last().expect("non-empty").s + 1e-9 {
            out.push(last);
        }
        out
    }

    /// Largest relative drift of the Snell constant `cos(theta)/c` across
    /// the stored states; a correctly traced path stays below ~1e-9 and a
    /// corrupted one shows up immediately.
    pub fn snell_deviation(&self, profile: &SoundSpeedProfile) -> f64 {
        let first = self.states[0];
        let c0 = profile
            .sound_speed_dir(first.z, first.theta >= 0.0)
            .expect("launch depth is in domain");
        let xi = first.theta.cos() / c0;
        self.states
            .iter()
            .map(|st| {
                let c = if st.theta == 0.0 {
                    profile.sound_speed(st.z)
                } else {
                    profile.sound_speed_dir(st.z, st.theta > 0.0)
                }
                .expect("traced states stay in domain");
                ((st.theta.cos() / c - xi) / xi).abs()
            })
            .fold(0.0, f64::max)
    }

    /// The same path shifted `dr` meters in range (for sources not at r=0).
    pub fn with_range_offset(&self, dr: f64) -> RayPath {
        RayPath {
            theta0: self.theta0,
            z0: self.z0,
            states: self
                .states
                .iter()
                .map(|st| RayState { r: st.r + dr, ..*st })
                .collect(),
            events: self.events.iter().map(|e| e.shifted(dr, false)).collect(),
            termination: self.termination,
        }
    }

    /// The same path propagating in the opposite horizontal direction
    /// (range negated); compose with
    /// [`with_range_offset`](Self::with_range_offset) to emit backward from
    /// a source at positive range.
    pub fn mirrored(&self) -> RayPath {
        RayPath {
            theta0: self.theta0,
            z0: self.z0,
            states: self
                .states
                .iter()
                .map(|st| RayState { r: -st.r, ..*st })
                .collect(),
            events: self.events.iter().map(|e| e.shifted(0.0, true)).collect(),
            termination: self.termination,
        }
    }

    /// Depths of all refractive/total-internal turns, in path order.
    pub fn turning_depths(&self) -> Vec<f64> {
        self.events
            .iter()
            .filter_map(|e| match e {
                RayEvent::TurnUp { z, .. } | RayEvent::TurnDown { z, .. } => Some(*z),
                _ => None,
            })
            .collect()
    }

    /// Write the polyline as CSV: header `s_m,r_m,z_m,theta_rad`, one row
    /// per state, nine significant digits.
    pub fn to_csv<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "s_m,r_m,z_m,theta_rad")?;
        for st in &self.states {
            writeln!(
                w,
                "{:.8e},{:.8e},{:.8e},{:.8e}",
                st.s, st.r, st.z, st.theta
            )?;
        }
        Ok(())
    }
}

/// Trace a single ray from depth `z0` at grazing angle `theta0`.
///
/// A horizontal launch (`theta0 = 0`) bends toward lower sound speed; at a
/// point of zero gradient it runs straight to `max_range` (horizontal
/// equilibrium, e.g. exactly on the channel axis).
pub fn trace_ray(
    profile: &SoundSpeedProfile,
    z0: f64,
    theta0: f64,
    cfg: &TraceConfig,
) -> Result<RayPath> {
    if !(cfg.max_range > 0.0) || !(cfg.dz > 0.0) {
        return Err(Error::InvalidConfig(
            "max_range and dz must be positive".into(),
        ));
    }
    let z_max = profile.z_max();
    if !z0.is_finite() || z0 < 0.0 || z0 > z_max {
        return Err(Error::DepthOutOfRange {
            depth: z0,
            z_max,
        });
    }
    if !(theta0.abs() < FRAC_PI_2 - 1e-9) {
        return Err(Error::InvalidConfig(
            "grazing angle must lie strictly between -90 and 90 degrees".into(),
        ));
    }

    let interfaces = profile.interface_depths();
    let near = |a: f64, b: f64| (a - b).abs() < 1e-9;
    let at_interface = |zz: f64| interfaces.iter().any(|&b| near(b, zz));

    let straight_run = |z_run: f64| -> RayPath {
        RayPath {
            theta0,
            z0,
            states: vec![
                RayState {
                    s: 0.0,
                    r: 0.0,
                    z: z_run,
                    theta: 0.0,
                },
                RayState {
                    s: cfg.max_range,
                    r: cfg.max_range,
                    z: z_run,
                    theta: 0.0,
                },
            ],
            events: Vec::new(),
            termination: Termination::MaxRange,
        }
    };

    // Resolve the initial vertical direction, mirroring degenerate launches
    // that point straight out of the water column.
    let mut theta_launch = theta0;
    if near(z0, 0.0) && theta_launch < 0.0 {
        theta_launch = -theta_launch;
    }
    let mut down = theta_launch > 0.0;
    if theta_launch == 0.0 {
        let g = profile.gradient(z0)?;
        if g.abs() < 1e-12 {
            return Ok(straight_run(z0));
        }
        down = g < 0.0;
    }
    if near(z0, z_max) && down {
        if cfg.bottom_reflect {
            down = false;
            theta_launch = -theta_launch.abs();
        } else {
            return Ok(RayPath {
                theta0,
                z0,
                states: vec![RayState {
                    s: 0.0,
                    r: 0.0,
                    z: z0,
                    theta: theta_launch,
                }],
                events: Vec::new(),
                termination: Termination::BottomAbsorbed,
            });
        }
    }

    let xi = theta_launch.cos() / profile.sound_speed_dir(z0, down)?;
    let mut s = 0.0;
    let mut r = 0.0;
    let mut z = z0;
    let mut states = vec![RayState {
        s,
        r,
        z,
        theta: theta_launch,
    }];
    let mut events = Vec::new();
    let mut steps = 0usize;
    let mut stalled = 0u32;

    let termination = loop {
        steps += 1;
        if steps > cfg.max_steps {
            break Termination::StepLimit;
        }

        let c_here = profile.sound_speed_dir(z, down)?;
        let u = (xi * c_here).min(1.0);
        let dir = if down { 1.0 } else { -1.0 };

        // Next slab boundary strictly in the travel direction.
        let boundary = if down {
            interfaces
                .iter()
                .copied()
                .filter(|&b| b > z + 1e-9)
                .fold(z_max, f64::min)
        } else {
            interfaces
                .iter()
                .copied()
                .filter(|&b| b < z - 1e-9)
                .fold(0.0, f64::max)
        };
        let z_target = if down {
            (z + cfg.dz).min(boundary)
        } else {
            (z - cfg.dz).max(boundary)
        };
        let d = (z_target - z).abs();
        let c_arrive = profile.sound_speed_dir(z_target, !down)?;
        let gp = (c_arrive - c_here) / d;

        if u >= 1.0 - 1e-15 && gp.abs() < 1e-12 {
            // Horizontal inside a gradient-free slab: nothing bends the ray.
            let dr = cfg.max_range - r;
            s += dr;
            r = cfg.max_range;
            states.push(RayState { s, r, z, theta: 0.0 });
            break Termination::MaxRange;
        }

        let u_arrive = xi * c_arrive;
        if u_arrive >= 1.0 - 1e-15 {
            // The ray turns inside this slab (or exactly on its boundary).
            let slab_speed = |zz: f64| {
                if near(zz, z_target) {
                    c_arrive
                } else if near(zz, z) {
                    c_here
                } else {
                    profile.sound_speed(zz).expect("slab stays in domain")
                }
            };
            let (lo, hi) = if down { (z, z_target) } else { (z_target, z) };
            let z_t = quad::bisect_root(|zz| xi * slab_speed(zz) - 1.0, lo, hi, 1e-6);
            let d_t = (z_t - z).abs();
            let sin_i = (1.0 - u * u).max(0.0).sqrt();
            let (dr, ds) = if d_t < 1e-12 {
                (0.0, 0.0)
            } else {
                let gpt = (1.0 / xi - c_here) / d_t;
                (
                    sin_i / (xi * gpt),
                    (FRAC_PI_2 - u.asin()) / (xi * gpt),
                )
            };
            if r + dr >= cfg.max_range {
                let dr_c = cfg.max_range - r;
                let gpt = (1.0 / xi - c_here) / d_t.max(1e-12);
                let (z_c, ds_c, theta_c) = clip_arc(u, sin_i, gpt, dr_c, z, dir, c_here, xi);
                s += ds_c;
                r = cfg.max_range;
                z = z_c;
                states.push(RayState { s, r, z, theta: theta_c });
                break Termination::MaxRange;
            }
            if dr < 1e-12 {
                stalled += 1;
                if stalled >= 2 {
                    // Pinned at a speed minimum with no horizontal progress:
                    // run straight, as at exact equilibrium.
                    let dr_eq = cfg.max_range - r;
                    s += dr_eq;
                    r = cfg.max_range;
                    states.push(RayState { s, r, z, theta: 0.0 });
                    break Termination::MaxRange;
                }
            } else {
                stalled = 0;
            }
            s += ds;
            r += dr;
            z = z_t;
            states.push(RayState { s, r, z, theta: 0.0 });
            events.push(if down {
                RayEvent::TurnUp { s, r, z }
            } else {
                RayEvent::TurnDown { s, r, z }
            });
            down = !down;
            continue;
        }
        stalled = 0;

        // Regular advance across the slab.
        let sin_i = (1.0 - u * u).max(0.0).sqrt();
        let sin_a = (1.0 - u_arrive * u_arrive).max(0.0).sqrt();
        let (dr, ds) = if gp.abs() < 1e-12 {
            (d * u / sin_i, d / sin_i)
        } else {
            (
                (sin_i - sin_a) / (xi * gp),
                (u_arrive.asin() - u.asin()) / (xi * gp),
            )
        };
        if r + dr >= cfg.max_range {
            let dr_c = cfg.max_range - r;
            let (z_c, ds_c, theta_c) = clip_arc(u, sin_i, gp, dr_c, z, dir, c_here, xi);
            s += ds_c;
            r = cfg.max_range;
            z = z_c;
            states.push(RayState { s, r, z, theta: theta_c });
            break Termination::MaxRange;
        }
        s += ds;
        r += dr;
        z = z_target;

        if down && near(z, z_max) {
            z = z_max;
            let th = u_arrive.min(1.0).acos();
            if cfg.bottom_reflect {
                states.push(RayState { s, r, z, theta: -th });
                events.push(RayEvent::BottomReflect { s, r });
                down = false;
            } else {
                states.push(RayState { s, r, z, theta: th });
                break Termination::BottomAbsorbed;
            }
        } else if !down && near(z, 0.0) {
            z = 0.0;
            let th = u_arrive.min(1.0).acos();
            states.push(RayState { s, r, z, theta: th });
            events.push(RayEvent::SurfaceReflect { s, r });
            down = true;
        } else if at_interface(z) {
            let c_other = profile.sound_speed_dir(z, down)?;
            let u_other = xi * c_other;
            if u_other >= 1.0 - 1e-15 {
                // Total internal reflection: the far side is too fast.
                let th = u_arrive.min(1.0).acos();
                states.push(RayState {
                    s,
                    r,
                    z,
                    theta: if down { -th } else { th },
                });
                events.push(if down {
                    RayEvent::TurnUp { s, r, z }
                } else {
                    RayEvent::TurnDown { s, r, z }
                });
                down = !down;
            } else {
                // Refract through; store the transmitted angle.
                let th = u_other.acos();
                states.push(RayState {
                    s,
                    r,
                    z,
                    theta: if down { th } else { -th },
                });
            }
        } else {
            let th = u_arrive.min(1.0).acos();
            states.push(RayState {
                s,
                r,
                z,
                theta: if down { th } else { -th },
            });
        }
    };

    Ok(RayPath {
        theta0,
        z0,
        states,
        events,
        termination,
    })
}

/// State partway along an arc after advancing exactly `dr_c` in range.
fn clip_arc(
    u: f64,
    sin_i: f64,
    gp: f64,
    dr_c: f64,
    z: f64,
    dir: f64,
    c_here: f64,
    xi: f64,
) -> (f64, f64, f64) {
    if gp.abs() < 1e-12 {
        let z_c = z + dir * dr_c * sin_i / u;
        (z_c, dr_c / u, dir * u.acos())
    } else {
        let sin_c = (sin_i - xi * gp * dr_c).clamp(0.0, 1.0);
        let u_c = (1.0 - sin_c * sin_c).max(0.0).sqrt().min(1.0);
        let ds_c = (u_c.asin() - u.asin()) / (xi * gp);
        let z_c = z + dir * (u_c / xi - c_here) / gp;
        (z_c, ds_c, dir * u_c.acos())
    }
}

/// Trace a fan of rays in parallel; results keep the order of `thetas`.
pub fn trace_fan(
    profile: &SoundSpeedProfile,
    z0: f64,
    thetas: &[f64],
    cfg: &TraceConfig,
) -> Result<Vec<RayPath>> {
    thetas
        .par_iter()
        .map(|&t| trace_ray(profile, z0, t, cfg))
        .collect()
}

/// Horizontal distance covered between depths `z_lo` and `z_hi` by a ray
/// whose grazing angle at `z_ref` is `theta0`, by direct quadrature.
///
/// The leg must be monotone in depth: a turning depth strictly inside the
/// interval is an error, while turning exactly at an endpoint is handled as
/// an integrable singularity. Relative tolerance 1e-8; see
/// [`horizontal_span_with_tol`] for tighter control.
pub fn horizontal_span(
    profile: &SoundSpeedProfile,
    z_ref: f64,
    theta0: f64,
    z_lo: f64,
    z_hi: f64,
) -> Result<f64> {
    horizontal_span_with_tol(profile, z_ref, theta0, z_lo, z_hi, 1e-8)
}

/// [`horizontal_span`] with an explicit quadrature tolerance.
pub fn horizontal_span_with_tol(
    profile: &SoundSpeedProfile,
    z_ref: f64,
    theta0: f64,
    z_lo: f64,
    z_hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    if !(z_hi >= z_lo) {
        return Err(Error::InvalidConfig("depth interval is reversed".into()));
    }
    let c_ref = profile.sound_speed(z_ref)?;
    profile.sound_speed(z_lo)?;
    profile.sound_speed(z_hi)?;
    let k = theta0.cos().abs();
    if k < 1e-15 {
        // A vertical ray advances no range at all.
        return Ok(0.0);
    }
    if z_hi == z_lo {
        return Ok(0.0);
    }

    let q = |zz: f64| {
        let n = c_ref / profile.sound_speed(zz).expect("scan stays in domain");
        n * n - k * k
    };

    // A turning depth strictly inside the leg makes the span undefined.
    const SCAN: usize = 512;
    for i in 1..SCAN {
        let zz = z_lo + (z_hi - z_lo) * i as f64 / SCAN as f64;
        if q(zz) <= 1e-12 {
            return Err(Error::NoPath(format!(
                "ray at {:.4} rad turns near {zz:.1} m, inside the requested leg",
                theta0
            )));
        }
    }
    let q_lo = q(z_lo);
    let q_hi = q(z_hi);
    if q_lo < -1e-9 || q_hi < -1e-9 {
        return Err(Error::NoPath(
            "leg endpoint lies beyond the ray's turning depth".into(),
        ));
    }
    let sing_lo = q_lo < 1e-9;
    let sing_hi = q_hi < 1e-9;

    // A turning endpoint produced by bisection can overshoot the true turn
    // by a hair, leaving q microscopically negative there. Lifting q by that
    // amount puts the turn exactly on the endpoint — a sub-micrometre move
    // of the apex, far inside the bisection's own uncertainty — and keeps
    // the integrand a clean 1/sqrt shape instead of a clamped spike.
    let lift = (-q_lo.min(q_hi).min(0.0)).max(0.0);

    // Within ~1e-11 m of a turn, c(z) - c(turn) falls below f64 resolution
    // and the computed q flattens to zero; substitute the analytic
    // linearization |dq/dz| * distance there so deep quadrature refinement
    // sees the true 1/sqrt shape instead of a flat spike.
    let q_slope = |z_end: f64| -> f64 {
        let c_end = profile.sound_speed(z_end).expect("endpoint in domain");
        let g = profile.gradient(z_end).expect("endpoint in domain");
        (2.0 * c_ref * c_ref * g / (c_end * c_end * c_end)).abs()
    };
    let slope_lo = if sing_lo { q_slope(z_lo) } else { 0.0 };
    let slope_hi = if sing_hi { q_slope(z_hi) } else { 0.0 };
    let integrand = |zz: f64| {
        let mut ql = q(zz) + lift;
        if ql < 1e-13 {
            ql = ql.max(slope_lo * (zz - z_lo)).max(slope_hi * (z_hi - zz));
        }
        k / ql.max(1e-30).sqrt()
    };

    // Integrate per layer so gradient kinks and speed jumps at interfaces
    // never sit inside one quadrature panel.
    let mut cuts = vec![z_lo];
    for b in profile.interface_depths() {
        if b > z_lo + 1e-9 && b < z_hi - 1e-9 {
            cuts.push(b);
        }
    }
    cuts.push(z_hi);

    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        total += quad::integrate_sqrt_endpoints(
            integrand,
            a,
            b,
            sing_lo && a == z_lo,
            sing_hi && b == z_hi,
            rel_tol,
        );
    }
    Ok(total)
}

/// First depth at which a ray whose grazing angle at `z_start` is `theta`
/// turns, searching downward or upward from `z_start`.
pub fn turning_depth(
    profile: &SoundSpeedProfile,
    z_start: f64,
    theta: f64,
    downward: bool,
) -> Result<f64> {
    if !(theta.abs() < FRAC_PI_2) {
        return Err(Error::InvalidConfig(
            "grazing angle must lie strictly between -90 and 90 degrees".into(),
        ));
    }
    let c_turn = profile.sound_speed_dir(z_start, downward)? / theta.cos();
    let to = if downward { profile.z_max() } else { 0.0 };
    const N: usize = 4096;
    let mut prev = z_start;
    for i in 1..=N {
        let zz = z_start + (to - z_start) * i as f64 / N as f64;
        if profile.sound_speed(zz)? >= c_turn {
            let (lo, hi) = (prev.min(zz), prev.max(zz));
            return Ok(quad::bisect_root(
                |z2| profile.sound_speed(z2).expect("bracket in domain") - c_turn,
                lo,
                hi,
                1e-9,
            ));
        }
        prev = zz;
    }
    Err(Error::NoPath(format!(
        "no turning depth {} of {z_start} m before the boundary",
        if downward { "below" } else { "above" }
    )))
}
