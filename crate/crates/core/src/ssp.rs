//! Sound-speed profiles of the water column.
//!
//! Two families are supported: the canonical smooth deep-water channel
//! profile (exponential-plus-linear around a minimum) and piecewise-linear
//! layered profiles, including the two-segment surface-duct shape used for
//! shallow scenarios. Depth `z` is positive downward in meters; speeds are
//! m/s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim;

/// Smooth deep-water channel profile
/// `c(z) = c0 * [1 + eps * (eta + exp(-eta) - 1)]` with
/// `eta = (z - z_axis) / z_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MunkProfile {
    /// Speed at the channel axis, m/s.
    pub c0: f64,
    /// Axis depth, m.
    pub z_axis: f64,
    /// Stratification length scale, m.
    pub z_scale: f64,
    /// Perturbation amplitude, dimensionless.
    pub epsilon: f64,
    /// Seabed depth, m.
    pub z_max: f64,
}

impl MunkProfile {
    fn speed(&self, z: f64) -> f64 {
        let eta = (z - self.z_axis) / self.z_scale;
        self.c0 * (1.0 + self.epsilon * (eta + (-eta).exp() - 1.0))
    }

    fn gradient(&self, z: f64) -> f64 {
        let eta = (z - self.z_axis) / self.z_scale;
        self.c0 * self.epsilon / self.z_scale * (1.0 - (-eta).exp())
    }
}

/// One linear-gradient slab of a layered profile. Speed inside is
/// `c_top + gradient * (z - z_top)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Upper boundary depth, m.
    pub z_top: f64,
    /// Lower boundary depth, m.
    pub z_bottom: f64,
    /// Speed at the upper boundary, m/s.
    pub c_top: f64,
    /// Speed gradient, 1/s.
    pub gradient: f64,
}

impl Layer {
    fn speed(&self, z: f64) -> f64 {
        self.c_top + self.gradient * (z - self.z_top)
    }

    fn c_bottom(&self) -> f64 {
        self.speed(self.z_bottom)
    }
}

/// Stack of contiguous linear-gradient layers starting at the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredProfile {
    pub layers: Vec<Layer>,
}

/// Location of the sound-speed minimum, if the profile has one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelAxis {
    /// Depth of the speed minimum, m.
    pub depth: f64,
    /// True when the minimum sits strictly inside the water column rather
    /// than on the surface or seabed.
    pub interior: bool,
}

/// A sound-speed profile c(z) on the water column `[0, z_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SoundSpeedProfile {
    Munk(MunkProfile),
    Layered(LayeredProfile),
}

impl SoundSpeedProfile {
    /// Smooth deep-channel profile with explicit parameters.
    pub fn munk(c0: f64, z_axis: f64, z_scale: f64, epsilon: f64, z_max: f64) -> Result<Self> {
        if !(c0 > 0.0) || !(z_scale > 0.0) || !(epsilon > 0.0) || !(z_max > 0.0) {
            return Err(Error::InvalidProfile(
                "munk parameters must be positive".into(),
            ));
        }
        if !z_axis.is_finite() || z_axis < 0.0 {
            return Err(Error::InvalidProfile(
                "munk axis depth must be finite and non-negative".into(),
            ));
        }
        Ok(Self::Munk(MunkProfile {
            c0,
            z_axis,
            z_scale,
            epsilon,
            z_max,
        }))
    }

    /// Deep-water default: axis at 2100 m, scale 1300 m, amplitude 0.00737,
    /// axis speed 1500 m/s, seabed at 4000 m.
    pub fn munk_standard() -> Self {
        Self::munk(1500.0, 2100.0, 1300.0, 0.00737, 4000.0).expect("standard parameters are valid")
    }

    /// Two-segment surface-duct profile for shallow water: speed rises from
    /// 1500 m/s at the surface at +0.1883 /s down to 60 m, then falls at
    /// -0.6817 /s to the 120 m seabed.
    pub fn bilinear() -> Self {
        Self::layered(vec![
            Layer {
                z_top: 0.0,
                z_bottom: 60.0,
                c_top: 1500.0,
                gradient: 0.1883,
            },
            Layer {
                z_top: 60.0,
                z_bottom: 120.0,
                c_top: 1511.0,
                gradient: -0.6817,
            },
        ])
        .expect("built-in layering is valid")
    }

    /// General layered profile. Layers must start at the surface, be
    /// contiguous, and have positive thickness and positive speeds.
    pub fn layered(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidProfile("no layers".into()));
        }
        if layers[0].z_top.abs() > 1e-9 {
            return Err(Error::InvalidProfile(format!(
                "first layer starts at {} m, expected the surface",
                layers[0].z_top
            )));
        }
        for (i, layer) in layers.iter().enumerate() {
            if !(layer.z_bottom > layer.z_top) {
                return Err(Error::InvalidProfile(format!(
                    "layer {i} has non-positive thickness"
                )));
            }
            if !(layer.c_top > 0.0) || !(layer.c_bottom() > 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "layer {i} has non-positive sound speed"
                )));
            }
            if i > 0 && (layer.z_top - layers[i - 1].z_bottom).abs() > 1e-9 {
                return Err(Error::InvalidProfile(format!(
                    "gap or overlap between layers {} and {i}",
                    i - 1
                )));
            }
        }
        Ok(Self::Layered(LayeredProfile { layers }))
    }

    /// Seabed depth, m.
    pub fn z_max(&self) -> f64 {
        match self {
            Self::Munk(m) => m.z_max,
            Self::Layered(l) => l.layers.last().expect("validated non-empty").z_bottom,
        }
    }

    fn check_depth(&self, z: f64) -> Result<()> {
        if !z.is_finite() || z < 0.0 || z > self.z_max() {
            return Err(Error::DepthOutOfRange {
                depth: z,
                z_max: self.z_max(),
            });
        }
        Ok(())
    }

    /// Sound speed at depth `z`. Exactly on a layer interface the upper
    /// layer's value is returned; use [`sound_speed_dir`](Self::sound_speed_dir)
    /// when the direction of travel matters.
    pub fn sound_speed(&self, z: f64) -> Result<f64> {
        self.check_depth(z)?;
        Ok(match self {
            Self::Munk(m) => m.speed(z),
            Self::Layered(l) => {
                let layer = l
                    .layers
                    .iter()
                    .find(|ly| z <= ly.z_bottom)
                    .unwrap_or(l.layers.last().expect("non-empty"));
                layer.speed(z)
            }
        })
    }

    /// Sound speed at `z` as seen by a ray traveling downward (`downward`)
    /// or upward. Differs from [`sound_speed`](Self::sound_speed) only
    /// exactly on an interior interface of a layered profile, where each
    /// side of a speed discontinuity has its own value.
    pub fn sound_speed_dir(&self, z: f64, downward: bool) -> Result<f64> {
        self.check_depth(z)?;
        match self {
            Self::Munk(m) => Ok(m.speed(z)),
            Self::Layered(l) => {
                let layer = if downward {
                    l.layers
                        .iter()
                        .find(|ly| z < ly.z_bottom)
                        .unwrap_or(l.layers.last().expect("non-empty"))
                } else {
                    l.layers
                        .iter()
                        .rev()
                        .find(|ly| z > ly.z_top)
                        .unwrap_or(l.layers.first().expect("non-empty"))
                };
                Ok(layer.speed(z))
            }
        }
    }

    /// Sound-speed gradient dc/dz at `z`, 1/s. Exactly on a layer interface
    /// the lower layer's gradient is returned, so stepping downward from an
    /// interface sees the slab being entered.
    pub fn gradient(&self, z: f64) -> Result<f64> {
        self.check_depth(z)?;
        Ok(match self {
            Self::Munk(m) => m.gradient(z),
            Self::Layered(l) => {
                let layer = l
                    .layers
                    .iter()
                    .find(|ly| z < ly.z_bottom)
                    .unwrap_or(l.layers.last().expect("non-empty"));
                layer.gradient
            }
        })
    }

    /// Refraction index `c(z_ref) / c(z)` relative to a reference depth.
    pub fn refraction_index(&self, z_ref: f64, z: f64) -> Result<f64> {
        Ok(self.sound_speed(z_ref)? / self.sound_speed(z)?)
    }

    /// Sound speed at the surface, m/s.
    pub fn surface_speed(&self) -> f64 {
        self.sound_speed(0.0).expect("surface is always in domain")
    }

    /// Depths of the interior layer interfaces (layered profiles only),
    /// strictly between surface and seabed.
    pub fn interface_depths(&self) -> Vec<f64> {
        match self {
            Self::Munk(_) => Vec::new(),
            Self::Layered(l) => l
                .layers
                .iter()
                .map(|ly| ly.z_bottom)
                .filter(|&z| z < self.z_max())
                .collect(),
        }
    }

    /// Locate the sound-speed minimum.
    ///
    /// Fails with [`Error::NoAxis`] when the profile is constant or
    /// monotone, i.e. has no channel structure at all. A minimum on the
    /// surface or seabed of a non-monotone profile is reported with
    /// `interior = false` (the duct axis is cut off by a boundary).
    pub fn channel_axis(&self) -> Result<ChannelAxis> {
        const N: usize = 2048;
        let z_max = self.z_max();
        let speeds: Vec<f64> = (0..=N)
            .map(|i| {
                let z = z_max * i as f64 / N as f64;
                self.sound_speed(z).expect("grid stays in domain")
            })
            .collect();

        let c_lo = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
        let c_hi = speeds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if c_hi - c_lo < 1e-9 * c_hi {
            return Err(Error::NoAxis("profile is constant".into()));
        }
        let non_decreasing = speeds.windows(2).all(|w| w[1] >= w[0] - 1e-12);
        let non_increasing = speeds.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        if non_decreasing || non_increasing {
            return Err(Error::NoAxis("profile is monotone".into()));
        }

        let (i_min, _) = speeds
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("speeds are finite"))
            .expect("non-empty grid");
        if i_min == 0 {
            return Ok(ChannelAxis {
                depth: 0.0,
                interior: false,
            });
        }
        if i_min == N {
            return Ok(ChannelAxis {
                depth: z_max,
                interior: false,
            });
        }

        let step = z_max / N as f64;
        let lo = (i_min as f64 - 1.0) * step;
        let hi = (i_min as f64 + 1.0) * step;
        let (depth, _) = optim::golden_section_min(
            |z| self.sound_speed(z).expect("bracket stays in domain"),
            lo,
            hi,
            0.01,
        );
        Ok(ChannelAxis {
            depth,
            interior: true,
        })
    }
}
