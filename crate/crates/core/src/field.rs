//! Transmission-loss fields on range-depth grids.
//!
//! Loss along a ray is spherical spreading plus seawater absorption,
//! evaluated at samples taken every few meters of arc length. A grid cell
//! keeps the minimum loss over all samples that land in it (incoherent
//! best-ray combining); cells no ray visits stay at [`TLGrid::NO_RAY`].
//! Cell-wise minimum is associative and commutative, so fans are traced
//! and binned in parallel worker grids that merge deterministically.

use std::io::{self, BufRead};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ray::{self, TraceConfig};
use crate::ssp::SoundSpeedProfile;

/// Seawater absorption in dB/km for a frequency in Hz (Thorp's fit,
/// valid from a few hundred Hz up to ~50 kHz).
pub fn thorp_absorption(frequency_hz: f64) -> f64 {
    let f2 = (frequency_hz / 1000.0).powi(2); // kHz squared
    0.1 * f2 / (1.0 + f2) + 40.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003
}

/// One-way loss after `s` meters of travel: spherical spreading
/// (referenced to 1 m) plus absorption.
pub fn transmission_loss(s_m: f64, frequency_hz: f64) -> f64 {
    20.0 * s_m.max(1.0).log10() + thorp_absorption(frequency_hz) * s_m / 1000.0
}

/// Loss along the straight line between two range-depth points.
pub fn straight_line_loss(a: (f64, f64), b: (f64, f64), frequency_hz: f64) -> f64 {
    let d = (a.0 - b.0).hypot(a.1 - b.1);
    transmission_loss(d, frequency_hz)
}

/// Loss expressed as a linear power ratio.
pub fn loss_to_power_ratio(tl_db: f64) -> f64 {
    10f64.powf(-tl_db / 10.0)
}

/// Linear power ratio expressed as a loss in dB.
pub fn power_ratio_to_loss(ratio: f64) -> f64 {
    -10.0 * ratio.log10()
}

/// Rectangular range-depth window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub r_min: f64,
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl Region {
    pub fn contains(&self, r: f64, z: f64) -> bool {
        r >= self.r_min && r <= self.r_max && z >= self.z_min && z <= self.z_max
    }

    pub fn area(&self) -> f64 {
        (self.r_max - self.r_min).max(0.0) * (self.z_max - self.z_min).max(0.0)
    }
}

/// Uniform grid layout over a range-depth window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    /// Number of range cells.
    pub nr: usize,
    /// Number of depth cells.
    pub nz: usize,
}

impl GridSpec {
    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / self.nr as f64
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.nz as f64
    }

    /// Center coordinates of cell `(i, j)`.
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.r_min + (i as f64 + 0.5) * self.dr(),
            self.z_min + (j as f64 + 0.5) * self.dz(),
        )
    }

    fn cell_of(&self, r: f64, z: f64) -> Option<(usize, usize)> {
        if r < self.r_min || z < self.z_min {
            return None;
        }
        let i = ((r - self.r_min) / self.dr()) as usize;
        let j = ((z - self.z_min) / self.dz()) as usize;
        if i >= self.nr || j >= self.nz {
            return None;
        }
        Some((i, j))
    }

    fn validate(&self) -> Result<()> {
        if !(self.r_max > self.r_min) || !(self.z_max > self.z_min) || self.nr == 0 || self.nz == 0
        {
            return Err(Error::InvalidConfig(
                "grid must have positive extent and at least one cell per axis".into(),
            ));
        }
        Ok(())
    }
}

/// Transmission-loss values on a [`GridSpec`], one per cell, row-major in
/// depth then range.
#[derive(Debug, Clone, PartialEq)]
pub struct TLGrid {
    pub spec: GridSpec,
    values: Vec<f64>,
}

impl TLGrid {
    /// Marker for cells no ray sample has reached.
    pub const NO_RAY: f64 = f64::INFINITY;

    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            values: vec![Self::NO_RAY; spec.nr * spec.nz],
            spec,
        })
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nr + i]
    }

    /// Loss at the cell containing `(r, z)`, or `None` outside the grid.
    pub fn value_at(&self, r: f64, z: f64) -> Option<f64> {
        self.spec.cell_of(r, z).map(|(i, j)| self.value(i, j))
    }

    /// Lower `(r, z)`'s cell to `tl` if that improves it; out-of-grid
    /// samples are ignored.
    pub fn deposit(&mut self, r: f64, z: f64, tl: f64) {
        if let Some((i, j)) = self.spec.cell_of(r, z) {
            let v = &mut self.values[j * self.spec.nr + i];
            if tl < *v {
                *v = tl;
            }
        }
    }

    /// Add a constant loss offset to every reached cell, clamping at zero;
    /// unreached cells stay unreached.
    pub fn add_offset(&mut self, db: f64) {
        for v in &mut self.values {
            if v.is_finite() {
                *v = (*v + db).max(0.0);
            }
        }
    }

    /// Cell-wise minimum with another grid of identical layout.
    pub fn min_merge(&mut self, other: &TLGrid) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::InvalidConfig(
                "cannot merge grids with different layouts".into(),
            ));
        }
        for (v, o) in self.values.iter_mut().zip(other.values.iter()) {
            if o < v {
                *v = *o;
            }
        }
        Ok(())
    }

    /// Fraction of cells whose centers lie in `region` with loss at or
    /// below `threshold_db`. Zero when the region contains no cell center.
    pub fn coverage_proportion(&self, region: &Region, threshold_db: f64) -> f64 {
        let mut total = 0usize;
        let mut covered = 0usize;
        for j in 0..self.spec.nz {
            for i in 0..self.spec.nr {
                let (r, z) = self.spec.center(i, j);
                if region.contains(r, z) {
                    total += 1;
                    if self.value(i, j) <= threshold_db {
                        covered += 1;
                    }
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            covered as f64 / total as f64
        }
    }

    /// Write `r_m,z_m,tl_db` rows (cell centers, six significant digits,
    /// `inf` for unreached cells).
    pub fn to_csv<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "r_m,z_m,tl_db")?;
        for j in 0..self.spec.nz {
            for i in 0..self.spec.nr {
                let (r, z) = self.spec.center(i, j);
                writeln!(w, "{:.5e},{:.5e},{:.5e}", r, z, self.value(i, j))?;
            }
        }
        Ok(())
    }

    /// Rebuild a grid from its own CSV output, inferring the layout from
    /// the cell centers.
    pub fn from_csv<R: io::Read>(r: R) -> Result<TLGrid> {
        let reader = io::BufReader::new(r);
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (k, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::InvalidConfig(format!("read error: {e}")))?;
            if k == 0 {
                if line.trim() != "r_m,z_m,tl_db" {
                    return Err(Error::InvalidConfig("unexpected CSV header".into()));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = || -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| Error::InvalidConfig(format!("short row {k}")))?
                    .trim()
                    .parse()
                    .map_err(|e| Error::InvalidConfig(format!("row {k}: {e}")))
            };
            rows.push((next()?, next()?, next()?));
        }
        if rows.is_empty() {
            return Err(Error::InvalidConfig("CSV holds no cells".into()));
        }
        let mut rs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut zs: Vec<f64> = rows.iter().map(|r| r.1).collect();
        rs.sort_by(|a, b| a.partial_cmp(b).expect("finite centers"));
        rs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        zs.sort_by(|a, b| a.partial_cmp(b).expect("finite centers"));
        zs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let (nr, nz) = (rs.len(), zs.len());
        if nr * nz != rows.len() {
            return Err(Error::InvalidConfig(
                "CSV cells do not form a full rectangular grid".into(),
            ));
        }
        let dr = if nr > 1 {
            (rs[nr - 1] - rs[0]) / (nr - 1) as f64
        } else {
            1.0
        };
        let dz = if nz > 1 {
            (zs[nz - 1] - zs[0]) / (nz - 1) as f64
        } else {
            1.0
        };
        let spec = GridSpec {
            r_min: rs[0] - 0.5 * dr,
            r_max: rs[nr - 1] + 0.5 * dr,
            z_min: zs[0] - 0.5 * dz,
            z_max: zs[nz - 1] + 0.5 * dz,
            nr,
            nz,
        };
        let mut grid = TLGrid::new(spec)?;
        for (r, z, tl) in rows {
            grid.deposit(r, z, tl);
        }
        Ok(grid)
    }
}

/// Where a fan is emitted from, in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceGeometry {
    /// Source depth, m.
    pub depth: f64,
    /// World range of the source, m.
    pub range_offset: f64,
    /// Emit toward decreasing range instead of increasing.
    pub mirror: bool,
}

impl SourceGeometry {
    pub fn at_origin(depth: f64) -> Self {
        Self {
            depth,
            range_offset: 0.0,
            mirror: false,
        }
    }

    fn world_range(&self, r_along_path: f64) -> f64 {
        if self.mirror {
            self.range_offset - r_along_path
        } else {
            self.range_offset + r_along_path
        }
    }
}

/// Trace a fan from `geom` and fold its loss samples into `grid`.
///
/// Rays are traced in parallel into per-worker grids that are min-merged,
/// then merged into `grid`; each path is dropped as soon as it is binned,
/// so memory stays bounded by one path per worker. The result is
/// bit-identical across runs and thread counts.
pub fn accumulate_fan(
    grid: &mut TLGrid,
    profile: &SoundSpeedProfile,
    geom: SourceGeometry,
    thetas: &[f64],
    trace: &TraceConfig,
    frequency_hz: f64,
    sample_ds: f64,
) -> Result<()> {
    if !(sample_ds > 0.0) {
        return Err(Error::InvalidConfig("sample spacing must be positive".into()));
    }
    let spec = grid.spec;
    let partial = thetas
        .par_iter()
        .try_fold(
            || TLGrid::new(spec).expect("spec validated by the target grid"),
            |mut acc, &theta| -> Result<TLGrid> {
                let path = ray::trace_ray(profile, geom.depth, theta, trace)?;
                for st in path.sample_every(sample_ds) {
                    acc.deposit(
                        geom.world_range(st.r),
                        st.z,
                        transmission_loss(st.s, frequency_hz),
                    );
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || TLGrid::new(spec).expect("spec validated by the target grid"),
            |mut a, b| {
                a.min_merge(&b)?;
                Ok(a)
            },
        )?;
    grid.min_merge(&partial)
}

/// Convenience: the loss field of a single fan from a source at range 0.
pub fn direct_field(
    profile: &SoundSpeedProfile,
    source_depth: f64,
    thetas: &[f64],
    trace: &TraceConfig,
    spec: GridSpec,
    frequency_hz: f64,
    sample_ds: f64,
) -> Result<TLGrid> {
    let mut grid = TLGrid::new(spec)?;
    accumulate_fan(
        &mut grid,
        profile,
        SourceGeometry::at_origin(source_depth),
        thetas,
        trace,
        frequency_hz,
        sample_ds,
    )?;
    Ok(grid)
}

/// Acoustic link budget: a source level and the largest loss at which the
/// link still closes with a unit-gain reflector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Source level relative to the detection floor, dB.
    pub source_level_db: f64,
    /// Loss tolerable at zero array gain, dB.
    pub threshold_db: f64,
}

impl LinkBudget {
    /// Total path loss the budget can absorb before any array gain.
    pub fn allowed_loss_db(&self) -> f64 {
        self.source_level_db + self.threshold_db
    }
}
