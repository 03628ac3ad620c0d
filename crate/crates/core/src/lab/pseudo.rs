use std::fmt::Write as _;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ScaledOperator;
use crate::linalg::smallest_singular_value;
use crate::parallel::with_workers;
use crate::quadratic::QuadraticReport;
use crate::{c64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn centered(radius: f64) -> Self {
        Rect {
            re_min: -radius,
            re_max: radius,
            im_min: -radius,
            im_max: radius,
        }
    }
}

/// `sigma_min(op - z)` on a uniform grid; values are row-major with the
/// imaginary part as the outer index.
#[derive(Debug, Clone, Serialize)]
pub struct PseudospectrumGrid {
    pub h: f64,
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

impl PseudospectrumGrid {
    pub fn point(&self, ix: usize, iy: usize) -> c64 {
        c64::new(
            axis(self.rect.re_min, self.rect.re_max, self.nx, ix),
            axis(self.rect.im_min, self.rect.im_max, self.ny, iy),
        )
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    /// All `(z, sigma_min)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (c64, f64)> + '_ {
        (0..self.ny).flat_map(move |iy| (0..self.nx).map(move |ix| (self.point(ix, iy), self.value(ix, iy))))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("re_z,im_z,sigma_min\n");
        for (z, v) in self.iter() {
            let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", z.re, z.im, v);
        }
        s
    }
}

pub fn pseudospectrum_scan(
    op: &ScaledOperator,
    rect: Rect,
    nx: usize,
    ny: usize,
    workers: Option<usize>,
) -> Result<PseudospectrumGrid> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidInput("grid resolution must be positive".into()));
    }
    if !(rect.re_min <= rect.re_max && rect.im_min <= rect.im_max) {
        return Err(Error::InvalidInput("empty scan rectangle".into()));
    }
    let m = op.op.matrix();
    let mut grid = PseudospectrumGrid {
        h: op.h,
        rect,
        nx,
        ny,
        values: Vec::new(),
    };
    let points: Vec<c64> = (0..ny).flat_map(|iy| (0..nx).map(move |ix| (ix, iy))).map(|(ix, iy)| grid.point(ix, iy)).collect();
    grid.values = with_workers(workers, || {
        points
            .par_iter()
            .map(|&z| {
                let mut shifted: Mat<c64> = m.clone();
                for i in 0..shifted.nrows() {
                    shifted[(i, i)] -= z;
                }
                smallest_singular_value(shifted.as_ref())
            })
            .collect::<Result<Vec<f64>>>()
    })??;
    Ok(grid)
}

/// Constants of the two resolvent regions, all in the scan's `z` units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionConstants {
    /// `C` of the parabolic region: `Re z <= h^{2k0/(2k0+1)} |z|^{1/(2k0+1)} / C`
    /// and `C h <= |z|`.
    pub c: f64,
    /// Outer radius `c0` of the parabolic region.
    pub c0: f64,
    /// Disk `|z| <= disk_radius * h`.
    pub disk_radius: f64,
    /// Points within `lattice_radius * h` of `h (lattice + p_1(0))` are excluded.
    pub lattice_radius: f64,
}

impl Default for RegionConstants {
    fn default() -> Self {
        RegionConstants {
            c: 2.0,
            c0: 0.2,
            disk_radius: 5.0,
            lattice_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionStat {
    pub points: usize,
    pub inf: Option<f64>,
    pub argmin: Option<(f64, f64)>,
}

impl RegionStat {
    fn collect(it: impl Iterator<Item = (c64, f64)>) -> Self {
        let mut points = 0;
        let mut best: Option<(f64, c64)> = None;
        for (z, r) in it {
            points += 1;
            if best.is_none_or(|(b, _)| r < b) {
                best = Some((r, z));
            }
        }
        RegionStat {
            points,
            inf: best.map(|b| b.0),
            argmin: best.map(|b| (b.1.re, b.1.im)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub h: f64,
    pub k0: Option<usize>,
    /// `inf sigma_min / (h^{2k0/(2k0+1)} |z|^{1/(2k0+1)})` over the parabolic region.
    pub parabolic: Option<RegionStat>,
    /// `inf sigma_min / h` over the disk minus lattice neighborhoods.
    pub disk: RegionStat,
    pub notes: Vec<String>,
}

pub fn check_estimate_regions(
    grid: &PseudospectrumGrid,
    report: &QuadraticReport,
    shift: c64,
    consts: &RegionConstants,
) -> RegionReport {
    let h = grid.h;
    let mut notes = Vec::new();
    let parabolic = match report.k0 {
        Some(k0) => {
            let e = 1.0 / (2 * k0 + 1) as f64;
            let hw = h.powf(2.0 * k0 as f64 * e);
            let stat = RegionStat::collect(grid.iter().filter_map(|(z, s)| {
                let r = z.norm();
                let w = hw * r.powf(e);
                (z.re <= w / consts.c && r >= consts.c * h && r <= consts.c0).then(|| (z, s / w))
            }));
            if stat.points == 0 {
                notes.push("parabolic region holds no grid points".into());
            }
            Some(stat)
        }
        None => {
            notes.push("singular space is not trivial; parabolic region skipped".into());
            None
        }
    };
    let rmax = consts.disk_radius * h;
    let count = (consts.disk_radius + consts.lattice_radius).ceil() as usize + 1;
    let centers: Vec<c64> = report
        .lattice(count.max(1) * report.dim.max(1))
        .iter()
        .map(|p| (p.value + shift) * h)
        .collect();
    if report.spectrum_modes.is_empty() {
        notes.push("no spectrum lattice available; disk check excludes nothing".into());
    }
    let disk = RegionStat::collect(grid.iter().filter_map(|(z, s)| {
        let near = centers.iter().any(|c| (z - c).norm() < consts.lattice_radius * h);
        (z.norm() <= rmax && !near).then(|| (z, s / h))
    }));
    if disk.points == 0 {
        notes.push("disk region holds no grid points".into());
    }
    RegionReport {
        h,
        k0: report.k0,
        parabolic,
        disk,
        notes,
    }
}
