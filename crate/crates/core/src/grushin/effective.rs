use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

use super::GrushinSystem;
use crate::linalg::{self, kronecker_sequence, mat_to_rows};
use crate::parallel::with_workers;
use crate::{c64, Error, Result};

/// Margins below this count as zero.
pub const MARGIN_FLOOR: f64 = 1e-8;
/// Largest log-log slope of the per-`h` infimum still read as bounded below.
pub const MARGIN_SLOPE_MAX: f64 = 0.25;
/// Quasi-random interior samples added to the corner/center grid.
pub const OMEGA_INTERIOR_SAMPLES: usize = 100;

/// `E(h) = sum_{j=1}^{2N0+2} A_j h^{1+j/2}`.
#[derive(Debug, Clone)]
pub struct EffectiveFamily {
    n0: usize,
    a: Vec<Mat<c64>>,
}

impl EffectiveFamily {
    pub fn new(n0: usize, a: Vec<Mat<c64>>) -> Self {
        EffectiveFamily { n0, a }
    }

    pub fn matrices(&self) -> &[Mat<c64>] {
        &self.a
    }

    pub fn eval(&self, h: f64) -> Mat<c64> {
        let d = self.a.first().map(|m| m.nrows()).unwrap_or(0);
        let mut out = Mat::<c64>::zeros(d, d);
        for (idx, a) in self.a.iter().enumerate() {
            let w = h.powf(1.0 + (idx + 1) as f64 / 2.0);
            out += faer::Scale(c64::new(w, 0.0)) * a;
        }
        out
    }

    /// `sigma_min(E(h)) / h^{N0/2 + 1}`.
    pub fn margin(&self, h: f64) -> Result<f64> {
        let e = self.eval(h);
        Ok(linalg::smallest_singular_value(e.as_ref())? / h.powf(self.n0 as f64 / 2.0 + 1.0))
    }
}

/// Product of closed boxes in `C`, one per `z_1 … z_{2N0+2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaBox {
    pub lo: Vec<c64>,
    pub hi: Vec<c64>,
}

impl OmegaBox {
    pub fn new(lo: Vec<c64>, hi: Vec<c64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.re <= b.re && a.im <= b.im) {
                return Err(Error::InvalidInput(format!("empty box [{a}, {b}]")));
            }
        }
        Ok(OmegaBox { lo, hi })
    }

    /// A single point.
    pub fn point(z: Vec<c64>) -> Self {
        OmegaBox { lo: z.clone(), hi: z }
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    fn coordinate_points(&self, k: usize) -> Vec<c64> {
        let (a, b) = (self.lo[k], self.hi[k]);
        let mut pts = vec![
            a,
            c64::new(b.re, a.im),
            c64::new(a.re, b.im),
            b,
            (a + b) * 0.5,
        ];
        pts.dedup_by(|x, y| x == y);
        let mut out: Vec<c64> = Vec::new();
        for p in pts {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Corners and center of every coordinate box (tensor product) plus
    /// quasi-random interior points.
    pub fn samples(&self) -> Vec<Vec<c64>> {
        let mut out: Vec<Vec<c64>> = vec![Vec::new()];
        for k in 0..self.len() {
            let pts = self.coordinate_points(k);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    pts.iter().map(move |&p| {
                        let mut v = prefix.clone();
                        v.push(p);
                        v
                    })
                })
                .collect();
        }
        let free: Vec<(usize, bool)> = (0..self.len())
            .flat_map(|k| [(k, false), (k, true)])
            .filter(|&(k, im)| if im { self.hi[k].im > self.lo[k].im } else { self.hi[k].re > self.lo[k].re })
            .collect();
        if !free.is_empty() {
            for u in kronecker_sequence(free.len(), OMEGA_INTERIOR_SAMPLES) {
                let mut z = self.lo.iter().zip(&self.hi).map(|(a, b)| (a + b) * 0.5).collect::<Vec<_>>();
                for (&(k, im), t) in free.iter().zip(&u) {
                    if im {
                        z[k].im = self.lo[k].im + t * (self.hi[k].im - self.lo[k].im);
                    } else {
                        z[k].re = self.lo[k].re + t * (self.hi[k].re - self.lo[k].re);
                    }
                }
                out.push(z);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginReport {
    pub h: Vec<f64>,
    /// Infimum over the `Omega` samples at each `h`.
    pub inf_per_h: Vec<f64>,
    pub min_margin: f64,
    /// Least-squares slope of `ln inf_per_h` against `ln h`.
    pub slope: f64,
    pub samples: usize,
    pub worst_tail: Vec<c64>,
    pub satisfied: bool,
}

fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Margin of the effective family over an `h` grid and the samples of
/// `omega`. The bound counts as satisfied when the smallest margin exceeds
/// `MARGIN_FLOOR` and the per-`h` infimum does not decay faster than
/// `h^MARGIN_SLOPE_MAX`.
pub fn margin_scan(
    sys: &GrushinSystem,
    hs: &[f64],
    omega: &OmegaBox,
    workers: Option<usize>,
) -> Result<MarginReport> {
    if hs.is_empty() || hs.iter().any(|&h| !(h > 0.0 && h < 1.0)) {
        return Err(Error::InvalidInput("h values must lie in (0, 1)".into()));
    }
    if omega.len() != sys.orders() {
        return Err(Error::DimensionMismatch {
            expected: sys.orders(),
            found: omega.len(),
        });
    }
    let samples = omega.samples();
    let rows: Vec<Vec<f64>> = with_workers(workers, || {
        samples
            .par_iter()
            .map(|tail| {
                let fam = sys.with_tail(tail)?.effective_family();
                hs.iter().map(|&h| fam.margin(h)).collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut inf_per_h = vec![f64::INFINITY; hs.len()];
    let mut worst = (f64::INFINITY, 0usize);
    for (s, row) in rows.iter().enumerate() {
        for (i, &m) in row.iter().enumerate() {
            inf_per_h[i] = inf_per_h[i].min(m);
            if m < worst.0 {
                worst = (m, s);
            }
        }
    }
    let slope = loglog_slope(hs, &inf_per_h);
    let min_margin = worst.0;
    Ok(MarginReport {
        h: hs.to_vec(),
        inf_per_h,
        min_margin,
        slope,
        samples: samples.len(),
        worst_tail: samples[worst.1].clone(),
        satisfied: min_margin > MARGIN_FLOOR && slope < MARGIN_SLOPE_MAX,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalizationCase {
    /// `A_0` invertible: `Lambda` holds `d` roots with multiplicity.
    Invertible,
    /// `A_0` rank deficient with `det A_1(z_1)` not identically zero.
    RankDeficient,
    /// `det A_1(z_1)` vanishes for every `z_1`.
    IdenticallySingular,
}

/// Roots of `det A_1(z_1)` for `N0 = 1`, where
/// `A_1(z_1) = ((a_1 phi_l, psi_k)) = B - z_1 A_0`.
#[derive(Debug, Clone, Serialize)]
pub struct Localization {
    pub d: usize,
    pub d0: usize,
    pub case: LocalizationCase,
    pub lambda: Vec<c64>,
    pub pairing: Vec<Vec<c64>>,
    pub b: Vec<Vec<c64>>,
    /// Coefficients of `det(B - z A_0)` in increasing powers of `z`.
    pub determinant_coefficients: Vec<c64>,
}

fn small_det(m: &Mat<c64>) -> c64 {
    if m.nrows() == 0 {
        return c64::new(1.0, 0.0);
    }
    m.as_ref().determinant()
}

/// Polynomial roots through the eigenvalues of the companion matrix.
fn poly_roots(coef: &[c64]) -> Result<Vec<c64>> {
    let deg = coef.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coef[deg];
    let comp = Mat::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -coef[deg - 1 - j] / lead
        } else if i == j + 1 {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let mut ev = comp
        .eigenvalues()
        .map_err(|e| Error::numerical(format!("companion eigenvalues failed: {e:?}")))?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

pub fn localization_n0_1(sys: &GrushinSystem) -> Result<Localization> {
    if sys.n0() != 1 {
        return Err(Error::InvalidInput(format!(
            "localization of z_1 needs N0 = 1, got {}",
            sys.n0()
        )));
    }
    let d = sys.d();
    let a0 = sys.pairing_matrix();
    let phi = sys.phi();
    let psi = sys.psi();
    let a1 = sys.tilde_op(1);
    let images: Vec<_> = phi
        .iter()
        .map(|p| p.apply_matrix(a1.matrix().as_ref()))
        .collect();
    let b = Mat::from_fn(d, d, |k, l| images[l].inner(&psi[k]));
    let sv = linalg::singular_values(a0.as_ref())?;
    let d0 = sv.iter().filter(|&&s| s > 1e-8).count();

    // det(B - z A_0) has degree <= d; interpolate on a circle
    let scale = 1.0 + linalg::max_abs(b.as_ref()) / sv.first().copied().unwrap_or(1.0).max(1e-300);
    let r = scale.min(1e6);
    let npts = d + 1;
    let nodes: Vec<c64> = (0..npts)
        .map(|k| c64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / npts as f64))
        .collect();
    let values: Vec<c64> = nodes
        .iter()
        .map(|&z| small_det(&Mat::from_fn(d, d, |i, j| b[(i, j)] - z * a0[(i, j)])))
        .collect();
    let coef: Vec<c64> = (0..npts)
        .map(|m| {
            let s: c64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * c64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * m) as f64 / npts as f64))
                .sum();
            s / (npts as f64 * r.powi(m as i32))
        })
        .collect();
    let bound = (linalg::max_abs(b.as_ref()) + 1.0).powi(d as i32) * 1e-10;
    let top = coef.iter().rposition(|c| c.norm() > bound);
    let (case, lambda) = match top {
        None => (LocalizationCase::IdenticallySingular, Vec::new()),
        Some(_) if d0 == d => {
            // det(B - z A_0) = det(A_0) det(A_0^{-1} B - z)
            let m = linalg::solve(a0.as_ref(), b.as_ref());
            let mut ev = m
                .eigenvalues()
                .map_err(|e| Error::numerical(format!("pencil eigenvalues failed: {e:?}")))?;
            ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            (LocalizationCase::Invertible, ev)
        }
        Some(deg) => (LocalizationCase::RankDeficient, poly_roots(&coef[..=deg])?),
    };
    Ok(Localization {
        d,
        d0,
        case,
        lambda,
        pairing: mat_to_rows(a0.as_ref()),
        b: mat_to_rows(b.as_ref()),
        determinant_coefficients: coef,
    })
}
