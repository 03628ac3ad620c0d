use std::f64::consts::PI;

use serde::Serialize;

use super::{QuadraticForm, ELLIPTIC_EPS, SECTOR_SLACK};
use crate::linalg::{kronecker_sequence, sphere_points};
use crate::symbols::SymbolJet;
use crate::{c64, Error, Result};

const SAMPLES_PER_DIM: usize = 10_000;
const POLISH_STARTS: usize = 16;
const POLISH_ITERS: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct EllipticCheck {
    pub elliptic: bool,
    /// `min |q|` on the real unit sphere.
    pub min_abs: f64,
    pub witness: Vec<f64>,
}

/// `min |q(X)|` over `|X| = 1` by quasi-random sampling followed by a damped
/// Gauss-Newton polish of the residual `(Re q, Im q)` on the sphere.
pub fn check_elliptic(q: &QuadraticForm) -> EllipticCheck {
    let n2 = 2 * q.dim();
    let pts = sphere_points(n2, SAMPLES_PER_DIM * q.dim());
    let mut scored: Vec<(f64, &Vec<f64>)> = pts.iter().map(|x| (q.eval(x).norm(), x)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = (f64::INFINITY, vec![0.0; n2]);
    for (_, x) in scored.iter().take(POLISH_STARTS) {
        let (v, w) = polish_abs(q, x);
        if v < best.0 {
            best = (v, w);
        }
    }
    EllipticCheck {
        elliptic: best.0 > ELLIPTIC_EPS,
        min_abs: best.0,
        witness: best.1,
    }
}

fn project_tangent(x: &[f64], g: &mut [f64]) {
    let d: f64 = x.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
    for (gi, xi) in g.iter_mut().zip(x) {
        *gi -= d * xi;
    }
}

fn normalized(mut x: Vec<f64>) -> Vec<f64> {
    let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in &mut x {
        *a /= n;
    }
    x
}

fn polish_abs(q: &QuadraticForm, start: &[f64]) -> (f64, Vec<f64>) {
    let mut x = start.to_vec();
    let mut val = q.eval(&x);
    let mut mu = 1e-3;
    for _ in 0..POLISH_ITERS {
        // gradients of Re q and Im q: 2 Re(M X), 2 Im(M X)
        let mx = q.apply(&x);
        let mut g1: Vec<f64> = mx.iter().map(|z| 2.0 * z.re).collect();
        let mut g2: Vec<f64> = mx.iter().map(|z| 2.0 * z.im).collect();
        project_tangent(&x, &mut g1);
        project_tangent(&x, &mut g2);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
        let (a11, a12, a22) = (dot(&g1, &g1), dot(&g1, &g2), dot(&g2, &g2));
        let r = [val.re, val.im];
        let mut improved = false;
        for _ in 0..30 {
            // delta = -G^T (G G^T + mu I)^{-1} r
            let (b11, b22) = (a11 + mu, a22 + mu);
            let det = b11 * b22 - a12 * a12;
            if det <= 0.0 {
                mu *= 10.0;
                continue;
            }
            let c1 = (b22 * r[0] - a12 * r[1]) / det;
            let c2 = (-a12 * r[0] + b11 * r[1]) / det;
            let cand: Vec<f64> = (0..x.len()).map(|i| x[i] - c1 * g1[i] - c2 * g2[i]).collect();
            let cand = normalized(cand);
            let cv = q.eval(&cand);
            if cv.norm() < val.norm() {
                x = cand;
                val = cv;
                mu = (mu * 0.3).max(1e-300);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved || val.norm() < 1e-300 {
            break;
        }
    }
    (val.norm(), x)
}

/// Closed angular sector `{arg z in [start, start + aperture]}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sector {
    pub start: f64,
    pub aperture: f64,
}

impl Sector {
    pub fn axis(&self) -> f64 {
        wrap_pi(self.start + self.aperture / 2.0)
    }

    pub fn half_aperture(&self) -> f64 {
        self.aperture / 2.0
    }

    /// Angular distance outside the sector (zero inside).
    pub fn excess(&self, angle: f64) -> f64 {
        let d = (angle - self.start).rem_euclid(2.0 * PI);
        if d <= self.aperture {
            0.0
        } else {
            (d - self.aperture).min(2.0 * PI - d)
        }
    }

    pub fn contains(&self, z: c64, slack: f64) -> bool {
        z.norm() == 0.0 || self.excess(z.arg()) <= slack
    }
}

fn wrap_pi(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Smallest closed sector containing `q(unit sphere)`.
pub fn sigma_q_sector(q: &QuadraticForm) -> Result<Sector> {
    let n2 = 2 * q.dim();
    let pts = sphere_points(n2, SAMPLES_PER_DIM * q.dim());
    let scale = pts.iter().map(|x| q.eval(x).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::InvalidInput("q vanishes identically".into()));
    }
    let mut samples: Vec<(f64, &Vec<f64>)> = pts
        .iter()
        .filter_map(|x| {
            let v = q.eval(x);
            (v.norm() > 1e-12 * scale).then(|| (v.arg(), x))
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    // the sector is the complement of the largest gap between sorted angles
    let k = samples.len();
    let mut gap = (2.0 * PI - (samples[k - 1].0 - samples[0].0), k - 1);
    for i in 0..k - 1 {
        let g = samples[i + 1].0 - samples[i].0;
        if g > gap.0 {
            gap = (g, i);
        }
    }
    let lo_idx = (gap.1 + 1) % k;
    let hi_idx = gap.1;
    let (lo, hi) = (samples[lo_idx].0, samples[hi_idx].0);
    let mut aperture = (hi - lo).rem_euclid(2.0 * PI);
    let lo_shift = wrap_pi(q.eval(&polish_arg(q, samples[lo_idx].1, -1.0)).arg() - lo).min(0.0);
    let hi_shift = wrap_pi(q.eval(&polish_arg(q, samples[hi_idx].1, 1.0)).arg() - hi).max(0.0);
    aperture += hi_shift - lo_shift;
    let start = lo + lo_shift;
    if aperture >= PI - SECTOR_SLACK {
        return Err(Error::SectorTooWide(aperture));
    }
    Ok(Sector {
        start: wrap_pi(start),
        aperture,
    })
}

/// Push `arg q` up (`dir = 1`) or down (`dir = -1`) along the sphere.
fn polish_arg(q: &QuadraticForm, start: &[f64], dir: f64) -> Vec<f64> {
    let mut x = start.to_vec();
    let base = q.eval(&x).arg();
    let rel = |v: c64| wrap_pi(v.arg() - base);
    let mut cur = rel(q.eval(&x));
    let mut step = 0.1;
    for _ in 0..POLISH_ITERS {
        let v = q.eval(&x);
        let mx = q.apply(&x);
        // d arg q = Im(dq / q), dq = 2 M X
        let mut g: Vec<f64> = mx.iter().map(|z| dir * (2.0 * z / v).im).collect();
        project_tangent(&x, &mut g);
        let gn = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        if gn < 1e-300 {
            break;
        }
        let mut moved = false;
        while step > 1e-16 {
            let cand = normalized((0..x.len()).map(|i| x[i] + step * g[i] / gn).collect());
            let cv = q.eval(&cand);
            if cv.norm() > 0.0 && dir * (rel(cv) - cur) > 0.0 {
                x = cand;
                cur = rel(cv);
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderCheck {
    pub holds: bool,
    /// Largest `|arg r(X)|` over nonzero samples (zero when `r` vanishes).
    pub max_abs_arg: f64,
    pub samples: usize,
}

/// Test whether `r = p0 - q` takes its nonzero values in a closed sector
/// inside `Re z > 0` on the ball of radius `rho`.
pub fn check_remainder_sector(jet: &SymbolJet, rho: f64, samples: usize) -> RemainderCheck {
    let r = jet.remainder();
    let n2 = 2 * jet.dim();
    if r.is_zero() {
        return RemainderCheck {
            holds: true,
            max_abs_arg: 0.0,
            samples: 0,
        };
    }
    let dirs = sphere_points(n2, samples);
    let radii = kronecker_sequence(1, samples);
    let mut max_arg = 0.0f64;
    let mut count = 0;
    for (x, t) in dirs.iter().zip(&radii) {
        let s = rho * t[0].powf(1.0 / n2 as f64);
        let pt: Vec<f64> = x.iter().map(|a| a * s).collect();
        let v = r.eval_real(&pt).expect("dimension checked");
        if v.norm() > 1e-14 * s.powi(3).max(1e-300) {
            max_arg = max_arg.max(v.arg().abs());
            count += 1;
        }
    }
    RemainderCheck {
        holds: max_arg < PI / 2.0 - SECTOR_SLACK,
        max_abs_arg: max_arg,
        samples: count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::tests::rotated;
    use crate::symbols::{MultiIndex, PhasePolynomial};
    use faer::Mat;

    #[test]
    fn harmonic_is_elliptic() {
        let c = check_elliptic(&rotated(0.0));
        assert!(c.elliptic);
        assert!((c.min_abs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_squared_is_not_elliptic() {
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 0)] = c64::new(1.0, 0.0);
        let c = check_elliptic(&QuadraticForm::from_matrix(1, m).unwrap());
        assert!(!c.elliptic);
        assert!(c.witness[0].abs() < 1e-3 && (c.witness[1].abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn imaginary_rotation_minimum() {
        // |xi^2 + i x^2|^2 = x^4 + xi^4 >= 1/2 on the circle
        let c = check_elliptic(&rotated(PI / 2.0));
        assert!(c.elliptic);
        assert!((c.min_abs - 0.5f64.sqrt()).abs() < 1e-10, "{}", c.min_abs);
    }

    #[test]
    fn sectors() {
        let s = sigma_q_sector(&rotated(0.0)).unwrap();
        assert!(s.aperture.abs() < 1e-12 && s.axis().abs() < 1e-12);
        let s = sigma_q_sector(&rotated(PI / 2.0)).unwrap();
        assert!(s.start.abs() < 1e-8, "{s:?}");
        assert!((s.aperture - PI / 2.0).abs() < 1e-8, "{s:?}");
        assert!((s.axis() - PI / 4.0).abs() < 1e-8);
    }

    #[test]
    fn indefinite_form_is_too_wide() {
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 0)] = c64::new(1.0, 0.0);
        m[(1, 1)] = c64::new(-1.0, 0.0);
        let err = sigma_q_sector(&QuadraticForm::from_matrix(1, m).unwrap()).unwrap_err();
        assert!(matches!(err, Error::SectorTooWide(_)));
    }

    #[test]
    fn sector_membership_wraps() {
        let s = Sector { start: 3.0, aperture: 0.5 };
        assert!(s.contains(c64::from_polar(1.0, -3.0), 0.0));
        assert!(!s.contains(c64::from_polar(1.0, 0.0), 1e-8));
    }

    fn jet(extra: &[(&[u32], f64)]) -> SymbolJet {
        let mut terms = vec![
            (MultiIndex::new(vec![2, 0]), c64::new(1.0, 0.0)),
            (MultiIndex::new(vec![0, 2]), c64::new(1.0, 0.0)),
        ];
        for (a, c) in extra {
            terms.push((MultiIndex::new(a.to_vec()), c64::new(*c, 0.0)));
        }
        SymbolJet::new(1, 2, vec![PhasePolynomial::from_terms(1, terms).unwrap()]).unwrap()
    }

    #[test]
    fn remainder_sector() {
        assert!(check_remainder_sector(&jet(&[(&[4, 0], 1.0)]), 0.5, 500).holds);
        assert!(!check_remainder_sector(&jet(&[(&[3, 0], 1.0)]), 0.5, 500).holds);
        let r = check_remainder_sector(&jet(&[]), 0.5, 500);
        assert!(r.holds && r.samples == 0);
    }
}
