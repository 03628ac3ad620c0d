//! Small dense linear-algebra helpers on top of `faer`.

use faer::{Col, Mat, MatRef};

use crate::{c64, Error, Result};

pub fn czero() -> c64 {
    c64::new(0.0, 0.0)
}

pub fn cone() -> c64 {
    c64::new(1.0, 0.0)
}

/// Full SVD of a complex matrix, sorted by nonincreasing singular value.
#[derive(Debug, Clone)]
pub struct SvdParts {
    pub u: Mat<c64>,
    pub s: Vec<f64>,
    pub v: Mat<c64>,
}

pub fn svd(a: MatRef<'_, c64>) -> Result<SvdParts> {
    let svd = a
        .svd()
        .map_err(|e| Error::numerical(format!("SVD did not converge: {e:?}")))?;
    Ok(SvdParts {
        u: svd.U().to_owned(),
        s: svd.S().column_vector().iter().map(|x| x.re).collect(),
        v: svd.V().to_owned(),
    })
}

pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    a.singular_values()
        .map_err(|e| Error::numerical(format!("SVD did not converge: {e:?}")))
}

/// Largest singular value (zero for empty matrices).
pub fn spectral_norm(a: MatRef<'_, c64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub fn smallest_singular_value(a: MatRef<'_, c64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(singular_values(a)?.last().copied().unwrap_or(0.0))
}

/// Number of singular values above `rel_tol * s_max`.
pub fn numerical_rank(s: &[f64], rel_tol: f64) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Orthonormal basis of the real null space of `a` (columns), thresholding at
/// `rel_tol` times the largest singular value.
pub fn real_null_space(a: &Mat<f64>, rel_tol: f64) -> Result<Mat<f64>> {
    let cols = a.ncols();
    if a.nrows() == 0 {
        return Ok(Mat::identity(cols, cols));
    }
    let svd = a
        .svd()
        .map_err(|e| Error::numerical(format!("SVD did not converge: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let rank = numerical_rank(&s, rel_tol);
    let v = svd.V();
    Ok(Mat::from_fn(cols, cols - rank, |i, j| v[(i, rank + j)]))
}

/// `(u, v) = sum u_i conj(v_i)`, linear in the first slot.
pub fn inner(u: &Col<c64>, v: &Col<c64>) -> c64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(u: &Col<c64>) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rotate `v` so that its largest-magnitude entry is real and positive.
pub fn fix_phase(v: &mut Col<c64>) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // strict comparison with a small margin keeps the choice stable under
        // round-off when two entries tie
        if z.norm() > best_abs * (1.0 + 1e-12) {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let phase = v[best].conj() / best_abs;
    for z in v.iter_mut() {
        *z *= phase;
    }
}

pub fn mat_from_rows(rows: &[Vec<c64>]) -> Mat<c64> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    Mat::from_fn(r, c, |i, j| rows[i][j])
}

pub fn mat_to_rows(m: MatRef<'_, c64>) -> Vec<Vec<c64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Largest absolute entry.
pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

/// Solve `a x = b` for square `a` by LU with partial pivoting.
pub fn solve(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    use faer::linalg::solvers::Solve;
    a.partial_piv_lu().solve(b)
}

/// Additive recurrence (R_d) low-discrepancy points in `[0,1)^d`.
pub fn kronecker_sequence(dim: usize, count: usize) -> Vec<Vec<f64>> {
    // phi_d is the positive root of x^{d+1} = x + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=dim).map(|k| phi.powi(-(k as i32)).fract()).collect();
    (1..=count)
        .map(|i| alpha.iter().map(|a| (0.5 + a * i as f64).fract()).collect())
        .collect()
}

/// Deterministic quasi-random points on the unit sphere of `R^dim`.
pub fn sphere_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let m = dim + dim % 2;
    let mut out = Vec::with_capacity(count);
    for u in kronecker_sequence(m, count) {
        let mut g = Vec::with_capacity(m);
        for pair in u.chunks(2) {
            let r = (-2.0 * (1.0 - pair[0]).ln()).sqrt();
            let t = 2.0 * std::f64::consts::PI * pair[1];
            g.push(r * t.cos());
            g.push(r * t.sin());
        }
        g.truncate(dim);
        let nrm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-12 {
            out.push(g.into_iter().map(|x| x / nrm).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_are_unit_and_spread() {
        let pts = sphere_points(4, 2000);
        assert!(pts.len() > 1990);
        let mut mean = [0.0; 4];
        for p in &pts {
            let n: f64 = p.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
            for k in 0..4 {
                mean[k] += p[k] / pts.len() as f64;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 0.05), "{mean:?}");
    }

    #[test]
    fn real_null_space_of_rank_one() {
        let a = Mat::from_fn(1, 3, |_, j| [1.0, 1.0, 0.0][j]);
        let ns = real_null_space(&a, 1e-9).unwrap();
        assert_eq!(ns.ncols(), 2);
        for j in 0..2 {
            assert!((ns[(0, j)] + ns[(1, j)]).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_fix_makes_peak_positive() {
        let mut v = Col::from_fn(3, |i| c64::new(0.1 * i as f64, -(i as f64)));
        fix_phase(&mut v);
        assert!(v[2].im.abs() < 1e-15 && v[2].re > 0.0);
    }

    #[test]
    fn inner_is_linear_in_first_slot() {
        let u = Col::from_fn(2, |i| c64::new(1.0, i as f64));
        let v = Col::from_fn(2, |_| c64::new(0.0, 1.0));
        let z = c64::new(0.3, 0.7);
        let zu = Col::from_fn(2, |i| z * u[i]);
        assert!((inner(&zu, &v) - z * inner(&u, &v)).norm() < 1e-15);
    }
}
