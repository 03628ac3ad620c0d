use faer::{Mat, Side};
use serde::Serialize;

use super::{HamiltonMap, SpectralMode};
use crate::linalg::{self, mat_to_rows, max_abs};
use crate::{c64, Error, Result};

/// Positive Lagrangian plane `{(x, B+ x)}` spanned by the generalized
/// eigenvectors of the selected modes.
#[derive(Debug, Clone, Serialize)]
pub struct GroundStateData {
    pub bplus: Vec<Vec<c64>>,
    /// `sum_l r_l mu_l`, the bottom of the spectrum of `q^w`.
    pub bottom_eigenvalue: c64,
    /// Smallest eigenvalue of `Im B+`.
    pub im_bplus_min_eig: f64,
    /// Condition number of the `x`-block of the plane basis.
    pub u_condition: f64,
    /// Per mode: ratio of the largest discarded to the smallest kept singular
    /// value of `(F - lambda)^r` (small means a clean generalized eigenspace).
    pub jordan_gap: Vec<f64>,
    /// `max |F G - G C|` for the basis `G = [I; B+]` of the plane.
    pub invariance_residual: f64,
    /// `max |B+ - B+^T|` before symmetrization.
    pub symmetry_residual: f64,
}

impl GroundStateData {
    pub fn bplus_matrix(&self) -> Mat<c64> {
        linalg::mat_from_rows(&self.bplus)
    }
}

pub fn ground_state_bplus(f: &HamiltonMap, modes: &[SpectralMode]) -> Result<GroundStateData> {
    let n = f.dim();
    let n2 = 2 * n;
    let fm = f.matrix();
    let mut cols: Vec<Vec<c64>> = Vec::new();
    let mut gaps = Vec::new();
    for m in modes {
        let r = m.multiplicity;
        let shifted = Mat::from_fn(n2, n2, |i, j| fm[(i, j)] - if i == j { m.lambda } else { c64::new(0.0, 0.0) });
        let mut p = shifted.clone();
        for _ in 1..r {
            p = &p * &shifted;
        }
        let svd = linalg::svd(p.as_ref())?;
        let kept = svd.s[n2 - r];
        let discarded = if r < n2 { svd.s[n2 - r - 1] } else { f64::INFINITY };
        gaps.push(if discarded > 0.0 { kept / discarded } else { 0.0 });
        for c in n2 - r..n2 {
            cols.push((0..n2).map(|i| svd.v[(i, c)]).collect());
        }
    }
    if cols.len() != n {
        return Err(Error::numerical(format!(
            "selected generalized eigenspace has dimension {}, expected {n}",
            cols.len()
        )));
    }
    let u = Mat::from_fn(n, n, |i, j| cols[j][i]);
    let w = Mat::from_fn(n, n, |i, j| cols[j][n + i]);
    let sv = linalg::singular_values(u.as_ref())?;
    let cond = sv[0] / sv[n - 1];
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::numerical(format!(
            "plane is not a graph over x: cond(U) = {cond:e}"
        )));
    }
    // B = W U^{-1}, i.e. U^T B^T = W^T
    let bt = linalg::solve(u.transpose(), w.transpose());
    let b = bt.transpose().to_owned();
    let symmetry_residual = max_abs((&b - b.transpose()).as_ref());
    let b = Mat::from_fn(n, n, |i, j| (b[(i, j)] + b[(j, i)]) * 0.5);
    let im = Mat::<f64>::from_fn(n, n, |i, j| b[(i, j)].im);
    let im_min = im
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::numerical(format!("{e:?}")))?[0];
    if im_min <= 1e-10 {
        return Err(Error::AmbiguousSelection(format!(
            "Im B+ is not positive definite (smallest eigenvalue {im_min:e})"
        )));
    }
    // F [I; B] = [U'; W'] must equal [I; B] U'
    let g = Mat::from_fn(n2, n, |i, j| if i < n { if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) } } else { b[(i - n, j)] });
    let fg = fm * &g;
    let top = fg.subrows(0, n).to_owned();
    let bottom = fg.subrows(n, n).to_owned();
    let invariance = max_abs((bottom - &b * &top).as_ref()) / max_abs(fm.as_ref()).max(1e-300);
    let bottom_eigenvalue = modes.iter().map(|m| m.mu * m.multiplicity as f64).sum();
    Ok(GroundStateData {
        bplus: mat_to_rows(b.as_ref()),
        bottom_eigenvalue,
        im_bplus_min_eig: im_min,
        u_condition: cond,
        jordan_gap: gaps,
        invariance_residual: invariance,
        symmetry_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::tests::rotated;
    use crate::quadratic::{hamilton_map, sigma_q_sector, spectrum_modes, QuadraticForm};
    use std::f64::consts::PI;

    fn ground(q: &QuadraticForm) -> GroundStateData {
        let f = hamilton_map(q);
        let modes = spectrum_modes(&f, &sigma_q_sector(q).unwrap()).unwrap();
        ground_state_bplus(&f, &modes).unwrap()
    }

    #[test]
    fn harmonic_plane() {
        let g = ground(&rotated(0.0));
        assert!((g.bplus[0][0] - c64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((g.bottom_eigenvalue - c64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(g.invariance_residual < 1e-12);
    }

    #[test]
    fn rotated_plane() {
        let theta = PI / 4.0;
        let g = ground(&rotated(theta));
        let expect = c64::new(0.0, 1.0) * c64::from_polar(1.0, theta / 2.0);
        assert!((g.bplus[0][0] - expect).norm() < 1e-12);
        assert!((g.bottom_eigenvalue - c64::from_polar(1.0, theta / 2.0)).norm() < 1e-12);
        assert!(g.im_bplus_min_eig > 0.0);
    }

    #[test]
    fn diagonal_two_dimensional_plane() {
        // xi1^2 + x1^2 + xi2^2 + e^{i pi/3} x2^2
        let mut m = Mat::<c64>::zeros(4, 4);
        m[(0, 0)] = c64::new(1.0, 0.0);
        m[(1, 1)] = c64::from_polar(1.0, PI / 3.0);
        m[(2, 2)] = c64::new(1.0, 0.0);
        m[(3, 3)] = c64::new(1.0, 0.0);
        let g = ground(&QuadraticForm::from_matrix(2, m).unwrap());
        let b = g.bplus_matrix();
        assert!((b[(0, 0)] - c64::new(0.0, 1.0)).norm() < 1e-10);
        assert!((b[(1, 1)] - c64::new(0.0, 1.0) * c64::from_polar(1.0, PI / 6.0)).norm() < 1e-10);
        assert!(b[(0, 1)].norm() < 1e-10 && b[(1, 0)].norm() < 1e-10);
        assert!(g.invariance_residual < 1e-10);
    }
}
