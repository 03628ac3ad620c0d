use faer::Mat;

use super::QuadraticForm;
use crate::c64;

/// `J = [[0, -I], [I, 0]]`, so that `sigma(X, Z) = X^T J Z`.
pub fn symplectic_matrix(dim: usize) -> Mat<c64> {
    Mat::from_fn(2 * dim, 2 * dim, |i, j| {
        if i < dim && j == i + dim {
            c64::new(-1.0, 0.0)
        } else if i >= dim && j + dim == i {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Hamilton map `F = J^{-1} M`.
#[derive(Debug, Clone)]
pub struct HamiltonMap {
    dim: usize,
    f: Mat<c64>,
}

pub fn hamilton_map(q: &QuadraticForm) -> HamiltonMap {
    let n = q.dim();
    let m = q.matrix();
    // J^{-1} = -J: row i of F is row n+i of M, row n+i is minus row i.
    let f = Mat::from_fn(2 * n, 2 * n, |i, j| if i < n { m[(n + i, j)] } else { -m[(i - n, j)] });
    HamiltonMap { dim: n, f }
}

impl HamiltonMap {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.f
    }

    /// Entrywise real part, the Hamilton map of `Re q`.
    pub fn real_part(&self) -> Mat<f64> {
        Mat::from_fn(self.f.nrows(), self.f.ncols(), |i, j| self.f[(i, j)].re)
    }

    /// Entrywise imaginary part, the Hamilton map of `Im q`.
    pub fn imag_part(&self) -> Mat<f64> {
        Mat::from_fn(self.f.nrows(), self.f.ncols(), |i, j| self.f[(i, j)].im)
    }

    /// `max |(J F - M)_{ij}|`.
    pub fn symmetry_residual(&self, q: &QuadraticForm) -> f64 {
        let jf = symplectic_matrix(self.dim) * &self.f;
        crate::linalg::max_abs((jf - q.matrix()).as_ref())
    }

    /// `sigma(F X, Y) + sigma(X, F Y)` for the given vectors.
    pub fn skew_defect(&self, x: &[f64], y: &[f64]) -> c64 {
        let fx = self.apply(x);
        let fy = self.apply(y);
        sigma_c(&fx, y) + sigma_c_r(x, &fy)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<c64> {
        let n2 = 2 * self.dim;
        (0..n2)
            .map(|i| (0..n2).map(|j| self.f[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn eigenvalues(&self) -> crate::Result<Vec<c64>> {
        self.f
            .eigenvalues()
            .map_err(|e| crate::Error::numerical(format!("eigenvalues of F: {e:?}")))
    }
}

fn sigma_c(a: &[c64], b: &[f64]) -> c64 {
    let n = a.len() / 2;
    (0..n).map(|k| a[n + k] * b[k] - a[k] * b[n + k]).sum()
}

fn sigma_c_r(a: &[f64], b: &[c64]) -> c64 {
    let n = a.len() / 2;
    (0..n).map(|k| b[k] * a[n + k] - b[n + k] * a[k]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::tests::rotated;
    use crate::symbols::{MultiIndex, PhasePolynomial};

    #[test]
    fn rotated_oscillator_map() {
        let theta = 0.7;
        let f = hamilton_map(&rotated(theta));
        let m = f.matrix();
        assert!((m[(0, 1)] - c64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(1, 0)] + c64::from_polar(1.0, theta)).norm() < 1e-15);
        assert!(m[(0, 0)].norm() < 1e-15 && m[(1, 1)].norm() < 1e-15);
        let ev = f.eigenvalues().unwrap();
        let target = c64::new(0.0, 1.0) * c64::from_polar(1.0, theta / 2.0);
        assert!(ev.iter().any(|l| (l - target).norm() < 1e-12));
        assert!(ev.iter().any(|l| (l + target).norm() < 1e-12));
    }

    #[test]
    fn x_xi_map() {
        let p = PhasePolynomial::monomial(MultiIndex::new(vec![1, 1]), c64::new(1.0, 0.0));
        let q = QuadraticForm::from_polynomial(&p).unwrap();
        let f = hamilton_map(&q);
        let m = f.matrix();
        assert!((m[(0, 0)] - c64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((m[(1, 1)] + c64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn zero_form_has_zero_map() {
        let q = QuadraticForm::from_matrix(2, Mat::zeros(4, 4)).unwrap();
        assert_eq!(crate::linalg::max_abs(hamilton_map(&q).matrix().as_ref()), 0.0);
    }

    #[test]
    fn polarization_identity() {
        let p = PhasePolynomial::from_terms(
            2,
            [
                (MultiIndex::new(vec![2, 0, 0, 0]), c64::new(1.0, 0.5)),
                (MultiIndex::new(vec![0, 1, 1, 0]), c64::new(-0.3, 0.2)),
                (MultiIndex::new(vec![0, 0, 0, 2]), c64::new(0.7, 0.0)),
            ],
        )
        .unwrap();
        let q = QuadraticForm::from_polynomial(&p).unwrap();
        let f = hamilton_map(&q);
        assert!(f.symmetry_residual(&q) < 1e-14);
        let x = [0.1, -0.4, 0.3, 0.9];
        let y = [0.5, 0.2, -0.6, 0.1];
        // q(X; Y) = X^T M Y = sigma(X, F Y)
        let my = q.apply(&y);
        let qxy: c64 = x.iter().zip(&my).map(|(a, b)| b * *a).sum();
        let fy = f.apply(&y);
        assert!((qxy - sigma_c_r(&x, &fy)).norm() < 1e-14);
        assert!(f.skew_defect(&x, &y).norm() < 1e-14);
    }
}
