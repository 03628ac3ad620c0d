//! Linear-algebraic analysis of the quadratic part `q` of the principal
//! symbol.
//!
//! Conventions: phase-space vectors are `X = (x, xi)`, the symplectic form is
//! `sigma(X, Z) = xi . z - x . zeta = X^T J Z` with `J = [[0, -I], [I, 0]]`,
//! and the Hamilton map satisfies `q(X; Y) = sigma(X, F Y)`, i.e. `J F = M`.

mod ellipticity;
mod ground_state;
mod hamilton;
mod singular;
mod spectrum;

use faer::{Mat, Side};
use serde::Serialize;

pub use ellipticity::{
    check_elliptic, check_remainder_sector, sigma_q_sector, EllipticCheck, RemainderCheck, Sector,
};
pub use ground_state::{ground_state_bplus, GroundStateData};
pub use hamilton::{hamilton_map, symplectic_matrix, HamiltonMap};
pub use singular::{singular_space_k0, SingularSpace};
pub use spectrum::{
    lattice_multiplicity, lattice_points, spectrum_modes, spectrum_modes_partial, LatticePoint,
    SpectralMode,
};

use crate::symbols::{MultiIndex, PhasePolynomial};
use crate::{c64, Error, Result};

/// Slack for `Re q >= 0` on the unit sphere.
pub const NONNEG_TOL: f64 = 1e-10;
/// `q` counts as elliptic when `min |q|` on the unit sphere exceeds this.
pub const ELLIPTIC_EPS: f64 = 1e-6;
/// Angular slack for sector membership.
pub const SECTOR_SLACK: f64 = 1e-8;
/// Relative singular-value threshold for real null spaces.
pub const RANK_TOL: f64 = 1e-9;

/// Complex quadratic form `q(X) = X^T M X` on `R^{2n}`, `M` symmetric.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    dim: usize,
    m: Mat<c64>,
}

impl QuadraticForm {
    /// Symmetrizes `m` on construction.
    pub fn from_matrix(dim: usize, m: Mat<c64>) -> Result<Self> {
        if m.nrows() != 2 * dim || m.ncols() != 2 * dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * dim,
                found: m.nrows(),
            });
        }
        let sym = Mat::from_fn(2 * dim, 2 * dim, |i, j| (m[(i, j)] + m[(j, i)]) * 0.5);
        Ok(QuadraticForm { dim, m: sym })
    }

    /// Reads the degree-2 part of `p`; any other degree is an error.
    pub fn from_polynomial(p: &PhasePolynomial) -> Result<Self> {
        let dim = p.dim();
        let mut m = Mat::<c64>::zeros(2 * dim, 2 * dim);
        for (alpha, c) in p.terms() {
            if alpha.degree() != 2 {
                return Err(Error::InvalidInput(format!(
                    "quadratic form expected, found term {alpha:?}"
                )));
            }
            let idx: Vec<usize> = alpha
                .exponents()
                .iter()
                .enumerate()
                .flat_map(|(k, &e)| std::iter::repeat_n(k, e as usize))
                .collect();
            let (i, j) = (idx[0], idx[1]);
            if i == j {
                m[(i, i)] += *c;
            } else {
                m[(i, j)] += *c * 0.5;
                m[(j, i)] += *c * 0.5;
            }
        }
        Ok(QuadraticForm { dim, m })
    }

    pub fn to_polynomial(&self) -> PhasePolynomial {
        let n2 = 2 * self.dim;
        let mut p = PhasePolynomial::zero(self.dim);
        for i in 0..n2 {
            for j in i..n2 {
                let c = if i == j { self.m[(i, i)] } else { self.m[(i, j)] * 2.0 };
                let mut e = vec![0u32; n2];
                e[i] += 1;
                e[j] += 1;
                p.add_term(MultiIndex::new(e), c);
            }
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.m
    }

    pub fn eval(&self, x: &[f64]) -> c64 {
        let n2 = 2 * self.dim;
        let mut s = c64::new(0.0, 0.0);
        for i in 0..n2 {
            for j in 0..n2 {
                s += self.m[(i, j)] * (x[i] * x[j]);
            }
        }
        s
    }

    /// `M X` for a real vector.
    pub fn apply(&self, x: &[f64]) -> Vec<c64> {
        let n2 = 2 * self.dim;
        (0..n2)
            .map(|i| (0..n2).map(|j| self.m[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn real_part(&self) -> QuadraticForm {
        let m = Mat::from_fn(2 * self.dim, 2 * self.dim, |i, j| c64::new(self.m[(i, j)].re, 0.0));
        QuadraticForm { dim: self.dim, m }
    }

    pub fn imag_part(&self) -> QuadraticForm {
        let m = Mat::from_fn(2 * self.dim, 2 * self.dim, |i, j| c64::new(self.m[(i, j)].im, 0.0));
        QuadraticForm { dim: self.dim, m }
    }

    /// Minimum of `Re q` on the real unit sphere and a minimizer. Exact: it is
    /// the smallest eigenvalue of `Re M`.
    pub fn min_real_part_on_sphere(&self) -> (f64, Vec<f64>) {
        let n2 = 2 * self.dim;
        let re = Mat::<f64>::from_fn(n2, n2, |i, j| self.m[(i, j)].re);
        match re.self_adjoint_eigen(Side::Lower) {
            Ok(evd) => {
                let val = evd.S().column_vector()[0];
                let u = evd.U();
                (val, (0..n2).map(|i| u[(i, 0)]).collect())
            }
            Err(_) => (f64::NAN, vec![0.0; n2]),
        }
    }
}

/// Everything the quadratic layer computes about `q`.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticReport {
    pub dim: usize,
    pub hamilton_map: Vec<Vec<c64>>,
    pub elliptic: bool,
    pub min_abs_q: f64,
    pub witness: Vec<f64>,
    pub sector: Option<Sector>,
    pub spectrum_modes: Vec<SpectralMode>,
    /// How the modes were selected: `"elliptic"`, `"partially-elliptic"` or
    /// the reason no selection was made.
    pub spectrum_rule: String,
    pub singular_space_basis: Vec<Vec<f64>>,
    pub k0: Option<usize>,
    pub subelliptic_exponent: Option<f64>,
    pub ground_state: Option<GroundStateData>,
}

impl QuadraticReport {
    /// The first `count` lattice points in order of modulus.
    pub fn lattice(&self, count: usize) -> Vec<LatticePoint> {
        let cap = count.max(1);
        let mut pts = lattice_points(&self.spectrum_modes, cap);
        pts.truncate(count);
        pts
    }
}

/// Run the whole quadratic layer. Ellipticity failure is not an error here;
/// callers that need full ellipticity check `report.elliptic`.
pub fn analyze(q: &QuadraticForm) -> Result<QuadraticReport> {
    let f = hamilton_map(q);
    let ell = check_elliptic(q);
    let singular = singular_space_k0(&f)?;
    let mut sector = None;
    let mut modes = Vec::new();
    let mut ground_state = None;
    let rule;
    if ell.elliptic {
        let sec = sigma_q_sector(q)?;
        modes = spectrum_modes(&f, &sec)?;
        ground_state = Some(ground_state_bplus(&f, &modes)?);
        sector = Some(sec);
        rule = "elliptic".to_string();
    } else {
        match spectrum_modes_partial(&f, q, &singular) {
            Ok(m) => {
                modes = m;
                rule = "partially-elliptic".to_string();
            }
            Err(Error::Unsupported(msg)) => rule = format!("unsupported: {msg}"),
            Err(e) => return Err(e),
        }
    }
    Ok(QuadraticReport {
        dim: q.dim(),
        hamilton_map: crate::linalg::mat_to_rows(f.matrix().as_ref()),
        elliptic: ell.elliptic,
        min_abs_q: ell.min_abs,
        witness: ell.witness,
        sector,
        spectrum_modes: modes,
        spectrum_rule: rule,
        singular_space_basis: singular.basis.clone(),
        k0: singular.k0,
        subelliptic_exponent: singular.subelliptic_exponent(),
        ground_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rotated(theta: f64) -> QuadraticForm {
        // xi^2 + e^{i theta} x^2
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 0)] = c64::from_polar(1.0, theta);
        m[(1, 1)] = c64::new(1.0, 0.0);
        QuadraticForm::from_matrix(1, m).unwrap()
    }

    #[test]
    fn polynomial_round_trip() {
        let p = PhasePolynomial::from_terms(
            2,
            [
                (MultiIndex::new(vec![1, 0, 0, 1]), c64::new(2.0, 1.0)),
                (MultiIndex::new(vec![0, 0, 2, 0]), c64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let q = QuadraticForm::from_polynomial(&p).unwrap();
        assert!(q.to_polynomial().coeff_distance(&p) < 1e-15);
        let x = [0.3, -0.2, 0.5, 0.7];
        assert!((q.eval(&x) - p.eval_real(&x).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn non_quadratic_is_rejected() {
        let p = PhasePolynomial::x(1, 0);
        assert!(QuadraticForm::from_polynomial(&p).is_err());
    }

    #[test]
    fn real_part_minimum_is_exact() {
        let q = rotated(std::f64::consts::FRAC_PI_2);
        let (m, w) = q.min_real_part_on_sphere();
        assert!(m.abs() < 1e-14);
        assert!((w[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analyze_harmonic() {
        let q = rotated(0.0);
        let r = analyze(&q).unwrap();
        assert!(r.elliptic);
        assert_eq!(r.k0, Some(0));
        let lat: Vec<f64> = r.lattice(3).iter().map(|p| p.value.re).collect();
        assert!((lat[0] - 1.0).abs() < 1e-12 && (lat[1] - 3.0).abs() < 1e-12 && (lat[2] - 5.0).abs() < 1e-12);
    }
}
