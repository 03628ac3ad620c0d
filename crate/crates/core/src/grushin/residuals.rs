use faer::Mat;
use serde::Serialize;

use super::GrushinSystem;
use crate::fock::apply_chain;
use crate::linalg::spectral_norm;
use crate::{c64, Error, Result};

/// Operator norms of the four Grushin identities at one `h`, measured on the
/// states with `|nu| <= N_cut`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Residuals {
    pub h: f64,
    /// `|R+ E+ - I|`.
    pub right_kernel: f64,
    /// `|P E+ + R- E±|` with `P = sum_k h^{1+k/2} a_k^w`.
    pub first_row: f64,
    /// `|E- P + E± R+|`.
    pub second_row: f64,
    /// `|S a_0^w + E+ R+ - I|`.
    pub inverse: f64,
}

/// `E+ u- = sum_l u-(l) sum_j h^{j/2} phi^+_{j,l}` and
/// `E- u = ((u, sum_j h^{j/2} psi^-_{j,k}))_k`, truncated at `j = 2N0+2`.
pub fn grushin_residuals(sys: &GrushinSystem, h: f64) -> Result<Residuals> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidInput(format!("h = {h} is outside (0, 1)")));
    }
    let d = sys.d();
    let kmax = sys.orders();
    let basis = sys.basis();
    let m = basis.size();
    let t = basis.block_size(basis.n_cut() as i64);
    let hp = |e: f64| c64::new(h.powf(e), 0.0);

    // columns of E+ and of E-* (the adjoint), on the full grid
    let mut e_plus = Mat::<c64>::zeros(m, d);
    let mut e_minus_adj = Mat::<c64>::zeros(m, d);
    for l in 0..d {
        for j in 0..=kmax {
            let w = hp(j as f64 / 2.0);
            let (p, q) = (sys.phi_plus(j, l).data(), sys.psi_minus(j, l).data());
            for i in 0..m {
                e_plus[(i, l)] += w * p[i];
                e_minus_adj[(i, l)] += w * q[i];
            }
        }
    }

    // R+ E+ - I
    let mut rk = Mat::<c64>::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            let phi = sys.phi()[k].data();
            let mut acc = c64::new(if k == l { -1.0 } else { 0.0 }, 0.0);
            for i in 0..m {
                acc += e_plus[(i, l)] * phi[i].conj();
            }
            rk[(k, l)] = acc;
        }
    }

    // E± = sum_j A_j h^{1+j/2}
    let e_pm = sys.effective_family().eval(h);

    let mut first = Mat::<c64>::zeros(m, d);
    let mut second = Mat::<c64>::zeros(m, d);
    for l in 0..d {
        for k in 0..=kmax {
            let a = sys.a_op(k);
            let a_adj = a.adjoint();
            for j in 0..=kmax {
                let w = hp(1.0 + (k + j) as f64 / 2.0);
                let v = apply_chain(&[a], sys.phi_plus(j, l))?;
                let u = apply_chain(&[&a_adj], sys.psi_minus(j, l))?;
                for i in 0..m {
                    first[(i, l)] += w * v.data()[i];
                    second[(i, l)] += w * u.data()[i];
                }
            }
        }
        for k in 0..d {
            let (psi, phi) = (sys.psi()[k].data(), sys.phi()[k].data());
            let (c1, c2) = (e_pm[(k, l)], e_pm[(l, k)].conj());
            for i in 0..m {
                first[(i, l)] += c1 * psi[i];
                second[(i, l)] += c2 * phi[i];
            }
        }
    }

    // S a_0 + E+ R+ - I
    let mut inv = &sys.reduced_inverse().matrix * sys.q().matrix();
    for i in 0..m {
        inv[(i, i)] -= c64::new(1.0, 0.0);
    }
    for l in 0..d {
        let phi = sys.phi()[l].data();
        for r in 0..m {
            for c in 0..m {
                inv[(r, c)] += e_plus[(r, l)] * phi[c].conj();
            }
        }
    }

    Ok(Residuals {
        h,
        right_kernel: spectral_norm(rk.as_ref())?,
        first_row: spectral_norm(first.subrows(0, t))?,
        second_row: spectral_norm(second.subrows(0, t))?,
        inverse: spectral_norm(inv.submatrix(0, 0, t, t))?,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn cubic_residual_orders() {
        let sys = oscillator_system(&[(&[3, 0], re(1.0))], 2, 30);
        let r1 = grushin_residuals(&sys, 0.02).unwrap();
        let r2 = grushin_residuals(&sys, 0.01).unwrap();
        assert!(r1.right_kernel < 1e-12);
        // first and second rows are O(h^{N0 + 5/2}) = O(h^{4.5})
        let slope = (r1.first_row / r2.first_row).ln() / 2f64.ln();
        assert!((slope - 4.5).abs() < 0.3, "slope {slope}");
        let slope = (r1.second_row / r2.second_row).ln() / 2f64.ln();
        assert!((slope - 4.5).abs() < 0.3, "slope {slope}");
        // S a_0 + E+ R+ - I = O(h^{1/2})
        let c1 = r1.inverse / 0.02f64.sqrt();
        let c2 = r2.inverse / 0.01f64.sqrt();
        assert!(c1 / c2 < 2.0 && c2 / c1 < 2.0);
    }
}
