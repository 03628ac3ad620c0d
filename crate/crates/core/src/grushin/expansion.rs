use serde::Serialize;

use super::correctors::compositions;
use super::GrushinSystem;
use crate::fock::{apply_chain, FockOperator};
use crate::{c64, Error, Result};

/// Smallest `|(phi, psi)|` accepted for a scalar reduction.
pub const PAIRING_TOL: f64 = 1e-8;

/// `z(h) = z_0 + sum_j z̃_j h^{j/2}`, so that `h z(h)` approximates an
/// eigenvalue of the scaled operator.
#[derive(Debug, Clone, Serialize)]
pub struct EigenExpansion {
    pub z0: c64,
    /// `z̃_1 … z̃_{2N0+2}`.
    pub ztilde: Vec<c64>,
    pub pairing: c64,
}

impl EigenExpansion {
    pub fn ztilde(&self, j: usize) -> c64 {
        self.ztilde[j - 1]
    }

    /// `h (z_0 + sum_{j <= order} z̃_j h^{j/2})`.
    pub fn predict(&self, h: f64, order: usize) -> c64 {
        let mut z = self.z0;
        for j in 1..=order.min(self.ztilde.len()) {
            z += self.ztilde[j - 1] * h.powf(j as f64 / 2.0);
        }
        z * h
    }
}

/// `z̃_1 = (ã_1 phi, psi) / (phi, psi)` and for `j >= 2`
///
/// `z̃_j (phi, psi) = (ã_j phi, psi) + sum_{i >= 2} (-1)^{i+1}
///     sum_{k_1+…+k_i = j} ((ã_{k_1} - z̃_{k_1}) S … S (ã_{k_i} - z̃_{k_i}) phi, psi)`.
///
/// Every part of a composition with `i >= 2` is below `j`, so the recursion
/// only uses coefficients already computed. Requires `d = 1`.
pub fn ztilde_sequence(sys: &GrushinSystem) -> Result<EigenExpansion> {
    if sys.d() != 1 {
        return Err(Error::Unsupported(format!(
            "eigenvalue expansion needs a simple kernel, d = {}",
            sys.d()
        )));
    }
    let phi = &sys.phi()[0];
    let psi = &sys.psi()[0];
    let pairing = phi.inner(psi);
    if pairing.norm() < PAIRING_TOL {
        return Err(Error::PairingDegenerate(pairing.norm()));
    }
    let s_op = sys.reduced_inverse().as_operator(sys.q());
    let orders = sys.orders();
    let mut zt: Vec<c64> = Vec::with_capacity(orders);
    // shifted[k] = ã_k - z̃_k once z̃_k is known
    let mut shifted: Vec<FockOperator> = Vec::with_capacity(orders);
    for j in 1..=orders {
        let mut num = apply_chain(&[sys.tilde_op(j)], phi)?.inner(psi);
        for comp in compositions(j).into_iter().filter(|c| c.len() >= 2) {
            let sign = if comp.len() % 2 == 0 { -1.0 } else { 1.0 };
            let mut chain: Vec<&FockOperator> = Vec::with_capacity(2 * comp.len());
            for (p, &k) in comp.iter().enumerate() {
                if p > 0 {
                    chain.push(&s_op);
                }
                chain.push(&shifted[k - 1]);
            }
            let v = apply_chain(&chain, phi)?;
            let need = sys.basis().n_cut() as i64;
            if v.trusted_degree() < need {
                return Err(Error::TrustExhausted {
                    trusted: v.trusted_degree(),
                    required: need,
                });
            }
            num += v.inner(psi) * sign;
        }
        let z = num / pairing;
        zt.push(z);
        shifted.push(sys.tilde_op(j).shift(z));
    }
    Ok(EigenExpansion {
        z0: sys.z()[0],
        ztilde: zt,
        pairing,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn cubic_oscillator_coefficients() {
        let sys = oscillator_system(&[(&[3, 0], re(1.0))], 2, 30);
        let e = ztilde_sequence(&sys).unwrap();
        let expect = [0.0, -11.0 / 16.0, 0.0, -465.0 / 256.0, 0.0, -39709.0 / 4096.0];
        for (j, want) in expect.iter().enumerate() {
            assert!((e.ztilde[j] - re(*want)).norm() < 1e-10, "z{}: {}", j + 1, e.ztilde[j]);
        }
    }

    #[test]
    fn quartic_oscillator_second_coefficient() {
        let sys = oscillator_system(&[(&[4, 0], re(1.0))], 2, 30);
        let e = ztilde_sequence(&sys).unwrap();
        assert!((e.ztilde(2) - re(0.75)).norm() < 1e-12);
        assert!(e.ztilde(1).norm() < 1e-14);
    }

    #[test]
    fn expansion_makes_effective_matrices_vanish() {
        let sys = oscillator_system(&[(&[3, 0], re(1.0)), (&[1, 2], c64::new(0.3, 0.2))], 2, 30);
        let e = ztilde_sequence(&sys).unwrap();
        let at = sys.with_tail(&e.ztilde).unwrap();
        for j in 1..=at.orders() {
            assert!(max_abs(at.a_matrix(j).as_ref()) < 1e-10, "A_{j}");
        }
    }
}
