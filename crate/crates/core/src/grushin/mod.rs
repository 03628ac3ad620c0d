//! Grushin reduction of `sum_k h^{1+k/2} a_k^w` around the kernel of
//! `Q = a_0^w`.
//!
//! All vectors live on the full grid of one [`FockBasis`]; `S` is the
//! Moore-Penrose pseudoinverse of the truncated `Q`. Inner products are
//! `(u, v) = sum u conj(v)`.

mod correctors;
mod effective;
mod expansion;
mod kernels;
mod parity;
mod residuals;

use std::sync::Arc;

use faer::Mat;

pub use correctors::{compositions, effective_direct};
pub use effective::{
    localization_n0_1, margin_scan, EffectiveFamily, Localization, LocalizationCase, MarginReport,
    OmegaBox,
};
pub use expansion::{ztilde_sequence, EigenExpansion};
pub use kernels::{compute_kernels, reduced_inverse, Kernels, ReducedInverse};
pub use parity::{parity_audit, vector_parity, ParityReport};
pub use residuals::{grushin_residuals, Residuals};

use crate::fock::{quantize, FockBasis, FockOperator, FockVector};
use crate::symbols::AkFamily;
use crate::{c64, Error, Result};

/// Relative singular-value threshold for kernel detection.
pub const KERNEL_RANK_TOL: f64 = 1e-8;

/// Kernels, reduced inverse, correctors and the matrices `A_1 … A_{2N0+2}`.
#[derive(Debug, Clone)]
pub struct GrushinSystem {
    basis: Arc<FockBasis>,
    n0: usize,
    z: Vec<c64>,
    tilde_ops: Vec<FockOperator>,
    a_ops: Vec<FockOperator>,
    kernels: Kernels,
    s: ReducedInverse,
    phi_plus: Vec<Vec<FockVector>>,
    psi_minus: Vec<Vec<FockVector>>,
    a_mats: Vec<Mat<c64>>,
}

impl GrushinSystem {
    /// Quantize the family, compute kernels (which must have dimension
    /// `expected_d`), the reduced inverse, and run the corrector recursion.
    pub fn build(family: &AkFamily, basis: &Arc<FockBasis>, expected_d: usize) -> Result<Self> {
        if family.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: family.dim(),
            });
        }
        let tilde_ops = (0..family.len())
            .map(|k| quantize(family.tilde(k), basis))
            .collect::<Result<Vec<_>>>()?;
        let z = family.z_coefficients().to_vec();
        let a_ops: Vec<FockOperator> = tilde_ops.iter().zip(&z).map(|(t, &zk)| t.shift(zk)).collect();
        let kernels = compute_kernels(&a_ops[0], expected_d)?;
        let s = reduced_inverse(&a_ops[0], &kernels)?;
        let mut sys = GrushinSystem {
            basis: basis.clone(),
            n0: family.n0(),
            z,
            tilde_ops,
            a_ops,
            kernels,
            s,
            phi_plus: Vec::new(),
            psi_minus: Vec::new(),
            a_mats: Vec::new(),
        };
        correctors::build_correctors(&mut sys)?;
        Ok(sys)
    }

    /// Same system with a different tail `z_1 … z_{2N0+2}` (the leading `z_0`
    /// and hence the kernels are kept).
    pub fn with_tail(&self, tail: &[c64]) -> Result<Self> {
        if tail.len() != self.z.len() - 1 {
            return Err(Error::DimensionMismatch {
                expected: self.z.len() - 1,
                found: tail.len(),
            });
        }
        let mut z = vec![self.z[0]];
        z.extend_from_slice(tail);
        let mut sys = self.clone();
        sys.a_ops = self.tilde_ops.iter().zip(&z).map(|(t, &zk)| t.shift(zk)).collect();
        sys.z = z;
        correctors::build_correctors(&mut sys)?;
        Ok(sys)
    }

    /// Same system with other orthonormal bases of `V1` and `V2`.
    pub fn with_kernel_bases(&self, phi: Vec<FockVector>, psi: Vec<FockVector>) -> Result<Self> {
        if phi.len() != self.d() || psi.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: phi.len().min(psi.len()),
            });
        }
        let mut sys = self.clone();
        sys.kernels.phi = phi;
        sys.kernels.psi = psi;
        correctors::build_correctors(&mut sys)?;
        Ok(sys)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Number of correction orders, `2N0 + 2`.
    pub fn orders(&self) -> usize {
        2 * self.n0 + 2
    }

    pub fn d(&self) -> usize {
        self.kernels.phi.len()
    }

    pub fn z(&self) -> &[c64] {
        &self.z
    }

    pub fn q(&self) -> &FockOperator {
        &self.a_ops[0]
    }

    /// Quantized `a_k`.
    pub fn a_op(&self, k: usize) -> &FockOperator {
        &self.a_ops[k]
    }

    /// Quantized `ã_k`.
    pub fn tilde_op(&self, k: usize) -> &FockOperator {
        &self.tilde_ops[k]
    }

    pub fn kernels(&self) -> &Kernels {
        &self.kernels
    }

    pub fn phi(&self) -> &[FockVector] {
        &self.kernels.phi
    }

    pub fn psi(&self) -> &[FockVector] {
        &self.kernels.psi
    }

    pub fn reduced_inverse(&self) -> &ReducedInverse {
        &self.s
    }

    /// `phi^+_{j,l}` for `0 <= j <= 2N0+2`.
    pub fn phi_plus(&self, j: usize, l: usize) -> &FockVector {
        &self.phi_plus[j][l]
    }

    /// `psi^-_{j,l}` for `0 <= j <= 2N0+2`.
    pub fn psi_minus(&self, j: usize, l: usize) -> &FockVector {
        &self.psi_minus[j][l]
    }

    /// `A_j` for `1 <= j <= 2N0+2`, from the corrector recursion.
    pub fn a_matrix(&self, j: usize) -> &Mat<c64> {
        &self.a_mats[j - 1]
    }

    pub fn a_matrices(&self) -> &[Mat<c64>] {
        &self.a_mats
    }

    /// `A_0 = ((phi_l, psi_k))_{k,l}`.
    pub fn pairing_matrix(&self) -> Mat<c64> {
        let d = self.d();
        Mat::from_fn(d, d, |k, l| self.kernels.phi[l].inner(&self.kernels.psi[k]))
    }

    pub fn effective_family(&self) -> EffectiveFamily {
        EffectiveFamily::new(self.n0, self.a_mats.clone())
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::symbols::{build_ak_family, MultiIndex, PhasePolynomial, SpectralParameter, SymbolJet};

    pub fn poly(dim: usize, terms: &[(&[u32], c64)]) -> PhasePolynomial {
        PhasePolynomial::from_terms(dim, terms.iter().map(|(a, c)| (MultiIndex::new(a.to_vec()), *c))).unwrap()
    }

    pub fn re(x: f64) -> c64 {
        c64::new(x, 0.0)
    }

    /// `x^2 + xi^2 + extra` in one dimension at `z0 = 1`.
    pub fn oscillator_system(extra: &[(&[u32], c64)], n0: usize, n_cut: usize) -> GrushinSystem {
        let mut terms: Vec<(&[u32], c64)> = vec![(&[2, 0], re(1.0)), (&[0, 2], re(1.0))];
        terms.extend_from_slice(extra);
        let jet = SymbolJet::new(1, n0, vec![poly(1, &terms)]).unwrap();
        let zp = SpectralParameter::new(n0, re(1.0), &[]).unwrap();
        let fam = build_ak_family(&jet, &zp).unwrap();
        let basis = FockBasis::new(1, n_cut, crate::fock::default_guard(n0)).unwrap();
        GrushinSystem::build(&fam, &basis, 1).unwrap()
    }
}
