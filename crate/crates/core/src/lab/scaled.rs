use std::sync::Arc;

use faer::Col;

use crate::fock::{quantize, FockBasis, FockOperator, FockVector};
use crate::symbols::{PhasePolynomial, SymbolJet};
use crate::{c64, Error, Result};

/// Eigenvectors with more than this fraction of their mass above `N_cut`
/// are treated as truncation artifacts.
pub const GUARD_MASS_LIMIT: f64 = 0.01;

/// Quantization of `sum_j h^j p_j(h^{1/2} X)` on a fixed Hermite basis.
#[derive(Debug, Clone)]
pub struct ScaledOperator {
    pub h: f64,
    pub op: FockOperator,
}

impl ScaledOperator {
    pub fn basis(&self) -> &Arc<FockBasis> {
        self.op.basis()
    }
}

pub fn assemble_scaled(jet: &SymbolJet, h: f64, basis: &Arc<FockBasis>) -> Result<ScaledOperator> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput(format!("h = {h} must be positive")));
    }
    if jet.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: jet.dim(),
        });
    }
    let s = h.sqrt();
    let mut sym = PhasePolynomial::zero(jet.dim());
    for (j, p) in jet.orders().iter().enumerate() {
        let part = p.dilate(s).scale(&c64::new(h.powi(j as i32), 0.0));
        sym = &sym + &part;
    }
    Ok(ScaledOperator {
        h,
        op: quantize(&sym, basis)?,
    })
}

/// Eigenvalues of the full-grid matrix inside the closed disk, dropping
/// modes whose eigenvector sits mostly in the guard band. Sorted by
/// distance to `center`.
pub fn eigen_near(op: &ScaledOperator, center: c64, radius: f64) -> Result<Vec<c64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius {radius} must be positive")));
    }
    let m = op.op.matrix();
    let evd = m
        .eigen()
        .map_err(|e| Error::numerical(format!("eigendecomposition failed: {e:?}")))?;
    let vals = evd.S().column_vector();
    let vecs = evd.U();
    let basis = op.basis();
    let mut out = Vec::new();
    for i in 0..vals.nrows() {
        let z = vals[i];
        if (z - center).norm() > radius {
            continue;
        }
        let v = FockVector::new(basis.clone(), Col::from_fn(m.nrows(), |r| vecs[(r, i)]))?;
        let total = v.norm() * v.norm();
        if total == 0.0 || v.mass_above(basis.n_cut()) / total >= GUARD_MASS_LIMIT {
            continue;
        }
        out.push(z);
    }
    out.sort_by(|a, b| (a - center).norm().total_cmp(&(b - center).norm()));
    Ok(out)
}
