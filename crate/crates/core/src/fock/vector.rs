use std::sync::Arc;

use faer::{Col, Mat, MatRef};

use super::{FockBasis, FockOperator};
use crate::linalg;
use crate::{c64, Error, Result};

/// Coefficient vector on the full grid of a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct FockVector {
    basis: Arc<FockBasis>,
    data: Col<c64>,
    trusted: i64,
}

impl FockVector {
    /// A vector whose every coefficient is trusted up to the grid top.
    pub fn new(basis: Arc<FockBasis>, data: Col<c64>) -> Result<Self> {
        if data.nrows() != basis.size() {
            return Err(Error::DimensionMismatch {
                expected: basis.size(),
                found: data.nrows(),
            });
        }
        let trusted = basis.top() as i64;
        Ok(FockVector {
            basis,
            data,
            trusted,
        })
    }

    pub fn zeros(basis: &Arc<FockBasis>) -> Self {
        FockVector {
            basis: basis.clone(),
            data: Col::zeros(basis.size()),
            trusted: basis.top() as i64,
        }
    }

    /// `|nu>`.
    pub fn basis_state(basis: &Arc<FockBasis>, nu: &[u32]) -> Result<Self> {
        let idx = basis
            .index_of(nu)
            .ok_or_else(|| Error::InvalidInput(format!("state {nu:?} is outside the basis")))?;
        let mut v = Self::zeros(basis);
        v.data[idx] = c64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn data(&self) -> &Col<c64> {
        &self.data
    }

    pub fn into_data(self) -> Col<c64> {
        self.data
    }

    pub fn trusted_degree(&self) -> i64 {
        self.trusted
    }

    pub fn with_trust(mut self, trusted: i64) -> Self {
        self.trusted = trusted;
        self
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.data)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::numerical("cannot normalize the zero vector"));
        }
        Ok(self.scale(c64::new(1.0 / n, 0.0)))
    }

    /// `(self, other) = sum self_i conj(other_i)`.
    pub fn inner(&self, other: &FockVector) -> c64 {
        linalg::inner(&self.data, &other.data)
    }

    pub fn scale(&self, c: c64) -> Self {
        FockVector {
            basis: self.basis.clone(),
            data: Col::from_fn(self.data.nrows(), |i| self.data[i] * c),
            trusted: self.trusted,
        }
    }

    pub fn add(&self, other: &FockVector) -> Result<Self> {
        self.combine(other, c64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &FockVector) -> Result<Self> {
        self.combine(other, c64::new(-1.0, 0.0))
    }

    /// `self + c other`.
    pub fn combine(&self, other: &FockVector, c: c64) -> Result<Self> {
        if *self.basis != *other.basis {
            return Err(Error::InvalidInput("vectors live on different bases".into()));
        }
        Ok(FockVector {
            basis: self.basis.clone(),
            data: Col::from_fn(self.data.nrows(), |i| self.data[i] + c * other.data[i]),
            trusted: self.trusted.min(other.trusted),
        })
    }

    /// Coefficients on levels `<= t`.
    pub fn block(&self, t: i64) -> Col<c64> {
        let k = self.basis.block_size(t);
        Col::from_fn(k, |i| self.data[i])
    }

    /// Squared mass on levels `> t`.
    pub fn mass_above(&self, t: usize) -> f64 {
        (0..self.data.nrows())
            .filter(|&i| self.basis.level(i) > t)
            .map(|i| self.data[i].norm_sqr())
            .sum()
    }

    /// Apply a matrix that does not change the trusted degree (such as the
    /// reduced inverse).
    pub fn apply_matrix(&self, m: MatRef<'_, c64>) -> Self {
        FockVector {
            basis: self.basis.clone(),
            data: m * &self.data,
            trusted: self.trusted,
        }
    }
}

/// `ops[0] ops[1] ... ops[last] v`; the rightmost operator acts first.
pub fn apply_chain(ops: &[&FockOperator], v: &FockVector) -> Result<FockVector> {
    let mut out = v.clone();
    for op in ops.iter().rev() {
        if **op.basis() != **v.basis() {
            return Err(Error::InvalidInput("operator and vector bases differ".into()));
        }
        let trusted = out.trusted - op.leakage() as i64;
        if trusted < 0 {
            return Err(Error::TrustExhausted {
                trusted,
                required: 0,
            });
        }
        out = FockVector {
            basis: out.basis.clone(),
            data: op.matrix() * &out.data,
            trusted,
        };
    }
    Ok(out)
}

/// Normalized Hermite coefficients of `exp((i/2) <x, B x>)`.
///
/// With `C = (I - iB)^{-1}(I + iB)` the Gaussian satisfies `a u = C a^+ u`,
/// which gives `sqrt(nu_j + 1) c_{nu+e_j} = sum_k C_jk sqrt(nu_k) c_{nu-e_k}`.
pub fn project_gaussian(bplus: MatRef<'_, c64>, basis: &Arc<FockBasis>) -> Result<FockVector> {
    let n = basis.dim();
    if bplus.nrows() != n || bplus.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bplus.nrows(),
        });
    }
    let i = c64::new(0.0, 1.0);
    let lhs = Mat::from_fn(n, n, |r, c| if r == c { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) } - i * bplus[(r, c)]);
    let rhs = Mat::from_fn(n, n, |r, c| if r == c { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) } + i * bplus[(r, c)]);
    let lsv = linalg::singular_values(lhs.as_ref())?;
    if lsv[n - 1] <= 1e-14 * lsv[0] {
        return Err(Error::numerical("I - iB+ is singular"));
    }
    let c = linalg::solve(lhs.as_ref(), rhs.as_ref());
    let cnorm = linalg::spectral_norm(c.as_ref())?;
    if !(cnorm < 1.0) {
        return Err(Error::numerical(format!(
            "Gaussian recurrence diverges: |C| = {cnorm} (cond(I - iB+) = {:e})",
            lsv[0] / lsv[n - 1]
        )));
    }
    let m = basis.size();
    let mut coef = Col::<c64>::zeros(m);
    coef[0] = c64::new(1.0, 0.0);
    let mut lower = vec![0u32; n];
    for idx in 1..m {
        let nu = basis.state(idx);
        let j = nu.iter().position(|&e| e > 0).expect("nonzero state");
        lower.copy_from_slice(nu);
        lower[j] -= 1;
        // sqrt(nu_j) c_nu = sum_k C_jk sqrt(lower_k) c_{lower - e_k}
        let mut s = c64::new(0.0, 0.0);
        for k in 0..n {
            if lower[k] == 0 {
                continue;
            }
            let w = (lower[k] as f64).sqrt();
            lower[k] -= 1;
            let src = basis.index_of(&lower).expect("lower level in basis");
            lower[k] += 1;
            s += c[(j, k)] * w * coef[src];
        }
        coef[idx] = s / (nu[j] as f64).sqrt();
    }
    FockVector::new(basis.clone(), coef)?.normalized()
}
