use std::collections::HashMap;
use std::sync::Arc;

use faer::{Mat, MatRef};

use super::FockBasis;
use crate::symbols::PhasePolynomial;
use crate::{c64, Error, Result};

/// Dense matrix of an operator on the full grid of a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    mat: Mat<c64>,
    leakage: usize,
}

fn check_same(a: &FockBasis, b: &FockBasis) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput(format!(
            "operators live on different bases ({}, {}, {}) vs ({}, {}, {})",
            a.dim(),
            a.n_cut(),
            a.guard(),
            b.dim(),
            b.n_cut(),
            b.guard()
        )));
    }
    Ok(())
}

impl FockOperator {
    pub fn new(basis: Arc<FockBasis>, mat: Mat<c64>, leakage: usize) -> Result<Self> {
        if mat.nrows() != basis.size() || mat.ncols() != basis.size() {
            return Err(Error::DimensionMismatch {
                expected: basis.size(),
                found: mat.nrows(),
            });
        }
        Ok(FockOperator {
            basis,
            mat,
            leakage,
        })
    }

    pub fn identity(basis: &Arc<FockBasis>) -> Self {
        let m = basis.size();
        FockOperator {
            basis: basis.clone(),
            mat: Mat::identity(m, m),
            leakage: 0,
        }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.mat
    }

    pub fn leakage(&self) -> usize {
        self.leakage
    }

    /// Largest level `T` such that the entries on `|mu|, |nu| <= T` are exact
    /// up to round-off.
    pub fn trusted_degree(&self) -> i64 {
        self.basis.top() as i64 - self.leakage as i64
    }

    /// Leading block on the trusted levels.
    pub fn trusted_block(&self) -> MatRef<'_, c64> {
        let k = self.basis.block_size(self.trusted_degree());
        self.mat.submatrix(0, 0, k, k)
    }

    /// Leading block on levels `<= t`.
    pub fn block(&self, t: i64) -> MatRef<'_, c64> {
        let k = self.basis.block_size(t);
        self.mat.submatrix(0, 0, k, k)
    }

    pub fn compose(&self, other: &FockOperator) -> Result<FockOperator> {
        check_same(&self.basis, &other.basis)?;
        Ok(FockOperator {
            basis: self.basis.clone(),
            mat: &self.mat * &other.mat,
            leakage: self.leakage + other.leakage,
        })
    }

    pub fn add(&self, other: &FockOperator) -> Result<FockOperator> {
        check_same(&self.basis, &other.basis)?;
        Ok(FockOperator {
            basis: self.basis.clone(),
            mat: &self.mat + &other.mat,
            leakage: self.leakage.max(other.leakage),
        })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<FockOperator> {
        check_same(&self.basis, &other.basis)?;
        Ok(FockOperator {
            basis: self.basis.clone(),
            mat: &self.mat - &other.mat,
            leakage: self.leakage.max(other.leakage),
        })
    }

    pub fn scale(&self, c: c64) -> FockOperator {
        FockOperator {
            basis: self.basis.clone(),
            mat: &self.mat * faer::Scale(c),
            leakage: self.leakage,
        }
    }

    /// `self - z I`.
    pub fn shift(&self, z: c64) -> FockOperator {
        let mut mat = self.mat.clone();
        for i in 0..mat.nrows() {
            mat[(i, i)] -= z;
        }
        FockOperator {
            basis: self.basis.clone(),
            mat,
            leakage: self.leakage,
        }
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            basis: self.basis.clone(),
            mat: self.mat.adjoint().to_owned(),
            leakage: self.leakage,
        }
    }
}

/// Banded left or right multiplication by `X` or `D` on the 1-d grid.
fn ladder_step(s: &Mat<c64>, xi: bool) -> Mat<c64> {
    let l = s.nrows();
    let sq: Vec<f64> = (0..=l).map(|k| (k as f64 / 2.0).sqrt()).collect();
    // X[k-1,k] = X[k,k-1] = sqrt(k/2); D[k-1,k] = -i sqrt(k/2), D[k,k-1] = i sqrt(k/2)
    let (up, down) = if xi {
        (c64::new(0.0, -1.0), c64::new(0.0, 1.0))
    } else {
        (c64::new(1.0, 0.0), c64::new(1.0, 0.0))
    };
    Mat::from_fn(l, l, |i, j| {
        let mut left = c64::new(0.0, 0.0);
        if i + 1 < l {
            left += up * sq[i + 1] * s[(i + 1, j)];
        }
        if i > 0 {
            left += down * sq[i] * s[(i - 1, j)];
        }
        let mut right = c64::new(0.0, 0.0);
        if j > 0 {
            right += s[(i, j - 1)] * up * sq[j];
        }
        if j + 1 < l {
            right += s[(i, j + 1)] * down * sq[j + 1];
        }
        (left + right) * 0.5
    })
}

/// Weyl quantization of `x^a xi^b` on levels `0..levels`, computed on an
/// extended grid and restricted so that every returned entry is exact.
/// `x_first` selects the order in which the symmetrized recursions run.
pub fn op_1d(a: u32, b: u32, levels: usize, x_first: bool) -> Mat<c64> {
    let ext = levels + (a + b) as usize;
    let mut s = Mat::<c64>::identity(ext, ext);
    let steps = [(false, a), (true, b)];
    let order: [usize; 2] = if x_first { [0, 1] } else { [1, 0] };
    for &o in &order {
        let (xi, count) = steps[o];
        for _ in 0..count {
            s = ladder_step(&s, xi);
        }
    }
    s.submatrix(0, 0, levels, levels).to_owned()
}

/// Weyl quantization of `a` on the full grid of `basis`.
pub fn quantize(a: &PhasePolynomial, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    if a.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: a.dim(),
        });
    }
    let deg = a.degree().unwrap_or(0) as usize;
    if deg > basis.guard() {
        return Err(Error::DegreeExceedsGuard {
            degree: deg,
            guard: basis.guard(),
        });
    }
    let n = basis.dim();
    let levels = basis.top() + 1;
    let m = basis.size();
    let mut mat = Mat::<c64>::zeros(m, m);
    let mut cache: HashMap<(u32, u32), Mat<c64>> = HashMap::new();
    for (alpha, &c) in a.terms() {
        let factors: Vec<(u32, u32)> = (0..n).map(|j| (alpha.x_part()[j], alpha.xi_part()[j])).collect();
        for f in &factors {
            cache
                .entry(*f)
                .or_insert_with(|| op_1d(f.0, f.1, levels, true));
        }
        let mats: Vec<&Mat<c64>> = factors.iter().map(|f| &cache[f]).collect();
        let bands: Vec<usize> = factors.iter().map(|f| (f.0 + f.1) as usize).collect();
        let top = basis.top();
        let mut mu = vec![0u32; n];
        for col in 0..m {
            let nu = basis.state(col);
            accumulate(basis, &mats, &bands, nu, 0, c, 0, top, &mut mu, col, &mut mat);
        }
    }
    Ok(FockOperator {
        basis: basis.clone(),
        mat,
        leakage: deg,
    })
}

#[allow(clippy::too_many_arguments)]
fn accumulate(
    basis: &FockBasis,
    mats: &[&Mat<c64>],
    bands: &[usize],
    nu: &[u32],
    j: usize,
    weight: c64,
    used: usize,
    top: usize,
    mu: &mut Vec<u32>,
    col: usize,
    out: &mut Mat<c64>,
) {
    if j == mats.len() {
        let row = basis.index_of(mu).expect("level bounded by top");
        out[(row, col)] += weight;
        return;
    }
    let v = nu[j] as usize;
    let lo = v.saturating_sub(bands[j]);
    let hi = (v + bands[j]).min(top - used);
    for r in lo..=hi {
        let e = mats[j][(r, v)];
        if e.re == 0.0 && e.im == 0.0 {
            continue;
        }
        mu[j] = r as u32;
        accumulate(basis, mats, bands, nu, j + 1, weight * e, used + r, top, mu, col, out);
    }
}
