use faer::Mat;

use super::KERNEL_RANK_TOL;
use crate::fock::{FockOperator, FockVector};
use crate::linalg::{self, fix_phase};
use crate::{c64, Error, Result};

/// Orthonormal bases of `V1 = Ker Q` and `V2 = Ker Q*` plus the SVD data
/// they came from.
#[derive(Debug, Clone)]
pub struct Kernels {
    pub phi: Vec<FockVector>,
    pub psi: Vec<FockVector>,
    pub(crate) svd: linalg::SvdParts,
    pub rank: usize,
}

impl Kernels {
    pub fn singular_values(&self) -> &[f64] {
        &self.svd.s
    }
}

/// Numerical null spaces of `Q` and `Q*` by singular-value thresholding at
/// `KERNEL_RANK_TOL` relative to the largest singular value.
pub fn compute_kernels(q: &FockOperator, expected_d: usize) -> Result<Kernels> {
    let m = q.basis().size();
    let svd = linalg::svd(q.matrix().as_ref())?;
    let smax = svd.s[0];
    let rank = svd.s.iter().filter(|&&s| s > KERNEL_RANK_TOL * smax).count();
    let found = m - rank;
    if found != expected_d {
        return Err(Error::KernelDimension {
            expected: expected_d,
            found,
        });
    }
    let grab = |mat: &Mat<c64>, c: usize| -> Result<FockVector> {
        let mut col = faer::Col::from_fn(m, |i| mat[(i, c)]);
        if found == 1 {
            fix_phase(&mut col);
        }
        FockVector::new(q.basis().clone(), col)
    };
    let mut phi = Vec::with_capacity(found);
    let mut psi = Vec::with_capacity(found);
    if found > 1 {
        // the SVD basis of a degenerate null space is arbitrary
        for (src, out) in [(&svd.v, &mut phi), (&svd.u, &mut psi)] {
            let block = Mat::from_fn(m, found, |i, j| src[(i, rank + j)]);
            for v in canonical_basis(&block) {
                out.push(FockVector::new(q.basis().clone(), v)?);
            }
        }
    } else {
        for c in rank..m {
            phi.push(grab(&svd.v, c)?);
            psi.push(grab(&svd.u, c)?);
        }
    }
    Ok(Kernels {
        phi,
        psi,
        svd,
        rank,
    })
}

/// Orthonormal basis of the column span of `block`, made independent of the
/// SVD's arbitrary unitary freedom: Gram-Schmidt on the projections of the
/// unit vectors carrying the most weight.
fn canonical_basis(block: &Mat<c64>) -> Vec<faer::Col<c64>> {
    let (m, d) = (block.nrows(), block.ncols());
    let weight: Vec<f64> = (0..m)
        .map(|i| (0..d).map(|j| block[(i, j)].norm_sqr()).sum())
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| weight[b].total_cmp(&weight[a]).then(a.cmp(&b)));
    let mut out: Vec<faer::Col<c64>> = Vec::with_capacity(d);
    for &i in &order {
        if out.len() == d {
            break;
        }
        // projection of e_i onto the span: block * block^H e_i
        let coeffs: Vec<c64> = (0..d).map(|j| block[(i, j)].conj()).collect();
        let mut v = faer::Col::from_fn(m, |r| (0..d).map(|j| block[(r, j)] * coeffs[j]).sum::<c64>());
        for u in &out {
            let c = linalg::inner(&v, u);
            for r in 0..m {
                let t = u[r] * c;
                v[r] -= t;
            }
        }
        let nrm = linalg::norm(&v);
        if nrm > 1e-6 {
            for r in 0..m {
                v[r] /= nrm;
            }
            fix_phase(&mut v);
            out.push(v);
        }
    }
    out
}

/// Moore-Penrose pseudoinverse of the truncated `Q`, built from the kernel
/// SVD so that it drops exactly the kernel directions.
#[derive(Debug, Clone)]
pub struct ReducedInverse {
    pub matrix: Mat<c64>,
    /// Smallest singular value kept, relative to the largest.
    pub relative_gap: f64,
    pub warning: Option<String>,
}

impl ReducedInverse {
    pub fn as_operator(&self, q: &FockOperator) -> FockOperator {
        FockOperator::new(q.basis().clone(), self.matrix.clone(), 0).expect("same grid")
    }
}

pub fn reduced_inverse(q: &FockOperator, kernels: &Kernels) -> Result<ReducedInverse> {
    let m = q.basis().size();
    let r = kernels.rank;
    let svd = &kernels.svd;
    // S = V_r diag(1/s) U_r^H
    let vs = Mat::from_fn(m, r, |i, j| svd.v[(i, j)] / svd.s[j]);
    let ur = svd.u.subcols(0, r);
    let matrix = &vs * ur.adjoint();
    let relative_gap = if r > 0 { svd.s[r - 1] / svd.s[0] } else { 0.0 };
    let warning = (relative_gap < 10.0 * KERNEL_RANK_TOL).then(|| {
        format!("smallest retained singular value of Q is {relative_gap:e} relative to the largest")
    });
    Ok(ReducedInverse {
        matrix,
        relative_gap,
        warning,
    })
}
