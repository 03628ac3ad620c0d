use faer::Mat;
use serde::Serialize;

use super::{HamiltonMap, RANK_TOL};
use crate::linalg::real_null_space;
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct SingularSpace {
    /// Orthonormal real basis of `S`.
    pub basis: Vec<Vec<f64>>,
    /// Smallest `k` with `cap_{j <= k} Ker Re F (Im F)^j = {0}`; `None` when
    /// `S` is nontrivial.
    pub k0: Option<usize>,
}

impl SingularSpace {
    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Loss `2 k0 / (2 k0 + 1)` in the subelliptic estimate.
    pub fn subelliptic_exponent(&self) -> Option<f64> {
        self.k0.map(|k| 2.0 * k as f64 / (2.0 * k as f64 + 1.0))
    }
}

pub fn singular_space_k0(f: &HamiltonMap) -> Result<SingularSpace> {
    let n2 = 2 * f.dim();
    let scale = crate::linalg::max_abs(f.matrix().as_ref());
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let re = f.real_part() * faer::Scale(1.0 / scale);
    let im = f.imag_part() * faer::Scale(1.0 / scale);
    let mut block = re.clone();
    let mut stack = Mat::<f64>::zeros(0, n2);
    let mut k0 = None;
    let mut null = Mat::<f64>::identity(n2, n2);
    for j in 0..n2 {
        if j > 0 {
            block = &block * &im;
        }
        stack = Mat::from_fn(stack.nrows() + n2, n2, |r, c| {
            if r < stack.nrows() {
                stack[(r, c)]
            } else {
                block[(r - stack.nrows(), c)]
            }
        });
        null = real_null_space(&stack, RANK_TOL)?;
        if null.ncols() == 0 {
            k0 = Some(j);
            break;
        }
    }
    let basis = (0..null.ncols())
        .map(|c| (0..n2).map(|r| null[(r, c)]).collect())
        .collect();
    Ok(SingularSpace { basis, k0 })
}
