use std::collections::HashMap;
use std::sync::Arc;

use faer::Mat;

use crate::{c64, Error, Result};

/// Refuse bases with more states than this.
pub const MAX_BASIS_SIZE: usize = 200_000;

/// Multi-indices `nu` with `|nu| <= N_cut + G`, graded by `|nu|` and ordered
/// within a level by decreasing first entry. States with `|nu| <= T` always
/// form a prefix of length `C(T + n, n)`.
#[derive(Debug)]
pub struct FockBasis {
    dim: usize,
    n_cut: usize,
    guard: usize,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

fn level_states(dim: usize, level: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == dim {
        prefix.push(level);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=level).rev() {
        prefix.push(first);
        level_states(dim, level - first, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(dim: usize, n_cut: usize, guard: usize) -> Result<Arc<Self>> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if n_cut == 0 {
            return Err(Error::InvalidInput("N_cut must be at least 1".into()));
        }
        let top = n_cut + guard;
        let size = binomial(top + dim, dim).unwrap_or(usize::MAX);
        if size > MAX_BASIS_SIZE {
            return Err(Error::BasisTooLarge {
                size,
                limit: MAX_BASIS_SIZE,
            });
        }
        let mut states = Vec::with_capacity(size);
        for level in 0..=top as u32 {
            level_states(dim, level, &mut Vec::with_capacity(dim), &mut states);
        }
        debug_assert_eq!(states.len(), size);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Arc::new(FockBasis {
            dim,
            n_cut,
            guard,
            states,
            index,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Highest level `N_cut + G`.
    pub fn top(&self) -> usize {
        self.n_cut + self.guard
    }

    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn index_of(&self, nu: &[u32]) -> Option<usize> {
        self.index.get(nu).copied()
    }

    pub fn level(&self, i: usize) -> usize {
        self.states[i].iter().sum::<u32>() as usize
    }

    /// Number of states with `|nu| <= t` (zero for negative `t`).
    pub fn block_size(&self, t: i64) -> usize {
        if t < 0 {
            return 0;
        }
        let t = (t as usize).min(self.top());
        binomial(t + self.dim, self.dim).expect("bounded by the basis size")
    }

    /// Dense matrix of `a_j` (or `a_j^+` when `dagger`), with
    /// `a_j |nu> = sqrt(nu_j) |nu - e_j>`.
    pub fn ladder(&self, j: usize, dagger: bool) -> Mat<c64> {
        let m = self.size();
        let mut out = Mat::<c64>::zeros(m, m);
        for (col, nu) in self.states.iter().enumerate() {
            if nu[j] == 0 {
                continue;
            }
            let mut lower = nu.clone();
            lower[j] -= 1;
            let row = self.index[&lower];
            let v = c64::new((nu[j] as f64).sqrt(), 0.0);
            if dagger {
                out[(col, row)] = v;
            } else {
                out[(row, col)] = v;
            }
        }
        out
    }
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n_cut == other.n_cut && self.guard == other.guard
    }
}
