use serde::{Deserialize, Serialize};

use super::{MultiIndex, PhasePolynomial};
use crate::{c64, Error, Result};

/// One term of a symbol literal: `(re + i im) X^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolTerm {
    pub alpha: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl PhasePolynomial<c64> {
    pub fn from_literal(dim: usize, terms: &[SymbolTerm]) -> Result<Self> {
        let mut p = PhasePolynomial::zero(dim);
        for t in terms {
            if t.alpha.len() != 2 * dim {
                return Err(Error::InvalidInput(format!(
                    "symbol term {:?} has {} exponents, expected {}",
                    t.alpha,
                    t.alpha.len(),
                    2 * dim
                )));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite coefficient for {:?}",
                    t.alpha
                )));
            }
            p.add_term(MultiIndex::new(t.alpha.clone()), c64::new(t.re, t.im));
        }
        Ok(p)
    }

    pub fn to_literal(&self) -> Vec<SymbolTerm> {
        self.terms()
            .map(|(a, c)| SymbolTerm {
                alpha: a.exponents().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }
}
