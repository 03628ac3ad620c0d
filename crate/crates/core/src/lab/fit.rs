use std::sync::Arc;

use serde::Serialize;

use super::{assemble_scaled, eigen_near};
use crate::fock::FockBasis;
use crate::grushin::EigenExpansion;
use crate::symbols::SymbolJet;
use crate::{c64, Error, Result};

/// Residuals below `ROUND_OFF * h` carry no slope information.
pub const ROUND_OFF: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionFit {
    pub h: Vec<f64>,
    pub z_num_re: Vec<f64>,
    pub z_num_im: Vec<f64>,
    pub predicted_re: Vec<f64>,
    pub predicted_im: Vec<f64>,
    pub residual: Vec<f64>,
    /// Number of `z̃_j` terms in the prediction.
    pub order: usize,
    pub fitted_slope: f64,
    pub expected_slope: f64,
    /// All residuals are at round-off, so the slope is meaningless.
    pub at_round_off: bool,
    /// Largest `h` from which the residual decreases monotonically.
    pub monotone_from: Option<f64>,
}

impl ExpansionFit {
    /// Slope at least `expected - slack`, or residuals at round-off.
    pub fn meets_order(&self, slack: f64) -> bool {
        self.at_round_off || self.fitted_slope >= self.expected_slope - slack
    }
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Track the eigenvalue near `h z_0` from the largest `h` downward and
/// compare it with `h (z_0 + sum_{j <= order} z̃_j h^{j/2})`.
///
/// At the largest `h` the search disk is centered on the prediction; after
/// that it follows the previous eigenvalue scaled by `h`. Radius `h/2`.
pub fn validate_expansion(
    jet: &SymbolJet,
    expansion: &EigenExpansion,
    hs: &[f64],
    order: usize,
    basis: &Arc<FockBasis>,
) -> Result<ExpansionFit> {
    if hs.len() < 2 {
        return Err(Error::InvalidInput("a fit needs at least two h values".into()));
    }
    let mut hs = hs.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let mut z_num: Vec<c64> = Vec::with_capacity(hs.len());
    let mut pred = Vec::with_capacity(hs.len());
    for (i, &h) in hs.iter().enumerate() {
        let p = expansion.predict(h, order);
        let center = if i == 0 { p } else { z_num[i - 1] * (h / hs[i - 1]) };
        let op = assemble_scaled(jet, h, basis)?;
        let found = eigen_near(&op, center, h / 2.0)?;
        match found.len() {
            0 => {
                return Err(Error::numerical(format!(
                    "no eigenvalue within h/2 of {center} at h = {h}"
                )))
            }
            1 => z_num.push(found[0]),
            _ => {
                return Err(Error::TrackingAmbiguity {
                    h,
                    candidates: found.iter().map(|z| (z.re, z.im)).collect(),
                })
            }
        }
        pred.push(p);
    }
    let residual: Vec<f64> = z_num.iter().zip(&pred).map(|(a, b)| (a - b).norm()).collect();
    let at_round_off = residual.iter().zip(&hs).all(|(r, h)| *r <= ROUND_OFF * h);
    let mut monotone_from = None;
    for start in 0..hs.len() {
        if residual[start..].windows(2).all(|w| w[1] < w[0]) {
            monotone_from = Some(hs[start]);
            break;
        }
    }
    Ok(ExpansionFit {
        fitted_slope: slope(&hs, &residual),
        expected_slope: 1.0 + (order as f64 + 1.0) / 2.0,
        order,
        z_num_re: z_num.iter().map(|z| z.re).collect(),
        z_num_im: z_num.iter().map(|z| z.im).collect(),
        predicted_re: pred.iter().map(|z| z.re).collect(),
        predicted_im: pred.iter().map(|z| z.im).collect(),
        residual,
        at_round_off,
        monotone_from,
        h: hs,
    })
}
