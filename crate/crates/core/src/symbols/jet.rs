//! Taylor jets of the full symbol at the doubly characteristic point and the
//! derived family of symbols `a_0 … a_{2N0+2}`.

use super::PhasePolynomial;
use crate::error::Assumption;
use crate::quadratic::QuadraticForm;
use crate::{c64, Error, Result};

/// Tolerance below which low-order Taylor coefficients of `p0` count as zero.
const CHARACTERISTIC_TOL: f64 = 1e-12;

/// Taylor data `p_j^(gamma)(0)/gamma!` for `0 <= j <= 1 + floor(N0/2)` and
/// `|gamma| <= N0 + 2`, stored as one polynomial per `j`.
#[derive(Debug, Clone)]
pub struct SymbolJet {
    dim: usize,
    n0: usize,
    taylor: Vec<PhasePolynomial>,
    dropped_terms: usize,
}

impl SymbolJet {
    /// Build a jet from the Taylor polynomials of `p_0, p_1, …`. Terms outside
    /// the admissible range are discarded (see [`Self::dropped_terms`]).
    pub fn new(dim: usize, n0: usize, polys: Vec<PhasePolynomial>) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::InvalidInput("N0 must be a positive integer".into()));
        }
        if polys.is_empty() {
            return Err(Error::InvalidInput("the jet needs at least p_0".into()));
        }
        for p in &polys {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        let max_j = Self::max_order(n0);
        let max_deg = (n0 + 2) as u32;
        let mut dropped = 0;
        let mut taylor = Vec::with_capacity(max_j + 1);
        for (j, p) in polys.into_iter().enumerate() {
            let kept = if j <= max_j { p.truncate(max_deg) } else { PhasePolynomial::zero(dim) };
            dropped += p.num_terms() - kept.num_terms();
            if j <= max_j {
                taylor.push(kept);
            }
        }
        taylor.resize(max_j + 1, PhasePolynomial::zero(dim));

        let low = taylor[0].filter(|a| a.degree() <= 1);
        if low.coeff_norm() > CHARACTERISTIC_TOL {
            return Err(Error::AssumptionViolated {
                assumption: Assumption::DoubleCharacteristic,
                detail: format!("p0 has nonzero terms of degree <= 1: {:?}", low),
            });
        }
        let q = QuadraticForm::from_polynomial(&taylor[0].homogeneous_part(2))?;
        let (min_re, witness) = q.min_real_part_on_sphere();
        if min_re < -crate::quadratic::NONNEG_TOL {
            return Err(Error::AssumptionViolated {
                assumption: Assumption::Nonnegativity,
                detail: format!("Re q = {min_re:e} at {witness:?}"),
            });
        }
        Ok(SymbolJet {
            dim,
            n0,
            taylor,
            dropped_terms: dropped,
        })
    }

    /// Largest `j` retained: `1 + floor(N0/2)`.
    pub fn max_order(n0: usize) -> usize {
        1 + n0 / 2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Taylor polynomial of `p_j` (zero beyond the retained range).
    pub fn p(&self, j: usize) -> PhasePolynomial {
        self.taylor.get(j).cloned().unwrap_or_else(|| PhasePolynomial::zero(self.dim))
    }

    pub fn orders(&self) -> &[PhasePolynomial] {
        &self.taylor
    }

    /// Quadratic part `q` of `p0`.
    pub fn quadratic_part(&self) -> PhasePolynomial {
        self.taylor[0].homogeneous_part(2)
    }

    pub fn quadratic_form(&self) -> QuadraticForm {
        QuadraticForm::from_polynomial(&self.quadratic_part()).expect("validated on construction")
    }

    /// `p_1(0)`, the subprincipal symbol at the origin.
    pub fn subprincipal_at_zero(&self) -> c64 {
        self.p(1).coefficient(&super::MultiIndex::zero(self.dim))
    }

    /// Available Taylor part of `p0` minus its quadratic part.
    pub fn remainder(&self) -> PhasePolynomial {
        self.taylor[0].filter(|a| a.degree() >= 3)
    }

    pub fn dropped_terms(&self) -> usize {
        self.dropped_terms
    }
}

/// Coefficients `z_0 … z_{2N0+2}` of the spectral parameter
/// `z(h) = sum_k z_k h^{k/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralParameter {
    n0: usize,
    z: Vec<c64>,
}

impl SpectralParameter {
    /// `tail` lists `z_1, z_2, …`; missing entries are zero.
    pub fn new(n0: usize, z0: c64, tail: &[c64]) -> Result<Self> {
        let len = 2 * n0 + 3;
        if tail.len() > len - 1 {
            return Err(Error::InvalidInput(format!(
                "spectral parameter tail has {} entries, at most {} allowed",
                tail.len(),
                len - 1
            )));
        }
        let mut z = Vec::with_capacity(len);
        z.push(z0);
        z.extend_from_slice(tail);
        z.resize(len, c64::new(0.0, 0.0));
        Ok(SpectralParameter { n0, z })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn z(&self, k: usize) -> c64 {
        self.z[k]
    }

    pub fn coefficients(&self) -> &[c64] {
        &self.z
    }

    pub fn with_tail(&self, tail: &[c64]) -> Result<Self> {
        SpectralParameter::new(self.n0, self.z[0], tail)
    }

    /// `sum_k z_k h^{k/2}`.
    pub fn eval(&self, h: f64) -> c64 {
        self.z
            .iter()
            .enumerate()
            .map(|(k, z)| z * h.powf(k as f64 / 2.0))
            .sum()
    }
}

/// The symbols `a_k = ã_k - z_k`, `0 <= k <= 2N0+2`.
#[derive(Debug, Clone)]
pub struct AkFamily {
    n0: usize,
    tilde: Vec<PhasePolynomial>,
    z: Vec<c64>,
}

impl AkFamily {
    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn dim(&self) -> usize {
        self.tilde[0].dim()
    }

    /// Number of symbols, `2N0 + 3`.
    pub fn len(&self) -> usize {
        self.tilde.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tilde.is_empty()
    }

    /// The z-free part `ã_k`.
    pub fn tilde(&self, k: usize) -> &PhasePolynomial {
        &self.tilde[k]
    }

    pub fn z(&self, k: usize) -> c64 {
        self.z[k]
    }

    pub fn z_coefficients(&self) -> &[c64] {
        &self.z
    }

    pub fn a(&self, k: usize) -> PhasePolynomial {
        let shift = PhasePolynomial::constant(self.dim(), -self.z[k]);
        &self.tilde[k] + &shift
    }

    /// Same `ã_k` with a different spectral parameter tail.
    pub fn with_z(&self, z: &[c64]) -> Result<Self> {
        if z.len() != self.z.len() {
            return Err(Error::DimensionMismatch {
                expected: self.z.len(),
                found: z.len(),
            });
        }
        Ok(AkFamily {
            n0: self.n0,
            tilde: self.tilde.clone(),
            z: z.to_vec(),
        })
    }

    /// Largest degree among `a_1 … a_{2N0+2}`.
    pub fn max_degree(&self) -> u32 {
        self.tilde.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }
}

/// Collect `p_j^(alpha)(0)/alpha! X^alpha` over `j + |alpha|/2 = 1 + k/2`,
/// `0 <= j <= 1 + floor(N0/2)`, `|alpha| <= N0 + 2`.
pub fn build_ak_family(jet: &SymbolJet, zp: &SpectralParameter) -> Result<AkFamily> {
    if jet.n0() != zp.n0() {
        return Err(Error::InvalidInput(format!(
            "jet has N0 = {} but the spectral parameter has N0 = {}",
            jet.n0(),
            zp.n0()
        )));
    }
    let n0 = jet.n0();
    let max_j = SymbolJet::max_order(n0);
    let max_deg = n0 + 2;
    let mut tilde = Vec::with_capacity(2 * n0 + 3);
    for k in 0..=2 * n0 + 2 {
        let mut ak = PhasePolynomial::zero(jet.dim());
        // |alpha| = 2 + k - 2j
        for j in 0..=max_j {
            if 2 * j > 2 + k {
                break;
            }
            let deg = 2 + k - 2 * j;
            if deg > max_deg {
                continue;
            }
            ak = &ak + &jet.p(j).homogeneous_part(deg as u32);
        }
        tilde.push(ak);
    }
    Ok(AkFamily {
        n0,
        tilde,
        z: zp.coefficients().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::MultiIndex;

    fn poly(terms: &[(&[u32], f64)]) -> PhasePolynomial {
        PhasePolynomial::from_terms(
            terms[0].0.len() / 2,
            terms.iter().map(|(a, c)| (MultiIndex::new(a.to_vec()), c64::new(*c, 0.0))),
        )
        .unwrap()
    }

    fn one() -> c64 {
        c64::new(1.0, 0.0)
    }

    #[test]
    fn cubic_family_bookkeeping() {
        let p0 = poly(&[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[3, 0], 1.0)]);
        let jet = SymbolJet::new(1, 2, vec![p0]).unwrap();
        let zp = SpectralParameter::new(2, one(), &[]).unwrap();
        let fam = build_ak_family(&jet, &zp).unwrap();
        assert_eq!(fam.len(), 7);
        let a0 = poly(&[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -1.0)]);
        assert_eq!(fam.a(0), a0);
        assert_eq!(fam.a(1), poly(&[(&[3, 0], 1.0)]));
        for k in 2..7 {
            assert!(fam.a(k).is_zero(), "a_{k} should vanish");
        }
    }

    #[test]
    fn subprincipal_constant_shifts_a0() {
        let p0 = poly(&[(&[2, 0], 1.0), (&[0, 2], 1.0)]);
        let p1 = PhasePolynomial::constant(1, c64::new(0.3, -0.2));
        let jet = SymbolJet::new(1, 1, vec![p0.clone(), p1]).unwrap();
        let zp = SpectralParameter::new(1, c64::new(1.3, -0.2), &[]).unwrap();
        let fam = build_ak_family(&jet, &zp).unwrap();
        // a_0 - (p_1(0) - z_0) = q
        let shift = PhasePolynomial::constant(1, jet.subprincipal_at_zero() - zp.z(0));
        assert!(fam.a(0).coeff_distance(&(&p0 + &shift)) < 1e-15);
        assert!(fam.tilde(0).coeff_distance(&(&p0 + &PhasePolynomial::constant(1, c64::new(0.3, -0.2)))) < 1e-15);
    }

    #[test]
    fn quartic_lands_in_a2() {
        let p0 = poly(&[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[4, 0], 1.0)]);
        let jet = SymbolJet::new(1, 2, vec![p0]).unwrap();
        let zp = SpectralParameter::new(2, one(), &[]).unwrap();
        let fam = build_ak_family(&jet, &zp).unwrap();
        assert!(fam.a(1).is_zero());
        assert_eq!(fam.a(2), poly(&[(&[4, 0], 1.0)]));
    }

    #[test]
    fn literal_constraints_can_leave_empty_sums() {
        // N0 = 1 keeps |alpha| <= 3 and j <= 1, so a quartic term is dropped
        // and a_2 only sees the quadratic part of p_1.
        let p0 = poly(&[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[4, 0], 1.0)]);
        let p1 = poly(&[(&[1, 1], 2.0)]);
        let jet = SymbolJet::new(1, 1, vec![p0, p1]).unwrap();
        assert_eq!(jet.dropped_terms(), 1);
        let zp = SpectralParameter::new(1, one(), &[c64::new(0.0, 0.0), c64::new(0.5, 0.0)]).unwrap();
        let fam = build_ak_family(&jet, &zp).unwrap();
        assert_eq!(fam.tilde(2), &poly(&[(&[1, 1], 2.0)]));
        assert_eq!(fam.a(2).coefficient(&MultiIndex::zero(1)), c64::new(-0.5, 0.0));
        assert!(fam.tilde(3).is_zero() && fam.tilde(4).is_zero());
    }

    #[test]
    fn rejects_non_characteristic_origin() {
        let p0 = poly(&[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[1, 0], 0.1)]);
        let err = SymbolJet::new(1, 1, vec![p0]).unwrap_err();
        assert!(matches!(
            err,
            Error::AssumptionViolated { assumption: Assumption::DoubleCharacteristic, .. }
        ));
    }

    #[test]
    fn rejects_negative_real_part() {
        let p0 = poly(&[(&[2, 0], 1.0), (&[0, 2], -1.0)]);
        let err = SymbolJet::new(1, 1, vec![p0]).unwrap_err();
        assert!(matches!(
            err,
            Error::AssumptionViolated { assumption: Assumption::Nonnegativity, .. }
        ));
    }

    #[test]
    fn mismatched_n0_is_rejected() {
        let p0 = poly(&[(&[2, 0], 1.0), (&[0, 2], 1.0)]);
        let jet = SymbolJet::new(1, 1, vec![p0]).unwrap();
        let zp = SpectralParameter::new(2, one(), &[]).unwrap();
        assert!(build_ak_family(&jet, &zp).is_err());
    }
}
