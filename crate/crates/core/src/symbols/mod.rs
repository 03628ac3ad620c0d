//! Polynomial symbols on the phase space `R^{2n}`.
//!
//! A [`PhasePolynomial`] stores a finite map from exponent vectors
//! `(alpha_x, alpha_xi)` to coefficients, kept in canonical form (no
//! negligible coefficients) and ordered graded-lexicographically so that
//! iteration and serialization are deterministic.

mod coeff;
mod jet;
mod literal;
mod star;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub use coeff::{exact, ExactComplex, SymbolCoeff};
pub use jet::{build_ak_family, AkFamily, SpectralParameter, SymbolJet};
pub use literal::SymbolTerm;
pub use star::{poisson_bracket, star};

use crate::{c64, Error, Result};

/// Exponent vector of a phase-space monomial: first `n` entries act on `x`,
/// last `n` on `xi`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; 2 * n])
    }

    /// Unit exponent for phase-space coordinate `k` (`k < n` is `x_k`,
    /// `k >= n` is `xi_{k-n}`).
    pub fn unit(n: usize, k: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[k] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.0.len() / 2
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn x_part(&self) -> &[u32] {
        &self.0[..self.dim()]
    }

    pub fn xi_part(&self) -> &[u32] {
        &self.0[self.dim()..]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Lower entry `k` by one, returning the old exponent as the derivative
    /// weight, or `None` when the monomial does not depend on that variable.
    pub(crate) fn differentiate(&self, k: usize) -> Option<(u32, MultiIndex)> {
        let e = self.0[k];
        if e == 0 {
            return None;
        }
        let mut out = self.0.clone();
        out[k] -= 1;
        Some((e, MultiIndex(out)))
    }

    /// `gamma!` for the multi-index.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Parity of a symbol under `X -> -X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Polynomial in the `2n` phase-space variables with coefficients in `C`.
#[derive(Clone, PartialEq)]
pub struct PhasePolynomial<C = c64> {
    dim: usize,
    terms: BTreeMap<MultiIndex, C>,
}

/// Symbol with exact rational-complex coefficients.
pub type ExactPolynomial = PhasePolynomial<ExactComplex>;

impl<C: SymbolCoeff> PhasePolynomial<C> {
    pub fn zero(dim: usize) -> Self {
        PhasePolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn monomial(alpha: MultiIndex, c: C) -> Self {
        let mut p = Self::zero(alpha.dim());
        p.add_term(alpha, c);
        p
    }

    /// The coordinate function `x_j`.
    pub fn x(dim: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, j), C::one())
    }

    /// The coordinate function `xi_j`.
    pub fn xi(dim: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, dim + j), C::one())
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (MultiIndex, C)>,
    ) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (alpha, c) in terms {
            if alpha.len() != 2 * dim {
                return Err(Error::DimensionMismatch {
                    expected: 2 * dim,
                    found: alpha.len(),
                });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    /// Accumulate `c X^alpha`, keeping canonical form.
    pub fn add_term(&mut self, alpha: MultiIndex, c: C) {
        debug_assert_eq!(alpha.len(), 2 * self.dim);
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().clone() + c;
                if v.is_negligible() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_negligible() {
                    v.insert(c);
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> C {
        self.terms.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// Lowest degree present, `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).min()
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        self.filter(|alpha| alpha.degree() == degree)
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        self.filter(|alpha| alpha.degree() <= max_degree)
    }

    pub fn filter(&self, keep: impl Fn(&MultiIndex) -> bool) -> Self {
        PhasePolynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| keep(a))
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.clone() * s.clone());
        }
        out
    }

    /// Complex conjugate symbol.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.conj());
        }
        out
    }

    pub fn parity(&self) -> Parity {
        let even = self.terms.keys().all(|a| a.degree() % 2 == 0);
        let odd = self.terms.keys().all(|a| a.degree() % 2 == 1);
        match (even, odd) {
            (true, _) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    /// Derivative with respect to phase-space coordinate `k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            if let Some((e, lowered)) = a.differentiate(k) {
                out.add_term(lowered, c.clone() * C::from_ratio(i64::from(e), 1));
            }
        }
        out
    }

    pub fn to_c64(&self) -> PhasePolynomial<c64> {
        let mut out = PhasePolynomial::zero(self.dim);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.to_c64());
        }
        out
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Pointwise product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }
}

impl PhasePolynomial<c64> {
    /// Largest coefficient modulus; a norm on the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |a_gamma - b_gamma|` over all monomials.
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (a, c) in &self.terms {
            d = d.max((c - other.coefficient(a)).norm());
        }
        for (a, c) in &other.terms {
            if !self.terms.contains_key(a) {
                d = d.max(c.norm());
            }
        }
        d
    }

    /// Evaluate at a complex phase-space point of length `2n`.
    ///
    /// Powers of each coordinate are tabulated once, so the cost is linear in
    /// the number of terms.
    pub fn eval(&self, point: &[c64]) -> Result<c64> {
        if point.len() != 2 * self.dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.dim,
                found: point.len(),
            });
        }
        let max_deg = self.degree().unwrap_or(0) as usize;
        let powers: Vec<Vec<c64>> = point
            .iter()
            .map(|&v| {
                let mut row = Vec::with_capacity(max_deg + 1);
                let mut acc = c64::new(1.0, 0.0);
                for _ in 0..=max_deg {
                    row.push(acc);
                    acc *= v;
                }
                row
            })
            .collect();
        let mut sum = c64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut m = *c;
            for (k, &e) in alpha.exponents().iter().enumerate() {
                if e > 0 {
                    m *= powers[k][e as usize];
                }
            }
            sum += m;
        }
        Ok(sum)
    }

    pub fn eval_real(&self, point: &[f64]) -> Result<c64> {
        let p: Vec<c64> = point.iter().map(|&v| c64::new(v, 0.0)).collect();
        self.eval(&p)
    }

    /// `X -> s X`: every monomial of degree `g` is multiplied by `s^g`.
    pub fn dilate(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c * s.powi(a.degree() as i32));
        }
        out
    }
}

impl<C: SymbolCoeff> fmt::Debug for PhasePolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "PhasePolynomial(n={}; ", self.dim)?;
        for (a, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}·X^{:?}", c, a)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl<C: SymbolCoeff> std::ops::$trait<&PhasePolynomial<C>> for &PhasePolynomial<C> {
            type Output = PhasePolynomial<C>;
            fn $method(self, rhs: &PhasePolynomial<C>) -> PhasePolynomial<C> {
                self.$call(rhs).expect("phase polynomials of different dimension")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
