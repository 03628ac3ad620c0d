//! Moyal product of polynomial symbols.
//!
//! For polynomials the composition formula is a finite sum
//!
//! ```text
//! a # b = sum_p (1/p!) ((1/2i) sigma(d_X1, d_X2))^p a(X1) b(X2) |_{X1 = X2 = X}
//! ```
//!
//! with `sigma((x, xi), (y, eta)) = xi·y - x·eta`. The bidifferential operator is
//! applied to the tensor product `a ⊗ b` directly, so the result is exact in
//! whatever coefficient field the polynomials use.

use std::collections::BTreeMap;

use super::{MultiIndex, PhasePolynomial, SymbolCoeff};
use crate::{Error, Result};

type Tensor<C> = BTreeMap<(MultiIndex, MultiIndex), C>;

fn accumulate<C: SymbolCoeff>(t: &mut Tensor<C>, key: (MultiIndex, MultiIndex), c: C) {
    let v = match t.remove(&key) {
        Some(old) => old + c,
        None => c,
    };
    if !v.is_negligible() {
        t.insert(key, v);
    }
}

/// One application of `sigma(d_X1, d_X2) = sum_j (d_{xi_j}^1 d_{x_j}^2 - d_{x_j}^1 d_{xi_j}^2)`.
fn apply_sigma<C: SymbolCoeff>(t: &Tensor<C>, n: usize) -> Tensor<C> {
    let mut out = Tensor::new();
    for ((a1, a2), c) in t {
        for j in 0..n {
            if let (Some((e1, l1)), Some((e2, l2))) = (a1.differentiate(n + j), a2.differentiate(j)) {
                let w = C::from_ratio(i64::from(e1 * e2), 1);
                accumulate(&mut out, (l1, l2), c.clone() * w);
            }
            if let (Some((e1, l1)), Some((e2, l2))) = (a1.differentiate(j), a2.differentiate(n + j)) {
                let w = C::from_ratio(-i64::from(e1 * e2), 1);
                accumulate(&mut out, (l1, l2), c.clone() * w);
            }
        }
    }
    out
}

/// Weyl symbol of `Op(a) Op(b)`.
pub fn star<C: SymbolCoeff>(a: &PhasePolynomial<C>, b: &PhasePolynomial<C>) -> Result<PhasePolynomial<C>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let mut tensor: Tensor<C> = Tensor::new();
    for (alpha, ca) in a.terms() {
        for (beta, cb) in b.terms() {
            accumulate(&mut tensor, (alpha.clone(), beta.clone()), ca.clone() * cb.clone());
        }
    }
    let mut out = PhasePolynomial::zero(n);
    let mut p: i64 = 0;
    while !tensor.is_empty() {
        for ((a1, a2), c) in &tensor {
            out.add_term(a1.add(a2), c.clone());
        }
        p += 1;
        // 1/(2i p) = -i/(2p)
        let factor = C::imag_unit() * C::from_ratio(-1, 2 * p);
        tensor = apply_sigma(&tensor, n)
            .into_iter()
            .map(|(k, c)| (k, c * factor.clone()))
            .collect();
    }
    Ok(out)
}

/// `{a, b} = sum_j (d_{xi_j} a d_{x_j} b - d_{x_j} a d_{xi_j} b)`, the bracket
/// for which `a # b - b # a = -i {a, b}` when `a` is at most quadratic.
pub fn poisson_bracket<C: SymbolCoeff>(
    a: &PhasePolynomial<C>,
    b: &PhasePolynomial<C>,
) -> Result<PhasePolynomial<C>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let mut out = PhasePolynomial::zero(n);
    for j in 0..n {
        let t1 = a.derivative(n + j).try_mul(&b.derivative(j))?;
        let t2 = a.derivative(j).try_mul(&b.derivative(n + j))?;
        out = out.try_add(&t1)?.try_sub(&t2)?;
    }
    Ok(out)
}
