#![allow(dead_code)]

use std::sync::Arc;

use faer::Mat;
use grushin_core::c64;
use grushin_core::fock::FockBasis;
use grushin_core::symbols::{MultiIndex, PhasePolynomial};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

pub fn poly(dim: usize, terms: &[(&[u32], c64)]) -> PhasePolynomial {
    PhasePolynomial::from_terms(dim, terms.iter().map(|(a, c)| (MultiIndex::new(a.to_vec()), *c))).unwrap()
}

/// `xi^2 + e^{i theta} x^2 + extra` in one dimension.
pub fn rotated(theta: f64, extra: &[(&[u32], c64)]) -> PhasePolynomial {
    let mut terms: Vec<(&[u32], c64)> = vec![(&[2, 0], c64::from_polar(1.0, theta)), (&[0, 2], re(1.0))];
    terms.extend_from_slice(extra);
    poly(1, &terms)
}

/// Random polynomial in `2 dim` variables with at most `terms` monomials of
/// degree `<= max_deg` and coefficients in the unit square.
pub fn random_poly(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32, terms: usize) -> PhasePolynomial {
    let mut p = PhasePolynomial::zero(dim);
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_deg);
        let mut e = vec![0u32; 2 * dim];
        for _ in 0..deg {
            e[rng.gen_range(0..2 * dim)] += 1;
        }
        let c = c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        p = &p + &PhasePolynomial::monomial(MultiIndex::new(e), c);
    }
    p
}

/// Position and momentum matrices from ladder operators,
/// `X = (a + a^+)/sqrt 2`, `D = (a - a^+)/(i sqrt 2)`.
pub fn ladder_xd(basis: &Arc<FockBasis>, j: usize) -> (Mat<c64>, Mat<c64>) {
    let a = basis.ladder(j, false);
    let ad = basis.ladder(j, true);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = Mat::from_fn(a.nrows(), a.ncols(), |r, c| (a[(r, c)] + ad[(r, c)]) * s);
    let d = Mat::from_fn(a.nrows(), a.ncols(), |r, c| (a[(r, c)] - ad[(r, c)]) * c64::new(0.0, -s));
    (x, d)
}

pub fn mat_pow(m: &Mat<c64>, k: u32) -> Mat<c64> {
    let mut out = Mat::<c64>::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Second-order sum over states for the ground level of `x^2 + xi^2 + V`:
/// `<0|V|0> - sum_{k > 0} |<k|V|0>|^2 / (2k)`, with `V` given as a matrix.
pub fn rs_second_order(v: &Mat<c64>) -> (c64, c64) {
    let first = v[(0, 0)];
    let mut second = c64::new(0.0, 0.0);
    for k in 1..v.nrows() {
        second -= v[(k, 0)] * v[(0, k)] / (2.0 * k as f64);
    }
    (first, second)
}

pub fn max_abs(m: &Mat<c64>) -> f64 {
    let mut out: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}
