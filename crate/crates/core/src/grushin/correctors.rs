use faer::Mat;

use super::GrushinSystem;
use crate::fock::{apply_chain, FockOperator, FockVector};
use crate::{c64, Error, Result};

/// Every ordered tuple of positive integers summing to `j`, in
/// lexicographic order. There are `2^{j-1}` of them.
pub fn compositions(j: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in 1..=rest {
            prefix.push(k);
            rec(rest - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if j > 0 {
        rec(j, &mut Vec::new(), &mut out);
    }
    out
}

fn check_trust(v: &FockVector) -> Result<()> {
    let required = v.basis().n_cut() as i64;
    if v.trusted_degree() < required {
        return Err(Error::TrustExhausted {
            trusted: v.trusted_degree(),
            required,
        });
    }
    Ok(())
}

fn apply_one(op: &FockOperator, v: &FockVector) -> Result<FockVector> {
    apply_chain(&[op], v)
}

/// Fill `phi^+`, `psi^-` and `A_1 … A_{2N0+2}` by the order-by-order
/// recursion:
///
/// * `A_j[k, l] = -(w_{j,l}, psi_k)` with `w_{j,l} = sum_{k1 >= 1} a_{k1} phi^+_{j-k1,l}`,
/// * `phi^+_{j,l} = -S w_{j,l}`,
/// * `psi^-_{j,l} = -S* sum_{k1 >= 1} a_{k1}* psi^-_{j-k1,l}`.
pub(super) fn build_correctors(sys: &mut GrushinSystem) -> Result<()> {
    let d = sys.d();
    let orders = sys.orders();
    let s = &sys.s.matrix;
    let s_adj = s.adjoint().to_owned();
    let adj_ops: Vec<FockOperator> = sys.a_ops.iter().map(|a| a.adjoint()).collect();

    let mut phi_plus: Vec<Vec<FockVector>> = vec![sys.kernels.phi.clone()];
    let mut psi_minus: Vec<Vec<FockVector>> = vec![sys.kernels.psi.clone()];
    let mut a_mats = Vec::with_capacity(orders);
    for j in 1..=orders {
        let mut a_j = Mat::<c64>::zeros(d, d);
        let mut plus_j = Vec::with_capacity(d);
        let mut minus_j = Vec::with_capacity(d);
        for l in 0..d {
            let mut w = FockVector::zeros(&sys.basis);
            let mut u = FockVector::zeros(&sys.basis);
            for k1 in 1..=j {
                w = w.add(&apply_one(&sys.a_ops[k1], &phi_plus[j - k1][l])?)?;
                u = u.add(&apply_one(&adj_ops[k1], &psi_minus[j - k1][l])?)?;
            }
            check_trust(&w)?;
            check_trust(&u)?;
            for k in 0..d {
                a_j[(k, l)] = -w.inner(&sys.kernels.psi[k]);
            }
            plus_j.push(w.apply_matrix(s.as_ref()).scale(c64::new(-1.0, 0.0)));
            minus_j.push(u.apply_matrix(s_adj.as_ref()).scale(c64::new(-1.0, 0.0)));
        }
        a_mats.push(a_j);
        phi_plus.push(plus_j);
        psi_minus.push(minus_j);
    }
    sys.phi_plus = phi_plus;
    sys.psi_minus = psi_minus;
    sys.a_mats = a_mats;
    Ok(())
}

/// `A_j` from the closed form
/// `sum_i (-1)^i sum_{k_1+…+k_i = j} (a_{k_1} S a_{k_2} S … S a_{k_i} phi_l, psi_k)`,
/// one operator chain per composition.
pub fn effective_direct(sys: &GrushinSystem, j: usize) -> Result<Mat<c64>> {
    if j == 0 || j > sys.orders() {
        return Err(Error::InvalidInput(format!(
            "order {j} is outside 1..={}",
            sys.orders()
        )));
    }
    let d = sys.d();
    let s_op = sys.s.as_operator(sys.q());
    let mut out = Mat::<c64>::zeros(d, d);
    for comp in compositions(j) {
        let sign = if comp.len() % 2 == 0 { 1.0 } else { -1.0 };
        let mut chain: Vec<&FockOperator> = Vec::with_capacity(2 * comp.len());
        for (p, &k) in comp.iter().enumerate() {
            if p > 0 {
                chain.push(&s_op);
            }
            chain.push(&sys.a_ops[k]);
        }
        for l in 0..d {
            let v = apply_chain(&chain, &sys.kernels.phi[l])?;
            check_trust(&v)?;
            for k in 0..d {
                out[(k, l)] += v.inner(&sys.kernels.psi[k]) * sign;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn composition_counts() {
        assert!(compositions(0).is_empty());
        assert_eq!(compositions(1), vec![vec![1]]);
        assert_eq!(compositions(3).len(), 4);
        assert_eq!(compositions(4).len(), 8);
        for c in compositions(5) {
            assert_eq!(c.iter().sum::<usize>(), 5);
        }
    }

    #[test]
    fn recursion_matches_closed_form_for_cubic() {
        let sys = oscillator_system(&[(&[3, 0], re(1.0))], 2, 24);
        for j in 1..=sys.orders() {
            let direct = effective_direct(&sys, j).unwrap();
            let diff = max_abs((direct - sys.a_matrix(j)).as_ref());
            assert!(diff < 1e-12, "order {j}: {diff}");
        }
    }

    #[test]
    fn adjoint_correctors_reproduce_a() {
        // conj(A_j[l, k]) = -sum (a_{k1}* psi^-_{j-k1,l}, phi_k)
        let sys = oscillator_system(&[(&[3, 0], re(1.0)), (&[1, 2], c64::new(0.0, 0.5))], 2, 24);
        for j in 1..=sys.orders() {
            let mut acc = c64::new(0.0, 0.0);
            for k1 in 1..=j {
                let v = apply_chain(&[&sys.a_op(k1).adjoint()], sys.psi_minus(j - k1, 0)).unwrap();
                acc -= v.inner(&sys.phi()[0]);
            }
            assert!((acc.conj() - sys.a_matrix(j)[(0, 0)]).norm() < 1e-12, "order {j}");
        }
    }

    #[test]
    fn guard_too_small_is_reported() {
        let jet = crate::symbols::SymbolJet::new(
            1,
            2,
            vec![poly(1, &[(&[2, 0], re(1.0)), (&[0, 2], re(1.0)), (&[3, 0], re(1.0))])],
        )
        .unwrap();
        let zp = crate::symbols::SpectralParameter::new(2, re(1.0), &[]).unwrap();
        let fam = crate::symbols::build_ak_family(&jet, &zp).unwrap();
        let basis = crate::fock::FockBasis::new(1, 20, 6).unwrap();
        assert!(matches!(
            GrushinSystem::build(&fam, &basis, 1),
            Err(Error::TrustExhausted { .. })
        ));
    }
}
