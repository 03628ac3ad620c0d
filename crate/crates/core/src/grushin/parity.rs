use serde::Serialize;

use super::GrushinSystem;
use crate::fock::FockVector;
use crate::linalg::max_abs;
use crate::symbols::Parity;

/// Relative mass on the wrong parity still counted as zero.
pub const PARITY_TOL: f64 = 1e-10;

/// Parity of a Fock vector under `x -> -x` (the parity of `|nu|`).
pub fn vector_parity(v: &FockVector) -> Parity {
    let (mut even, mut odd) = (0.0, 0.0);
    for (i, z) in v.data().iter().enumerate() {
        if v.basis().level(i).is_multiple_of(2) {
            even += z.norm_sqr();
        } else {
            odd += z.norm_sqr();
        }
    }
    let total = even + odd;
    if total > 0.0 && odd <= PARITY_TOL * PARITY_TOL * total {
        Parity::Even
    } else if total > 0.0 && even <= PARITY_TOL * PARITY_TOL * total {
        Parity::Odd
    } else {
        Parity::Mixed
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityReport {
    pub applicable: bool,
    pub reason: Option<String>,
    pub same_parity: Option<bool>,
    /// Orders `j` whose `A_j` must vanish.
    pub vanishing_orders: Vec<usize>,
    pub max_vanishing_norm: f64,
    /// Largest wrong-parity component of `S` applied to low basis states.
    pub s_parity_leak: f64,
    pub holds: bool,
}

/// Check the parity selection rule: with all odd-index `z_k` zero, `A_j`
/// vanishes for odd `j` when every kernel vector shares one parity and for
/// even `j` when `V1` and `V2` have opposite parities.
pub fn parity_audit(sys: &GrushinSystem) -> ParityReport {
    let not_applicable = |reason: String| ParityReport {
        applicable: false,
        reason: Some(reason),
        same_parity: None,
        vanishing_orders: Vec::new(),
        max_vanishing_norm: 0.0,
        s_parity_leak: 0.0,
        holds: false,
    };
    if let Some(k) = (1..sys.z().len()).step_by(2).find(|&k| sys.z()[k].norm() > 0.0) {
        return not_applicable(format!("z_{k} is nonzero"));
    }
    let phis: Vec<_> = sys.phi().iter().map(vector_parity).collect();
    let psis: Vec<_> = sys.psi().iter().map(vector_parity).collect();
    let uniform = |ps: &[Parity]| -> Option<Parity> {
        let first = *ps.first()?;
        (first != Parity::Mixed && ps.iter().all(|p| *p == first)).then_some(first)
    };
    let (Some(p1), Some(p2)) = (uniform(&phis), uniform(&psis)) else {
        return not_applicable("kernel vectors have mixed parity".into());
    };
    let same = p1 == p2;
    let vanishing_orders: Vec<usize> = (1..=sys.orders())
        .filter(|j| if same { j % 2 == 1 } else { j % 2 == 0 })
        .collect();
    let max_vanishing_norm = vanishing_orders
        .iter()
        .map(|&j| max_abs(sys.a_matrix(j).as_ref()))
        .fold(0.0, f64::max);

    let basis = sys.basis();
    let s = &sys.reduced_inverse().matrix;
    let mut leak: f64 = 0.0;
    for i in 0..basis.block_size(3) {
        let level = basis.level(i);
        for r in 0..basis.size() {
            if (basis.level(r) + level) % 2 == 1 {
                leak = leak.max(s[(r, i)].norm());
            }
        }
    }
    let scale = max_abs(s.as_ref()).max(1.0);
    ParityReport {
        applicable: true,
        reason: None,
        same_parity: Some(same),
        vanishing_orders,
        max_vanishing_norm,
        s_parity_leak: leak,
        holds: max_vanishing_norm < PARITY_TOL * 1e2 && leak < PARITY_TOL * scale,
    }
}
