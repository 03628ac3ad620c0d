use faer::Mat;
use serde::Serialize;

use super::{HamiltonMap, QuadraticForm, Sector, SingularSpace, RANK_TOL, SECTOR_SLACK};
use crate::{c64, Error, Result};

/// A selected eigenvalue `lambda` of the Hamilton map with `mu = -i lambda`
/// and algebraic multiplicity `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralMode {
    pub lambda: c64,
    pub mu: c64,
    pub multiplicity: usize,
}

/// Eigenvalue with its algebraic multiplicity.
type Cluster = (c64, usize);

/// Cluster eigenvalues of `F` that agree to `tol`, returning (mean, count).
fn cluster(ev: &[c64], tol: f64) -> Vec<Cluster> {
    let mut groups: Vec<Vec<c64>> = Vec::new();
    for &l in ev {
        match groups.iter_mut().find(|g| g.iter().any(|m| (m - l).norm() < tol)) {
            Some(g) => g.push(l),
            None => groups.push(vec![l]),
        }
    }
    groups
        .into_iter()
        .map(|g| (g.iter().sum::<c64>() / g.len() as f64, g.len()))
        .collect()
}

/// Eigenvalue clusters of `F` grouped into `(lambda, -lambda)` pairs.
fn paired_clusters(f: &HamiltonMap) -> Result<Vec<(Cluster, Cluster)>> {
    let ev = f.eigenvalues()?;
    let scale = ev.iter().map(|l| l.norm()).fold(1.0, f64::max);
    // defective eigenvalues split by ~sqrt(eps); cluster well above that
    let groups = cluster(&ev, 1e-5 * scale);
    let mut used = vec![false; groups.len()];
    let mut pairs = Vec::new();
    for i in 0..groups.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let partner = (0..groups.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (groups[a].0 + groups[i].0)
                    .norm()
                    .total_cmp(&(groups[b].0 + groups[i].0).norm())
            });
        match partner {
            Some(j) if (groups[j].0 + groups[i].0).norm() < 1e-5 * scale => {
                used[j] = true;
                pairs.push((groups[i], groups[j]));
            }
            _ => {
                // a self-paired cluster: lambda = 0 up to round-off
                if groups[i].0.norm() < 1e-5 * scale && groups[i].1.is_multiple_of(2) {
                    let half = (groups[i].0, groups[i].1 / 2);
                    pairs.push((half, half));
                } else {
                    return Err(Error::numerical(format!(
                        "eigenvalue {} of F has no partner -lambda",
                        groups[i].0
                    )));
                }
            }
        }
    }
    Ok(pairs)
}

fn mode(lambda: c64, multiplicity: usize) -> SpectralMode {
    SpectralMode {
        lambda,
        mu: c64::new(0.0, -1.0) * lambda,
        multiplicity,
    }
}

/// Elliptic selection: from each `±lambda` pair keep the one with
/// `-i lambda` in the sector `Sigma(q)`.
pub fn spectrum_modes(f: &HamiltonMap, sector: &Sector) -> Result<Vec<SpectralMode>> {
    let mut out = Vec::new();
    for ((l1, r1), (l2, r2)) in paired_clusters(f)? {
        let m1 = mode(l1, r1);
        let m2 = mode(l2, r2);
        let in1 = sector.contains(m1.mu, SECTOR_SLACK) && m1.mu.norm() > 0.0;
        let in2 = sector.contains(m2.mu, SECTOR_SLACK) && m2.mu.norm() > 0.0;
        match (in1, in2) {
            (true, false) => out.push(m1),
            (false, true) => out.push(m2),
            _ => {
                return Err(Error::AmbiguousSelection(format!(
                    "-i lambda = {} and {}: {} of the pair lie in the sector",
                    m1.mu,
                    m2.mu,
                    if in1 { "both" } else { "neither" }
                )))
            }
        }
    }
    sort_modes(&mut out);
    let total: usize = out.iter().map(|m| m.multiplicity).sum();
    if total != f.dim() {
        return Err(Error::numerical(format!(
            "selected multiplicities sum to {total}, expected {}",
            f.dim()
        )));
    }
    Ok(out)
}

/// Partially elliptic selection: keep `-i lambda` in `Re z > 0` or in
/// `Sigma(q|_S) \ {0}`. Supported only when `q|_S` is purely imaginary and
/// definite, so that `Sigma(q|_S)` is a closed imaginary half-axis.
pub fn spectrum_modes_partial(
    f: &HamiltonMap,
    q: &QuadraticForm,
    singular: &SingularSpace,
) -> Result<Vec<SpectralMode>> {
    let k = singular.basis.len();
    if k == 0 {
        return Err(Error::Unsupported(
            "q is not elliptic but its singular space is trivial".into(),
        ));
    }
    let qm = q.matrix();
    let n2 = 2 * q.dim();
    let restricted = Mat::<c64>::from_fn(k, k, |a, b| {
        let (u, v) = (&singular.basis[a], &singular.basis[b]);
        let mut s = c64::new(0.0, 0.0);
        for i in 0..n2 {
            for j in 0..n2 {
                s += qm[(i, j)] * (u[i] * v[j]);
            }
        }
        s
    });
    let scale = crate::linalg::max_abs(qm.as_ref()).max(1e-300);
    let re_max = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| restricted[(a, b)].re.abs())
        .fold(0.0, f64::max);
    if re_max > 1e3 * RANK_TOL * scale {
        return Err(Error::Unsupported(format!(
            "q restricted to S has a real part of size {re_max:e}"
        )));
    }
    let im = Mat::<f64>::from_fn(k, k, |a, b| restricted[(a, b)].im);
    let evs = im
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::numerical(format!("{e:?}")))?;
    let tol = 1e3 * RANK_TOL * scale;
    let sign = if evs.iter().all(|&e| e > tol) {
        1.0
    } else if evs.iter().all(|&e| e < -tol) {
        -1.0
    } else {
        return Err(Error::Unsupported(
            "q restricted to S is not definite (partial ellipticity fails)".into(),
        ));
    };
    let fscale = crate::linalg::max_abs(f.matrix().as_ref()).max(1.0);
    let admissible = |mu: c64| {
        mu.re > 1e-8 * fscale || (mu.re.abs() <= 1e-8 * fscale && sign * mu.im > 1e-8 * fscale)
    };
    let mut out = Vec::new();
    for ((l1, r1), (l2, r2)) in paired_clusters(f)? {
        let m1 = mode(l1, r1);
        let m2 = mode(l2, r2);
        match (admissible(m1.mu), admissible(m2.mu)) {
            (true, false) => out.push(m1),
            (false, true) => out.push(m2),
            (a, _) => {
                return Err(Error::AmbiguousSelection(format!(
                    "-i lambda = {} and {}: {} admissible",
                    m1.mu,
                    m2.mu,
                    if a { "both" } else { "neither" }
                )))
            }
        }
    }
    sort_modes(&mut out);
    Ok(out)
}

fn sort_modes(m: &mut [SpectralMode]) {
    m.sort_by(|a, b| {
        a.mu.norm()
            .total_cmp(&b.mu.norm())
            .then(a.mu.arg().total_cmp(&b.mu.arg()))
    });
}

/// A point `sum_l (r_l + 2 k_l) mu_l` of the spectrum lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePoint {
    pub value: c64,
    pub k: Vec<usize>,
}

/// All lattice points with `sum k <= cap`, sorted by modulus then argument.
pub fn lattice_points(modes: &[SpectralMode], cap: usize) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    let mut k = vec![0usize; modes.len()];
    fn rec(modes: &[SpectralMode], idx: usize, left: usize, k: &mut Vec<usize>, out: &mut Vec<LatticePoint>) {
        if idx == modes.len() {
            let value = modes
                .iter()
                .zip(k.iter())
                .map(|(m, &kk)| m.mu * (m.multiplicity + 2 * kk) as f64)
                .sum();
            out.push(LatticePoint { value, k: k.clone() });
            return;
        }
        for v in 0..=left {
            k[idx] = v;
            rec(modes, idx + 1, left - v, k, out);
        }
        k[idx] = 0;
    }
    rec(modes, 0, cap, &mut k, &mut out);
    out.sort_by(|a, b| {
        a.value
            .norm()
            .total_cmp(&b.value.norm())
            .then(a.value.arg().total_cmp(&b.value.arg()))
            .then(a.k.cmp(&b.k))
    });
    out
}

/// Number of multi-indices `nu` in `N^n` with `sum_j (1 + 2 nu_j) mu_j = value`
/// (within `tol`), where each mode contributes `r` frequencies `mu`. This is
/// the algebraic multiplicity of `value` as an eigenvalue of `q^w`.
pub fn lattice_multiplicity(modes: &[SpectralMode], value: c64, tol: f64) -> Result<usize> {
    let freqs: Vec<c64> = modes
        .iter()
        .flat_map(|m| std::iter::repeat_n(m.mu, m.multiplicity))
        .collect();
    if freqs.is_empty() {
        return Ok(0);
    }
    // project on a direction where every frequency has positive component
    let dir = freqs.iter().map(|m| m / m.norm()).sum::<c64>();
    if dir.norm() == 0.0 {
        return Err(Error::numerical("frequencies do not lie in an open half-plane"));
    }
    let dir = dir / dir.norm();
    let proj: Vec<f64> = freqs.iter().map(|m| (m * dir.conj()).re).collect();
    if proj.iter().any(|&p| p <= 0.0) {
        return Err(Error::numerical("frequencies do not lie in an open half-plane"));
    }
    let budget = (value * dir.conj()).re + tol;
    fn rec(freqs: &[c64], proj: &[f64], idx: usize, acc: c64, left: f64, target: c64, tol: f64) -> usize {
        if idx == freqs.len() {
            return usize::from((acc - target).norm() <= tol);
        }
        let mut count = 0;
        let mut nu = 0usize;
        loop {
            let cost = (1 + 2 * nu) as f64 * proj[idx];
            if cost > left {
                break;
            }
            count += rec(
                freqs,
                proj,
                idx + 1,
                acc + freqs[idx] * (1 + 2 * nu) as f64,
                left - cost,
                target,
                tol,
            );
            nu += 1;
        }
        count
    }
    Ok(rec(&freqs, &proj, 0, c64::new(0.0, 0.0), budget, value, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::tests::rotated;
    use crate::quadratic::{hamilton_map, sigma_q_sector, singular_space_k0};
    use std::f64::consts::PI;

    fn harmonic(n: usize) -> QuadraticForm {
        QuadraticForm::from_matrix(n, Mat::identity(2 * n, 2 * n)).unwrap()
    }

    #[test]
    fn rotated_mode() {
        let q = rotated(PI / 4.0);
        let modes = spectrum_modes(&hamilton_map(&q), &sigma_q_sector(&q).unwrap()).unwrap();
        assert_eq!(modes.len(), 1);
        assert_eq!(modes[0].multiplicity, 1);
        assert!((modes[0].mu - c64::from_polar(1.0, PI / 8.0)).norm() < 1e-12);
        let lat = lattice_points(&modes, 5);
        for (k, p) in lat.iter().enumerate() {
            assert!((p.value - c64::from_polar((2 * k + 1) as f64, PI / 8.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn two_dimensional_harmonic() {
        let q = harmonic(2);
        let modes = spectrum_modes(&hamilton_map(&q), &sigma_q_sector(&q).unwrap()).unwrap();
        assert_eq!(modes.len(), 1);
        assert_eq!(modes[0].multiplicity, 2);
        assert!((modes[0].mu - c64::new(1.0, 0.0)).norm() < 1e-12);
        let lat = lattice_points(&modes, 3);
        let vals: Vec<f64> = lat.iter().map(|p| p.value.re).collect();
        assert_eq!(vals.len(), 4);
        for (k, v) in vals.iter().enumerate() {
            assert!((v - (2 + 2 * k) as f64).abs() < 1e-12);
        }
        assert_eq!(lattice_multiplicity(&modes, c64::new(4.0, 0.0), 1e-8).unwrap(), 2);
        assert_eq!(lattice_multiplicity(&modes, c64::new(6.0, 0.0), 1e-8).unwrap(), 3);
        assert_eq!(lattice_multiplicity(&modes, c64::new(3.0, 0.0), 1e-8).unwrap(), 0);
    }

    #[test]
    fn harmonic_lattice_is_odd_integers() {
        let q = harmonic(1);
        let modes = spectrum_modes(&hamilton_map(&q), &sigma_q_sector(&q).unwrap()).unwrap();
        let lat = lattice_points(&modes, 4);
        let vals: Vec<f64> = lat.iter().map(|p| p.value.re).collect();
        for (k, v) in vals.iter().enumerate() {
            assert!((v - (2 * k + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn partially_elliptic_selection() {
        // (x1^2 + xi1^2) + i (x2^2 + xi2^2): S is the (x2, xi2) plane
        let mut m = Mat::<c64>::zeros(4, 4);
        m[(0, 0)] = c64::new(1.0, 0.0);
        m[(2, 2)] = c64::new(1.0, 0.0);
        m[(1, 1)] = c64::new(0.0, 1.0);
        m[(3, 3)] = c64::new(0.0, 1.0);
        let q = QuadraticForm::from_matrix(2, m).unwrap();
        let f = hamilton_map(&q);
        let s = singular_space_k0(&f).unwrap();
        assert_eq!(s.basis.len(), 2);
        let modes = spectrum_modes_partial(&f, &q, &s).unwrap();
        assert_eq!(modes.len(), 2);
        assert!((modes[0].mu - c64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((modes[1].mu - c64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn non_definite_restriction_is_unsupported() {
        // i (x^2 - xi^2): S = R^2 and q|_S is indefinite
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 0)] = c64::new(0.0, 1.0);
        m[(1, 1)] = c64::new(0.0, -1.0);
        let q = QuadraticForm::from_matrix(1, m).unwrap();
        let f = hamilton_map(&q);
        let s = singular_space_k0(&f).unwrap();
        assert!(matches!(spectrum_modes_partial(&f, &q, &s), Err(Error::Unsupported(_))));
    }
}
