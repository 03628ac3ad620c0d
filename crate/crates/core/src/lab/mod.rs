//! Numerical laboratory for the model operator `p(h^{1/2} X; h)`.
//!
//! The model operator is the quantized truncated Taylor jet, rescaled so
//! that its spectrum near `h z_0` can be compared with the eigenvalue
//! expansions of [`crate::grushin`].

mod fit;
mod pseudo;
mod scaled;

pub use fit::{validate_expansion, ExpansionFit};
pub use pseudo::{
    check_estimate_regions, pseudospectrum_scan, PseudospectrumGrid, Rect, RegionConstants,
    RegionReport, RegionStat,
};
pub use scaled::{assemble_scaled, eigen_near, ScaledOperator, GUARD_MASS_LIMIT};

/// `a` and `b` agree within a factor `factor` (both must be positive).
pub fn stable_within(a: f64, b: f64, factor: f64) -> bool {
    a > 0.0 && b > 0.0 && a / b <= factor && b / a <= factor
}
