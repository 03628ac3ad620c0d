//! Weyl quantization of polynomial symbols on a truncated Hermite basis.
//!
//! Convention: `[a, a^+] = 1`, `X = (a + a^+)/sqrt 2`, `D = (a - a^+)/(i sqrt 2)`,
//! so that `Op(x^2 + xi^2) = 2N + 1`.
//!
//! Trust bookkeeping: every operator carries a degree *leakage* `g`, and its
//! trusted degree is `top - g` where `top = N_cut + G` is the highest level
//! of the grid. A quantized symbol of degree `g` has leakage `g`; leakages add
//! under products and take the maximum under sums. Vectors carry a trusted
//! degree that drops by the leakage of each operator applied to them.

mod basis;
mod operator;
mod vector;

pub use basis::{FockBasis, MAX_BASIS_SIZE};
pub use operator::{op_1d, quantize, FockOperator};
pub use vector::{apply_chain, project_gaussian, FockVector};

/// Default guard band `(2 N0 + 2)(N0 + 3)`: the total symbol degree along the
/// longest corrector chain.
pub fn default_guard(n0: usize) -> usize {
    (2 * n0 + 2) * (n0 + 3)
}
