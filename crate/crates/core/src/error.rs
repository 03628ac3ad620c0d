use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which standing assumption on the principal symbol a run violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// `Re p0 >= 0` on phase space.
    Nonnegativity,
    /// `p0(0) = 0` and `grad p0(0) = 0`.
    DoubleCharacteristic,
    /// `q(X) = 0` only at `X = 0`.
    FullEllipticity,
}

impl std::fmt::Display for Assumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Assumption::Nonnegativity => "nonnegativity of Re p0",
            Assumption::DoubleCharacteristic => "double characteristic at the origin",
            Assumption::FullEllipticity => "full ellipticity of the quadratic part",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("assumption violated ({assumption}): {detail}")]
    AssumptionViolated { assumption: Assumption, detail: String },

    #[error("Fock basis too large: {size} states (limit {limit})")]
    BasisTooLarge { size: usize, limit: usize },

    #[error("symbol degree {degree} exceeds the guard band {guard}")]
    DegreeExceedsGuard { degree: usize, guard: usize },

    #[error("trust exhausted: trusted degree {trusted} below required {required}; increase the guard")]
    TrustExhausted { trusted: i64, required: i64 },

    #[error("kernel dimension {found} does not match lattice multiplicity {expected}")]
    KernelDimension { expected: usize, found: usize },

    #[error("pairing (phi_1, psi_1) is degenerate: |pairing| = {0:e}")]
    PairingDegenerate(f64),

    #[error("sector of q spans an angle of {0} rad (>= pi)")]
    SectorTooWide(f64),

    #[error("ambiguous eigenvalue selection: {0}")]
    AmbiguousSelection(String),

    #[error("eigenvalue tracking ambiguity at h = {h}: candidates {candidates:?}")]
    TrackingAmbiguity { h: f64, candidates: Vec<(f64, f64)> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
