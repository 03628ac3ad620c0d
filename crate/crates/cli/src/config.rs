use std::path::Path;

use grushin_core::c64;
use grushin_core::lab::{Rect, RegionConstants};
use grushin_core::symbols::SymbolTerm;
use serde::{Deserialize, Serialize};

/// Complex number as `{"re": .., "im": ..}`; `im` defaults to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Complex {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex> for c64 {
    fn from(z: Complex) -> c64 {
        c64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Z0 {
    /// `"bottom"`.
    Keyword(String),
    LatticeIndex { lattice_index: usize },
    Explicit(Complex),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Guard {
    /// `"auto"`.
    Keyword(String),
    Levels(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub lo: Vec<Complex>,
    pub hi: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed shortfall of the fitted expansion slope.
    #[serde(default = "default_slope_slack")]
    pub slope_slack: f64,
    /// Relative tolerance when matching `z0` against the lattice.
    #[serde(default = "default_lattice_tol")]
    pub lattice: f64,
}

fn default_slope_slack() -> f64 {
    0.3
}

fn default_lattice_tol() -> f64 {
    1e-9
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slope_slack: default_slope_slack(),
            lattice: default_lattice_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub n: usize,
    pub n0: usize,
    /// `p_0, p_1, …` as literal term lists.
    pub p: Vec<Vec<SymbolTerm>>,
    pub z0: Z0,
    /// `z_1 … z_{2N0+2}`; missing entries are zero.
    #[serde(default)]
    pub z_tail: Vec<Complex>,
    /// Box for the margin scan; defaults to the point `z_tail`.
    #[serde(default)]
    pub omega: Option<OmegaSpec>,
    pub n_cut: usize,
    pub guard: Guard,
    pub h: Vec<f64>,
    /// Number of `z̃_j` terms used by `validate`.
    #[serde(default = "default_order")]
    pub expansion_order: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub regions: Option<RegionConstants>,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
}

fn default_order() -> usize {
    2
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl ProblemSpec {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let spec: ProblemSpec =
            serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError(m));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.p.is_empty() {
            return bad("p must list at least p_0".into());
        }
        if let Z0::Keyword(k) = &self.z0 {
            if k != "bottom" {
                return bad(format!("unknown z0 keyword {k:?}"));
            }
        }
        if let Guard::Keyword(k) = &self.guard {
            if k != "auto" {
                return bad(format!("unknown guard keyword {k:?}"));
            }
        }
        if self.z_tail.len() > 2 * self.n0 + 2 {
            return bad(format!("z_tail has more than 2 N0 + 2 = {} entries", 2 * self.n0 + 2));
        }
        if let Some(o) = &self.omega {
            if o.lo.len() != 2 * self.n0 + 2 || o.hi.len() != 2 * self.n0 + 2 {
                return bad(format!("omega needs {} lower and upper corners", 2 * self.n0 + 2));
            }
        }
        if self.h.iter().any(|&h| !(h > 0.0 && h < 1.0)) {
            return bad("h values must lie in (0, 1)".into());
        }
        if self.expansion_order == 0 || self.expansion_order > 2 * self.n0 + 2 {
            return bad(format!("expansion_order must lie in 1..={}", 2 * self.n0 + 2));
        }
        Ok(())
    }

    pub fn guard_levels(&self) -> usize {
        match self.guard {
            Guard::Levels(g) => g,
            Guard::Keyword(_) => grushin_core::fock::default_guard(self.n0),
        }
    }

    pub fn tail(&self) -> Vec<c64> {
        let mut t: Vec<c64> = self.z_tail.iter().map(|&z| z.into()).collect();
        t.resize(2 * self.n0 + 2, c64::new(0.0, 0.0));
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ProblemSpec, String> {
        let s: ProblemSpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
        s.validate().map_err(|e| e.0)?;
        Ok(s)
    }

    const BASE: &str = r#""n": 1, "n0": 1, "p": [[{"alpha": [2, 0], "re": 1}]], "n_cut": 8, "h": [0.1]"#;

    #[test]
    fn z0_forms() {
        let s = parse(&format!(r#"{{{BASE}, "z0": "bottom", "guard": "auto"}}"#)).unwrap();
        assert_eq!(s.z0, Z0::Keyword("bottom".into()));
        let s = parse(&format!(r#"{{{BASE}, "z0": {{"lattice_index": 3}}, "guard": 4}}"#)).unwrap();
        assert_eq!(s.z0, Z0::LatticeIndex { lattice_index: 3 });
        assert_eq!(s.guard_levels(), 4);
        let s = parse(&format!(r#"{{{BASE}, "z0": {{"re": 1.5, "im": -1}}, "guard": "auto"}}"#)).unwrap();
        assert_eq!(s.z0, Z0::Explicit(Complex { re: 1.5, im: -1.0 }));
        assert_eq!(s.guard_levels(), grushin_core::fock::default_guard(1));
    }

    #[test]
    fn tail_is_padded() {
        let s = parse(&format!(r#"{{{BASE}, "z0": "bottom", "guard": "auto", "z_tail": [{{"re": 2}}]}}"#)).unwrap();
        let t = s.tail();
        assert_eq!(t.len(), 4);
        assert_eq!(t[0], c64::new(2.0, 0.0));
        assert_eq!(t[3], c64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse(&format!(r#"{{{BASE}, "z0": "top", "guard": "auto"}}"#)).is_err());
        assert!(parse(&format!(r#"{{{BASE}, "z0": "bottom", "guard": "max"}}"#)).is_err());
        assert!(parse(&format!(r#"{{{BASE}, "z0": "bottom", "guard": "auto", "expansion_order": 9}}"#)).is_err());
        let long_tail = r#"[{"re":0},{"re":0},{"re":0},{"re":0},{"re":0}]"#;
        assert!(parse(&format!(r#"{{{BASE}, "z0": "bottom", "guard": "auto", "z_tail": {long_tail}}}"#)).is_err());
    }
}
