use std::path::{Path, PathBuf};

use grushin_core::fock::FockBasis;
use grushin_core::grushin::{
    grushin_residuals, localization_n0_1, margin_scan, parity_audit, ztilde_sequence,
    EigenExpansion, GrushinSystem, Localization, MarginReport, OmegaBox, ParityReport, Residuals,
    KERNEL_RANK_TOL,
};
use grushin_core::lab::{
    assemble_scaled, check_estimate_regions, pseudospectrum_scan, validate_expansion, ExpansionFit, RegionReport,
};
use grushin_core::linalg::mat_to_rows;
use grushin_core::quadratic::{
    analyze, check_remainder_sector, lattice_multiplicity, QuadraticReport, ELLIPTIC_EPS,
};
use grushin_core::symbols::{build_ak_family, PhasePolynomial, SpectralParameter, SymbolJet};
use grushin_core::{c64, Error};
use serde::Serialize;

use crate::config::{ProblemSpec, Z0};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Grushin,
    Validate,
    Pseudospectrum,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Grushin => "grushin",
            Command::Validate => "validate",
            Command::Pseudospectrum => "pseudospectrum",
        }
    }
}

/// Cutoffs every number in the report was computed under.
#[derive(Debug, Serialize)]
struct Settings {
    n: usize,
    n0: usize,
    n_cut: usize,
    guard: usize,
    h: Vec<f64>,
    ellipticity_eps: f64,
    kernel_rank_tol: f64,
    lattice_tol: f64,
    dropped_jet_terms: usize,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum ExpansionSection {
    Coefficients(EigenExpansion),
    Degenerate { pairing_degenerate: f64 },
    NotApplicable { not_applicable: String },
}

#[derive(Debug, Serialize)]
struct GrushinSummary {
    z0: c64,
    z_tail: Vec<c64>,
    d: usize,
    kernel_singular_value_gap: f64,
    a_matrices: Vec<Vec<Vec<c64>>>,
    margin: MarginReport,
    localization: Option<Localization>,
    /// `h z0 + h^{3/2} lambda`, lambda in `Lambda`; `d > 1` only.
    experimental_branches: Option<Vec<Vec<c64>>>,
    parity: ParityReport,
    residuals: Vec<Residuals>,
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Validation {
    fit: ExpansionFit,
    slope_slack: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct ScanOutput {
    h: f64,
    file: String,
    regions: RegionReport,
}

#[derive(Debug, Serialize)]
struct RunReport {
    command: &'static str,
    settings: Settings,
    quadratic: QuadraticReport,
    grushin: Option<GrushinSummary>,
    expansion: Option<ExpansionSection>,
    validation: Option<Validation>,
    pseudospectrum: Option<Vec<ScanOutput>>,
    caveats: Vec<String>,
}

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Core(Error),
    Io(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Core(e)
    }
}

fn build_jet(spec: &ProblemSpec) -> Result<SymbolJet, RunError> {
    let polys = spec
        .p
        .iter()
        .map(|terms| PhasePolynomial::from_literal(spec.n, terms))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| RunError::Config(e.to_string()))?;
    Ok(SymbolJet::new(spec.n, spec.n0, polys)?)
}

fn choose_z0(spec: &ProblemSpec, report: &QuadraticReport, p1: c64) -> Result<c64, RunError> {
    match &spec.z0 {
        Z0::Explicit(z) => Ok(c64::from(*z)),
        Z0::Keyword(_) | Z0::LatticeIndex { .. } => {
            let k = match spec.z0 {
                Z0::LatticeIndex { lattice_index } => lattice_index,
                _ => 0,
            };
            if report.spectrum_modes.is_empty() {
                return Err(Error::Unsupported(format!("no spectrum lattice: {}", report.spectrum_rule)).into());
            }
            let pts = report.lattice(k + 1);
            let p = pts
                .get(k)
                .ok_or_else(|| RunError::Config(format!("lattice index {k} is out of range")))?;
            Ok(p.value + p1)
        }
    }
}

pub fn execute(cmd: Command, spec: &ProblemSpec, out: &Path, workers: Option<usize>) -> Result<PathBuf, RunError> {
    let jet = build_jet(spec)?;
    let quadratic = analyze(&jet.quadratic_form())?;
    if !quadratic.elliptic {
        return Err(Error::AssumptionViolated {
            assumption: grushin_core::error::Assumption::FullEllipticity,
            detail: format!(
                "min |q| on the unit sphere is {:.3e} at X = {:?}",
                quadratic.min_abs_q, quadratic.witness
            ),
        }
        .into());
    }
    let mut caveats = vec![
        "ellipticity at infinity is not decidable from a jet and was not checked".to_string(),
        "reduction of the characteristic set to the origin is not decidable from a jet and was not checked".to_string(),
        "all results concern the quantized truncated Taylor jet".to_string(),
    ];
    if jet.dropped_terms() > 0 {
        caveats.push(format!(
            "{} jet terms beyond degree N0 + 2 or order 1 + N0/2 were dropped",
            jet.dropped_terms()
        ));
    }
    let rem = check_remainder_sector(&jet, 1.0, 2000);
    if !rem.holds {
        caveats.push(format!(
            "the remainder p0 - q leaves every sector in Re z > 0 (max |arg| {:.3}); the model operator is not globally controlled",
            rem.max_abs_arg
        ));
    }
    let settings = Settings {
        n: spec.n,
        n0: spec.n0,
        n_cut: spec.n_cut,
        guard: spec.guard_levels(),
        h: spec.h.clone(),
        ellipticity_eps: ELLIPTIC_EPS,
        kernel_rank_tol: KERNEL_RANK_TOL,
        lattice_tol: spec.tolerances.lattice,
        dropped_jet_terms: jet.dropped_terms(),
    };
    let mut report = RunReport {
        command: cmd.name(),
        settings,
        quadratic,
        grushin: None,
        expansion: None,
        validation: None,
        pseudospectrum: None,
        caveats,
    };
    let basis = || FockBasis::new(spec.n, spec.n_cut, spec.guard_levels()).map_err(RunError::from);
    let p1 = jet.subprincipal_at_zero();

    if matches!(cmd, Command::Grushin | Command::Validate) {
        let z0 = choose_z0(spec, &report.quadratic, p1)?;
        let d = lattice_multiplicity(&report.quadratic.spectrum_modes, z0 - p1, spec.tolerances.lattice)?;
        if d == 0 {
            return Err(Error::InvalidInput(format!("z0 - p1(0) = {} is not a lattice point", z0 - p1)).into());
        }
        let tail = spec.tail();
        let zp = SpectralParameter::new(spec.n0, z0, &tail)?;
        let fam = build_ak_family(&jet, &zp)?;
        let basis = basis()?;
        let sys = GrushinSystem::build(&fam, &basis, d)?;
        let omega = match &spec.omega {
            Some(o) => OmegaBox::new(
                o.lo.iter().map(|&z| z.into()).collect(),
                o.hi.iter().map(|&z| z.into()).collect(),
            )
            .map_err(|e| RunError::Config(e.to_string()))?,
            None => OmegaBox::point(tail.clone()),
        };
        let margin = margin_scan(&sys, &spec.h, &omega, workers)?;
        let localization = if spec.n0 == 1 { Some(localization_n0_1(&sys)?) } else { None };
        let experimental_branches = match (&localization, d > 1) {
            (Some(loc), true) => Some(
                spec.h
                    .iter()
                    .map(|&h| loc.lambda.iter().map(|l| z0 * h + l * h.powf(1.5)).collect())
                    .collect(),
            ),
            _ => None,
        };
        let residuals = spec.h.iter().map(|&h| grushin_residuals(&sys, h)).collect::<Result<Vec<_>, _>>()?;
        let mut warnings = Vec::new();
        if let Some(w) = &sys.reduced_inverse().warning {
            warnings.push(w.clone());
        }
        report.expansion = Some(if d != 1 {
            ExpansionSection::NotApplicable {
                not_applicable: format!("kernel dimension d = {d}"),
            }
        } else {
            match ztilde_sequence(&sys) {
                Ok(e) => ExpansionSection::Coefficients(e),
                Err(Error::PairingDegenerate(v)) => ExpansionSection::Degenerate { pairing_degenerate: v },
                Err(e) => return Err(e.into()),
            }
        });
        report.grushin = Some(GrushinSummary {
            z0,
            z_tail: tail,
            d,
            kernel_singular_value_gap: sys.reduced_inverse().relative_gap,
            a_matrices: sys.a_matrices().iter().map(|m| mat_to_rows(m.as_ref())).collect(),
            margin,
            localization,
            experimental_branches,
            parity: parity_audit(&sys),
            residuals,
            warnings,
        });
        if cmd == Command::Validate {
            let expansion = match &report.expansion {
                Some(ExpansionSection::Coefficients(e)) => e.clone(),
                _ => {
                    return Err(Error::Unsupported(
                        "validation needs d = 1 and a nondegenerate pairing".into(),
                    )
                    .into())
                }
            };
            let fit = validate_expansion(&jet, &expansion, &spec.h, spec.expansion_order, &basis)?;
            let pass = fit.meets_order(spec.tolerances.slope_slack);
            report.validation = Some(Validation {
                fit,
                slope_slack: spec.tolerances.slope_slack,
                pass,
            });
        }
    }

    if cmd == Command::Pseudospectrum {
        let scan = spec
            .scan
            .as_ref()
            .ok_or_else(|| RunError::Config("pseudospectrum needs a \"scan\" section".into()))?;
        let consts = spec.regions.unwrap_or_default();
        let basis = basis()?;
        let mut outputs = Vec::new();
        for &h in &spec.h {
            let op = assemble_scaled(&jet, h, &basis)?;
            let grid = pseudospectrum_scan(&op, scan.rect, scan.nx, scan.ny, workers)?;
            let name = format!("grid_{h}.csv");
            std::fs::write(out.join(&name), grid.to_csv()).map_err(|e| RunError::Io(e.to_string()))?;
            outputs.push(ScanOutput {
                h,
                file: name,
                regions: check_estimate_regions(&grid, &report.quadratic, p1, &consts),
            });
        }
        report.pseudospectrum = Some(outputs);
    }

    let path = out.join("report.json");
    let text = serde_json::to_string_pretty(&report).map_err(|e| RunError::Io(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| RunError::Io(e.to_string()))?;
    Ok(path)
}
