//! `run`: set, potential, measure, coefficients, report.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use widom_core::asymptotics::{
    build_report, nth_root_check, point_mass_stability, AsymptoticsReport, MassStability, ReportInputs,
};
use widom_core::interval_sets::{homogeneity_eta, sodin_criterion, HomogeneityReport, IntervalSet, SampleGrid};
use widom_core::jacobi::{recurrence_auto, JacobiCoefficients};
use widom_core::measure::{build_measure, SpectralMeasure, WeightSpec};
use widom_core::potential::{equilibrium, equilibrium_auto, EquilibriumData, EquilibriumSummary};

use crate::acceptance::szego_points;
use crate::config::{Diagnostic, RunConfig};
use crate::{write_atomic, CliError};

pub const REPORT_SCHEMA: &str = "widom-report/1";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub bands: Vec<[f64; 2]>,
    pub gaps: Vec<[f64; 2]>,
    pub total_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub kind: String,
    pub total_mass: f64,
    pub masses: Vec<[f64; 2]>,
    pub edge_exponents: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSummary {
    pub n: usize,
    pub nodes_per_band: usize,
    pub residual: f64,
    pub compensated: bool,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NthRoot {
    pub z_re: f64,
    pub z_im: f64,
    pub n: usize,
    pub green: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub points: Vec<f64>,
    pub greens_sum: f64,
    pub carleson_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassStabilityEntry {
    pub x: f64,
    pub m: f64,
    pub result: MassStability,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub homogeneity: Option<HomogeneityReport>,
    pub sodin: Option<f64>,
    pub nth_root: Vec<NthRoot>,
    pub admissibility: Option<Admissibility>,
    pub mass_stability: Vec<MassStabilityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub config: RunConfig,
    pub set: SetSummary,
    pub equilibrium: EquilibriumSummary,
    pub measure: MeasureSummary,
    pub coefficients: CoefficientSummary,
    pub asymptotics: AsymptoticsReport,
    pub diagnostics: Diagnostics,
    pub density: Vec<[f64; 2]>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn jacobi(&self) -> Result<JacobiCoefficients, CliError> {
        Ok(JacobiCoefficients::new(self.coefficients.p.clone(), self.coefficients.q.clone())?)
    }

    pub fn widom_csv(&self) -> String {
        let mut s = String::from("n,W_n\n");
        for (n, w) in self.asymptotics.widom_factors.iter().enumerate() {
            s.push_str(&format!("{n},{w:e}\n"));
        }
        s
    }

    pub fn density_csv(&self) -> String {
        let mut s = String::from("x,w\n");
        for [x, w] in &self.density {
            s.push_str(&format!("{x:e},{w:e}\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn pairs(v: &[(f64, f64)]) -> Vec<[f64; 2]> {
    v.iter().map(|&(a, b)| [a, b]).collect()
}

fn solve_equilibrium(set: &IntervalSet, cfg: &RunConfig) -> widom_core::Result<EquilibriumData> {
    match cfg.solver.equilibrium_order {
        Some(o) => equilibrium(set, o),
        None => equilibrium_auto(set),
    }
}

/// Runs the pipeline without writing anything.
pub fn compute(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let set = cfg.set.build()?;
    let eq = solve_equilibrium(&set, cfg)?;
    let masses: Vec<(f64, f64)> = cfg.measure.masses.iter().map(|m| (m[0], m[1])).collect();
    let measure = build_measure(&set, &cfg.measure.weight, &masses)?;
    let n = cfg.solver.n;
    let burn_in = cfg.burn_in();
    let run = recurrence_auto(&measure, n)?;
    let c = &run.coefficients;
    let mut notes = Vec::new();
    if run.residual > cfg.solver.orthonormality_tol {
        notes.push(format!(
            "orthonormality residual {:e} exceeds tolerance {:e}",
            run.residual, cfg.solver.orthonormality_tol
        ));
    }

    let asymptotics = build_report(&ReportInputs {
        measure: &measure,
        eq: &eq,
        coefficients: c,
        burn_in,
        t_max: if cfg.wants(Diagnostic::AlmostPeriod) { cfg.solver.t_max } else { 0 },
        szego_n: if cfg.wants(Diagnostic::Szego) { 30.min(n) } else { 0 },
        szego_points: if cfg.wants(Diagnostic::Szego) { szego_points() } else { Vec::new() },
    })?;

    let mut diagnostics = Diagnostics::default();
    if cfg.wants(Diagnostic::Homogeneity) {
        diagnostics.homogeneity = Some(homogeneity_eta(&set, &SampleGrid::default_for(&set))?);
    }
    if cfg.wants(Diagnostic::Sodin) {
        diagnostics.sodin = Some(sodin_criterion(&set));
    }
    if cfg.wants(Diagnostic::NthRoot) {
        let (lo, hi) = set.bounding();
        let d = set.diam();
        for z in [Complex64::new(hi + 0.5 * d, 0.0), Complex64::new(0.5 * (lo + hi), 0.5 * d)] {
            diagnostics.nth_root.push(NthRoot {
                z_re: z.re,
                z_im: z.im,
                n,
                green: eq.green(z),
                error: nth_root_check(c, &eq, z, n)?,
            });
        }
    }
    if cfg.wants(Diagnostic::Admissibility) {
        let points: Vec<f64> = measure.masses().iter().map(|m| m.0).collect();
        if points.is_empty() {
            notes.push("admissibility sums skipped: no point masses".into());
        } else {
            diagnostics.admissibility = Some(Admissibility {
                greens_sum: eq.greens_sum(&points)?,
                carleson_sum: eq.carleson_sum(&points)?,
                points,
            });
        }
    }
    if cfg.wants(Diagnostic::MassStability) {
        diagnostics.mass_stability = mass_stability(cfg, &set, &masses, n, burn_in, &mut notes)?;
    }

    Ok(RunReport {
        schema: REPORT_SCHEMA.into(),
        config: cfg.clone(),
        set: SetSummary {
            bands: pairs(set.bands()),
            gaps: pairs(&set.gaps()),
            total_length: set.total_length(),
        },
        equilibrium: eq.summary(),
        measure: MeasureSummary {
            kind: measure.kind().into(),
            total_mass: measure.total_mass(),
            masses: pairs(measure.masses()),
            edge_exponents: pairs(&measure.edge_exponents()),
        },
        coefficients: CoefficientSummary {
            n,
            nodes_per_band: run.nodes_per_band,
            residual: run.residual,
            compensated: run.compensated,
            p: c.p.clone(),
            q: c.q.clone(),
        },
        asymptotics,
        diagnostics,
        density: pairs(&measure.density_samples(cfg.solver.density_samples)),
        notes,
    })
}

/// Each configured mass against the measure carrying the others.
fn mass_stability(
    cfg: &RunConfig,
    set: &IntervalSet,
    masses: &[(f64, f64)],
    n: usize,
    burn_in: usize,
    notes: &mut Vec<String>,
) -> Result<Vec<MassStabilityEntry>, CliError> {
    if masses.is_empty() {
        notes.push("mass stability skipped: no point masses".into());
        return Ok(Vec::new());
    }
    if matches!(cfg.measure.weight, WeightSpec::Sigma0 { .. }) {
        notes.push("mass stability skipped: sigma0 masses are fixed by its poles".into());
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(masses.len());
    for (i, &(x, m)) in masses.iter().enumerate() {
        let others: Vec<(f64, f64)> = masses.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
        let base: SpectralMeasure = build_measure(set, &cfg.measure.weight, &others)?;
        out.push(MassStabilityEntry { x, m, result: point_mass_stability(&base, (x, m), n, burn_in)? });
    }
    Ok(out)
}

/// Output directory: the flag, then the config, then `widom-out`.
pub fn output_dir(cfg: &RunConfig, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf).or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("widom-out"))
}

/// Computes and writes report.json, coefficients.csv, widom.csv and density.csv.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunReport, CliError> {
    let report = compute(cfg)?;
    write_atomic(&out.join("coefficients.csv"), report.jacobi()?.to_csv().as_bytes())?;
    write_atomic(&out.join("widom.csv"), report.widom_csv().as_bytes())?;
    write_atomic(&out.join("density.csv"), report.density_csv().as_bytes())?;
    write_atomic(&out.join(REPORT_FILE), report.to_json().as_bytes())?;
    Ok(report)
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::missing(format!("{}: {e}", path.display())))?;
    Ok(RunConfig::from_json(&text)?)
}
