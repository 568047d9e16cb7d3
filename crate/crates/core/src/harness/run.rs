use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{AnalysisItem, ExperimentConfig};
use super::{fmt_float, write_table, SOFTWARE};
use crate::background::{BackgroundSpec, PhysicalConstants};
use crate::coherent::{self, gk_record, gk_sums, Target, GK_TAIL_TOL};
use crate::ep::{ep_residual, EpKind, EpParams, EpSolution};
use crate::error::{Error, Result};
use crate::expectations::{eigenstate_record, UncertaintyRecord};
use crate::states::{PhaseIntegral, Snapshot};

/// One analysis evaluated on the time grid.
#[derive(Debug, Clone)]
pub struct AnalysisRows {
    pub item: AnalysisItem,
    pub records: Vec<UncertaintyRecord>,
    /// squeeze parameter per row for optimized squeezed items
    pub beta: Option<Vec<f64>>,
}

impl AnalysisRows {
    pub fn columns(&self) -> Vec<&'static str> {
        let mut cols = UncertaintyRecord::COLUMNS.to_vec();
        if self.beta.is_some() {
            cols.push("beta");
        }
        cols
    }

    pub fn row(&self, k: usize) -> Vec<f64> {
        let mut row = self.records[k].values().to_vec();
        if let Some(b) = &self.beta {
            row.push(b[k]);
        }
        row
    }
}

/// Everything a run computes, before anything is written.
#[derive(Debug, Clone)]
pub struct RunData {
    pub times: Vec<f64>,
    /// (t, σ, σ̇, residual)
    pub ep_rows: Vec<[f64; 4]>,
    pub ep_kind: EpKind,
    pub ep_params: EpParams,
    pub max_residual: f64,
    pub residual_tolerance: f64,
    pub analyses: Vec<AnalysisRows>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub checks: Vec<CheckOutcome>,
    pub max_residual: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn compute(cfg: &ExperimentConfig) -> Result<RunData> {
    cfg.validate()?;
    let (bg, sol) = cfg.solve_ep()?;
    compute_with(cfg, &bg, &sol)
}

pub fn compute_with(cfg: &ExperimentConfig, bg: &BackgroundSpec, sol: &EpSolution) -> Result<RunData> {
    let times = cfg.t_grid.times();
    let ep_rows = times
        .par_iter()
        .map(|&t| {
            let (s, ds) = sol.state(t)?;
            Ok([t, s, ds, ep_residual(sol, bg, t)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = ep_rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    let analyses = cfg.analysis.iter().map(|item| analyse(item, &times, bg, sol)).collect::<Result<Vec<_>>>()?;
    Ok(RunData {
        times,
        ep_rows,
        ep_kind: sol.kind(),
        ep_params: sol.params().clone(),
        max_residual,
        residual_tolerance: cfg.residual_tolerance(sol.kind()),
        analyses,
    })
}

pub fn analyse(item: &AnalysisItem, times: &[f64], bg: &BackgroundSpec, sol: &EpSolution) -> Result<AnalysisRows> {
    let phase = PhaseIntegral::new(bg, sol);
    let gk = match item {
        AnalysisItem::Gk(spec) => Some(gk_sums(spec.m0, spec.s, GK_TAIL_TOL)),
        _ => None,
    };
    let rows = times
        .par_iter()
        .map(|&t| -> Result<(UncertaintyRecord, f64)> {
            let snap = Snapshot::at(bg, sol, t)?;
            Ok(match *item {
                AnalysisItem::Eigenstate { n, m } => (eigenstate_record(n, m, &snap), 0.0),
                AnalysisItem::Glauber { alpha } => (coherent::glauber_record(Complex64::new(alpha.0, alpha.1), &snap), 0.0),
                AnalysisItem::Squeezed { alpha, beta, optimize } => {
                    let alpha = Complex64::new(alpha.0, alpha.1);
                    let beta = match (beta, optimize) {
                        (Some(b), _) => b,
                        (None, Some(Target::Aux)) => coherent::beta_min_aux_at(&snap),
                        (None, Some(target)) => coherent::minimize_beta_at(target, &snap, coherent::DEFAULT_BRACKET)?.0,
                        (None, None) => unreachable!("validated"),
                    };
                    (coherent::squeezed_record(alpha, beta, &snap), beta)
                }
                AnalysisItem::Gk(spec) => {
                    let sums = gk.as_ref().expect("gk sums");
                    (gk_record(&spec, sums, phase.lambda(t)?, &snap), 0.0)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let optimized = matches!(item, AnalysisItem::Squeezed { optimize: Some(_), .. });
    let (records, betas): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(AnalysisRows { item: *item, records, beta: optimized.then_some(betas) })
}

/// Invariant checks embedded in every run.
pub fn run_checks(data: &RunData, hbar: f64) -> Vec<CheckOutcome> {
    let mut checks = vec![
        CheckOutcome {
            name: "ep_residual".into(),
            passed: data.max_residual <= data.residual_tolerance,
            detail: format!("max {:e} vs tolerance {:e}", data.max_residual, data.residual_tolerance),
        },
        CheckOutcome {
            name: "sigma_positive".into(),
            passed: data.ep_rows.iter().all(|r| r[1] > 0.0),
            detail: format!("min sigma {:e}", data.ep_rows.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min)),
        },
    ];
    for (k, a) in data.analyses.iter().enumerate() {
        let violations: Vec<String> = a.records.iter().flat_map(|r| r.violations()).collect();
        checks.push(CheckOutcome {
            name: format!("analysis_{k}_generalized_bounds"),
            passed: violations.is_empty(),
            detail: violations.first().cloned().unwrap_or_else(|| format!("{} rows hold", a.records.len())),
        });
        let worst = a.records.iter().map(|r| r.prod_xpx).fold(f64::INFINITY, f64::min);
        checks.push(CheckOutcome {
            name: format!("analysis_{k}_standard_relation"),
            passed: worst >= 0.5 * hbar * (1.0 - 1e-12),
            detail: format!("min dx*dpx = {worst}"),
        });
    }
    checks
}

#[derive(Serialize)]
struct Manifest<'a> {
    software: &'a str,
    version: &'a str,
    schema_version: u32,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    constants: PhysicalConstants,
    config: &'a ExperimentConfig,
    ep: Option<EpManifest<'a>>,
    files: Vec<String>,
    checks: &'a [CheckOutcome],
}

#[derive(Serialize)]
struct EpManifest<'a> {
    method: EpKind,
    params: &'a EpParams,
    integrator_tolerance: f64,
    residual_tolerance: f64,
    max_residual: f64,
}

/// Runs the experiment and writes CSVs plus `manifest.json` to `out_dir`.
/// A failing computation still leaves a manifest naming the error.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    fs::create_dir_all(out_dir)?;
    let data = match compute(cfg) {
        Ok(d) => d,
        Err(e) => {
            let manifest = Manifest {
                software: SOFTWARE,
                version: env!("CARGO_PKG_VERSION"),
                schema_version: cfg.schema_version,
                status: "failed",
                error: Some(e.to_string()),
                constants: cfg.constants,
                config: cfg,
                ep: None,
                files: Vec::new(),
                checks: &[],
            };
            write_json(&out_dir.join("manifest.json"), &manifest)?;
            return Err(e);
        }
    };
    let mut files = Vec::new();
    let ep_path = out_dir.join("ep_solution.csv");
    let ep_rows: Vec<Vec<f64>> = data.ep_rows.iter().map(|r| r.to_vec()).collect();
    write_table(&ep_path, &["t", "sigma", "dsigma", "residual"], &ep_rows)?;
    files.push(ep_path);
    for (k, a) in data.analyses.iter().enumerate() {
        let path = out_dir.join(format!("analysis_{k}_{}.csv", a.item.label()));
        let rows: Vec<Vec<f64>> = (0..a.records.len()).map(|i| a.row(i)).collect();
        write_table(&path, &a.columns(), &rows)?;
        files.push(path);
    }
    let checks = run_checks(&data, cfg.constants.hbar);
    let passed = checks.iter().all(|c| c.passed);
    let manifest = Manifest {
        software: SOFTWARE,
        version: env!("CARGO_PKG_VERSION"),
        schema_version: cfg.schema_version,
        status: if passed { "ok" } else { "checks_failed" },
        error: None,
        constants: cfg.constants,
        config: cfg,
        ep: Some(EpManifest {
            method: data.ep_kind,
            params: &data.ep_params,
            integrator_tolerance: cfg.ep.tolerance,
            residual_tolerance: data.residual_tolerance,
            max_residual: data.max_residual,
        }),
        files: files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect(),
        checks: &checks,
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    files.push(out_dir.join("manifest.json"));
    Ok(RunReport { out_dir: out_dir.to_path_buf(), files, checks, max_residual: data.max_residual })
}

/// The EP layer alone: `ep_solution.csv` and a manifest.
pub fn ep_solve(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    let ep_only = ExperimentConfig { analysis: Vec::new(), ..cfg.clone() };
    run(&ep_only, out_dir)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub(crate) fn fmt_row(row: &[f64]) -> Vec<String> {
    row.iter().map(|v| fmt_float(*v)).collect()
}
