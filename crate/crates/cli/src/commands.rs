use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nlpw::eigen::{
    el_residual, minimize_lambda_alpha, representation_check, symmetry_diagnostics, ElResidual, EigenResult,
    RepresentationCheck, SolverConfig, StartSummary, SymmetryDiagnostics,
};
use nlpw::gtrig::PqTrig;
use nlpw::hfun::{h_integral, HEval};
use nlpw::quad::QuadratureConfig;
use nlpw::saturation::{find_alpha_c_with, sweep_alpha, SaturationConfig, SaturationReport};
use nlpw::{Error, Params};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Settings};
use crate::emit::{emit, to_csv, Cell, Report, Table};
use crate::verify::run_verify_suite;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtrigRow {
    pub t: f64,
    pub sin: f64,
    pub cos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtrigReport {
    pub p: f64,
    pub q: f64,
    pub pi_pq: f64,
    pub rows: Vec<GtrigRow>,
}

impl Report for GtrigReport {
    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["p", "q", "t", "sin", "cos"],
            rows: self.rows.iter().map(|r| vec![self.p.into(), self.q.into(), r.t.into(), r.sin.into(), r.cos.into()]).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfunReport {
    pub rows: Vec<HEval>,
}

impl Report for HfunReport {
    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["m", "p", "q", "r", "H", "error", "divergent"],
            rows: self
                .rows
                .iter()
                .map(|h| {
                    vec![
                        h.m.into(),
                        h.params.p().into(),
                        h.params.q().into(),
                        h.params.r().into(),
                        h.value.into(),
                        h.error_estimate.into(),
                        h.divergent.into(),
                    ]
                })
                .collect(),
        })
    }
}

/// Output of `lambda`. The minimizer itself goes to a separate CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRecord {
    pub lambda: f64,
    pub gamma: f64,
    pub grad_norm: f64,
    pub start_label: String,
    pub iterations: usize,
    pub converged: bool,
    pub params: Params,
    pub alpha: f64,
    pub n: usize,
    pub diagnostics: SymmetryDiagnostics,
    pub el_residual: ElResidual,
    /// Present when the minimizer changes sign.
    pub representation: Option<RepresentationCheck>,
    pub starts: Vec<StartSummary>,
}

impl Report for LambdaRecord {}

impl Report for SaturationReport {
    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["alpha", "lambda", "even_defect", "odd_defect", "r_average", "zero_count"],
            rows: self
                .samples
                .iter()
                .map(|s| {
                    vec![
                        s.alpha.into(),
                        s.lambda.into(),
                        s.even_defect.into(),
                        s.odd_defect.into(),
                        s.r_average.into(),
                        s.zero_count.into(),
                    ]
                })
                .collect(),
        })
    }
}

/// What a command produced: the main report plus any side files.
#[derive(Debug)]
pub struct Outcome {
    pub report: Vec<u8>,
    pub side_files: Vec<(PathBuf, Vec<u8>)>,
    /// False only when `verify` found a failing check.
    pub success: bool,
    /// Printed to stderr.
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(report: Vec<u8>) -> Self {
        Self { report, side_files: vec![], success: true, warnings: vec![] }
    }
}

fn solve(params: &Params, alpha: f64, n: usize, solver: &SolverConfig, warnings: &mut Vec<String>) -> Result<EigenResult> {
    match minimize_lambda_alpha(params, alpha, n, solver) {
        Ok(r) => Ok(r),
        Err(Error::NotConverged { best }) => {
            warnings.push(format!("solver did not converge (gradient norm {:.3e})", best.grad_norm));
            Ok(*best)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn lambda_record(params: &Params, alpha: f64, n: usize, solver: &SolverConfig, warnings: &mut Vec<String>) -> Result<(LambdaRecord, EigenResult)> {
    let res = solve(params, alpha, n, solver, warnings)?;
    let diagnostics = symmetry_diagnostics(&res.minimizer, params)?;
    let residual = el_residual(&res.minimizer, params, alpha, res.lambda)?;
    let representation = if diagnostics.zero_count > 0 {
        representation_check(&res.minimizer, params, &QuadratureConfig::default()).ok()
    } else {
        None
    };
    let record = LambdaRecord {
        lambda: res.lambda,
        gamma: res.gamma,
        grad_norm: res.grad_norm,
        start_label: res.start_label.clone(),
        iterations: res.iterations,
        converged: res.converged,
        params: *params,
        alpha,
        n,
        diagnostics,
        el_residual: residual,
        representation,
        starts: res.starts.clone(),
    };
    Ok((record, res))
}

pub fn minimizer_csv(res: &EigenResult) -> Result<Vec<u8>> {
    let u = &res.minimizer;
    let rows = (0..=u.n()).map(|i| vec![Cell::Float(u.node(i)), Cell::Float(u.at(i))]).collect();
    to_csv(&Table { header: vec!["x", "u"], rows })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let format = cfg.output.format;
    match &cfg.settings {
        Settings::Gtrig { p, q, t } => {
            let trig = PqTrig::new(*p, *q)?;
            let rows = t
                .iter()
                .map(|&t| {
                    let (sin, cos) = trig.sin_cos(t);
                    GtrigRow { t, sin, cos }
                })
                .collect();
            let report = GtrigReport { p: *p, q: *q, pi_pq: trig.pi(), rows };
            Ok(Outcome::ok(emit(&report, format)?))
        }
        Settings::Hfun { params, m } => {
            let qc = QuadratureConfig::default();
            let rows = m.iter().map(|&m| h_integral(m, params, &qc)).collect::<nlpw::Result<Vec<_>>>()?;
            Ok(Outcome::ok(emit(&HfunReport { rows }, format)?))
        }
        Settings::Lambda { params, alpha, n, solver, minimizer } => {
            let mut warnings = vec![];
            let (record, res) = lambda_record(params, *alpha, *n, solver, &mut warnings)?;
            let mut out = Outcome::ok(emit(&record, format)?);
            if let Some(path) = minimizer {
                out.side_files.push((path.clone(), minimizer_csv(&res)?));
            }
            out.warnings = warnings;
            Ok(out)
        }
        Settings::Saturate { params, alphas, n, tol_alpha, critical, solver, csv } => {
            let mut report = sweep_alpha(params, alphas, *n, solver)?;
            let mut warnings = vec![];
            if *critical {
                let sc = SaturationConfig { n: *n, tol_alpha: *tol_alpha, solver: solver.clone(), ..SaturationConfig::default() };
                match find_alpha_c_with(params, &sc) {
                    Ok(c) => report = report.with_critical(c),
                    Err(e) => warnings.push(format!("α_C not located: {e}")),
                }
            }
            for s in report.samples.iter().filter(|s| s.error.is_some() || !s.converged) {
                warnings.push(format!("α = {}: {}", s.alpha, s.error.as_deref().unwrap_or("not converged")));
            }
            if !report.monotone_ok {
                warnings.push("sweep is not monotone within tolerance".into());
            }
            if !report.lipschitz_ok {
                warnings.push("sweep violates the Lipschitz bound".into());
            }
            let mut out = Outcome::ok(emit(&report, format)?);
            if let Some(path) = csv {
                out.side_files.push((path.clone(), emit(&report, crate::emit::Format::Csv)?));
            }
            out.warnings = warnings;
            Ok(out)
        }
        Settings::Verify { quick, n } => {
            let report = run_verify_suite(*quick, *n);
            let success = report.passed;
            let mut out = Outcome::ok(emit(&report, format)?);
            out.success = success;
            out.warnings = report.summary_lines();
            Ok(out)
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}
