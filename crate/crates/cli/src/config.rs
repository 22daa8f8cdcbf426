//! Command-line flags, the optional JSON config file, and their merge into a
//! validated [`RunConfig`]. A flag given on the command line wins over the file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nlpw::eigen::SolverConfig;
use nlpw::Params;
use serde::{Deserialize, Serialize};

use crate::emit::Format;

#[derive(Debug, Parser)]
#[command(name = "nlpw", version, about = "Optimal constants of the nonlocal Poincaré–Wirtinger inequality")]
pub struct Cli {
    /// JSON file with default values for any flag (snake_case keys).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// (p, q)-trigonometric functions.
    Gtrig {
        #[command(subcommand)]
        action: GtrigAction,
    },
    /// The auxiliary integral H(m, p, q, r).
    Hfun {
        #[command(subcommand)]
        action: HfunAction,
    },
    /// Minimize the Rayleigh quotient at one α.
    Lambda(LambdaArgs),
    /// Sweep α, check monotonicity, and locate α_C.
    Saturate(SaturateArgs),
    /// Run the verification suite; exits nonzero if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum GtrigAction {
    Eval(GtrigArgs),
}

#[derive(Debug, Subcommand)]
pub enum HfunAction {
    Eval(HfunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GtrigArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Comma-separated evaluation points.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct HfunArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// A point count `k` (uniform grid on [0, 1]) or a comma-separated list of m values.
    #[arg(long)]
    pub m_grid: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// Number of elements.
    #[arg(long)]
    pub n: Option<usize>,
    /// Random starts in addition to the even and odd profiles.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Relative gradient tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LambdaArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write the minimizer as CSV (x, u).
    #[arg(long)]
    pub minimizer: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SaturateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub tol_alpha: Option<f64>,
    /// Skip the bisection for α_C.
    #[arg(long)]
    pub no_critical: bool,
    /// Also write the sweep as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Coarser meshes and smaller grids.
    #[arg(long)]
    pub quick: bool,
    /// Override the mesh size used by the eigenvalue and saturation checks.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Contents of `--config`. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub t: Option<Vec<f64>>,
    pub m_grid: Option<MGrid>,
    pub alpha: Option<f64>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub steps: Option<usize>,
    pub tol_alpha: Option<f64>,
    pub n: Option<usize>,
    pub starts: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub quick: Option<bool>,
    pub critical: Option<bool>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub minimizer: Option<PathBuf>,
    pub solver: Option<SolverConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MGrid {
    Count(usize),
    Values(Vec<f64>),
}

impl MGrid {
    fn parse(s: &str) -> Result<Self> {
        if !s.contains(',') {
            if let Ok(k) = s.trim().parse::<usize>() {
                return Ok(MGrid::Count(k));
            }
        }
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad m value {v:?}")))
            .collect::<Result<Vec<_>>>()?;
        Ok(MGrid::Values(values))
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            MGrid::Count(0) => Ok(vec![]),
            MGrid::Count(1) => Ok(vec![0.0]),
            MGrid::Count(k) => Ok((0..*k).map(|i| i as f64 / (*k - 1) as f64).collect()),
            MGrid::Values(v) => {
                if let Some(m) = v.iter().find(|m| !(0.0..=1.0).contains(*m)) {
                    bail!("m = {m} outside [0, 1]");
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Gtrig,
    Hfun,
    Lambda,
    Saturate,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    /// `None` means stdout.
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Command-specific settings after merging flags and file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Settings {
    Gtrig { p: f64, q: f64, t: Vec<f64> },
    Hfun { params: Params, m: Vec<f64> },
    Lambda { params: Params, alpha: f64, n: usize, solver: SolverConfig, minimizer: Option<PathBuf> },
    Saturate {
        params: Params,
        alphas: Vec<f64>,
        n: usize,
        tol_alpha: f64,
        critical: bool,
        solver: SolverConfig,
        csv: Option<PathBuf>,
    },
    Verify { quick: bool, n: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub settings: Settings,
    pub output: OutputSpec,
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

fn need<T: Clone>(name: &str, flag: &Option<T>, file: &Option<T>) -> Result<T> {
    match flag.clone().or_else(|| file.clone()) {
        Some(v) => Ok(v),
        None => bail!("--{} is required (flag or config key {name:?})", name.replace('_', "-")),
    }
}

fn params(a: &ParamArgs, f: &FileConfig) -> Result<Params> {
    Ok(Params::new(need("p", &a.p, &f.p)?, need("q", &a.q, &f.q)?, need("r", &a.r, &f.r)?)?)
}

fn solver(a: &SolverArgs, f: &FileConfig) -> SolverConfig {
    let base = f.solver.clone().unwrap_or_default();
    SolverConfig {
        random_starts: pick(&a.starts, &f.starts, base.random_starts),
        grad_tol: pick(&a.tol, &f.tol, base.grad_tol),
        seed: pick(&a.seed, &f.seed, base.seed),
        ..base
    }
}

fn output(a: &OutputArgs, f: &FileConfig, default: Format) -> OutputSpec {
    OutputSpec { path: a.output.clone().or_else(|| f.output.clone()), format: pick(&a.format, &f.format, default) }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("{name} must be positive, got {v}");
    }
    Ok(v)
}

impl RunConfig {
    pub fn resolve(cmd: &Command, file: &FileConfig) -> Result<Self> {
        let f = file;
        let cfg = match cmd {
            Command::Gtrig { action: GtrigAction::Eval(a) } => RunConfig {
                command: CommandKind::Gtrig,
                settings: Settings::Gtrig {
                    p: need("p", &a.p, &f.p)?,
                    q: need("q", &a.q, &f.q)?,
                    t: need("t", &a.t, &f.t)?,
                },
                output: output(&a.out, f, Format::Csv),
            },
            Command::Hfun { action: HfunAction::Eval(a) } => {
                let grid = match &a.m_grid {
                    Some(s) => MGrid::parse(s)?,
                    None => f.m_grid.clone().unwrap_or(MGrid::Count(21)),
                };
                RunConfig {
                    command: CommandKind::Hfun,
                    settings: Settings::Hfun { params: params(&a.params, f)?, m: grid.values()? },
                    output: output(&a.out, f, Format::Csv),
                }
            }
            Command::Lambda(a) => RunConfig {
                command: CommandKind::Lambda,
                settings: Settings::Lambda {
                    params: params(&a.params, f)?,
                    alpha: need("alpha", &a.alpha, &f.alpha)?,
                    n: pick(&a.solver.n, &f.n, 1024),
                    solver: solver(&a.solver, f),
                    minimizer: a.minimizer.clone().or_else(|| f.minimizer.clone()),
                },
                output: output(&a.out, f, Format::Json),
            },
            Command::Saturate(a) => {
                let lo = need("alpha_min", &a.alpha_min, &f.alpha_min)?;
                let hi = need("alpha_max", &a.alpha_max, &f.alpha_max)?;
                let steps = pick(&a.steps, &f.steps, 9);
                if hi < lo {
                    bail!("alpha-max {hi} is below alpha-min {lo}");
                }
                let alphas = match steps {
                    0 => vec![],
                    1 => vec![lo],
                    k => (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
                };
                RunConfig {
                    command: CommandKind::Saturate,
                    settings: Settings::Saturate {
                        params: params(&a.params, f)?,
                        alphas,
                        n: pick(&a.solver.n, &f.n, 512),
                        tol_alpha: pick(&a.tol_alpha, &f.tol_alpha, 1e-3),
                        critical: !a.no_critical && f.critical.unwrap_or(true),
                        solver: solver(&a.solver, f),
                        csv: a.csv.clone().or_else(|| f.csv.clone()),
                    },
                    output: output(&a.out, f, Format::Json),
                }
            }
            Command::Verify(a) => RunConfig {
                command: CommandKind::Verify,
                settings: Settings::Verify { quick: a.quick || f.quick.unwrap_or(false), n: a.n.or(f.n) },
                output: output(&a.out, f, Format::Json),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.settings {
            Settings::Gtrig { t, .. } => {
                if let Some(v) = t.iter().find(|v| !v.is_finite()) {
                    bail!("t = {v} is not finite");
                }
            }
            Settings::Hfun { .. } => {}
            Settings::Lambda { alpha, solver, .. } => {
                if !alpha.is_finite() {
                    bail!("alpha must be finite");
                }
                positive("tol", solver.grad_tol)?;
                solver.validate()?;
            }
            Settings::Saturate { tol_alpha, solver, .. } => {
                positive("tol-alpha", *tol_alpha)?;
                positive("tol", solver.grad_tol)?;
                solver.validate()?;
            }
            Settings::Verify { .. } => {}
        }
        if self.command == CommandKind::Lambda && self.output.format == Format::Csv {
            bail!("lambda reports are JSON only; the minimizer CSV goes to --minimizer");
        }
        Ok(())
    }
}
