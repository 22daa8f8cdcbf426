//! `λ_α` as a function of `α`: sweeps, the critical value `α_C` at which `λ_α`
//! reaches the twisted constant `λ_T`, and the closed-form checks on `α_C`.

use serde::{Deserialize, Serialize};

use crate::eigen::{
    lambda_t_closed, minimize_lambda_alpha, minimize_lambda_alpha_warm, richardson, symmetry_diagnostics,
    EigenResult, Parity, SolverConfig, WarmStart,
};
use crate::error::{domain, Error, Result};
use crate::params::Params;

/// `α_C(p, p, p+1) = (1 - 2^{-p}) λ_T(p, p)`. The formula is stated for general `q`,
/// but `r = p + 1` lies in the theorem range only when `q = p`.
pub fn alpha_c_closed_rp1(p: f64, q: f64) -> Result<f64> {
    Ok((1.0 - 2f64.powf(-p)) * lambda_t_closed(p, q)?)
}

/// `(2^p - 1) / 2^{p/(r-1) + p - 1} · λ_T(p, q)`, a lower bound for `α_C`.
pub fn alpha_c_lower_bound(params: &Params) -> Result<f64> {
    let p = params.p();
    let expo = params.nonlocal_exponent() + p - 1.0;
    Ok((2f64.powf(p) - 1.0) / 2f64.powf(expo) * lambda_t_closed(p, params.q())?)
}

/// `2^{p(q-r+1)/(q(r-1))}`, a Lipschitz constant of `α ↦ λ_α`.
pub fn lipschitz_constant(params: &Params) -> f64 {
    let (p, q, r) = (params.p(), params.q(), params.r());
    2f64.powf(p * (q - r + 1.0) / (q * (r - 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaturationConfig {
    /// Mesh size; the coarse mesh for error estimation has `n / 2` elements.
    pub n: usize,
    /// Bisection stops once the bracket is no wider than this.
    pub tol_alpha: f64,
    /// `δ_gap` is this multiple of the estimated discretization error of `λ_T`.
    pub gap_factor: f64,
    pub max_doublings: usize,
    pub solver: SolverConfig,
}

impl Default for SaturationConfig {
    fn default() -> Self {
        Self {
            n: 1024,
            tol_alpha: 1e-3,
            gap_factor: 10.0,
            max_doublings: 60,
            solver: SolverConfig::default(),
        }
    }
}

/// One evaluation of the bisection predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredicateSample {
    pub alpha: f64,
    pub lambda: f64,
    /// `λ_T - λ_α > δ_gap`.
    pub below: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    /// Midpoint of `bracket`.
    pub alpha_c: f64,
    pub bracket: (f64, f64),
    pub lambda_t: f64,
    /// Discrete twisted constants on `n / 2` and `n` elements.
    pub lambda_t_coarse: f64,
    pub lambda_t_fine: f64,
    pub delta_gap: f64,
    pub samples: Vec<PredicateSample>,
}

/// Discrete odd-branch value, which does not depend on `α`.
fn discrete_twisted(params: &Params, n: usize, solver: &SolverConfig) -> Result<f64> {
    let cfg = SolverConfig {
        random_starts: 0,
        ..solver.clone()
    };
    let res = match minimize_lambda_alpha(params, 0.0, n, &cfg) {
        Ok(r) => r,
        Err(Error::NotConverged { best }) => *best,
        Err(e) => return Err(e),
    };
    res.starts
        .iter()
        .find(|s| s.parity == Parity::Odd)
        .map(|s| s.lambda)
        .ok_or_else(|| domain("odd start missing"))
}

/// Solves at `alpha`, keeping the best iterate when no start meets the gradient tolerance.
fn solve(params: &Params, alpha: f64, n: usize, solver: &SolverConfig, warm: &WarmStart) -> Result<EigenResult> {
    let res = if warm.is_empty() {
        minimize_lambda_alpha(params, alpha, n, solver)
    } else {
        minimize_lambda_alpha_warm(params, alpha, n, solver, warm)
    };
    match res {
        Ok(r) => Ok(r),
        Err(Error::NotConverged { best }) => Ok(*best),
        Err(e) => Err(e),
    }
}

/// Locates `α_C` by bisection on `λ_T - λ_α > δ_gap`, with the default settings
/// apart from `n` and `tol_alpha`.
pub fn find_alpha_c(params: &Params, n: usize, tol_alpha: f64) -> Result<CriticalValue> {
    find_alpha_c_with(
        params,
        &SaturationConfig {
            n,
            tol_alpha,
            ..SaturationConfig::default()
        },
    )
}

pub fn find_alpha_c_with(params: &Params, cfg: &SaturationConfig) -> Result<CriticalValue> {
    if !params.in_theorem_range() {
        return Err(domain("parameters outside the range where the critical value exists"));
    }
    if !(cfg.tol_alpha > 0.0) {
        return Err(domain("tol_alpha must be positive"));
    }
    let n = cfg.n;
    if n % 4 != 0 {
        return Err(domain("n must be a multiple of 4 so that n/2 is a valid mesh"));
    }
    let lambda_t = lambda_t_closed(params.p(), params.q())?;
    let coarse = discrete_twisted(params, n / 2, &cfg.solver)?;
    let fine = discrete_twisted(params, n, &cfg.solver)?;
    let extrap = richardson(coarse, fine, 2.0);
    let delta_gap = cfg.gap_factor * extrap.error_estimate.max(1e-12 * lambda_t);

    let mut samples = Vec::new();
    let mut warm = WarmStart::default();
    let mut below = |alpha: f64, samples: &mut Vec<PredicateSample>| -> Result<bool> {
        let res = solve(params, alpha, n, &cfg.solver, &warm)?;
        let b = lambda_t - res.lambda > delta_gap;
        samples.push(PredicateSample {
            alpha,
            lambda: res.lambda,
            below: b,
        });
        warm = res.warm;
        Ok(b)
    };

    if !below(0.0, &mut samples)? {
        return Err(Error::Bracket(format!(
            "λ_0 is not below λ_T by δ_gap = {delta_gap:e}; the mesh is too coarse"
        )));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while below(hi, &mut samples)? {
        lo = hi;
        doublings += 1;
        if doublings > cfg.max_doublings {
            return Err(Error::Bracket(format!("predicate still holds at α = {hi:e}")));
        }
        hi *= 2.0;
    }
    while hi - lo > cfg.tol_alpha {
        let mid = 0.5 * (lo + hi);
        if below(mid, &mut samples)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalValue {
        alpha_c: 0.5 * (lo + hi),
        bracket: (lo, hi),
        lambda_t,
        lambda_t_coarse: coarse,
        lambda_t_fine: fine,
        delta_gap,
        samples,
    })
}

/// One point of a sweep in `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub alpha: f64,
    /// `None` when the solve failed; see `error`.
    pub lambda: Option<f64>,
    pub converged: bool,
    pub start_label: String,
    pub even_defect: f64,
    pub odd_defect: f64,
    pub r_average: f64,
    pub zero_count: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub params: Params,
    pub n: usize,
    pub alpha_grid: Vec<f64>,
    /// `NaN` where the solve failed.
    pub lambda_samples: Vec<f64>,
    pub samples: Vec<SweepSample>,
    pub lambda_t: f64,
    pub alpha_c: Option<f64>,
    pub alpha_c_bracket: Option<(f64, f64)>,
    pub critical: Option<CriticalValue>,
    pub lower_bound: f64,
    /// `α_C` in closed form, when `r = p + 1` and `q = p`.
    pub closed_form: Option<f64>,
    pub lipschitz_constant: f64,
    /// Slack used in the monotonicity and Lipschitz checks.
    pub tolerance: f64,
    pub monotone_ok: bool,
    pub lipschitz_ok: bool,
}

impl SaturationReport {
    pub fn with_critical(mut self, c: CriticalValue) -> Self {
        self.alpha_c = Some(c.alpha_c);
        self.alpha_c_bracket = Some(c.bracket);
        self.critical = Some(c);
        self
    }
}

/// Solves at every `α` in `alphas` (ascending), the first one from the standard
/// starts and each later one from the previous even and odd minimizers, and checks
/// monotonicity and the Lipschitz bound with slack `2 · grad_tol · max(1, |λ|)`.
pub fn sweep_alpha(params: &Params, alphas: &[f64], n: usize, solver: &SolverConfig) -> Result<SaturationReport> {
    if alphas.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(domain("alphas must be sorted ascending"));
    }
    let lambda_t = lambda_t_closed(params.p(), params.q())?;
    let closed_form = if params.is_kinked() && (params.q() - params.p()).abs() <= 1e-12 {
        Some(alpha_c_closed_rp1(params.p(), params.q())?)
    } else {
        None
    };
    let mut warm = WarmStart::default();
    let mut samples = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let sample = match solve(params, alpha, n, solver, &warm) {
            Ok(res) => {
                let d = symmetry_diagnostics(&res.minimizer, params)?;
                let s = SweepSample {
                    alpha,
                    lambda: Some(res.lambda),
                    converged: res.converged,
                    start_label: res.start_label.clone(),
                    even_defect: d.even_defect,
                    odd_defect: d.odd_defect,
                    r_average: d.r_average,
                    zero_count: d.zero_count,
                    error: None,
                };
                warm = res.warm;
                s
            }
            Err(e) => SweepSample {
                alpha,
                lambda: None,
                converged: false,
                start_label: String::new(),
                even_defect: f64::NAN,
                odd_defect: f64::NAN,
                r_average: f64::NAN,
                zero_count: 0,
                error: Some(e.to_string()),
            },
        };
        samples.push(sample);
    }

    let lambda_samples: Vec<f64> = samples.iter().map(|s| s.lambda.unwrap_or(f64::NAN)).collect();
    let scale = lambda_samples.iter().filter(|v| v.is_finite()).fold(1.0f64, |m, v| m.max(v.abs()));
    let tolerance = solver.grad_tol * scale;
    let lip = lipschitz_constant(params);
    let (mut monotone_ok, mut lipschitz_ok) = (true, true);
    for w in samples.windows(2) {
        let (Some(l0), Some(l1)) = (w[0].lambda, w[1].lambda) else {
            continue;
        };
        let eps = w[1].alpha - w[0].alpha;
        monotone_ok &= l0 <= l1 + 2.0 * tolerance;
        lipschitz_ok &= l1 - l0 <= lip * eps + 2.0 * tolerance;
    }
    Ok(SaturationReport {
        params: *params,
        n,
        alpha_grid: alphas.to_vec(),
        lambda_samples,
        samples,
        lambda_t,
        alpha_c: None,
        alpha_c_bracket: None,
        critical: None,
        lower_bound: alpha_c_lower_bound(params)?,
        closed_form,
        lipschitz_constant: lip,
        tolerance,
        monotone_ok,
        lipschitz_ok,
    })
}
