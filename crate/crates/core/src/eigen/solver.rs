//! Multi-start preconditioned nonlinear conjugate gradients for `min Q_α`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gtrig::PqTrig;
use crate::params::Params;

use super::grid::{check_mesh, GridFunction};
use super::quotient::Quotient;

/// Settings for [`minimize_lambda_alpha`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop when `‖∇Q‖₂ <= grad_tol · max(1, |λ|)`.
    pub grad_tol: f64,
    /// Randomized starts in addition to the even and odd profiles.
    pub random_starts: usize,
    pub seed: u64,
    /// Amplitude of the random Fourier perturbation.
    pub perturbation: f64,
    /// Iterations without improvement after which a run is abandoned.
    pub stall_iterations: usize,
    /// CG restart period; `None` means `n / 2`.
    pub restart: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            grad_tol: 1e-8,
            random_starts: 2,
            seed: 0,
            perturbation: 0.3,
            stall_iterations: 500,
            restart: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(domain("grad_tol must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(domain("max_iterations must be positive"));
        }
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return Err(domain("perturbation must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// Symmetry subspace a run is confined to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Free,
}

impl Parity {
    fn project(self, v: &mut [f64]) {
        let len = v.len();
        match self {
            Parity::Free => {}
            Parity::Even => {
                for i in 0..len / 2 {
                    let s = 0.5 * (v[i] + v[len - 1 - i]);
                    v[i] = s;
                    v[len - 1 - i] = s;
                }
            }
            Parity::Odd => {
                for i in 0..len / 2 {
                    let s = 0.5 * (v[i] - v[len - 1 - i]);
                    v[i] = s;
                    v[len - 1 - i] = -s;
                }
                v[len / 2] = 0.0;
            }
        }
    }
}

/// Outcome of one start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub label: String,
    pub parity: Parity,
    pub lambda: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizers of the even and odd runs, reusable as starting points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WarmStart {
    pub even: Option<GridFunction>,
    pub odd: Option<GridFunction>,
}

impl WarmStart {
    pub fn is_empty(&self) -> bool {
        self.even.is_none() && self.odd.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda: f64,
    /// Normalized to unit `q`-norm, with `max u >= |min u|`.
    pub minimizer: GridFunction,
    /// `∫|u|^{r-2}u` of the minimizer.
    pub gamma: f64,
    pub grad_norm: f64,
    pub start_label: String,
    pub iterations: usize,
    pub converged: bool,
    pub params: Params,
    pub alpha: f64,
    pub starts: Vec<StartSummary>,
    #[serde(skip)]
    pub warm: WarmStart,
}

struct Run {
    summary: StartSummary,
    x: Vec<f64>,
    gamma: f64,
}

struct Start {
    label: String,
    parity: Parity,
    x: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `(2/h) tridiag(-1, 2, -1) z = g`, the stiffness matrix of `2∫u'v'`.
fn precondition(g: &[f64], h: f64, z: &mut [f64], scratch: &mut [f64]) {
    let m = g.len();
    let diag = 4.0 / h;
    let off = -2.0 / h;
    // Thomas algorithm; the matrix is diagonally dominant and symmetric.
    let mut denom = diag;
    scratch[0] = off / denom;
    z[0] = g[0] / denom;
    for i in 1..m {
        denom = diag - off * scratch[i - 1];
        scratch[i] = off / denom;
        z[i] = (g[i] - off * z[i - 1]) / denom;
    }
    for i in (0..m - 1).rev() {
        z[i] -= scratch[i] * z[i + 1];
    }
}

/// Scales `x` to unit `q`-norm, returning the factor applied.
fn normalize(quot: &Quotient, x: &mut [f64]) -> Result<f64> {
    let f = quot.functionals(x);
    let norm = f.q_mass.powf(1.0 / quot.disc.params.q());
    if !(norm >= 1e-14) {
        return Err(Error::ZeroFunction { norm });
    }
    let c = 1.0 / norm;
    x.iter_mut().for_each(|v| *v *= c);
    Ok(c)
}

struct Trial {
    t: f64,
    f: f64,
    g: Vec<f64>,
    slope: f64,
}

fn trial(quot: &Quotient, parity: Parity, x: &[f64], d: &[f64], t: f64, buf: &mut Vec<f64>) -> Option<Trial> {
    buf.clear();
    buf.extend(x.iter().zip(d).map(|(a, b)| a + t * b));
    let mut g = vec![0.0; x.len()];
    let (f, _) = quot.eval(buf, Some(&mut g)).ok()?;
    if !f.is_finite() {
        return None;
    }
    parity.project(&mut g);
    let slope = dot(&g, d);
    Some(Trial { t, f, g, slope })
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// Backtracking on the Armijo condition. Once the trial value is within `noise` of
/// `f0` the values carry no information and the slope `φ'(t)` brackets the step instead.
#[allow(clippy::too_many_arguments)]
fn line_search(
    quot: &Quotient,
    parity: Parity,
    x: &[f64],
    d: &[f64],
    f0: f64,
    slope0: f64,
    mut t: f64,
    noise: f64,
    buf: &mut Vec<f64>,
) -> Option<Trial> {
    let (mut lo, mut hi) = ((0.0, slope0), None::<(f64, f64)>);
    for _ in 0..MAX_HALVINGS {
        let Some(tr) = trial(quot, parity, x, d, t, buf) else {
            t *= 0.5;
            continue;
        };
        if tr.f <= f0 + ARMIJO * tr.t * slope0 {
            return Some(tr);
        }
        if tr.f - f0 > noise {
            hi = Some((t, tr.slope));
            t *= 0.5;
            continue;
        }
        if tr.slope.abs() <= 0.9 * slope0.abs() {
            return Some(tr);
        }
        if tr.slope > 0.0 {
            hi = Some((t, tr.slope));
        } else {
            lo = (t, tr.slope);
        }
        t = match hi {
            None => 4.0 * t,
            Some((th, sh)) => {
                let (tl, sl) = lo;
                let w = th - tl;
                if sh > sl {
                    (tl - sl * w / (sh - sl)).clamp(tl + 0.1 * w, th - 0.1 * w)
                } else {
                    tl + 0.5 * w
                }
            }
        };
    }
    None
}

fn run_start(quot: &Quotient, start: Start, cfg: &SolverConfig) -> Result<Run> {
    let Start { label, parity, mut x } = start;
    let m = x.len();
    let h = quot.disc.h;
    let restart = cfg.restart.unwrap_or(quot.n() / 2).max(1);

    parity.project(&mut x);
    normalize(quot, &mut x)?;
    let mut g = vec![0.0; m];
    let (mut f, _) = quot.eval(&x, Some(&mut g))?;
    parity.project(&mut g);

    let mut z = vec![0.0; m];
    let mut scratch = vec![0.0; m];
    let mut buf = Vec::with_capacity(m);
    precondition(&g, h, &mut z, &mut scratch);
    let mut d: Vec<f64> = z.iter().map(|v| -v).collect();
    let mut gz = dot(&g, &z);
    let mut t_prev = 1.0;
    let mut slope_prev = f64::NAN;

    let mut best_f = f;
    let mut best_g = f64::INFINITY;
    let mut since_progress = 0;
    let mut since_restart = 0;
    let mut iterations = 0;
    let mut converged = false;
    // Value noise floor: below it, line-search decisions fall back to slopes.
    let noise = |f: f64| 64.0 * f64::EPSILON * f.abs().max(1.0);

    loop {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm <= cfg.grad_tol * f.abs().max(1.0) {
            converged = true;
            break;
        }
        if gnorm < best_g * 0.999 || f < best_f - noise(best_f) {
            best_g = best_g.min(gnorm);
            best_f = best_f.min(f);
            since_progress = 0;
        } else {
            since_progress += 1;
        }
        if iterations >= cfg.max_iterations || since_progress > cfg.stall_iterations {
            break;
        }
        iterations += 1;

        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            d.iter_mut().zip(&z).for_each(|(di, zi)| *di = -zi);
            slope = -gz;
            since_restart = 0;
        }
        let mut t = if slope_prev.is_finite() { (t_prev * slope_prev / slope).clamp(1e-3 * t_prev, 1e3 * t_prev) } else { 1.0 };
        let scale = dot(&d, &d).sqrt().max(1e-300);
        if t * scale > 0.5 {
            t = 0.5 / scale;
        }

        let acceptable = |tr: &Trial| {
            tr.f <= f + ARMIJO * tr.t * slope
                || (tr.f - f <= noise(f) && tr.slope.abs() <= 0.9 * slope.abs())
        };
        let accepted = line_search(quot, parity, &x, &d, f, slope, t, noise(f), &mut buf);
        let Some(mut tr) = accepted else { break };

        // one secant refinement towards the exact line minimum
        if tr.slope.abs() > 0.1 * slope.abs() && tr.slope != slope {
            let ts = tr.t * slope / (slope - tr.slope);
            if ts > 0.0 && ts.is_finite() && ts <= 8.0 * tr.t {
                if let Some(tr2) = trial(quot, parity, &x, &d, ts, &mut buf) {
                    if acceptable(&tr2) && tr2.slope.abs() < tr.slope.abs() && tr2.f <= tr.f + noise(f) {
                        tr = tr2;
                    }
                }
            }
        }

        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += tr.t * di;
        }
        let c = normalize(quot, &mut x)?;
        f = tr.f;
        let g_new: Vec<f64> = tr.g.iter().map(|v| v / c).collect();
        d.iter_mut().for_each(|v| *v *= c);
        t_prev = tr.t;
        slope_prev = slope * c * c;

        let mut z_new = vec![0.0; m];
        precondition(&g_new, h, &mut z_new, &mut scratch);
        let gz_new = dot(&g_new, &z_new);
        since_restart += 1;
        let beta = if since_restart >= restart {
            since_restart = 0;
            0.0
        } else {
            let num = g_new.iter().zip(&z_new).zip(&z).map(|((gn, zn), zo)| gn * (zn - zo)).sum::<f64>();
            (num / gz).max(0.0)
        };
        for (di, zi) in d.iter_mut().zip(&z_new) {
            *di = -zi + beta * *di;
        }
        g = g_new;
        z = z_new;
        gz = gz_new;
    }

    // refresh value and gradient at the normalized final iterate
    let (fval, funcs) = quot.eval(&x, Some(&mut g))?;
    parity.project(&mut g);
    let grad_norm = dot(&g, &g).sqrt();
    if !converged {
        converged = grad_norm <= cfg.grad_tol * fval.abs().max(1.0);
    }
    Ok(Run {
        summary: StartSummary {
            label,
            parity,
            lambda: fval,
            grad_norm,
            iterations,
            converged,
        },
        x,
        gamma: funcs.r_average,
    })
}

fn resample(u: &GridFunction, n: usize) -> Vec<f64> {
    if u.n() == n {
        return u.values().to_vec();
    }
    let h = 2.0 / n as f64;
    (1..n).map(|i| u.eval(-1.0 + i as f64 * h)).collect()
}

fn standard_starts(params: &Params, n: usize, cfg: &SolverConfig) -> Result<Vec<Start>> {
    let trig = PqTrig::new(params.p(), params.q())?;
    let pi = trig.pi();
    let h = 2.0 / n as f64;
    let nodes: Vec<f64> = (1..n).map(|i| -1.0 + i as f64 * h).collect();
    // both profiles are reflections of their values on x < 0
    let half = n / 2;
    let mut even = vec![0.0; n - 1];
    let mut odd = vec![0.0; n - 1];
    for i in 0..half - 1 {
        let x = nodes[i];
        even[i] = trig.sin(0.5 * pi * (x + 1.0));
        even[n - 2 - i] = even[i];
        odd[i] = trig.sin(pi * x);
        odd[n - 2 - i] = -odd[i];
    }
    even[half - 1] = 1.0;

    let mut starts = vec![
        Start {
            label: "even".into(),
            parity: Parity::Even,
            x: even.clone(),
        },
        Start {
            label: "odd".into(),
            parity: Parity::Odd,
            x: odd.clone(),
        },
    ];
    for k in 0..cfg.random_starts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64));
        let (name, base) = if k % 2 == 0 { ("even", &even) } else { ("odd", &odd) };
        let coeffs: Vec<f64> = (1..=8).map(|j| cfg.perturbation * rng.gen_range(-1.0..1.0) / j as f64).collect();
        let x = nodes
            .iter()
            .zip(base)
            .map(|(&x, &b)| {
                let s: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * ((j + 1) as f64 * 0.5 * std::f64::consts::PI * (x + 1.0)).sin())
                    .sum();
                b + s
            })
            .collect();
        starts.push(Start {
            label: format!("random-{name}-{k}"),
            parity: Parity::Free,
            x,
        });
    }
    Ok(starts)
}

fn warm_starts(n: usize, warm: &WarmStart) -> Vec<Start> {
    let mut starts = Vec::new();
    if let Some(u) = &warm.even {
        starts.push(Start {
            label: "even".into(),
            parity: Parity::Even,
            x: resample(u, n),
        });
    }
    if let Some(u) = &warm.odd {
        starts.push(Start {
            label: "odd".into(),
            parity: Parity::Odd,
            x: resample(u, n),
        });
    }
    starts
}

/// Minimizes `Q_α` over piecewise-linear functions on `n` elements.
///
/// Runs an even-subspace start from `sin_{p,q}(π_{p,q}(x+1)/2)`, an odd-subspace start
/// from `sin_{p,q}(π_{p,q}x)`, and `cfg.random_starts` unconstrained starts from randomly
/// perturbed copies of these, in parallel. The smallest converged value wins; values
/// within `1e-10` of each other prefer the even start.
pub fn minimize_lambda_alpha(params: &Params, alpha: f64, n: usize, cfg: &SolverConfig) -> Result<EigenResult> {
    minimize_lambda_alpha_warm(params, alpha, n, cfg, &WarmStart::default())
}

/// As [`minimize_lambda_alpha`], but starting the even and odd runs from `warm`
/// (resampled to `n` elements if necessary) and skipping the random starts. A branch
/// missing from `warm` falls back to its standard profile.
pub fn minimize_lambda_alpha_warm(
    params: &Params,
    alpha: f64,
    n: usize,
    cfg: &SolverConfig,
    warm: &WarmStart,
) -> Result<EigenResult> {
    check_mesh(n)?;
    cfg.validate()?;
    if !alpha.is_finite() {
        return Err(domain("alpha must be finite"));
    }
    let starts = if warm.is_empty() {
        standard_starts(params, n, cfg)?
    } else {
        let mut s = warm_starts(n, warm);
        let quiet = SolverConfig {
            random_starts: 0,
            ..cfg.clone()
        };
        for fallback in standard_starts(params, n, &quiet)? {
            if !s.iter().any(|st| st.parity == fallback.parity) {
                s.push(fallback);
            }
        }
        s
    };

    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|start| {
            let quot = Quotient::new(n, *params, alpha)?;
            run_start(&quot, start, cfg)
        })
        .collect::<Result<_>>()?;

    let pick = |only_converged: bool| -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, r) in runs.iter().enumerate() {
            if only_converged && !r.summary.converged {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) => {
                    let (lb, li) = (runs[b].summary.lambda, r.summary.lambda);
                    let tie = (li - lb).abs() <= 1e-10 * lb.abs().max(1.0);
                    let prefer_new = if tie {
                        r.summary.parity == Parity::Even && runs[b].summary.parity != Parity::Even
                    } else {
                        li < lb
                    };
                    Some(if prefer_new { i } else { b })
                }
            };
        }
        best
    };

    let converged = pick(true);
    let winner = converged.or_else(|| pick(false)).expect("at least two starts");
    let mut warm_out = WarmStart::default();
    for r in &runs {
        let slot = match r.summary.parity {
            Parity::Even => &mut warm_out.even,
            Parity::Odd => &mut warm_out.odd,
            Parity::Free => continue,
        };
        *slot = Some(GridFunction::from_raw(n, r.x.clone()));
    }
    let w = &runs[winner];
    let mut values = w.x.clone();
    let (mx, mn) = values.iter().fold((f64::MIN, f64::MAX), |(a, b), &v| (a.max(v), b.min(v)));
    let mut gamma = w.gamma;
    if -mn > mx {
        values.iter_mut().for_each(|v| *v = -*v);
        gamma = -gamma;
    }
    let result = EigenResult {
        lambda: w.summary.lambda,
        minimizer: GridFunction::from_raw(n, values),
        gamma,
        grad_norm: w.summary.grad_norm,
        start_label: w.summary.label.clone(),
        iterations: w.summary.iterations,
        converged: converged.is_some(),
        params: *params,
        alpha,
        starts: runs.iter().map(|r| r.summary.clone()).collect(),
        warm: warm_out,
    };
    if converged.is_some() {
        Ok(result)
    } else {
        Err(Error::NotConverged { best: Box::new(result) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::closed::{lambda_p_closed, lambda_t_closed};

    fn prm(p: f64, q: f64, r: f64) -> Params {
        Params::new(p, q, r).unwrap()
    }

    #[test]
    fn preconditioner_solves_tridiagonal_system() {
        let m = 9;
        let h = 0.2;
        let g: Vec<f64> = (0..m).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut z = vec![0.0; m];
        let mut s = vec![0.0; m];
        precondition(&g, h, &mut z, &mut s);
        for i in 0..m {
            let left = if i > 0 { z[i - 1] } else { 0.0 };
            let right = if i + 1 < m { z[i + 1] } else { 0.0 };
            let back = (2.0 / h) * (2.0 * z[i] - left - right);
            assert!((back - g[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_projection() {
        let mut v = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        Parity::Odd.project(&mut v);
        assert_eq!(v, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        let mut w = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        Parity::Even.project(&mut w);
        assert_eq!(w, vec![3.0, 3.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn dirichlet_case() {
        let res = minimize_lambda_alpha(&prm(2.0, 2.0, 2.0), 0.0, 128, &SolverConfig::default()).unwrap();
        let exact = lambda_p_closed(2.0, 2.0).unwrap();
        assert!((res.lambda - exact).abs() < 1e-3 * exact, "{}", res.lambda);
        assert_eq!(res.start_label, "even");
        assert!(res.minimizer.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn large_alpha_selects_odd_branch() {
        let res = minimize_lambda_alpha(&prm(2.0, 2.0, 3.0), 40.0, 128, &SolverConfig::default()).unwrap();
        let exact = lambda_t_closed(2.0, 2.0).unwrap();
        assert!((res.lambda - exact).abs() < 2e-3 * exact, "{}", res.lambda);
        assert!(res.gamma.abs() < 1e-10);
        assert_eq!(res.start_label, "odd");
    }

    #[test]
    fn warm_start_reproduces_result() {
        let params = prm(2.5, 2.0, 2.5);
        let cfg = SolverConfig::default();
        let cold = minimize_lambda_alpha(&params, 3.0, 64, &cfg).unwrap();
        let warm = minimize_lambda_alpha_warm(&params, 3.0, 64, &cfg, &cold.warm).unwrap();
        assert!((cold.lambda - warm.lambda).abs() < 1e-9 * cold.lambda);
        assert!(warm.iterations <= cold.iterations.max(5));
    }

    #[test]
    fn negative_alpha_gives_negative_lambda() {
        let res = minimize_lambda_alpha(&prm(2.0, 2.0, 3.0), -10.0, 64, &SolverConfig::default()).unwrap();
        assert!(res.lambda < 0.0);
    }
}
