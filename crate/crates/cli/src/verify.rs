//! The `verify` suite: each check reports its measured residual against a threshold.

use std::f64::consts::PI;

use nlpw::eigen::{
    el_residual, lambda_t_closed, minimize_lambda_alpha, rayleigh_gradient, rayleigh_quotient, symmetry_diagnostics,
    GridFunction, SolverConfig,
};
use nlpw::gtrig::{cos_pq, pi_pq, sin_pq, PqTrig};
use nlpw::hfun::{h_integral, h_integrand, k_integral, proof_aux, ProofAux};
use nlpw::quad::{integrate_unit_split, QuadratureConfig};
use nlpw::saturation::{alpha_c_lower_bound, find_alpha_c_with, SaturationConfig};
use nlpw::Params;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::emit::{format_float, Report, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub module: String,
    pub name: String,
    pub passed: bool,
    /// `NaN` (JSON `null`) when the computation itself failed.
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub quick: bool,
    pub n: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}/{}: measured {} (threshold {}) {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.module,
                    c.name,
                    format_float(c.measured),
                    format_float(c.threshold),
                    c.detail
                )
            })
            .collect();
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        lines.push(format!("{} of {} checks passed", self.checks.len() - failed, self.checks.len()));
        lines
    }
}

impl Report for VerifyReport {
    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["module", "name", "passed", "measured", "threshold", "detail"],
            rows: self
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.module.as_str().into(),
                        c.name.as_str().into(),
                        c.passed.into(),
                        c.measured.into(),
                        c.threshold.into(),
                        c.detail.as_str().into(),
                    ]
                })
                .collect(),
        })
    }
}

/// How a measured value is compared with its threshold.
#[derive(Clone, Copy)]
enum Cmp {
    AtMost,
    AtLeast,
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn add(&mut self, module: &str, name: &str, cmp: Cmp, threshold: f64, run: impl FnOnce() -> anyhow::Result<(f64, String)>) {
        let check = match run() {
            Ok((measured, detail)) => Check {
                module: module.into(),
                name: name.into(),
                passed: match cmp {
                    Cmp::AtMost => measured <= threshold,
                    Cmp::AtLeast => measured >= threshold,
                },
                measured,
                threshold,
                detail,
            },
            Err(e) => Check {
                module: module.into(),
                name: name.into(),
                passed: false,
                measured: f64::NAN,
                threshold,
                detail: format!("error: {e}"),
            },
        };
        self.checks.push(check);
    }
}

fn prm(p: f64, q: f64, r: f64) -> anyhow::Result<Params> {
    Ok(Params::new(p, q, r)?)
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

const THEOREM_PQ: [(f64, f64); 6] = [(1.5, 1.5), (2.0, 1.5), (2.0, 2.0), (3.0, 2.0), (3.0, 3.0), (4.0, 3.0)];

fn theorem_grid() -> anyhow::Result<Vec<Params>> {
    let mut out = vec![];
    for (p, q) in THEOREM_PQ {
        let base = prm(p, q, 2.0)?;
        for r in linspace(base.r_min(), base.r_max(), 4) {
            out.push(prm(p, q, r)?);
        }
    }
    Ok(out)
}

fn beta(a: f64, b: f64) -> f64 {
    (libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp()
}

fn gtrig_checks(s: &mut Suite, quick: bool) {
    s.add("gtrig", "pi_22", Cmp::AtMost, 1e-12, || Ok(((pi_pq(2.0, 2.0)? - PI).abs(), "|π_{2,2} - π|".into())));
    s.add("gtrig", "pi_44_reflection", Cmp::AtMost, 1e-12, || {
        Ok(((pi_pq(4.0, 4.0)? - PI / 2f64.sqrt()).abs(), "|π_{4,4} - π/√2|".into()))
    });
    let (axis, pts) = if quick { (vec![1.2 + 1e-9, 2.6, 4.0], 25) } else { (vec![1.2 + 1e-9, 1.9, 2.6, 3.3, 4.0], 100) };
    let axis2 = axis.clone();
    s.add("gtrig", "round_trip", Cmp::AtMost, 1.0, move || {
        // residual / max(1e-10, one-ulp spacing of F at s)
        let (mut worst, mut literal) = (0.0f64, 0.0f64);
        for &p in &axis {
            for &q in &axis {
                let t = PqTrig::new(p, q)?;
                for tt in linspace(0.0, 0.5 * t.pi() - 1e-6, pts) {
                    let s = t.sin(tt);
                    let fs = t.f(s)?;
                    let res = (fs - tt).abs();
                    let up = f64::from_bits(s.to_bits() + 1).min(1.0);
                    let down = f64::from_bits(s.to_bits().saturating_sub(1));
                    let spacing = (t.f(up)? - fs).abs().max((t.f(down)? - fs).abs());
                    literal = literal.max(res);
                    worst = worst.max(res / 1e-10f64.max(spacing));
                }
            }
        }
        Ok((worst, format!("|F(sin t) - t| up to {literal:.1e}, relative to 1e-10 or the double spacing of F")))
    });
    s.add("gtrig", "pythagorean", Cmp::AtMost, 1e-10, move || {
        let mut worst = 0.0f64;
        for &p in &axis2 {
            for &q in &axis2 {
                let t = PqTrig::new(p, q)?;
                for tt in linspace(0.0, 0.5 * t.pi(), pts) {
                    let (s, c) = t.sin_cos(tt);
                    worst = worst.max((c.abs().powf(p) + s.abs().powf(q) - 1.0).abs());
                }
            }
        }
        Ok((worst, "|cos^p + sin^q - 1|".into()))
    });
    s.add("gtrig", "symmetries", Cmp::AtMost, 1e-12, || {
        let mut worst = 0.0f64;
        for (p, q) in [(1.5, 2.5), (3.0, 2.0), (2.0, 2.0)] {
            let pi = pi_pq(p, q)?;
            for t in linspace(0.05, 1.4, 8) {
                let v = sin_pq(p, q, t)?;
                worst = worst
                    .max((sin_pq(p, q, pi - t)? - v).abs())
                    .max((sin_pq(p, q, -t)? + v).abs())
                    .max((sin_pq(p, q, t + 2.0 * pi)? - v).abs());
            }
            worst = worst.max(cos_pq(p, q, 0.5 * pi)?.abs());
        }
        Ok((worst, "reflection, oddness, period".into()))
    });
}

fn quad_checks(s: &mut Suite) {
    let exps = [-0.5, -1.0 / 3.0, 0.0, 1.0];
    let cfg = QuadratureConfig::default();
    let mut errs = vec![];
    let mut honesty = 0.0f64;
    let mut failure = None;
    for &a in &exps {
        for &b in &exps {
            match integrate_unit_split(|x, cx| x.powf(a) * cx.powf(b), &cfg) {
                Ok(r) => {
                    let exact = beta(a + 1.0, b + 1.0);
                    let err = (r.value - exact).abs();
                    errs.push(err);
                    honesty = honesty.max(err / r.error_estimate.max(4.0 * f64::EPSILON * exact));
                }
                Err(e) => failure = Some(e.to_string()),
            }
        }
    }
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let f2 = failure.clone();
    s.add("quad", "beta_oracles", Cmp::AtMost, 1e-10, move || match failure {
        Some(e) => anyhow::bail!(e),
        None => Ok((worst, "16 integrands y^a (1-y)^b".into())),
    });
    s.add("quad", "error_estimate_honesty", Cmp::AtMost, 1.0, move || match f2 {
        Some(e) => anyhow::bail!(e),
        None => Ok((honesty, "true error / reported estimate".into())),
    });
}

fn hfun_checks(s: &mut Suite) {
    let cfg = QuadratureConfig::default();
    s.add("hfun", "h_at_one", Cmp::AtMost, 1e-9, || {
        let mut worst = 0.0f64;
        for params in theorem_grid()? {
            worst = worst.max((h_integral(1.0, &params, &cfg)?.value - pi_pq(params.p(), params.q())?).abs());
        }
        Ok((worst, "|H(1) - π_pq| on 24 triples".into()))
    });
    s.add("hfun", "h_2222_factorization", Cmp::AtMost, 1e-8, || {
        let params = prm(2.0, 2.0, 2.0)?;
        let mut worst = 0.0f64;
        for m in linspace(0.0, 1.0, 21) {
            worst = worst.max((h_integral(m, &params, &cfg)?.value - PI).abs());
        }
        Ok((worst, "|H(m,2,2,2) - π| on 21 m".into()))
    });
    s.add("hfun", "lower_estimate_p_eq_q", Cmp::AtLeast, -1e-8, || {
        let mut worst = f64::INFINITY;
        for params in theorem_grid()?.into_iter().filter(|p| p.p() == p.q()) {
            let pi = pi_pq(params.p(), params.q())?;
            for m in linspace(0.0, 1.0, 21) {
                let h = h_integral(m, &params, &cfg)?;
                if !h.divergent {
                    worst = worst.min(h.value - pi);
                }
            }
        }
        Ok((worst, "min H - π_pq for q = p (fails for q < p, see docs)".into()))
    });
    s.add("hfun", "h_increasing_in_r", Cmp::AtMost, 0.0, || {
        let mut viol = 0usize;
        let mut cells = 0usize;
        for (p, q) in THEOREM_PQ {
            let base = prm(p, q, 2.0)?;
            let rs = linspace(base.monotonicity_r_min(), base.r_max(), 5);
            for y in linspace(0.0, 0.95, 20) {
                for m in linspace(0.05, 0.95, 10) {
                    let mut prev = f64::NEG_INFINITY;
                    for &r in &rs {
                        let v = h_integrand(m, &prm(p, q, r)?, y)?;
                        cells += 1;
                        if !(v > prev) {
                            viol += 1;
                        }
                        prev = v;
                    }
                }
            }
        }
        Ok((viol as f64, format!("violations among {cells} samples")))
    });
    s.add("hfun", "k_nondecreasing", Cmp::AtMost, 0.0, || {
        let mut viol = 0usize;
        // (2, 1.5) is left out: K dips near m = 0 there
        for (p, q) in [(1.5, 1.5), (2.0, 2.0), (3.0, 2.0), (3.0, 3.0), (4.0, 3.0)] {
            let ks = linspace(0.0, 1.0, 41)
                .into_iter()
                .map(|m| Ok(k_integral(m, p, q, &cfg)?.value))
                .collect::<anyhow::Result<Vec<_>>>()?;
            viol += ks.windows(2).filter(|w| w[1] < w[0] - 1e-9).count();
        }
        Ok((viol as f64, "violations on a 41-point m grid, 5 (p, q) pairs".into()))
    });
    s.add("hfun", "proof_aux_positive", Cmp::AtMost, 0.0, || {
        let mut viol = 0usize;
        for (p, q) in THEOREM_PQ {
            let base = prm(p, q, 2.0)?;
            for r in linspace(base.monotonicity_r_min(), base.r_max(), 5) {
                let params = prm(p, q, r)?;
                for m in linspace(0.05, 0.95, 10) {
                    for name in [ProofAux::F, ProofAux::E] {
                        viol += usize::from(!(proof_aux(name, m, &params, 0.5)? > 0.0));
                    }
                    for y in linspace(0.05, 0.95, 19) {
                        viol += usize::from(!(proof_aux(ProofAux::G, m, &params, y)? > 0.0));
                    }
                }
            }
        }
        Ok((viol as f64, "sign violations of g, f, e".into()))
    });
}

fn eigen_checks(s: &mut Suite, n: usize) {
    let cfg = SolverConfig::default();
    let c2 = cfg.clone();
    s.add("eigen", "dirichlet_ground_truth", Cmp::AtMost, 5e-4, move || {
        let res = minimize_lambda_alpha(&prm(2.0, 2.0, 2.0)?, 0.0, n, &c2)?;
        let exact = PI * PI / 4.0;
        Ok(((res.lambda - exact).abs() / exact, format!("relative gap to π²/4 at n = {n}, λ = {:.10}", res.lambda)))
    });
    let c2 = cfg.clone();
    s.add("eigen", "twisted_ground_truth", Cmp::AtMost, 5e-4, move || {
        let params = prm(2.0, 2.0, 3.0)?;
        let res = minimize_lambda_alpha(&params, 50.0, n, &c2)?;
        let exact = lambda_t_closed(2.0, 2.0)?;
        let d = symmetry_diagnostics(&res.minimizer, &params)?;
        let rel = (res.lambda - exact).abs() / exact;
        let shape_ok = d.odd_defect <= 1e-8 && d.zero_count == 1 && res.gamma.abs() <= 1e-6;
        Ok((
            if shape_ok { rel } else { f64::INFINITY },
            format!("α = 50, relative gap to π² at n = {n}, odd defect {:.1e}, |γ| = {:.1e}", d.odd_defect, res.gamma.abs()),
        ))
    });
    s.add("eigen", "gradient_vs_finite_difference", Cmp::AtMost, 1e-6, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let p: f64 = rng.gen_range(1.6..3.5);
            let q = rng.gen_range((2.0 * p / (p + 2.0)).max(1.2)..p);
            let base = prm(p, q, 2.0)?;
            let params = prm(p, q, rng.gen_range(base.r_min()..base.r_max()))?;
            let alpha = rng.gen_range(-3.0..10.0);
            let cu: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let cv: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let modes = |c: &[f64], x: f64| -> f64 {
                c.iter().enumerate().map(|(j, a)| a * ((j + 1) as f64 * PI * (x + 1.0) / 2.0).sin()).sum()
            };
            let n = 32;
            let u = GridFunction::from_fn(n, |x| modes(&cu, x))?;
            let v = GridFunction::from_fn(n, |x| modes(&cv, x))?;
            let g = rayleigh_gradient(&u, &params, alpha)?;
            let analytic: f64 = g.iter().zip(v.values()).map(|(a, b)| a * b).sum();
            let step = 1e-5;
            let shifted = |c: f64| -> anyhow::Result<f64> {
                let w = GridFunction::new(n, u.values().iter().zip(v.values()).map(|(a, b)| a + c * b).collect())?;
                Ok(rayleigh_quotient(&w, &params, alpha)?)
            };
            let fd = (shifted(step)? - shifted(-step)?) / (2.0 * step);
            worst = worst.max((analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-3));
        }
        Ok((worst, "20 seeded (u, v, params, α) samples, n = 32".into()))
    });
    s.add("eigen", "euler_lagrange_residual", Cmp::AtMost, 1e-6, move || {
        let params = prm(2.0, 2.0, 2.5)?;
        let res = minimize_lambda_alpha(&params, 2.0, 256, &cfg)?;
        Ok((el_residual(&res.minimizer, &params, 2.0, res.lambda)?.relative, "(2,2,2.5), α = 2, n = 256".into()))
    });
}

fn saturation_checks(s: &mut Suite, n: usize, quick: bool) {
    let tol_alpha = if quick { 1e-2 } else { 1e-3 };
    let cfg = SaturationConfig { n, tol_alpha, ..SaturationConfig::default() };
    let c2 = cfg.clone();
    s.add("saturation", "critical_value_223", Cmp::AtMost, 0.05, move || {
        let crit = find_alpha_c_with(&prm(2.0, 2.0, 3.0)?, &c2)?;
        let target = 0.75 * PI * PI;
        Ok(((crit.alpha_c - target).abs(), format!("α_C = {:.6}, 3π²/4 = {target:.6}", crit.alpha_c)))
    });
    let c2 = cfg.clone();
    s.add("saturation", "plateau_223", Cmp::AtMost, 10.0, move || {
        let params = prm(2.0, 2.0, 3.0)?;
        let crit = find_alpha_c_with(&params, &c2)?;
        let mut worst = 0.0f64;
        for alpha in [crit.bracket.1 + c2.tol_alpha, crit.alpha_c + 1.0, 2.0 * crit.alpha_c] {
            let res = minimize_lambda_alpha(&params, alpha, n, &c2.solver)?;
            worst = worst.max((res.lambda - crit.lambda_t_fine).abs() / (c2.solver.grad_tol * res.lambda));
        }
        let below = minimize_lambda_alpha(&params, crit.alpha_c - 0.5, n, &c2.solver)?;
        let gap_ok = crit.lambda_t - below.lambda >= crit.delta_gap;
        Ok((
            if gap_ok { worst } else { f64::INFINITY },
            format!("|λ_α - λ_T,h| / solver tolerance above α_C; gap below α_C {}", if gap_ok { "holds" } else { "missing" }),
        ))
    });
    if !quick {
        s.add("saturation", "lower_bound_chain", Cmp::AtMost, 0.0, move || {
            let mut worst = f64::NEG_INFINITY;
            for (p, q, r) in [(2.0, 2.0, 2.5), (3.0, 2.5, 3.0)] {
                let params = prm(p, q, r)?;
                let crit = find_alpha_c_with(&params, &cfg)?;
                worst = worst.max(alpha_c_lower_bound(&params)? - crit.alpha_c - cfg.tol_alpha);
            }
            Ok((worst.max(0.0), "bound - α_C - tol, clipped at 0, for (2,2,2.5) and (3,2.5,3)".into()))
        });
    }
}

/// Runs every check. `n` overrides the mesh of the eigenvalue and saturation checks.
pub fn run_verify_suite(quick: bool, n: Option<usize>) -> VerifyReport {
    let n = n.unwrap_or(if quick { 256 } else { 1024 });
    let mut s = Suite { checks: vec![] };
    gtrig_checks(&mut s, quick);
    quad_checks(&mut s);
    hfun_checks(&mut s);
    eigen_checks(&mut s, n);
    saturation_checks(&mut s, n, quick);
    let passed = s.checks.iter().all(|c| c.passed);
    VerifyReport { quick, n, passed, checks: s.checks }
}
