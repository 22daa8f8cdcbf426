//! Quadrature on the unit interval.
//!
//! [`integrate_unit`] uses the tanh–sinh (double-exponential) substitution
//! `x = (1 + tanh(π/2 · sinh t)) / 2` followed by trapezoid refinement in `t`.
//! Integrable power singularities at either endpoint are resolved without
//! subdivision. The integrand of [`integrate_unit_split`] receives both `x` and
//! `1 - x`, each computed without cancellation, so singularities at `x = 1` can be
//! evaluated as accurately as those at `x = 0`.
//!
//! [`gauss_legendre`] is a fixed-order rule for smooth integrands.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest `|t|` visited by the double-exponential rule.
const T_MAX: f64 = 6.5;
/// Nodes closer than this to an endpoint are dropped (the weight underflows).
const MIN_ENDPOINT_DISTANCE: f64 = 1e-300;
/// An infinite sample this close to an endpoint counts as divergence, not bad input.
const ENDPOINT_ZONE: f64 = 1e-8;
const GROWTH_FACTOR: f64 = 1.1;
const GROWTH_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub max_levels: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub divergence_cap: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            max_levels: 12,
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            divergence_cap: 1e12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_levels < 3 {
            return Err(domain("max_levels must be at least 3"));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.divergence_cap > 0.0) {
            return Err(domain("quadrature tolerances and divergence cap must be positive"));
        }
        Ok(())
    }

    /// A tighter configuration for special-function evaluation.
    pub fn tight() -> Self {
        Self {
            max_levels: 12,
            abs_tol: 1e-15,
            rel_tol: 1e-14,
            divergence_cap: 1e12,
        }
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub divergent: bool,
    pub levels: usize,
    pub evaluations: usize,
}

/// Integrates `f` over `(0, 1)`.
pub fn integrate_unit<F>(f: F, cfg: &QuadratureConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_unit_split(|x, _| f(x), cfg)
}

/// Integrates `f(x, 1 - x)` over `(0, 1)`.
pub fn integrate_unit_split<F>(f: F, cfg: &QuadratureConfig) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64,
{
    cfg.validate()?;
    let mut state = DeState::default();

    // Level 0: unit spacing, including the centre.
    state.sample(&f, 0.0)?;
    let mut t = 1.0;
    while t <= T_MAX && state.sample(&f, t)? {
        t += 1.0;
    }
    let mut estimate = state.sum;
    let mut last_error = f64::INFINITY;
    let mut growth_run = 0;

    for level in 1..=cfg.max_levels {
        let h = 0.5f64.powi(level as i32);
        let mut t = h;
        while t <= T_MAX && state.sample(&f, t)? {
            t += 2.0 * h;
        }
        let next = h * state.sum;
        let error = (next - estimate).abs();

        if next.abs() > GROWTH_FACTOR * estimate.abs() {
            growth_run += 1;
        } else {
            growth_run = 0;
        }
        estimate = next;
        last_error = error;

        if state.endpoint_blowup
            || (growth_run >= GROWTH_LEVELS && next.abs() > cfg.divergence_cap)
        {
            return Ok(state.result(next, error, true, level));
        }
        if level >= 3 && error <= cfg.tolerance(next) {
            // Outermost retained terms must be negligible, otherwise the
            // truncated tail carries mass: the endpoint behaviour is not integrable.
            let divergent = state.tail_term() > cfg.tolerance(next);
            return Ok(state.result(next, error, divergent, level));
        }
    }
    if state.tail_term() > cfg.tolerance(estimate) {
        return Ok(state.result(estimate, f64::INFINITY, true, cfg.max_levels));
    }
    Err(Error::QuadratureNotConverged {
        value: estimate,
        error_estimate: last_error,
    })
}

#[derive(Default)]
struct DeState {
    /// Weighted sum of samples, without the step factor.
    sum: f64,
    evaluations: usize,
    endpoint_blowup: bool,
    /// Largest `t` sampled and the weighted sample magnitudes there (left, right).
    outer_t: f64,
    outer_terms: (f64, f64),
}

impl DeState {
    /// Adds the nodes at `±t`. Returns false once the nodes leave double range.
    fn sample<F: Fn(f64, f64) -> f64>(&mut self, f: &F, t: f64) -> Result<bool> {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u).exp();
        let c = e / (1.0 + e);
        if c < MIN_ENDPOINT_DISTANCE {
            return Ok(false);
        }
        let w = PI * t.cosh() * e / ((1.0 + e) * (1.0 + e));
        if t == 0.0 {
            let v = self.eval(f, 0.5, 0.5)?;
            self.sum += w * v;
            return Ok(true);
        }
        let near_one = self.eval(f, 1.0 - c, c)? * w;
        let near_zero = self.eval(f, c, 1.0 - c)? * w;
        self.sum += near_one + near_zero;
        if t >= self.outer_t {
            self.outer_t = t;
            self.outer_terms = (near_zero.abs(), near_one.abs());
        }
        Ok(true)
    }

    fn eval<F: Fn(f64, f64) -> f64>(&mut self, f: &F, x: f64, cx: f64) -> Result<f64> {
        self.evaluations += 1;
        let v = f(x, cx);
        if v.is_finite() {
            return Ok(v);
        }
        if v.is_infinite() && x.min(cx) < ENDPOINT_ZONE {
            self.endpoint_blowup = true;
            return Ok(0.0);
        }
        Err(Error::NonFiniteSample { x })
    }

    fn tail_term(&self) -> f64 {
        self.outer_terms.0.max(self.outer_terms.1)
    }

    fn result(&self, value: f64, error_estimate: f64, divergent: bool, levels: usize) -> QuadResult {
        QuadResult {
            value,
            error_estimate,
            divergent,
            levels,
            evaluations: self.evaluations,
        }
    }
}

/// A Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub const MAX_NODES: usize = 16;

    pub fn new(n: usize) -> Result<Self> {
        if !(2..=Self::MAX_NODES).contains(&n) {
            return Err(domain(format!("Gauss-Legendre order {n} outside 2..=16")));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        half * s
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss–Legendre approximation of `∫_a^b f`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> Result<f64> {
    if !(a < b) {
        return Err(domain(format!("interval [{a}, {b}] is empty or reversed")));
    }
    Ok(GaussRule::new(nodes)?.integrate(f, a, b))
}
