//! The discrete quotient
//!
//! ```text
//! Q_α[u] = (∫|u'|^p + α |∫|u|^{r-2}u|^{p/(r-1)}) / (∫|u|^q)^{p/q}
//! ```
//!
//! for continuous piecewise-linear `u`. `∫|u'|^p` is exact per element. The two
//! nonlinear integrals use a 4-node Gauss rule per element; an element whose
//! nodal values have opposite signs is split at the zero of the interpolant and
//! each piece is integrated separately. The gradient is the exact derivative of
//! this discrete functional, including the motion of the split point.

use crate::error::{Error, Result};
use crate::params::Params;
use crate::quad::GaussRule;

use super::grid::GridFunction;

const GAUSS_NODES: usize = 4;

/// `|x|^e` for `x >= 0` with cheap paths for the common integer exponents.
#[inline]
fn pow_abs(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 3.0 {
        x * x * x
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// The three integrals entering the quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functionals {
    /// `∫|u'|^p`
    pub energy: f64,
    /// `∫|u|^q`
    pub q_mass: f64,
    /// `γ = ∫|u|^{r-2}u`
    pub r_average: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Discretization {
    pub n: usize,
    pub h: f64,
    pub params: Params,
    /// Gauss nodes mapped to `[0, 1]` and weights summing to 1.
    tau: [f64; GAUSS_NODES],
    weight: [f64; GAUSS_NODES],
    /// `Σ w τ^q` and `Σ w τ^{r-1}`: Gauss values of `∫_0^1 τ^e` used on split pieces.
    split_q: f64,
    split_r: f64,
}

/// Gradients of the three integrals with respect to all `n + 1` nodal values.
pub(crate) struct FunctionalGradients {
    pub energy: Vec<f64>,
    pub q_mass: Vec<f64>,
    pub r_average: Vec<f64>,
}

impl FunctionalGradients {
    fn zeros(len: usize) -> Self {
        Self {
            energy: vec![0.0; len],
            q_mass: vec![0.0; len],
            r_average: vec![0.0; len],
        }
    }
}

impl Discretization {
    pub fn new(n: usize, params: Params) -> Result<Self> {
        super::grid::check_mesh(n)?;
        let rule = GaussRule::new(GAUSS_NODES)?;
        let mut tau = [0.0; GAUSS_NODES];
        let mut weight = [0.0; GAUSS_NODES];
        for k in 0..GAUSS_NODES {
            tau[k] = 0.5 * (1.0 + rule.nodes[k]);
            weight[k] = 0.5 * rule.weights[k];
        }
        let moment = |e: f64| -> f64 { (0..GAUSS_NODES).map(|k| weight[k] * pow_abs(tau[k], e)).sum() };
        Ok(Self {
            n,
            h: 2.0 / n as f64,
            split_q: moment(params.q()),
            split_r: moment(params.r() - 1.0),
            params,
            tau,
            weight,
        })
    }

    /// `(|u|^q, d/du |u|^q)`.
    #[inline]
    fn q_power(&self, u: f64) -> (f64, f64) {
        let q = self.params.q();
        let a = u.abs();
        let v = pow_abs(a, q);
        let d = if a == 0.0 { 0.0 } else { q * v / u };
        (v, d)
    }

    /// `(|u|^{r-2}u, d/du)`; the derivative at `u = 0` is taken as 0.
    #[inline]
    fn r_power(&self, u: f64) -> (f64, f64) {
        let r = self.params.r();
        let a = u.abs();
        let m = pow_abs(a, r - 1.0);
        if a == 0.0 {
            return (0.0, 0.0);
        }
        (m.copysign(u), (r - 1.0) * m / a)
    }

    /// Integrals and, optionally, their gradients. `full` holds all `n + 1` nodal values.
    pub fn functionals(&self, full: &[f64], mut grads: Option<&mut FunctionalGradients>) -> Functionals {
        debug_assert_eq!(full.len(), self.n + 1);
        let p = self.params.p();
        let h = self.h;
        let mut out = Functionals {
            energy: 0.0,
            q_mass: 0.0,
            r_average: 0.0,
        };
        for e in 0..self.n {
            let (a, b) = (full[e], full[e + 1]);

            let s = (b - a) / h;
            let sa = s.abs();
            out.energy += h * pow_abs(sa, p);
            if let Some(g) = grads.as_deref_mut() {
                let flux = if sa == 0.0 { 0.0 } else { p * pow_abs(sa, p - 1.0).copysign(s) };
                g.energy[e] -= flux;
                g.energy[e + 1] += flux;
            }

            if a * b >= 0.0 {
                let (mut bq, mut br) = (0.0, 0.0);
                let (mut dqa, mut dqb, mut dra, mut drb) = (0.0, 0.0, 0.0, 0.0);
                for k in 0..GAUSS_NODES {
                    let t = self.tau[k];
                    let w = self.weight[k];
                    let u = a + (b - a) * t;
                    let (vq, dq) = self.q_power(u);
                    let (vr, dr) = self.r_power(u);
                    bq += w * vq;
                    br += w * vr;
                    dqa += w * dq * (1.0 - t);
                    dqb += w * dq * t;
                    dra += w * dr * (1.0 - t);
                    drb += w * dr * t;
                }
                out.q_mass += h * bq;
                out.r_average += h * br;
                if let Some(g) = grads.as_deref_mut() {
                    g.q_mass[e] += h * dqa;
                    g.q_mass[e + 1] += h * dqb;
                    g.r_average[e] += h * dra;
                    g.r_average[e + 1] += h * drb;
                }
            } else {
                // zero at x_e + θh; on each piece u is a multiple of τ or (1 - τ)
                let theta = a / (a - b);
                let denom = (a - b) * (a - b);
                let dtheta_da = -b / denom;
                let dtheta_db = a / denom;

                let (qa, dqa) = self.q_power(a);
                let (qb, dqb) = self.q_power(b);
                let (s1q, s2q) = (qa * self.split_q, qb * self.split_q);
                let (ra, dra) = self.r_power(a);
                let (rb, drb) = self.r_power(b);
                let (s1r, s2r) = (ra * self.split_r, rb * self.split_r);

                out.q_mass += h * (theta * s1q + (1.0 - theta) * s2q);
                out.r_average += h * (theta * s1r + (1.0 - theta) * s2r);
                if let Some(g) = grads.as_deref_mut() {
                    g.q_mass[e] += h * (dtheta_da * (s1q - s2q) + theta * dqa * self.split_q);
                    g.q_mass[e + 1] += h * (dtheta_db * (s1q - s2q) + (1.0 - theta) * dqb * self.split_q);
                    g.r_average[e] += h * (dtheta_da * (s1r - s2r) + theta * dra * self.split_r);
                    g.r_average[e + 1] +=
                        h * (dtheta_db * (s1r - s2r) + (1.0 - theta) * drb * self.split_r);
                }
            }
        }
        out
    }
}

/// `Q_α` on a fixed mesh.
#[derive(Debug, Clone)]
pub(crate) struct Quotient {
    pub disc: Discretization,
    pub alpha: f64,
    full: std::cell::RefCell<Vec<f64>>,
}

/// Nonlocal term `α|γ|^k` and its derivative in `γ`, `k = p/(r-1)`.
/// At `γ = 0` the derivative is 0 (for `k = 1`, the zero subgradient).
fn nonlocal(alpha: f64, gamma: f64, k: f64) -> (f64, f64) {
    let a = gamma.abs();
    if a == 0.0 {
        return (0.0, 0.0);
    }
    let v = pow_abs(a, k);
    (alpha * v, alpha * k * (v / a).copysign(gamma))
}

impl Quotient {
    pub fn new(n: usize, params: Params, alpha: f64) -> Result<Self> {
        Ok(Self {
            disc: Discretization::new(n, params)?,
            alpha,
            full: std::cell::RefCell::new(vec![0.0; n + 1]),
        })
    }

    pub fn n(&self) -> usize {
        self.disc.n
    }

    fn load(&self, interior: &[f64]) -> std::cell::RefMut<'_, Vec<f64>> {
        let mut full = self.full.borrow_mut();
        full[1..self.disc.n].copy_from_slice(interior);
        full
    }

    pub fn functionals(&self, interior: &[f64]) -> Functionals {
        let full = self.load(interior);
        self.disc.functionals(&full, None)
    }

    /// `Q_α` and, when `grad` is given, its gradient with respect to the interior values.
    pub fn eval(&self, interior: &[f64], grad: Option<&mut [f64]>) -> Result<(f64, Functionals)> {
        let params = &self.disc.params;
        let (p, q) = (params.p(), params.q());
        let k = params.nonlocal_exponent();
        let full = self.load(interior);
        let mut grads = grad.as_ref().map(|_| FunctionalGradients::zeros(self.disc.n + 1));
        let f = self.disc.functionals(&full, grads.as_mut());
        drop(full);
        let norm = f.q_mass.powf(1.0 / q);
        if !(norm >= 1e-14) {
            return Err(Error::ZeroFunction { norm });
        }
        let denom = f.q_mass.powf(p / q);
        let (nl, dnl) = nonlocal(self.alpha, f.r_average, k);
        let value = (f.energy + nl) / denom;
        if let (Some(out), Some(g)) = (grad, grads) {
            let scale = p / q * value / f.q_mass;
            for (j, o) in out.iter_mut().enumerate() {
                let i = j + 1;
                *o = (g.energy[i] + dnl * g.r_average[i]) / denom - scale * g.q_mass[i];
            }
        }
        Ok((value, f))
    }
}

pub fn functionals(u: &GridFunction, params: &Params) -> Result<Functionals> {
    let quot = Quotient::new(u.n(), *params, 0.0)?;
    Ok(quot.functionals(u.values()))
}

/// `Q_α[u]`.
pub fn rayleigh_quotient(u: &GridFunction, params: &Params, alpha: f64) -> Result<f64> {
    let quot = Quotient::new(u.n(), *params, alpha)?;
    Ok(quot.eval(u.values(), None)?.0)
}

/// Partial derivatives of `Q_α` with respect to the interior nodal values.
pub fn rayleigh_gradient(u: &GridFunction, params: &Params, alpha: f64) -> Result<Vec<f64>> {
    let quot = Quotient::new(u.n(), *params, alpha)?;
    let mut g = vec![0.0; u.n() - 1];
    quot.eval(u.values(), Some(&mut g))?;
    Ok(g)
}
