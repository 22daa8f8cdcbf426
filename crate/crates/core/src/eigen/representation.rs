use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hfun::{h_integral, r_ratio};
use crate::params::Params;
use crate::quad::QuadratureConfig;

use super::grid::GridFunction;
use super::quotient::functionals;

/// `λ = (q/p') ‖y‖_q^{q-p} H(m,p,q,r)^p`, the eigenvalue of a sign-changing
/// minimizer normalized to `max y = 1`, `min y = -m`.
pub fn representation_lambda(m: f64, q_norm: f64, params: &Params, cfg: &QuadratureConfig) -> Result<f64> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(domain(format!("m = {m} outside (0, 1]")));
    }
    if !(q_norm > 0.0 && q_norm.is_finite()) {
        return Err(domain(format!("q-norm {q_norm} must be positive")));
    }
    let h = h_integral(m, params, cfg)?;
    if h.divergent {
        return Err(crate::error::Error::Divergent);
    }
    let (p, q) = (params.p(), params.q());
    Ok(q / params.p_conj() * q_norm.powf(q - p) * h.value.powf(p))
}

/// `‖y‖_q = [((r-1+p')/(q+p')) γ + (1 - R(m,q,r)) 2p'/(p'+q)]^{1/q}` for the same normalization.
pub fn norm_from_representation(m: f64, gamma: f64, params: &Params) -> Result<f64> {
    let (q, r, pc) = (params.q(), params.r(), params.p_conj());
    let rr = r_ratio(m, q, r)?;
    let bracket = (r - 1.0 + pc) / (q + pc) * gamma + (1.0 - rr) * 2.0 * pc / (pc + q);
    if !(bracket >= 0.0) {
        return Err(domain(format!(
            "representation bracket {bracket} is negative for m = {m}, gamma = {gamma}"
        )));
    }
    Ok(bracket.powf(1.0 / q))
}

/// A discrete sign-changing function compared against the representation formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepresentationCheck {
    /// `-min u / max u` after orienting so that `max u >= |min u|`.
    pub m: f64,
    /// `∫|y|^{r-2}y` of the max-normalized function.
    pub gamma: f64,
    /// `‖y‖_q` of the max-normalized function, measured.
    pub q_norm: f64,
    /// `‖y‖_q` predicted by [`norm_from_representation`].
    pub q_norm_formula: f64,
    /// [`representation_lambda`] at the measured `m` and `q_norm`.
    pub lambda_formula: f64,
}

/// Normalizes `u` to `max u = 1` and evaluates both representation formulas.
/// Fails for functions of one sign.
pub fn representation_check(u: &GridFunction, params: &Params, cfg: &QuadratureConfig) -> Result<RepresentationCheck> {
    let (mx, mn) = u.values().iter().fold((0.0f64, 0.0f64), |(a, b), &v| (a.max(v), b.min(v)));
    let (top, bottom) = if -mn > mx { (-mn, mx) } else { (mx, -mn) };
    let sign = if -mn > mx { -1.0 } else { 1.0 };
    if !(bottom > 0.0) {
        return Err(domain("function does not change sign"));
    }
    let y = u.scaled(sign / top);
    let f = functionals(&y, params)?;
    let m = bottom / top;
    let q_norm = f.q_mass.powf(1.0 / params.q());
    Ok(RepresentationCheck {
        m,
        gamma: f.r_average,
        q_norm,
        q_norm_formula: norm_from_representation(m, f.r_average, params)?,
        lambda_formula: representation_lambda(m, q_norm, params, cfg)?,
    })
}
