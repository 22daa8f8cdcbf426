use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::Params;

use super::grid::GridFunction;
use super::quotient::{Discretization, FunctionalGradients};

/// Weak-form residual of the Euler–Lagrange equation tested against the nodal hat functions:
///
/// ```text
/// ρ_i = ∫|u'|^{p-2}u' φ_i' + α|γ|^{p/(r-1)-2}γ ∫|u|^{r-2} φ_i - λ‖u‖_q^{p-q} ∫|u|^{q-2}u φ_i.
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElResidual {
    /// `‖ρ‖₂`.
    pub norm: f64,
    /// `‖ρ‖₂` divided by the size of the eigenvalue term.
    pub relative: f64,
}

/// `γ` below this is treated as zero, following the convention for the kinked case `r = p + 1`.
const GAMMA_ZERO: f64 = 1e-12;

pub fn el_residual(u: &GridFunction, params: &Params, alpha: f64, lambda: f64) -> Result<ElResidual> {
    let disc = Discretization::new(u.n(), *params)?;
    let n = u.n();
    let full: Vec<f64> = (0..=n).map(|i| u.at(i)).collect();
    let mut g = FunctionalGradients {
        energy: vec![0.0; n + 1],
        q_mass: vec![0.0; n + 1],
        r_average: vec![0.0; n + 1],
    };
    let f = disc.functionals(&full, Some(&mut g));
    let (p, q, r) = (params.p(), params.q(), params.r());
    let gamma = f.r_average;
    let coupling = if gamma.abs() <= GAMMA_ZERO {
        0.0
    } else {
        alpha * gamma.abs().powf(params.nonlocal_exponent() - 2.0) * gamma
    };
    let scale = lambda * f.q_mass.powf((p - q) / q);
    let (mut res2, mut rhs2) = (0.0, 0.0);
    for i in 1..n {
        let rhs = scale * g.q_mass[i] / q;
        let rho = g.energy[i] / p + coupling * g.r_average[i] / (r - 1.0) - rhs;
        res2 += rho * rho;
        rhs2 += rhs * rhs;
    }
    let norm = res2.sqrt();
    let relative = if rhs2 > 0.0 { norm / rhs2.sqrt() } else { norm };
    Ok(ElResidual { norm, relative })
}
