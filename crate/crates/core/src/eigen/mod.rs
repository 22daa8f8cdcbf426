//! The variational problem
//!
//! ```text
//! λ_α(p,q,r) = inf { Q_α[u] : u ∈ W^{1,p}_0(-1,1), u ≠ 0 },
//! ```
//!
//! its two closed-form constants, and tools for inspecting computed minimizers.

mod closed;
mod grid;
mod quotient;
mod representation;
mod rescale;
mod residual;
mod solver;
mod symmetry;

pub use closed::{lambda_p_closed, lambda_t_closed};
pub use grid::GridFunction;
pub use quotient::{functionals, rayleigh_gradient, rayleigh_quotient, Functionals};
pub use representation::{norm_from_representation, representation_check, representation_lambda, RepresentationCheck};
pub use rescale::{rescale_interval, Rescaling};
pub use residual::{el_residual, ElResidual};
pub use solver::{
    minimize_lambda_alpha, minimize_lambda_alpha_warm, EigenResult, Parity, SolverConfig, StartSummary, WarmStart,
};
pub use symmetry::{symmetry_diagnostics, SymmetryDiagnostics};

use serde::{Deserialize, Serialize};

/// Two-level extrapolation of a quantity converging like `h^order`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    /// `|fine - coarse| / (2^order - 1)`, the estimated error of `fine`.
    pub error_estimate: f64,
}

/// Combines values on meshes `n/2` (`coarse`) and `n` (`fine`).
pub fn richardson(coarse: f64, fine: f64, order: f64) -> Extrapolation {
    let denom = 2f64.powf(order) - 1.0;
    let diff = fine - coarse;
    Extrapolation {
        value: fine + diff / denom,
        error_estimate: diff.abs() / denom,
    }
}
