//! Optimal constants of the nonlocal nonlinear Poincaré–Wirtinger inequality
//! on `(-1, 1)`:
//!
//! ```text
//! λ_α(p,q,r) (∫|u|^q)^{p/q} <= ∫|u'|^p + α |∫|u|^{r-2}u|^{p/(r-1)},   u(±1) = 0.
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`gtrig`]: `(p, q)`-trigonometric functions and `π_{p,q}`;
//! * [`quad`]: double-exponential quadrature with divergence detection;
//! * [`hfun`]: the auxiliary integral `H(m, p, q, r)` and its ingredients;
//! * [`eigen`]: closed-form constants and a finite-element minimizer of the quotient;
//! * [`saturation`]: sweeps in `α` and location of the critical value `α_C`.

pub mod eigen;
pub mod error;
pub mod gtrig;
pub mod hfun;
pub mod params;
pub mod quad;
pub mod saturation;

pub use error::{Error, Result};
pub use params::Params;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/gtrig.md")]
    mod gtrig {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/hfun.md")]
    mod hfun {}
    #[doc = include_str!("../../../book/src/eigen.md")]
    mod eigen {}
    #[doc = include_str!("../../../book/src/saturation.md")]
    mod saturation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
