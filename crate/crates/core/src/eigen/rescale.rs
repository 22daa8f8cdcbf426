use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rescaling {
    /// `λ_α(p,q,r; (a,b)) = lambda_factor · λ_{alpha_tilde}(p,q,r; (-1,1))`.
    pub lambda_factor: f64,
    pub alpha_tilde: f64,
}

/// Transfers the problem on `(a, b)` with parameter `alpha` to `(-1, 1)`.
pub fn rescale_interval(params: &Params, alpha: f64, a: f64, b: f64) -> Result<Rescaling> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!("interval ({a}, {b}) is empty or reversed")));
    }
    let (p, q, r) = (params.p(), params.q(), params.r());
    let pc = params.p_conj();
    let len = b - a;
    Ok(Rescaling {
        lambda_factor: (2.0 / len).powf(p * (1.0 / pc + 1.0 / q)),
        alpha_tilde: (len / 2.0).powf(p * (1.0 / (r - 1.0) + 1.0 / pc)) * alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_interval() {
        let prm = Params::new(2.7, 1.8, 2.2).unwrap();
        let s = rescale_interval(&prm, 3.5, -1.0, 1.0).unwrap();
        assert_eq!(s.lambda_factor, 1.0);
        assert_eq!(s.alpha_tilde, 3.5);
    }

    #[test]
    fn unit_interval_quadratic() {
        let prm = Params::new(2.0, 2.0, 2.0).unwrap();
        let s = rescale_interval(&prm, 8.0, 0.0, 1.0).unwrap();
        assert!((s.lambda_factor - 4.0).abs() < 1e-15);
        assert!((s.alpha_tilde - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reversed_interval() {
        let prm = Params::new(2.0, 2.0, 2.0).unwrap();
        assert!(rescale_interval(&prm, 1.0, 1.0, 0.0).is_err());
        assert!(rescale_interval(&prm, 1.0, 1.0, 1.0).is_err());
    }
}
