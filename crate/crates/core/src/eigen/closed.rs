use crate::error::Result;
use crate::gtrig::pi_pq;

/// The twisted constant on `(-1, 1)`:
/// `λ_T = (q/p') (2p'/(p'+q))^{1-p/q} π_{p,q}^p`. It does not depend on `r`.
pub fn lambda_t_closed(p: f64, q: f64) -> Result<f64> {
    let pi = pi_pq(p, q)?;
    let pc = p / (p - 1.0);
    Ok(q / pc * (2.0 * pc / (pc + q)).powf(1.0 - p / q) * pi.powf(p))
}

/// The Dirichlet constant on `(-1, 1)`, `λ_P = λ_T / 2^p`.
///
/// The first Dirichlet eigenfunction `sin_{p,q}(π_{p,q}(x+1)/2)` is the twisted
/// minimizer `sin_{p,q}(π_{p,q} x)` stretched by a factor of two, and the quotient
/// scales by `2^{-p}` under that stretch.
pub fn lambda_p_closed(p: f64, q: f64) -> Result<f64> {
    Ok(lambda_t_closed(p, q)? / 2f64.powf(p))
}
