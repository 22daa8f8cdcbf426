//! The auxiliary integral
//!
//! ```text
//! H(m,p,q,r) = ∫_0^1 [1 - R(1 - y^{r-1}) - y^q]^{-1/p} dy
//!            + ∫_0^1 m [1 - R(1 + m^{r-1} y^{r-1}) - m^q y^q]^{-1/p} dy,
//! R(m,q,r)   = (1 - m^q) / (1 + m^{r-1}),
//! ```
//!
//! through which the eigenvalue of a sign-changing minimizer is represented,
//! together with its integrand `h`, the specialization `K(m) = H(m,p,q,q/2+1)`
//! and the auxiliary functions `g`, `f`, `e` whose signs control the
//! monotonicity of `h` in `r`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gtrig::{one_minus_pow_complement, pi_pq};
use crate::params::Params;
use crate::quad::{integrate_unit_split, QuadratureConfig};

/// `m` this close to 1 is treated as exactly 1.
const SNAP_TO_ONE: f64 = 1e-12;

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(domain(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

fn snap(m: f64) -> f64 {
    if m > 1.0 - SNAP_TO_ONE {
        1.0
    } else {
        m
    }
}

/// `R(m,q,r) = (1 - m^q) / (1 + m^{r-1})`.
pub fn r_ratio(m: f64, q: f64, r: f64) -> Result<f64> {
    check_unit("m", m)?;
    Ok(Ratio::new(m, q, r).r)
}

/// `R` and `1 - R`, the latter formed without cancellation.
#[derive(Debug, Clone, Copy)]
struct Ratio {
    r: f64,
    one_minus_r: f64,
}

impl Ratio {
    fn new(m: f64, q: f64, r: f64) -> Self {
        let mr = m.powf(r - 1.0);
        let mq = m.powf(q);
        Self {
            r: (1.0 - mq) / (1.0 + mr),
            one_minus_r: (mr + mq) / (1.0 + mr),
        }
    }
}

/// `y^a` and `1 - y^a` from `y` and `1 - y`.
fn pow_pair(a: f64, y: f64, cy: f64) -> (f64, f64) {
    if y > 0.5 {
        let om = one_minus_pow_complement(a, cy);
        (1.0 - om, om)
    } else {
        let v = y.powf(a);
        (v, 1.0 - v)
    }
}

/// The two brackets of `h` at `y` (given with its complement `cy`).
#[derive(Debug, Clone, Copy)]
struct Integrand {
    m: f64,
    p: f64,
    q: f64,
    r: f64,
    ratio: Ratio,
    mr: f64,
    mq: f64,
}

impl Integrand {
    fn new(m: f64, params: &Params) -> Self {
        let (q, r) = (params.q(), params.r());
        Self {
            m,
            p: params.p(),
            q,
            r,
            ratio: Ratio::new(m, q, r),
            mr: m.powf(r - 1.0),
            mq: m.powf(q),
        }
    }

    fn brackets(&self, y: f64, cy: f64) -> (f64, f64) {
        let (yr, om_r) = pow_pair(self.r - 1.0, y, cy);
        let (yq, om_q) = pow_pair(self.q, y, cy);
        let rr = self.ratio.r;
        let first = if y > 0.5 {
            om_q - rr * om_r
        } else {
            self.ratio.one_minus_r + rr * yr - yq
        };
        // 1 - R(1 + m^{r-1} y^{r-1}) - m^q y^q regrouped with the identity
        // 1 - R(1 + m^{r-1}) - m^q = 0 into a sum of nonnegative terms.
        let second = rr * self.mr * om_r + self.mq * om_q;
        (first, second)
    }

    fn value(&self, y: f64, cy: f64) -> f64 {
        let (b1, b2) = self.brackets(y, cy);
        let a = -1.0 / self.p;
        let d = self.q - (self.r - 1.0);
        let mut v = if self.m == 0.0 && y <= 0.5 && d > 0.0 {
            // y^{r-1} - y^q factored so that tiny y does not underflow to a pole
            y.powf(-(self.r - 1.0) / self.p) * (1.0 - y.powf(d)).powf(a)
        } else {
            b1.powf(a)
        };
        if self.m > 0.0 {
            v += self.m * b2.powf(a);
        }
        v
    }
}

/// The integrand `h(m, p, q, r, y)` of `H`, for `y ∈ [0, 1)`.
pub fn h_integrand(m: f64, params: &Params, y: f64) -> Result<f64> {
    check_unit("m", m)?;
    if !(0.0..1.0).contains(&y) {
        return Err(domain(format!("y = {y} outside [0, 1)")));
    }
    if m == 0.0 && y == 0.0 {
        return Err(domain("h is undefined at m = y = 0"));
    }
    let it = Integrand::new(m, params);
    let (b1, b2) = it.brackets(y, 1.0 - y);
    if b1 <= 0.0 {
        return Err(Error::Pole { y, bracket: b1 });
    }
    if m > 0.0 && b2 <= 0.0 {
        return Err(Error::Pole { y, bracket: b2 });
    }
    Ok(it.value(y, 1.0 - y))
}

/// A value of `H` with its quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HEval {
    pub m: f64,
    pub params: Params,
    /// `+∞` when `divergent`.
    pub value: f64,
    pub error_estimate: f64,
    pub divergent: bool,
}

impl HEval {
    fn divergent(m: f64, params: Params) -> Self {
        Self {
            m,
            params,
            value: f64::INFINITY,
            error_estimate: f64::INFINITY,
            divergent: true,
        }
    }
}

/// `H(m, p, q, r)` by double-exponential quadrature of the split form.
pub fn h_integral(m: f64, params: &Params, cfg: &QuadratureConfig) -> Result<HEval> {
    check_unit("m", m)?;
    let m = snap(m);
    if m == 0.0 && params.r() - 1.0 >= params.q() - 1e-12 {
        // the first bracket y^{r-1} - y^q is identically zero or negative
        return Ok(HEval::divergent(m, *params));
    }
    let it = Integrand::new(m, params);
    let res = integrate_unit_split(|y, cy| it.value(y, cy), cfg)?;
    if res.divergent {
        return Ok(HEval::divergent(m, *params));
    }
    Ok(HEval {
        m,
        params: *params,
        value: res.value,
        error_estimate: res.error_estimate,
        divergent: false,
    })
}

/// `K(m) = H(m, p, q, q/2 + 1)`, evaluated through the factorizations
/// `A = (1 - w)(w + c)` and `B = c (1 - w)(1 + c w)` with `w = y^{q/2}`, `c = m^{q/2}`.
pub fn k_integral(m: f64, p: f64, q: f64, cfg: &QuadratureConfig) -> Result<HEval> {
    check_unit("m", m)?;
    let params = Params::new(p, q, q / 2.0 + 1.0)?;
    let m = snap(m);
    let c = m.powf(q / 2.0);
    let a = -1.0 / p;
    let res = integrate_unit_split(
        |y, cy| {
            let (w, omw) = pow_pair(q / 2.0, y, cy);
            let mut v = if c == 0.0 && y <= 0.5 {
                // y^{q/2} underflows long before the integrand does
                y.powf(-q / (2.0 * p)) * omw.powf(a)
            } else {
                (omw * (w + c)).powf(a)
            };
            if m > 0.0 {
                v += m * (c * omw * (1.0 + c * w)).powf(a);
            }
            v
        },
        cfg,
    )?;
    if res.divergent {
        return Ok(HEval::divergent(m, params));
    }
    Ok(HEval {
        m,
        params,
        value: res.value,
        error_estimate: res.error_estimate,
        divergent: false,
    })
}

/// `π_{p,q}`, the value of `H` at `m = 1`.
pub fn h_at_one(params: &Params) -> Result<f64> {
    pi_pq(params.p(), params.q())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProofAux {
    G,
    F,
    E,
}

/// The auxiliary functions of the `r`-monotonicity argument for `h`.
///
/// With `k = q(p+1)/p`:
///
/// ```text
/// g = -(1 - y^{r-1}) m^{r-1} ln m - y^{r-1}(1 + m^{r-1}) ln y
///     + [(y^{r-1} - 1) ln m + (1 + m^{r-1}) y^{r-1} ln y] m^{r-k}
/// f = -(m^{r-1} + m^{r-k}) ln m - (1 + m^{r-1})(m^{r-k} - 1)/(r-1)
/// e = m^{k-1} (ln(1/m) + 1/(r-1)) + ln(1/m) - 1/(r-1)
/// ```
///
/// `f` and `e` do not depend on `y`. `g` accepts `y = 1`, where it vanishes.
pub fn proof_aux(name: ProofAux, m: f64, params: &Params, y: f64) -> Result<f64> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(domain(format!("m = {m} outside (0, 1]")));
    }
    let (p, q, r) = (params.p(), params.q(), params.r());
    let k = q * (p + 1.0) / p;
    let ln_m = m.ln();
    let mr = m.powf(r - 1.0);
    let mrk = m.powf(r - k);
    Ok(match name {
        ProofAux::G => {
            if !(y > 0.0 && y <= 1.0) {
                return Err(domain(format!("y = {y} outside (0, 1]")));
            }
            let ln_y = y.ln();
            let yr = y.powf(r - 1.0);
            -(1.0 - yr) * mr * ln_m - yr * (1.0 + mr) * ln_y
                + ((yr - 1.0) * ln_m + (1.0 + mr) * yr * ln_y) * mrk
        }
        ProofAux::F => -(mr + mrk) * ln_m - (1.0 + mr) * (mrk - 1.0) / (r - 1.0),
        ProofAux::E => {
            let inv = 1.0 / (r - 1.0);
            m.powf(k - 1.0) * (-ln_m + inv) - ln_m - inv
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn prm(p: f64, q: f64, r: f64) -> Params {
        Params::new(p, q, r).unwrap()
    }

    #[test]
    fn ratio_endpoints_and_special_r() {
        assert_eq!(r_ratio(1.0, 2.3, 2.7).unwrap(), 0.0);
        assert_eq!(r_ratio(0.0, 2.3, 2.7).unwrap(), 1.0);
        assert!((r_ratio(0.25, 2.0, 2.0).unwrap() - 0.75).abs() < 1e-15);
        for m in [0.1, 0.4, 0.9] {
            let q = 3.1;
            let v = r_ratio(m, q, q / 2.0 + 1.0).unwrap();
            assert!((v - (1.0 - m.powf(q / 2.0))).abs() < 1e-14);
        }
        assert!(r_ratio(1.1, 2.0, 2.0).is_err());
    }

    #[test]
    fn ratio_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let v = r_ratio(i as f64 / 100.0, 2.5, 2.2).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn integrand_special_cases() {
        let params = prm(2.5, 2.1, 2.6);
        let (p, q, r) = (params.p(), params.q(), params.r());
        for y in [0.0, 0.2, 0.7, 0.95] {
            let v = h_integrand(1.0, &params, y).unwrap();
            assert!((v - 2.0 * (1.0 - y.powf(q)).powf(-1.0 / p)).abs() < 1e-12);
        }
        for y in [0.2, 0.7, 0.95] {
            let v = h_integrand(0.0, &params, y).unwrap();
            let exact = (y.powf(r - 1.0) - y.powf(q)).powf(-1.0 / p);
            assert!((v - exact).abs() < 1e-12 * exact);
        }
        for m in [0.1, 0.5, 0.9] {
            let v = h_integrand(m, &params, 0.0).unwrap();
            let rr = r_ratio(m, q, r).unwrap();
            assert!((v - (1.0 + m) / (1.0 - rr).powf(1.0 / p)).abs() < 1e-12);
        }
        assert!(h_integrand(0.0, &params, 0.0).is_err());
        assert!(h_integrand(0.5, &params, 1.0).is_err());
    }

    #[test]
    fn integrand_pole_is_reported() {
        // r - 1 > q at m = 0 makes the first bracket negative
        let e = h_integrand(0.0, &prm(2.0, 1.5, 3.0), 0.5);
        assert!(matches!(e, Err(Error::Pole { .. })));
    }

    #[test]
    fn h_at_one_is_pi_pq() {
        let cfg = QuadratureConfig::default();
        for (p, q, r) in [(2.0, 2.0, 2.0), (3.0, 2.0, 2.5), (1.5, 1.5, 2.0)] {
            let params = prm(p, q, r);
            let h = h_integral(1.0, &params, &cfg).unwrap();
            assert!((h.value - pi_pq(p, q).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn h_is_pi_for_quadratic_case() {
        // (1-y)(y+m) factorization: H = ∫_{-m}^1 dy / sqrt((1-y)(y+m)) = π
        let cfg = QuadratureConfig::default();
        let params = prm(2.0, 2.0, 2.0);
        for i in 0..=20 {
            let m = i as f64 / 20.0;
            let h = h_integral(m, &params, &cfg).unwrap();
            assert!((h.value - PI).abs() < 1e-8, "m={m}: {}", h.value);
        }
    }

    #[test]
    fn degenerate_bracket_diverges() {
        let h = h_integral(0.0, &prm(2.0, 2.0, 3.0), &QuadratureConfig::default()).unwrap();
        assert!(h.divergent);
        assert!(h.value.is_infinite());
    }

    #[test]
    fn non_integrable_power_is_detected_by_quadrature() {
        // m = 0, r = p + 1 < q + 1: integrand ~ 1/y at the origin
        let h = h_integral(0.0, &prm(2.0, 2.5, 3.0), &QuadratureConfig::default()).unwrap();
        assert!(h.divergent);
        // r < p + 1 stays finite
        let h = h_integral(0.0, &prm(2.0, 2.5, 2.9), &QuadratureConfig::default()).unwrap();
        assert!(!h.divergent);
    }

    #[test]
    fn near_one_is_snapped() {
        let cfg = QuadratureConfig::default();
        let params = prm(3.0, 2.5, 3.0);
        let h = h_integral(1.0 - 1e-13, &params, &cfg).unwrap();
        assert_eq!(h.m, 1.0);
    }

    #[test]
    fn k_matches_h_at_r_min() {
        let cfg = QuadratureConfig::default();
        for (p, q) in [(2.0, 2.0), (3.0, 2.0), (2.5, 1.7)] {
            let params = prm(p, q, q / 2.0 + 1.0);
            for m in [0.0, 0.2, 0.6, 0.95, 1.0] {
                let k = k_integral(m, p, q, &cfg).unwrap();
                let h = h_integral(m, &params, &cfg).unwrap();
                assert!((k.value - h.value).abs() < 1e-9, "p={p} q={q} m={m}");
            }
        }
    }

    #[test]
    fn k_endpoints() {
        let cfg = QuadratureConfig::default();
        let k1 = k_integral(1.0, 3.0, 2.5, &cfg).unwrap();
        assert!((k1.value - pi_pq(3.0, 2.5).unwrap()).abs() < 1e-9);
        let k0 = k_integral(0.0, 2.0, 2.0, &cfg).unwrap();
        assert!((k0.value - PI).abs() < 1e-9);
        // y^{q/2} underflows at the outermost nodes when q/2 > 1
        for (p, q) in [(3.0, 3.0), (4.0, 4.0)] {
            let k0 = k_integral(0.0, p, q, &cfg).unwrap();
            assert!(!k0.divergent);
            assert!((k0.value - pi_pq(p, q).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn proof_aux_zeros() {
        let params = prm(2.0, 2.0, 2.5);
        assert!(proof_aux(ProofAux::G, 0.4, &params, 1.0).unwrap().abs() < 1e-15);
        assert!(proof_aux(ProofAux::E, 1.0, &params, 0.5).unwrap().abs() < 1e-15);
        assert!(proof_aux(ProofAux::F, 1.0, &params, 0.5).unwrap().abs() < 1e-15);
        assert!(proof_aux(ProofAux::F, 0.0, &params, 0.5).is_err());
        assert!(proof_aux(ProofAux::G, 0.5, &params, 0.0).is_err());
    }
}
