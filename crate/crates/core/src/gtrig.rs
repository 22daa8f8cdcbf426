//! Generalized `(p, q)`-trigonometric functions.
//!
//! `F_{p,q}(x) = ∫_0^x (1 - t^q)^{-1/p} dt` maps `[0, 1]` onto `[0, π_{p,q}/2]`.
//! `sin_{p,q}` is its inverse on that quarter period, extended to the real line
//! by `sin(π - t) = sin(t)`, oddness and `2π_{p,q}` periodicity. `cos_{p,q}` is the
//! derivative of `sin_{p,q}`; on the first quarter period it equals
//! `(1 - sin^q)^{1/p}`.

use crate::error::{domain, Result};
use crate::quad::{integrate_unit, integrate_unit_split, QuadratureConfig};

/// `π_{p,q} = (2/q) B(1/p', 1/q)`.
pub fn pi_pq(p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    let a = 1.0 - 1.0 / p;
    let b = 1.0 / q;
    let log_beta = libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b);
    Ok(2.0 / q * log_beta.exp())
}

pub fn incomplete_f(p: f64, q: f64, x: f64) -> Result<f64> {
    PqTrig::new(p, q)?.f(x)
}

pub fn sin_pq(p: f64, q: f64, t: f64) -> Result<f64> {
    Ok(PqTrig::new(p, q)?.sin(t))
}

pub fn cos_pq(p: f64, q: f64, t: f64) -> Result<f64> {
    Ok(PqTrig::new(p, q)?.cos(t))
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p.is_finite() && q.is_finite() && p > 1.0 && q > 1.0) {
        return Err(domain(format!("(p, q) = ({p}, {q}) requires p > 1 and q > 1")));
    }
    Ok(())
}

/// `1 - (1 - d)^a` without cancellation for small `d`.
pub(crate) fn one_minus_pow_complement(a: f64, d: f64) -> f64 {
    -(a * (-d).ln_1p()).exp_m1()
}

/// Evaluator for one exponent pair, caching `π_{p,q}`.
#[derive(Debug, Clone, Copy)]
pub struct PqTrig {
    p: f64,
    q: f64,
    pi: f64,
    /// `F(1/2)`, where the evaluation switches to the tail integral.
    f_half: f64,
    cfg: QuadratureConfig,
}

const SPLIT: f64 = 0.5;
const MAX_NEWTON: usize = 60;

impl PqTrig {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let pi = pi_pq(p, q)?;
        let mut out = Self {
            p,
            q,
            pi,
            f_half: 0.0,
            cfg: QuadratureConfig::tight(),
        };
        out.f_half = out.forward(SPLIT);
        Ok(out)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `π_{p,q}`.
    pub fn pi(&self) -> f64 {
        self.pi
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain(format!("F_{{p,q}} argument {x} outside [0, 1]")));
        }
        Ok(if x <= SPLIT {
            self.forward(x)
        } else {
            0.5 * self.pi - self.tail(1.0 - x)
        })
    }

    /// `∫_0^x (1 - t^q)^{-1/p} dt` for `x <= 1/2`.
    fn forward(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let (p, q) = (self.p, self.q);
        let xq = x.powf(q);
        let r = integrate_unit(|y| (1.0 - xq * y.powf(q)).powf(-1.0 / p), &self.cfg)
            .expect("smooth integrand");
        x * r.value
    }

    /// `∫_{1-c}^1 (1 - t^q)^{-1/p} dt` for `c <= 1/2`.
    fn tail(&self, c: f64) -> f64 {
        if c == 0.0 {
            return 0.0;
        }
        let (p, q) = (self.p, self.q);
        let r = integrate_unit_split(
            |_, cv| one_minus_pow_complement(q, c * cv).powf(-1.0 / p),
            &self.cfg,
        )
        .expect("integrable endpoint singularity");
        c * r.value
    }

    pub fn sin(&self, t: f64) -> f64 {
        self.sin_cos(t).0
    }

    pub fn cos(&self, t: f64) -> f64 {
        self.sin_cos(t).1
    }

    /// `(sin_{p,q}(t), cos_{p,q}(t))`.
    pub fn sin_cos(&self, t: f64) -> (f64, f64) {
        let half = 0.5 * self.pi;
        let mut tau = t.rem_euclid(2.0 * self.pi);
        if tau >= self.pi {
            tau -= 2.0 * self.pi;
        }
        let odd = tau < 0.0;
        let tau = tau.abs();
        let (reduced, cos_sign) = if tau <= half {
            (tau, 1.0)
        } else {
            (self.pi - tau, -1.0)
        };
        let (s, cs) = self.invert(reduced);
        let c = one_minus_pow_complement_or_direct(self.q, s, cs).powf(1.0 / self.p);
        let s = if odd { -s } else { s };
        (s, cos_sign * c)
    }

    /// Solves `F(x) = t` for `t ∈ [0, π_{p,q}/2]`, returning `(x, 1 - x)`.
    fn invert(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (0.0, 1.0);
        }
        if t <= self.f_half {
            let x = self.invert_forward(t);
            (x, 1.0 - x)
        } else {
            let remaining = 0.5 * self.pi - t;
            if remaining < 1e-14 {
                return (1.0, 0.0);
            }
            let c = self.invert_tail(remaining);
            (1.0 - c, c)
        }
    }

    fn invert_forward(&self, t: f64) -> f64 {
        let (p, q) = (self.p, self.q);
        let (mut lo, mut hi) = (0.0, SPLIT);
        let mut x = t.min(SPLIT);
        for _ in 0..MAX_NEWTON {
            let res = self.forward(x) - t;
            if res.abs() <= 1e-16 * t.max(1.0) {
                return x;
            }
            if res > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let deriv = (1.0 - x.powf(q)).powf(-1.0 / p);
            let mut next = x - res / deriv;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-17 * x.max(1e-300) || hi - lo <= 1e-17 {
                return next;
            }
            x = next;
        }
        x
    }

    /// Solves `tail(c) = target` for `c`, iterating in `w = c^{1/p'}` where the
    /// tail is nearly linear.
    fn invert_tail(&self, target: f64) -> f64 {
        if target <= 0.0 {
            return 0.0;
        }
        let (p, q) = (self.p, self.q);
        let p_conj = p / (p - 1.0);
        let w_of = |c: f64| c.powf(1.0 / p_conj);
        let (mut lo, mut hi) = (0.0, w_of(SPLIT));
        let slope0 = p_conj * q.powf(-1.0 / p);
        let mut w = (target / slope0).clamp(0.0, hi);
        for _ in 0..MAX_NEWTON {
            let c = w.powf(p_conj);
            let res = self.tail(c) - target;
            if res.abs() <= 1e-16 * target {
                return c;
            }
            if res > 0.0 {
                hi = w;
            } else {
                lo = w;
            }
            let deriv = one_minus_pow_complement(q, c).powf(-1.0 / p) * p_conj * c.powf(1.0 / p);
            let mut next = if deriv.is_finite() && deriv > 0.0 {
                w - res / deriv
            } else {
                0.5 * (lo + hi)
            };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - w).abs() <= 1e-17 * w.max(1e-300) || hi - lo <= 1e-300 {
                return next.powf(p_conj);
            }
            w = next;
        }
        w.powf(p_conj)
    }
}

/// `1 - s^q` given `s` and `1 - s`.
fn one_minus_pow_complement_or_direct(q: f64, s: f64, cs: f64) -> f64 {
    if s > SPLIT {
        one_minus_pow_complement(q, cs)
    } else {
        1.0 - s.powf(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI, SQRT_2};

    /// Direct quadrature of the defining integral, independent of the Gamma route.
    fn pi_by_quadrature(p: f64, q: f64) -> f64 {
        let r = integrate_unit_split(
            |_, ct| one_minus_pow_complement(q, ct).powf(-1.0 / p),
            &QuadratureConfig::tight(),
        )
        .unwrap();
        2.0 * r.value
    }

    #[test]
    fn pi_classical() {
        assert!((pi_pq(2.0, 2.0).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn pi_quartic_matches_reflection_and_quadrature() {
        let v = pi_pq(4.0, 4.0).unwrap();
        assert!((v - PI * SQRT_2 / 2.0).abs() < 1e-12);
        assert!((v - pi_by_quadrature(4.0, 4.0)).abs() < 1e-12);
    }

    #[test]
    fn pi_beta_expression() {
        // (2/2) B(2/3, 1/2) pinned by quadrature
        let v = pi_pq(3.0, 2.0).unwrap();
        assert!((v - pi_by_quadrature(3.0, 2.0)).abs() < 1e-12);
        let beta = (libm::lgamma(2.0 / 3.0) + libm::lgamma(0.5) - libm::lgamma(2.0 / 3.0 + 0.5)).exp();
        assert!((v - beta).abs() < 1e-13);
    }

    #[test]
    fn pi_cubic_reflection() {
        let v = pi_pq(3.0, 3.0).unwrap();
        assert!((v - 4.0 * PI / (3.0 * 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn pi_domain() {
        assert!(pi_pq(1.0, 2.0).is_err());
        assert!(pi_pq(2.0, 0.9).is_err());
    }

    #[test]
    fn incomplete_f_examples() {
        assert_eq!(incomplete_f(3.0, 1.7, 0.0).unwrap(), 0.0);
        assert!((incomplete_f(2.0, 2.0, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert!((incomplete_f(2.0, 2.0, 0.5).unwrap() - FRAC_PI_6).abs() < 1e-12);
        assert!(incomplete_f(2.0, 2.0, 1.1).is_err());
        assert!(incomplete_f(2.0, 2.0, -0.1).is_err());
    }

    #[test]
    fn incomplete_f_matches_arcsin() {
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            let v = incomplete_f(2.0, 2.0, x).unwrap();
            assert!((v - x.asin()).abs() < 1e-12, "x={x}: {v}");
        }
    }

    #[test]
    fn sin_examples() {
        let g = PqTrig::new(2.7, 1.9).unwrap();
        assert_eq!(g.sin(0.0), 0.0);
        assert!((sin_pq(2.0, 2.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        for x in [0.0, 0.1, 0.37, 0.5, 0.77, 0.99, 0.999999, 1.0] {
            let t = g.f(x).unwrap();
            assert!((g.sin(t) - x).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn classical_sine_and_cosine() {
        let g = PqTrig::new(2.0, 2.0).unwrap();
        for i in -50..=50 {
            let t = i as f64 * 0.173;
            let (s, c) = g.sin_cos(t);
            assert!((s - t.sin()).abs() < 1e-12, "t={t}");
            assert!((c - t.cos()).abs() < 1e-7, "t={t}: {c} vs {}", t.cos());
        }
    }

    #[test]
    fn cos_examples() {
        assert!((cos_pq(2.0, 2.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        for (p, q) in [(2.0, 2.0), (3.0, 1.5), (1.4, 3.5)] {
            let g = PqTrig::new(p, q).unwrap();
            assert!(g.cos(0.5 * g.pi()).abs() < 1e-14);
        }
    }

    #[test]
    fn cos_is_the_derivative_of_sin() {
        for (p, q) in [(2.0, 2.0), (3.0, 1.5), (1.4, 3.5)] {
            let g = PqTrig::new(p, q).unwrap();
            for k in 1..40 {
                let t = -g.pi() + k as f64 * g.pi() / 20.0 + 0.013;
                let step = 1e-5;
                let fd = (g.sin(t + step) - g.sin(t - step)) / (2.0 * step);
                assert!((fd - g.cos(t)).abs() < 1e-6, "p={p} q={q} t={t}: {fd} vs {}", g.cos(t));
            }
        }
    }
}
