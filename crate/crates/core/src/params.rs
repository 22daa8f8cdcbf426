use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// The exponent triple `(p, q, r)` together with the conjugate exponent of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    p: f64,
    q: f64,
    r: f64,
    p_conj: f64,
}

impl Params {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if !v.is_finite() || v <= 1.0 {
                return Err(domain(format!("exponent {name} = {v} must be finite and > 1")));
            }
        }
        Ok(Self {
            p,
            q,
            r,
            p_conj: p / (p - 1.0),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `p' = p / (p - 1)`.
    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }

    /// `2p/(p+2) <= q <= p` and `q/2 + 1 <= r <= q + q/p`.
    pub fn in_theorem_range(&self) -> bool {
        let (p, q, r) = (self.p, self.q, self.r);
        let eps = 1e-12;
        2.0 * p / (p + 2.0) <= q + eps
            && q <= p + eps
            && q / 2.0 + 1.0 <= r + eps
            && r <= q + q / p + eps
    }

    /// Lower end of the `r` range on which `h` is monotone in `r`: `1/2 + q/2 + q/(2p)`.
    pub fn monotonicity_r_min(&self) -> f64 {
        0.5 + self.q / 2.0 + self.q / (2.0 * self.p)
    }

    /// Upper end of the admissible `r` range: `q + q/p`.
    pub fn r_max(&self) -> f64 {
        self.q + self.q / self.p
    }

    /// Lower end of the admissible `r` range: `q/2 + 1`.
    pub fn r_min(&self) -> f64 {
        self.q / 2.0 + 1.0
    }

    /// Exponent `p/(r-1)` carried by the nonlocal term.
    pub fn nonlocal_exponent(&self) -> f64 {
        self.p / (self.r - 1.0)
    }

    /// True when `r = p + 1`, where the nonlocal term is `alpha |gamma|` and has a kink at zero.
    pub fn is_kinked(&self) -> bool {
        (self.r - self.p - 1.0).abs() <= 1e-12
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(self.p, self.q, r)
    }
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    p: f64,
    q: f64,
    r: f64,
    p_conj: f64,
    in_theorem_range: bool,
}

impl From<Params> for RawParams {
    fn from(v: Params) -> Self {
        Self {
            p: v.p,
            q: v.q,
            r: v.r,
            p_conj: v.p_conj,
            in_theorem_range: v.in_theorem_range(),
        }
    }
}

impl TryFrom<RawParams> for Params {
    type Error = crate::error::Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.p, raw.q, raw.r)
    }
}
