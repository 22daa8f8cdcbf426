use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A continuous piecewise-linear function on the uniform mesh of `[-1, 1]` with
/// `n` elements, vanishing at both endpoints. Only the `n - 1` interior nodal
/// values are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    n: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub const MIN_ELEMENTS: usize = 16;

    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_mesh(n)?;
        if values.len() != n - 1 {
            return Err(domain(format!(
                "{} interior values supplied for a mesh of {n} elements",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("nodal values must be finite"));
        }
        Ok(Self { n, values })
    }

    /// Samples `f` at the interior nodes.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_mesh(n)?;
        let h = 2.0 / n as f64;
        let values = (1..n).map(|i| f(-1.0 + i as f64 * h)).collect();
        Self::new(n, values)
    }

    pub(crate) fn from_raw(n: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), n - 1);
        Self { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        2.0 / self.n as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Coordinate of node `i`, `0 <= i <= n`.
    pub fn node(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.h()
    }

    /// Value at node `i`, `0 <= i <= n`, including the pinned endpoints.
    pub fn at(&self, i: usize) -> f64 {
        if i == 0 || i == self.n {
            0.0
        } else {
            self.values[i - 1]
        }
    }

    /// `(x_i, u(x_i))` for all `n + 1` nodes.
    pub fn nodal(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..=self.n).map(move |i| (self.node(i), self.at(i)))
    }

    /// Linear interpolation at `x ∈ [-1, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let s = ((x + 1.0) / self.h()).clamp(0.0, self.n as f64);
        let i = (s.floor() as usize).min(self.n - 1);
        let t = s - i as f64;
        (1.0 - t) * self.at(i) + t * self.at(i + 1)
    }

    /// `x ↦ u(-x)`.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self::from_raw(self.n, values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_raw(self.n, self.values.iter().map(|v| c * v).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn check_mesh(n: usize) -> Result<()> {
    if n < GridFunction::MIN_ELEMENTS || n % 2 != 0 {
        return Err(domain(format!(
            "mesh needs an even number of elements, at least {}; got {n}",
            GridFunction::MIN_ELEMENTS
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_validation() {
        assert!(GridFunction::from_fn(15, |_| 0.0).is_err());
        assert!(GridFunction::from_fn(17, |_| 0.0).is_err());
        assert!(GridFunction::from_fn(14, |_| 0.0).is_err());
        assert!(GridFunction::new(16, vec![0.0; 14]).is_err());
        assert!(GridFunction::new(16, vec![f64::NAN; 15]).is_err());
    }

    #[test]
    fn endpoints_pinned_and_centre_is_a_node() {
        let u = GridFunction::from_fn(32, |x| 1.0 - x.abs()).unwrap();
        assert_eq!(u.at(0), 0.0);
        assert_eq!(u.at(32), 0.0);
        assert_eq!(u.node(16), 0.0);
        assert_eq!(u.at(16), 1.0);
        assert!((u.eval(0.03125) - (1.0 - 0.03125)).abs() < 1e-15);
    }

    #[test]
    fn reflection() {
        let u = GridFunction::from_fn(20, |x| x + x * x).unwrap();
        let v = u.reflect();
        for i in 0..=20 {
            assert!((v.at(i) - u.at(20 - i)).abs() < 1e-15);
        }
    }
}
