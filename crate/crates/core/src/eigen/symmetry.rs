use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::Params;

use super::grid::GridFunction;
use super::quotient::functionals;

/// Shape statistics of a discrete function, used to tell the two minimizer branches apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryDiagnostics {
    /// `‖u(x) - u(-x)‖_q / ‖u‖_q`, zero for even `u`.
    pub even_defect: f64,
    /// `‖u(x) + u(-x)‖_q / ‖u‖_q`, zero for odd `u`.
    pub odd_defect: f64,
    /// `∫|u|^{r-2}u`.
    pub r_average: f64,
    /// Sign changes in the sequence of nodal values.
    pub zero_count: usize,
    /// Last node before the first sign change, linearly interpolated; `None` without one.
    pub first_zero: Option<f64>,
    pub max: f64,
    pub argmax: f64,
    pub min: f64,
    pub argmin: f64,
}

/// Nodal values below this fraction of `max |u|` count as zero when counting sign changes.
const ZERO_THRESHOLD: f64 = 1e-10;

pub fn symmetry_diagnostics(u: &GridFunction, params: &Params) -> Result<SymmetryDiagnostics> {
    let f = functionals(u, params)?;
    let q = params.q();
    let norm = f.q_mass.powf(1.0 / q).max(f64::MIN_POSITIVE);
    let mirror = u.reflect();
    let combine = |sign: f64| -> Result<f64> {
        let w: Vec<f64> = u.values().iter().zip(mirror.values()).map(|(a, b)| a - sign * b).collect();
        let g = GridFunction::from_raw(u.n(), w);
        Ok(functionals(&g, params)?.q_mass.powf(1.0 / q) / norm)
    };

    let cut = ZERO_THRESHOLD * u.max_abs();
    let mut zero_count = 0;
    let mut first_zero = None;
    let mut last: Option<(f64, f64)> = None;
    let (mut max, mut argmax, mut min, mut argmin) = (f64::MIN, 0.0, f64::MAX, 0.0);
    for (x, v) in u.nodal() {
        if v > max {
            max = v;
            argmax = x;
        }
        if v < min {
            min = v;
            argmin = x;
        }
        if v.abs() <= cut {
            continue;
        }
        if let Some((x0, v0)) = last {
            if v0 * v < 0.0 {
                zero_count += 1;
                if first_zero.is_none() {
                    first_zero = Some(x0 + (x - x0) * v0 / (v0 - v));
                }
            }
        }
        last = Some((x, v));
    }

    Ok(SymmetryDiagnostics {
        even_defect: combine(1.0)?,
        odd_defect: combine(-1.0)?,
        r_average: f.r_average,
        zero_count,
        first_zero,
        max,
        argmax,
        min,
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gtrig::PqTrig;
    use std::f64::consts::PI;

    #[test]
    fn odd_sine() {
        let params = Params::new(2.0, 2.0, 2.0).unwrap();
        let u = GridFunction::from_fn(128, |x| (PI * x).sin()).unwrap();
        let d = symmetry_diagnostics(&u, &params).unwrap();
        assert!(d.odd_defect < 1e-14);
        assert!((d.even_defect - 2.0).abs() < 1e-12);
        assert_eq!(d.zero_count, 1);
        assert!(d.r_average.abs() < 1e-14);
        assert!((d.argmax - 0.5).abs() < 1e-12 && (d.argmin + 0.5).abs() < 1e-12);
    }

    #[test]
    fn positive_bump() {
        let params = Params::new(3.0, 2.5, 3.0).unwrap();
        let u = GridFunction::from_fn(64, |x| 1.0 - x * x).unwrap();
        let d = symmetry_diagnostics(&u, &params).unwrap();
        assert!(d.even_defect < 1e-14);
        assert_eq!(d.zero_count, 0);
        assert_eq!(d.first_zero, None);
        assert!(d.r_average > 0.0);
    }

    #[test]
    fn generalized_sine_vanishes_at_centre() {
        let t = PqTrig::new(3.0, 2.0).unwrap();
        let params = Params::new(3.0, 2.0, 2.5).unwrap();
        // shifted slightly so the crossing is not a node
        let u = GridFunction::from_fn(64, |x| t.sin(t.pi() * x)).unwrap();
        let d = symmetry_diagnostics(&u, &params).unwrap();
        assert_eq!(d.zero_count, 1);
        assert!(d.first_zero.unwrap().abs() < 1e-12);
    }
}
