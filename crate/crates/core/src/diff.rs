//! Central finite differences over chart points, with an optional box domain
//! and opt-in one-sided second-order stencils near its boundary.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Values that can be combined linearly by a difference stencil.
pub trait Linear: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Linear for T where T: Clone + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Axis-aligned box of admissible chart points.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::InvalidInput(format!(
                "domain bounds must pair up with lower < upper: {lower:?} / {upper:?}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(p, (l, u))| *p >= *l && *p <= *u)
    }
}

/// Step policy for partial derivatives: `h = rel_step * max(1, |coordinate|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteDiff {
    pub rel_step: f64,
    pub one_sided: bool,
}

impl Default for FiniteDiff {
    fn default() -> Self {
        Self { rel_step: 1e-5, one_sided: false }
    }
}

impl FiniteDiff {
    pub fn with_step(rel_step: f64) -> Self {
        Self { rel_step, ..Self::default() }
    }

    pub fn one_sided(mut self, enabled: bool) -> Self {
        self.one_sided = enabled;
        self
    }

    pub fn step_at(&self, coordinate: f64) -> f64 {
        self.rel_step * coordinate.abs().max(1.0)
    }

    /// Partial derivative of `f` along chart coordinate `k` at `point`.
    pub fn partial<V, F>(&self, f: F, point: &[f64], k: usize, domain: Option<&Domain>) -> Result<V>
    where
        V: Linear,
        F: Fn(&[f64]) -> V,
    {
        let h = self.step_at(point[k]);
        let mut probe = point.to_vec();
        let mut at = |offset: f64| {
            probe[k] = point[k] + offset;
            f(&probe)
        };

        let (fits_below, fits_above) = match domain {
            None => (true, true),
            Some(d) => (point[k] - h >= d.lower[k], point[k] + h <= d.upper[k]),
        };

        if fits_below && fits_above {
            return Ok((at(h) - at(-h)) * (0.5 / h));
        }
        let fail = || Error::DifferentiationFailure { coord: k, point: point.to_vec() };
        if !self.one_sided {
            return Err(fail());
        }
        let d = domain.expect("one-sided branch requires a domain");
        if fits_above && point[k] + 2.0 * h <= d.upper[k] {
            let f0 = at(0.0);
            let f1 = at(h);
            let f2 = at(2.0 * h);
            Ok((f1 * 4.0 - f0 * 3.0 - f2) * (0.5 / h))
        } else if fits_below && point[k] - 2.0 * h >= d.lower[k] {
            let f0 = at(0.0);
            let f1 = at(-h);
            let f2 = at(-2.0 * h);
            Ok((f0 * 3.0 - f1 * 4.0 + f2) * (0.5 / h))
        } else {
            Err(fail())
        }
    }

    /// Derivative of a one-variable function.
    pub fn derivative<V, F>(&self, f: F, t: f64) -> V
    where
        V: Linear,
        F: Fn(f64) -> V,
    {
        let h = self.step_at(t);
        (f(t + h) - f(t - h)) * (0.5 / h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    #[test]
    fn central_difference_is_exact_on_quadratics() {
        let fd = FiniteDiff::default();
        let f = |p: &[f64]| 3.0 * p[0] * p[0] - p[1] * p[0] + 2.0;
        let d = fd.partial(f, &[0.7, -1.3], 0, None).unwrap();
        assert!((d - (4.2 + 1.3)).abs() < 1e-9);
    }

    #[test]
    fn vector_valued_partials() {
        let fd = FiniteDiff::default();
        let f = |p: &[f64]| Vector3::new(p[0].sin(), p[1] * p[0], p[1].exp());
        let d: Vector3<f64> = fd.partial(f, &[0.2, 0.5], 1, None).unwrap();
        assert!((d - Vector3::new(0.0, 0.2, 0.5_f64.exp())).norm() < 1e-9);
    }

    #[test]
    fn boundary_without_fallback_fails() {
        let fd = FiniteDiff::default();
        let dom = Domain::new(vec![0.0], vec![1.0]).unwrap();
        let err = fd.partial(|p: &[f64]| p[0], &[1.0], 0, Some(&dom)).unwrap_err();
        assert!(matches!(err, Error::DifferentiationFailure { coord: 0, .. }));
    }

    #[test]
    fn one_sided_fallback_is_second_order() {
        let dom = Domain::new(vec![0.0], vec![1.0]).unwrap();
        let f = |p: &[f64]| p[0].powi(2);
        for fd in [FiniteDiff::with_step(1e-3).one_sided(true)] {
            let lo = fd.partial(f, &[0.0], 0, Some(&dom)).unwrap();
            let hi = fd.partial(f, &[1.0], 0, Some(&dom)).unwrap();
            assert!(lo.abs() < 1e-12);
            assert!((hi - 2.0).abs() < 1e-9);
        }
    }
}
