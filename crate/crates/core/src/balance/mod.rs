//! Residuals of the ten balance equations (mass, linear momentum, position
//! quantity, angular momentum) for each class of medium.

mod cauchy;
mod cosserat;
mod pointwise;
mod rod;
mod shell;

use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

pub use cauchy::{residual_cauchy, residual_cauchy_general};
pub use cosserat::{residual_3d_cosserat, residual_3d_cosserat_general};
pub use pointwise::{residual_pointwise, residual_pointwise_general, PointwisePath};
pub use rod::{residual_1d, residual_1d_general, residual_1d_terms, RodAngularTerms, RodFields, RodTerms};
pub use shell::{residual_2d, residual_2d_general, ShellFields, ShellIdentities, ShellResidual};

use crate::diff::{Domain, FiniteDiff, Linear};
use crate::error::Result;

/// Ten scalar residuals. For shells the slots are laid out as
/// `linear_momentum = (in-plane 1, in-plane 2, off-plane)`,
/// `position_quantity = (J^{10}, J^{20}, J^{03})` identities and
/// `angular_momentum = (off-plane 1, off-plane 2, in-plane)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BalanceResidual {
    pub mass: f64,
    pub linear_momentum: Vector3<f64>,
    pub position_quantity: Vector3<f64>,
    pub angular_momentum: Vector3<f64>,
}

impl BalanceResidual {
    pub fn to_array(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        out[0] = self.mass;
        for i in 0..3 {
            out[1 + i] = self.linear_momentum[i];
            out[4 + i] = self.position_quantity[i];
            out[7 + i] = self.angular_momentum[i];
        }
        out
    }

    pub fn from_array(a: [f64; 10]) -> Self {
        Self {
            mass: a[0],
            linear_momentum: Vector3::new(a[1], a[2], a[3]),
            position_quantity: Vector3::new(a[4], a[5], a[6]),
            angular_momentum: Vector3::new(a[7], a[8], a[9]),
        }
    }

    /// Packs a general divergence: `mass = D_T⁰`, `momentum^i = D_Tⁱ`,
    /// `position^i = D_J^{i0}`, `angular^k = D_J^{ij}` with `(ijk)` cyclic.
    pub fn from_divergence(dt: &Vector4<f64>, dj: &Matrix4<f64>) -> Self {
        Self {
            mass: dt[0],
            linear_momentum: Vector3::new(dt[1], dt[2], dt[3]),
            position_quantity: Vector3::new(dj[(1, 0)], dj[(2, 0)], dj[(3, 0)]),
            angular_momentum: Vector3::new(dj[(2, 3)], dj[(3, 1)], dj[(1, 2)]),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

impl std::ops::Sub for BalanceResidual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let a = self.to_array();
        let b = o.to_array();
        Self::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }
}

/// One evaluated point, as written to JSON reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub chart_point: Vec<f64>,
    pub residual: [f64; 10],
    pub norms: ResidualNorms,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub max_abs: f64,
    pub l2: f64,
}

impl ResidualRecord {
    pub fn new(chart_point: &[f64], r: &BalanceResidual) -> Self {
        Self { chart_point: chart_point.to_vec(), residual: r.to_array(), norms: ResidualNorms { max_abs: r.max_abs(), l2: r.norm() } }
    }
}

pub(crate) struct Differ<'a> {
    pub fd: &'a FiniteDiff,
    pub domain: Option<&'a Domain>,
}

impl Differ<'_> {
    pub fn d<V: Linear, F: Fn(&[f64]) -> V>(&self, f: F, xi: &[f64], k: usize) -> Result<V> {
        self.fd.partial(f, xi, k, self.domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_round_trip() {
        let a: [f64; 10] = std::array::from_fn(|i| i as f64 - 3.5);
        assert_eq!(BalanceResidual::from_array(a).to_array(), a);
        assert_eq!(BalanceResidual::from_array(a).max_abs(), 5.5);
    }
}
