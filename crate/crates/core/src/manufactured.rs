//! Smooth non-polynomial fields that satisfy the balance equations exactly,
//! for convergence studies and end-to-end checks.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::balance::{RodFields, ShellFields};
use crate::media::{field, CauchyField, CauchySample, Curve1D, Plane, ShellField, StraightRod};

/// Advection speed of [`cauchy_wave`].
pub const WAVE_SPEED: Vector3<f64> = Vector3::new(0.3, -0.2, 0.1);
const WAVE_K: f64 = 1.3;

/// Density wave carried by a uniform flow `U`, held by a pressure gradient
/// against `a = g − 2Ω×U`, plus a self-equilibrated Airy stress in the
/// `x1, x2` plane. Satisfies the Euler equations of a uniform connection with
/// constant `g` and `Ω` exactly.
pub fn cauchy_wave(g: Vector3<f64>, omega: Vector3<f64>) -> CauchyField {
    let u = WAVE_SPEED;
    let a = g - 2.0 * omega.cross(&u);
    let amp = a.norm();
    let k = if amp > 0.0 { a / amp } else { Vector3::x() };
    CauchyField::new(move |p: &[f64]| {
        let (t, x) = (p[0], Vector3::new(p[1], p[2], p[3]));
        let xi = k.dot(&(x - u * t));
        let rho = 1.2 + 0.4 * (WAVE_K * xi).sin();
        let pressure = amp * (1.2 * xi - 0.4 / WAVE_K * (WAVE_K * xi).cos());
        let phi = x.x.sin() * (0.5 * x.y).exp() * (1.0 + 0.2 * t.sin());
        let phi_12 = 0.5 * x.x.cos() * (0.5 * x.y).exp() * (1.0 + 0.2 * t.sin());
        let mut sigma = -Matrix3::identity() * pressure;
        sigma[(0, 0)] += 0.25 * phi;
        sigma[(1, 1)] -= phi;
        sigma[(0, 1)] -= phi_12;
        sigma[(1, 0)] -= phi_12;
        CauchySample { rho, v: u, sigma }
    })
}

/// Straight rod at rest along `e1` carrying its own weight: density
/// `1 + 0.3 sin s`, force `F = −g (s − 0.3 cos s)` and moment
/// `M⋆ = −(e1 × g)(s²/2 − 0.3 sin s)`. Balanced for any constant `Ω`.
pub fn rod_self_weight(g: Vector3<f64>) -> RodFields {
    let mut f = RodFields::new(Curve1D::new(StraightRod::at_rest(Vector3::x())), field(|p: &[f64]| 1.0 + 0.3 * p[1].sin()));
    f.force = field(move |p: &[f64]| -g * (p[1] - 0.3 * p[1].cos()));
    f.q = field(|p: &[f64]| Vector3::x() * (p[1] * (1.0 + 0.3 * p[1].sin())));
    let exg = Vector3::x().cross(&g);
    f.m_star = field(move |p: &[f64]| -exg * (0.5 * p[1] * p[1] - 0.3 * p[1].sin()));
    f
}

/// Plate `x3 = 0` bending under the normal gravity `g3`: shear
/// `Q = (−ρ_s g3 θ¹ + sin θ², cos θ¹)`, moments balancing `Q` and an Airy
/// membrane field. Balanced for gravity `(0, 0, g3)` and any constant `Ω`.
pub fn plate_self_weight(g3: f64, rho_s: f64, thickness: f64) -> ShellFields {
    let mut f = ShellFields::new(ShellField::new(Plane, thickness), field(move |_: &[f64]| rho_s));
    f.q = field(move |p: &[f64]| Vector2::new(-rho_s * g3 * p[1] + p[2].sin(), p[1].cos()));
    f.m = field(move |p: &[f64]| Matrix2::new(-0.5 * rho_s * g3 * p[1] * p[1] + p[1] * p[2].sin(), p[1].sin(), 0.0, 0.0));
    f.n = field(|p: &[f64]| {
        let phi = p[1].sin() * (0.5 * p[2]).exp();
        let phi_12 = 0.5 * p[1].cos() * (0.5 * p[2]).exp();
        Matrix2::new(0.25 * phi, -phi_12, -phi_12, -phi)
    });
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::{residual_1d, residual_2d, residual_3d_cosserat, residual_cauchy};
    use crate::connection::GalileanConnection;
    use crate::media::Cosserat3DState;

    #[test]
    fn wave_is_balanced() {
        let (g, w) = (Vector3::new(0.5, -1.0, -9.8), Vector3::new(0.1, 0.2, 0.7));
        let f = cauchy_wave(g, w);
        let conn = GalileanConnection::uniform(g, w);
        for xi in [[0.0, 0.1, 0.2, 0.3], [1.3, -0.7, 0.4, 2.0]] {
            assert!(residual_cauchy(&f, &conn, &xi).unwrap().max_abs() < 1e-8);
            let c = residual_3d_cosserat(&Cosserat3DState::from_cauchy(&f), &conn, &xi).unwrap();
            assert!(c.max_abs() < 1e-8, "{c:?}");
        }
    }

    #[test]
    fn rod_is_balanced() {
        let g = Vector3::new(0.0, -9.81, 1.0);
        let f = rod_self_weight(g);
        let conn = GalileanConnection::uniform(g, Vector3::new(0.3, 0.0, 0.2));
        for s in [0.2, 1.7, 3.0] {
            assert!(residual_1d(&f, &conn, &[0.4, s]).unwrap().max_abs() < 1e-8);
        }
    }

    #[test]
    fn plate_is_balanced() {
        let f = plate_self_weight(-9.81, 2.5, 0.02);
        let conn = GalileanConnection::uniform(Vector3::new(0.0, 0.0, -9.81), Vector3::new(0.0, 0.4, 1.0));
        for xi in [[0.0, 0.3, -0.2], [0.5, 1.1, 0.9]] {
            let r = residual_2d(&f, &conn, &xi).unwrap();
            assert!(r.residual.max_abs() < 1e-8, "{r:?}");
        }
    }
}
