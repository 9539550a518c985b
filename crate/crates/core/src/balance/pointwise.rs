use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};

use super::BalanceResidual;
use crate::affine::PointwiseTorsor;
use crate::connection::{christoffels_at, gamma_a_at, GalileanConnection, OriginMotion};
use crate::diff::FiniteDiff;
use crate::error::{Error, Result};

/// Time history of a pointwise object's torsor.
pub type PointwisePath = Arc<dyn Fn(f64) -> PointwiseTorsor + Send + Sync>;

/// Residuals of
/// `ṁ = 0`, `ṗ = m(g − 2Ω×v)`, `q̇ = p`, `l̇ + Ω×l₀ = x × m(g − 2Ω×v)`,
/// which hold for the observer origin `C = (0, x)` only.
pub fn residual_pointwise(
    path: &dyn Fn(f64) -> PointwiseTorsor,
    conn: &GalileanConnection,
    origin: &OriginMotion,
    t: f64,
    fd: &FiniteDiff,
) -> Result<BalanceResidual> {
    if !matches!(origin, OriginMotion::Observer) {
        return Err(Error::InvalidInput(
            "pointwise balance equations are stated for the observer origin C = (0, x); use residual_pointwise_general"
                .into(),
        ));
    }
    let s = path(t);
    if !(s.m > 0.0) {
        return Err(Error::NonpositiveMass { mass: s.m });
    }
    let dm = fd.derivative(|u| path(u).m, t);
    let dp = fd.derivative(|u| path(u).p, t);
    let dq = fd.derivative(|u| path(u).q, t);
    let dl = fd.derivative(|u| path(u).l, t);
    let x = s.position();
    let v = s.velocity();
    let force = s.m * conn.acceleration(t, &x, &v);
    let l0 = s.proper_angular_momentum();
    Ok(BalanceResidual {
        mass: dm,
        linear_momentum: dp - force,
        position_quantity: dq - s.p,
        angular_momentum: dl + conn.omega(t, &x).cross(&l0) - x.cross(&force),
    })
}

/// Covariant derivative of the torsor along the world line,
/// `dT + Γ T` and `dJ + Γ J + J Γᵀ + Γ_A Tᵀ − T Γ_Aᵀ` per unit time, for any
/// origin convention.
pub fn residual_pointwise_general(
    path: &dyn Fn(f64) -> PointwiseTorsor,
    conn: &GalileanConnection,
    origin: &OriginMotion,
    t: f64,
    fd: &FiniteDiff,
) -> Result<BalanceResidual> {
    let s = path(t);
    if !(s.m > 0.0) {
        return Err(Error::NonpositiveMass { mass: s.m });
    }
    let tau = s.to_torsor();
    let dt: Vector4<f64> = fd.derivative(|u| *path(u).to_torsor().t(), t);
    let dj: Matrix4<f64> = fd.derivative(|u| *path(u).to_torsor().j(), t);
    let x = s.position();
    let v = s.velocity();
    let dx = Vector4::new(1.0, v.x, v.y, v.z);
    let gm = christoffels_at(conn, t, &x).matrix(&dx);
    let ga = gamma_a_at(conn, origin, t, &x, &dx);
    let tt = tau.t();
    let div_t = dt + gm * tt;
    let div_j = dj + gm * tau.j() + tau.j() * gm.transpose() + ga * tt.transpose() - tt * ga.transpose();
    Ok(BalanceResidual::from_divergence(&div_t, &div_j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn free(t: f64) -> PointwiseTorsor {
        let m = 2.0;
        let p = Vector3::new(1.0, -0.5, 0.25);
        let q0 = Vector3::new(0.3, 0.1, -0.2);
        let l = Vector3::new(0.7, 0.0, 1.0);
        PointwiseTorsor { m, p, q: q0 + p * t, l }
    }

    #[test]
    fn free_particle_is_balanced() {
        let r = residual_pointwise(&free, &GalileanConnection::flat(), &OriginMotion::Observer, 0.4, &FiniteDiff::default())
            .unwrap();
        assert!(r.max_abs() < 1e-9);
    }

    #[test]
    fn uniform_gravity_momentum() {
        let g = Vector3::new(0.0, 0.0, -9.81);
        let conn = GalileanConnection::uniform(g, Vector3::zeros());
        let m = 1.5;
        let v0 = Vector3::new(1.0, 2.0, 3.0);
        let x0 = Vector3::new(0.0, 1.0, 0.0);
        let l0 = Vector3::new(0.2, 0.1, -0.3);
        let path = move |t: f64| {
            let x = x0 + v0 * t + g * (0.5 * t * t);
            let p = m * (v0 + g * t);
            PointwiseTorsor { m, p, q: m * x, l: l0 + x.cross(&p) }
        };
        let r = residual_pointwise(&path, &conn, &OriginMotion::Observer, 0.7, &FiniteDiff::default()).unwrap();
        assert!(r.max_abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn general_route_matches_displayed_equations() {
        let conn = GalileanConnection::new(
            |t, x| Vector3::new(0.1 * x.y, -1.0 + 0.2 * t, 0.3 * x.x * x.z),
            |t, _| Vector3::new(0.2, -0.4 + 0.1 * t, 0.9),
        );
        let path = |t: f64| PointwiseTorsor {
            m: 1.3,
            p: Vector3::new(t.sin(), 1.0 + t * t, -0.5 * t),
            q: Vector3::new(t.cos(), 0.2 * t, 1.0 + t * t * t),
            l: Vector3::new(0.1 * t, (2.0 * t).sin(), 0.4),
        };
        let fd = FiniteDiff::default();
        for t in [0.0, 0.3, 1.2] {
            let a = residual_pointwise(&path, &conn, &OriginMotion::Observer, t, &fd).unwrap();
            let b = residual_pointwise_general(&path, &conn, &OriginMotion::Observer, t, &fd).unwrap();
            assert!((a - b).max_abs() < 1e-9, "{:?}", a - b);
        }
    }

    #[test]
    fn displayed_form_requires_observer_origin() {
        let err = residual_pointwise(&free, &GalileanConnection::flat(), &OriginMotion::Proper, 0.0, &FiniteDiff::default());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }
}
