use nalgebra::{Matrix3, Vector3};

use super::{BalanceResidual, Differ};
use crate::connection::{div_j, div_t, GalileanConnection, OriginMotion, PullbackChristoffels};
use crate::error::Result;
use crate::media::CauchyField;

/// Euler equations at `ξ = (t, x)`:
/// mass `∂ρ/∂t + div(ρv)`, momentum `ρ(∂v/∂t + (∂v/∂x)v) − div σ − ρ(g − 2Ω×v)`,
/// and the antisymmetry of the stress-mass tensor in the remaining slots,
/// `position^i = T^{0i} − T^{i0}`, `angular^k = T^{ji} − T^{ij}`.
pub fn residual_cauchy(f: &CauchyField, conn: &GalileanConnection, xi: &[f64]) -> Result<BalanceResidual> {
    let dd = Differ { fd: &f.diff, domain: f.domain.as_ref() };
    let s = f.at(xi);
    let x = Vector3::new(xi[1], xi[2], xi[3]);

    let mut mass = dd.d(|p| f.at(p).rho, xi, 0)?;
    let dv_dt: Vector3<f64> = dd.d(|p| f.at(p).v, xi, 0)?;
    let mut grad_v = Matrix3::zeros();
    let mut div_sigma = Vector3::zeros();
    for j in 0..3 {
        mass += dd.d(|p| { let c = f.at(p); c.rho * c.v[j] }, xi, j + 1)?;
        let dv: Vector3<f64> = dd.d(|p| f.at(p).v, xi, j + 1)?;
        grad_v.set_column(j, &dv);
        let ds: Vector3<f64> = dd.d(|p| f.at(p).sigma.column(j).into_owned(), xi, j + 1)?;
        div_sigma += ds;
    }
    let momentum = s.rho * (dv_dt + grad_v * s.v) - div_sigma - s.rho * conn.acceleration(xi[0], &x, &s.v);

    let t = s.stress_mass();
    Ok(BalanceResidual {
        mass,
        linear_momentum: momentum,
        position_quantity: Vector3::from_fn(|i, _| t[(0, i + 1)] - t[(i + 1, 0)]),
        angular_momentum: Vector3::from_fn(|k, _| {
            let (i, j) = crate::algebra::cyclic(k);
            t[(j + 1, i + 1)] - t[(i + 1, j + 1)]
        }),
    })
}

/// Same balance through the general divergence with the identity embedding
/// and a proper frame. Its momentum slots are in conservative form and
/// differ from [`residual_cauchy`] by `v` times the mass residual.
pub fn residual_cauchy_general(f: &CauchyField, conn: &GalileanConnection, xi: &[f64]) -> Result<BalanceResidual> {
    let m = f.to_medium_field();
    let x = Vector3::new(xi[1], xi[2], xi[3]);
    let chr = PullbackChristoffels::identity_embedding(conn, &OriginMotion::Proper, xi[0], &x);
    Ok(BalanceResidual::from_divergence(&div_t(&m, xi, &chr)?, &div_j(&m, xi, &chr)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::CauchySample;

    #[test]
    fn uniform_flow_is_balanced() {
        let f = CauchyField::new(|_: &[f64]| CauchySample {
            rho: 1.2,
            v: Vector3::new(0.5, -1.0, 2.0),
            sigma: Matrix3::zeros(),
        });
        let r = residual_cauchy(&f, &GalileanConnection::flat(), &[0.3, 1.0, 2.0, -1.0]).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn hydrostatic_column() {
        let (rho, g0, p0) = (1000.0, 9.81, 1e5);
        let f = CauchyField::new(move |xi: &[f64]| CauchySample {
            rho,
            v: Vector3::zeros(),
            sigma: -(p0 - rho * g0 * xi[3]) * Matrix3::identity(),
        });
        let conn = GalileanConnection::uniform(Vector3::new(0.0, 0.0, -g0), Vector3::zeros());
        let r = residual_cauchy(&f, &conn, &[0.0, 0.1, 0.2, -3.0]).unwrap();
        assert!(r.max_abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn conservative_and_advective_forms_agree_up_to_mass_flux() {
        let f = CauchyField::new(|xi: &[f64]| {
            let (t, x, y, z) = (xi[0], xi[1], xi[2], xi[3]);
            CauchySample {
                rho: 1.0 + 0.3 * (x - t).sin() * y.cos(),
                v: Vector3::new(0.2 * z, (t + x).cos(), 0.1 * x * y),
                sigma: Matrix3::new(x, 0.1 * y, 0.0, 0.1 * y, z * t, 0.2, 0.0, 0.2, -x * y),
            }
        });
        let conn = GalileanConnection::uniform(Vector3::new(0.0, -1.0, -9.0), Vector3::new(0.3, 0.1, 1.0));
        let xi = [0.4, 0.2, -0.7, 1.1];
        let a = residual_cauchy(&f, &conn, &xi).unwrap();
        let b = residual_cauchy_general(&f, &conn, &xi).unwrap();
        let v = f.at(&xi).v;
        assert!((a.mass - b.mass).abs() < 1e-8);
        assert!((a.linear_momentum + v * a.mass - b.linear_momentum).norm() < 1e-7);
        assert!(b.position_quantity.norm() < 1e-12 && b.angular_momentum.norm() < 1e-12);
    }
}
