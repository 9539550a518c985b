use nalgebra::{Matrix3, Vector3};

use super::{BalanceResidual, Differ};
use crate::algebra::{cyclic, skew};
use crate::connection::{div_j, div_t, GalileanConnection, OriginMotion, PullbackChristoffels};
use crate::error::Result;
use crate::media::Cosserat3DState;

/// 3D Cosserat balance in a proper frame at `ξ = (t, x)`:
///
/// ```text
/// mass       ∂T⁰⁰/∂t + ∂T⁰ⁱ/∂xⁱ
/// momentum   ∂Tⁱ⁰/∂t + ∂Tⁱʲ/∂xʲ − (T⁰⁰gⁱ − Ωⁱⱼ(T⁰ʲ + Tʲ⁰))
/// position   ∂qⁱ/∂t + Ωⁱⱼqʲ + ∂l⋆ⁱʳ/∂xʳ + T⁰ⁱ − Tⁱ⁰
/// angular    ∂lᵏ/∂t + ∂M⋆ᵏᵐ/∂xᵐ − (q×g)ᵏ + (Ω×l)ᵏ + Ωʲᵣl⋆ⁱʳ − Ωⁱᵣl⋆ʲʳ + Tʲⁱ − Tⁱʲ
/// ```
///
/// with `(ijk)` cyclic. The spin-spin term `Ωⁱₚ J^{pj0} + Ωʲₚ J^{ip0}` is the
/// commutator `[j(Ω), j(l)] = j(Ω×l)`.
pub fn residual_3d_cosserat(s: &Cosserat3DState, conn: &GalileanConnection, xi: &[f64]) -> Result<BalanceResidual> {
    let dd = Differ { fd: &s.diff, domain: s.domain.as_ref() };
    let x = Vector3::new(xi[1], xi[2], xi[3]);
    let g = conn.g(xi[0], &x);
    let omega = conn.omega(xi[0], &x);
    let w = skew(&omega);

    let t = (s.stress_mass)(xi);
    let q = (s.q)(xi);
    let l = (s.l)(xi);
    let ls = (s.l_star)(xi);

    // divergence over the right (material) index, column by column
    let mut div_t: nalgebra::Vector4<f64> = dd.d(|p| (s.stress_mass)(p).column(0).into_owned(), xi, 0)?;
    let mut div_ls = Vector3::zeros();
    let mut div_ms = Vector3::zeros();
    for r in 0..3 {
        div_t += dd.d(|p| (s.stress_mass)(p).column(r + 1).into_owned(), xi, r + 1)?;
        div_ls += dd.d(|p| (s.l_star)(p).column(r).into_owned(), xi, r + 1)?;
        div_ms += dd.d(|p| (s.m_star)(p).column(r).into_owned(), xi, r + 1)?;
    }
    let dq: Vector3<f64> = dd.d(|p| (s.q)(p), xi, 0)?;
    let dl: Vector3<f64> = dd.d(|p| (s.l)(p), xi, 0)?;

    let t0 = Vector3::new(t[(0, 1)], t[(0, 2)], t[(0, 3)]);
    let t_0 = Vector3::new(t[(1, 0)], t[(2, 0)], t[(3, 0)]);
    let momentum = Vector3::new(div_t[1], div_t[2], div_t[3]) - (g * t[(0, 0)] - w * (t0 + t_0));

    let cross_ls: Matrix3<f64> = w * ls.transpose();
    let angular = Vector3::from_fn(|k, _| {
        let (i, j) = cyclic(k);
        cross_ls[(j, i)] - cross_ls[(i, j)] + t[(j + 1, i + 1)] - t[(i + 1, j + 1)]
    });

    Ok(BalanceResidual {
        mass: div_t[0],
        linear_momentum: momentum,
        position_quantity: dq + w * q + div_ls + t0 - t_0,
        angular_momentum: dl + div_ms - q.cross(&g) + omega.cross(&l) + angular,
    })
}

/// Same balances through the general divergence with the identity
/// embedding and a proper frame.
pub fn residual_3d_cosserat_general(s: &Cosserat3DState, conn: &GalileanConnection, xi: &[f64]) -> Result<BalanceResidual> {
    let m = s.to_medium_field();
    let x = Vector3::new(xi[1], xi[2], xi[3]);
    let chr = PullbackChristoffels::identity_embedding(conn, &OriginMotion::Proper, xi[0], &x);
    Ok(BalanceResidual::from_divergence(&div_t(&m, xi, &chr)?, &div_j(&m, xi, &chr)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::residual_cauchy;
    use crate::media::{field, CauchyField, CauchySample};
    use crate::diff::FiniteDiff;
    use nalgebra::Matrix4;

    fn manufactured() -> Cosserat3DState {
        Cosserat3DState {
            stress_mass: field(|xi: &[f64]| {
                let (t, x, y, z) = (xi[0], xi[1], xi[2], xi[3]);
                Matrix4::from_fn(|a, b| ((a * 4 + b) as f64 * 0.1 + 1.0) * (x * (a as f64 + 1.0) - y * b as f64 + t * z).sin())
            }),
            q: field(|xi: &[f64]| Vector3::new(xi[0] * xi[1], xi[2].cos(), xi[3] * xi[3])),
            l: field(|xi: &[f64]| Vector3::new(xi[2] - xi[0], xi[1] * xi[3], (xi[0] + xi[2]).sin())),
            l_star: field(|xi: &[f64]| Matrix3::from_fn(|i, r| ((i + 2 * r) as f64 * xi[r + 1] + xi[0] * i as f64).cos())),
            m_star: field(|xi: &[f64]| Matrix3::from_fn(|k, m| (k as f64 - m as f64) * xi[m + 1] * xi[1] + xi[0])),
            domain: None,
            diff: FiniteDiff::default(),
        }
    }

    #[test]
    fn matches_general_divergence() {
        let s = manufactured();
        let conn = GalileanConnection::uniform(Vector3::new(0.3, -0.2, -9.8), Vector3::new(0.4, -0.7, 1.1));
        let m = s.to_medium_field();
        for xi in [[0.1, 0.2, -0.3, 0.4], [1.0, -0.5, 0.8, 0.0]] {
            let x = Vector3::new(xi[1], xi[2], xi[3]);
            let chr = PullbackChristoffels::identity_embedding(&conn, &OriginMotion::Proper, xi[0], &x);
            let general = BalanceResidual::from_divergence(&div_t(&m, &xi, &chr).unwrap(), &div_j(&m, &xi, &chr).unwrap());
            assert_eq!(general, residual_3d_cosserat_general(&s, &conn, &xi).unwrap());
            let direct = residual_3d_cosserat(&s, &conn, &xi).unwrap();
            assert!((general - direct).max_abs() < 1e-7, "{:?}", general - direct);
        }
    }

    #[test]
    fn zero_everything() {
        let s = Cosserat3DState::from_cauchy(&CauchyField::new(|_: &[f64]| CauchySample {
            rho: 0.0,
            v: Vector3::zeros(),
            sigma: Matrix3::zeros(),
        }));
        let r = residual_3d_cosserat(&s, &GalileanConnection::flat(), &[0.0; 4]).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn reduces_to_cauchy_without_angular_fields() {
        let c = CauchyField::new(|xi: &[f64]| CauchySample {
            rho: 1.0 + 0.2 * xi[1].sin(),
            v: Vector3::new(xi[2], 0.3 * xi[0], -xi[1] * xi[3]),
            sigma: Matrix3::new(xi[1], 0.2, 0.0, 0.2, xi[2] * xi[0], 0.1, 0.0, 0.1, 1.0),
        });
        let conn = GalileanConnection::uniform(Vector3::new(0.0, 0.0, -9.81), Vector3::new(0.0, 0.5, 1.0));
        let xi = [0.3, 0.4, -0.2, 0.9];
        let a = residual_cauchy(&c, &conn, &xi).unwrap();
        let b = residual_3d_cosserat(&Cosserat3DState::from_cauchy(&c), &conn, &xi).unwrap();
        let v = c.at(&xi).v;
        assert!((a.mass - b.mass).abs() < 1e-9);
        assert!((a.linear_momentum + v * a.mass - b.linear_momentum).norm() < 1e-8);
        assert!((a.position_quantity - b.position_quantity).norm() < 1e-9);
        assert!((a.angular_momentum - b.angular_momentum).norm() < 1e-9);
    }
}
