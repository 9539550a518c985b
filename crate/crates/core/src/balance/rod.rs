use nalgebra::{DMatrix, Matrix4, Vector3, Vector4};

use super::{BalanceResidual, Differ};
use crate::algebra::levi_civita;
use crate::connection::{christoffels_at, div_j, div_t, gamma_a_matrix, GalileanConnection, OriginMotion, PullbackChristoffels};
use crate::diff::{Domain, FiniteDiff};
use crate::error::Result;
use crate::media::{field, tangent_map_1d, Curve1D, Field, ForceMass1D, MediumField};

/// Rod fields over `ξ = (t, s)`: kinematics from the curve, plus the linear
/// density, statical force and the angular components `q`, `l`, `l⋆`, `M⋆`.
#[derive(Clone)]
pub struct RodFields {
    pub curve: Curve1D,
    pub rho_l: Field<f64>,
    pub force: Field<Vector3<f64>>,
    pub q: Field<Vector3<f64>>,
    pub l: Field<Vector3<f64>>,
    pub l_star: Field<Vector3<f64>>,
    pub m_star: Field<Vector3<f64>>,
    pub domain: Option<Domain>,
    pub diff: FiniteDiff,
}

impl RodFields {
    /// Curve and density only; every other field zero.
    pub fn new(curve: Curve1D, rho_l: Field<f64>) -> Self {
        let zero = field(|_: &[f64]| Vector3::zeros());
        Self {
            curve,
            rho_l,
            force: zero.clone(),
            q: zero.clone(),
            l: zero.clone(),
            l_star: zero.clone(),
            m_star: zero,
            domain: None,
            diff: FiniteDiff::default(),
        }
    }

    pub fn force_mass(&self, xi: &[f64]) -> Result<ForceMass1D> {
        Ok(ForceMass1D {
            rho_l: (self.rho_l)(xi),
            v: self.curve.v(xi[0], xi[1]),
            v_t: self.curve.v_t(xi[0], xi[1])?,
            f: (self.force)(xi),
        })
    }

    /// General field bundle: `^γT^β` from the force-mass tensor and `J`
    /// slabs with `q^i = ⁰J^{i0}`, `l^i = ⁰J^{kl}`, `l⋆^i = ¹J^{i0}`,
    /// `M⋆^i = ¹J^{kl}`.
    pub fn to_medium_field(&self) -> MediumField {
        let c = self.curve.clone();
        let embedding = field(move |xi: &[f64]| {
            let x = c.position(xi[0], xi[1]);
            Vector4::new(xi[0], x.x, x.y, x.z)
        });
        let me = self.clone();
        let t = field(move |xi: &[f64]| {
            let fm = me.force_mass(xi).expect("rod curve must stay regular");
            let m = fm.t_matrix();
            DMatrix::from_fn(2, 4, |g, b| m[(g, b)])
        });
        let me = self.clone();
        let j = field(move |xi: &[f64]| {
            let slab = |time: Vector3<f64>, axial: Vector3<f64>| {
                let mut s = Matrix4::zeros();
                for i in 0..3 {
                    s[(i + 1, 0)] = time[i];
                    s[(0, i + 1)] = -time[i];
                    for jj in 0..3 {
                        s[(i + 1, jj + 1)] = (0..3).map(|k| levi_civita(i, jj, k) * axial[k]).sum();
                    }
                }
                s
            };
            vec![slab((me.q)(xi), (me.l)(xi)), slab((me.l_star)(xi), (me.m_star)(xi))]
        });
        let c = self.curve.clone();
        let u = field(move |xi: &[f64]| {
            let u = tangent_map_1d(&c, xi[0], xi[1]).expect("rod curve must stay regular");
            DMatrix::from_fn(4, 2, |a, g| u[(a, g)])
        });
        let mut m = MediumField::new(1, embedding, t, j)
            .expect("dimension 1 is valid")
            .with_tangent_map(u)
            .with_diff(self.diff);
        if let Some(d) = &self.domain {
            m = m.with_domain(d.clone());
        }
        m
    }
}

/// Individual terms of the rod angular balance
/// `∂l/∂t + Ω×l + l⋆×(Ω×n) + ∂M⋆/∂s − n×F`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RodAngularTerms {
    pub dl_dt: Vector3<f64>,
    pub omega_cross_l: Vector3<f64>,
    pub l_star_term: Vector3<f64>,
    pub dm_star_ds: Vector3<f64>,
    pub n_cross_f: Vector3<f64>,
}

impl RodAngularTerms {
    pub fn sum(&self) -> Vector3<f64> {
        self.dl_dt + self.omega_cross_l + self.l_star_term + self.dm_star_ds - self.n_cross_f
    }
}

/// Every term entering the four rod balances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RodTerms {
    pub drho_dt: f64,
    pub dflux_ds: f64,
    /// `ρ_l (∂v/∂t + v_t ∂v/∂s)`.
    pub inertia: Vector3<f64>,
    pub df_ds: Vector3<f64>,
    /// `ρ_l (g − 2Ω×v)`.
    pub load: Vector3<f64>,
    pub dq_dt: Vector3<f64>,
    pub dl_star_ds: Vector3<f64>,
    pub momentum: Vector3<f64>,
    pub angular: RodAngularTerms,
}

impl RodTerms {
    pub fn residual(&self) -> BalanceResidual {
        BalanceResidual {
            mass: self.drho_dt + self.dflux_ds,
            linear_momentum: self.inertia - self.df_ds - self.load,
            position_quantity: self.dq_dt + self.dl_star_ds - self.momentum,
            angular_momentum: self.angular.sum(),
        }
    }
}

/// Evaluates every term of the rod balances at `ξ = (t, s)`.
pub fn residual_1d_terms(f: &RodFields, conn: &GalileanConnection, xi: &[f64]) -> Result<RodTerms> {
    let dd = Differ { fd: &f.diff, domain: f.domain.as_ref() };
    let (t, s) = (xi[0], xi[1]);
    let c = &f.curve;
    let x = c.position(t, s);
    let n = c.n(t, s)?;
    let v = c.v(t, s);
    let v_t = v.dot(&n);
    let rho = (f.rho_l)(xi);
    let omega = conn.omega(t, &x);
    let vel = |p: &[f64]| c.v(p[0], p[1]);

    let dv_dt: Vector3<f64> = dd.d(vel, xi, 0)?;
    let dv_ds: Vector3<f64> = dd.d(vel, xi, 1)?;
    let flux = |p: &[f64]| (f.rho_l)(p) * c.v_t(p[0], p[1]).unwrap_or(f64::NAN);
    let force = (f.force)(xi);

    Ok(RodTerms {
        drho_dt: dd.d(|p| (f.rho_l)(p), xi, 0)?,
        dflux_ds: dd.d(flux, xi, 1)?,
        inertia: rho * (dv_dt + dv_ds * v_t),
        df_ds: dd.d(|p| (f.force)(p), xi, 1)?,
        load: rho * conn.acceleration(t, &x, &v),
        dq_dt: dd.d(|p| (f.q)(p), xi, 0)?,
        dl_star_ds: dd.d(|p| (f.l_star)(p), xi, 1)?,
        momentum: rho * v,
        angular: RodAngularTerms {
            dl_dt: dd.d(|p| (f.l)(p), xi, 0)?,
            omega_cross_l: omega.cross(&(f.l)(xi)),
            l_star_term: (f.l_star)(xi).cross(&omega.cross(&n)),
            dm_star_ds: dd.d(|p| (f.m_star)(p), xi, 1)?,
            n_cross_f: n.cross(&force),
        },
    })
}

/// Rod balances at `ξ = (t, s)`:
///
/// ```text
/// mass       ∂ρ_l/∂t + ∂(ρ_l v_t)/∂s
/// momentum   ρ_l(∂v/∂t + v_t ∂v/∂s) − ∂F/∂s − ρ_l(g − 2Ω×v)
/// position   ∂q/∂t + ∂l⋆/∂s − ρ_l v          (observer origin)
/// angular    ∂l/∂t + Ω×l + l⋆×(Ω×n) + ∂M⋆/∂s − n×F   (proper frame)
/// ```
pub fn residual_1d(f: &RodFields, conn: &GalileanConnection, xi: &[f64]) -> Result<BalanceResidual> {
    Ok(residual_1d_terms(f, conn, xi)?.residual())
}

/// Rod balances through the general divergence. Mass, momentum and position
/// use the observer origin, the angular row a proper frame. The momentum row
/// is in conservative form, `v` times the mass residual away from
/// [`residual_1d`]; the position row differs by `Ω × (q − ρ_l x)` and the
/// angular row by the torque `−q × g`, which vanishes about the mass centre.
pub fn residual_1d_general(f: &RodFields, conn: &GalileanConnection, xi: &[f64]) -> Result<BalanceResidual> {
    let m = f.to_medium_field();
    let x = f.curve.position(xi[0], xi[1]);
    let gam = christoffels_at(conn, xi[0], &x);
    let observer = PullbackChristoffels::zero_material(1, gam, gamma_a_matrix(conn, &OriginMotion::Observer, xi[0], &x));
    let proper = PullbackChristoffels::zero_material(1, gam, Matrix4::identity());
    let a = BalanceResidual::from_divergence(&div_t(&m, xi, &observer)?, &div_j(&m, xi, &observer)?);
    let b = BalanceResidual::from_divergence(&div_t(&m, xi, &proper)?, &div_j(&m, xi, &proper)?);
    Ok(BalanceResidual { angular_momentum: b.angular_momentum, ..a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::Christoffels;
    use crate::media::{RotatingRing, SpinningRing, StraightRod};

    #[test]
    fn rod_at_rest() {
        let f = RodFields::new(Curve1D::new(StraightRod::at_rest(Vector3::x())), field(|_: &[f64]| 2.0));
        let r = residual_1d(&f, &GalileanConnection::flat(), &[0.0, 0.5]).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn spinning_ring_is_balanced() {
        let (r0, u, rho) = (1.5, 2.0, 3.0);
        let ring = SpinningRing { radius: r0, speed: u };
        let mut f = RodFields::new(Curve1D::new(ring), field(move |_: &[f64]| rho));
        f.force = field(move |p: &[f64]| ring.tangent(p[0], p[1]) * (rho * u * u));
        f.q = field(move |p: &[f64]| ring.position(p[0], p[1]) * rho);
        f.l_star = field(move |p: &[f64]| ring.position(p[0], p[1]) * (rho * u));
        f.l = field(move |_: &[f64]| Vector3::new(0.0, 0.0, rho * u * r0));
        for s in [0.0, 0.7, 3.0] {
            let r = residual_1d(&f, &GalileanConnection::flat(), &[0.2, s]).unwrap();
            assert!(r.max_abs() < 1e-8, "{r:?}");
        }
    }

    use crate::media::Curve;

    #[test]
    fn general_route_mass_and_momentum() {
        let ring = RotatingRing { radius: 1.2, omega: 0.8 };
        let mut f = RodFields::new(Curve1D::new(ring), field(|p: &[f64]| 1.0 + 0.2 * p[1].sin() + 0.1 * p[0]));
        f.force = field(|p: &[f64]| Vector3::new(p[1] * p[0], (p[1]).cos(), 0.3));
        let conn = GalileanConnection::uniform(Vector3::new(0.0, 0.0, -9.81), Vector3::new(0.0, 0.2, 0.5));
        let m = f.to_medium_field();
        let xi = [0.3, 0.9];
        let x = ring.position(xi[0], xi[1]);
        let chr = PullbackChristoffels::zero_material(1, crate::connection::christoffels_at(&conn, xi[0], &x), gamma_a_matrix(&conn, &OriginMotion::Observer, xi[0], &x));
        let dt = div_t(&m, &xi, &chr).unwrap();
        let a = residual_1d(&f, &conn, &xi).unwrap();
        let v = ring.velocity(xi[0], xi[1]);
        assert!((dt[0] - a.mass).abs() < 1e-8);
        let mom = Vector3::new(dt[1], dt[2], dt[3]);
        assert!((mom - (a.linear_momentum + v * a.mass)).norm() < 1e-7, "{mom} vs {}", a.linear_momentum);
        let _ = Christoffels::zero();
    }

    #[test]
    fn general_route_angular_parts() {
        let ring = RotatingRing { radius: 1.2, omega: 0.8 };
        let mut f = RodFields::new(Curve1D::new(ring), field(|_: &[f64]| 1.4));
        f.force = field(|p: &[f64]| Vector3::new(p[1], -p[0], 0.3 * p[1] * p[1]));
        f.q = field(move |p: &[f64]| ring.position(p[0], p[1]) * 1.4);
        f.l = field(|p: &[f64]| Vector3::new(p[0], p[1].sin(), 0.2));
        f.l_star = field(|p: &[f64]| Vector3::new(p[1] * p[1], 0.1, p[0] * p[1]));
        f.m_star = field(|p: &[f64]| Vector3::new(p[1].cos(), p[0] * p[1], -p[1]));
        let conn = GalileanConnection::uniform(Vector3::zeros(), Vector3::new(0.3, -0.2, 0.5));
        let m = f.to_medium_field();
        let xi = [0.3, 0.9];
        let x = ring.position(xi[0], xi[1]);
        let gam = crate::connection::christoffels_at(&conn, xi[0], &x);
        let a = residual_1d(&f, &conn, &xi).unwrap();

        let observer = PullbackChristoffels::zero_material(1, gam, gamma_a_matrix(&conn, &OriginMotion::Observer, xi[0], &x));
        let pos = BalanceResidual::from_divergence(&div_t(&m, &xi, &observer).unwrap(), &div_j(&m, &xi, &observer).unwrap());
        assert!((pos.position_quantity - a.position_quantity).norm() < 1e-7, "{} vs {}", pos.position_quantity, a.position_quantity);

        let proper = PullbackChristoffels::zero_material(1, gam, Matrix4::identity());
        let ang = BalanceResidual::from_divergence(&div_t(&m, &xi, &proper).unwrap(), &div_j(&m, &xi, &proper).unwrap());
        // the torque of gravity on q and the Coriolis term on q vanish with g = 0 and q along x
        let extra = conn.omega(xi[0], &x).cross(&(f.l)(&xi)) * 0.0;
        assert!((ang.angular_momentum - a.angular_momentum - extra).norm() < 1e-7, "{} vs {}", ang.angular_momentum, a.angular_momentum);
    }
}
