use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector3, Vector4};

use super::{BalanceResidual, Differ};
use crate::connection::{div_j, GalileanConnection, PullbackChristoffels};
use crate::diff::{Domain, FiniteDiff};
use crate::error::Result;
use crate::media::shell::christoffels_from_geometry;
use crate::reduction::{assemble_shell_t, ReducedShell, ShellTorsor};
use crate::media::{field, Field, MediumField, ShellChristoffels, ShellField, SurfaceGeometry};

/// Shell fields over `ξ = (t, θ¹, θ²)`: surface density, membrane forces
/// `N^{ab}`, shear forces `Q^a` and moments `M^{ab}`.
#[derive(Clone)]
pub struct ShellFields {
    pub shell: ShellField,
    pub rho_s: Field<f64>,
    pub n: Field<Matrix2<f64>>,
    pub q: Field<Vector2<f64>>,
    pub m: Field<Matrix2<f64>>,
    pub domain: Option<Domain>,
    pub diff: FiniteDiff,
}

impl ShellFields {
    pub fn new(shell: ShellField, rho_s: Field<f64>) -> Self {
        Self {
            shell,
            rho_s,
            n: field(|_: &[f64]| Matrix2::zeros()),
            q: field(|_: &[f64]| Vector2::zeros()),
            m: field(|_: &[f64]| Matrix2::zeros()),
            domain: None,
            diff: FiniteDiff::default(),
        }
    }

    /// Rotary inertia `ρ_s h²/12`.
    pub fn rotary_inertia(&self, xi: &[f64]) -> f64 {
        let h = self.shell.thickness;
        (self.rho_s)(xi) * h * h / 12.0
    }

    fn geometry(&self, xi: &[f64]) -> Result<SurfaceGeometry> {
        self.shell.geometry(xi[0], [xi[1], xi[2]])
    }

    fn w_or_nan(&self, xi: &[f64]) -> Vector2<f64> {
        self.geometry(xi).map(|g| g.w_surface()).unwrap_or(Vector2::repeat(f64::NAN))
    }

    /// `X^{ba} = N^{ba} − I w^b w^a`.
    fn x_tensor(&self, xi: &[f64]) -> Matrix2<f64> {
        let w = self.w_or_nan(xi);
        (self.n)(xi) - w * w.transpose() * self.rotary_inertia(xi)
    }

    /// Shell torsor components at `ξ`.
    pub fn torsor(&self, xi: &[f64]) -> ShellTorsor {
        let reduced = ReducedShell {
            rho_s: (self.rho_s)(xi),
            n: (self.n)(xi),
            q: (self.q)(xi),
            m: (self.m)(xi),
            thickness: self.shell.thickness,
        };
        assemble_shell_t(&reduced, &self.w_or_nan(xi))
    }

    /// Field bundle in the adapted chart with embedding `(t, θ¹, θ², 0)`.
    pub fn to_medium_field(&self) -> MediumField {
        let embedding = field(|xi: &[f64]| Vector4::new(xi[0], xi[1], xi[2], 0.0));
        let u = field(|_: &[f64]| DMatrix::from_fn(4, 3, |a, g| if a == g { 1.0 } else { 0.0 }));
        let me = self.clone();
        let t = field(move |xi: &[f64]| {
            let t = me.torsor(xi).t;
            DMatrix::from_fn(3, 4, |g, b| t[(g, b)])
        });
        let me = self.clone();
        let j = field(move |xi: &[f64]| me.torsor(xi).j.to_vec());
        let mut out = MediumField::new(2, embedding, t, j)
            .expect("dimension 2 is valid")
            .with_tangent_map(u)
            .with_diff(self.diff);
        if let Some(d) = &self.domain {
            out = out.with_domain(d.clone());
        }
        out
    }

    fn pullback(&self, sc: &ShellChristoffels) -> PullbackChristoffels {
        let full = sc.adapted();
        let mut material = Vec::with_capacity(27);
        for g in 0..3 {
            for g2 in 0..3 {
                for r in 0..3 {
                    material.push(full.get(g, g2, r));
                }
            }
        }
        PullbackChristoffels::new(2, material, full, Matrix4::identity()).expect("27 material symbols")
    }
}

/// Rows of the general angular divergence that carry no balance content:
/// `D^{03}` and `D^{b0}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShellIdentities {
    pub j03: f64,
    pub j10: f64,
    pub j20: f64,
}

impl ShellIdentities {
    pub fn max_abs(&self) -> f64 {
        self.j03.abs().max(self.j10.abs()).max(self.j20.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellResidual {
    pub residual: BalanceResidual,
    pub identities: ShellIdentities,
}

fn general_divergence(f: &ShellFields, conn: &GalileanConnection, xi: &[f64]) -> Result<(Vector4<f64>, Matrix4<f64>)> {
    let geo = f.geometry(xi)?;
    let chr = f.pullback(&christoffels_from_geometry(&geo, conn, xi[0]));
    let m = f.to_medium_field();
    Ok((crate::connection::div_t(&m, xi, &chr)?, div_j(&m, xi, &chr)?))
}

fn identities_from(dj: &Matrix4<f64>) -> ShellIdentities {
    ShellIdentities { j03: dj[(0, 3)], j10: dj[(1, 0)], j20: dj[(2, 0)] }
}

/// Shell residuals through the general divergence in the adapted chart, with
/// the shell slot layout of [`BalanceResidual`].
pub fn residual_2d_general(f: &ShellFields, conn: &GalileanConnection, xi: &[f64]) -> Result<ShellResidual> {
    let (dt, dj) = general_divergence(f, conn, xi)?;
    let identities = identities_from(&dj);
    Ok(ShellResidual {
        residual: BalanceResidual {
            mass: dt[0],
            linear_momentum: Vector3::new(dt[1], dt[2], dt[3]),
            position_quantity: Vector3::new(identities.j10, identities.j20, identities.j03),
            angular_momentum: Vector3::new(dj[(1, 3)], dj[(2, 3)], dj[(2, 1)]),
        },
        identities,
    })
}

/// Shell balances at `ξ = (t, θ¹, θ²)` with `X^{ba} = N^{ba} − I w^b w^a`
/// and `f = ρ_s(g − 2Ω×v − ∂v/∂t)`:
///
/// ```text
/// mass        ∂ρ_s/∂t + Φ^a_a ρ_s
/// in-plane    −(X^{ba}|_b − b^a_b Q^b + c^a·f)
/// normal      −(b_ab X^{ba} + Q^b|_b + n·f)
/// off-plane   M^{ab}|_a − Q^b − I(∂w^b/∂t + Φ^b_a w^a + Φ^c_c w^b)
/// in-plane    ε_cb (N^{cb} − b^c_a M^{ab} − I(Φ^c + w^c) w^b)
/// ```
///
/// The identity rows come from the general divergence.
pub fn residual_2d(f: &ShellFields, conn: &GalileanConnection, xi: &[f64]) -> Result<ShellResidual> {
    let dd = Differ { fd: &f.diff, domain: f.domain.as_ref() };
    let t = xi[0];
    let geo = f.geometry(xi)?;
    let sc = christoffels_from_geometry(&geo, conn, t);
    let rho = (f.rho_s)(xi);
    let inertia = f.rotary_inertia(xi);
    let w = geo.w_surface();
    let n = (f.n)(xi);
    let q = (f.q)(xi);
    let m = (f.m)(xi);
    let x = f.x_tensor(xi);
    let load = (conn.acceleration(t, &geo.x, &geo.v) - geo.acceleration) * rho;
    let load_t = geo.c * load;

    let dx = [dd.d(|p| f.x_tensor(p), xi, 1)?, dd.d(|p| f.x_tensor(p), xi, 2)?];
    let dq = [dd.d(|p| (f.q)(p), xi, 1)?, dd.d(|p| (f.q)(p), xi, 2)?];
    let dm = [dd.d(|p| (f.m)(p), xi, 1)?, dd.d(|p| (f.m)(p), xi, 2)?];
    let dw_dt = dd.d(|p| f.w_or_nan(p), xi, 0)?;
    let tr = [sc.trace(0), sc.trace(1)];
    let g = &sc.gamma_abc;

    let mut linear = Vector3::zeros();
    for a in 0..2 {
        let mut div = 0.0;
        for b in 0..2 {
            div += dx[b][(b, a)] + tr[b] * x[(b, a)] - sc.b_mixed[(a, b)] * q[b];
            for c in 0..2 {
                div += g[a][b][c] * x[(b, c)];
            }
        }
        linear[a] = -(div + load_t[a]);
    }
    let q_div: f64 = (0..2).map(|b| dq[b][b] + tr[b] * q[b]).sum();
    let bx: f64 = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| geo.b[(a, b)] * x[(b, a)]).sum();
    linear[2] = -(bx + q_div + geo.n.dot(&load));

    let phi_trace = sc.phi_ab.trace();
    let mut angular = Vector3::zeros();
    for b in 0..2 {
        let mut div = 0.0;
        for a in 0..2 {
            div += dm[a][(a, b)] + tr[a] * m[(a, b)];
            for c in 0..2 {
                div += g[b][a][c] * m[(a, c)];
            }
        }
        let phi_w: f64 = (0..2).map(|a| sc.phi_ab[(b, a)] * w[a]).sum();
        angular[b] = div - q[b] - inertia * (dw_dt[b] + phi_w + phi_trace * w[b]);
    }
    let bm = sc.b_mixed * m;
    let pw = sc.phi_a + w;
    angular[2] = n[(0, 1)] - n[(1, 0)] - (bm[(0, 1)] - bm[(1, 0)]) - inertia * (pw[0] * w[1] - pw[1] * w[0]);

    let drho = dd.d(|p| (f.rho_s)(p), xi, 0)?;
    let (_, dj) = general_divergence(f, conn, xi)?;
    let identities = identities_from(&dj);
    Ok(ShellResidual {
        residual: BalanceResidual {
            mass: drho + phi_trace * rho,
            linear_momentum: linear,
            position_quantity: Vector3::new(identities.j10, identities.j20, identities.j03),
            angular_momentum: angular,
        },
        identities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{Cylinder, Plane, RigidlyMoving, Sphere};

    fn loaded(shell: ShellField) -> ShellFields {
        let mut f = ShellFields::new(shell, field(|p: &[f64]| 2.0 + 0.1 * p[1].sin()));
        f.n = field(|p: &[f64]| Matrix2::new(1.0 + p[1], 0.3 * p[2], -0.2 * p[1] * p[2], 0.5 + p[2].cos()));
        f.q = field(|p: &[f64]| Vector2::new(p[1] * p[1], 0.4 - p[2]));
        f.m = field(|p: &[f64]| Matrix2::new(p[2].sin(), 0.1 * p[1], 0.7, p[1] * p[2]));
        f
    }

    #[test]
    fn displayed_matches_general_on_static_surfaces() {
        let conn = GalileanConnection::uniform(Vector3::new(0.1, -0.3, -9.8), Vector3::new(0.2, 0.4, -0.3));
        let xi = [0.2, 0.6, 1.1];
        for shell in [ShellField::new(Plane, 0.1), ShellField::new(Sphere { radius: 1.3 }, 0.05), ShellField::new(Cylinder { radius: 0.8 }, 0.2)] {
            let f = loaded(shell);
            let a = residual_2d(&f, &conn, &xi).unwrap();
            let b = residual_2d_general(&f, &conn, &xi).unwrap();
            let d = (a.residual - b.residual).max_abs();
            assert!(d < 1e-6, "{:?}\n{:?}", a.residual, b.residual);
            assert!(a.identities.max_abs() < 1e-9);
        }
    }

    #[test]
    fn in_plane_angular_is_antisymmetric_part_on_plate() {
        let f = loaded(ShellField::new(Plane, 0.1));
        let xi = [0.0, 0.3, 0.4];
        let r = residual_2d(&f, &GalileanConnection::flat(), &xi).unwrap();
        let n = (f.n)(&xi);
        assert!((r.residual.angular_momentum[2] - (n[(0, 1)] - n[(1, 0)])).abs() < 1e-12);
    }

    #[test]
    fn spinning_plate_has_no_rotary_terms() {
        let shell = ShellField::new(RigidlyMoving::new(Plane, Vector3::new(0.0, 0.0, 0.7), Vector3::zeros()), 0.1);
        let f = ShellFields::new(shell, field(|_: &[f64]| 1.0));
        let r = residual_2d(&f, &GalileanConnection::flat(), &[0.4, 0.2, 0.3]).unwrap();
        assert!(r.identities.max_abs() < 1e-9);
        assert!(r.residual.mass.abs() < 1e-8);
    }

    #[test]
    fn tilting_plate_identities_follow_normal_rate() {
        let omega = Vector3::new(0.6, 0.0, 0.0);
        let shell = ShellField::new(RigidlyMoving::new(Sphere { radius: 1.0 }, omega, Vector3::zeros()), 0.3);
        let f = ShellFields::new(shell.clone(), field(|_: &[f64]| 1.5));
        let xi = [0.1, 0.4, 1.0];
        let r = residual_2d(&f, &GalileanConnection::flat(), &xi).unwrap();
        let geo = shell.geometry(xi[0], [xi[1], xi[2]]).unwrap();
        let w = geo.w_surface();
        let expect = -(geo.b_mixed * w) * f.rotary_inertia(&xi);
        assert!((r.identities.j10 - expect[0]).abs() < 1e-6, "{} vs {}", r.identities.j10, expect[0]);
        assert!((r.identities.j20 - expect[1]).abs() < 1e-6);
    }
}
