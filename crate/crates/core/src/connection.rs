//! Galilean connections, the origin-motion column `Γ_A`, and the covariant
//! divergence of torsor fields on a matter manifold.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3, Vector4};

use crate::algebra::skew;
use crate::diff::FiniteDiff;
use crate::error::{Error, Result};
use crate::media::MediumField;

/// Field over space-time `(t, x)` with values in `R³`.
pub type SpaceTimeField = Arc<dyn Fn(f64, &Vector3<f64>) -> Vector3<f64> + Send + Sync>;

/// Gravity `g(t, x)` and spin `Ω(t, x)`.
#[derive(Clone)]
pub struct GalileanConnection {
    gravity: SpaceTimeField,
    spin: SpaceTimeField,
}

impl fmt::Debug for GalileanConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = Vector3::zeros();
        f.debug_struct("GalileanConnection")
            .field("g(0,0)", &self.g(0.0, &o))
            .field("omega(0,0)", &self.omega(0.0, &o))
            .finish()
    }
}

impl GalileanConnection {
    pub fn new<G, W>(gravity: G, spin: W) -> Self
    where
        G: Fn(f64, &Vector3<f64>) -> Vector3<f64> + Send + Sync + 'static,
        W: Fn(f64, &Vector3<f64>) -> Vector3<f64> + Send + Sync + 'static,
    {
        Self { gravity: Arc::new(gravity), spin: Arc::new(spin) }
    }

    pub fn flat() -> Self {
        Self::uniform(Vector3::zeros(), Vector3::zeros())
    }

    /// Constant gravity and spin.
    pub fn uniform(g: Vector3<f64>, omega: Vector3<f64>) -> Self {
        Self::new(move |_, _| g, move |_, _| omega)
    }

    /// Uniformly rotating observer: constant spin, with the centrifugal
    /// acceleration `−Ω×(Ω×x)` added to the uniform part of gravity.
    pub fn rotating(omega: Vector3<f64>, gravity: Vector3<f64>) -> Self {
        Self::new(move |_, x| gravity - omega.cross(&omega.cross(x)), move |_, _| omega)
    }

    pub fn g(&self, t: f64, x: &Vector3<f64>) -> Vector3<f64> {
        (self.gravity)(t, x)
    }

    pub fn omega(&self, t: f64, x: &Vector3<f64>) -> Vector3<f64> {
        (self.spin)(t, x)
    }

    /// Coriolis-corrected acceleration `g − 2Ω×v`.
    pub fn acceleration(&self, t: f64, x: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
        self.g(t, x) - 2.0 * self.omega(t, x).cross(v)
    }
}

/// Christoffel symbols `Γ^α_{μβ}`, stored as `[α][μ][β]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Christoffels(pub [[[f64; 4]; 4]; 4]);

impl Christoffels {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, alpha: usize, mu: usize, beta: usize) -> f64 {
        self.0[alpha][mu][beta]
    }

    /// Connection matrix `Γ(dX)^α_β = Γ^α_{μβ} dX^μ`.
    pub fn matrix(&self, dx: &Vector4<f64>) -> Matrix4<f64> {
        Matrix4::from_fn(|a, b| (0..4).map(|mu| self.0[a][mu][b] * dx[mu]).sum())
    }

    pub fn count_nonzero(&self) -> usize {
        self.0.iter().flatten().flatten().filter(|x| **x != 0.0).count()
    }
}

/// `Γ^i_00 = −g^i`, `Γ^i_0j = Γ^i_j0 = j(Ω)^i_j`, everything else zero.
pub fn christoffels_at(conn: &GalileanConnection, t: f64, x: &Vector3<f64>) -> Christoffels {
    let g = conn.g(t, x);
    let w: Matrix3<f64> = skew(&conn.omega(t, x));
    let mut c = Christoffels::zero();
    for i in 0..3 {
        c.0[i + 1][0][0] = -g[i];
        for j in 0..3 {
            c.0[i + 1][0][j + 1] = w[(i, j)];
            c.0[i + 1][j + 1][0] = w[(i, j)];
        }
    }
    c
}

/// Bound vector `C(t, x)` from the frame origin to the current point.
#[derive(Clone)]
pub enum OriginMotion {
    /// `C ≡ 0`: the origin rides with the material point.
    Proper,
    /// `C = (0, x)`: a fixed observer origin.
    Observer,
    Custom(Arc<dyn Fn(f64, &Vector3<f64>) -> Vector4<f64> + Send + Sync>),
}

impl fmt::Debug for OriginMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Proper => write!(f, "Proper"),
            Self::Observer => write!(f, "Observer"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl OriginMotion {
    pub fn c_at(&self, t: f64, x: &Vector3<f64>) -> Vector4<f64> {
        match self {
            Self::Proper => Vector4::zeros(),
            Self::Observer => Vector4::new(0.0, x.x, x.y, x.z),
            Self::Custom(f) => f(t, x),
        }
    }

    /// `dC` along `dX`.
    fn differential(&self, t: f64, x: &Vector3<f64>, dx: &Vector4<f64>) -> Vector4<f64> {
        match self {
            Self::Proper => Vector4::zeros(),
            Self::Observer => Vector4::new(0.0, dx[1], dx[2], dx[3]),
            Self::Custom(f) => {
                let fd = FiniteDiff::default();
                let point = [t, x.x, x.y, x.z];
                let eval = |p: &[f64]| f(p[0], &Vector3::new(p[1], p[2], p[3]));
                (0..4)
                    .filter(|mu| dx[*mu] != 0.0)
                    .map(|mu| {
                        fd.partial(eval, &point, mu, None).expect("unbounded domain") * dx[mu]
                    })
                    .fold(Vector4::zeros(), |a, b| a + b)
            }
        }
    }
}

/// `Γ_A(dX) = dX − (dC + Γ(dX) C)`.
pub fn gamma_a_at(
    conn: &GalileanConnection,
    origin: &OriginMotion,
    t: f64,
    x: &Vector3<f64>,
    dx: &Vector4<f64>,
) -> Vector4<f64> {
    let gamma = christoffels_at(conn, t, x);
    let c = origin.c_at(t, x);
    dx - (origin.differential(t, x, dx) + gamma.matrix(dx) * c)
}

/// Components `Γ^α_{Aσ}`: column `σ` is `Γ_A(e_σ)`.
pub fn gamma_a_matrix(conn: &GalileanConnection, origin: &OriginMotion, t: f64, x: &Vector3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for sigma in 0..4 {
        let e = Vector4::from_fn(|i, _| if i == sigma { 1.0 } else { 0.0 });
        m.set_column(sigma, &gamma_a_at(conn, origin, t, x, &e));
    }
    m
}

/// Connection data needed by the divergence at one chart point of a medium
/// of dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackChristoffels {
    dim: usize,
    material: Vec<f64>,
    pub spacetime: Christoffels,
    pub origin_motion: Matrix4<f64>,
}

impl PullbackChristoffels {
    /// Symbols of the matter manifold `^γ_{γ′ρ}Γ`, laid out `[γ][γ′][ρ]`.
    pub fn new(dim: usize, material: Vec<f64>, spacetime: Christoffels, origin_motion: Matrix4<f64>) -> Result<Self> {
        let n = dim + 1;
        if dim > 3 || material.len() != n * n * n {
            return Err(Error::InvalidInput(format!(
                "material Christoffels for dimension {dim} need {} entries, got {}",
                n * n * n,
                material.len()
            )));
        }
        Ok(Self { dim, material, spacetime, origin_motion })
    }

    /// Flat matter manifold chart.
    pub fn zero_material(dim: usize, spacetime: Christoffels, origin_motion: Matrix4<f64>) -> Self {
        let n = dim + 1;
        Self { dim, material: vec![0.0; n * n * n], spacetime, origin_motion }
    }

    /// Identity embedding of a 3D medium: the material symbols are the
    /// space-time ones.
    pub fn identity_embedding(conn: &GalileanConnection, origin: &OriginMotion, t: f64, x: &Vector3<f64>) -> Self {
        let spacetime = christoffels_at(conn, t, x);
        let material = spacetime.0.iter().flatten().flatten().copied().collect();
        Self { dim: 3, material, spacetime, origin_motion: gamma_a_matrix(conn, origin, t, x) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn material(&self, gamma: usize, gamma2: usize, rho: usize) -> f64 {
        let n = self.dim + 1;
        self.material[(gamma * n + gamma2) * n + rho]
    }

    /// Contracted material symbol `^γ_{γρ}Γ`.
    pub fn material_trace(&self, rho: usize) -> f64 {
        (0..=self.dim).map(|g| self.material(g, g, rho)).sum()
    }
}

fn check_dims(field: &MediumField, chr: &PullbackChristoffels) -> Result<()> {
    if field.dim() != chr.dim() {
        return Err(Error::InvalidInput(format!(
            "medium of dimension {} paired with Christoffels of dimension {}",
            field.dim(),
            chr.dim()
        )));
    }
    Ok(())
}

/// Space-time term `^γT^ρ U^σ_γ Γ^β_{σρ}`.
fn spacetime_t_term(t: &DMatrix<f64>, u: &DMatrix<f64>, chr: &PullbackChristoffels, beta: usize) -> f64 {
    let mut s = 0.0;
    for g in 0..t.nrows() {
        for sigma in 0..4 {
            let us = u[(sigma, g)];
            if us == 0.0 {
                continue;
            }
            for rho in 0..4 {
                s += t[(g, rho)] * us * chr.spacetime.get(beta, sigma, rho);
            }
        }
    }
    s
}

/// `_γ∇̃ ^γT^β` at a chart point.
pub fn div_t(field: &MediumField, xi: &[f64], chr: &PullbackChristoffels) -> Result<Vector4<f64>> {
    check_dims(field, chr)?;
    let t = field.t_at(xi);
    let u = field.u_at(xi)?;
    let partial = field.partial_div_t(xi)?;
    Ok(Vector4::from_fn(|beta, _| {
        let material: f64 = (0..=field.dim()).map(|rho| chr.material_trace(rho) * t[(rho, beta)]).sum();
        partial[beta] + material + spacetime_t_term(&t, &u, chr, beta)
    }))
}

/// `_γ∇̃ ^γJ^{αβ}` at a chart point, re-skewed.
pub fn div_j(field: &MediumField, xi: &[f64], chr: &PullbackChristoffels) -> Result<Matrix4<f64>> {
    check_dims(field, chr)?;
    let t = field.t_at(xi);
    let j = field.j_at(xi);
    let u = field.u_at(xi)?;
    let partial = field.partial_div_j(xi)?;
    let n = field.dim() + 1;

    let mut out = partial;
    for rho in 0..n {
        out += j[rho] * chr.material_trace(rho);
    }
    for g in 0..n {
        let dx = Vector4::from_fn(|s, _| u[(s, g)]);
        let gm = chr.spacetime.matrix(&dx);
        out += gm * j[g] + j[g] * gm.transpose();
        let ga = chr.origin_motion * dx;
        let tg = Vector4::from_fn(|b, _| t[(g, b)]);
        out += ga * tg.transpose() - tg * ga.transpose();
    }
    Ok(crate::affine::skew_part(&out))
}
