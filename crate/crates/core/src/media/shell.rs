use std::sync::Arc;

use nalgebra::{Matrix2, Matrix2x3, Matrix3, Matrix3x2, Vector2, Vector3};

use crate::algebra::rotation_exp;
use crate::connection::{Christoffels, GalileanConnection};
use crate::diff::FiniteDiff;
use crate::error::{Error, Result};

const METRIC_TOL: f64 = 1e-12;
const SECOND_STEP: f64 = 1e-4;

fn at(th: [f64; 2], k: usize, h: f64) -> [f64; 2] {
    let mut out = th;
    out[k] += h;
    out
}

/// Middle surface `x(t, θ¹, θ²)` of a shell.
///
/// Only `position` is required; the other methods default to finite
/// differences and presets override them analytically.
pub trait Surface: Send + Sync {
    fn position(&self, t: f64, th: [f64; 2]) -> Vector3<f64>;

    /// Columns `π_a = ∂x/∂θ^a`.
    fn tangents(&self, t: f64, th: [f64; 2]) -> Matrix3x2<f64> {
        let fd = FiniteDiff::default();
        let mut pi = Matrix3x2::zeros();
        for a in 0..2 {
            let d = fd.derivative(|u| self.position(t, at(th, a, u - th[a])), th[a]);
            pi.set_column(a, &d);
        }
        pi
    }

    /// Unit normal `π₁ × π₂ / |π₁ × π₂|`.
    fn normal(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        let pi = self.tangents(t, th);
        pi.column(0).cross(&pi.column(1)).normalize()
    }

    /// `[∂π/∂θ¹, ∂π/∂θ²]`.
    fn tangent_derivatives(&self, t: f64, th: [f64; 2]) -> [Matrix3x2<f64>; 2] {
        let h = SECOND_STEP;
        let x = |p: [f64; 2]| self.position(t, p);
        let x0 = x(th);
        let mut out = [Matrix3x2::zeros(); 2];
        for c in 0..2 {
            for b in 0..2 {
                let d = if b == c {
                    (x(at(th, b, h)) - x0 * 2.0 + x(at(th, b, -h))) / (h * h)
                } else {
                    let pp = x(at(at(th, b, h), c, h));
                    let pm = x(at(at(th, b, h), c, -h));
                    let mp = x(at(at(th, b, -h), c, h));
                    let mm = x(at(at(th, b, -h), c, -h));
                    (pp - pm - mp + mm) / (4.0 * h * h)
                };
                out[c].set_column(b, &d);
            }
        }
        out
    }

    fn velocity(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        FiniteDiff::default().derivative(|u| self.position(u, th), t)
    }

    fn acceleration(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        FiniteDiff::with_step(1e-4).derivative(|u| self.velocity(u, th), t)
    }

    /// `∂π/∂t`.
    fn tangent_rates(&self, t: f64, th: [f64; 2]) -> Matrix3x2<f64> {
        let h = SECOND_STEP;
        let x = |u: f64, p: [f64; 2]| self.position(u, p);
        let mut out = Matrix3x2::zeros();
        for b in 0..2 {
            let d = (x(t + h, at(th, b, h)) - x(t + h, at(th, b, -h)) - x(t - h, at(th, b, h))
                + x(t - h, at(th, b, -h)))
                / (4.0 * h * h);
            out.set_column(b, &d);
        }
        out
    }

    /// `∂n/∂t`.
    fn normal_rate(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        FiniteDiff::with_step(SECOND_STEP).derivative(|u| self.normal(u, th), t)
    }
}

/// Plane `x = (θ¹, θ², 0)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Plane;

impl Surface for Plane {
    fn position(&self, _: f64, th: [f64; 2]) -> Vector3<f64> {
        Vector3::new(th[0], th[1], 0.0)
    }
    fn tangents(&self, _: f64, _: [f64; 2]) -> Matrix3x2<f64> {
        Matrix3x2::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    }
    fn normal(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::z()
    }
    fn tangent_derivatives(&self, _: f64, _: [f64; 2]) -> [Matrix3x2<f64>; 2] {
        [Matrix3x2::zeros(); 2]
    }
    fn velocity(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn acceleration(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn tangent_rates(&self, _: f64, _: [f64; 2]) -> Matrix3x2<f64> {
        Matrix3x2::zeros()
    }
    fn normal_rate(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
}

/// Sphere of radius `r` with `θ¹` the azimuth and `θ²` the polar angle. The
/// normal points inward, so `b_ab = a_ab / r`.
#[derive(Clone, Copy, Debug)]
pub struct Sphere {
    pub radius: f64,
}

impl Surface for Sphere {
    fn position(&self, _: f64, th: [f64; 2]) -> Vector3<f64> {
        let (sp, cp) = th[0].sin_cos();
        let (st, ct) = th[1].sin_cos();
        self.radius * Vector3::new(st * cp, st * sp, ct)
    }
    fn tangents(&self, _: f64, th: [f64; 2]) -> Matrix3x2<f64> {
        let r = self.radius;
        let (sp, cp) = th[0].sin_cos();
        let (st, ct) = th[1].sin_cos();
        Matrix3x2::new(-r * st * sp, r * ct * cp, r * st * cp, r * ct * sp, 0.0, -r * st)
    }
    fn normal(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        -self.position(t, th) / self.radius
    }
    fn tangent_derivatives(&self, _: f64, th: [f64; 2]) -> [Matrix3x2<f64>; 2] {
        let r = self.radius;
        let (sp, cp) = th[0].sin_cos();
        let (st, ct) = th[1].sin_cos();
        // ∂/∂θ¹ of (π₁, π₂), then ∂/∂θ² of (π₁, π₂)
        [
            Matrix3x2::new(-r * st * cp, -r * ct * sp, -r * st * sp, r * ct * cp, 0.0, 0.0),
            Matrix3x2::new(-r * ct * sp, -r * st * cp, r * ct * cp, -r * st * sp, 0.0, -r * ct),
        ]
    }
    fn velocity(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn acceleration(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn tangent_rates(&self, _: f64, _: [f64; 2]) -> Matrix3x2<f64> {
        Matrix3x2::zeros()
    }
    fn normal_rate(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
}

/// Cylinder of radius `r` about `e₃`, `θ¹` the angle and `θ²` the height.
#[derive(Clone, Copy, Debug)]
pub struct Cylinder {
    pub radius: f64,
}

impl Surface for Cylinder {
    fn position(&self, _: f64, th: [f64; 2]) -> Vector3<f64> {
        let (s, c) = th[0].sin_cos();
        Vector3::new(self.radius * c, self.radius * s, th[1])
    }
    fn tangents(&self, _: f64, th: [f64; 2]) -> Matrix3x2<f64> {
        let (s, c) = th[0].sin_cos();
        Matrix3x2::new(-self.radius * s, 0.0, self.radius * c, 0.0, 0.0, 1.0)
    }
    fn normal(&self, _: f64, th: [f64; 2]) -> Vector3<f64> {
        let (s, c) = th[0].sin_cos();
        Vector3::new(c, s, 0.0)
    }
    fn tangent_derivatives(&self, _: f64, th: [f64; 2]) -> [Matrix3x2<f64>; 2] {
        let (s, c) = th[0].sin_cos();
        [Matrix3x2::new(-self.radius * c, 0.0, -self.radius * s, 0.0, 0.0, 0.0), Matrix3x2::zeros()]
    }
    fn velocity(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn acceleration(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn tangent_rates(&self, _: f64, _: [f64; 2]) -> Matrix3x2<f64> {
        Matrix3x2::zeros()
    }
    fn normal_rate(&self, _: f64, _: [f64; 2]) -> Vector3<f64> {
        Vector3::zeros()
    }
}

/// Static surface carried by the rigid motion `x ↦ R(t) x + u t` with
/// `R(t) = exp(t j(ϖ))`, so `Ṙ = j(ϖ) R`.
#[derive(Clone)]
pub struct RigidlyMoving {
    pub base: Arc<dyn Surface>,
    pub angular_velocity: Vector3<f64>,
    pub velocity: Vector3<f64>,
}

impl RigidlyMoving {
    pub fn new<S: Surface + 'static>(base: S, angular_velocity: Vector3<f64>, velocity: Vector3<f64>) -> Self {
        Self { base: Arc::new(base), angular_velocity, velocity }
    }

    pub fn rotation(&self, t: f64) -> Matrix3<f64> {
        rotation_exp(&self.angular_velocity, t)
    }
}

impl Surface for RigidlyMoving {
    fn position(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        self.rotation(t) * self.base.position(0.0, th) + self.velocity * t
    }
    fn tangents(&self, t: f64, th: [f64; 2]) -> Matrix3x2<f64> {
        self.rotation(t) * self.base.tangents(0.0, th)
    }
    fn normal(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        self.rotation(t) * self.base.normal(0.0, th)
    }
    fn tangent_derivatives(&self, t: f64, th: [f64; 2]) -> [Matrix3x2<f64>; 2] {
        let r = self.rotation(t);
        self.base.tangent_derivatives(0.0, th).map(|d| r * d)
    }
    fn velocity(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        self.angular_velocity.cross(&(self.rotation(t) * self.base.position(0.0, th))) + self.velocity
    }
    fn acceleration(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        let w = self.angular_velocity;
        w.cross(&w.cross(&(self.rotation(t) * self.base.position(0.0, th))))
    }
    fn tangent_rates(&self, t: f64, th: [f64; 2]) -> Matrix3x2<f64> {
        crate::algebra::skew(&self.angular_velocity) * self.tangents(t, th)
    }
    fn normal_rate(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        self.angular_velocity.cross(&self.normal(t, th))
    }
}

type SurfaceFn = Arc<dyn Fn(f64, [f64; 2]) -> Vector3<f64> + Send + Sync>;

/// Surface given by a position closure; everything else by differences.
#[derive(Clone)]
pub struct ClosureSurface {
    pub position: SurfaceFn,
}

impl ClosureSurface {
    pub fn new<F>(position: F) -> Self
    where
        F: Fn(f64, [f64; 2]) -> Vector3<f64> + Send + Sync + 'static,
    {
        Self { position: Arc::new(position) }
    }
}

impl Surface for ClosureSurface {
    fn position(&self, t: f64, th: [f64; 2]) -> Vector3<f64> {
        (self.position)(t, th)
    }
}

/// Geometric quantities of the middle surface at one chart point.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGeometry {
    pub x: Vector3<f64>,
    pub v: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub n: Vector3<f64>,
    /// `w = ∂n/∂t`.
    pub w: Vector3<f64>,
    pub pi: Matrix3x2<f64>,
    pub dpi: [Matrix3x2<f64>; 2],
    pub dpi_dt: Matrix3x2<f64>,
    /// First fundamental form `a = πᵀπ`.
    pub a: Matrix2<f64>,
    pub a_inv: Matrix2<f64>,
    /// `c = a⁻¹ πᵀ`.
    pub c: Matrix2x3<f64>,
    /// Second fundamental form `b_ab = n · ∂π_b/∂θ^a`.
    pub b: Matrix2<f64>,
    /// Mixed form `b^a_b = a^{ac} b_cb`.
    pub b_mixed: Matrix2<f64>,
}

impl SurfaceGeometry {
    pub fn at(surface: &dyn Surface, t: f64, th: [f64; 2]) -> Result<Self> {
        let pi = surface.tangents(t, th);
        let a = pi.transpose() * pi;
        let det = a.determinant();
        if !(det >= METRIC_TOL) {
            return Err(Error::SingularMetric { det });
        }
        let a_inv = a.try_inverse().ok_or(Error::SingularMetric { det })?;
        let c = a_inv * pi.transpose();
        let n = surface.normal(t, th);
        let dpi = surface.tangent_derivatives(t, th);
        let b = Matrix2::from_fn(|a_, b_| n.dot(&dpi[a_].column(b_)));
        Ok(Self {
            x: surface.position(t, th),
            v: surface.velocity(t, th),
            acceleration: surface.acceleration(t, th),
            n,
            w: surface.normal_rate(t, th),
            pi,
            dpi,
            dpi_dt: surface.tangent_rates(t, th),
            a,
            a_inv,
            c,
            b,
            b_mixed: a_inv * b,
        })
    }

    /// Surface components `w^a = c^a_i w^i`.
    pub fn w_surface(&self) -> Vector2<f64> {
        self.c * self.w
    }
}

/// Shell: a middle surface and a thickness.
#[derive(Clone)]
pub struct ShellField {
    pub surface: Arc<dyn Surface>,
    pub thickness: f64,
}

impl ShellField {
    pub fn new<S: Surface + 'static>(surface: S, thickness: f64) -> Self {
        Self { surface: Arc::new(surface), thickness }
    }

    pub fn geometry(&self, t: f64, th: [f64; 2]) -> Result<SurfaceGeometry> {
        SurfaceGeometry::at(self.surface.as_ref(), t, th)
    }
}

/// Christoffel symbols of a Galilean connection in the chart
/// `(t, θ¹, θ², θ³)` adapted to a shell.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellChristoffels {
    /// `Γ^a_00 = −(g_t)^a`.
    pub gamma_a00: Vector2<f64>,
    /// `Γ³_00 = −g³`.
    pub gamma3_00: f64,
    /// `Γ^a_bc = c^a_i ∂π^i_b/∂θ^c`, stored `[a][b][c]`.
    pub gamma_abc: [[[f64; 2]; 2]; 2],
    /// `Γ³_ab = b_ab`.
    pub b: Matrix2<f64>,
    pub b_mixed: Matrix2<f64>,
    /// `Φ^a_b = c^a_i (∂π^i_b/∂t + Ω^i_j π^j_b)`.
    pub phi_ab: Matrix2<f64>,
    /// `Φ^a = c^a_i (∂n^i/∂t + Ω^i_j n^j)`.
    pub phi_a: Vector2<f64>,
    /// `Φ_b = n_i (∂π^i_b/∂t + Ω^i_j π^j_b)`.
    pub phi_b: Vector2<f64>,
}

impl ShellChristoffels {
    /// Contracted `Γ^c_{cb}`.
    pub fn trace(&self, b: usize) -> f64 {
        (0..2).map(|c| self.gamma_abc[c][c][b]).sum()
    }

    /// Full `4×4×4` symbols in the adapted chart, including the Weingarten
    /// terms `Γ^a_{b3} = Γ^a_{3b} = −b^a_b`. All are symmetric in the lower
    /// indices.
    pub fn adapted(&self) -> Christoffels {
        let mut g = Christoffels::zero();
        let mut sym = |al: usize, mu: usize, be: usize, v: f64| {
            g.0[al][mu][be] = v;
            g.0[al][be][mu] = v;
        };
        for a in 0..2 {
            sym(a + 1, 0, 0, self.gamma_a00[a]);
            sym(a + 1, 0, 3, self.phi_a[a]);
            for b in 0..2 {
                sym(a + 1, 0, b + 1, self.phi_ab[(a, b)]);
                sym(a + 1, b + 1, 3, -self.b_mixed[(a, b)]);
                for c in 0..2 {
                    sym(a + 1, c + 1, b + 1, self.gamma_abc[a][b][c]);
                }
            }
            sym(3, 0, a + 1, self.phi_b[a]);
            for b in 0..2 {
                sym(3, a + 1, b + 1, self.b[(a, b)]);
            }
        }
        sym(3, 0, 0, self.gamma3_00);
        g
    }
}

/// Christoffels of `conn` in the chart adapted to `sf` at `(t, θ¹, θ²)`.
pub fn shell_christoffels(
    sf: &ShellField,
    conn: &GalileanConnection,
    t: f64,
    th1: f64,
    th2: f64,
) -> Result<ShellChristoffels> {
    let geo = sf.geometry(t, [th1, th2])?;
    Ok(christoffels_from_geometry(&geo, conn, t))
}

pub(crate) fn christoffels_from_geometry(geo: &SurfaceGeometry, conn: &GalileanConnection, t: f64) -> ShellChristoffels {
    let g = conn.g(t, &geo.x);
    let w = crate::algebra::skew(&conn.omega(t, &geo.x));
    let mut gamma_abc = [[[0.0; 2]; 2]; 2];
    for (a, ga) in gamma_abc.iter_mut().enumerate() {
        for (b, gb) in ga.iter_mut().enumerate() {
            for (c, gc) in gb.iter_mut().enumerate() {
                *gc = geo.c.row(a).transpose().dot(&geo.dpi[c].column(b));
            }
        }
    }
    let rates = geo.dpi_dt + w * geo.pi;
    let nrate = geo.w + w * geo.n;
    ShellChristoffels {
        gamma_a00: -(geo.c * g),
        gamma3_00: -geo.n.dot(&g),
        gamma_abc,
        b: geo.b,
        b_mixed: geo.b_mixed,
        phi_ab: geo.c * rates,
        phi_a: geo.c * nrate,
        phi_b: (geo.n.transpose() * rates).transpose(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_static_plate_has_no_symbols() {
        let sf = ShellField::new(Plane, 0.01);
        let c = shell_christoffels(&sf, &GalileanConnection::flat(), 0.0, 0.3, -0.2).unwrap();
        assert_eq!(c.adapted().count_nonzero(), 0);
    }

    #[test]
    fn plate_gravity() {
        let sf = ShellField::new(Plane, 0.01);
        let conn = GalileanConnection::uniform(Vector3::new(0.0, 0.0, -9.0), Vector3::zeros());
        let c = shell_christoffels(&sf, &conn, 0.0, 0.3, -0.2).unwrap();
        assert_eq!(c.gamma3_00, 9.0);
        assert_eq!(c.gamma_a00, Vector2::zeros());
    }

    #[test]
    fn sphere_second_form_is_metric_over_radius() {
        let r = 1.7;
        for analytic in [true, false] {
            let sf = if analytic {
                ShellField::new(Sphere { radius: r }, 0.01)
            } else {
                let s = Sphere { radius: r };
                ShellField::new(ClosureSurface::new(move |t, th| s.position(t, th)), 0.01)
            };
            let geo = sf.geometry(0.0, [0.4, 1.1]).unwrap();
            assert!((geo.b - geo.a / r).amax() < 1e-6);
            assert!((geo.b - geo.b.transpose()).amax() < 1e-8);
        }
    }

    #[test]
    fn normal_constraints() {
        let sf = ShellField::new(RigidlyMoving::new(Cylinder { radius: 0.5 }, Vector3::new(0.3, -0.1, 0.8), Vector3::x()), 0.02);
        let geo = sf.geometry(0.7, [0.2, 0.4]).unwrap();
        assert!((geo.pi.transpose() * geo.n).norm() < 1e-12);
        assert!((geo.n.norm() - 1.0).abs() < 1e-12);
        assert!((geo.c * geo.pi - Matrix2::identity()).amax() < 1e-12);
    }

    #[test]
    fn rigid_motion_poisson_vector() {
        let wv = Vector3::new(0.3, -0.1, 0.8);
        let rm = RigidlyMoving::new(Sphere { radius: 2.0 }, wv, Vector3::zeros());
        let fd = FiniteDiff::default();
        let t = 0.4;
        let rdot = fd.derivative(|u| rm.rotation(u), t);
        assert!((rdot - crate::algebra::skew(&wv) * rm.rotation(t)).amax() < 1e-9);
        let sf = ShellField::new(rm.clone(), 0.1);
        let geo = sf.geometry(t, [0.3, 1.0]).unwrap();
        assert!((geo.w - wv.cross(&geo.n)).norm() < 1e-12);
        let closure = ShellField::new(ClosureSurface::new(move |t, th| rm.position(t, th)), 0.1);
        let g2 = closure.geometry(t, [0.3, 1.0]).unwrap();
        assert!((g2.w - geo.w).norm() < 1e-6);
        let err = (g2.dpi_dt - geo.dpi_dt).amax();
        assert!(err < 1e-6, "{err:e}");
    }

    #[test]
    fn connection_symbols_symmetric() {
        let s = Sphere { radius: 1.3 };
        let sf = ShellField::new(ClosureSurface::new(move |t, th| s.position(t, th)), 0.1);
        let c = shell_christoffels(&sf, &GalileanConnection::flat(), 0.0, 0.5, 0.9).unwrap();
        for a in 0..2 {
            assert!((c.gamma_abc[a][0][1] - c.gamma_abc[a][1][0]).abs() < 1e-8);
        }
    }
}
