use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use nalgebra::{Matrix2x4, Matrix3, Matrix4x2, Vector3};

use crate::algebra::rotation_exp;
use crate::diff::FiniteDiff;
use crate::error::{Error, Result};

const ARCLENGTH_TOL: f64 = 1e-6;
const DEGENERATE_TOL: f64 = 1e-9;

/// Eulerian description `x = ψ(t, s)` of a rod's line of centroids, with `s`
/// the arclength, plus the material velocity of its points.
pub trait Curve: Send + Sync {
    fn position(&self, t: f64, s: f64) -> Vector3<f64>;

    /// Material velocity. The default assumes no material sliding along the
    /// curve, i.e. `v = ∂ψ/∂t`.
    fn velocity(&self, t: f64, s: f64) -> Vector3<f64> {
        FiniteDiff::default().derivative(|tt| self.position(tt, s), t)
    }

    /// `∂ψ/∂s`, not normalized.
    fn tangent(&self, t: f64, s: f64) -> Vector3<f64> {
        FiniteDiff::default().derivative(|ss| self.position(t, ss), s)
    }
}

/// Straight rod `ψ = x₀ + s d + t u`.
#[derive(Clone, Copy, Debug)]
pub struct StraightRod {
    pub origin: Vector3<f64>,
    pub direction: Vector3<f64>,
    pub velocity: Vector3<f64>,
}

impl StraightRod {
    pub fn at_rest(direction: Vector3<f64>) -> Self {
        Self { origin: Vector3::zeros(), direction: direction.normalize(), velocity: Vector3::zeros() }
    }
}

impl Curve for StraightRod {
    fn position(&self, t: f64, s: f64) -> Vector3<f64> {
        self.origin + self.direction * s + self.velocity * t
    }
    fn velocity(&self, _: f64, _: f64) -> Vector3<f64> {
        self.velocity
    }
    fn tangent(&self, _: f64, _: f64) -> Vector3<f64> {
        self.direction
    }
}

/// Static circular helix of radius `r` rising `b` per radian, by arclength.
#[derive(Clone, Copy, Debug)]
pub struct Helix {
    pub radius: f64,
    pub pitch: f64,
}

impl Helix {
    fn c(&self) -> f64 {
        self.radius.hypot(self.pitch)
    }
}

impl Curve for Helix {
    fn position(&self, _: f64, s: f64) -> Vector3<f64> {
        let u = s / self.c();
        Vector3::new(self.radius * u.cos(), self.radius * u.sin(), self.pitch * u)
    }
    fn velocity(&self, _: f64, _: f64) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn tangent(&self, _: f64, s: f64) -> Vector3<f64> {
        let c = self.c();
        let u = s / c;
        Vector3::new(-self.radius * u.sin(), self.radius * u.cos(), self.pitch) / c
    }
}

/// Fixed circle in the `e₁e₂` plane with material streaming along it at
/// speed `U`.
#[derive(Clone, Copy, Debug)]
pub struct SpinningRing {
    pub radius: f64,
    pub speed: f64,
}

impl Curve for SpinningRing {
    fn position(&self, _: f64, s: f64) -> Vector3<f64> {
        let u = s / self.radius;
        Vector3::new(self.radius * u.cos(), self.radius * u.sin(), 0.0)
    }
    fn velocity(&self, t: f64, s: f64) -> Vector3<f64> {
        self.tangent(t, s) * self.speed
    }
    fn tangent(&self, _: f64, s: f64) -> Vector3<f64> {
        let u = s / self.radius;
        Vector3::new(-u.sin(), u.cos(), 0.0)
    }
}

/// Circle rotating rigidly about `e₃` at rate `ω`.
#[derive(Clone, Copy, Debug)]
pub struct RotatingRing {
    pub radius: f64,
    pub omega: f64,
}

impl RotatingRing {
    fn rotation(&self, t: f64) -> Matrix3<f64> {
        rotation_exp(&Vector3::new(0.0, 0.0, self.omega), t)
    }
}

impl Curve for RotatingRing {
    fn position(&self, t: f64, s: f64) -> Vector3<f64> {
        let u = s / self.radius;
        self.rotation(t) * Vector3::new(self.radius * u.cos(), self.radius * u.sin(), 0.0)
    }
    fn velocity(&self, t: f64, s: f64) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, self.omega).cross(&self.position(t, s))
    }
    fn tangent(&self, t: f64, s: f64) -> Vector3<f64> {
        let u = s / self.radius;
        self.rotation(t) * Vector3::new(-u.sin(), u.cos(), 0.0)
    }
}

type CurveFn = Arc<dyn Fn(f64, f64) -> Vector3<f64> + Send + Sync>;

/// Curve given by closures; the velocity defaults to `∂ψ/∂t`.
#[derive(Clone)]
pub struct ClosureCurve {
    pub position: CurveFn,
    pub velocity: Option<CurveFn>,
}

impl ClosureCurve {
    pub fn new<F>(position: F) -> Self
    where
        F: Fn(f64, f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        Self { position: Arc::new(position), velocity: None }
    }

    pub fn with_velocity<F>(mut self, velocity: F) -> Self
    where
        F: Fn(f64, f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        self.velocity = Some(Arc::new(velocity));
        self
    }
}

impl Curve for ClosureCurve {
    fn position(&self, t: f64, s: f64) -> Vector3<f64> {
        (self.position)(t, s)
    }
    fn velocity(&self, t: f64, s: f64) -> Vector3<f64> {
        match &self.velocity {
            Some(v) => v(t, s),
            None => FiniteDiff::default().derivative(|tt| (self.position)(tt, s), t),
        }
    }
}

/// Lagrangian motion `x = φ(t, s₀)` re-parameterized by arclength
/// `s(t, s₀) = ∫ |∂φ/∂s₀| ds₀` measured from `s₀ = start`.
#[derive(Clone)]
pub struct LagrangianCurve {
    phi: CurveFn,
    start: f64,
    end: f64,
    panels: usize,
    rule: Arc<GaussLegendre>,
    tol: f64,
}

impl LagrangianCurve {
    pub fn new<F>(phi: F, start: f64, end: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        if !(start < end) {
            return Err(Error::InvalidInput(format!("material range must satisfy start < end: {start}, {end}")));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(8).unwrap());
        Ok(Self { phi: Arc::new(phi), start, end, panels: 64, rule: Arc::new(rule), tol: 1e-8 })
    }

    fn speed(&self, t: f64, s0: f64) -> f64 {
        FiniteDiff::default().derivative(|u| (self.phi)(t, u), s0).norm()
    }

    /// Arclength from `start` to `s0`.
    pub fn arclength(&self, t: f64, s0: f64) -> f64 {
        let h = (s0 - self.start) / self.panels as f64;
        let mut total = 0.0;
        for k in 0..self.panels {
            let a = self.start + k as f64 * h;
            for &(x, w) in self.rule.as_node_weight_pairs() {
                total += w * 0.5 * h * self.speed(t, a + 0.5 * h * (x + 1.0));
            }
        }
        total
    }

    /// Material label `s₀ = f(t, s)` of the point at arclength `s`.
    pub fn material_label(&self, t: f64, s: f64) -> f64 {
        let total = self.arclength(t, self.end);
        let mut u = self.start + (self.end - self.start) * (s / total).clamp(0.0, 1.0);
        for _ in 0..50 {
            let step = (self.arclength(t, u) - s) / self.speed(t, u);
            u -= step;
            if step.abs() < self.tol * 1e-3 {
                break;
            }
        }
        u
    }

    /// Tangential speed from `v_t = −(∂f/∂t)/(∂f/∂s)`.
    pub fn tangential_speed_from_labels(&self, t: f64, s: f64) -> f64 {
        let fd = FiniteDiff::with_step(1e-4);
        let df_dt = fd.derivative(|tt| self.material_label(tt, s), t);
        let df_ds = fd.derivative(|ss| self.material_label(t, ss), s);
        -df_dt / df_ds
    }
}

impl Curve for LagrangianCurve {
    fn position(&self, t: f64, s: f64) -> Vector3<f64> {
        (self.phi)(t, self.material_label(t, s))
    }
    fn velocity(&self, t: f64, s: f64) -> Vector3<f64> {
        let s0 = self.material_label(t, s);
        FiniteDiff::default().derivative(|tt| (self.phi)(tt, s0), t)
    }
    fn tangent(&self, t: f64, s: f64) -> Vector3<f64> {
        let s0 = self.material_label(t, s);
        let d = FiniteDiff::default().derivative(|u| (self.phi)(t, u), s0);
        d / d.norm()
    }
}

/// A [`Curve`] checked to be parameterized by arclength.
#[derive(Clone)]
pub struct Curve1D {
    pub curve: Arc<dyn Curve>,
}

impl Curve1D {
    pub fn new<C: Curve + 'static>(curve: C) -> Self {
        Self { curve: Arc::new(curve) }
    }

    pub fn position(&self, t: f64, s: f64) -> Vector3<f64> {
        self.curve.position(t, s)
    }

    /// Unit tangent `n = ∂ψ/∂s`.
    pub fn n(&self, t: f64, s: f64) -> Result<Vector3<f64>> {
        let d = self.curve.tangent(t, s);
        let norm = d.norm();
        if !(norm >= DEGENERATE_TOL) {
            return Err(Error::DegenerateTangent { norm });
        }
        if (norm - 1.0).abs() > ARCLENGTH_TOL {
            return Err(Error::NotArclength { norm });
        }
        Ok(d / norm)
    }

    pub fn v(&self, t: f64, s: f64) -> Vector3<f64> {
        self.curve.velocity(t, s)
    }

    /// `v_t = v · n`.
    pub fn v_t(&self, t: f64, s: f64) -> Result<f64> {
        Ok(self.v(t, s).dot(&self.n(t, s)?))
    }
}

/// `U = [[1, 0], [v − v_t n, n]]`.
pub fn tangent_map_1d(c: &Curve1D, t: f64, s: f64) -> Result<Matrix4x2<f64>> {
    let n = c.n(t, s)?;
    let v = c.v(t, s);
    let drift = v - n * v.dot(&n);
    let mut u = Matrix4x2::zeros();
    u[(0, 0)] = 1.0;
    for i in 0..3 {
        u[(i + 1, 0)] = drift[i];
        u[(i + 1, 1)] = n[i];
    }
    Ok(u)
}

/// `Π = [[1, 0ᵀ], [0, nᵀ]]`.
pub fn projector_1d(c: &Curve1D, t: f64, s: f64) -> Result<Matrix2x4<f64>> {
    let n = c.n(t, s)?;
    Ok(Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, n.x, n.y, n.z))
}

/// Force-mass tensor of a rod at one point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ForceMass1D {
    pub rho_l: f64,
    pub v: Vector3<f64>,
    pub v_t: f64,
    pub f: Vector3<f64>,
}

impl ForceMass1D {
    /// `[[ρ_l, ρ_l vᵀ], [ρ_l v_t, (ρ_l v_t v − F)ᵀ]]`.
    pub fn t_matrix(&self) -> Matrix2x4<f64> {
        let mut t = Matrix2x4::zeros();
        t[(0, 0)] = self.rho_l;
        t[(1, 0)] = self.rho_l * self.v_t;
        for i in 0..3 {
            t[(0, i + 1)] = self.rho_l * self.v[i];
            t[(1, i + 1)] = self.rho_l * self.v_t * self.v[i] - self.f[i];
        }
        t
    }

    /// Inverse of [`ForceMass1D::t_matrix`].
    pub fn from_t_matrix(t: &Matrix2x4<f64>) -> Result<Self> {
        let rho_l = t[(0, 0)];
        if !(rho_l > 0.0) {
            return Err(Error::NonpositiveMass { mass: rho_l });
        }
        let v = Vector3::new(t[(0, 1)], t[(0, 2)], t[(0, 3)]) / rho_l;
        let v_t = t[(1, 0)] / rho_l;
        let f = Vector3::from_fn(|i, _| rho_l * v_t * v[i] - t[(1, i + 1)]);
        Ok(Self { rho_l, v, v_t, f })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    #[test]
    fn straight_rod_tangent_map() {
        let c = Curve1D::new(StraightRod::at_rest(Vector3::x()));
        let u = tangent_map_1d(&c, 0.0, 0.3).unwrap();
        assert_eq!(u, Matrix4x2::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(projector_1d(&c, 0.0, 0.3).unwrap(), Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0));

        let moving = StraightRod { velocity: Vector3::y(), ..StraightRod::at_rest(Vector3::x()) };
        let u = tangent_map_1d(&Curve1D::new(moving), 1.0, 0.3).unwrap();
        assert_eq!(u.column(0).into_owned(), nalgebra::Vector4::new(1.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn projector_inverts_tangent_map() {
        let curves: Vec<Curve1D> = vec![
            Curve1D::new(RotatingRing { radius: 0.7, omega: 2.0 }),
            Curve1D::new(Helix { radius: 1.0, pitch: 0.3 }),
            Curve1D::new(SpinningRing { radius: 2.0, speed: 1.5 }),
        ];
        for c in &curves {
            for (t, s) in [(0.0, 0.0), (0.4, 1.3), (1.7, -2.2)] {
                let pu = projector_1d(c, t, s).unwrap() * tangent_map_1d(c, t, s).unwrap();
                assert!((pu - Matrix2::identity()).amax() < 1e-9);
            }
        }
    }

    #[test]
    fn tangent_map_drift_is_eulerian_velocity() {
        let c = Curve1D::new(SpinningRing { radius: 2.0, speed: 1.5 });
        let u = tangent_map_1d(&c, 0.0, 0.8).unwrap();
        assert!(u.fixed_view::<3, 1>(1, 0).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_arclength_curves() {
        let c = Curve1D::new(ClosureCurve::new(|_, s| Vector3::new(2.0 * s, 0.0, 0.0)));
        assert!(matches!(c.n(0.0, 0.0), Err(Error::NotArclength { .. })));
        let c = Curve1D::new(ClosureCurve::new(|_, _| Vector3::new(1.0, 0.0, 0.0)));
        assert!(matches!(c.n(0.0, 0.0), Err(Error::DegenerateTangent { .. })));
    }

    #[test]
    fn lagrangian_reparameterization() {
        let lc = LagrangianCurve::new(
            |t: f64, s0: f64| Vector3::new(2.0 * s0 + 0.3 * t * s0, (1.0 + 0.2 * t) * s0 * s0, 0.0),
            0.0,
            2.0,
        )
        .unwrap();
        let c = Curve1D::new(lc.clone());
        for (t, s) in [(0.0, 0.5), (0.7, 1.9)] {
            let n = c.n(t, s).unwrap();
            let raw = FiniteDiff::with_step(1e-4).derivative(|ss| lc.position(t, ss), s);
            assert!((raw.norm() - 1.0).abs() < 1e-7);
            assert!((raw - n).norm() < 1e-7);
        }
    }

    #[test]
    fn tangential_speed_from_material_labels() {
        // straight, stretching, rotating about its fixed end
        let lc = LagrangianCurve::new(
            |t: f64, s0: f64| rotation_exp(&Vector3::new(0.0, 0.0, 0.5), t) * Vector3::new(s0 + 0.3 * t * s0 * s0, 0.0, 0.0),
            0.0,
            2.0,
        )
        .unwrap();
        let c = Curve1D::new(lc.clone());
        for (t, s) in [(0.2, 0.5), (0.7, 1.9)] {
            let vt = c.v_t(t, s).unwrap();
            assert!(vt.abs() > 0.01);
            assert!((vt - lc.tangential_speed_from_labels(t, s)).abs() < 1e-6);
        }
    }

    #[test]
    fn force_mass_round_trip() {
        let fm = ForceMass1D { rho_l: 2.0, v: Vector3::new(1.0, -1.0, 0.5), v_t: 0.25, f: Vector3::new(3.0, 0.0, -2.0) };
        let back = ForceMass1D::from_t_matrix(&fm.t_matrix()).unwrap();
        assert!((back.f - fm.f).norm() < 1e-14);
        assert_eq!(back.v, fm.v);
    }
}
