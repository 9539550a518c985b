//! Serde types of the scenario file and their conversion to library objects.

use std::path::Path;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::affine::PointwiseTorsor;
use crate::balance::{PointwisePath, RodFields, ShellFields};
use crate::connection::GalileanConnection;
use crate::diff::FiniteDiff;
use crate::error::{Error, Result};
use crate::fields::{self, Component, Expr, ScalarSpec};
use crate::manufactured;
use crate::media::{
    CauchyField, CauchySample, ClosureCurve, ClosureSurface, Cosserat3DState, Curve1D, Cylinder, Helix,
    Plane, RigidlyMoving, RotatingRing, ShellField, Sphere, SpinningRing, StraightRod, Surface,
};
use crate::reduction::{CrossSection, ThicknessRule};
use crate::simulate::{IntegratorConfig, PointwiseState};

pub type Vec3Spec = [Component; 3];
pub type Mat3Spec = [[Component; 3]; 3];

fn zero3() -> Vec3Spec {
    [Component::Number(0.0), Component::Number(0.0), Component::Number(0.0)]
}

fn numbers(v: &Vec3Spec) -> Option<Vector3<f64>> {
    let mut out = Vector3::zeros();
    for (i, c) in v.iter().enumerate() {
        match c {
            Component::Number(x) => out[i] = *x,
            Component::Expr(s) => out[i] = s.trim().parse().ok()?,
        }
    }
    Some(out)
}

pub(crate) fn config(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{key}: {msg}"))
}

/// Gravity and spin as functions of `(t, x1, x2, x3)`; `centrifugal` adds
/// `−Ω × (Ω × x)` to the gravity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    #[serde(default = "zero3")]
    pub gravity: Vec3Spec,
    #[serde(default = "zero3")]
    pub omega: Vec3Spec,
    #[serde(default)]
    pub centrifugal: bool,
}

impl ConnectionSpec {
    pub fn build(&self) -> Result<GalileanConnection> {
        let g = fields::vector3_field("connection.gravity", &self.gravity, &fields::SPACETIME)?;
        let w = fields::vector3_field("connection.omega", &self.omega, &fields::SPACETIME)?;
        let centrifugal = self.centrifugal;
        let w2 = w.clone();
        Ok(GalileanConnection::new(
            move |t, x: &Vector3<f64>| {
                let p = [t, x.x, x.y, x.z];
                let mut g = g(&p);
                if centrifugal {
                    let o = w2(&p);
                    g -= o.cross(&o.cross(x));
                }
                g
            },
            move |t, x: &Vector3<f64>| w(&[t, x.x, x.y, x.z]),
        ))
    }

    pub fn constant_gravity(&self) -> Option<Vector3<f64>> {
        numbers(&self.gravity)
    }

    pub fn constant_omega(&self) -> Option<Vector3<f64>> {
        numbers(&self.omega)
    }

    /// Uniform connection data, for presets that need constant `g` and `Ω`.
    pub fn uniform(&self, key: &str) -> Result<(Vector3<f64>, Vector3<f64>)> {
        match (self.constant_gravity(), self.constant_omega(), self.centrifugal) {
            (Some(g), Some(w), false) => Ok((g, w)),
            _ => Err(config(key, "this preset needs numeric connection.gravity and connection.omega without centrifugal")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub m: f64,
    pub x: [f64; 3],
    pub v: [f64; 3],
    #[serde(default)]
    pub l0: [f64; 3],
    #[serde(default)]
    pub t: f64,
}

impl InitialSpec {
    pub fn build(&self) -> Result<PointwiseState> {
        PointwiseState::new(self.t, self.m, self.x.into(), self.v.into(), self.l0.into()).map_err(|e| config("initial.m", e))
    }
}

/// Analytic solution a trajectory is compared against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    #[default]
    None,
    /// Constant gravity, no spin.
    Projectile,
    /// No gravity, constant spin with the centrifugal term: the inertial
    /// straight line seen from the rotating frame.
    RotatingFree,
}

/// Rod centre line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Straight {
        #[serde(default)]
        origin: [f64; 3],
        direction: [f64; 3],
        #[serde(default)]
        velocity: [f64; 3],
    },
    Helix { radius: f64, pitch: f64 },
    SpinningRing { radius: f64, speed: f64 },
    RotatingRing { radius: f64, omega: f64 },
    /// Position as expressions of `(t, s)`; `s` must be arclength.
    Expr { position: Vec3Spec },
}

impl CurveSpec {
    pub fn build(&self) -> Result<Curve1D> {
        Ok(match self {
            Self::Straight { origin, direction, velocity } => {
                let d = Vector3::from(*direction);
                if !(d.norm() > 0.0) {
                    return Err(config("curve.direction", "must be nonzero"));
                }
                Curve1D::new(StraightRod { origin: (*origin).into(), direction: d.normalize(), velocity: (*velocity).into() })
            }
            Self::Helix { radius, pitch } => Curve1D::new(Helix { radius: *radius, pitch: *pitch }),
            Self::SpinningRing { radius, speed } => Curve1D::new(SpinningRing { radius: *radius, speed: *speed }),
            Self::RotatingRing { radius, omega } => Curve1D::new(RotatingRing { radius: *radius, omega: *omega }),
            Self::Expr { position } => {
                let f = fields::vector3_field("curve.position", position, &fields::ROD)?;
                Curve1D::new(ClosureCurve::new(move |t, s| f(&[t, s])))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Plane,
    Sphere,
    Cylinder,
}

/// Shell middle surface, optionally in rigid motion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub shape: Shape,
    #[serde(default)]
    pub radius: Option<f64>,
    pub thickness: f64,
    #[serde(default)]
    pub angular_velocity: Option<[f64; 3]>,
    #[serde(default)]
    pub velocity: Option<[f64; 3]>,
}

impl SurfaceSpec {
    pub fn is_static(&self) -> bool {
        self.angular_velocity.is_none_or(|w| w == [0.0; 3]) && self.velocity.is_none_or(|v| v == [0.0; 3])
    }

    pub fn build(&self) -> Result<ShellField> {
        if !(self.thickness > 0.0) {
            return Err(config("surface.thickness", "must be positive"));
        }
        let radius = || match self.radius {
            Some(r) if r > 0.0 => Ok(r),
            _ => Err(config("surface.radius", "a positive radius is required for this shape")),
        };
        let base: std::sync::Arc<dyn Surface> = match self.shape {
            Shape::Plane => std::sync::Arc::new(Plane),
            Shape::Sphere => std::sync::Arc::new(Sphere { radius: radius()? }),
            Shape::Cylinder => std::sync::Arc::new(Cylinder { radius: radius()? }),
        };
        if self.is_static() {
            return Ok(ShellField { surface: base, thickness: self.thickness });
        }
        let w = Vector3::from(self.angular_velocity.unwrap_or_default());
        let u = Vector3::from(self.velocity.unwrap_or_default());
        let b = base.clone();
        let moving = RigidlyMoving::new(ClosureSurface::new(move |t, th| b.position(t, th)), w, u);
        Ok(ShellField::new(moving, self.thickness))
    }
}

/// Finite-difference settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffSpec {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub one_sided: bool,
}

fn default_step() -> f64 {
    1e-5
}

impl Default for DiffSpec {
    fn default() -> Self {
        Self { step: default_step(), one_sided: false }
    }
}

impl DiffSpec {
    pub fn build(&self) -> Result<FiniteDiff> {
        if !(self.step > 0.0) {
            return Err(config("diff.step", "must be positive"));
        }
        Ok(FiniteDiff::with_step(self.step).one_sided(self.one_sided))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub n: Vec<usize>,
}

impl GridSpec {
    /// Tensor grid points, last coordinate fastest.
    pub fn points(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        if self.lower.len() != dim || self.upper.len() != dim || self.n.len() != dim {
            return Err(config("grid", format!("lower, upper and n need {dim} entries")));
        }
        let axes: Vec<Vec<f64>> = (0..dim)
            .map(|k| {
                let n = self.n[k].max(1);
                (0..n)
                    .map(|i| if n == 1 { self.lower[k] } else { self.lower[k] + (self.upper[k] - self.lower[k]) * i as f64 / (n - 1) as f64 })
                    .collect()
            })
            .collect();
        let mut out = vec![vec![]];
        for a in &axes {
            out = out.into_iter().flat_map(|p| a.iter().map(move |x| [p.clone(), vec![*x]].concat())).collect();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPointsSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub count: usize,
}

/// Pointwise path `t ↦ (m, p, q, l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub m: Component,
    pub p: Vec3Spec,
    pub q: Vec3Spec,
    pub l: Vec3Spec,
}

impl PathSpec {
    pub fn build(&self) -> Result<PointwisePath> {
        let m = fields::scalar_field("fields.m", &ScalarSpec::Component(self.m.clone()), &fields::TIME, Path::new("."))?;
        let p = fields::vector3_field("fields.p", &self.p, &fields::TIME)?;
        let q = fields::vector3_field("fields.q", &self.q, &fields::TIME)?;
        let l = fields::vector3_field("fields.l", &self.l, &fields::TIME)?;
        Ok(std::sync::Arc::new(move |t| {
            let a = [t];
            PointwiseTorsor { m: m(&a), p: p(&a), q: q(&a), l: l(&a) }
        }))
    }
}

/// 3D Cauchy or Cosserat fields over `(t, x1, x2, x3)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeFieldsSpec {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub rho: Option<ScalarSpec>,
    #[serde(default)]
    pub v: Option<Vec3Spec>,
    #[serde(default)]
    pub sigma: Option<Mat3Spec>,
    #[serde(default)]
    pub q: Option<Vec3Spec>,
    #[serde(default)]
    pub l: Option<Vec3Spec>,
    #[serde(default)]
    pub l_star: Option<Mat3Spec>,
    #[serde(default)]
    pub m_star: Option<Mat3Spec>,
}

fn zero_mat3() -> Mat3Spec {
    std::array::from_fn(|_| zero3())
}

impl VolumeFieldsSpec {
    pub fn cauchy(&self, conn: &ConnectionSpec, base: &Path) -> Result<CauchyField> {
        if let Some(p) = &self.preset {
            return match p.as_str() {
                "cauchy_wave" => {
                    let (g, w) = conn.uniform("fields.preset")?;
                    Ok(manufactured::cauchy_wave(g, w))
                }
                other => Err(config("fields.preset", format!("unknown volume preset `{other}`; known: cauchy_wave"))),
            };
        }
        let rho = fields::scalar_field("fields.rho", self.rho.as_ref().ok_or_else(|| config("fields.rho", "missing"))?, &fields::SPACETIME, base)?;
        let v = fields::vector3_field("fields.v", self.v.as_ref().unwrap_or(&zero3()), &fields::SPACETIME)?;
        let sigma = fields::matrix3_field("fields.sigma", self.sigma.as_ref().unwrap_or(&zero_mat3()), &fields::SPACETIME)?;
        Ok(CauchyField::new(move |p: &[f64]| CauchySample { rho: rho(p), v: v(p), sigma: sigma(p) }))
    }

    pub fn cosserat(&self, conn: &ConnectionSpec, base: &Path) -> Result<Cosserat3DState> {
        let mut s = Cosserat3DState::from_cauchy(&self.cauchy(conn, base)?);
        if let Some(q) = &self.q {
            s.q = fields::vector3_field("fields.q", q, &fields::SPACETIME)?;
        }
        if let Some(l) = &self.l {
            s.l = fields::vector3_field("fields.l", l, &fields::SPACETIME)?;
        }
        if let Some(m) = &self.l_star {
            s.l_star = fields::matrix3_field("fields.l_star", m, &fields::SPACETIME)?;
        }
        if let Some(m) = &self.m_star {
            s.m_star = fields::matrix3_field("fields.m_star", m, &fields::SPACETIME)?;
        }
        Ok(s)
    }
}

/// Rod fields over `(t, s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RodFieldsSpec {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub rho_l: Option<ScalarSpec>,
    #[serde(default = "zero3")]
    pub force: Vec3Spec,
    #[serde(default = "zero3")]
    pub q: Vec3Spec,
    #[serde(default = "zero3")]
    pub l: Vec3Spec,
    #[serde(default = "zero3")]
    pub l_star: Vec3Spec,
    #[serde(default = "zero3")]
    pub m_star: Vec3Spec,
}

/// Compiled rod expressions, kept for symbolic oracles.
#[derive(Clone, Debug)]
pub struct RodExprs {
    pub force: [Expr; 3],
    pub l: [Expr; 3],
    pub l_star: [Expr; 3],
    pub m_star: [Expr; 3],
}

fn exprs3(key: &str, spec: &Vec3Spec, coords: &[&str]) -> Result<[Expr; 3]> {
    let v: Vec<Expr> = spec.iter().map(|c| c.compile(coords)).collect::<Result<_>>().map_err(|e| config(key, e))?;
    Ok(v.try_into().expect("three components"))
}

impl RodFieldsSpec {
    pub fn build(&self, curve: Option<&CurveSpec>, conn: &ConnectionSpec, base: &Path) -> Result<(RodFields, Option<RodExprs>)> {
        if let Some(p) = &self.preset {
            return match p.as_str() {
                "rod_self_weight" => {
                    let (g, _) = conn.uniform("fields.preset")?;
                    Ok((manufactured::rod_self_weight(g), None))
                }
                other => Err(config("fields.preset", format!("unknown rod preset `{other}`; known: rod_self_weight"))),
            };
        }
        let curve = curve.ok_or_else(|| config("curve", "missing"))?.build()?;
        let rho = fields::scalar_field("fields.rho_l", self.rho_l.as_ref().ok_or_else(|| config("fields.rho_l", "missing"))?, &fields::ROD, base)?;
        let mut f = RodFields::new(curve, rho);
        f.force = fields::vector3_field("fields.force", &self.force, &fields::ROD)?;
        f.q = fields::vector3_field("fields.q", &self.q, &fields::ROD)?;
        f.l = fields::vector3_field("fields.l", &self.l, &fields::ROD)?;
        f.l_star = fields::vector3_field("fields.l_star", &self.l_star, &fields::ROD)?;
        f.m_star = fields::vector3_field("fields.m_star", &self.m_star, &fields::ROD)?;
        let ex = RodExprs {
            force: exprs3("fields.force", &self.force, &fields::ROD)?,
            l: exprs3("fields.l", &self.l, &fields::ROD)?,
            l_star: exprs3("fields.l_star", &self.l_star, &fields::ROD)?,
            m_star: exprs3("fields.m_star", &self.m_star, &fields::ROD)?,
        };
        Ok((f, Some(ex)))
    }
}

/// Shell fields over `(t, th1, th2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellFieldsSpec {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub rho_s: Option<ScalarSpec>,
    #[serde(default)]
    pub n: Option<[[Component; 2]; 2]>,
    #[serde(default)]
    pub q: Option<[Component; 2]>,
    #[serde(default)]
    pub m: Option<[[Component; 2]; 2]>,
}

/// Compiled shell expressions, kept for symbolic oracles.
#[derive(Clone, Debug)]
pub struct ShellExprs {
    pub q: [Expr; 2],
    pub m: [[Expr; 2]; 2],
}

fn zero2() -> [Component; 2] {
    [Component::Number(0.0), Component::Number(0.0)]
}

impl ShellFieldsSpec {
    pub fn build(&self, surface: Option<&SurfaceSpec>, conn: &ConnectionSpec, base: &Path) -> Result<(ShellFields, Option<ShellExprs>)> {
        if let Some(p) = &self.preset {
            return match p.as_str() {
                "plate_self_weight" => {
                    let (g, _) = conn.uniform("fields.preset")?;
                    if g.x != 0.0 || g.y != 0.0 {
                        return Err(config("connection.gravity", "plate_self_weight needs gravity along x3"));
                    }
                    let rho = match &self.rho_s {
                        Some(ScalarSpec::Component(Component::Number(r))) => *r,
                        _ => return Err(config("fields.rho_s", "plate_self_weight needs a numeric rho_s")),
                    };
                    let h = surface.map_or(0.01, |s| s.thickness);
                    Ok((manufactured::plate_self_weight(g.z, rho, h), None))
                }
                other => Err(config("fields.preset", format!("unknown shell preset `{other}`; known: plate_self_weight"))),
            };
        }
        let shell = surface.ok_or_else(|| config("surface", "missing"))?.build()?;
        let rho = fields::scalar_field("fields.rho_s", self.rho_s.as_ref().ok_or_else(|| config("fields.rho_s", "missing"))?, &fields::SURFACE, base)?;
        let zero22 = [zero2(), zero2()];
        let mut f = ShellFields::new(shell, rho);
        f.n = fields::matrix2_field("fields.n", self.n.as_ref().unwrap_or(&zero22), &fields::SURFACE)?;
        let q_spec = self.q.clone().unwrap_or_else(zero2);
        let m_spec = self.m.clone().unwrap_or(zero22);
        f.q = fields::vector2_field("fields.q", &q_spec, &fields::SURFACE)?;
        f.m = fields::matrix2_field("fields.m", &m_spec, &fields::SURFACE)?;
        let c = |key: &str, c: &Component| c.compile(&fields::SURFACE).map_err(|e| config(key, e));
        let ex = ShellExprs {
            q: [c("fields.q", &q_spec[0])?, c("fields.q", &q_spec[1])?],
            m: [
                [c("fields.m", &m_spec[0][0])?, c("fields.m", &m_spec[0][1])?],
                [c("fields.m", &m_spec[1][0])?, c("fields.m", &m_spec[1][1])?],
            ],
        };
        Ok((f, Some(ex)))
    }
}

/// Cross-section: quadrature rule, origin and tangent `normal`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionSpec {
    Disc {
        radius: f64,
        #[serde(default = "eight")]
        radial: usize,
        #[serde(default = "sixteen")]
        angular: usize,
        #[serde(default)]
        origin: [f64; 3],
        normal: [f64; 3],
    },
    Rectangle {
        a: f64,
        b: f64,
        #[serde(default = "eight")]
        na: usize,
        #[serde(default = "eight")]
        nb: usize,
        #[serde(default)]
        origin: [f64; 3],
        normal: [f64; 3],
    },
}

fn eight() -> usize {
    8
}

fn sixteen() -> usize {
    16
}

impl SectionSpec {
    pub fn build(&self) -> Result<CrossSection> {
        match self {
            Self::Disc { radius, radial, angular, origin, normal } => {
                CrossSection::disc((*origin).into(), (*normal).into(), *radius, *radial, *angular)
            }
            Self::Rectangle { a, b, na, nb, origin, normal } => {
                CrossSection::rectangle((*origin).into(), (*normal).into(), *a, *b, *na, *nb)
            }
        }
        .map_err(|e| config("section", e))
    }
}

/// Section fields over the offset `(x1, x2, x3)` from the section origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionFieldsSpec {
    pub rho: ScalarSpec,
    #[serde(default = "zero3")]
    pub v: Vec3Spec,
    #[serde(default = "zero_mat3")]
    pub sigma: Mat3Spec,
}

pub const SECTION: [&str; 3] = ["x1", "x2", "x3"];

pub type SectionField = std::sync::Arc<dyn Fn(&Vector3<f64>) -> CauchySample + Send + Sync>;

impl SectionFieldsSpec {
    pub fn build(&self, base: &Path) -> Result<SectionField> {
        let rho = fields::scalar_field("fields.rho", &self.rho, &SECTION, base)?;
        let v = fields::vector3_field("fields.v", &self.v, &SECTION)?;
        let sigma = fields::matrix3_field("fields.sigma", &self.sigma, &SECTION)?;
        Ok(std::sync::Arc::new(move |x: &Vector3<f64>| {
            let p = [x.x, x.y, x.z];
            CauchySample { rho: rho(&p), v: v(&p), sigma: sigma(&p) }
        }))
    }
}

/// Through-thickness data: stress over `th3` in adapted components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThicknessFieldsSpec {
    pub rho: f64,
    pub sigma: Mat3Spec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThicknessSpec {
    pub h: f64,
    #[serde(default = "eight")]
    pub nodes: usize,
}

impl ThicknessSpec {
    pub fn build(&self) -> Result<ThicknessRule> {
        ThicknessRule::gauss(self.h, self.nodes).map_err(|e| config("thickness", e))
    }
}

impl ThicknessFieldsSpec {
    pub fn sigma(&self) -> Result<impl Fn(f64) -> Matrix3<f64>> {
        let s = fields::matrix3_field("fields.sigma", &self.sigma, &fields::THICKNESS)?;
        Ok(move |th: f64| s(&[th]))
    }
}

/// Expected value of a reduction check: scalar, vector or matrix of
/// constant expressions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Scalar(Component),
    Vector(Vec<Component>),
    Matrix(Vec<Vec<Component>>),
}

impl Expected {
    pub fn values(&self) -> Result<Vec<f64>> {
        let eval = |c: &Component| -> Result<f64> {
            let e = c.compile(&[]).map_err(|e| config("checks.expected", e))?;
            Ok(e.eval(&[]))
        };
        match self {
            Self::Scalar(c) => Ok(vec![eval(c)?]),
            Self::Vector(v) => v.iter().map(eval).collect(),
            Self::Matrix(m) => m.iter().flatten().map(eval).collect(),
        }
    }
}

/// One pass/fail criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    MaxResidual { tolerance: f64 },
    GeneralAgreement { tolerance: f64 },
    AngularTerms { tolerance: f64 },
    Identities { tolerance: f64 },
    InPlaneReduction { tolerance: f64 },
    OffPlaneReduction { tolerance: f64 },
    Reference { tolerance: f64 },
    MassDrift { tolerance: f64 },
    PositionDrift { tolerance: f64 },
    ProperSpinAxis { axis: [f64; 3], tolerance: f64 },
    ProperSpinNorm { tolerance: f64 },
    Value {
        quantity: String,
        expected: Expected,
        tolerance: f64,
        #[serde(default)]
        relative: bool,
    },
    ForceRoutes { tolerance: f64 },
    Order { expected: f64, tolerance: f64 },
    MaxError { step: f64, tolerance: f64 },
}

impl CheckSpec {
    pub fn name(&self) -> String {
        let base = serde_json::to_value(self).ok().and_then(|v| v.get("check").and_then(|c| c.as_str().map(String::from))).unwrap_or_default();
        match self {
            Self::Value { quantity, .. } => format!("{base}:{quantity}"),
            Self::MaxError { step, .. } => format!("{base}@{step:e}"),
            _ => base,
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Self::MaxResidual { tolerance }
            | Self::GeneralAgreement { tolerance }
            | Self::AngularTerms { tolerance }
            | Self::Identities { tolerance }
            | Self::InPlaneReduction { tolerance }
            | Self::OffPlaneReduction { tolerance }
            | Self::Reference { tolerance }
            | Self::MassDrift { tolerance }
            | Self::PositionDrift { tolerance }
            | Self::ProperSpinAxis { tolerance, .. }
            | Self::ProperSpinNorm { tolerance }
            | Self::Value { tolerance, .. }
            | Self::ForceRoutes { tolerance }
            | Self::Order { tolerance, .. }
            | Self::MaxError { tolerance, .. } => *tolerance,
        }
    }
}

/// Files a run writes, relative to the output directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub trajectory: Option<String>,
    #[serde(default)]
    pub residuals: Option<String>,
    #[serde(default)]
    pub residual_grid: Option<String>,
    #[serde(default)]
    pub reduced: Option<String>,
    #[serde(default)]
    pub convergence: Option<String>,
}

impl Outputs {
    pub fn declared(&self) -> Vec<(&'static str, &str)> {
        [
            ("trajectory", &self.trajectory),
            ("residuals", &self.residuals),
            ("residual_grid", &self.residual_grid),
            ("reduced", &self.reduced),
            ("convergence", &self.convergence),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

pub fn vec2(v: Vector2<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

pub fn mat2(m: Matrix2<f64>) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

pub fn integrator(spec: &IntegratorConfig) -> Result<IntegratorConfig> {
    spec.steps().map_err(|e| config("integrator", e))?;
    Ok(*spec)
}
