//! JSON scenario files: loading, validation and execution.

mod bundled;
mod run;
pub mod spec;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use bundled::{bundled, find_bundled, BundledScenario};
pub use run::{run, CheckOutcome, Report, RunOptions};
use spec::*;

use crate::simulate::IntegratorConfig;

/// Failure to load or prepare a scenario (exit code 2), or to write its
/// outputs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<crate::Error> for ScenarioError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidInput(m) => Self::Config(m),
            other => Self::Config(other.to_string()),
        }
    }
}

pub const SCHEMA: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    PointwiseSim,
    ResidualCheck,
    Reduction,
    Convergence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Medium {
    D0,
    D1,
    D2,
    D3Cauchy,
    D3Cosserat,
}

impl Medium {
    /// Number of chart coordinates, time included.
    pub fn chart_dim(self) -> usize {
        match self {
            Self::D0 => 1,
            Self::D1 => 2,
            Self::D2 => 3,
            Self::D3Cauchy | Self::D3Cosserat => 4,
        }
    }

    pub fn coords(self) -> &'static [&'static str] {
        match self {
            Self::D0 => &crate::fields::TIME,
            Self::D1 => &crate::fields::ROD,
            Self::D2 => &crate::fields::SURFACE,
            Self::D3Cauchy | Self::D3Cosserat => &crate::fields::SPACETIME,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub name: String,
    pub description: String,
    /// Balance law or operation the scenario exercises.
    pub law: String,
    pub kind: Kind,
    pub medium: Medium,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointwiseBody {
    pub connection: ConnectionSpec,
    pub initial: InitialSpec,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub reference: Reference,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBody {
    pub connection: ConnectionSpec,
    pub fields: Value,
    #[serde(default)]
    pub curve: Option<CurveSpec>,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub random_points: Option<RandomPointsSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub diff: DiffSpec,
    #[serde(default)]
    pub steps: Option<Vec<f64>>,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionBody {
    #[serde(default)]
    pub section: Option<SectionSpec>,
    #[serde(default)]
    pub thickness: Option<ThicknessSpec>,
    pub fields: Value,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Pointwise(PointwiseBody),
    Field(FieldBody),
    Reduction(ReductionBody),
}

/// A parsed and validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub header: Header,
    pub body: Body,
    /// Directory against which grid files resolve.
    pub base_dir: PathBuf,
}

fn cfg(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(msg.into())
}

fn take_str(obj: &mut serde_json::Map<String, Value>, key: &str) -> Result<String, ScenarioError> {
    match obj.remove(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(cfg(format!("{key}: expected a string"))),
        None => Err(cfg(format!("missing field `{key}`"))),
    }
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, ScenarioError> {
    serde_json::from_value(v).map_err(|e| cfg(e.to_string()))
}

impl Scenario {
    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
        Self::from_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str, base_dir: &Path) -> Result<Self, ScenarioError> {
        let v: Value = serde_json::from_str(text).map_err(|e| cfg(format!("invalid JSON: {e}")))?;
        let Value::Object(mut obj) = v else {
            return Err(cfg("a scenario must be a JSON object"));
        };
        match obj.remove("schema") {
            Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA) => {}
            Some(other) => return Err(cfg(format!("schema: unsupported version {other}, expected {SCHEMA}"))),
            None => return Err(cfg("missing field `schema`")),
        }
        let name = take_str(&mut obj, "name")?;
        let description = take_str(&mut obj, "description")?;
        let law = take_str(&mut obj, "law")?;
        let kind: Kind = from_value(obj.remove("kind").ok_or_else(|| cfg("missing field `kind`"))?).map_err(|e| cfg(format!("kind: {e}")))?;
        let medium: Medium = from_value(obj.remove("medium").ok_or_else(|| cfg("missing field `medium`"))?).map_err(|e| cfg(format!("medium: {e}")))?;
        let header = Header { name, description, law, kind, medium };
        let rest = Value::Object(obj);
        let body = match kind {
            Kind::PointwiseSim => {
                if medium != Medium::D0 {
                    return Err(cfg("medium: pointwise_sim requires d0"));
                }
                Body::Pointwise(from_value(rest)?)
            }
            Kind::ResidualCheck | Kind::Convergence => Body::Field(from_value(rest)?),
            Kind::Reduction => {
                if !matches!(medium, Medium::D1 | Medium::D2) {
                    return Err(cfg("medium: reduction requires d1 (cross-section) or d2 (thickness)"));
                }
                Body::Reduction(from_value(rest)?)
            }
        };
        let s = Self { header, body, base_dir: base_dir.to_path_buf() };
        s.validate()?;
        Ok(s)
    }

    pub fn name(&self) -> &str {
        &self.header.name
    }

    pub fn checks(&self) -> &[CheckSpec] {
        match &self.body {
            Body::Pointwise(b) => &b.checks,
            Body::Field(b) => &b.checks,
            Body::Reduction(b) => &b.checks,
        }
    }

    pub fn outputs(&self) -> &Outputs {
        match &self.body {
            Body::Pointwise(b) => &b.outputs,
            Body::Field(b) => &b.outputs,
            Body::Reduction(b) => &b.outputs,
        }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let (kind, medium) = (self.header.kind, self.header.medium);
        if self.checks().is_empty() {
            return Err(cfg("checks: at least one check is required"));
        }
        for c in self.checks() {
            if !(c.tolerance() >= 0.0) {
                return Err(cfg(format!("checks: {} has a negative tolerance", c.name())));
            }
            if !check_allowed(kind, medium, c) {
                return Err(cfg(format!("checks: `{}` does not apply to a {kind:?} scenario on medium {medium:?}", c.name())));
            }
        }
        let allowed: &[&str] = match kind {
            Kind::PointwiseSim => &["trajectory"],
            Kind::ResidualCheck => &["residuals", "residual_grid"],
            Kind::Reduction => &["reduced"],
            Kind::Convergence => &["convergence"],
        };
        for (k, _) in self.outputs().declared() {
            if !allowed.contains(&k) {
                return Err(cfg(format!("outputs.{k}: not produced by {kind:?} scenarios")));
            }
        }
        match &self.body {
            Body::Pointwise(b) => {
                spec::integrator(&b.integrator)?;
                b.initial.build()?;
                b.connection.build()?;
                let (g, w) = (b.connection.constant_gravity(), b.connection.constant_omega());
                match b.reference {
                    Reference::Projectile if w != Some(nalgebra::Vector3::zeros()) || g.is_none() => {
                        return Err(cfg("reference: projectile needs numeric gravity and zero omega"));
                    }
                    Reference::RotatingFree
                        if g != Some(nalgebra::Vector3::zeros()) || w.is_none() || !b.connection.centrifugal =>
                    {
                        return Err(cfg("reference: rotating_free needs zero gravity, numeric omega and centrifugal = true"));
                    }
                    _ => {}
                }
                if b.reference == Reference::None && self.checks().iter().any(|c| matches!(c, CheckSpec::Reference { .. })) {
                    return Err(cfg("reference: the reference check needs a reference solution"));
                }
            }
            Body::Field(b) => {
                let n = b.points.as_ref().map_or(0, Vec::len) + b.grid.is_some() as usize + b.random_points.is_some() as usize;
                if n == 0 {
                    return Err(cfg("points: give points, grid or random_points"));
                }
                if let Some(p) = &b.points {
                    if p.iter().any(|p| p.len() != medium.chart_dim()) {
                        return Err(cfg(format!("points: each point needs {} coordinates ({})", medium.chart_dim(), medium.coords().join(", "))));
                    }
                }
                if let Some(r) = &b.random_points {
                    if r.lower.len() != medium.chart_dim() || r.upper.len() != medium.chart_dim() {
                        return Err(cfg(format!("random_points: bounds need {} coordinates", medium.chart_dim())));
                    }
                }
                if let Some(g) = &b.grid {
                    g.points(medium.chart_dim())?;
                }
                b.diff.build()?;
                match kind {
                    Kind::Convergence => match &b.steps {
                        Some(s) if s.len() >= 3 && s.iter().all(|h| *h > 0.0) => {}
                        _ => return Err(cfg("steps: convergence needs at least 3 positive step sizes")),
                    },
                    _ if b.steps.is_some() => return Err(cfg("steps: only convergence scenarios take steps")),
                    _ => {}
                }
                let static_surface = b.surface.as_ref().is_none_or(SurfaceSpec::is_static);
                for c in &b.checks {
                    if matches!(c, CheckSpec::InPlaneReduction { .. } | CheckSpec::OffPlaneReduction { .. } | CheckSpec::GeneralAgreement { .. })
                        && medium == Medium::D2
                        && !static_surface
                    {
                        return Err(cfg(format!("checks: `{}` needs a static surface", c.name())));
                    }
                }
                run::prepare_fields(self, b)?;
            }
            Body::Reduction(b) => {
                run::prepare_reduction(self, b)?;
            }
        }
        Ok(())
    }
}

fn check_allowed(kind: Kind, medium: Medium, c: &CheckSpec) -> bool {
    use CheckSpec::*;
    match kind {
        Kind::PointwiseSim => matches!(c, Reference { .. } | MassDrift { .. } | PositionDrift { .. } | ProperSpinAxis { .. } | ProperSpinNorm { .. }),
        Kind::ResidualCheck => match c {
            MaxResidual { .. } | GeneralAgreement { .. } => true,
            AngularTerms { .. } => medium == Medium::D1,
            Identities { .. } | InPlaneReduction { .. } | OffPlaneReduction { .. } => medium == Medium::D2,
            _ => false,
        },
        Kind::Reduction => match c {
            Value { .. } => true,
            ForceRoutes { .. } => medium == Medium::D1,
            _ => false,
        },
        Kind::Convergence => matches!(c, Order { .. } | MaxError { .. }),
    }
}
