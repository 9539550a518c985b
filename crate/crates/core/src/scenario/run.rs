//! Scenario execution.

use std::path::{Path, PathBuf};

use nalgebra::{Matrix2, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::spec::*;
use super::{Body, FieldBody, Kind, Medium, PointwiseBody, ReductionBody, Scenario, ScenarioError};
use crate::balance::{
    residual_1d_general, residual_1d_terms, residual_2d, residual_2d_general, residual_3d_cosserat,
    residual_3d_cosserat_general, residual_cauchy, residual_cauchy_general, residual_pointwise,
    residual_pointwise_general, BalanceResidual, PointwisePath, ResidualRecord, RodFields, ShellFields,
};
use crate::connection::{GalileanConnection, OriginMotion};
use crate::diff::FiniteDiff;
use crate::format::csv_row;
use crate::media::shell::christoffels_from_geometry;
use crate::media::{CauchyField, Cosserat3DState, ForceMass1D};
use crate::reduction::{reduce_3d_to_1d_j, reduce_3d_to_1d_t, reduce_3d_to_2d};
use crate::simulate::{
    convergence_check, projectile_reference, rotating_free_reference, run_scenario, PointwiseState, Trajectory,
};

/// Run-time settings shared by every scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Multiplies every tolerance.
    pub tolerance_scale: f64,
    /// Overrides the scenario seed for random points.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { out_dir: PathBuf::from("torsor-out"), tolerance_scale: 1.0, seed: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {} value={:.3e} tol={:.3e}", self.name, self.value, self.tolerance);
        if let Some(n) = &self.note {
            s.push_str(&format!(" ({n})"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub checks: Vec<CheckOutcome>,
    pub files: Vec<PathBuf>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn eval_err(e: crate::Error) -> ScenarioError {
    ScenarioError::Evaluation(e.to_string())
}

fn cfg_err(e: crate::Error) -> ScenarioError {
    ScenarioError::from(e)
}

/// Largest value, NaN as soon as one entry is not finite.
fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |acc, x| if acc.is_nan() || !x.is_finite() { f64::NAN } else { acc.max(x) })
}

/// Evaluates `check` with measured `value` against its scaled tolerance.
fn outcome(check: &CheckSpec, value: f64, scale: f64, note: Option<String>) -> CheckOutcome {
    let tolerance = check.tolerance() * scale;
    CheckOutcome { name: check.name(), value, tolerance, passed: value <= tolerance, note }
}

pub fn run(s: &Scenario, opts: &RunOptions) -> Result<Report, ScenarioError> {
    if !(opts.tolerance_scale > 0.0) {
        return Err(ScenarioError::Config(format!("tolerance-scale: must be positive, got {}", opts.tolerance_scale)));
    }
    let mut out = Outputs::new(&opts.out_dir);
    let checks = match &s.body {
        Body::Pointwise(b) => run_pointwise(b, opts, &mut out)?,
        Body::Field(b) if s.header.kind == Kind::Convergence => run_convergence(s, b, opts, &mut out)?,
        Body::Field(b) => run_residuals(s, b, opts, &mut out)?,
        Body::Reduction(b) => run_reduction(s, b, opts, &mut out)?,
    };
    Ok(Report { scenario: s.header.name.clone(), checks, files: out.files })
}

struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: vec![] }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), ScenarioError> {
        let path = self.dir.join(name);
        let io = |e: std::io::Error| ScenarioError::Io(format!("{}: {e}", path.display()));
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        std::fs::write(&path, contents).map_err(io)?;
        self.files.push(path);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<(), ScenarioError> {
        let mut text = serde_json::to_string_pretty(v).map_err(|e| ScenarioError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }
}

// pointwise simulation

fn reference_path(b: &PointwiseBody, init: &PointwiseState, tr: &Trajectory) -> Option<Vec<PointwiseState>> {
    match b.reference {
        Reference::None => None,
        Reference::Projectile => {
            let g = b.connection.constant_gravity()?;
            Some(tr.samples.iter().map(|s| projectile_reference(init, &g, s.t)).collect())
        }
        Reference::RotatingFree => {
            let w = b.connection.constant_omega()?;
            Some(tr.samples.iter().map(|s| rotating_free_reference(init, &w, s.t)).collect())
        }
    }
}

fn run_pointwise(b: &PointwiseBody, opts: &RunOptions, out: &mut Outputs) -> Result<Vec<CheckOutcome>, ScenarioError> {
    let conn = b.connection.build().map_err(cfg_err)?;
    let init = b.initial.build().map_err(cfg_err)?;
    let tr = run_scenario(&init, &conn, &b.integrator).map_err(eval_err)?;
    if let Some(name) = &b.outputs.trajectory {
        out.write(name, &tr.to_csv())?;
    }
    let l00 = init.l0();
    let mut res = vec![];
    for c in &b.checks {
        let value = match c {
            CheckSpec::Reference { .. } => {
                let r = reference_path(b, &init, &tr).ok_or_else(|| ScenarioError::Config("reference: missing".into()))?;
                tr.max_diff(&r)
            }
            CheckSpec::MassDrift { .. } => tr.samples.iter().map(|s| (s.m - init.m).abs()).fold(0.0, f64::max),
            CheckSpec::PositionDrift { .. } => tr.report.position_drift,
            CheckSpec::ProperSpinAxis { axis, .. } => {
                let a = Vector3::from(*axis);
                if !(a.norm() > 0.0) {
                    return Err(ScenarioError::Config("checks: proper_spin_axis needs a nonzero axis".into()));
                }
                let a = a.normalize();
                worst(tr.samples.iter().map(|s| (s.l0().dot(&a) - l00.dot(&a)).abs()))
            }
            CheckSpec::ProperSpinNorm { .. } => worst(tr.samples.iter().map(|s| (s.l0().norm() - l00.norm()).abs())),
            _ => unreachable!("validated"),
        };
        res.push(outcome(c, value, opts.tolerance_scale, None));
    }
    Ok(res)
}

// field residuals

/// Library objects built from a field scenario.
pub(crate) enum Prepared {
    Path(PointwisePath, FiniteDiff),
    Cauchy(CauchyField),
    Cosserat(Cosserat3DState),
    Rod(RodFields, Option<RodExprs>),
    Shell(ShellFields, Option<ShellExprs>),
}

impl Prepared {
    fn set_diff(&mut self, fd: FiniteDiff) {
        match self {
            Self::Path(_, d) => *d = fd,
            Self::Cauchy(f) => f.diff = fd,
            Self::Cosserat(f) => f.diff = fd,
            Self::Rod(f, _) => f.diff = fd,
            Self::Shell(f, _) => f.diff = fd,
        }
    }

    /// Displayed balance residual at `xi`.
    fn residual(&self, conn: &GalileanConnection, xi: &[f64]) -> crate::Result<BalanceResidual> {
        match self {
            Self::Path(p, fd) => residual_pointwise(p.as_ref(), conn, &OriginMotion::Observer, xi[0], fd),
            Self::Cauchy(f) => residual_cauchy(f, conn, xi),
            Self::Cosserat(f) => residual_3d_cosserat(f, conn, xi),
            Self::Rod(f, _) => Ok(residual_1d_terms(f, conn, xi)?.residual()),
            Self::Shell(f, _) => Ok(residual_2d(f, conn, xi)?.residual),
        }
    }

    /// Largest gap between the displayed and the general residuals, after
    /// the known form differences are removed.
    fn general_gap(&self, conn: &GalileanConnection, xi: &[f64]) -> crate::Result<f64> {
        let (a, b) = match self {
            Self::Path(p, fd) => (
                residual_pointwise(p.as_ref(), conn, &OriginMotion::Observer, xi[0], fd)?,
                residual_pointwise_general(p.as_ref(), conn, &OriginMotion::Observer, xi[0], fd)?,
            ),
            Self::Cauchy(f) => {
                let mut a = residual_cauchy(f, conn, xi)?;
                a.linear_momentum += f.at(xi).v * a.mass;
                (a, residual_cauchy_general(f, conn, xi)?)
            }
            Self::Cosserat(f) => (residual_3d_cosserat(f, conn, xi)?, residual_3d_cosserat_general(f, conn, xi)?),
            Self::Rod(f, _) => {
                let mut a = residual_1d_terms(f, conn, xi)?.residual();
                let x = f.curve.position(xi[0], xi[1]);
                a.linear_momentum += f.curve.v(xi[0], xi[1]) * a.mass;
                let q = (f.q)(xi);
                a.position_quantity += conn.omega(xi[0], &x).cross(&(q - x * (f.rho_l)(xi)));
                a.angular_momentum -= q.cross(&conn.g(xi[0], &x));
                (a, residual_1d_general(f, conn, xi)?)
            }
            Self::Shell(f, _) => (residual_2d(f, conn, xi)?.residual, residual_2d_general(f, conn, xi)?.residual),
        };
        Ok((a - b).max_abs())
    }
}

pub(crate) fn prepare_fields(s: &Scenario, b: &FieldBody) -> Result<(GalileanConnection, Prepared), ScenarioError> {
    let conn = b.connection.build().map_err(cfg_err)?;
    let base = s.base_dir.as_path();
    let fields = |e: serde_json::Error| ScenarioError::Config(format!("fields: {e}"));
    let v = b.fields.clone();
    let fd = b.diff.build().map_err(cfg_err)?;
    let mut p = match s.header.medium {
        Medium::D0 => {
            let spec: PathSpec = serde_json::from_value(v).map_err(fields)?;
            Prepared::Path(spec.build().map_err(cfg_err)?, fd)
        }
        Medium::D3Cauchy => {
            let spec: VolumeFieldsSpec = serde_json::from_value(v).map_err(fields)?;
            for (k, present) in [("q", spec.q.is_some()), ("l", spec.l.is_some()), ("l_star", spec.l_star.is_some()), ("m_star", spec.m_star.is_some())] {
                if present {
                    return Err(ScenarioError::Config(format!("fields.{k}: not a Cauchy field; use medium d3_cosserat")));
                }
            }
            Prepared::Cauchy(spec.cauchy(&b.connection, base).map_err(cfg_err)?)
        }
        Medium::D3Cosserat => {
            let spec: VolumeFieldsSpec = serde_json::from_value(v).map_err(fields)?;
            Prepared::Cosserat(spec.cosserat(&b.connection, base).map_err(cfg_err)?)
        }
        Medium::D1 => {
            let spec: RodFieldsSpec = serde_json::from_value(v).map_err(fields)?;
            let (f, ex) = spec.build(b.curve.as_ref(), &b.connection, base).map_err(cfg_err)?;
            Prepared::Rod(f, ex)
        }
        Medium::D2 => {
            let spec: ShellFieldsSpec = serde_json::from_value(v).map_err(fields)?;
            let (f, ex) = spec.build(b.surface.as_ref(), &b.connection, base).map_err(cfg_err)?;
            Prepared::Shell(f, ex)
        }
    };
    p.set_diff(fd);
    for c in &b.checks {
        let needs_exprs = match (&p, c) {
            (Prepared::Rod(_, None), CheckSpec::AngularTerms { .. }) => true,
            (Prepared::Shell(_, None), CheckSpec::OffPlaneReduction { .. }) => true,
            _ => false,
        };
        if needs_exprs {
            return Err(ScenarioError::Config(format!("checks: `{}` needs expression fields, not a preset", c.name())));
        }
    }
    if b.curve.is_some() && s.header.medium != Medium::D1 {
        return Err(ScenarioError::Config("curve: only d1 scenarios take a curve".into()));
    }
    if b.surface.is_some() && s.header.medium != Medium::D2 {
        return Err(ScenarioError::Config("surface: only d2 scenarios take a surface".into()));
    }
    Ok((conn, p))
}

fn chart_points(b: &FieldBody, medium: Medium, seed: Option<u64>) -> Result<Vec<Vec<f64>>, ScenarioError> {
    let mut pts = b.points.clone().unwrap_or_default();
    if let Some(g) = &b.grid {
        pts.extend(g.points(medium.chart_dim()).map_err(cfg_err)?);
    }
    if let Some(r) = &b.random_points {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.or(b.seed).unwrap_or(0));
        for _ in 0..r.count {
            pts.push(r.lower.iter().zip(&r.upper).map(|(lo, hi)| if hi > lo { rng.gen_range(*lo..*hi) } else { *lo }).collect());
        }
    }
    Ok(pts)
}

/// Rod angular terms against symbolic derivatives of the expression fields.
fn angular_terms_gap(f: &RodFields, ex: &RodExprs, conn: &GalileanConnection, xi: &[f64]) -> crate::Result<f64> {
    let terms = residual_1d_terms(f, conn, xi)?;
    let a = terms.angular;
    let ev = |e: &[crate::fields::Expr; 3]| Vector3::from_fn(|i, _| e[i].eval(xi));
    let d = |e: &[crate::fields::Expr; 3], k: usize| -> crate::Result<Vector3<f64>> {
        let mut v = Vector3::zeros();
        for i in 0..3 {
            v[i] = e[i].partial(k)?.eval(xi);
        }
        Ok(v)
    };
    let (t, s) = (xi[0], xi[1]);
    let n = f.curve.n(t, s)?;
    let omega = conn.omega(t, &f.curve.position(t, s));
    let dl_dt = d(&ex.l, 0)?;
    let omega_cross_l = omega.cross(&ev(&ex.l));
    let l_star_term = ev(&ex.l_star).cross(&omega.cross(&n));
    let dm_star_ds = d(&ex.m_star, 1)?;
    let n_cross_f = n.cross(&ev(&ex.force));
    let total = dl_dt + omega_cross_l + l_star_term + dm_star_ds - n_cross_f;
    Ok(worst([
        (a.dl_dt - dl_dt).amax(),
        (a.omega_cross_l - omega_cross_l).amax(),
        (a.l_star_term - l_star_term).amax(),
        (a.dm_star_ds - dm_star_ds).amax(),
        (a.n_cross_f - n_cross_f).amax(),
        (terms.residual().angular_momentum - total).amax(),
    ]))
}

/// General in-plane angular row against `ε_cb (N^{cb} − b^c_a M^{ab})`.
fn in_plane_gap(f: &ShellFields, conn: &GalileanConnection, xi: &[f64]) -> crate::Result<f64> {
    let r = residual_2d_general(f, conn, xi)?;
    let geo = f.shell.geometry(xi[0], [xi[1], xi[2]])?;
    let x: Matrix2<f64> = (f.n)(xi) - geo.b_mixed * (f.m)(xi);
    Ok((r.residual.angular_momentum[2] - (x[(0, 1)] - x[(1, 0)])).abs())
}

/// General off-plane angular rows against `M^{ab}|_a − Q^b`, with the
/// surface divergence from symbolic partials of `M`.
fn off_plane_gap(f: &ShellFields, ex: &ShellExprs, conn: &GalileanConnection, xi: &[f64]) -> crate::Result<f64> {
    let r = residual_2d_general(f, conn, xi)?;
    let geo = f.shell.geometry(xi[0], [xi[1], xi[2]])?;
    let g = christoffels_from_geometry(&geo, conn, xi[0]).gamma_abc;
    let m = Matrix2::from_fn(|a, b| ex.m[a][b].eval(xi));
    let q = Vector2::new(ex.q[0].eval(xi), ex.q[1].eval(xi));
    let mut gap: f64 = 0.0;
    for b in 0..2 {
        let mut div = 0.0;
        for a in 0..2 {
            div += ex.m[a][b].partial(a + 1)?.eval(xi);
            for c in 0..2 {
                div += g[a][a][c] * m[(c, b)] + g[b][a][c] * m[(a, c)];
            }
        }
        let e = (r.residual.angular_momentum[b] - (div - q[b])).abs();
        gap = if e.is_finite() && gap.is_finite() { gap.max(e) } else { f64::NAN };
    }
    Ok(gap)
}

fn residual_names(medium: Medium) -> Vec<String> {
    let mut h: Vec<String> = medium.coords().iter().map(|c| c.to_string()).collect();
    h.push("mass".into());
    for (p, n) in [("p", 3), ("q", 3), ("l", 3)] {
        for i in 1..=n {
            h.push(format!("{p}{i}"));
        }
    }
    h
}

fn run_residuals(s: &Scenario, b: &FieldBody, opts: &RunOptions, out: &mut Outputs) -> Result<Vec<CheckOutcome>, ScenarioError> {
    let (conn, p) = prepare_fields(s, b)?;
    let pts = chart_points(b, s.header.medium, opts.seed)?;
    let mut records = Vec::with_capacity(pts.len());
    let mut values = vec![0.0; b.checks.len()];
    for xi in &pts {
        let r = p.residual(&conn, xi).map_err(eval_err)?;
        for (c, v) in b.checks.iter().zip(values.iter_mut()) {
            let here = match (c, &p) {
                (CheckSpec::MaxResidual { .. }, _) => r.max_abs(),
                (CheckSpec::GeneralAgreement { .. }, _) => p.general_gap(&conn, xi).map_err(eval_err)?,
                (CheckSpec::AngularTerms { .. }, Prepared::Rod(f, Some(ex))) => angular_terms_gap(f, ex, &conn, xi).map_err(eval_err)?,
                (CheckSpec::Identities { .. }, Prepared::Shell(f, _)) => residual_2d_general(f, &conn, xi).map_err(eval_err)?.identities.max_abs(),
                (CheckSpec::InPlaneReduction { .. }, Prepared::Shell(f, _)) => in_plane_gap(f, &conn, xi).map_err(eval_err)?,
                (CheckSpec::OffPlaneReduction { .. }, Prepared::Shell(f, Some(ex))) => off_plane_gap(f, ex, &conn, xi).map_err(eval_err)?,
                _ => unreachable!("validated"),
            };
            *v = worst([*v, here]);
        }
        records.push(ResidualRecord::new(xi, &r));
    }
    if let Some(name) = &b.outputs.residuals {
        out.write_json(name, &records)?;
    }
    if let Some(name) = &b.outputs.residual_grid {
        let mut text = residual_names(s.header.medium).join(",");
        text.push('\n');
        for r in &records {
            let row: Vec<f64> = r.chart_point.iter().chain(&r.residual).copied().collect();
            text.push_str(&csv_row(&row));
            text.push('\n');
        }
        out.write(name, &text)?;
    }
    Ok(b.checks.iter().zip(values).map(|(c, v)| outcome(c, v, opts.tolerance_scale, None)).collect())
}

// convergence

fn run_convergence(s: &Scenario, b: &FieldBody, opts: &RunOptions, out: &mut Outputs) -> Result<Vec<CheckOutcome>, ScenarioError> {
    let (conn, mut p) = prepare_fields(s, b)?;
    let pts = chart_points(b, s.header.medium, opts.seed)?;
    let one_sided = b.diff.one_sided;
    let mut error = |h: f64| -> crate::Result<f64> {
        p.set_diff(FiniteDiff::with_step(h).one_sided(one_sided));
        let mut e: f64 = 0.0;
        for xi in &pts {
            let r = p.residual(&conn, xi)?;
            if !r.is_finite() {
                return Err(crate::Error::InvalidInput(format!("non-finite residual at {xi:?}")));
            }
            e = e.max(r.max_abs());
        }
        Ok(e)
    };
    let steps = b.steps.clone().unwrap_or_default();
    let errors: Vec<(f64, f64)> = steps.iter().map(|&h| error(h).map(|e| (h, e))).collect::<crate::Result<_>>().map_err(eval_err)?;
    let table = |h: f64| errors.iter().find(|(s, _)| *s == h).map(|(_, e)| *e);
    let report = convergence_check(|h| table(h).ok_or_else(|| crate::Error::InvalidInput("step".into())), &steps);
    if let Some(name) = &b.outputs.convergence {
        let mut text = String::from("h,error\n");
        for (h, e) in &errors {
            text.push_str(&csv_row(&[*h, *e]));
            text.push('\n');
        }
        out.write(name, &text)?;
    }
    let mut res = vec![];
    for c in &b.checks {
        res.push(match c {
            CheckSpec::Order { expected, .. } => match &report {
                Ok(r) => match r.order {
                    Some(o) => {
                        let mut oc = outcome(c, (o - expected).abs(), opts.tolerance_scale, None);
                        oc.note = Some(format!("observed order {o:.4}"));
                        oc
                    }
                    None => outcome(c, f64::NAN, opts.tolerance_scale, Some("errors at round-off floor".into())),
                },
                Err(e) => outcome(c, f64::NAN, opts.tolerance_scale, Some(e.to_string())),
            },
            CheckSpec::MaxError { step, .. } => {
                let e = match table(*step) {
                    Some(e) => e,
                    None => error(*step).map_err(eval_err)?,
                };
                outcome(c, e, opts.tolerance_scale, None)
            }
            _ => unreachable!("validated"),
        });
    }
    Ok(res)
}

// reduction

pub(crate) enum PreparedReduction {
    Rod(crate::reduction::CrossSection, SectionField),
    Shell(crate::reduction::ThicknessRule, ThicknessFieldsSpec),
}

pub(crate) fn prepare_reduction(s: &Scenario, b: &ReductionBody) -> Result<PreparedReduction, ScenarioError> {
    let fields = |e: serde_json::Error| ScenarioError::Config(format!("fields: {e}"));
    match s.header.medium {
        Medium::D1 => {
            if b.thickness.is_some() {
                return Err(ScenarioError::Config("thickness: d1 reductions take a section".into()));
            }
            let cs = b.section.as_ref().ok_or_else(|| ScenarioError::Config("section: missing".into()))?.build().map_err(cfg_err)?;
            let spec: SectionFieldsSpec = serde_json::from_value(b.fields.clone()).map_err(fields)?;
            Ok(PreparedReduction::Rod(cs, spec.build(&s.base_dir).map_err(cfg_err)?))
        }
        Medium::D2 => {
            if b.section.is_some() {
                return Err(ScenarioError::Config("section: d2 reductions take a thickness".into()));
            }
            let rule = b.thickness.as_ref().ok_or_else(|| ScenarioError::Config("thickness: missing".into()))?.build().map_err(cfg_err)?;
            let spec: ThicknessFieldsSpec = serde_json::from_value(b.fields.clone()).map_err(fields)?;
            let _ = spec.sigma().map_err(cfg_err)?;
            Ok(PreparedReduction::Shell(rule, spec))
        }
        _ => unreachable!("validated"),
    }
}

fn v3(v: &Vector3<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

fn run_reduction(s: &Scenario, b: &ReductionBody, opts: &RunOptions, out: &mut Outputs) -> Result<Vec<CheckOutcome>, ScenarioError> {
    let mut quantities: Vec<(&'static str, Vec<f64>)> = vec![];
    let mut routes = None;
    let mut dump = serde_json::Map::new();
    match prepare_reduction(s, b)? {
        PreparedReduction::Rod(cs, field) => {
            let f = |x: &Vector3<f64>| field(x);
            let t = reduce_3d_to_1d_t(f, &cs).map_err(eval_err)?;
            let j = reduce_3d_to_1d_j(f, &cs).map_err(eval_err)?;
            let fm = t.force_mass;
            quantities = vec![
                ("area", vec![cs.area()]),
                ("rho_l", vec![fm.rho_l]),
                ("v", v3(&fm.v)),
                ("v_t", vec![fm.v_t]),
                ("force", v3(&fm.f)),
                ("static_force", v3(&t.static_force)),
                ("dynamic_force", v3(&t.dynamic_force)),
                ("q", v3(&j.q)),
                ("l", v3(&j.l)),
                ("l_star", v3(&j.l_star)),
                ("m_star", v3(&j.m_star)),
                ("mass_centre", v3(&j.mass_centre)),
            ];
            let dual = ForceMass1D::from_t_matrix(&t.t).map_err(eval_err)?;
            routes = Some(worst([
                (dual.rho_l - fm.rho_l).abs(),
                (dual.v - fm.v).amax(),
                (dual.v_t - fm.v_t).abs(),
                (dual.f - fm.f).amax(),
            ]));
            dump.insert("t".into(), json!(t.t.transpose().iter().copied().collect::<Vec<f64>>()));
        }
        PreparedReduction::Shell(rule, spec) => {
            let sigma = spec.sigma().map_err(cfg_err)?;
            let r = reduce_3d_to_2d(sigma, spec.rho, &rule);
            quantities = vec![("rho_s", vec![r.rho_s]), ("n", mat2(r.n)), ("q", vec2(r.q)), ("m", mat2(r.m))];
            dump.insert("thickness".into(), json!(r.thickness));
        }
    }
    for (k, v) in &quantities {
        dump.insert((*k).into(), json!(v));
    }
    let mut res = vec![];
    for c in &b.checks {
        res.push(match c {
            CheckSpec::Value { quantity, expected, relative, .. } => {
                let got = quantities.iter().find(|(k, _)| k == quantity).map(|(_, v)| v).ok_or_else(|| {
                    let known: Vec<&str> = quantities.iter().map(|(k, _)| *k).collect();
                    ScenarioError::Config(format!("checks: unknown quantity `{quantity}`; known: {}", known.join(", ")))
                })?;
                let want = expected.values().map_err(cfg_err)?;
                if want.len() != got.len() {
                    return Err(ScenarioError::Config(format!("checks: `{quantity}` has {} components, expected value has {}", got.len(), want.len())));
                }
                let abs = worst(got.iter().zip(&want).map(|(g, w)| (g - w).abs()));
                let value = if *relative { abs / worst(want.iter().map(|w| w.abs())) } else { abs };
                outcome(c, value, opts.tolerance_scale, None)
            }
            CheckSpec::ForceRoutes { .. } => outcome(c, routes.unwrap_or(f64::NAN), opts.tolerance_scale, None),
            _ => unreachable!("validated"),
        });
    }
    if let Some(name) = &b.outputs.reduced {
        out.write_json(name, &Value::Object(dump))?;
    }
    Ok(res)
}
