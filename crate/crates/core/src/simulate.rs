//! Time integration of pointwise-object dynamics and the convergence harness
//! for residual evaluators.

use std::io::Write;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::affine::PointwiseTorsor;
use crate::algebra::rotation_exp;
use crate::connection::GalileanConnection;
use crate::error::{Error, Result};
use crate::format::csv_row;

pub const TRAJECTORY_HEADER: &str = "t,m,x1,x2,x3,p1,p2,p3,q1,q2,q3,l1,l2,l3";

/// State of a pointwise object. The proper angular momentum is the derived
/// part `l₀ = l − x × p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseState {
    pub t: f64,
    pub m: f64,
    pub x: Vector3<f64>,
    pub p: Vector3<f64>,
    pub q: Vector3<f64>,
    pub l: Vector3<f64>,
}

impl PointwiseState {
    /// Consistent state from position, velocity and spin.
    pub fn new(t: f64, m: f64, x: Vector3<f64>, v: Vector3<f64>, l0: Vector3<f64>) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::NonpositiveMass { mass: m });
        }
        let p = v * m;
        Ok(Self { t, m, x, p, q: x * m, l: l0 + x.cross(&p) })
    }

    pub fn velocity(&self) -> Vector3<f64> {
        self.p / self.m
    }

    pub fn l0(&self) -> Vector3<f64> {
        self.l - self.x.cross(&self.p)
    }

    pub fn torsor(&self) -> PointwiseTorsor {
        PointwiseTorsor { m: self.m, p: self.p, q: self.q, l: self.l }
    }

    pub fn to_row(&self) -> [f64; 14] {
        let mut r = [0.0; 14];
        r[0] = self.t;
        r[1] = self.m;
        for i in 0..3 {
            r[2 + i] = self.x[i];
            r[5 + i] = self.p[i];
            r[8 + i] = self.q[i];
            r[11 + i] = self.l[i];
        }
        r
    }

    /// Largest component difference in `x`, `p`, `q`, `l`.
    pub fn max_diff(&self, o: &Self) -> f64 {
        [(self.x - o.x).amax(), (self.p - o.p).amax(), (self.q - o.q).amax(), (self.l - o.l).amax()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub stride: usize,
}

fn one() -> usize {
    1
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, stride: usize) -> Result<Self> {
        let c = Self { dt, t_end, stride };
        c.steps()?;
        Ok(c)
    }

    /// Number of fixed steps; `t_end` must be a whole multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidInput(format!("integrator.dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidInput(format!("integrator.t_end must be non-negative, got {}", self.t_end)));
        }
        if self.stride == 0 {
            return Err(Error::InvalidInput("integrator.stride must be at least 1".into()));
        }
        let n = (self.t_end / self.dt).round();
        if (n * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(self.dt) {
            return Err(Error::InvalidInput(format!(
                "integrator.t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(n as usize)
    }
}

type Deriv = [Vector3<f64>; 4];

fn rhs(conn: &GalileanConnection, m: f64, t: f64, y: &Deriv) -> Deriv {
    let [x, p, _, l] = *y;
    let v = p / m;
    let force = conn.acceleration(t, &x, &v) * m;
    let l0 = l - x.cross(&p);
    [v, force, p, x.cross(&force) - conn.omega(t, &x).cross(&l0)]
}

fn axpy(y: &Deriv, k: &Deriv, h: f64) -> Deriv {
    std::array::from_fn(|i| y[i] + k[i] * h)
}

/// One RK4 step of `ẋ = p/m`, `ṗ = m(g − 2Ω×v)`, `q̇ = p`,
/// `l̇ = x × m(g − 2Ω×v) − Ω × l₀`; the mass is copied unchanged.
pub fn step(s: &PointwiseState, conn: &GalileanConnection, dt: f64) -> Result<PointwiseState> {
    if !(s.m > 0.0) {
        return Err(Error::NonpositiveMass { mass: s.m });
    }
    let y = [s.x, s.p, s.q, s.l];
    let k1 = rhs(conn, s.m, s.t, &y);
    let k2 = rhs(conn, s.m, s.t + 0.5 * dt, &axpy(&y, &k1, 0.5 * dt));
    let k3 = rhs(conn, s.m, s.t + 0.5 * dt, &axpy(&y, &k2, 0.5 * dt));
    let k4 = rhs(conn, s.m, s.t + dt, &axpy(&y, &k3, dt));
    let n: Deriv = std::array::from_fn(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0));
    Ok(PointwiseState { t: s.t + dt, m: s.m, x: n[0], p: n[1], q: n[2], l: n[3] })
}

/// End-of-run conservation figures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `m(t_end) − m(0)`.
    pub mass_drift: f64,
    /// `max |q − m x|` over all steps.
    pub position_drift: f64,
    /// `|l₀(t_end) − l₀(0)|`.
    pub proper_spin_change: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<PointwiseState>,
    pub report: ConservationReport,
}

impl Trajectory {
    pub fn last(&self) -> &PointwiseState {
        self.samples.last().expect("a trajectory holds at least the initial state")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        for s in &self.samples {
            writeln!(w, "{}", csv_row(&s.to_row()))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    /// Largest state difference over samples taken at the same times.
    pub fn max_diff(&self, other: &[PointwiseState]) -> f64 {
        self.samples.iter().zip(other).map(|(a, b)| a.max_diff(b)).fold(0.0, f64::max)
    }
}

/// Fixed-step integration, sampling every `stride` steps and at the end.
pub fn run_scenario(init: &PointwiseState, conn: &GalileanConnection, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let n = cfg.steps()?;
    let mut s = *init;
    let mut samples = vec![s];
    let mut position_drift = (s.q - s.x * s.m).amax();
    for k in 1..=n {
        s = step(&s, conn, cfg.dt)?;
        s.t = init.t + k as f64 * cfg.dt;
        position_drift = position_drift.max((s.q - s.x * s.m).amax());
        if k % cfg.stride == 0 || k == n {
            samples.push(s);
        }
    }
    let report = ConservationReport {
        mass_drift: s.m - init.m,
        position_drift,
        proper_spin_change: (s.l0() - init.l0()).norm(),
    };
    Ok(Trajectory { samples, report })
}

/// Exact state under constant gravity without spin, `τ = t − t₀`.
pub fn projectile_reference(init: &PointwiseState, g: &Vector3<f64>, t: f64) -> PointwiseState {
    let tau = t - init.t;
    let v0 = init.velocity();
    let x = init.x + v0 * tau + g * (0.5 * tau * tau);
    let p = (v0 + g * tau) * init.m;
    PointwiseState { t, m: init.m, x, p, q: x * init.m, l: init.l0() + x.cross(&p) }
}

/// Force-free motion seen from a frame spinning at constant `Ω` about the
/// origin: `x = R(−Ωτ)(x₀ + Vτ)` with `V = v₀ + Ω × x₀`, and `l₀` carried
/// by the same rotation.
pub fn rotating_free_reference(init: &PointwiseState, omega: &Vector3<f64>, t: f64) -> PointwiseState {
    let tau = t - init.t;
    let r = rotation_exp(omega, -tau);
    let big_v = init.velocity() + omega.cross(&init.x);
    let x = r * (init.x + big_v * tau);
    let p = (r * big_v - omega.cross(&x)) * init.m;
    PointwiseState { t, m: init.m, x, p, q: x * init.m, l: r * init.l0() + x.cross(&p) }
}

/// Observed order of a family of errors against step sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln e` against `ln h`; `None` at the floor.
    pub order: Option<f64>,
    /// Every error is below [`ROUNDOFF_FLOOR`].
    pub at_floor: bool,
}

pub const ROUNDOFF_FLOOR: f64 = 1e-10;

/// Evaluates `error(h)` for each step and fits the observed order.
pub fn convergence_check<F: Fn(f64) -> Result<f64>>(error: F, steps: &[f64]) -> Result<ConvergenceReport> {
    if steps.len() < 3 {
        return Err(Error::InvalidInput(format!("convergence needs at least 3 step sizes, got {}", steps.len())));
    }
    let mut pairs: Vec<(f64, f64)> = steps.iter().map(|&h| error(h).map(|e| (h, e))).collect::<Result<_>>()?;
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (steps, errors): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    if errors.iter().all(|e| *e < ROUNDOFF_FLOOR) {
        return Ok(ConvergenceReport { steps, errors, order: None, at_floor: true });
    }
    if errors.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::NonMonotone { steps, errors });
    }
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ConvergenceReport { steps, errors, order: Some(sxy / sxx), at_floor: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_motion_is_linear() {
        let s = PointwiseState::new(0.0, 2.0, Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.5, -1.0, 2.0), Vector3::new(0.0, 0.1, 0.0)).unwrap();
        let tr = run_scenario(&s, &GalileanConnection::flat(), &IntegratorConfig::new(0.01, 1.0, 10).unwrap()).unwrap();
        let e = tr.last();
        assert!((e.x - Vector3::new(1.5, -1.0, 2.0)).norm() < 1e-13);
        assert_eq!(tr.samples.len(), 11);
        assert_eq!(tr.report.mass_drift, 0.0);
    }

    #[test]
    fn projectile_is_exact() {
        let g = Vector3::new(0.0, 0.0, -9.81);
        let (x0, v0) = (Vector3::new(0.0, 0.0, 1.0), Vector3::new(3.0, 1.0, 5.0));
        let s = PointwiseState::new(0.0, 0.7, x0, v0, Vector3::zeros()).unwrap();
        let tr = run_scenario(&s, &GalileanConnection::uniform(g, Vector3::zeros()), &IntegratorConfig::new(1e-3, 1.0, 1000).unwrap()).unwrap();
        let e = tr.last();
        assert!((e.x - (x0 + v0 + g * 0.5)).norm() < 1e-12);
        assert!(tr.report.position_drift < 1e-10);
        assert!(tr.report.proper_spin_change < 1e-10);
    }

    #[test]
    fn rotating_frame_matches_inertial_line() {
        let omega = Vector3::z();
        let conn = GalileanConnection::rotating(omega, Vector3::zeros());
        let (m, x0, v_in, l0) = (1.3, Vector3::new(1.0, 0.5, -0.2), Vector3::new(0.2, 0.7, 0.1), Vector3::new(0.3, 0.0, 0.2));
        let s = PointwiseState::new(0.0, m, x0, v_in - omega.cross(&x0), l0).unwrap();
        let tr = run_scenario(&s, &conn, &IntegratorConfig::new(1e-4, 1.0, 10000).unwrap()).unwrap();
        let e = tr.last();
        let r = rotation_exp(&omega, -1.0);
        let x = r * (x0 + v_in);
        let v = r * v_in - omega.cross(&x);
        assert!((e.x - x).norm() < 1e-8);
        assert!((e.p - v * m).norm() < 1e-8);
        assert!((e.l - (r * l0 + x.cross(&(v * m)))).norm() < 1e-8);
        assert!(e.max_diff(&rotating_free_reference(&s, &omega, 1.0)) < 1e-8);
    }

    #[test]
    fn csv_header_and_rows() {
        let s = PointwiseState::new(0.0, 1.0, Vector3::zeros(), Vector3::x(), Vector3::zeros()).unwrap();
        let tr = run_scenario(&s, &GalileanConnection::flat(), &IntegratorConfig::new(0.5, 1.0, 1).unwrap()).unwrap();
        let csv = tr.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert_eq!(lines[2], "0.5,1,0.5,0,0,1,0,0,0.5,0,0,0,0,0");
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 1.0, 1).is_err());
        assert!(IntegratorConfig::new(0.3, 1.0, 1).is_err());
        assert_eq!(IntegratorConfig::new(1e-4, 1.0, 1).unwrap().steps().unwrap(), 10000);
    }

    #[test]
    fn convergence_slopes() {
        let r = convergence_check(|h| Ok(3.0 * h * h), &[0.1, 0.05, 0.025]).unwrap();
        assert!((r.order.unwrap() - 2.0).abs() < 1e-12);
        let floor = convergence_check(|_| Ok(1e-14), &[0.1, 0.05, 0.025]).unwrap();
        assert!(floor.at_floor && floor.order.is_none());
        let bad = convergence_check(|h| Ok(1.0 / h), &[0.1, 0.05, 0.025]);
        assert!(matches!(bad, Err(Error::NonMonotone { .. })));
    }
}
