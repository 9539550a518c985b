//! Analytic and tabulated field specifications: expression strings over
//! named chart coordinates, and scalar samples on regular grids.

use std::path::Path;
use std::sync::Arc;

use exmex::prelude::*;
use exmex::Differentiate;
use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{field, Field};

/// Coordinate names of each chart.
pub const SPACETIME: [&str; 4] = ["t", "x1", "x2", "x3"];
pub const ROD: [&str; 2] = ["t", "s"];
pub const SURFACE: [&str; 3] = ["t", "th1", "th2"];
pub const TIME: [&str; 1] = ["t"];
pub const THICKNESS: [&str; 1] = ["th3"];

/// Compiled expression over a fixed list of chart coordinates.
#[derive(Clone)]
pub struct Expr {
    source: String,
    ex: Option<Arc<FlatEx<f64>>>,
    constant: f64,
    /// Position of each expression variable in the chart point.
    slots: Vec<usize>,
    coords: Vec<String>,
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Expr({:?})", self.source)
    }
}

impl Expr {
    /// Parses `source`; number literals may use exponent notation.
    pub fn parse(source: &str, coords: &[&str]) -> Result<Self> {
        let expanded = expand_exponents(source);
        let ex = exmex::parse::<f64>(&expanded).map_err(|e| Error::InvalidInput(format!("cannot parse `{source}`: {e}")))?;
        let slots = ex
            .var_names()
            .iter()
            .map(|v| {
                coords.iter().position(|c| c == v).ok_or_else(|| {
                    Error::InvalidInput(format!("`{source}` uses `{v}`; available coordinates are {}", coords.join(", ")))
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { source: source.into(), ex: Some(Arc::new(ex)), constant: 0.0, slots, coords: coords.iter().map(|c| c.to_string()).collect() })
    }

    pub fn constant(value: f64, coords: &[&str]) -> Self {
        Self { source: crate::format::g17(value), ex: None, constant: value, slots: vec![], coords: coords.iter().map(|c| c.to_string()).collect() }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Value at `point`; NaN when the expression cannot be evaluated.
    pub fn eval(&self, point: &[f64]) -> f64 {
        let Some(ex) = &self.ex else { return self.constant };
        let args: Vec<f64> = self.slots.iter().map(|&i| point[i]).collect();
        ex.eval(&args).unwrap_or(f64::NAN)
    }

    /// Symbolic derivative along chart coordinate `k`.
    pub fn partial(&self, k: usize) -> Result<Expr> {
        let coords: Vec<&str> = self.coords.iter().map(String::as_str).collect();
        let (Some(ex), Some(var)) = (&self.ex, self.slots.iter().position(|&s| s == k)) else {
            return Ok(Self::constant(0.0, &coords));
        };
        let d = (**ex).clone().partial(var).map_err(|e| Error::InvalidInput(format!("cannot differentiate `{}`: {e}", self.source)))?;
        Ok(Self { source: format!("d({})/d{}", self.source, self.coords[k]), ex: Some(Arc::new(d)), constant: 0.0, slots: self.slots.clone(), coords: self.coords.clone() })
    }
}

fn expand_exponents(s: &str) -> String {
    use std::sync::OnceLock;
    static RE: OnceLock<exmex::regex::Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        exmex::regex::Regex::new(r"(^|[^A-Za-z_0-9.])([0-9]+\.?[0-9]*|\.[0-9]+)[eE]([+-]?[0-9]+)").expect("valid pattern")
    });
    re.replace_all(s, "${1}(${2}*10^(${3}))").into_owned()
}

/// A number or an expression string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Component {
    Number(f64),
    Expr(String),
}

impl Component {
    pub fn compile(&self, coords: &[&str]) -> Result<Expr> {
        match self {
            Self::Number(x) => Ok(Expr::constant(*x, coords)),
            Self::Expr(s) => Expr::parse(s, coords),
        }
    }
}

/// Scalar field: a number, an expression, or a CSV grid file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Component(Component),
    Grid { grid: String },
}

impl From<f64> for ScalarSpec {
    fn from(x: f64) -> Self {
        Self::Component(Component::Number(x))
    }
}

fn with_key<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{key}: {m}")),
        other => other,
    })
}

/// Compiles a scalar field; `base` resolves relative grid paths.
pub fn scalar_field(key: &str, spec: &ScalarSpec, coords: &[&str], base: &Path) -> Result<Field<f64>> {
    with_key(key, match spec {
        ScalarSpec::Component(c) => c.compile(coords).map(|e| field(move |p: &[f64]| e.eval(p))),
        ScalarSpec::Grid { grid } => GridField::load(&base.join(grid), coords).map(|g| field(move |p: &[f64]| g.eval(p))),
    })
}

fn compile_all(key: &str, cs: &[Component], coords: &[&str]) -> Result<Vec<Expr>> {
    with_key(key, cs.iter().map(|c| c.compile(coords)).collect())
}

pub fn vector3_field(key: &str, spec: &[Component; 3], coords: &[&str]) -> Result<Field<Vector3<f64>>> {
    let e = compile_all(key, spec, coords)?;
    Ok(field(move |p: &[f64]| Vector3::new(e[0].eval(p), e[1].eval(p), e[2].eval(p))))
}

pub fn vector2_field(key: &str, spec: &[Component; 2], coords: &[&str]) -> Result<Field<Vector2<f64>>> {
    let e = compile_all(key, spec, coords)?;
    Ok(field(move |p: &[f64]| Vector2::new(e[0].eval(p), e[1].eval(p))))
}

pub fn matrix3_field(key: &str, spec: &[[Component; 3]; 3], coords: &[&str]) -> Result<Field<Matrix3<f64>>> {
    let flat: Vec<Component> = spec.iter().flatten().cloned().collect();
    let e = compile_all(key, &flat, coords)?;
    Ok(field(move |p: &[f64]| Matrix3::from_fn(|i, j| e[3 * i + j].eval(p))))
}

pub fn matrix2_field(key: &str, spec: &[[Component; 2]; 2], coords: &[&str]) -> Result<Field<Matrix2<f64>>> {
    let flat: Vec<Component> = spec.iter().flatten().cloned().collect();
    let e = compile_all(key, &flat, coords)?;
    Ok(field(move |p: &[f64]| Matrix2::from_fn(|i, j| e[2 * i + j].eval(p))))
}

/// Scalar samples on a regular tensor grid, interpolated by cubic Lagrange
/// polynomials through the four nearest nodes along each axis.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    axes: Vec<Vec<f64>>,
    /// Chart slot of each grid axis.
    slots: Vec<usize>,
    values: Vec<f64>,
}

impl GridField {
    /// Reads a CSV whose header names chart coordinates plus a `value`
    /// column. Coordinates missing from the header are ignored.
    pub fn load(path: &Path, coords: &[&str]) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::InvalidInput(format!("grid {}: {e}", path.display())))?;
        let headers = rdr.headers().map_err(|e| Error::InvalidInput(format!("grid {}: {e}", path.display())))?.clone();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::InvalidInput(format!("grid {}: {e}", path.display())))?;
            let row: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidInput(format!("grid {}: {e}", path.display())))?;
            rows.push(row);
        }
        let names: Vec<&str> = headers.iter().map(str::trim).collect();
        Self::from_rows(&names, &rows, coords).map_err(|e| match e {
            Error::InvalidInput(m) => Error::InvalidInput(format!("grid {}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_rows(names: &[&str], rows: &[Vec<f64>], coords: &[&str]) -> Result<Self> {
        let vcol = names.iter().position(|n| *n == "value").ok_or_else(|| Error::InvalidInput("missing `value` column".into()))?;
        let mut cols = Vec::new();
        let mut slots = Vec::new();
        for (i, n) in names.iter().enumerate() {
            if i == vcol {
                continue;
            }
            let slot = coords.iter().position(|c| c == n).ok_or_else(|| Error::InvalidInput(format!("unknown coordinate column `{n}`")))?;
            cols.push(i);
            slots.push(slot);
        }
        let mut axes: Vec<Vec<f64>> = cols
            .iter()
            .map(|&c| {
                let mut v: Vec<f64> = rows.iter().map(|r| r[c]).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            })
            .collect();
        for (a, n) in axes.iter().zip(&cols) {
            if a.len() < 4 {
                return Err(Error::InvalidInput(format!("axis `{}` needs at least 4 nodes", names[*n])));
            }
        }
        let total: usize = axes.iter().map(Vec::len).product();
        if total != rows.len() {
            return Err(Error::InvalidInput(format!("{} rows do not fill a {total}-node tensor grid", rows.len())));
        }
        let mut values = vec![f64::NAN; total];
        for r in rows {
            let idx = Self::flat_index(&axes, &cols.iter().map(|&c| r[c]).collect::<Vec<_>>());
            values[idx] = r[vcol];
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput("duplicate grid nodes".into()));
        }
        axes.shrink_to_fit();
        Ok(Self { axes, slots, values })
    }

    fn flat_index(axes: &[Vec<f64>], at: &[f64]) -> usize {
        axes.iter().zip(at).fold(0, |acc, (a, x)| acc * a.len() + a.partition_point(|v| v < x))
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut stencil: Vec<([usize; 4], [f64; 4])> = Vec::with_capacity(self.axes.len());
        for (a, &slot) in self.axes.iter().zip(&self.slots) {
            let x = point[slot];
            let i = a.partition_point(|v| *v <= x).saturating_sub(2).min(a.len() - 4);
            let nodes = [i, i + 1, i + 2, i + 3];
            let w = std::array::from_fn(|k| {
                nodes.iter().enumerate().filter(|(m, _)| *m != k).map(|(_, &j)| (x - a[j]) / (a[nodes[k]] - a[j])).product()
            });
            stencil.push((nodes, w));
        }
        let dims: Vec<usize> = self.axes.iter().map(Vec::len).collect();
        let n = stencil.len();
        let mut sum = 0.0;
        for combo in 0..4usize.pow(n as u32) {
            let (mut idx, mut weight, mut c) = (0, 1.0, combo);
            for d in 0..n {
                let k = c % 4;
                c /= 4;
                idx = idx * dims[d] + stencil[d].0[k];
                weight *= stencil[d].1[k];
            }
            sum += weight * self.values[idx];
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_variable_mapping() {
        let e = Expr::parse("x3 * t + sin(x1)", &SPACETIME).unwrap();
        assert!((e.eval(&[2.0, 0.5, 9.0, 3.0]) - (6.0 + 0.5f64.sin())).abs() < 1e-15);
        assert!(Expr::parse("y + 1", &ROD).is_err());
    }

    #[test]
    fn exponent_literals() {
        let e = Expr::parse("2.5e-3*t + 1E2 + x1e", &["t", "x1e"]).unwrap();
        assert!((e.eval(&[2.0, 1.0]) - 101.005).abs() < 1e-12);
    }

    #[test]
    fn symbolic_partial() {
        let e = Expr::parse("s^2 * exp(t)", &ROD).unwrap();
        assert!((e.partial(1).unwrap().eval(&[0.0, 3.0]) - 6.0).abs() < 1e-14);
        assert_eq!(Expr::parse("t", &ROD).unwrap().partial(1).unwrap().eval(&[1.0, 1.0]), 0.0);
    }

    #[test]
    fn untagged_components() {
        let v: [Component; 3] = serde_json::from_str(r#"[1.5, "t", "2*x1"]"#).unwrap();
        let f = vector3_field("v", &v, &SPACETIME).unwrap();
        assert_eq!(f(&[3.0, 4.0, 0.0, 0.0]), Vector3::new(1.5, 3.0, 8.0));
        let bad = vector3_field("v", &[Component::Expr("q".into()), Component::Number(0.0), Component::Number(0.0)], &SPACETIME);
        assert!(matches!(bad, Err(Error::InvalidInput(m)) if m.starts_with("v:")));
    }

    #[test]
    fn grid_reproduces_cubics() {
        let f = |t: f64, s: f64| 1.0 + t * s - 2.0 * s * s * s + t * t;
        let mut rows = Vec::new();
        for i in 0..6 {
            for j in 0..7 {
                let (t, s) = (0.2 * i as f64, -1.0 + 0.3 * j as f64);
                rows.push(vec![s, t, f(t, s)]);
            }
        }
        let g = GridField::from_rows(&["s", "t", "value"], &rows, &ROD).unwrap();
        for (t, s) in [(0.13, 0.05), (0.9, -0.77), (0.0, 0.8)] {
            assert!((g.eval(&[t, s]) - f(t, s)).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_rejects_ragged() {
        let rows = vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 1.0]];
        assert!(GridField::from_rows(&["t", "value"], &rows, &TIME).is_err());
    }
}
