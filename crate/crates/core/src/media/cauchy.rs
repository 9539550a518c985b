use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3};

use super::{field, Field, MediumField};
use crate::algebra::levi_civita;
use crate::diff::{Domain, FiniteDiff};

/// Stress-mass tensor `[[ρ, ρvᵀ], [ρv, ρvvᵀ − σ]]`. Only the upper triangle
/// of `σ` is read, so the result is exactly symmetric.
pub fn assemble_cauchy_t(rho: f64, v: &Vector3<f64>, sigma: &Matrix3<f64>) -> Matrix4<f64> {
    let mut t = Matrix4::zeros();
    t[(0, 0)] = rho;
    for i in 0..3 {
        t[(0, i + 1)] = rho * v[i];
        t[(i + 1, 0)] = rho * v[i];
        for j in i..3 {
            let x = rho * v[i] * v[j] - sigma[(i, j)];
            t[(i + 1, j + 1)] = x;
            t[(j + 1, i + 1)] = x;
        }
    }
    t
}

/// Density, velocity and Cauchy stress at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchySample {
    pub rho: f64,
    pub v: Vector3<f64>,
    pub sigma: Matrix3<f64>,
}

impl CauchySample {
    pub fn stress_mass(&self) -> Matrix4<f64> {
        assemble_cauchy_t(self.rho, &self.v, &self.sigma)
    }
}

/// Cauchy medium over `(t, x¹, x², x³)` with the identity embedding.
#[derive(Clone)]
pub struct CauchyField {
    pub sample: Field<CauchySample>,
    pub domain: Option<Domain>,
    pub diff: FiniteDiff,
}

impl CauchyField {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> CauchySample + Send + Sync + 'static,
    {
        Self { sample: field(f), domain: None, diff: FiniteDiff::default() }
    }

    pub fn with_diff(mut self, diff: FiniteDiff) -> Self {
        self.diff = diff;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn at(&self, xi: &[f64]) -> CauchySample {
        (self.sample)(xi)
    }

    /// General field bundle with `^γT^β = T^{βγ}` and `J ≡ 0`.
    pub fn to_medium_field(&self) -> MediumField {
        let s = self.sample.clone();
        let t = field(move |xi: &[f64]| {
            let m = s(xi).stress_mass();
            DMatrix::from_fn(4, 4, |g, b| m[(b, g)])
        });
        let j = field(|_: &[f64]| vec![Matrix4::zeros(); 4]);
        let mut m = MediumField::identity_embedding(t, j).with_diff(self.diff);
        if let Some(d) = &self.domain {
            m = m.with_domain(d.clone());
        }
        m
    }
}

/// 3D Cosserat medium: stress-mass `T^{βγ}` plus the angular components
/// `q`, `l`, `l⋆`, `M⋆` over `(t, x¹, x², x³)`.
#[derive(Clone)]
pub struct Cosserat3DState {
    pub stress_mass: Field<Matrix4<f64>>,
    pub q: Field<Vector3<f64>>,
    pub l: Field<Vector3<f64>>,
    pub l_star: Field<Matrix3<f64>>,
    pub m_star: Field<Matrix3<f64>>,
    pub domain: Option<Domain>,
    pub diff: FiniteDiff,
}

impl Cosserat3DState {
    /// Cauchy medium seen as a Cosserat one: all angular fields zero.
    pub fn from_cauchy(c: &CauchyField) -> Self {
        let s = c.sample.clone();
        Self {
            stress_mass: field(move |xi: &[f64]| s(xi).stress_mass()),
            q: field(|_: &[f64]| Vector3::zeros()),
            l: field(|_: &[f64]| Vector3::zeros()),
            l_star: field(|_: &[f64]| Matrix3::zeros()),
            m_star: field(|_: &[f64]| Matrix3::zeros()),
            domain: c.domain.clone(),
            diff: c.diff,
        }
    }

    /// Slabs `J^{αβγ}` for `γ = 0..4`, built from the engineer components.
    pub fn j_slabs(&self, xi: &[f64]) -> Vec<Matrix4<f64>> {
        let q = (self.q)(xi);
        let l = (self.l)(xi);
        let ls = (self.l_star)(xi);
        let ms = (self.m_star)(xi);
        let mut slabs = vec![Matrix4::zeros(); 4];
        for (g, slab) in slabs.iter_mut().enumerate() {
            for i in 0..3 {
                let time = if g == 0 { q[i] } else { ls[(i, g - 1)] };
                slab[(i + 1, 0)] = time;
                slab[(0, i + 1)] = -time;
                for j in 0..3 {
                    let mut s = 0.0;
                    for k in 0..3 {
                        let e = levi_civita(i, j, k);
                        if e != 0.0 {
                            s += e * if g == 0 { l[k] } else { ms[(k, g - 1)] };
                        }
                    }
                    slab[(i + 1, j + 1)] = s;
                }
            }
        }
        slabs
    }

    pub fn to_medium_field(&self) -> MediumField {
        let t = self.stress_mass.clone();
        let tf = field(move |xi: &[f64]| {
            let m = t(xi);
            DMatrix::from_fn(4, 4, |g, b| m[(b, g)])
        });
        let me = self.clone();
        let jf = field(move |xi: &[f64]| me.j_slabs(xi));
        let mut m = MediumField::identity_embedding(tf, jf).with_diff(self.diff);
        if let Some(d) = &self.domain {
            m = m.with_domain(d.clone());
        }
        m
    }
}
