//! Field bundles for media of dimension 0 to 3: embeddings, tangent maps and
//! torsor components over a chart of the matter manifold.

mod cauchy;
mod curve;
pub(crate) mod shell;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix4, Vector4};

pub use cauchy::{assemble_cauchy_t, CauchyField, CauchySample, Cosserat3DState};
pub use curve::{
    projector_1d, tangent_map_1d, ClosureCurve, Curve, Curve1D, ForceMass1D, Helix, LagrangianCurve,
    RotatingRing, SpinningRing, StraightRod,
};
pub use shell::{
    shell_christoffels, ClosureSurface, Cylinder, Plane, RigidlyMoving, ShellChristoffels, ShellField, Sphere,
    Surface, SurfaceGeometry,
};

use crate::diff::{Domain, FiniteDiff};
use crate::error::{Error, Result};

/// Closure over chart coordinates.
pub type Field<T> = Arc<dyn Fn(&[f64]) -> T + Send + Sync>;

/// Wraps a closure as a shared [`Field`].
pub fn field<T, F>(f: F) -> Field<T>
where
    F: Fn(&[f64]) -> T + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Medium of dimension `d` described over a chart `ξ = (t, ξ¹..ξᵈ)`.
///
/// `torsor_t` returns the `(d+1)×4` array `^γT^β` (row `γ` is the material
/// index) and `torsor_j` returns `d+1` skew matrices `^γJ^{αβ}`.
#[derive(Clone)]
pub struct MediumField {
    dim: usize,
    embedding: Field<Vector4<f64>>,
    tangent_map: Option<Field<DMatrix<f64>>>,
    torsor_t: Field<DMatrix<f64>>,
    torsor_j: Field<Vec<Matrix4<f64>>>,
    divergence_t: Option<Field<Vector4<f64>>>,
    divergence_j: Option<Field<Matrix4<f64>>>,
    domain: Option<Domain>,
    diff: FiniteDiff,
}

impl fmt::Debug for MediumField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MediumField")
            .field("dim", &self.dim)
            .field("analytic_tangent_map", &self.tangent_map.is_some())
            .field("analytic_divergence", &self.divergence_t.is_some())
            .field("domain", &self.domain)
            .field("diff", &self.diff)
            .finish()
    }
}

impl MediumField {
    pub fn new(
        dim: usize,
        embedding: Field<Vector4<f64>>,
        torsor_t: Field<DMatrix<f64>>,
        torsor_j: Field<Vec<Matrix4<f64>>>,
    ) -> Result<Self> {
        if dim > 3 {
            return Err(Error::InvalidInput(format!("medium dimension must be 0..=3, got {dim}")));
        }
        Ok(Self {
            dim,
            embedding,
            tangent_map: None,
            torsor_t,
            torsor_j,
            divergence_t: None,
            divergence_j: None,
            domain: None,
            diff: FiniteDiff::default(),
        })
    }

    /// 3D medium whose chart is space-time itself, so `U = I`.
    pub fn identity_embedding(torsor_t: Field<DMatrix<f64>>, torsor_j: Field<Vec<Matrix4<f64>>>) -> Self {
        Self {
            dim: 3,
            embedding: field(|xi: &[f64]| Vector4::new(xi[0], xi[1], xi[2], xi[3])),
            tangent_map: Some(field(|_: &[f64]| DMatrix::identity(4, 4))),
            torsor_t,
            torsor_j,
            divergence_t: None,
            divergence_j: None,
            domain: None,
            diff: FiniteDiff::default(),
        }
    }

    pub fn with_tangent_map(mut self, u: Field<DMatrix<f64>>) -> Self {
        self.tangent_map = Some(u);
        self
    }

    /// Registers analytic `Σ_γ ∂(^γT^β)/∂ξ^γ` and `Σ_γ ∂(^γJ^{αβ})/∂ξ^γ`.
    pub fn with_divergence(mut self, div_t: Field<Vector4<f64>>, div_j: Field<Matrix4<f64>>) -> Self {
        self.divergence_t = Some(div_t);
        self.divergence_j = Some(div_j);
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn with_diff(mut self, diff: FiniteDiff) -> Self {
        self.diff = diff;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diff(&self) -> &FiniteDiff {
        &self.diff
    }

    pub fn embedding_at(&self, xi: &[f64]) -> Vector4<f64> {
        (self.embedding)(xi)
    }

    pub fn t_at(&self, xi: &[f64]) -> DMatrix<f64> {
        (self.torsor_t)(xi)
    }

    pub fn j_at(&self, xi: &[f64]) -> Vec<Matrix4<f64>> {
        (self.torsor_j)(xi)
    }

    /// Tangent map `U`, `4×(d+1)`, analytic when registered.
    pub fn u_at(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        if let Some(u) = &self.tangent_map {
            return Ok(u(xi));
        }
        let n = self.dim + 1;
        let mut u = DMatrix::zeros(4, n);
        for g in 0..n {
            let col: Vector4<f64> = self.diff.partial(|p| (self.embedding)(p), xi, g, self.domain.as_ref())?;
            u.set_column(g, &col);
        }
        Ok(u)
    }

    /// `Σ_γ ∂(^γT^β)/∂ξ^γ`.
    pub fn partial_div_t(&self, xi: &[f64]) -> Result<Vector4<f64>> {
        if let Some(d) = &self.divergence_t {
            return Ok(d(xi));
        }
        let mut out = Vector4::zeros();
        for g in 0..=self.dim {
            let row = |p: &[f64]| {
                let t = (self.torsor_t)(p);
                Vector4::from_fn(|b, _| t[(g, b)])
            };
            out += self.diff.partial(row, xi, g, self.domain.as_ref())?;
        }
        Ok(out)
    }

    /// `Σ_γ ∂(^γJ^{αβ})/∂ξ^γ`.
    pub fn partial_div_j(&self, xi: &[f64]) -> Result<Matrix4<f64>> {
        if let Some(d) = &self.divergence_j {
            return Ok(d(xi));
        }
        let mut out = Matrix4::zeros();
        for g in 0..=self.dim {
            let slab = |p: &[f64]| (self.torsor_j)(p)[g];
            out += self.diff.partial(slab, xi, g, self.domain.as_ref())?;
        }
        Ok(out)
    }

    /// Largest departure from skewness of the `J` slabs at a point.
    pub fn j_skew_defect(&self, xi: &[f64]) -> f64 {
        self.j_at(xi).iter().map(crate::affine::skew_defect).fold(0.0, f64::max)
    }
}
