//! Dimensional reduction of 3D Cauchy fields: cross-section quadrature to
//! rod components and through-thickness quadrature to shell components.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{Matrix2, Matrix2x4, Matrix3, Matrix3x4, Matrix4, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{CauchySample, ForceMass1D};

fn gauss_nodes(n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(n).filter(|n| n.get() >= 2).ok_or_else(|| Error::InvalidInput("a Gauss rule needs at least 2 nodes".into()))?;
    let rule = GaussLegendre::new(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut out: Vec<(f64, f64)> = rule.as_node_weight_pairs().iter().map(|&(x, w)| (mid + half * x, half * w)).collect();
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(out)
}

/// One quadrature node of a cross-section: in-plane coordinates and weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionNode {
    pub m: Vector2<f64>,
    pub weight: f64,
}

/// Plane cross-section with tangent `n`, in-plane basis `(e1, e2)` and a
/// list of quadrature nodes relative to `origin`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSection {
    pub origin: Vector3<f64>,
    pub n: Vector3<f64>,
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub nodes: Vec<SectionNode>,
}

impl CrossSection {
    /// Section normal to `n`; `e1` is the projection of `hint` (or of a
    /// coordinate axis) onto the section plane.
    pub fn from_nodes(origin: Vector3<f64>, n: Vector3<f64>, hint: Option<Vector3<f64>>, nodes: Vec<SectionNode>) -> Result<Self> {
        let len = n.norm();
        if !(len > 1e-12) {
            return Err(Error::DegenerateTangent { norm: len });
        }
        let n = n / len;
        let seed = hint.unwrap_or_else(|| if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() });
        let e1 = seed - n * n.dot(&seed);
        if !(e1.norm() > 1e-12) {
            return Err(Error::InvalidInput("section basis hint is parallel to the tangent".into()));
        }
        let e1 = e1.normalize();
        Ok(Self { origin, n, e1, e2: n.cross(&e1), nodes })
    }

    /// Polar Gauss rule on a disc: Gauss-Legendre in `r` with weight `r dr`
    /// and uniform angles.
    pub fn disc(origin: Vector3<f64>, n: Vector3<f64>, radius: f64, radial: usize, angular: usize) -> Result<Self> {
        if !(radius > 0.0) || angular == 0 {
            return Err(Error::InvalidInput(format!("disc needs radius > 0 and angular nodes, got r = {radius}")));
        }
        let dphi = 2.0 * PI / angular as f64;
        let mut nodes = Vec::with_capacity(radial * angular);
        for (r, wr) in gauss_nodes(radial, 0.0, radius)? {
            for k in 0..angular {
                let phi = dphi * k as f64;
                nodes.push(SectionNode { m: Vector2::new(r * phi.cos(), r * phi.sin()), weight: wr * r * dphi });
            }
        }
        Self::from_nodes(origin, n, None, nodes)
    }

    /// Default disc rule, 8 radial by 16 angular nodes.
    pub fn default_disc(origin: Vector3<f64>, n: Vector3<f64>, radius: f64) -> Result<Self> {
        Self::disc(origin, n, radius, 8, 16)
    }

    /// Tensor Gauss-Legendre rule on a centred `a × b` rectangle.
    pub fn rectangle(origin: Vector3<f64>, n: Vector3<f64>, a: f64, b: f64, na: usize, nb: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidInput(format!("rectangle needs positive sides, got {a} × {b}")));
        }
        let xa = gauss_nodes(na, -0.5 * a, 0.5 * a)?;
        let xb = gauss_nodes(nb, -0.5 * b, 0.5 * b)?;
        let nodes = xa
            .iter()
            .flat_map(|&(u, wu)| xb.iter().map(move |&(v, wv)| SectionNode { m: Vector2::new(u, v), weight: wu * wv }))
            .collect();
        Self::from_nodes(origin, n, None, nodes)
    }

    pub fn area(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Offset of a node from the section origin.
    pub fn offset(&self, node: &SectionNode) -> Vector3<f64> {
        self.e1 * node.m.x + self.e2 * node.m.y
    }

    fn samples<F: Fn(&Vector3<f64>) -> CauchySample>(&self, field: F) -> Result<Vec<(Vector3<f64>, f64, CauchySample)>> {
        if self.nodes.is_empty() {
            return Err(Error::EmptySection);
        }
        Ok(self.nodes.iter().map(|nd| {
            let x = self.offset(nd);
            (x, nd.weight, field(&x))
        }).collect())
    }

    /// Offset of the mass centre `∫ρ x̄ dS / ∫ρ dS` from the section origin.
    pub fn mass_centre<F: Fn(&Vector3<f64>) -> CauchySample>(&self, field: F) -> Result<Vector3<f64>> {
        let s = self.samples(field)?;
        let mass: f64 = s.iter().map(|(_, w, c)| w * c.rho).sum();
        if !(mass > 0.0) {
            return Err(Error::NonpositiveMass { mass });
        }
        Ok(s.iter().map(|(x, w, c)| x * (w * c.rho)).sum::<Vector3<f64>>() / mass)
    }

    /// Same nodes re-expressed about the mass centre.
    pub fn mass_centred<F: Fn(&Vector3<f64>) -> CauchySample>(&self, field: F) -> Result<Self> {
        let c = self.mass_centre(field)?;
        let shift = Vector2::new(c.dot(&self.e1), c.dot(&self.e2));
        Ok(Self {
            origin: self.origin + c,
            nodes: self.nodes.iter().map(|n| SectionNode { m: n.m - shift, weight: n.weight }).collect(),
            ..self.clone()
        })
    }

    /// Projector `Π = [[1, 0], [0, nᵀ]]`.
    pub fn projector(&self) -> Matrix2x4<f64> {
        let mut p = Matrix2x4::zeros();
        p[(0, 0)] = 1.0;
        for i in 0..3 {
            p[(1, i + 1)] = self.n[i];
        }
        p
    }
}

/// Reduced rod force-mass data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedRodT {
    /// `∫ Π T̄ dS`.
    pub t: Matrix2x4<f64>,
    pub force_mass: ForceMass1D,
    /// `∫ σ n dS`.
    pub static_force: Vector3<f64>,
    /// `−∫ ρ (v_t − v̄_t)(v − v̄) dS`.
    pub dynamic_force: Vector3<f64>,
}

/// `T = ∫ Π T̄ dS`, with `v` the mass-averaged velocity and
/// `F = ∫ (σ n − ρ (v_t − v̄_t)(v − v̄)) dS`.
///
/// `field` is evaluated at offsets from the section origin.
pub fn reduce_3d_to_1d_t<F: Fn(&Vector3<f64>) -> CauchySample>(field: F, cs: &CrossSection) -> Result<ReducedRodT> {
    let s = cs.samples(&field)?;
    let pi = cs.projector();
    let t = s.iter().fold(Matrix2x4::zeros(), |acc, (_, w, c)| acc + pi * c.stress_mass() * *w);

    let rho_l: f64 = s.iter().map(|(_, w, c)| w * c.rho).sum();
    if !(rho_l > 0.0) {
        return Err(Error::NonpositiveMass { mass: rho_l });
    }
    // mean about the first node so a uniform field is reproduced bit for bit
    let v_ref = s[0].2.v;
    let v = v_ref + s.iter().map(|(_, w, c)| (c.v - v_ref) * (w * c.rho)).sum::<Vector3<f64>>() / rho_l;
    let v_t = v.dot(&cs.n);
    let mut static_force = Vector3::zeros();
    let mut dynamic_force = Vector3::zeros();
    for (_, w, c) in &s {
        static_force += c.sigma * cs.n * *w;
        let dv = v - c.v;
        dynamic_force -= dv * (w * c.rho * (v_t - c.v.dot(&cs.n)));
    }
    Ok(ReducedRodT {
        t,
        force_mass: ForceMass1D { rho_l, v, v_t, f: static_force + dynamic_force },
        static_force,
        dynamic_force,
    })
}

/// Reduced rod angular components about the mass centre.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedRodJ {
    pub q: Vector3<f64>,
    pub l: Vector3<f64>,
    pub l_star: Vector3<f64>,
    pub m_star: Vector3<f64>,
    /// Offset of the mass centre from the section origin.
    pub mass_centre: Vector3<f64>,
}

/// `q = ∫ρx̄`, `l = ∫x̄ × ρv̄`, `l⋆ = ∫ρ v̄_t x̄`, `M⋆ = ∫x̄ × (ρ v̄_t v̄ − σn)`
/// with `x̄` measured from the mass centre.
pub fn reduce_3d_to_1d_j<F: Fn(&Vector3<f64>) -> CauchySample>(field: F, cs: &CrossSection) -> Result<ReducedRodJ> {
    let centre = cs.mass_centre(&field)?;
    let s = cs.samples(&field)?;
    let mut out = ReducedRodJ { q: Vector3::zeros(), l: Vector3::zeros(), l_star: Vector3::zeros(), m_star: Vector3::zeros(), mass_centre: centre };
    for (x, w, c) in &s {
        let xb = x - centre;
        let vt = c.v.dot(&cs.n);
        out.q += xb * (w * c.rho);
        out.l += xb.cross(&(c.v * (w * c.rho)));
        out.l_star += xb * (w * c.rho * vt);
        out.m_star += xb.cross(&((c.v * (c.rho * vt) - c.sigma * cs.n) * *w));
    }
    Ok(out)
}

/// Gauss-Legendre rule over `θ³ ∈ [−h/2, h/2]`, exact to degree `2n − 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThicknessRule {
    pub thickness: f64,
    pub nodes: Vec<(f64, f64)>,
}

impl ThicknessRule {
    pub fn gauss(thickness: f64, n: usize) -> Result<Self> {
        if !(thickness > 0.0) {
            return Err(Error::InvalidInput(format!("thickness must be positive, got {thickness}")));
        }
        Ok(Self { thickness, nodes: gauss_nodes(n, -0.5 * thickness, 0.5 * thickness)? })
    }

    pub fn degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }
}

/// Shell variables per unit surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedShell {
    pub rho_s: f64,
    pub n: Matrix2<f64>,
    pub q: Vector2<f64>,
    pub m: Matrix2<f64>,
    pub thickness: f64,
}

/// `ρ_s = ρh`, `N = ∫σ̄^{ab}`, `Q = ∫σ̄^{a3}`, `M = ∫θ³σ̄^{ab}` with `σ̄`
/// in adapted components (index 2 is the normal).
pub fn reduce_3d_to_2d<F: Fn(f64) -> Matrix3<f64>>(sigma: F, rho: f64, rule: &ThicknessRule) -> ReducedShell {
    let mut out = ReducedShell { rho_s: rho * rule.thickness, n: Matrix2::zeros(), q: Vector2::zeros(), m: Matrix2::zeros(), thickness: rule.thickness };
    for &(th, w) in &rule.nodes {
        let s = sigma(th);
        let ab = s.fixed_view::<2, 2>(0, 0).into_owned();
        out.n += ab * w;
        out.m += ab * (w * th);
        out.q += Vector2::new(s[(0, 2)], s[(1, 2)]) * w;
    }
    out
}

/// Shell torsor components in the adapted chart: rows `γ = 0, 1, 2` of `^γT^β`
/// and slabs `^γJ^{αβ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellTorsor {
    pub t: Matrix3x4<f64>,
    pub j: [Matrix4<f64>; 3],
}

/// `^aT^b = (ρh³/12) w^a w^b − N^{ab}`, `^aT³ = −Q^a`, `^0T^0 = ρ_s`,
/// `^aJ^{b3} = M^{ab}`, with the rotary terms `^0J^{b3} = ^aJ^{03} = −(ρh³/12) w`.
pub fn assemble_shell_t(reduced: &ReducedShell, w: &Vector2<f64>) -> ShellTorsor {
    let h = reduced.thickness;
    let i = reduced.rho_s * h * h / 12.0;
    let mut t = Matrix3x4::zeros();
    t[(0, 0)] = reduced.rho_s;
    let mut j = [Matrix4::zeros(); 3];
    for a in 0..2 {
        for b in 0..2 {
            t[(a + 1, b + 1)] = i * w[a] * w[b] - reduced.n[(a, b)];
            j[a + 1][(b + 1, 3)] = reduced.m[(a, b)];
            j[a + 1][(3, b + 1)] = -reduced.m[(a, b)];
        }
        t[(a + 1, 3)] = -reduced.q[a];
        j[0][(a + 1, 3)] = -i * w[a];
        j[0][(3, a + 1)] = i * w[a];
        j[a + 1][(0, 3)] = -i * w[a];
        j[a + 1][(3, 0)] = i * w[a];
    }
    ShellTorsor { t, j }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::assemble_cauchy_t;

    fn uniform(rho: f64, v: Vector3<f64>) -> impl Fn(&Vector3<f64>) -> CauchySample {
        move |_| CauchySample { rho, v, sigma: Matrix3::zeros() }
    }

    #[test]
    fn disc_area_and_polynomials() {
        let cs = CrossSection::default_disc(Vector3::zeros(), Vector3::z(), 0.3).unwrap();
        assert!((cs.area() - PI * 0.09).abs() < 1e-14);
        // ∫ x² dS = π r⁴ / 4
        let m2: f64 = cs.nodes.iter().map(|n| n.weight * n.m.x * n.m.x).sum();
        assert!((m2 - PI * 0.3f64.powi(4) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn rectangle_second_moment() {
        let cs = CrossSection::rectangle(Vector3::zeros(), Vector3::x(), 0.4, 0.2, 8, 8).unwrap();
        let i: f64 = cs.nodes.iter().map(|n| n.weight * n.m.y * n.m.y).sum();
        assert!((i - 0.4 * 0.2f64.powi(3) / 12.0).abs() < 1e-15);
    }

    #[test]
    fn empty_section() {
        let cs = CrossSection::from_nodes(Vector3::zeros(), Vector3::z(), None, vec![]).unwrap();
        assert_eq!(reduce_3d_to_1d_t(uniform(1.0, Vector3::zeros()), &cs).unwrap_err(), Error::EmptySection);
    }

    #[test]
    fn force_matches_t_matrix_route() {
        let cs = CrossSection::default_disc(Vector3::zeros(), Vector3::new(0.0, 0.6, 0.8), 0.5).unwrap();
        let e1 = cs.e1;
        let field = move |x: &Vector3<f64>| {
            let r2 = x.norm_squared();
            CauchySample {
                rho: 2.0 + x.dot(&e1),
                v: Vector3::new(1.0 - r2, 0.3 * x.x, 0.8 * (1.0 - 4.0 * r2)),
                sigma: Matrix3::new(1.0, x.y, 0.0, x.y, -2.0, x.z, 0.0, x.z, 0.5 + r2),
            }
        };
        let r = reduce_3d_to_1d_t(field, &cs).unwrap();
        let back = ForceMass1D::from_t_matrix(&r.t).unwrap();
        assert!((back.f - r.force_mass.f).norm() < 1e-12);
        assert!((back.v - r.force_mass.v).norm() < 1e-13);
        assert!(r.dynamic_force.norm() > 1e-3);
    }

    #[test]
    fn j_matches_general_packing() {
        let cs = CrossSection::rectangle(Vector3::new(1.0, 2.0, 3.0), Vector3::z(), 0.3, 0.2, 6, 6).unwrap();
        let field = |x: &Vector3<f64>| CauchySample {
            rho: 1.0 + 2.0 * x.x + x.y * x.y,
            v: Vector3::new(x.y, -x.x, 1.0 + x.x),
            sigma: Matrix3::new(0.0, 0.0, x.y, 0.0, 0.0, -x.x, x.y, -x.x, 3.0 + x.x),
        };
        let r = reduce_3d_to_1d_j(field, &cs).unwrap();
        let c = r.mass_centre;
        // ^γJ^{αβ} = ∫ ^γΠ_ρ J̄^{αβρ} with J̄^{i0ρ} = x̄^i T̄^{0ρ}, J̄^{ijρ} = x̄^i T̄^{jρ} − x̄^j T̄^{iρ}
        let pi = cs.projector();
        let mut j = [Matrix4::zeros(); 2];
        for nd in &cs.nodes {
            let off = cs.offset(nd);
            let s = field(&off);
            let tb = assemble_cauchy_t(s.rho, &s.v, &s.sigma);
            let xb = off - c;
            let xe = [0.0, xb.x, xb.y, xb.z];
            for g in 0..2 {
                for a in 0..4 {
                    for b in 0..4 {
                        let jb: f64 = (0..4).map(|rho| pi[(g, rho)] * (xe[a] * tb[(b, rho)] - xe[b] * tb[(a, rho)])).sum();
                        j[g][(a, b)] += nd.weight * jb;
                    }
                }
            }
        }
        let axial = |m: &Matrix4<f64>| Vector3::new(m[(2, 3)], m[(3, 1)], m[(1, 2)]);
        let col = |m: &Matrix4<f64>| Vector3::new(m[(1, 0)], m[(2, 0)], m[(3, 0)]);
        assert!((col(&j[0]) - r.q).norm() < 1e-12);
        assert!((axial(&j[0]) - r.l).norm() < 1e-12);
        assert!((col(&j[1]) - r.l_star).norm() < 1e-12);
        assert!((axial(&j[1]) - r.m_star).norm() < 1e-12);
        assert!(r.q.norm() < 1e-13);
    }

    #[test]
    fn linear_axial_profile_l_star() {
        let (rho0, alpha) = (3.0, 0.7);
        let cs = CrossSection::rectangle(Vector3::zeros(), Vector3::z(), 0.4, 0.2, 8, 8).unwrap();
        let e1 = cs.e1;
        let r = reduce_3d_to_1d_j(move |x: &Vector3<f64>| CauchySample { rho: rho0, v: Vector3::z() * (alpha * x.dot(&e1)), sigma: Matrix3::zeros() }, &cs).unwrap();
        let i11 = 0.2 * 0.4f64.powi(3) / 12.0;
        assert!((r.l_star - e1 * (rho0 * alpha * i11)).norm() < 1e-15);
    }

    #[test]
    fn constant_stress_through_thickness() {
        let rule = ThicknessRule::gauss(0.02, 8).unwrap();
        let s = Matrix3::new(1.0, 2.0, 0.5, 2.0, 3.0, -0.5, 0.5, -0.5, 0.0);
        let r = reduce_3d_to_2d(|_| s, 1000.0, &rule);
        assert!((r.n - s.fixed_view::<2, 2>(0, 0) * 0.02).amax() < 1e-15);
        assert!(r.m.amax() < 1e-18);
        assert!((r.rho_s - 20.0).abs() < 1e-12);
        assert_eq!(rule.degree(), 15);
    }

    #[test]
    fn shell_assembly_rank_one_term() {
        let red = ReducedShell { rho_s: 2.0, n: Matrix2::new(1.0, 0.2, 0.3, 4.0), q: Vector2::new(0.5, -0.5), m: Matrix2::identity(), thickness: 0.3 };
        let w = Vector2::new(0.4, -1.1);
        let t = assemble_shell_t(&red, &w);
        let outer = w * w.transpose() * (2.0 * 0.09 / 12.0);
        assert!((t.t.fixed_view::<2, 2>(1, 1) - (outer - red.n)).amax() < 1e-15);
        assert_eq!(t.t[(1, 3)], -0.5);
        for s in &t.j {
            assert_eq!(s + s.transpose(), Matrix4::zeros());
        }
    }
}
