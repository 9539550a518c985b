//! Affine frames of space-time, the Galilei group, and the transformation
//! laws of points, affine forms, torsors and stress-mass tensors.
//!
//! Indices run `0..4` with `0` the time slot. A frame change `(C, P)` acts on
//! homogeneous coordinates through the 5×5 matrix
//!
//! ```text
//! P̃ = | 1  0 |
//!     | C  P |
//! ```
//!
//! and components change as `Ṽ′ = P̃⁻¹ Ṽ`, `Ψ̃′ = Ψ̃ P̃`, `τ̃′ = P̃⁻¹ τ̃ P̃⁻ᵀ`.

use nalgebra::{Matrix3, Matrix4, SMatrix, SVector, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::algebra::{axial, skew};
use crate::error::{Error, Result};

pub type Matrix5 = SMatrix<f64, 5, 5>;
pub type Vector5 = SVector<f64, 5>;

const DET_TOL: f64 = 1e-12;
const ROT_TOL: f64 = 1e-12;
const SKEW_TOL: f64 = 1e-12;

fn rows4(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = m[(i, j)];
        }
    }
    out
}

fn from_rows4(rows: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| rows[i][j])
}

fn rows3(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = m[(i, j)];
        }
    }
    out
}

/// Largest entry of `m + mᵀ`, zero exactly when `m` is skew.
pub fn skew_defect(m: &Matrix4<f64>) -> f64 {
    (m + m.transpose()).amax()
}

/// Skew part `(m - mᵀ)/2`.
pub fn skew_part(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m - m.transpose()) * 0.5
}

/// Element `(C, P)` of the affine group of space-time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AffineFrameChangeRepr", into = "AffineFrameChangeRepr")]
pub struct AffineFrameChange {
    c: Vector4<f64>,
    p: Matrix4<f64>,
}

#[derive(Serialize, Deserialize)]
struct AffineFrameChangeRepr {
    #[serde(rename = "C")]
    c: [f64; 4],
    #[serde(rename = "P")]
    p: [[f64; 4]; 4],
}

impl From<AffineFrameChange> for AffineFrameChangeRepr {
    fn from(f: AffineFrameChange) -> Self {
        Self { c: f.c.into(), p: rows4(&f.p) }
    }
}

impl TryFrom<AffineFrameChangeRepr> for AffineFrameChange {
    type Error = Error;
    fn try_from(r: AffineFrameChangeRepr) -> Result<Self> {
        Self::new(Vector4::from(r.c), from_rows4(&r.p))
    }
}

impl AffineFrameChange {
    /// Rejects `P` whose determinant is negligible against its entry scale.
    pub fn new(c: Vector4<f64>, p: Matrix4<f64>) -> Result<Self> {
        let det = p.determinant();
        let scale = p.amax().max(1.0).powi(4);
        if !det.is_finite() || det.abs() <= DET_TOL * scale {
            return Err(Error::SingularFrame { det });
        }
        if !c.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("frame translation is not finite".into()));
        }
        Ok(Self { c, p })
    }

    pub fn identity() -> Self {
        Self { c: Vector4::zeros(), p: Matrix4::identity() }
    }

    pub fn translation(c: Vector4<f64>) -> Self {
        Self { c, p: Matrix4::identity() }
    }

    pub fn c(&self) -> &Vector4<f64> {
        &self.c
    }

    pub fn p(&self) -> &Matrix4<f64> {
        &self.p
    }

    pub fn p_inv(&self) -> Matrix4<f64> {
        self.p.try_inverse().expect("P checked invertible at construction")
    }

    /// `C′ = −P⁻¹ C`, the old origin seen from the new frame.
    pub fn c_prime(&self) -> Vector4<f64> {
        -(self.p_inv() * self.c)
    }

    /// The 5×5 homogeneous matrix `P̃`.
    pub fn extended(&self) -> Matrix5 {
        let mut m = Matrix5::zeros();
        m[(0, 0)] = 1.0;
        m.fixed_view_mut::<4, 1>(1, 0).copy_from(&self.c);
        m.fixed_view_mut::<4, 4>(1, 1).copy_from(&self.p);
        m
    }

    pub fn inverse(&self) -> Self {
        Self { c: self.c_prime(), p: self.p_inv() }
    }

    /// Frame change whose extended matrix is `P̃(self)·P̃(other)`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { c: self.c + self.p * other.c, p: self.p * other.p }
    }
}

/// Element `(u, R, τ₀, k)` of the Galilei group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GalileanRepr", into = "GalileanRepr")]
pub struct GalileanFrameChange {
    u: Vector3<f64>,
    r: Matrix3<f64>,
    tau0: f64,
    k: Vector3<f64>,
}

#[derive(Serialize, Deserialize)]
struct GalileanRepr {
    u: [f64; 3],
    #[serde(rename = "R")]
    r: [[f64; 3]; 3],
    tau0: f64,
    k: [f64; 3],
}

impl From<GalileanFrameChange> for GalileanRepr {
    fn from(g: GalileanFrameChange) -> Self {
        Self { u: g.u.into(), r: rows3(&g.r), tau0: g.tau0, k: g.k.into() }
    }
}

impl TryFrom<GalileanRepr> for GalileanFrameChange {
    type Error = Error;
    fn try_from(r: GalileanRepr) -> Result<Self> {
        Self::new(Vector3::from(r.u), Matrix3::from_fn(|i, j| r.r[i][j]), r.tau0, Vector3::from(r.k))
    }
}

impl GalileanFrameChange {
    pub fn new(u: Vector3<f64>, r: Matrix3<f64>, tau0: f64, k: Vector3<f64>) -> Result<Self> {
        let orthogonality = (r.transpose() * r - Matrix3::identity()).amax();
        let det = r.determinant();
        if !(orthogonality <= ROT_TOL) || !((det - 1.0).abs() <= ROT_TOL) {
            return Err(Error::NotARotation { orthogonality, det });
        }
        Ok(Self { u, r, tau0, k })
    }

    pub fn identity() -> Self {
        Self { u: Vector3::zeros(), r: Matrix3::identity(), tau0: 0.0, k: Vector3::zeros() }
    }

    pub fn boost(u: Vector3<f64>) -> Self {
        Self { u, ..Self::identity() }
    }

    /// Boost by `v` combined with a spatial translation to `x`: the frame
    /// attached to a particle at `x` moving with velocity `v`.
    pub fn boost_and_shift(v: Vector3<f64>, x: Vector3<f64>) -> Self {
        Self { u: v, k: x, ..Self::identity() }
    }

    pub fn u(&self) -> &Vector3<f64> {
        &self.u
    }

    pub fn r(&self) -> &Matrix3<f64> {
        &self.r
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn k(&self) -> &Vector3<f64> {
        &self.k
    }

    /// `P = [[1, 0], [u, R]]`.
    pub fn p_matrix(&self) -> Matrix4<f64> {
        let mut p = Matrix4::zeros();
        p[(0, 0)] = 1.0;
        p.fixed_view_mut::<3, 1>(1, 0).copy_from(&self.u);
        p.fixed_view_mut::<3, 3>(1, 1).copy_from(&self.r);
        p
    }

    pub fn c_vector(&self) -> Vector4<f64> {
        Vector4::new(self.tau0, self.k.x, self.k.y, self.k.z)
    }

    pub fn to_affine(&self) -> AffineFrameChange {
        AffineFrameChange { c: self.c_vector(), p: self.p_matrix() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::from_affine(&self.to_affine().compose(&other.to_affine()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_affine(&self.to_affine().inverse())
    }

    fn from_affine(a: &AffineFrameChange) -> Self {
        let p = a.p();
        let c = a.c();
        Self {
            u: Vector3::new(p[(1, 0)], p[(2, 0)], p[(3, 0)]),
            r: p.fixed_view::<3, 3>(1, 1).into_owned(),
            tau0: c[0],
            k: Vector3::new(c[1], c[2], c[3]),
        }
    }
}

impl From<GalileanFrameChange> for AffineFrameChange {
    fn from(g: GalileanFrameChange) -> Self {
        g.to_affine()
    }
}

/// Point of the affine tangent space, components `V^α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePoint {
    #[serde(rename = "V")]
    pub v: Vector4<f64>,
}

impl AffinePoint {
    pub fn new(v: Vector4<f64>) -> Self {
        Self { v }
    }

    pub fn homogeneous(&self) -> Vector5 {
        Vector5::new(1.0, self.v[0], self.v[1], self.v[2], self.v[3])
    }
}

/// Affine form: height `χ` at the origin and linear part `Φ_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineForm {
    pub chi: f64,
    #[serde(rename = "Phi")]
    pub phi: Vector4<f64>,
}

impl AffineForm {
    pub fn new(chi: f64, phi: Vector4<f64>) -> Self {
        Self { chi, phi }
    }

    /// Value `χ + Φ·V` of the form at a point.
    pub fn value(&self, a: &AffinePoint) -> f64 {
        self.chi + self.phi.dot(&a.v)
    }

    /// Row `Ψ̃ = (χ, Φ)` stored as a column.
    pub fn homogeneous(&self) -> Vector5 {
        Vector5::new(self.chi, self.phi[0], self.phi[1], self.phi[2], self.phi[3])
    }
}

/// Torsor components `(T^α, J^{αβ})` with `J` skew.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TorsorRepr", into = "TorsorRepr")]
pub struct Torsor {
    t: Vector4<f64>,
    j: Matrix4<f64>,
}

#[derive(Serialize, Deserialize)]
struct TorsorRepr {
    #[serde(rename = "T")]
    t: [f64; 4],
    #[serde(rename = "J")]
    j: [[f64; 4]; 4],
}

impl From<Torsor> for TorsorRepr {
    fn from(x: Torsor) -> Self {
        Self { t: x.t.into(), j: rows4(&x.j) }
    }
}

impl TryFrom<TorsorRepr> for Torsor {
    type Error = Error;
    fn try_from(r: TorsorRepr) -> Result<Self> {
        Self::new(Vector4::from(r.t), from_rows4(&r.j))
    }
}

impl Torsor {
    /// Rejects an angular block that is not skew to `1e-12` relative.
    pub fn new(t: Vector4<f64>, j: Matrix4<f64>) -> Result<Self> {
        let asym = skew_defect(&j);
        if !(asym <= SKEW_TOL * j.amax().max(1.0)) {
            return Err(Error::NotSkew { asymmetry: asym });
        }
        Ok(Self { t, j: skew_part(&j) })
    }

    /// Builds `J` from its strict upper triangle `(J01, J02, J03, J12, J13, J23)`.
    pub fn from_upper(t: Vector4<f64>, upper: [f64; 6]) -> Self {
        let mut j = Matrix4::zeros();
        let mut n = 0;
        for a in 0..4 {
            for b in (a + 1)..4 {
                j[(a, b)] = upper[n];
                j[(b, a)] = -upper[n];
                n += 1;
            }
        }
        Self { t, j }
    }

    pub fn zero() -> Self {
        Self { t: Vector4::zeros(), j: Matrix4::zeros() }
    }

    pub fn t(&self) -> &Vector4<f64> {
        &self.t
    }

    pub fn j(&self) -> &Matrix4<f64> {
        &self.j
    }

    /// `τ̃ = [[0, Tᵀ], [−T, J]]`.
    pub fn extended(&self) -> Matrix5 {
        let mut m = Matrix5::zeros();
        m.fixed_view_mut::<1, 4>(0, 1).copy_from(&self.t.transpose());
        m.fixed_view_mut::<4, 1>(1, 0).copy_from(&(-self.t));
        m.fixed_view_mut::<4, 4>(1, 1).copy_from(&self.j);
        m
    }

    /// Skew bilinear pairing `τ(Ψ, Ψ̂) = Ψ̃ τ̃ Ψ̂̃ᵀ`.
    pub fn pair(&self, psi: &AffineForm, psi_hat: &AffineForm) -> f64 {
        psi.homogeneous().dot(&(self.extended() * psi_hat.homogeneous()))
    }
}

/// Torsor of a pointwise object: mass, linear momentum, position quantity and
/// angular momentum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseTorsor {
    pub m: f64,
    pub p: Vector3<f64>,
    pub q: Vector3<f64>,
    pub l: Vector3<f64>,
}

impl PointwiseTorsor {
    /// Packs `T = (m, p)` and `J = [[0, −qᵀ], [q, −j(l)]]`.
    pub fn to_torsor(&self) -> Torsor {
        let mut j = Matrix4::zeros();
        for i in 0..3 {
            j[(i + 1, 0)] = self.q[i];
            j[(0, i + 1)] = -self.q[i];
        }
        j.fixed_view_mut::<3, 3>(1, 1).copy_from(&(-skew(&self.l)));
        Torsor { t: Vector4::new(self.m, self.p.x, self.p.y, self.p.z), j }
    }

    pub fn from_torsor(tau: &Torsor) -> Self {
        let t = tau.t();
        let j = tau.j();
        let spatial: Matrix3<f64> = j.fixed_view::<3, 3>(1, 1).into_owned();
        Self {
            m: t[0],
            p: Vector3::new(t[1], t[2], t[3]),
            q: Vector3::new(j[(1, 0)], j[(2, 0)], j[(3, 0)]),
            l: -axial(&spatial),
        }
    }

    /// Components in the frame where the particle sits at `x` with velocity
    /// `v`, starting from its proper-frame mass `m` and spin `l0`.
    pub fn from_proper(m: f64, l0: Vector3<f64>, v: Vector3<f64>, x: Vector3<f64>) -> Self {
        let proper = PointwiseTorsor { m, p: Vector3::zeros(), q: Vector3::zeros(), l: l0 };
        let attached = GalileanFrameChange::boost_and_shift(v, x).to_affine();
        Self::from_torsor(&transform_torsor(&attached.inverse(), &proper.to_torsor()))
    }

    /// Position `x = q/m`.
    pub fn position(&self) -> Vector3<f64> {
        self.q / self.m
    }

    pub fn velocity(&self) -> Vector3<f64> {
        self.p / self.m
    }

    /// Proper part `l₀ = l − x × p`.
    pub fn proper_angular_momentum(&self) -> Vector3<f64> {
        self.l - self.position().cross(&self.p)
    }
}

/// `V′ = C′ + P⁻¹ V`.
pub fn transform_point(f: &AffineFrameChange, a: &AffinePoint) -> AffinePoint {
    let q = f.p_inv();
    AffinePoint { v: q * (a.v - f.c) }
}

/// `χ′ = χ + Φ C`, `Φ′ = Φ P`.
pub fn transform_form(f: &AffineFrameChange, psi: &AffineForm) -> AffineForm {
    AffineForm { chi: psi.chi + psi.phi.dot(&f.c), phi: f.p.transpose() * psi.phi }
}

/// `T′ = P⁻¹ T`, `J′ = P⁻¹ (J + T Cᵀ − C Tᵀ) P⁻ᵀ`, re-skewed.
pub fn transform_torsor(f: &AffineFrameChange, tau: &Torsor) -> Torsor {
    let q = f.p_inv();
    let t = tau.t;
    let c = f.c;
    let inner = tau.j + t * c.transpose() - c * t.transpose();
    Torsor { t: q * t, j: skew_part(&(q * inner * q.transpose())) }
}

/// `T = P T′ Pᵀ` for a stress-mass tensor given in the primed frame.
pub fn transform_stress_mass(f: &GalileanFrameChange, tp: &Matrix4<f64>) -> Matrix4<f64> {
    let p = f.p_matrix();
    let out = p * tp * p.transpose();
    (out + out.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rotation_exp;

    fn sample() -> (GalileanFrameChange, Torsor) {
        let r = rotation_exp(&Vector3::new(0.3, -0.2, 0.9), 1.1);
        let g = GalileanFrameChange::new(
            Vector3::new(0.4, -1.0, 2.0),
            r,
            0.7,
            Vector3::new(-0.5, 1.5, 0.25),
        )
        .unwrap();
        let tau = Torsor::from_upper(Vector4::new(2.0, -0.3, 0.8, 1.2), [0.1, -0.4, 0.6, 0.9, -0.2, 0.3]);
        (g, tau)
    }

    #[test]
    fn torsor_law_matches_extended_matrix() {
        let (g, tau) = sample();
        let f = g.to_affine();
        let pinv = f.extended().try_inverse().unwrap();
        let oracle = pinv * tau.extended() * pinv.transpose();
        let got = transform_torsor(&f, &tau).extended();
        assert!((oracle - got).amax() < 1e-12);
    }

    #[test]
    fn point_law_matches_homogeneous_coordinates() {
        let (g, _) = sample();
        let f = g.to_affine();
        let a = AffinePoint::new(Vector4::new(1.0, 2.0, 3.0, 4.0));
        let oracle = f.extended().try_inverse().unwrap() * a.homogeneous();
        let got = transform_point(&f, &a).homogeneous();
        assert!((oracle - got).amax() < 1e-12);
    }

    #[test]
    fn pure_translation_moves_origin() {
        let f = AffineFrameChange::translation(Vector4::new(0.0, 1.0, -2.0, 3.0));
        let out = transform_point(&f, &AffinePoint::new(Vector4::zeros()));
        assert_eq!(out.v, Vector4::new(0.0, -1.0, 2.0, -3.0));
    }

    #[test]
    fn boosts_add() {
        let a = GalileanFrameChange::boost(Vector3::new(1.0, 0.0, 2.0));
        let b = GalileanFrameChange::boost(Vector3::new(-0.5, 3.0, 0.0));
        let ab = a.compose(&b);
        assert_eq!(*ab.u(), Vector3::new(0.5, 3.0, 2.0));
        assert_eq!(*ab.r(), Matrix3::identity());
    }

    #[test]
    fn proper_frame_pointwise_torsor() {
        let m = 2.5;
        let l0 = Vector3::new(0.1, 0.2, -0.3);
        let v = Vector3::new(1.0, -2.0, 0.5);
        let x = Vector3::new(0.3, 0.7, -1.1);
        let pt = PointwiseTorsor::from_proper(m, l0, v, x);
        assert!((pt.m - m).abs() < 1e-15);
        assert!((pt.p - m * v).norm() < 1e-12);
        assert!((pt.q - m * x).norm() < 1e-12);
        assert!((pt.l - (l0 + x.cross(&(m * v)))).norm() < 1e-12);
        assert!((pt.proper_angular_momentum() - l0).norm() < 1e-12);
    }

    #[test]
    fn pointwise_packing_round_trip() {
        let pt = PointwiseTorsor {
            m: 1.5,
            p: Vector3::new(1.0, 2.0, 3.0),
            q: Vector3::new(-1.0, 0.5, 0.0),
            l: Vector3::new(0.0, -2.0, 4.0),
        };
        assert_eq!(PointwiseTorsor::from_torsor(&pt.to_torsor()), pt);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            AffineFrameChange::new(Vector4::zeros(), Matrix4::zeros()),
            Err(Error::SingularFrame { .. })
        ));
        let mut r = Matrix3::identity();
        r[(0, 0)] = -1.0;
        assert!(matches!(
            GalileanFrameChange::new(Vector3::zeros(), r, 0.0, Vector3::zeros()),
            Err(Error::NotARotation { .. })
        ));
        let mut j = Matrix4::zeros();
        j[(0, 1)] = 1.0;
        assert!(matches!(Torsor::new(Vector4::zeros(), j), Err(Error::NotSkew { .. })));
    }

    #[test]
    fn stress_mass_boost() {
        let rho = 3.0;
        let v = Vector3::new(1.0, -2.0, 0.5);
        let mut tp = Matrix4::zeros();
        tp[(0, 0)] = rho;
        let t = transform_stress_mass(&GalileanFrameChange::boost(v), &tp);
        for i in 0..3 {
            assert!((t[(0, i + 1)] - rho * v[i]).abs() < 1e-14);
            for j in 0..3 {
                assert!((t[(i + 1, j + 1)] - rho * v[i] * v[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let (g, tau) = sample();
        let s = serde_json::to_string(&tau).unwrap();
        assert!(s.contains("\"T\"") && s.contains("\"J\""));
        let back: Torsor = serde_json::from_str(&s).unwrap();
        assert!((back.j() - tau.j()).amax() < 1e-15);
        let s = serde_json::to_string(&g).unwrap();
        let back: GalileanFrameChange = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
