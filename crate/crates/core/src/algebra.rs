//! Small helpers shared across modules: the skew map `j`, its inverse, and the
//! Levi-Civita symbol on three indices.

use nalgebra::{Matrix3, Vector3};

/// Skew matrix `j(w)` such that `j(w) y = w × y`.
pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Axial vector of the skew part of `m`, inverse of [`skew`] on skew matrices.
pub fn axial(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Levi-Civita symbol for zero-based spatial indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The cyclic successors `(j, k)` of `i` in `(0 1 2)`.
pub fn cyclic(i: usize) -> (usize, usize) {
    ((i + 1) % 3, (i + 2) % 3)
}

/// Rotation `exp(t j(w))` by Rodrigues' formula.
pub fn rotation_exp(w: &Vector3<f64>, t: f64) -> Matrix3<f64> {
    let theta = w.norm() * t;
    if theta.abs() < 1e-300 {
        return Matrix3::identity();
    }
    let k = skew(&(w / w.norm()));
    Matrix3::identity() + k * theta.sin() + k * k * (1.0 - theta.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_is_cross_product() {
        let w = Vector3::new(0.3, -1.2, 2.0);
        let y = Vector3::new(-0.7, 0.1, 0.4);
        assert!((skew(&w) * y - w.cross(&y)).norm() < 1e-15);
        assert!((axial(&skew(&w)) - w).norm() < 1e-15);
    }

    #[test]
    fn rodrigues_matches_axis_rotation() {
        let r = rotation_exp(&Vector3::new(0.0, 0.0, 2.0), 0.25);
        let c = 0.5_f64.cos();
        let s = 0.5_f64.sin();
        let expected = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        assert!((r - expected).amax() < 1e-15);
    }

    #[test]
    fn levi_civita_antisymmetric() {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(levi_civita(i, j, k), -levi_civita(j, i, k));
                }
            }
        }
    }
}
