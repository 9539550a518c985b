//! Cross-section reduction of a spinning, pressurised disc.

use nalgebra::{Matrix3, Vector3};
use torsor::media::CauchySample;
use torsor::reduction::{reduce_3d_to_1d_j, reduce_3d_to_1d_t, CrossSection};

fn main() {
    let n = Vector3::z();
    let disc = CrossSection::disc(Vector3::zeros(), n, 0.1, 8, 16).unwrap();
    let field = |x: &Vector3<f64>| CauchySample { rho: 7800.0, v: (5.0 * n).cross(x), sigma: -Matrix3::identity() * 1e5 };
    let t = reduce_3d_to_1d_t(field, &disc).unwrap();
    let j = reduce_3d_to_1d_j(field, &disc).unwrap();
    println!("area {:.6}  rho_l {:.4}", disc.area(), t.force_mass.rho_l);
    println!("force {:?}", t.force_mass.f.as_slice());
    println!("spin  {:?}", j.l.as_slice());
}
