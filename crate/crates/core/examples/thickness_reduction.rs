//! Through-thickness reduction of a bending stress to N, Q and M.

use nalgebra::Matrix3;
use torsor::reduction::{reduce_3d_to_2d, ThicknessRule};

fn main() {
    let (kappa, h) = (2.0e6, 0.01);
    let rule = ThicknessRule::gauss(h, 4).unwrap();
    let sigma = |z: f64| Matrix3::new(kappa * z, 0.0, 1e3, 0.0, 0.3 * kappa * z, 0.0, 1e3, 0.0, 0.0);
    let shell = reduce_3d_to_2d(sigma, 2700.0, &rule);
    println!("rho_s {}\nN {:?}\nQ {:?}\nM {:?}", shell.rho_s, shell.n.as_slice(), shell.q.as_slice(), shell.m.as_slice());
    println!("M11 closed form {}", kappa * h.powi(3) / 12.0);
}
