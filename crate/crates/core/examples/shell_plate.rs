//! Flat plate: in-plane and off-plane angular rows and the identity rows.

use nalgebra::{Matrix2, Vector2, Vector3};
use torsor::balance::{residual_2d_general, ShellFields};
use torsor::connection::GalileanConnection;
use torsor::media::{field, Plane, ShellField};

fn main() {
    let mut f = ShellFields::new(ShellField::new(Plane, 0.02), field(|_: &[f64]| 15.0));
    f.n = field(|p: &[f64]| Matrix2::new(p[1], 0.2, -0.1, p[2]));
    f.m = field(|p: &[f64]| Matrix2::new(p[1] * p[2], 0.0, 0.0, p[2]));
    f.q = field(|p: &[f64]| Vector2::new(p[2], 1.0));
    let r = residual_2d_general(&f, &GalileanConnection::uniform(Vector3::new(0.0, 0.0, -9.81), Vector3::zeros()), &[0.0, 0.3, 0.4]).unwrap();
    println!("off-plane angular {:?}", &r.residual.angular_momentum.as_slice()[..2]);
    println!("in-plane angular  {:.3} (N12 - N21 = 0.3)", r.residual.angular_momentum[2]);
    println!("identity rows     {:.1e}", r.identities.max_abs());
}
