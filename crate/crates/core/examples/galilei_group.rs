//! Compose, invert and apply Galilean changes of frame.

use nalgebra::{Vector3, Vector4};
use torsor::affine::{transform_point, AffinePoint, GalileanFrameChange};
use torsor::algebra::rotation_exp;

fn main() {
    let a = GalileanFrameChange::new(Vector3::new(1.0, 0.0, 0.0), rotation_exp(&Vector3::z(), 0.3), 0.5, Vector3::new(0.0, 2.0, 0.0)).unwrap();
    let b = GalileanFrameChange::boost(Vector3::new(0.0, -0.5, 0.2));

    let ab = a.compose(&b);
    println!("P of a.b =\n{}", ab.p_matrix());
    println!("C of a.b = {:?}", ab.c_vector().as_slice());

    let id = a.compose(&a.inverse()).to_affine().extended();
    println!("|a.a^-1 - I| = {:.2e}", (id - nalgebra::SMatrix::<f64, 5, 5>::identity()).amax());

    let event = AffinePoint::new(Vector4::new(1.0, 1.0, 2.0, 3.0));
    let seen = transform_point(&ab.to_affine(), &event);
    println!("event in the new frame: {:?}", seen.homogeneous().as_slice());
}
