//! Torsor of a spinning particle seen from a moving frame.

use nalgebra::Vector3;
use torsor::affine::{transform_torsor, GalileanFrameChange, PointwiseTorsor};

fn main() {
    let (m, l0) = (2.0, Vector3::new(0.0, 0.0, 0.1));
    let s = PointwiseTorsor::from_proper(m, l0, Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 1.0, 0.0));
    println!("m = {}, p = {:?}, q = {:?}, l = {:?}", s.m, s.p.as_slice(), s.q.as_slice(), s.l.as_slice());

    let g = GalileanFrameChange::boost_and_shift(Vector3::new(0.5, 0.0, 0.0), Vector3::new(0.0, 0.0, 1.0));
    let moved = PointwiseTorsor::from_torsor(&transform_torsor(&g.to_affine(), &s.to_torsor()));
    println!("after boost: m = {}, p = {:?}, l0 = {:?}", moved.m, moved.p.as_slice(), moved.proper_angular_momentum().as_slice());
}
