//! Straight rod at rest: angular balance term by term.

use nalgebra::Vector3;
use torsor::balance::{residual_1d_terms, RodFields};
use torsor::connection::GalileanConnection;
use torsor::media::{field, Curve1D, StraightRod};

fn main() {
    let mut rod = RodFields::new(Curve1D::new(StraightRod::at_rest(Vector3::x())), field(|_: &[f64]| 2.0));
    rod.force = field(|p: &[f64]| Vector3::new(0.0, 1.0 - p[1], 0.0));
    rod.m_star = field(|p: &[f64]| Vector3::new(0.0, 0.0, p[1] - 0.5 * p[1] * p[1]));
    let conn = GalileanConnection::flat();
    for s in [0.0, 0.25, 0.5, 1.0] {
        let a = residual_1d_terms(&rod, &conn, &[0.0, s]).unwrap().angular;
        println!("s = {s}: dM*/ds = {:?}, n x F = {:?}, residual = {:?}", a.dm_star_ds.as_slice(), a.n_cross_f.as_slice(), a.sum().as_slice());
    }
}
