//! Cosserat balance: displayed equations against the covariant divergence.

use nalgebra::Vector3;
use torsor::balance::{residual_3d_cosserat, residual_3d_cosserat_general};
use torsor::connection::GalileanConnection;
use torsor::manufactured::cauchy_wave;
use torsor::media::Cosserat3DState;

fn main() {
    let (g, omega) = (Vector3::new(0.0, 0.0, -9.81), Vector3::new(0.1, 0.0, 0.4));
    let conn = GalileanConnection::uniform(g, omega);
    let s = Cosserat3DState::from_cauchy(&cauchy_wave(g, omega));
    let xi = [0.2, 0.5, 0.5, -0.1];
    let direct = residual_3d_cosserat(&s, &conn, &xi).unwrap();
    let general = residual_3d_cosserat_general(&s, &conn, &xi).unwrap();
    println!("direct  {:?}", direct.to_array());
    println!("general {:?}", general.to_array());
}
