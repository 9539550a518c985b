//! Manufactured Cauchy continuum: residuals shrink with the difference step.

use nalgebra::Vector3;
use torsor::balance::residual_cauchy;
use torsor::connection::GalileanConnection;
use torsor::diff::FiniteDiff;
use torsor::manufactured::cauchy_wave;

fn main() {
    let (g, omega) = (Vector3::new(0.0, 0.0, -9.81), Vector3::new(0.0, 0.2, 0.5));
    let conn = GalileanConnection::uniform(g, omega);
    let xi = [0.4, 0.1, -0.3, 0.7];
    for h in [1e-2, 1e-3, 1e-4] {
        let f = cauchy_wave(g, omega).with_diff(FiniteDiff::with_step(h));
        let r = residual_cauchy(&f, &conn, &xi).unwrap();
        println!("h = {h:e}  max residual = {:.3e}", r.max_abs());
    }
}
