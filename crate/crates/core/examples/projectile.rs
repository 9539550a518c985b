//! Projectile under uniform gravity, written as CSV.

use nalgebra::Vector3;
use torsor::connection::GalileanConnection;
use torsor::simulate::{projectile_reference, run_scenario, IntegratorConfig, PointwiseState};

fn main() {
    let g = Vector3::new(0.0, 0.0, -9.81);
    let init = PointwiseState::new(0.0, 0.5, Vector3::zeros(), Vector3::new(4.0, 0.0, 6.0), Vector3::zeros()).unwrap();
    let traj = run_scenario(&init, &GalileanConnection::uniform(g, Vector3::zeros()), &IntegratorConfig::new(0.01, 1.0, 20).unwrap()).unwrap();
    print!("{}", traj.to_csv());
    let last = traj.last();
    eprintln!("error at t = 1: {:.2e}", last.max_diff(&projectile_reference(&init, &g, last.t)));
}
