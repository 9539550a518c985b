//! Free particle integrated in a rotating frame against the closed form.

use nalgebra::Vector3;
use torsor::connection::GalileanConnection;
use torsor::simulate::{rotating_free_reference, run_scenario, IntegratorConfig, PointwiseState};

fn main() {
    let omega = Vector3::z();
    let init = PointwiseState::new(0.0, 1.0, Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 0.3, 0.1), Vector3::zeros()).unwrap();
    let traj = run_scenario(&init, &GalileanConnection::rotating(omega, Vector3::zeros()), &IntegratorConfig::new(1e-3, 2.0, 500).unwrap()).unwrap();
    for s in &traj.samples {
        let exact = rotating_free_reference(&init, &omega, s.t);
        println!("t = {:.1}  x = {:?}  error = {:.2e}", s.t, s.x.as_slice(), s.max_diff(&exact));
    }
    println!("mass drift {:e}", traj.report.mass_drift);
}
