//! Scenarios shipped with the crate.

use std::path::Path;

use super::{Scenario, ScenarioError};

#[derive(Clone, Copy, Debug)]
pub struct BundledScenario {
    pub name: &'static str,
    pub source: &'static str,
}

impl BundledScenario {
    pub fn load(&self) -> Result<Scenario, ScenarioError> {
        Scenario::from_str(self.source, &Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios"))
    }
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(BundledScenario { name: $name, source: include_str!(concat!("../../scenarios/", $name, ".json")) }),*]
    };
}

static BUNDLED: &[BundledScenario] = bundled![
    "free_particle",
    "pointwise_projectile",
    "pointwise_coriolis",
    "pointwise_spin_precession",
    "pointwise_residual",
    "cauchy_manufactured",
    "cauchy_convergence",
    "cauchy_expr",
    "rod_statics_1d",
    "rod_spinning_ring_1d",
    "rod_convergence_1d",
    "plate_2d",
    "plate_self_weight_2d",
    "sphere_shell_2d",
    "cylinder_shell_2d",
    "spinning_plate_2d",
    "wave_3d_cosserat",
    "random_3d_cosserat",
    "reduction_disc",
    "reduction_rectangle",
    "reduction_pipe_flow",
    "reduction_bending_2d",
];

/// Every bundled scenario, in listing order.
pub fn bundled() -> &'static [BundledScenario] {
    BUNDLED
}

pub fn find_bundled(name: &str) -> Option<&'static BundledScenario> {
    BUNDLED.iter().find(|b| b.name == name)
}
