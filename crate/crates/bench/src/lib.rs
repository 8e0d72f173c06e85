//! Shared setup helpers for the stepper benchmarks.

use std::sync::Arc;

use sumopt_core::objectives::{quadratic, Objective};
use sumopt_core::oracles::{gaussian_oracle, GaussianOracle, NoiseSpec};

/// A quadratic problem of the given dimension with unit curvature and the
/// matching noisy oracle.
pub fn quadratic_problem(dim: usize, sigma: f64) -> (Arc<dyn Objective>, GaussianOracle) {
    let obj: Arc<dyn Objective> = Arc::new(quadratic(dim, 1.0).expect("valid quadratic"));
    let oracle = gaussian_oracle(obj.clone(), NoiseSpec::new(sigma, 0.0).expect("valid noise"));
    (obj, oracle)
}
