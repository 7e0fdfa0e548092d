//! Benchmark fixtures shared by the criterion targets.

use qes_core::magyari::MagyariSystem;

/// Generic couplings away from the degenerate values.
pub const BETA: f64 = 0.5;
pub const GAMMA: f64 = 1.0 / 3.0;

pub fn system(n: usize, ell: f64) -> MagyariSystem<f64> {
    MagyariSystem::new(n, ell, BETA, GAMMA)
}
