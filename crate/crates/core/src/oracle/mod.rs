//! Independent ground truth: exact elimination for small `N`, the ODE identity
//! certificate, the exact multiplet scan and the contour decay rate.

pub mod contour;
pub mod exact;
pub mod ode;
pub mod scan;

pub use contour::{decay_rate, decay_rate_at, wavefunction, ContourRay, Side};
pub use exact::{exact_solutions_small_n, ExactOracle, ExactSolution, RationalSolution, MAX_EXACT_N};
pub use ode::{ode_certificate, ode_certificate_exact, ode_residual, OdeField, OdeInputs, OdeResidual};
pub use scan::{rescaled_root_scan, MinorFactorization, RootScan, MAX_SCAN_N};
