//! Quasi-exact solvability conditions for the PT-symmetric quartic oscillator
//! `V(x) = −x⁴ + iBx³ + Cx² + iDx + iF/x + G/x²` with a centrifugal term.

pub mod asymptotic;
pub mod error;
pub mod linalg;
pub mod magyari;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod scalar;
pub mod solver;

pub use error::{QesError, Result};
pub use magyari::{Band, MagyariSystem, ResidualReport};
pub use model::{
    bbl_parameters, d_coupling, internal_from_model, model_from_internal, parse_rational, Ell,
    InternalParameters, Method, ModelParameters, QesSolution,
};
pub use scalar::{Mp128, Mp256, Precision, Real};
pub use asymptotic::{asymptotic_spectrum, asymptotic_spectrum_real, multiplets, AsymptoticMultiplet, ScaledCoordinates};
pub use oracle::{decay_rate, ode_certificate, rescaled_root_scan, ContourRay, ExactOracle, RootScan, Side};
pub use solver::{fixed_point_search, newton_polish, solve_all, sweep, SolveReport, Strategy, SweepPoint, SweepRecord};
