//! Finite-ℓ QES pairs: alternating eigenproblems, Newton on the elimination
//! residuals and continuation from the strong-core limit.

pub mod continuation;
pub mod eigen;
pub mod fixed_point;
pub mod homotopy;
pub mod newton;
pub mod seeds;
pub mod sweep;

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{QesError, Result};
use crate::magyari::{normalize_max, MagyariSystem};
use crate::model::{Method, QesSolution};
use crate::scalar::{c_from_f64, c_to_f64, cabs, Mp128, Real, C};

pub use continuation::continue_seed;
pub use eigen::{eigen_e, eigen_f, SquareProblemPair};
pub use fixed_point::{fixed_point_search, fixed_point_search_counted};
pub use newton::{bordered_newton, bordered_polish, newton_polish, newton_polish_counted};
pub use seeds::{rescaled_seeds, Seed};
pub use sweep::{sweep, SweepPoint, SweepRecord};

use homotopy::TrackOptions;

/// Largest componentwise backward error accepted for a solution.
pub fn acceptance_tolerance<T: Real>() -> f64 {
    T::scaled_tol(1e-10).to_f64()
}

/// Relative distance below which two solutions are the same.
pub const DEDUP_TOL: f64 = 1e-8;

pub(crate) fn package<T: Real>(
    sys: &MagyariSystem<T>,
    e: &C<T>,
    f: &C<T>,
    omega: &[C<T>],
    method: Method,
    branch: Option<usize>,
) -> Result<QesSolution> {
    let omega = normalize_max(omega);
    let report = sys.residual_report(e, f, &omega)?;
    Ok(QesSolution {
        energy: c_to_f64(e),
        charge: c_to_f64(f),
        omega: omega.iter().map(c_to_f64).collect(),
        residual_norm: report.backward_error.to_f64(),
        method,
        precision_bits: T::BITS,
        branch,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Continuation,
    Scan,
}

impl Strategy {
    pub fn tag(self) -> &'static str {
        match self {
            Strategy::Continuation => "continuation",
            Strategy::Scan => "scan",
        }
    }
}

impl FromStr for Strategy {
    type Err = QesError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuation" => Ok(Strategy::Continuation),
            "scan" => Ok(Strategy::Scan),
            other => Err(QesError::Parse(format!("unknown strategy '{other}' (expected continuation or scan)"))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    pub solutions: Vec<QesSolution>,
    /// Paths started.
    pub paths: usize,
    /// Paths that could not be followed or polished to an accepted solution.
    pub lost: usize,
    /// Endpoints with vanishing leading block, i.e. the other Frobenius exponent.
    pub companions: usize,
    /// Solutions that needed more than the requested precision.
    pub escalated: usize,
}

/// True when the leading block `ω_0..ω_m` vanishes; `m` is the degenerate row, or 0.
pub fn is_companion(sys_degenerate: Option<usize>, omega: &[Complex64]) -> bool {
    let head = sys_degenerate.unwrap_or(0);
    let top = omega.iter().fold(0.0f64, |m, w| m.max(w.norm()));
    let lead = omega[..=head].iter().fold(0.0f64, |m, w| m.max(w.norm()));
    lead <= 1e-8 * top
}

pub fn same_solution(a: &QesSolution, b: &QesSolution) -> bool {
    let scale = 1.0 + a.energy.norm() + a.charge.norm();
    (a.energy - b.energy).norm() + (a.charge - b.charge).norm() <= DEDUP_TOL * scale
}

fn polish_at<T: Real>(sys: &MagyariSystem<T>, x: &[Complex64], branch: Option<usize>) -> Result<QesSolution> {
    let n = sys.n;
    let omega: Vec<C<T>> = x[..=n].iter().map(|z| c_from_f64(*z)).collect();
    bordered_polish(sys, c_from_f64(x[n + 1]), c_from_f64(x[n + 2]), &omega, branch)
}

/// Polishes in `T`; retries at 128 bits when the backward error is not acceptable.
fn polish_escalating<T: Real>(sys: &MagyariSystem<T>, x: &[Complex64], branch: Option<usize>) -> Option<(QesSolution, bool)> {
    if let Ok(s) = polish_at(sys, x, branch) {
        if s.residual_norm <= acceptance_tolerance::<T>() {
            return Some((s, false));
        }
    }
    if T::BITS >= 128 {
        return None;
    }
    let wide: MagyariSystem<Mp128> = sys.convert();
    match polish_at(&wide, x, branch) {
        Ok(s) if s.residual_norm <= acceptance_tolerance::<Mp128>() => Some((s, true)),
        _ => None,
    }
}

const ANGLES: [f64; 5] = [0.6, -0.6, 1.2, -1.2, 0.3];

fn push_unique(out: &mut Vec<QesSolution>, s: QesSolution) -> bool {
    if out.iter().any(|o| same_solution(o, &s)) {
        return false;
    }
    out.push(s);
    true
}

fn solve_continuation<T: Real>(sys: &MagyariSystem<T>) -> Result<SolveReport> {
    let n = sys.n;
    let (ell, beta, gamma) = (sys.ell.to_f64(), sys.beta.to_f64(), sys.gamma.to_f64());
    let seeds = rescaled_seeds(n)?;
    let degenerate = sys.degenerate_row();
    let loose = TrackOptions::default();
    let tight = TrackOptions {
        max_step: 0.02,
        initial_step: 0.005,
        ..TrackOptions::default()
    };
    // endpoints of all routes are pooled
    let mut pool: Vec<(QesSolution, bool)> = Vec::new();
    'routes: for opts in [&loose, &tight] {
        for angle in ANGLES {
            let mut found = 0;
            for seed in &seeds {
                let Ok(x) = continue_seed(n, beta, gamma, ell, seed, angle, opts) else {
                    continue;
                };
                let Some((s, wide)) = polish_escalating(sys, &x, seed.branch) else {
                    continue;
                };
                if !pool.iter().any(|o| same_solution(&o.0, &s)) {
                    pool.push((s, wide));
                }
                found += 1;
            }
            if found == seeds.len() && pool.len() >= seeds.len() {
                break 'routes;
            }
        }
    }
    let mut report = SolveReport {
        paths: seeds.len(),
        lost: seeds.len().saturating_sub(pool.len()),
        ..SolveReport::default()
    };
    for (s, wide) in pool {
        if is_companion(degenerate, &s.omega) {
            report.companions += 1;
        } else {
            report.escalated += usize::from(wide);
            report.solutions.push(s);
        }
    }
    Ok(report)
}

fn solve_scan<T: Real>(sys: &MagyariSystem<T>) -> Result<SolveReport> {
    let zero = C::new(T::zero(), T::zero());
    let spread = |v: Vec<C<T>>| v.iter().fold(0.0f64, |m, z| m.max(cabs(z).to_f64()));
    let radius = 1.0 + spread(eigen_e(sys, &zero)?) + spread(eigen_f(sys, &zero)?);
    let degenerate = sys.degenerate_row();
    let mut report = SolveReport::default();
    let steps = 9;
    for a in 0..steps {
        for b in 0..steps {
            let re = radius * (2.0 * a as f64 / (steps - 1) as f64 - 1.0);
            let im = radius * (2.0 * b as f64 / (steps - 1) as f64 - 1.0);
            let e: C<T> = c_from_f64(Complex64::new(re, im));
            for f in eigen_f(sys, &e)? {
                report.paths += 1;
                let Ok(k) = sys.pivoted_kernel(&e, &f) else { continue };
                let Some(w) = k.omega else { continue };
                let mut x: Vec<Complex64> = w.iter().map(c_to_f64).collect();
                x.push(c_to_f64(&e));
                x.push(c_to_f64(&f));
                let Some((s, wide)) = polish_escalating(sys, &x, None) else {
                    continue;
                };
                if is_companion(degenerate, &s.omega) {
                    continue;
                }
                if push_unique(&mut report.solutions, s) {
                    report.escalated += usize::from(wide);
                }
            }
        }
    }
    Ok(report)
}

/// All QES pairs the strategy finds, deduplicated and sorted by branch, then `|E|`.
pub fn solve_all<T: Real>(sys: &MagyariSystem<T>, strategy: Strategy) -> Result<SolveReport> {
    let mut report = match strategy {
        Strategy::Continuation => solve_continuation(sys)?,
        Strategy::Scan => solve_scan(sys)?,
    };
    report.solutions.sort_by(|a, b| {
        let key = |s: &QesSolution| s.branch.unwrap_or(usize::MAX);
        key(a).cmp(&key(b)).then(a.energy.norm().total_cmp(&b.energy.norm())).then(a.energy.im.total_cmp(&b.energy.im))
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n0_single_closed_form() {
        for ell in [0.0, 0.5, 3.0, 17.0] {
            let sys = MagyariSystem::new(0, ell, 1.0, 2.0);
            let r = solve_all(&sys, Strategy::Continuation).unwrap();
            assert_eq!(r.solutions.len(), 1);
            let s = &r.solutions[0];
            assert!((s.energy.re - (4.0 - (2.0 * ell - 1.0))).abs() < 1e-10);
            assert!((s.charge.re - 4.0 * ell).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_ell_gives_zero_charge() {
        for n in 1..=3 {
            let sys = MagyariSystem::new(n, 0.0, 0.5, 1.0 / 3.0);
            let r = solve_all(&sys, Strategy::Continuation).unwrap();
            assert_eq!(r.solutions.len(), n + 1);
            for s in &r.solutions {
                assert!(s.charge.norm() < 1e-10 * (1.0 + s.energy.norm()));
            }
        }
    }

    #[test]
    fn large_ell_has_one_real_solution_per_multiplet() {
        let sys = MagyariSystem::new(2, 1e4, 0.5, 0.25);
        let r = solve_all(&sys, Strategy::Continuation).unwrap();
        let labelled: Vec<usize> = r.solutions.iter().filter_map(|s| s.branch).collect();
        assert_eq!(labelled, vec![0, 1]);
    }

    #[test]
    fn scan_finds_the_n1_solutions() {
        let sys = MagyariSystem::new(1, 2.5, 0.5, 1.0 / 3.0);
        let cont = solve_all(&sys, Strategy::Continuation).unwrap().solutions;
        let scan = solve_all(&sys, Strategy::Scan).unwrap().solutions;
        assert_eq!(cont.len(), 3);
        for s in &scan {
            assert!(cont.iter().any(|c| same_solution(c, s)));
        }
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("scan".parse::<Strategy>().unwrap(), Strategy::Scan);
        assert!("grid".parse::<Strategy>().is_err());
    }
}
