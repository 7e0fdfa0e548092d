//! Alternating nearest-eigenvalue iteration `F ← F_e(E)`, `E ← E_e(F)`.

use crate::error::{QesError, Result};
use crate::magyari::MagyariSystem;
use crate::model::{Method, QesSolution};
use crate::scalar::{cabs, Real, C};
use crate::solver::eigen::{eigen_e, eigen_f, nearest};
use crate::solver::package;

/// Solution together with the number of sweeps used.
#[derive(Clone, Debug)]
pub struct FixedPointOutcome {
    pub solution: QesSolution,
    pub iterations: usize,
}

pub fn fixed_point_search<T: Real>(sys: &MagyariSystem<T>, seed: (C<T>, C<T>), max_iter: usize) -> Result<QesSolution> {
    fixed_point_search_counted(sys, seed, max_iter).map(|o| o.solution)
}

pub fn fixed_point_search_counted<T: Real>(sys: &MagyariSystem<T>, seed: (C<T>, C<T>), max_iter: usize) -> Result<FixedPointOutcome> {
    let (mut e, mut f) = seed;
    let tol = T::scaled_tol(1e-12);
    let finite = |z: &C<T>| cabs(z).to_f64().is_finite();
    if !finite(&e) || !finite(&f) {
        return Err(QesError::Domain("fixed-point seed must be finite".into()));
    }
    let pick = |values: Vec<C<T>>, target: &C<T>| nearest(&values, target).ok_or_else(|| QesError::Internal("empty spectrum".into()));
    let mut f_next = pick(eigen_f(sys, &e)?, &f)?;
    let mut last_move = f64::INFINITY;
    for it in 1..=max_iter {
        let f_old = f.clone();
        let e_old = e.clone();
        f = f_next;
        e = pick(eigen_e(sys, &f)?, &e)?;
        f_next = pick(eigen_f(sys, &e)?, &f)?;
        let size = T::one() + cabs(&e) + cabs(&f);
        let settle = cabs(&(f_next.clone() - f.clone()));
        if settle <= tol.clone() * size.clone() {
            let Some(omega) = sys.pivoted_kernel(&e, &f)?.omega else {
                return Err(QesError::NoConvergence {
                    iterations: it,
                    last_move: settle.to_f64(),
                });
            };
            return Ok(FixedPointOutcome {
                solution: package(sys, &e, &f, &omega, Method::FixedPoint, None)?,
                iterations: it,
            });
        }
        last_move = ((cabs(&(e.clone() - e_old)) + cabs(&(f.clone() - f_old))) / size).to_f64();
        if !last_move.is_finite() {
            break;
        }
    }
    Err(QesError::NoConvergence {
        iterations: max_iter,
        last_move,
    })
}
