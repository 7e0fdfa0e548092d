//! Newton iterations: on the two elimination residuals, and on the full bordered system.

use crate::error::{QesError, Result};
use crate::linalg::{equilibrated_condition, solve, CMatrix};
use crate::magyari::MagyariSystem;
use crate::model::{Method, QesSolution};
use crate::scalar::{c_real, cabs, Real, C};
use crate::solver::homotopy::{Chart, Family};
use crate::solver::package;

const MAX_NEWTON: usize = 60;

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub solution: QesSolution,
    pub steps: usize,
}

pub fn newton_polish<T: Real>(sys: &MagyariSystem<T>, seed: (C<T>, C<T>)) -> Result<QesSolution> {
    newton_polish_counted(sys, seed).map(|o| o.solution)
}

/// 2-D Newton on `(R1, R2)(E, F)` with the forward-mode Jacobian of the elimination.
pub fn newton_polish_counted<T: Real>(sys: &MagyariSystem<T>, seed: (C<T>, C<T>)) -> Result<NewtonOutcome> {
    let (mut e, mut f) = seed;
    let tol = T::scaled_tol(1e-12);
    let cond_limit = T::one() / T::scaled_tol(1e-12);
    let mut last = f64::INFINITY;
    for steps in 0..=MAX_NEWTON {
        let el = sys.eliminate_with_jacobian(&e, &f)?;
        let r = cabs(&el.residuals[0]) + cabs(&el.residuals[1]);
        if r <= tol.clone() * el.scale.clone() {
            return Ok(NewtonOutcome {
                solution: package(sys, &e, &f, &el.omega, Method::Newton, None)?,
                steps,
            });
        }
        let j = CMatrix::from_rows(vec![
            vec![el.jacobian[0][0].clone(), el.jacobian[0][1].clone()],
            vec![el.jacobian[1][0].clone(), el.jacobian[1][1].clone()],
        ]);
        let cond = equilibrated_condition(&j)?;
        if !(cond <= cond_limit) {
            return Err(QesError::SingularJacobian { condition: cond.to_f64() });
        }
        let d = solve(j, vec![-el.residuals[0].clone(), -el.residuals[1].clone()])?;
        e = e + d[0].clone();
        f = f + d[1].clone();
        let size = T::one() + cabs(&e) + cabs(&f);
        last = ((cabs(&d[0]) + cabs(&d[1])) / size).to_f64();
        if !last.is_finite() {
            break;
        }
    }
    Err(QesError::NoConvergence {
        iterations: MAX_NEWTON,
        last_move: last,
    })
}

/// Newton on `(ω, E, F)` for all `N+2` rows plus a normalization; works at degenerate `ℓ`.
pub fn bordered_newton<T: Real>(sys: &MagyariSystem<T>, e: C<T>, f: C<T>, omega: &[C<T>], max_iter: usize) -> Result<(C<T>, C<T>, Vec<C<T>>)> {
    if omega.len() != sys.cols() {
        return Err(QesError::LengthMismatch {
            expected: sys.cols(),
            got: omega.len(),
        });
    }
    let fam = Family {
        n: sys.n,
        beta: sys.beta.clone(),
        gamma: sys.gamma.clone(),
        chart: Chart::Unscaled,
    };
    let mut x = omega.to_vec();
    x.push(e);
    x.push(f);
    let c = fam.normalizer(&x);
    let (x, _, _) = fam.correct(&x, &c_real(sys.ell.clone()), &c, &T::scaled_tol(1e-13), max_iter)?;
    let n = sys.n;
    Ok((x[n + 1].clone(), x[n + 2].clone(), x[..=n].to_vec()))
}

/// Bordered Newton packaged as a solution.
pub fn bordered_polish<T: Real>(sys: &MagyariSystem<T>, e: C<T>, f: C<T>, omega: &[C<T>], branch: Option<usize>) -> Result<QesSolution> {
    let (e, f, w) = bordered_newton(sys, e, f, omega, 30)?;
    package(sys, &e, &f, &w, Method::Newton, branch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn n0_jacobian_and_single_step() {
        let sys = MagyariSystem::new(0, 3.0, 1.0, 2.0);
        let el = sys.eliminate_with_jacobian(&z(0.3, 0.0), &z(-1.0, 0.5)).unwrap();
        assert_eq!(el.jacobian, [[z(0.0, 0.0), z(1.0, 0.0)], [z(1.0, 0.0), z(0.0, 0.0)]]);
        let o = newton_polish_counted(&sys, (z(0.3, 0.0), z(-1.0, 0.5))).unwrap();
        assert_eq!(o.steps, 1);
        assert!((o.solution.energy - z(-1.0, 0.0)).norm() < 1e-14);
        assert!((o.solution.charge - z(12.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn exact_seed_takes_no_steps() {
        let sys = MagyariSystem::new(0, 3.0, 1.0, 2.0);
        let o = newton_polish_counted(&sys, (z(-1.0, 0.0), z(12.0, 0.0))).unwrap();
        assert_eq!(o.steps, 0);
    }

    #[test]
    fn degenerate_pivot_is_delegated() {
        let sys = MagyariSystem::new(2, 0.0, 0.5, 0.5);
        assert!(matches!(newton_polish(&sys, (z(1.0, 0.0), z(1.0, 0.0))), Err(QesError::DegeneratePivot { .. })));
    }

    fn fd_error(sys: &MagyariSystem<f64>, e: Complex64, f: Complex64) -> f64 {
        let el = sys.eliminate_with_jacobian(&e, &f).unwrap();
        let h = 1e-6 * (1.0 + e.norm() + f.norm());
        let r = |e: Complex64, f: Complex64| sys.forward_eliminate(&e, &f).unwrap().residuals;
        let (ep, em) = (r(e + h, f), r(e - h, f));
        let (fp, fm) = (r(e, f + h), r(e, f - h));
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..2 {
            let de = (ep[i] - em[i]) / (2.0 * h);
            let df = (fp[i] - fm[i]) / (2.0 * h);
            num = num.max((de - el.jacobian[i][0]).norm()).max((df - el.jacobian[i][1]).norm());
            den = den.max(el.jacobian[i][0].norm()).max(el.jacobian[i][1].norm());
        }
        num / den
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn jacobian_matches_central_differences(n in 0usize..5, ell in 0.6f64..5.0, beta in -1.0f64..1.0, gamma in -1.0f64..1.0,
                                                er in -3.0f64..3.0, ei in -1.0f64..1.0, fr in -3.0f64..3.0, fi in -1.0f64..1.0) {
            let sys = MagyariSystem::new(n, ell, beta, gamma);
            prop_assume!(sys.degenerate_row().is_none());
            prop_assert!(fd_error(&sys, z(er, ei), z(fr, fi)) < 1e-6);
        }
    }
}
