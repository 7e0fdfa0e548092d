//! One asymptotic branch followed across a grid of `ℓ`, recorded in scaled coordinates.

use num_complex::Complex64;

use crate::asymptotic::multiplets;
use crate::error::{QesError, Result};
use crate::magyari::MagyariSystem;
use crate::model::{Method, QesSolution};
use crate::scalar::{c_from_f64, c_to_f64, Real, C};
use crate::solver::homotopy::{Chart, Family, Path, TrackOptions};
use crate::solver::{acceptance_tolerance, package};

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub ell: f64,
    pub solution: QesSolution,
    /// `(F − 2γℓ)/(2ℓ^{2/3})`.
    pub s: Complex64,
    /// `(E + 2βℓ)/(2ℓ^{1/3})`.
    pub t: Complex64,
}

#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub n: usize,
    pub k: usize,
    pub t_k: i64,
    pub beta: f64,
    pub gamma: f64,
    /// Ascending in `ℓ`.
    pub points: Vec<SweepPoint>,
    /// Slope of `log|t − t_k|` against `log ℓ` over the top two decades.
    pub exponent_t: Option<f64>,
    pub exponent_s: Option<f64>,
    /// Set when the branch was lost before reaching the smallest `ℓ`.
    pub incomplete: bool,
}

fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let top = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(l, d)| *l >= top / 100.0 * (1.0 - 1e-12) && *d > 0.0)
        .map(|(l, d)| (l.ln(), d.ln()))
        .collect();
    if used.len() < 2 {
        return None;
    }
    let m = used.len() as f64;
    let (sx, sy) = used.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = used
        .iter()
        .fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - mx) * (y - my), d + (x - mx) * (x - mx)));
    (den > 0.0).then(|| num / den)
}

fn point_at<T: Real>(n: usize, beta: &T, gamma: &T, ell: f64, x: &[Complex64], k: usize) -> Result<SweepPoint> {
    let fam = Family {
        n,
        beta: beta.clone(),
        gamma: gamma.clone(),
        chart: Chart::Scaled,
    };
    let ell_t = T::from_f64(ell);
    let eps = T::one() / ell_t.cbrt();
    let eps_c = C::new(eps.clone(), T::zero());
    let xt: Vec<C<T>> = x.iter().map(|z| c_from_f64(*z)).collect();
    let c = fam.normalizer(&xt);
    let (xt, _, _) = fam.correct(&xt, &eps_c, &c, &T::scaled_tol(1e-13), 30)?;
    let (t, s) = (xt[n + 1].clone(), xt[n + 2].clone());
    let two = T::from_f64(2.0);
    let e = C::new(-(two.clone() * beta.clone() * ell_t.clone()), T::zero()) + t.clone() * C::new(two.clone() / eps.clone(), T::zero());
    let f = C::new(two.clone() * gamma.clone() * ell_t.clone(), T::zero()) + s.clone() * C::new(two / (eps.clone() * eps.clone()), T::zero());
    let mut pow = T::one();
    let omega: Vec<C<T>> = xt[..=n]
        .iter()
        .map(|h| {
            let w = h.clone() * C::new(pow.clone(), T::zero());
            pow = pow.clone() * eps.clone();
            w
        })
        .collect();
    let sys = MagyariSystem::new(n, ell_t, beta.clone(), gamma.clone());
    let solution = package(&sys, &e, &f, &omega, Method::Newton, Some(k))?;
    if !(solution.residual_norm <= acceptance_tolerance::<T>()) {
        return Err(QesError::NoConvergence {
            iterations: 30,
            last_move: solution.residual_norm,
        });
    }
    Ok(SweepPoint {
        ell,
        solution,
        s: c_to_f64(&s),
        t: c_to_f64(&t),
    })
}

/// Follows branch `k` from `ℓ = ∞` down through the grid, polishing at each point in `T`.
pub fn sweep<T: Real>(beta: &T, gamma: &T, n: usize, k: usize, grid: &[f64]) -> Result<SweepRecord> {
    if grid.is_empty() {
        return Err(QesError::Domain("sweep grid is empty".into()));
    }
    if grid.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(QesError::Domain("sweep grid entries must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QesError::Domain("sweep grid must be strictly increasing".into()));
    }
    let mult = multiplets(n)?;
    let m = mult
        .get(k)
        .ok_or_else(|| QesError::Domain(format!("branch k = {k} outside 0..={} for N = {n}", n / 2)))?;
    let fam = Family {
        n,
        beta: beta.to_f64(),
        gamma: gamma.to_f64(),
        chart: Chart::Scaled,
    };
    let mut x: Vec<Complex64> = m.h_f64().into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let tk = Complex64::new(m.t_k as f64, 0.0);
    x.push(tk);
    x.push(tk);
    let opts = TrackOptions::default();
    let mut eps_prev = Complex64::new(0.0, 0.0);
    let mut points = Vec::new();
    let mut incomplete = false;
    for &ell in grid.iter().rev() {
        let eps = Complex64::new(ell.cbrt().recip(), 0.0);
        let tracked = fam.track(&x, &Path::straight(eps_prev, eps), &opts).or_else(|_| {
            let bulge = Complex64::new(0.0, 0.3) * (eps - eps_prev);
            fam.track(&x, &Path { p0: eps_prev, p1: eps, bulge }, &opts)
        });
        let Ok(xn) = tracked else {
            incomplete = true;
            break;
        };
        match point_at(n, beta, gamma, ell, &xn, k) {
            Ok(p) => points.push(p),
            Err(_) => {
                incomplete = true;
                break;
            }
        }
        x = xn;
        eps_prev = eps;
    }
    points.reverse();
    let dev = |f: fn(&SweepPoint) -> Complex64| -> Vec<(f64, f64)> { points.iter().map(|p| (p.ell, (f(p) - tk).norm())).collect() };
    let exponent_t = fit_exponent(&dev(|p| p.t));
    let exponent_s = fit_exponent(&dev(|p| p.s));
    Ok(SweepRecord {
        n,
        k,
        t_k: m.t_k,
        beta: beta.to_f64(),
        gamma: gamma.to_f64(),
        points,
        exponent_t,
        exponent_s,
        incomplete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_has_no_fit() {
        let r = sweep(&0.5f64, &0.25, 2, 0, &[1e3]).unwrap();
        assert_eq!(r.points.len(), 1);
        assert!(r.exponent_t.is_none());
    }

    #[test]
    fn grid_validation() {
        assert!(sweep(&0.5f64, &0.25, 2, 0, &[1e3, 1e2]).is_err());
        assert!(sweep(&0.5f64, &0.25, 2, 0, &[0.0, 1e2]).is_err());
        assert!(sweep(&0.5f64, &0.25, 2, 2, &[1e2]).is_err());
    }

    #[test]
    fn branches_approach_their_multiplets() {
        let grid = [1e2, 1e3, 1e4, 1e5, 1e6];
        for (k, tk) in [(0usize, 2.0), (1, -1.0)] {
            let r = sweep(&0.5f64, &0.25, 2, k, &grid).unwrap();
            assert!(!r.incomplete);
            let d: Vec<f64> = r.points.iter().map(|p| (p.t - tk).norm()).collect();
            assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
            assert!(d[4] < 0.1);
        }
    }

    #[test]
    fn exponent_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [1e2, 1e3, 1e4].iter().map(|&l: &f64| (l, 3.0 * l.powf(-1.0 / 3.0))).collect();
        assert!((fit_exponent(&pts).unwrap() + 1.0 / 3.0).abs() < 1e-12);
    }
}
