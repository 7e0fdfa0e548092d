//! Continuation of asymptotic seeds from `ℓ = ∞` down to a finite target.
//!
//! Stage one follows `ε = ℓ^{−1/3}` from 0 along a complex ray to `|ℓ| = ρ`; stage
//! two moves `ℓ` on a straight segment to the real target. Complex paths avoid
//! the real points where branches collide and the degenerate values `2ℓ ∈ ℕ`.

use num_complex::Complex64;

use crate::solver::homotopy::{Chart, Family, Path, TrackFailure, TrackOptions};
use crate::solver::seeds::Seed;

/// Radius where tracking switches from the scaled to the unscaled chart.
pub fn switch_radius(n: usize, beta: f64, gamma: f64) -> f64 {
    (1.0 + 0.5 * n as f64 + beta.abs() + gamma.abs()).max(2.0)
}

fn scaled_start(seed: &Seed) -> Vec<Complex64> {
    let mut x = seed.h.clone();
    x.push(seed.t);
    x.push(seed.s);
    x
}

/// `(h, t, s)` at `ε` to `(ω, E, F)` at `ℓ = ε^{−3}`, using `ℓ^{1/3} = 1/ε`.
pub fn scaled_to_unscaled(x: &[Complex64], eps: Complex64, beta: f64, gamma: f64) -> Vec<Complex64> {
    let n = x.len() - 3;
    let ell = (eps * eps * eps).inv();
    let mut out: Vec<Complex64> = x[..=n].iter().enumerate().map(|(j, h)| h * eps.powi(j as i32)).collect();
    out.push(-2.0 * beta * ell + 2.0 * x[n + 1] / eps);
    out.push(2.0 * gamma * ell + 2.0 * x[n + 2] / (eps * eps));
    out
}

/// Tracks one seed to the real target `ell`; returns `(ω, E, F)` there.
pub fn continue_seed(
    n: usize,
    beta: f64,
    gamma: f64,
    ell: f64,
    seed: &Seed,
    angle: f64,
    opts: &TrackOptions,
) -> Result<Vec<Complex64>, TrackFailure<f64>> {
    let scaled = Family {
        n,
        beta,
        gamma,
        chart: Chart::Scaled,
    };
    let zero = Complex64::new(0.0, 0.0);
    let rho = switch_radius(n, beta, gamma);
    if ell >= rho {
        let eps = Complex64::new(ell.cbrt().recip(), 0.0);
        let path = Path {
            p0: zero,
            p1: eps,
            bulge: Complex64::new(0.0, 0.5 * angle) * eps,
        };
        let x = scaled.track(&scaled_start(seed), &path, opts)?;
        return Ok(scaled_to_unscaled(&x, eps, beta, gamma));
    }
    let eps1 = Complex64::from_polar(rho.cbrt().recip(), -angle / 3.0);
    let x = scaled.track(&scaled_start(seed), &Path::straight(zero, eps1), opts)?;
    let x = scaled_to_unscaled(&x, eps1, beta, gamma);
    let unscaled = Family {
        n,
        beta,
        gamma,
        chart: Chart::Unscaled,
    };
    let ell1 = (eps1 * eps1 * eps1).inv();
    unscaled.track(&x, &Path::straight(ell1, Complex64::new(ell, 0.0)), opts)
}
