//! Predictor-corrector tracking of kernel solutions along a complex parameter path.
//!
//! Unknowns are `x = (ω_0, …, ω_N, a, b)` where `a` sits on the `T` band and `b`
//! on the `S` band. In the scaled chart the parameter is `ε = ℓ^{−1/3}` and
//! `(a, b) = (t, s)`; at `ε = 0` the system is exactly the rescaled one. In the
//! unscaled chart the parameter is `ℓ` itself and `(a, b) = (E, F)`.

use crate::error::{QesError, Result};
use crate::linalg::{solve, vec_max_abs, CMatrix};
use crate::magyari::generators;
use crate::scalar::{c_real, cabs, cconj, cscale, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Scaled,
    Unscaled,
}

/// One-parameter family of overdetermined systems.
#[derive(Clone, Debug)]
pub struct Family<T: Real> {
    pub n: usize,
    pub beta: T,
    pub gamma: T,
    pub chart: Chart,
}

/// `p(τ) = p0 + (p1 − p0)τ + bulge·τ(1 − τ)` for `τ ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct Path<T: Real> {
    pub p0: C<T>,
    pub p1: C<T>,
    pub bulge: C<T>,
}

impl<T: Real> Path<T> {
    pub fn straight(p0: C<T>, p1: C<T>) -> Self {
        Path {
            p0,
            p1,
            bulge: C::new(T::zero(), T::zero()),
        }
    }

    pub fn at(&self, tau: &T) -> C<T> {
        let one = T::one();
        self.p0.clone()
            + cscale(&(self.p1.clone() - self.p0.clone()), tau)
            + cscale(&self.bulge, &(tau.clone() * (one - tau.clone())))
    }

    pub fn velocity(&self, tau: &T) -> C<T> {
        let one = T::one();
        let two = T::from_f64(2.0);
        self.p1.clone() - self.p0.clone() + cscale(&self.bulge, &(one - two * tau.clone()))
    }
}

#[derive(Clone, Debug)]
pub struct TrackOptions {
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub corrector_tol: f64,
    pub max_corrector: usize,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            initial_step: 0.02,
            max_step: 0.1,
            min_step: 1e-7,
            corrector_tol: 1e-10,
            max_corrector: 4,
        }
    }
}

/// Where tracking stopped when the step size fell below the floor.
#[derive(Clone, Debug)]
pub struct TrackFailure<T: Real> {
    pub tau: f64,
    pub x: Vec<C<T>>,
}

impl<T: Real> Family<T> {
    fn cols(&self) -> usize {
        self.n + 1
    }

    /// `(U, S0, T0, W)` and their parameter derivatives; `S = S0 + b`, `T = T0 + a`.
    fn row_coefficients(&self, row: usize, p: &C<T>) -> ([C<T>; 4], [C<T>; 3]) {
        let zero = C::new(T::zero(), T::zero());
        let r = T::from_i64(row as i64);
        let two = T::from_f64(2.0);
        match self.chart {
            Chart::Unscaled => {
                let g = generators(self.n, row, p, &self.beta, &self.gamma, &zero, &zero);
                let du = c_real(two.clone() * (r + T::one()));
                let ds = c_real(-(two.clone() * self.gamma.clone()));
                let dt = c_real(two * self.beta.clone());
                (g, [du, ds, dt])
            }
            Chart::Scaled => {
                let half = T::from_f64(0.5);
                let e2 = p.clone() * p.clone();
                let e3 = e2.clone() * p.clone();
                let rp1 = r.clone() + T::one();
                let u = c_real(rp1.clone()) - cscale(&e3, &(rp1.clone() * r.clone() * half.clone()));
                let s0 = cscale(&e2, &(self.gamma.clone() * r.clone()));
                let slope = (self.beta.clone() * (T::one() - two.clone() * r.clone()) - self.gamma.clone() * self.gamma.clone()) * half.clone();
                let t0 = cscale(p, &slope);
                let w = c_real(T::from_i64(self.n as i64 + 2 - row as i64));
                let du = cscale(&e2, &(-(rp1 * r.clone() * T::from_f64(1.5))));
                let ds = cscale(p, &(two * self.gamma.clone() * r));
                let dt = c_real(slope);
                ([u, s0, t0, w], [du, ds, dt])
            }
        }
    }

    /// Residual of the `N+2` rows plus the normalization `c·ω − 1`.
    pub fn residual(&self, x: &[C<T>], p: &C<T>, c: &[C<T>]) -> Vec<C<T>> {
        let n = self.n;
        let (a, b) = (&x[n + 1], &x[n + 2]);
        let mut out = Vec::with_capacity(n + 3);
        for row in 0..n + 2 {
            let (g, _) = self.row_coefficients(row, p);
            let mut v = C::new(T::zero(), T::zero());
            if row < n {
                v = v + g[0].clone() * x[row + 1].clone();
            }
            if row <= n {
                v = v + (g[1].clone() + b.clone()) * x[row].clone();
            }
            if row >= 1 && row - 1 <= n {
                v = v + (g[2].clone() + a.clone()) * x[row - 1].clone();
            }
            if row >= 2 {
                v = v + g[3].clone() * x[row - 2].clone();
            }
            out.push(v);
        }
        let dot = c.iter().zip(x).fold(C::new(T::zero(), T::zero()), |acc, (ci, xi)| acc + ci.clone() * xi.clone());
        out.push(dot - C::new(T::one(), T::zero()));
        out
    }

    pub fn jacobian(&self, x: &[C<T>], p: &C<T>, c: &[C<T>]) -> CMatrix<T> {
        let n = self.n;
        let size = n + 3;
        let (a, b) = (&x[n + 1], &x[n + 2]);
        let mut j = CMatrix::<T>::zeros(size, size);
        for row in 0..n + 2 {
            let (g, _) = self.row_coefficients(row, p);
            if row < n {
                j[(row, row + 1)] = g[0].clone();
            }
            if row <= n {
                j[(row, row)] = g[1].clone() + b.clone();
                j[(row, n + 2)] = x[row].clone();
            }
            if row >= 1 && row - 1 <= n {
                j[(row, row - 1)] = g[2].clone() + a.clone();
                j[(row, n + 1)] = x[row - 1].clone();
            }
            if row >= 2 {
                j[(row, row - 2)] = g[3].clone();
            }
        }
        for (k, ck) in c.iter().enumerate() {
            j[(n + 2, k)] = ck.clone();
        }
        j
    }

    /// `∂H/∂p`; the normalization row does not depend on `p`.
    pub fn parameter_derivative(&self, x: &[C<T>], p: &C<T>) -> Vec<C<T>> {
        let n = self.n;
        let mut out = Vec::with_capacity(n + 3);
        for row in 0..n + 2 {
            let (_, d) = self.row_coefficients(row, p);
            let mut v = C::new(T::zero(), T::zero());
            if row < n {
                v = v + d[0].clone() * x[row + 1].clone();
            }
            if row <= n {
                v = v + d[1].clone() * x[row].clone();
            }
            if row >= 1 && row - 1 <= n {
                v = v + d[2].clone() * x[row - 1].clone();
            }
            out.push(v);
        }
        out.push(C::new(T::zero(), T::zero()));
        out
    }

    /// Normalization vector `conj(ω)/|ω|²` for the current point.
    pub fn normalizer(&self, x: &[C<T>]) -> Vec<C<T>> {
        let w = &x[..self.cols()];
        let norm2 = w.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        w.iter().map(|z| cscale(&cconj(z), &(T::one() / norm2.clone()))).collect()
    }

    fn tangent(&self, x: &[C<T>], path: &Path<T>, tau: &T, c: &[C<T>]) -> Result<Vec<C<T>>> {
        let p = path.at(tau);
        let v = path.velocity(tau);
        let rhs: Vec<C<T>> = self
            .parameter_derivative(x, &p)
            .into_iter()
            .map(|z| -(z * v.clone()))
            .collect();
        solve(self.jacobian(x, &p, c), rhs)
    }

    /// Newton at fixed parameter. Returns the point and the size of the first and last updates.
    pub fn correct(&self, x0: &[C<T>], p: &C<T>, c: &[C<T>], tol: &T, max_iter: usize) -> Result<(Vec<C<T>>, T, T)> {
        let mut x = x0.to_vec();
        let mut first = None;
        let mut last = T::zero();
        for _ in 0..max_iter {
            let r = self.residual(&x, p, c);
            let dx = solve(self.jacobian(&x, p, c), r)?;
            let size = vec_max_abs(&dx) / (T::one() + vec_max_abs(&x));
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi = xi.clone() - di.clone();
            }
            if first.is_none() {
                first = Some(size.clone());
            }
            last = size.clone();
            if size <= tol.clone() {
                return Ok((x, first.unwrap_or_else(T::zero), last));
            }
        }
        Err(QesError::NoConvergence {
            iterations: max_iter,
            last_move: last.to_f64(),
        })
    }

    fn rk4(&self, x: &[C<T>], path: &Path<T>, tau: &T, h: &T, c: &[C<T>]) -> Result<Vec<C<T>>> {
        let half = T::from_f64(0.5);
        let hh = h.clone() * half.clone();
        let shift = |base: &[C<T>], k: &[C<T>], s: &T| -> Vec<C<T>> {
            base.iter().zip(k).map(|(b, d)| b.clone() + cscale(d, s)).collect()
        };
        let k1 = self.tangent(x, path, tau, c)?;
        let k2 = self.tangent(&shift(x, &k1, &hh), path, &(tau.clone() + hh.clone()), c)?;
        let k3 = self.tangent(&shift(x, &k2, &hh), path, &(tau.clone() + hh.clone()), c)?;
        let k4 = self.tangent(&shift(x, &k3, h), path, &(tau.clone() + h.clone()), c)?;
        let sixth = h.clone() / T::from_f64(6.0);
        let two = T::from_f64(2.0);
        Ok(x
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                let incr = k1[i].clone() + cscale(&k2[i], &two) + cscale(&k3[i], &two) + k4[i].clone();
                xi.clone() + cscale(&incr, &sixth)
            })
            .collect())
    }

    /// Follows the solution through `τ ∈ [0, 1]`; the start must satisfy the system at `path.at(0)`.
    pub fn track(&self, x0: &[C<T>], path: &Path<T>, opts: &TrackOptions) -> std::result::Result<Vec<C<T>>, TrackFailure<T>> {
        let mut x = x0.to_vec();
        let mut tau = 0.0f64;
        let mut h = opts.initial_step;
        let mut streak = 0;
        let tol = T::from_f64(opts.corrector_tol);
        let fail = |tau: f64, x: &[C<T>]| TrackFailure { tau, x: x.to_vec() };
        while tau < 1.0 {
            h = h.min(1.0 - tau);
            let c = self.normalizer(&x);
            let t0 = T::from_f64(tau);
            let t1 = if tau + h >= 1.0 { T::one() } else { T::from_f64(tau + h) };
            let step = self.rk4(&x, path, &t0, &(t1.clone() - t0.clone()), &c).and_then(|pred| {
                let jump = vec_max_abs(&diff(&pred, &x)) / (T::one() + vec_max_abs(&x));
                if jump > T::from_f64(0.25) {
                    return Err(QesError::Internal("predictor jump".into()));
                }
                let (xn, first, last) = self.correct(&pred, &path.at(&t1), &c, &tol, opts.max_corrector)?;
                let contraction_ok = first <= T::from_f64(1e-3) || last <= first.clone() * T::from_f64(0.5);
                let moved = vec_max_abs(&diff(&xn, &pred)) / (T::one() + vec_max_abs(&pred));
                if !contraction_ok || moved > T::from_f64(0.05) {
                    return Err(QesError::Internal("corrector drift".into()));
                }
                Ok(xn)
            });
            match step {
                Ok(xn) => {
                    x = xn;
                    tau = if t1 == T::one() { 1.0 } else { tau + h };
                    streak += 1;
                    if streak >= 2 {
                        h = (2.0 * h).min(opts.max_step);
                        streak = 0;
                    }
                }
                Err(_) => {
                    h *= 0.5;
                    streak = 0;
                    if h < opts.min_step {
                        return Err(fail(tau, &x));
                    }
                }
            }
        }
        Ok(x)
    }
}

fn diff<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

/// Largest residual entry relative to the size of the unknowns.
pub fn relative_residual<T: Real>(fam: &Family<T>, x: &[C<T>], p: &C<T>) -> T {
    let c = fam.normalizer(x);
    let r = fam.residual(x, p, &c);
    let rows = &r[..r.len() - 1];
    rows.iter().fold(T::zero(), |m, z| m.max_of(cabs(z))) / (T::one() + vec_max_abs(x))
}
