//! The finite-ℓ termination conditions: an `(N+2) × (N+1)` banded linear system
//! for the coefficients ω_0..ω_N of the polynomial ansatz.
//!
//! Row `n` (0 ≤ n ≤ N+1) reads
//! `U_n ω_{n+1} + S_n(F) ω_n + T_n(E) ω_{n−1} + W_n ω_{n−2} = 0` with
//! `U_n = (2ℓ−n)(n+1)`, `S_n = F − 2γ(ℓ−n)`, `T_n = E − γ² + β(2ℓ−2n+1)`, `W_n = 2(N+2−n)`.

use num_traits::{One, Zero};

use crate::error::{QesError, Result};
use crate::linalg::{self, CMatrix};
use crate::model::InternalParameters;
use crate::scalar::{c_real, cabs, cscale, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    U,
    S,
    T,
    W,
}

impl Band {
    pub const ALL: [Band; 4] = [Band::U, Band::S, Band::T, Band::W];

    /// Column offset relative to the row index.
    pub fn offset(self) -> isize {
        match self {
            Band::U => 1,
            Band::S => 0,
            Band::T => -1,
            Band::W => -2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Band::U => "U",
            Band::S => "S",
            Band::T => "T",
            Band::W => "W",
        }
    }

    /// Column addressed by `(row, self)` in an `N+1`-column matrix.
    pub fn column(self, row: usize, n: usize) -> Option<usize> {
        let col = row as isize + self.offset();
        (0..=n as isize).contains(&col).then_some(col as usize)
    }
}

/// `(U_n, S_n(F), T_n(E), W_n)` with a possibly complex ℓ.
pub(crate) fn generators<T: Real>(
    big_n: usize,
    n: usize,
    ell: &C<T>,
    beta: &T,
    gamma: &T,
    e: &C<T>,
    f: &C<T>,
) -> [C<T>; 4] {
    let nn = T::from_i64(n as i64);
    let two = T::from_f64(2.0);
    let two_ell = cscale(ell, &two);
    let u = cscale(&(two_ell.clone() - c_real(nn.clone())), &T::from_i64(n as i64 + 1));
    let s = f.clone() - cscale(&(ell.clone() - c_real(nn.clone())), &(two.clone() * gamma.clone()));
    let t = e.clone() - c_real(gamma.clone() * gamma.clone())
        + cscale(&(two_ell - c_real(two.clone() * nn) + C::one()), beta);
    let w = c_real(T::from_i64(2 * (big_n as i64 + 2 - n as i64)));
    [u, s, t, w]
}

#[derive(Clone, Debug, PartialEq)]
pub struct MagyariSystem<T: Real> {
    pub n: usize,
    pub ell: T,
    pub beta: T,
    pub gamma: T,
}

/// Output of forward elimination: ω with ω_0 = 1 and the two surplus-row residuals.
#[derive(Clone, Debug)]
pub struct Elimination<T: Real> {
    pub omega: Vec<C<T>>,
    pub residuals: [C<T>; 2],
    /// Largest sum of term moduli over the two surplus rows.
    pub scale: T,
}

/// Forward elimination carrying ∂/∂E and ∂/∂F of every quantity.
#[derive(Clone, Debug)]
pub struct EliminationJacobian<T: Real> {
    pub omega: Vec<C<T>>,
    pub residuals: [C<T>; 2],
    /// `[[∂R1/∂E, ∂R1/∂F], [∂R2/∂E, ∂R2/∂F]]`.
    pub jacobian: [[C<T>; 2]; 2],
    pub scale: T,
}

#[derive(Clone, Debug)]
pub struct Kernel<T: Real> {
    pub dim: usize,
    /// Kernel vector for the smallest singular value, normalized to unit max entry.
    pub omega: Option<Vec<C<T>>>,
    /// Singular values of the equilibrated matrix, descending.
    pub singular_values: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct ResidualReport<T: Real> {
    pub row_residuals: Vec<C<T>>,
    pub max_abs: T,
    /// Largest matrix entry modulus times largest |ω_n|.
    pub scale: T,
    /// Normwise backward error: `‖Aω‖_∞ / (‖A‖_∞ ‖ω‖_∞)`.
    pub backward_error: T,
}

impl<T: Real> MagyariSystem<T> {
    pub fn new(n: usize, ell: T, beta: T, gamma: T) -> Self {
        MagyariSystem { n, ell, beta, gamma }
    }

    pub fn from_internal(p: &InternalParameters, n: usize) -> Self {
        MagyariSystem {
            n,
            ell: p.ell.to_real(),
            beta: T::from_ratio(&p.beta),
            gamma: T::from_ratio(&p.gamma),
        }
    }

    pub fn convert<U: Real>(&self) -> MagyariSystem<U> {
        MagyariSystem {
            n: self.n,
            ell: crate::scalar::convert_real(&self.ell),
            beta: crate::scalar::convert_real(&self.beta),
            gamma: crate::scalar::convert_real(&self.gamma),
        }
    }

    pub fn rows(&self) -> usize {
        self.n + 2
    }

    pub fn cols(&self) -> usize {
        self.n + 1
    }

    /// Relative pivot threshold: `1e-10` at 64 bits, tightened with precision.
    pub fn pivot_threshold() -> T {
        T::scaled_tol(1e-10)
    }

    /// Relative singular-value cutoff for the numerical kernel.
    pub fn kernel_tolerance() -> T {
        T::scaled_tol(1e-8)
    }

    fn row_generators(&self, n: usize, e: &C<T>, f: &C<T>) -> [C<T>; 4] {
        generators(self.n, n, &c_real(self.ell.clone()), &self.beta, &self.gamma, e, f)
    }

    pub fn u(&self, n: usize) -> T {
        (T::from_f64(2.0) * self.ell.clone() - T::from_i64(n as i64)) * T::from_i64(n as i64 + 1)
    }

    pub fn w(&self, n: usize) -> T {
        T::from_i64(2 * (self.n as i64 + 2 - n as i64))
    }

    /// Generator value at `(row, band)`; the cell must lie inside the matrix.
    pub fn entry(&self, row: usize, band: Band, e: &C<T>, f: &C<T>) -> Result<C<T>> {
        if row > self.n + 1 || band.column(row, self.n).is_none() {
            return Err(QesError::Index {
                row,
                band: band.name(),
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let g = self.row_generators(row, e, f);
        Ok(match band {
            Band::U => g[0].clone(),
            Band::S => g[1].clone(),
            Band::T => g[2].clone(),
            Band::W => g[3].clone(),
        })
    }

    pub fn assemble(&self, e: &C<T>, f: &C<T>) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.rows(), self.cols());
        for row in 0..self.rows() {
            let g = self.row_generators(row, e, f);
            for (band, value) in Band::ALL.iter().zip(g) {
                if let Some(col) = band.column(row, self.n) {
                    m[(row, col)] = value;
                }
            }
        }
        m
    }

    /// Smallest `m ≤ N−1` with `U_m` below the pivot threshold, if any.
    pub fn degenerate_row(&self) -> Option<usize> {
        let zero = C::<T>::zero();
        (0..self.n).find(|&m| {
            let g = self.row_generators(m, &zero, &zero);
            let row_max = g.iter().fold(T::zero(), |acc, z| acc.max_of(cabs(z)));
            cabs(&g[0]) < Self::pivot_threshold() * row_max.max_of(T::one())
        })
    }

    fn pivot_check(&self, n: usize, g: &[C<T>; 4]) -> Result<()> {
        let mut row_max = cabs(&g[0]).max_of(cabs(&g[1]));
        if n >= 1 {
            row_max = row_max.max_of(cabs(&g[2]));
        }
        if n >= 2 {
            row_max = row_max.max_of(cabs(&g[3]));
        }
        let u = cabs(&g[0]);
        if u.is_zero() || u < Self::pivot_threshold() * row_max.clone() {
            let rel = if row_max.is_zero() {
                0.0
            } else {
                (u / row_max).to_f64()
            };
            return Err(QesError::DegeneratePivot { n, magnitude: rel });
        }
        Ok(())
    }

    /// Solves rows 0..N−1 for ω_1..ω_N from ω_0 = 1; rows N and N+1 give `(R1, R2)`.
    pub fn forward_eliminate(&self, e: &C<T>, f: &C<T>) -> Result<Elimination<T>> {
        let n = self.n;
        let mut omega: Vec<C<T>> = Vec::with_capacity(n + 1);
        omega.push(C::one());
        for row in 0..n {
            let g = self.row_generators(row, e, f);
            self.pivot_check(row, &g)?;
            let acc = self.lower_terms(row, &g, &omega);
            omega.push(-acc / g[0].clone());
        }
        let mut residuals = [C::zero(), C::zero()];
        let mut scale = T::zero();
        for (slot, row) in [n, n + 1].into_iter().enumerate() {
            let g = self.row_generators(row, e, f);
            residuals[slot] = self.lower_terms(row, &g, &omega);
            scale = scale.max_of(self.lower_magnitude(row, &g, &omega));
        }
        Ok(Elimination { omega, residuals, scale })
    }

    /// `S_n ω_n + T_n ω_{n−1} + W_n ω_{n−2}` over the columns present.
    fn lower_terms(&self, row: usize, g: &[C<T>; 4], w: &[C<T>]) -> C<T> {
        let mut acc = C::<T>::zero();
        if row <= self.n {
            acc = acc + g[1].clone() * w[row].clone();
        }
        if row >= 1 && row - 1 <= self.n {
            acc = acc + g[2].clone() * w[row - 1].clone();
        }
        if row >= 2 && row - 2 <= self.n {
            acc = acc + g[3].clone() * w[row - 2].clone();
        }
        acc
    }

    fn lower_magnitude(&self, row: usize, g: &[C<T>; 4], w: &[C<T>]) -> T {
        let mut acc = T::zero();
        if row <= self.n {
            acc = acc + cabs(&g[1]) * cabs(&w[row]);
        }
        if row >= 1 && row - 1 <= self.n {
            acc = acc + cabs(&g[2]) * cabs(&w[row - 1]);
        }
        if row >= 2 && row - 2 <= self.n {
            acc = acc + cabs(&g[3]) * cabs(&w[row - 2]);
        }
        acc
    }

    /// Forward elimination with forward-mode derivatives in E and F.
    pub fn eliminate_with_jacobian(&self, e: &C<T>, f: &C<T>) -> Result<EliminationJacobian<T>> {
        let n = self.n;
        let zero = C::<T>::zero();
        let mut w: Vec<C<T>> = vec![C::one()];
        let mut we: Vec<C<T>> = vec![zero.clone()];
        let mut wf: Vec<C<T>> = vec![zero.clone()];
        // row value and its derivatives given ω up to the row's lower columns
        let eval = |row: usize, g: &[C<T>; 4], w: &[C<T>], we: &[C<T>], wf: &[C<T>]| {
            let mut v = zero.clone();
            let mut ve = zero.clone();
            let mut vf = zero.clone();
            if row <= n {
                v = v + g[1].clone() * w[row].clone();
                ve = ve + g[1].clone() * we[row].clone();
                vf = vf + g[1].clone() * wf[row].clone() + w[row].clone();
            }
            if row >= 1 && row - 1 <= n {
                v = v + g[2].clone() * w[row - 1].clone();
                ve = ve + g[2].clone() * we[row - 1].clone() + w[row - 1].clone();
                vf = vf + g[2].clone() * wf[row - 1].clone();
            }
            if row >= 2 && row - 2 <= n {
                v = v + g[3].clone() * w[row - 2].clone();
                ve = ve + g[3].clone() * we[row - 2].clone();
                vf = vf + g[3].clone() * wf[row - 2].clone();
            }
            (v, ve, vf)
        };
        for row in 0..n {
            let g = self.row_generators(row, e, f);
            self.pivot_check(row, &g)?;
            let (v, ve, vf) = eval(row, &g, &w, &we, &wf);
            let u = g[0].clone();
            w.push(-v / u.clone());
            we.push(-ve / u.clone());
            wf.push(-vf / u);
        }
        let mut residuals = [zero.clone(), zero.clone()];
        let mut jacobian = [[zero.clone(), zero.clone()], [zero.clone(), zero.clone()]];
        let mut scale = T::zero();
        for (slot, row) in [n, n + 1].into_iter().enumerate() {
            let g = self.row_generators(row, e, f);
            let (v, ve, vf) = eval(row, &g, &w, &we, &wf);
            residuals[slot] = v;
            jacobian[slot] = [ve, vf];
            scale = scale.max_of(self.lower_magnitude(row, &g, &w));
        }
        Ok(EliminationJacobian {
            omega: w,
            residuals,
            jacobian,
            scale,
        })
    }

    /// Numerical kernel of the full matrix via an equilibrated Jacobi SVD.
    pub fn pivoted_kernel(&self, e: &C<T>, f: &C<T>) -> Result<Kernel<T>> {
        kernel_of(&self.assemble(e, f), Self::kernel_tolerance())
    }

    pub fn residual_report(&self, e: &C<T>, f: &C<T>, omega: &[C<T>]) -> Result<ResidualReport<T>> {
        if omega.len() != self.cols() {
            return Err(QesError::LengthMismatch {
                expected: self.cols(),
                got: omega.len(),
            });
        }
        let a = self.assemble(e, f);
        Ok(residual_of(&a, omega))
    }
}

/// Kernel of an equilibrated `m × n` matrix (`m ≥ n`) with relative cutoff `tol`.
pub fn kernel_of<T: Real>(a: &CMatrix<T>, tol: T) -> Result<Kernel<T>> {
    let (r, c) = linalg::equilibrate_guarded(a);
    let scaled = linalg::scale_rows_cols(a, &r, &c);
    let svd = linalg::jacobi_svd(&scaled)?;
    let top = svd.singular_values.first().cloned().unwrap_or_else(T::zero);
    let dim = if top.is_zero() {
        a.cols()
    } else {
        svd.singular_values
            .iter()
            .filter(|s| (*s).clone() < tol.clone() * top.clone())
            .count()
    };
    let omega = (dim >= 1).then(|| {
        let y = svd.right_vector(a.cols() - 1);
        let x: Vec<C<T>> = y.iter().zip(&c).map(|(yi, ci)| cscale(yi, ci)).collect();
        normalize_max(&x)
    });
    Ok(Kernel {
        dim,
        omega,
        singular_values: svd.singular_values,
    })
}

pub fn residual_of<T: Real>(a: &CMatrix<T>, omega: &[C<T>]) -> ResidualReport<T> {
    let row_residuals = linalg::mat_vec(a, omega);
    let max_abs = linalg::vec_max_abs(&row_residuals);
    let scale = linalg::max_abs(a) * linalg::vec_max_abs(omega);
    let norm_a = (0..a.rows()).fold(T::zero(), |m, i| m.max_of(a.row(i).iter().fold(T::zero(), |acc, z| acc + cabs(z))));
    let denom = norm_a * linalg::vec_max_abs(omega);
    let backward_error = if !denom.is_zero() {
        max_abs.clone() / denom
    } else if max_abs.is_zero() {
        T::zero()
    } else {
        T::from_f64(f64::INFINITY)
    };
    ResidualReport {
        row_residuals,
        max_abs,
        scale,
        backward_error,
    }
}

/// Divides by the largest-modulus entry so that entry becomes exactly 1.
pub fn normalize_max<T: Real>(x: &[C<T>]) -> Vec<C<T>> {
    let mut best = 0;
    let mut best_abs = T::zero();
    for (i, z) in x.iter().enumerate() {
        let a = cabs(z);
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs.is_zero() {
        return x.to_vec();
    }
    let pivot = x[best].clone();
    x.iter()
        .enumerate()
        .map(|(i, z)| if i == best { C::one() } else { z.clone() / pivot.clone() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sys(n: usize, ell: f64, beta: f64, gamma: f64) -> MagyariSystem<f64> {
        MagyariSystem::new(n, ell, beta, gamma)
    }

    #[test]
    fn entry_examples() {
        let s = sys(2, 2.0, 0.0, 1.0);
        assert_eq!(s.entry(0, Band::U, &z(0.0, 0.0), &z(0.0, 0.0)).unwrap(), z(4.0, 0.0));
        assert_eq!(s.entry(0, Band::S, &z(0.0, 0.0), &z(3.0, 0.0)).unwrap(), z(-1.0, 0.0));
        assert_eq!(s.entry(2, Band::W, &z(0.0, 0.0), &z(0.0, 0.0)).unwrap(), z(4.0, 0.0));
    }

    #[test]
    fn entry_out_of_footprint() {
        let s = sys(2, 2.0, 0.0, 1.0);
        let zero = z(0.0, 0.0);
        assert!(matches!(s.entry(0, Band::T, &zero, &zero), Err(QesError::Index { .. })));
        assert!(matches!(s.entry(2, Band::U, &zero, &zero), Err(QesError::Index { .. })));
        assert!(matches!(s.entry(4, Band::S, &zero, &zero), Err(QesError::Index { .. })));
        assert!(matches!(s.entry(3, Band::S, &zero, &zero), Err(QesError::Index { .. })));
        assert!(s.entry(3, Band::T, &zero, &zero).is_ok());
    }

    #[test]
    fn band_dependence() {
        let s = sys(3, 1.5, 0.7, -0.3);
        let a = s.entry(1, Band::S, &z(1.0, 0.0), &z(2.0, 0.0)).unwrap();
        let b = s.entry(1, Band::S, &z(9.0, 4.0), &z(2.0, 0.0)).unwrap();
        assert_eq!(a, b);
        let a = s.entry(1, Band::T, &z(1.0, 0.0), &z(2.0, 0.0)).unwrap();
        let b = s.entry(1, Band::T, &z(1.0, 0.0), &z(-5.0, 1.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assemble_shapes() {
        let s = sys(0, 1.3, 0.5, 0.25);
        let (e, f) = (z(1.0, 2.0), z(-0.5, 0.1));
        let m = s.assemble(&e, &f);
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m[(0, 0)], s.entry(0, Band::S, &e, &f).unwrap());
        assert_eq!(m[(1, 0)], s.entry(1, Band::T, &e, &f).unwrap());

        let s = sys(1, 1.3, 0.5, 0.25);
        let m = s.assemble(&e, &f);
        assert_eq!(m[(0, 0)], s.entry(0, Band::S, &e, &f).unwrap());
        assert_eq!(m[(0, 1)], s.entry(0, Band::U, &e, &f).unwrap());
        assert_eq!(m[(1, 0)], s.entry(1, Band::T, &e, &f).unwrap());
        assert_eq!(m[(1, 1)], s.entry(1, Band::S, &e, &f).unwrap());

        let s = sys(2, 1.3, 0.5, 0.25);
        let m = s.assemble(&e, &f);
        assert_eq!(m.row(3)[0], z(0.0, 0.0));
        assert_eq!(m.row(3)[1], z(2.0, 0.0));
        assert_eq!(m.row(3)[2], s.entry(3, Band::T, &e, &f).unwrap());
    }

    #[test]
    fn w_edge_values() {
        for n in 2..10 {
            let s = sys(n, 0.3, 0.0, 0.0);
            assert_eq!(s.w(n + 1), 2.0);
            assert_eq!(s.w(n), 4.0);
        }
    }

    #[test]
    fn eliminate_n0() {
        let s = sys(0, 1.7, 0.4, 0.9);
        let (e, f) = (z(0.3, 0.2), z(-1.0, 0.5));
        let el = s.forward_eliminate(&e, &f).unwrap();
        assert_eq!(el.omega, vec![z(1.0, 0.0)]);
        assert!((el.residuals[0] - (f - 2.0 * 0.9 * 1.7)).norm() < 1e-14);
        let t1 = e - 0.81 + 0.4 * (2.0 * 1.7 - 2.0 + 1.0);
        assert!((el.residuals[1] - t1).norm() < 1e-14);
    }

    #[test]
    fn eliminate_n1_hand_case() {
        let s = sys(1, 1.0, 0.0, 0.0);
        let el = s.forward_eliminate(&z(0.0, 0.0), &z(0.0, 0.0)).unwrap();
        assert_eq!(el.omega, vec![z(1.0, 0.0), z(0.0, 0.0)]);
        assert_eq!(el.residuals[0], z(0.0, 0.0));
        assert_eq!(el.residuals[1], z(2.0, 0.0));
    }

    #[test]
    fn degenerate_pivot_signal() {
        let s = sys(3, 0.0, 1.0, 1.0);
        let err = s.forward_eliminate(&z(1.0, 0.0), &z(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, QesError::DegeneratePivot { n: 0, .. }));
        for m in 0..6usize {
            let s = sys(6, m as f64 / 2.0, 0.3, -0.2);
            let err = s.forward_eliminate(&z(1.0, 0.5), &z(0.2, 0.0)).unwrap_err();
            assert!(matches!(err, QesError::DegeneratePivot { n, .. } if n == m));
            assert_eq!(s.degenerate_row(), Some(m));
        }
    }

    #[test]
    fn kernel_examples() {
        let (ell, beta, gamma) = (1.3, 0.6, -0.4);
        let s = sys(0, ell, beta, gamma);
        let e = z(gamma * gamma - beta * (2.0 * ell - 1.0), 0.0);
        let f = z(2.0 * gamma * ell, 0.0);
        let k = s.pivoted_kernel(&e, &f).unwrap();
        assert_eq!(k.dim, 1);
        assert_eq!(k.omega.unwrap(), vec![z(1.0, 0.0)]);

        let s = sys(0, 1.0, 1.0, 1.0);
        let k = s.pivoted_kernel(&z(0.0, 0.0), &z(0.0, 0.0)).unwrap();
        assert_eq!(k.dim, 0);
        assert!(k.omega.is_none());
    }

    #[test]
    fn ell_zero_row_vanishes() {
        for n in 0..5 {
            let s = sys(n, 0.0, 0.7, 0.3);
            let m = s.assemble(&z(1.0, 1.0), &z(0.0, 0.0));
            assert!(m.row(0).iter().all(|x| *x == z(0.0, 0.0)));
        }
    }

    #[test]
    fn residual_report_checks_length() {
        let s = sys(2, 1.0, 0.0, 0.0);
        let err = s.residual_report(&z(0.0, 0.0), &z(0.0, 0.0), &[z(1.0, 0.0)]).unwrap_err();
        assert_eq!(err, QesError::LengthMismatch { expected: 3, got: 1 });
        let r = s
            .residual_report(&z(0.0, 0.0), &z(0.0, 0.0), &[z(0.0, 0.0); 3])
            .unwrap();
        assert_eq!(r.max_abs, 0.0);
    }

    #[test]
    fn residual_of_exact_kernel_is_tiny() {
        // N = 0 closed form
        let s = sys(0, 2.5, 1.0, 0.5);
        let e = z(0.25 - 4.0, 0.0);
        let f = z(2.5, 0.0);
        let r = s.residual_report(&e, &f, &[z(1.0, 0.0)]).unwrap();
        assert!(r.max_abs < 1e-12);
    }

    #[test]
    fn random_omega_is_not_a_solution() {
        let s = sys(3, 1.7, 0.4, 0.2);
        let r = s
            .residual_report(&z(1.0, 0.0), &z(2.0, 0.0), &[z(1.0, 0.0), z(0.3, 0.1), z(-0.2, 0.0), z(0.05, 0.0)])
            .unwrap();
        assert!(r.max_abs / r.scale > 1e-3);
        assert!(r.backward_error > 1e-3);
    }

    proptest! {
        #[test]
        fn band_identity(n in 0usize..7, ell in 0.0f64..6.0, beta in -3.0f64..3.0, gamma in -3.0f64..3.0,
                         er in -5.0f64..5.0, ei in -5.0f64..5.0, fr in -5.0f64..5.0, fi in -5.0f64..5.0) {
            let s = sys(n, ell, beta, gamma);
            let (e, f) = (z(er, ei), z(fr, fi));
            let m = s.assemble(&e, &f);
            prop_assert_eq!((m.rows(), m.cols()), (n + 2, n + 1));
            for row in 0..n + 2 {
                for col in 0..n + 1 {
                    let band = Band::ALL.iter().find(|b| b.column(row, n) == Some(col));
                    match band {
                        Some(b) => prop_assert_eq!(m[(row, col)], s.entry(row, *b, &e, &f).unwrap()),
                        None => prop_assert_eq!(m[(row, col)], z(0.0, 0.0)),
                    }
                }
            }
        }

        #[test]
        fn conjugation_closure(n in 0usize..6, ell in 0.0f64..6.0, beta in -3.0f64..3.0, gamma in -3.0f64..3.0,
                               er in -5.0f64..5.0, ei in -5.0f64..5.0, fr in -5.0f64..5.0, fi in -5.0f64..5.0) {
            let s = sys(n, ell, beta, gamma);
            let a = s.assemble(&z(er, ei), &z(fr, fi));
            let b = s.assemble(&z(er, -ei), &z(fr, -fi));
            for row in 0..n + 2 {
                for col in 0..n + 1 {
                    prop_assert_eq!(a[(row, col)].conj(), b[(row, col)]);
                }
            }
        }

        #[test]
        fn elimination_satisfies_leading_rows(n in 1usize..7, ell in 3.1f64..9.0, beta in -2.0f64..2.0, gamma in -2.0f64..2.0,
                                              er in -5.0f64..5.0, fr in -5.0f64..5.0) {
            let s = sys(n, ell, beta, gamma);
            let (e, f) = (z(er, 0.3), z(fr, -0.2));
            let el = s.forward_eliminate(&e, &f).unwrap();
            let r = s.residual_report(&e, &f, &el.omega).unwrap();
            for row in 0..n {
                prop_assert!(r.row_residuals[row].norm() <= 1e-9 * (1.0 + r.scale));
            }
            prop_assert!((r.row_residuals[n] - el.residuals[0]).norm() <= 1e-9 * (1.0 + r.scale));
            prop_assert!((r.row_residuals[n + 1] - el.residuals[1]).norm() <= 1e-9 * (1.0 + r.scale));
        }
    }
}
