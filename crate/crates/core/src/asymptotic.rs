//! Strong-core limit ℓ → ∞.
//!
//! With `E = −2βℓ + 2tℓ^{1/3}`, `F = 2γℓ + 2sℓ^{2/3}` and `ω_n = h_n ℓ^{−n/3}`,
//! dividing row `n` by `2ℓ^{(2−n)/3}` turns the finite-ℓ system into
//! `(n+1)h_{n+1} + s h_n + t h_{n−1} + (N+2−n) h_{n−2} = 0` up to `O(ℓ^{−1/3})`.
//! On the diagonal `s = t` this has a kernel exactly at the integers `t_k = N − 3k`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{QesError, Result};
use crate::linalg::CMatrix;
use crate::magyari::MagyariSystem;
use crate::poly::{BPoly, UPoly};
use crate::scalar::{c_from_f64, c_real, c_to_f64, cabs, cscale, Mp128, Real, C};

/// Entry of the rescaled matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RescaledEntry {
    Const(i64),
    S,
    T,
}

/// Nonzero cells `(col, entry)` of each of the `N+2` rows.
pub fn rescaled_pattern(n: usize) -> Vec<Vec<(usize, RescaledEntry)>> {
    (0..n + 2)
        .map(|row| {
            let r = row as i64;
            let cells = [
                (r - 2, RescaledEntry::Const(n as i64 + 2 - r)),
                (r - 1, RescaledEntry::T),
                (r, RescaledEntry::S),
                (r + 1, RescaledEntry::Const(r + 1)),
            ];
            cells
                .into_iter()
                .filter(|(c, _)| (0..=n as i64).contains(c))
                .map(|(c, e)| (c as usize, e))
                .collect()
        })
        .collect()
}

fn fill<K: Clone>(n: usize, zero: K, s: &K, t: &K, konst: impl Fn(i64) -> K) -> Vec<Vec<K>> {
    let mut m = vec![vec![zero; n + 1]; n + 2];
    for (row, cells) in rescaled_pattern(n).into_iter().enumerate() {
        for (col, e) in cells {
            m[row][col] = match e {
                RescaledEntry::Const(v) => konst(v),
                RescaledEntry::S => s.clone(),
                RescaledEntry::T => t.clone(),
            };
        }
    }
    m
}

pub fn rescaled_matrix<T: Real>(n: usize, s: &C<T>, t: &C<T>) -> CMatrix<T> {
    CMatrix::from_rows(fill(n, C::zero(), s, t, |v| c_real(T::from_i64(v))))
}

pub fn rescaled_matrix_exact(n: usize, s: &BigRational, t: &BigRational) -> Vec<Vec<BigRational>> {
    fill(n, BigRational::zero(), s, t, |v| BigRational::from_integer(BigInt::from(v)))
}

/// Entries as polynomials in `(x, y) = (t, s)`.
pub fn rescaled_matrix_bivariate(n: usize) -> Vec<Vec<BPoly>> {
    fill(n, BPoly::zero(), &BPoly::y(), &BPoly::x(), |v| BPoly::from_int(v))
}

/// Entries on the diagonal `s = t`, as polynomials in `t`.
pub fn rescaled_matrix_diagonal(n: usize) -> Vec<Vec<UPoly>> {
    fill(n, UPoly::zero(), &UPoly::x(), &UPoly::x(), |v| UPoly::from_ints(&[v]))
}

/// Charge and energy deviations in units of `ℓ^{2/3}` and `ℓ^{1/3}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledCoordinates<T: Real> {
    pub s: C<T>,
    pub t: C<T>,
    pub ell: T,
}

impl<T: Real> ScaledCoordinates<T> {
    pub fn new(s: C<T>, t: C<T>, ell: T) -> Result<Self> {
        if !(ell > T::zero()) {
            return Err(QesError::Domain(format!("scaled coordinates need ell > 0, got {ell:?}")));
        }
        Ok(ScaledCoordinates { s, t, ell })
    }

    /// Inverts `F = 2γℓ + 2sℓ^{2/3}`, `E = −2βℓ + 2tℓ^{1/3}`.
    pub fn from_energy_charge(e: &C<T>, f: &C<T>, ell: &T, beta: &T, gamma: &T) -> Result<Self> {
        let two = T::from_f64(2.0);
        let c1 = ell.cbrt();
        let c2 = c1.clone() * c1.clone();
        let s = cscale(&(f.clone() - c_real(two.clone() * gamma.clone() * ell.clone())), &(T::one() / (two.clone() * c2)));
        let t = cscale(&(e.clone() + c_real(two.clone() * beta.clone() * ell.clone())), &(T::one() / (two * c1)));
        Self::new(s, t, ell.clone())
    }

    pub fn energy(&self, beta: &T) -> C<T> {
        let two = T::from_f64(2.0);
        c_real(-(two.clone() * beta.clone() * self.ell.clone())) + cscale(&self.t, &(two * self.ell.cbrt()))
    }

    pub fn charge(&self, gamma: &T) -> C<T> {
        let two = T::from_f64(2.0);
        let c1 = self.ell.cbrt();
        c_real(two.clone() * gamma.clone() * self.ell.clone()) + cscale(&self.s, &(two * c1.clone() * c1))
    }
}

/// One asymptotic branch: the integer root `t_k = N − 3k` and its exact kernel `h` with `h_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticMultiplet {
    pub n: usize,
    pub k: usize,
    pub t_k: i64,
    pub h: Vec<BigRational>,
}

impl AsymptoticMultiplet {
    pub fn h_f64(&self) -> Vec<f64> {
        self.h.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Kernel candidate from rows 0..N−1 on the diagonal `s = t`, plus the residuals of rows N and N+1.
pub fn diagonal_kernel(n: usize, t: &BigRational) -> (Vec<BigRational>, [BigRational; 2]) {
    let m = rescaled_matrix_exact(n, t, t);
    let mut h: Vec<BigRational> = vec![BigRational::one()];
    for row in 0..n {
        // (row+1) h_{row+1} = −(s h_row + t h_{row−1} + (N+2−row) h_{row−2})
        let acc = (0..=row).fold(BigRational::zero(), |acc, col| acc + &m[row][col] * &h[col]);
        h.push(-acc / &m[row][row + 1]);
    }
    let residual = |row: usize| (0..=n).fold(BigRational::zero(), |acc, col| acc + &m[row][col] * &h[col]);
    let res = [residual(n), residual(n + 1)];
    (h, res)
}

pub fn multiplets(n: usize) -> Result<Vec<AsymptoticMultiplet>> {
    (0..=n / 2)
        .map(|k| {
            let t_k = n as i64 - 3 * k as i64;
            let (h, res) = diagonal_kernel(n, &BigRational::from_integer(BigInt::from(t_k)));
            if !res[0].is_zero() || !res[1].is_zero() {
                return Err(QesError::Internal(format!(
                    "kernel for N = {n}, t = {t_k} leaves residuals {} and {}",
                    res[0], res[1]
                )));
            }
            Ok(AsymptoticMultiplet { n, k, t_k, h })
        })
        .collect()
}

fn check_k(n: usize, k: usize) -> Result<i64> {
    if k > n / 2 {
        return Err(QesError::Domain(format!("branch k = {k} outside 0..={} for N = {n}", n / 2)));
    }
    Ok(n as i64 - 3 * k as i64)
}

/// Leading-order `(E, F)` on branch `k`, no corrections.
pub fn asymptotic_spectrum(n: usize, k: usize, ell: f64, beta: f64, gamma: f64) -> Result<(f64, f64)> {
    let (e, f) = asymptotic_spectrum_real(n, k, &ell, &beta, &gamma)?;
    Ok((e, f))
}

pub fn asymptotic_spectrum_real<T: Real>(n: usize, k: usize, ell: &T, beta: &T, gamma: &T) -> Result<(T, T)> {
    let t = T::from_i64(check_k(n, k)?);
    if !(*ell > T::zero()) {
        return Err(QesError::Domain(format!("asymptotic spectrum needs ell > 0, got {ell:?}")));
    }
    let two = T::from_f64(2.0);
    let c1 = ell.cbrt();
    let e = -(two.clone() * beta.clone() * ell.clone()) + two.clone() * t.clone() * c1.clone();
    let f = two.clone() * gamma.clone() * ell.clone() + two * t * c1.clone() * c1;
    Ok((e, f))
}

/// `ω_n = h_n ℓ^{−n/3}`, normalized so the largest entry is 1.
pub fn omega_from_h(m: &AsymptoticMultiplet, ell: f64) -> Vec<f64> {
    let c = ell.cbrt();
    let raw: Vec<f64> = m
        .h
        .iter()
        .enumerate()
        .map(|(i, h)| h.to_f64().unwrap_or(f64::NAN) / c.powi(i as i32))
        .collect();
    let pivot = raw
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    raw.iter().map(|v| v / pivot).collect()
}

/// Result of comparing the scaled full system with the rescaled one.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionRecord {
    pub ell: f64,
    pub max_deviation: f64,
}

/// Scales the full matrix at the asymptotic point for `(s, t)` and measures its distance to the rescaled matrix.
pub fn reduce_full_to_rescaled(
    n: usize,
    ell: f64,
    beta: f64,
    gamma: f64,
    s: Complex64,
    t: Complex64,
) -> Result<ReductionRecord> {
    let bound = 100.0 * (n as f64).max(beta.abs()).max(gamma.abs());
    if !(ell > bound) || !ell.is_finite() {
        return Err(QesError::Domain(format!(
            "reduction needs ell > 100 * max(N, |beta|, |gamma|) = {bound}, got {ell}"
        )));
    }
    type W = Mp128;
    let ell_w = W::from_f64(ell);
    let beta_w = W::from_f64(beta);
    let gamma_w = W::from_f64(gamma);
    let coords = ScaledCoordinates::new(c_from_f64::<W>(s), c_from_f64::<W>(t), ell_w.clone())?;
    let e = coords.energy(&beta_w);
    let f = coords.charge(&gamma_w);
    let full = MagyariSystem::new(n, ell_w.clone(), beta_w, gamma_w).assemble(&e, &f);
    let target = rescaled_matrix::<W>(n, &coords.s, &coords.t);
    let c1 = ell_w.cbrt();
    let two = W::from_f64(2.0);
    let mut worst = W::zero();
    for row in 0..n + 2 {
        // divide by 2ℓ^{(2−row)/3}, multiply column j by ℓ^{−j/3}
        for col in 0..n + 1 {
            let power = 2 - row as i32 + col as i32;
            let factor = two.clone() * pow_i(&c1, power);
            let scaled = cscale(&full[(row, col)], &(W::one() / factor));
            worst = worst.max_of(cabs(&(scaled - target[(row, col)].clone())));
        }
    }
    Ok(ReductionRecord {
        ell,
        max_deviation: worst.to_f64(),
    })
}

fn pow_i<T: Real>(x: &T, p: i32) -> T {
    let mut acc = T::one();
    for _ in 0..p.unsigned_abs() {
        acc = acc * x.clone();
    }
    if p < 0 {
        T::one() / acc
    } else {
        acc
    }
}

/// Z3 image `(s, t, h) → (ω² s, ω t, ω^{−n} h_n)` with `ω = e^{2πi/3}`.
pub fn z3_rotate(s: Complex64, t: Complex64, h: &[Complex64]) -> (Complex64, Complex64, Vec<Complex64>) {
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let winv = w.conj();
    (
        s * w * w,
        t * w,
        h.iter().enumerate().map(|(i, v)| v * winv.powi(i as i32)).collect(),
    )
}

/// Asymptotic seed `(s, t, h)` as complex numbers.
pub fn multiplet_seed(m: &AsymptoticMultiplet) -> (Complex64, Complex64, Vec<Complex64>) {
    let t = Complex64::new(m.t_k as f64, 0.0);
    (t, t, m.h_f64().into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// Entries of a rescaled row as `Complex64`; used to check kernels numerically.
pub fn rescaled_residual(n: usize, s: Complex64, t: Complex64, h: &[Complex64]) -> f64 {
    let m = rescaled_matrix::<f64>(n, &s, &t);
    crate::linalg::vec_max_abs(&crate::linalg::mat_vec(&m, h))
}

#[allow(dead_code)]
fn to_c64<T: Real>(z: &C<T>) -> Complex64 {
    c_to_f64(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational_int;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rescaled_examples() {
        let (s, t) = (z(0.3, 0.1), z(-1.2, 0.5));
        let m = rescaled_matrix::<f64>(0, &s, &t);
        assert_eq!(m.to_rows(), vec![vec![s], vec![t]]);
        let m = rescaled_matrix::<f64>(2, &s, &t);
        let one = z(1.0, 0.0);
        let two = z(2.0, 0.0);
        let zero = z(0.0, 0.0);
        assert_eq!(
            m.to_rows(),
            vec![vec![s, one, zero], vec![t, s, two], vec![two, t, s], vec![zero, one, t]]
        );
        let m = rescaled_matrix::<f64>(1, &s, &t);
        assert_eq!(m.to_rows(), vec![vec![s, one], vec![t, s], vec![one, t]]);
    }

    #[test]
    fn multiplet_roots() {
        let ts: Vec<i64> = multiplets(5).unwrap().iter().map(|m| m.t_k).collect();
        assert_eq!(ts, vec![5, 2, -1]);
        let m2 = multiplets(2).unwrap();
        assert_eq!(m2[0].h, vec![rational_int(1), rational_int(-2), rational_int(1)]);
        assert_eq!(m2[1].h, vec![rational_int(1), rational_int(1), rational_int(1)]);
        let m0 = multiplets(0).unwrap();
        assert_eq!(m0.len(), 1);
        assert_eq!(m0[0].t_k, 0);
        assert_eq!(m0[0].h, vec![rational_int(1)]);
    }

    #[test]
    fn kernels_annihilate_every_row() {
        for n in 0..=12 {
            for m in multiplets(n).unwrap() {
                let t = rational_int(m.t_k);
                let a = rescaled_matrix_exact(n, &t, &t);
                for row in &a {
                    let v: BigRational = row.iter().zip(&m.h).map(|(x, y)| x * y).sum();
                    assert!(v.is_zero());
                }
            }
        }
    }

    #[test]
    fn non_multiplet_values_fail_certification() {
        for n in 1..8usize {
            for t in -10i64..=10 {
                let (_, res) = diagonal_kernel(n, &rational_int(t));
                let is_root = res[0].is_zero() && res[1].is_zero();
                let expected = t <= n as i64 && (n as i64 - t) % 3 == 0 && (n as i64 - t) / 3 <= (n / 2) as i64;
                assert_eq!(is_root, expected, "N={n}, t={t}");
            }
        }
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(asymptotic_spectrum(3, 1, 8.0, 0.0, 0.0).unwrap(), (0.0, 0.0));
        let (e, _) = asymptotic_spectrum(2, 0, 1000.0, 1.0, 0.0).unwrap();
        assert!((e + 1960.0).abs() < 1e-9);
        let (_, f) = asymptotic_spectrum(5, 2, 1.0, 0.0, 1.0).unwrap();
        assert!(f.abs() < 1e-15);
        assert!(asymptotic_spectrum(2, 2, 10.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn omega_examples() {
        let m0 = &multiplets(0).unwrap()[0];
        assert_eq!(omega_from_h(m0, 17.0), vec![1.0]);
        let m = &multiplets(2).unwrap()[0];
        let w = omega_from_h(m, 1.0);
        assert_eq!(w, vec![-0.5, 1.0, -0.5]);
        let w = omega_from_h(m, 1e6);
        let expect = [1.0, -0.02, 1e-4];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reduction_regression() {
        let r = reduce_full_to_rescaled(2, 1e6, 1.0, 1.0, z(2.0, 0.0), z(2.0, 0.0)).unwrap();
        assert!(r.max_deviation < 1e-1);
        assert!((r.max_deviation - 0.03).abs() < 1e-9, "{}", r.max_deviation);
        assert!(reduce_full_to_rescaled(2, 150.0, 2.0, 0.0, z(0.0, 0.0), z(0.0, 0.0)).is_err());
    }

    #[test]
    fn reduction_n0_closed_form() {
        for (beta, gamma, ell) in [(0.5, 0.3, 1e3), (-1.0, 2.0, 1e6), (0.0, 0.0, 1e4)] {
            let r = reduce_full_to_rescaled(0, ell, beta, gamma, z(0.7, 0.1), z(-0.4, 0.2)).unwrap();
            let expected = (gamma * gamma + beta).abs() / (2.0 * f64::cbrt(ell));
            assert!((r.max_deviation - expected).abs() < 1e-14 * (1.0 + expected));
        }
    }

    #[test]
    fn reduction_decreases_with_ell() {
        for n in 0..5 {
            let devs: Vec<f64> = [1e3, 1e6, 1e9]
                .iter()
                .map(|&l| reduce_full_to_rescaled(n, l, 1.5, -0.5, z(1.0, 0.0), z(1.0, 0.0)).unwrap().max_deviation)
                .collect();
            assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
        }
    }

    #[test]
    fn scaled_coordinates_round_trip() {
        let (beta, gamma, ell) = (0.7, -1.1, 3.5e4);
        let c = ScaledCoordinates::new(z(0.4, -0.2), z(1.5, 0.3), ell).unwrap();
        let e = c.energy(&beta);
        let f = c.charge(&gamma);
        let back = ScaledCoordinates::from_energy_charge(&e, &f, &ell, &beta, &gamma).unwrap();
        assert!((back.s - c.s).norm() < 1e-9);
        assert!((back.t - c.t).norm() < 1e-9);
    }

    #[test]
    fn z3_images_are_kernels() {
        for n in 0..7 {
            for m in multiplets(n).unwrap() {
                let (s, t, h) = multiplet_seed(&m);
                assert!(rescaled_residual(n, s, t, &h) < 1e-9);
                let (s2, t2, h2) = z3_rotate(s, t, &h);
                assert!(rescaled_residual(n, s2, t2, &h2) < 1e-9);
            }
        }
    }
}
