//! Small dense complex linear algebra over any [`Real`]: LU solves, Hessenberg-QR
//! eigenvalues and a one-sided Jacobi SVD.

use num_traits::{One, Zero};

use crate::error::{QesError, Result};
use crate::scalar::{c_real, cabs, cconj, cnorm1, cscale, Real, C};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<K> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

pub type CMatrix<T> = Matrix<C<T>>;

impl<K: Clone + Zero> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![K::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self
    where
        K: One,
    {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = K::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<K>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn map<L: Clone + Zero>(&self, f: impl Fn(&K) -> L) -> Matrix<L> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<K> std::ops::Index<(usize, usize)> for Matrix<K> {
    type Output = K;
    fn index(&self, (i, j): (usize, usize)) -> &K {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<K> std::ops::IndexMut<(usize, usize)> for Matrix<K> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut K {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn mat_vec<T: Real>(a: &CMatrix<T>, x: &[C<T>]) -> Vec<C<T>> {
    assert_eq!(a.cols(), x.len());
    (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .zip(x)
                .fold(C::zero(), |acc, (aij, xj)| acc + aij.clone() * xj.clone())
        })
        .collect()
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.data.iter().fold(T::zero(), |m, z| m.max_of(cabs(z)))
}

pub fn vec_norm<T: Real>(x: &[C<T>]) -> T {
    x.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

pub fn vec_max_abs<T: Real>(x: &[C<T>]) -> T {
    x.iter().fold(T::zero(), |m, z| m.max_of(cabs(z)))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(mut a: CMatrix<T>, mut b: Vec<C<T>>) -> Result<Vec<C<T>>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    assert_eq!(n, b.len());
    let scale = max_abs(&a);
    if scale.is_zero() {
        return Err(QesError::SingularJacobian { condition: f64::INFINITY });
    }
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| {
                cnorm1(&a[(i, k)])
                    .partial_cmp(&cnorm1(&a[(j, k)]))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(k);
        if cabs(&a[(p, k)]) <= scale.clone() * T::epsilon() * T::from_f64(n as f64) {
            return Err(QesError::SingularJacobian { condition: f64::INFINITY });
        }
        a.swap_rows(k, p);
        b.swap(k, p);
        let pivot = a[(k, k)].clone();
        for i in k + 1..n {
            let factor = a[(i, k)].clone() / pivot.clone();
            if factor.is_zero() {
                continue;
            }
            for j in k..n {
                let v = a[(k, j)].clone();
                a[(i, j)] = a[(i, j)].clone() - factor.clone() * v;
            }
            let bk = b[k].clone();
            b[i] = b[i].clone() - factor * bk;
        }
    }
    let mut x = vec![C::<T>::zero(); n];
    for k in (0..n).rev() {
        let mut acc = b[k].clone();
        for j in k + 1..n {
            acc = acc - a[(k, j)].clone() * x[j].clone();
        }
        x[k] = acc / a[(k, k)].clone();
    }
    Ok(x)
}

/// Eigenvalues of a square complex matrix (balancing, Hessenberg reduction, shifted QR).
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<C<T>>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)].clone()]);
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hessenberg_qr(h)
}

fn balance<T: Real>(a: &mut CMatrix<T>) {
    let n = a.rows();
    let two = T::from_f64(2.0);
    let four = T::from_f64(4.0);
    let ratio = T::from_f64(0.95);
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c = c + cnorm1(&a[(j, i)]);
                    r = r + cnorm1(&a[(i, j)]);
                }
            }
            if c.is_zero() || r.is_zero() {
                continue;
            }
            let total = c.clone() + r.clone();
            let mut f = T::one();
            let mut cc = c;
            let rr = r.clone() / two.clone();
            while cc < rr {
                cc = cc * four.clone();
                f = f * two.clone();
            }
            let rr = r * two.clone();
            while cc >= rr {
                cc = cc / four.clone();
                f = f / two.clone();
            }
            if (cc + rr / two.clone()) / f.clone() < ratio.clone() * total {
                done = false;
                let inv = T::one() / f.clone();
                for j in 0..n {
                    a[(i, j)] = cscale(&a[(i, j)], &inv);
                    a[(j, i)] = cscale(&a[(j, i)], &f);
                }
            }
        }
        if done {
            break;
        }
    }
}

fn hessenberg<T: Real>(a: &mut CMatrix<T>) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n)
            .fold(T::zero(), |acc, i| acc + a[(i, k)].norm_sqr())
            .sqrt();
        if alpha_norm.is_zero() {
            continue;
        }
        let x0 = a[(k + 1, k)].clone();
        let x0_abs = cabs(&x0);
        let phase = if x0_abs.is_zero() {
            C::one()
        } else {
            cscale(&x0, &(T::one() / x0_abs.clone()))
        };
        // v = x + phase * |x| e1, reflector I - 2 v v^H / (v^H v)
        let mut v: Vec<C<T>> = (k + 1..n).map(|i| a[(i, k)].clone()).collect();
        v[0] = v[0].clone() + cscale(&phase, &alpha_norm);
        let vnorm2 = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if vnorm2.is_zero() {
            continue;
        }
        let tau = T::from_f64(2.0) / vnorm2;
        // left: rows k+1.., all columns
        for j in 0..n {
            let mut dot = C::<T>::zero();
            for (idx, i) in (k + 1..n).enumerate() {
                dot = dot + cconj(&v[idx]) * a[(i, j)].clone();
            }
            let dot = cscale(&dot, &tau);
            for (idx, i) in (k + 1..n).enumerate() {
                a[(i, j)] = a[(i, j)].clone() - v[idx].clone() * dot.clone();
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let mut dot = C::<T>::zero();
            for (idx, j) in (k + 1..n).enumerate() {
                dot = dot + a[(i, j)].clone() * v[idx].clone();
            }
            let dot = cscale(&dot, &tau);
            for (idx, j) in (k + 1..n).enumerate() {
                a[(i, j)] = a[(i, j)].clone() - dot.clone() * cconj(&v[idx]);
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C::zero();
        }
    }
}

/// Givens pair `(c, s)` with `[[c̄, s̄], [−s, c]] · [a; b] = [r; 0]`.
fn givens<T: Real>(a: &C<T>, b: &C<T>) -> (C<T>, C<T>) {
    let r = cabs(a).hypot(&cabs(b));
    if r.is_zero() {
        return (C::one(), C::zero());
    }
    let inv = T::one() / r;
    (cscale(a, &inv), cscale(b, &inv))
}

fn hessenberg_qr<T: Real>(mut h: CMatrix<T>) -> Result<Vec<C<T>>> {
    let n = h.rows();
    let eps = T::epsilon();
    let norm = max_abs(&h);
    let mut eig = vec![C::<T>::zero(); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 60 * n;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)].clone();
            break;
        }
        // deflation search
        let mut l = hi;
        while l > 0 {
            let sub = cnorm1(&h[(l, l - 1)]);
            let mut diag = cnorm1(&h[(l - 1, l - 1)]) + cnorm1(&h[(l, l)]);
            if diag.is_zero() {
                diag = norm.clone();
            }
            if sub <= eps.clone() * diag {
                h[(l, l - 1)] = C::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)].clone();
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(QesError::Eigen { size: n, iterations: total });
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift
            h[(hi, hi)].clone() + c_real(T::from_f64(0.75) * cnorm1(&h[(hi, hi - 1)]))
        } else {
            wilkinson_shift(&h, hi)
        };
        for i in l..=hi {
            h[(i, i)] = h[(i, i)].clone() - mu.clone();
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(&h[(k, k)], &h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)].clone();
                let y = h[(k + 1, j)].clone();
                h[(k, j)] = cconj(&c) * x.clone() + cconj(&s) * y.clone();
                h[(k + 1, j)] = c.clone() * y - s.clone() * x;
            }
            rots.push((c, s));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = &rots[idx];
            for i in l..=(k + 2).min(hi) {
                let x = h[(i, k)].clone();
                let y = h[(i, k + 1)].clone();
                h[(i, k)] = x.clone() * c.clone() + y.clone() * s.clone();
                h[(i, k + 1)] = y * cconj(c) - x * cconj(s);
            }
        }
        for i in l..=hi {
            h[(i, i)] = h[(i, i)].clone() + mu.clone();
        }
    }
    Ok(eig)
}

fn wilkinson_shift<T: Real>(h: &CMatrix<T>, hi: usize) -> C<T> {
    let a = h[(hi - 1, hi - 1)].clone();
    let b = h[(hi - 1, hi)].clone();
    let c = h[(hi, hi - 1)].clone();
    let d = h[(hi, hi)].clone();
    let half = T::from_f64(0.5);
    let tr = cscale(&(a.clone() + d.clone()), &half);
    let diff = cscale(&(a - d.clone()), &half);
    let disc = complex_sqrt(&(diff.clone() * diff + b * c));
    let l1 = tr.clone() + disc.clone();
    let l2 = tr - disc;
    if cnorm1(&(l1.clone() - d.clone())) < cnorm1(&(l2.clone() - d)) {
        l1
    } else {
        l2
    }
}

/// Principal square root.
pub fn complex_sqrt<T: Real>(z: &C<T>) -> C<T> {
    let r = cabs(z);
    if r.is_zero() {
        return C::zero();
    }
    let half = T::from_f64(0.5);
    let re = ((r.clone() + z.re.clone()) * half.clone()).max_of(T::zero()).sqrt();
    let im_mag = ((r - z.re.clone()) * half).max_of(T::zero()).sqrt();
    let im = if z.im < T::zero() { -im_mag } else { im_mag };
    C::new(re, im)
}

/// Singular values (descending) and right singular vectors as columns of `v`.
#[derive(Clone, Debug)]
pub struct Svd<T: Real> {
    pub singular_values: Vec<T>,
    pub v: CMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn right_vector(&self, j: usize) -> Vec<C<T>> {
        (0..self.v.rows()).map(|i| self.v[(i, j)].clone()).collect()
    }

    pub fn condition(&self) -> T {
        let first = self.singular_values.first().cloned().unwrap_or_else(T::zero);
        let last = self.singular_values.last().cloned().unwrap_or_else(T::zero);
        if last.is_zero() {
            T::from_f64(f64::INFINITY)
        } else {
            first / last
        }
    }
}

/// One-sided Jacobi SVD of an `m × n` matrix with `m ≥ n`.
pub fn jacobi_svd<T: Real>(a: &CMatrix<T>) -> Result<Svd<T>> {
    let m = a.rows();
    let n = a.cols();
    assert!(m >= n, "jacobi_svd needs at least as many rows as columns");
    let mut cols: Vec<Vec<C<T>>> = (0..n)
        .map(|j| (0..m).map(|i| a[(i, j)].clone()).collect())
        .collect();
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { C::one() } else { C::zero() })
                .collect()
        })
        .collect();
    let eps = T::epsilon();
    let max_sweeps = 80;
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = cols[p].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let beta = cols[q].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let gamma = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .fold(C::<T>::zero(), |s, (x, y)| s + cconj(x) * y.clone());
                let g = cabs(&gamma);
                if g.is_zero() || g <= eps.clone() * (alpha.clone() * beta.clone()).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = cscale(&cconj(&gamma), &(T::one() / g.clone()));
                let zeta = (beta - alpha) / (T::from_f64(2.0) * g);
                let sign = if zeta < T::zero() { -T::one() } else { T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta.clone() * zeta).sqrt());
                let cs = T::one() / (T::one() + t.clone() * t.clone()).sqrt();
                let sn = cs.clone() * t;
                for vecs in [&mut cols, &mut v] {
                    let len = vecs[p].len();
                    for i in 0..len {
                        let x = vecs[p][i].clone();
                        let y = vecs[q][i].clone() * phase.clone();
                        vecs[p][i] = cscale(&x, &cs) - cscale(&y, &sn);
                        vecs[q][i] = cscale(&x, &sn) + cscale(&y, &cs);
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(QesError::Eigen { size: n, iterations: max_sweeps });
    }
    let mut order: Vec<(T, usize)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (vec_norm(c), j))
        .collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut vm = CMatrix::<T>::zeros(n, n);
    for (new_j, (_, old_j)) in order.iter().enumerate() {
        for i in 0..n {
            vm[(i, new_j)] = v[*old_j][i].clone();
        }
    }
    Ok(Svd {
        singular_values: order.into_iter().map(|(s, _)| s).collect(),
        v: vm,
    })
}

/// Row and column scalings `(r, c)` such that `diag(r) · a · diag(c)` has unit max-abs rows and columns.
/// Row then column scaling factors bringing every row and column maximum to 1.
pub fn equilibrate<T: Real>(a: &CMatrix<T>) -> (Vec<T>, Vec<T>) {
    equilibrate_with_floor(a, T::zero())
}

/// Like [`equilibrate`], but rows and columns at rounding level relative to the
/// largest entry are left negligible. Used before kernel detection.
pub fn equilibrate_guarded<T: Real>(a: &CMatrix<T>) -> (Vec<T>, Vec<T>) {
    equilibrate_with_floor(a, T::epsilon() * T::from_f64(16.0))
}

fn equilibrate_with_floor<T: Real>(a: &CMatrix<T>, floor: T) -> (Vec<T>, Vec<T>) {
    let global = max_abs(a);
    let inv = |m: T, reference: &T| {
        if m.is_zero() || m <= floor.clone() * reference.clone() {
            if reference.is_zero() {
                T::one()
            } else {
                T::one() / reference.clone()
            }
        } else {
            T::one() / m
        }
    };
    let r: Vec<T> = (0..a.rows())
        .map(|i| inv(a.row(i).iter().fold(T::zero(), |m, z| m.max_of(cabs(z))), &global))
        .collect();
    let c: Vec<T> = (0..a.cols())
        .map(|j| {
            let m = (0..a.rows()).fold(T::zero(), |m, i| m.max_of(cabs(&a[(i, j)]) * r[i].clone()));
            inv(m, &T::one())
        })
        .collect();
    (r, c)
}

pub fn scale_rows_cols<T: Real>(a: &CMatrix<T>, r: &[T], c: &[T]) -> CMatrix<T> {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] = cscale(&a[(i, j)], &(r[i].clone() * c[j].clone()));
        }
    }
    out
}

pub fn equilibrated_condition<T: Real>(a: &CMatrix<T>) -> Result<T> {
    let (r, c) = equilibrate(a);
    Ok(jacobi_svd(&scale_rows_cols(a, &r, &c))?.condition())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, Mp128};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, cl: usize) -> CMatrix<f64> {
        let mut m = CMatrix::zeros(r, cl);
        for i in 0..r {
            for j in 0..cl {
                m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    fn to_nalgebra(m: &CMatrix<f64>) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
    }

    #[test]
    fn solve_recovers_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..8 {
            let a = random_matrix(&mut rng, n, n);
            let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0)).collect();
            let b = mat_vec(&a, &x);
            let y = solve(a, b).unwrap();
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_system_is_rejected() {
        let a = CMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)],
        ]);
        assert!(solve(a, vec![Complex64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn eigenvalues_match_nalgebra_schur() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..12 {
            let a = random_matrix(&mut rng, n, n);
            let mut ours = eigenvalues(&a).unwrap();
            let schur = nalgebra::Schur::new(to_nalgebra(&a));
            let (_, t) = schur.unpack();
            let mut theirs: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
            let key = |z: &Complex64| (z.re * 1e6).round() as i64 * 1_000_000_000 + (z.im * 1e3).round() as i64;
            ours.sort_by_key(key);
            theirs.sort_by_key(key);
            for z in &ours {
                let best = theirs.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
                assert!(best < 1e-9, "n={n}: {z} unmatched");
            }
        }
    }

    #[test]
    fn eigenvalues_of_companion_matrix() {
        // roots of (x-1)(x-2)(x-3)
        let a = CMatrix::from_rows(vec![
            vec![Complex64::new(6.0, 0.0), Complex64::new(-11.0, 0.0), Complex64::new(6.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ]);
        let mut e: Vec<f64> = eigenvalues(&a).unwrap().iter().map(|z| z.re).collect();
        e.sort_by(f64::total_cmp);
        for (x, y) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn multiprecision_eigenvalues() {
        let one = Mp128::one();
        let zero = Mp128::zero();
        let a = CMatrix::from_rows(vec![
            vec![c(zero.clone(), zero.clone()), c(Mp128::from_f64(2.0), zero.clone())],
            vec![c(one.clone(), zero.clone()), c(zero.clone(), zero.clone())],
        ]);
        let e = eigenvalues(&a).unwrap();
        let sqrt2 = Mp128::from_f64(2.0).sqrt();
        for z in e {
            let d = (cabs(&z) - sqrt2.clone()).abs();
            assert!(d < Mp128::from_f64(1e-35));
        }
    }

    #[test]
    fn svd_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (r, cl) in [(2, 1), (3, 2), (6, 5), (9, 8)] {
            let a = random_matrix(&mut rng, r, cl);
            let ours = jacobi_svd(&a).unwrap();
            let theirs = to_nalgebra(&a).singular_values();
            let mut theirs: Vec<f64> = theirs.iter().copied().collect();
            theirs.sort_by(|x, y| y.total_cmp(x));
            for (x, y) in ours.singular_values.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-12 * (1.0 + y));
            }
            // A v_j has norm sigma_j
            for j in 0..cl {
                let av = mat_vec(&a, &ours.right_vector(j));
                assert!((vec_norm(&av) - ours.singular_values[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn svd_detects_kernel() {
        // rank-1 3x2
        let a = CMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(3.0, 0.0), Complex64::new(6.0, 0.0)],
        ]);
        let svd = jacobi_svd(&a).unwrap();
        assert!(svd.singular_values[1] < 1e-14);
        let k = svd.right_vector(1);
        assert!((k[0] + k[1] * 2.0).norm() < 1e-13);
        assert!(vec_norm(&mat_vec(&a, &k)) < 1e-14);
    }

    #[test]
    fn equilibration_fixes_badly_scaled_rows() {
        let a = CMatrix::from_rows(vec![
            vec![Complex64::new(1e12, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1e-12, 0.0)],
        ]);
        assert!(equilibrated_condition(&a).unwrap() < 1.0 + 1e-12);
    }
}
