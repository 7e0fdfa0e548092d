//! Exact elimination of `(E, F)` for `N ≤ 3`.
//!
//! The maximal minors are exact polynomials in `(E, F)`. `F` is eliminated by a
//! resultant, the eliminant is solved at 256 bits, and candidates are kept only
//! if the full matrix has a kernel vector with `ω_0 ≠ 0`. Rational candidates are
//! re-certified with an exact rational kernel.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{QesError, Result};
use crate::linalg::CMatrix;
use crate::magyari::kernel_of;
use crate::model::rational_int;
use crate::poly::{common_zeros, det_laplace, kernel_rational, simplest_between, BPoly, CommonZeros, UPoly};
use crate::scalar::{c_to_f64, cabs, Mp256, Real, C};

pub const MAX_EXACT_N: usize = 3;

/// A solution whose energy, charge and kernel are all rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSolution {
    pub energy: BigRational,
    pub charge: BigRational,
    /// Normalized to `ω_0 = 1`.
    pub omega: Vec<BigRational>,
}

#[derive(Clone, Debug)]
pub struct ExactSolution {
    pub energy: C<Mp256>,
    pub charge: C<Mp256>,
    /// Largest entry equal to 1.
    pub omega: Vec<C<Mp256>>,
    /// Smallest over largest singular value of the equilibrated matrix.
    pub relative_sigma_min: f64,
    pub rational: Option<RationalSolution>,
}

impl ExactSolution {
    pub fn energy_f64(&self) -> Complex64 {
        c_to_f64(&self.energy)
    }

    pub fn charge_f64(&self) -> Complex64 {
        c_to_f64(&self.charge)
    }

    pub fn omega_f64(&self) -> Vec<Complex64> {
        self.omega.iter().map(c_to_f64).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ExactOracle {
    pub n: usize,
    /// Resultant in `F` of the two polynomials that were intersected.
    pub eliminant: UPoly,
    /// Nonzero when the top and bottom minors shared a factor and combinations were used.
    pub combination: usize,
    pub solutions: Vec<ExactSolution>,
    /// Kernel points with `ω_0 = 0`; these belong to the other Frobenius exponent.
    pub companions: usize,
    /// Common zeros of the two polynomials where the full matrix keeps full rank.
    pub spurious: usize,
}

/// The matrix with entries in `(x, y) = (E, F)`, built directly from the generators.
pub fn bivariate_matrix(n: usize, ell: &BigRational, beta: &BigRational, gamma: &BigRational) -> Vec<Vec<BPoly>> {
    let two = rational_int(2);
    let mut m = vec![vec![BPoly::zero(); n + 1]; n + 2];
    for (r, row) in m.iter_mut().enumerate() {
        let rr = rational_int(r as i64);
        if r < n {
            // U_r = (2ℓ − r)(r + 1)
            row[r + 1] = BPoly::constant((&two * ell - &rr) * rational_int(r as i64 + 1));
        }
        if r <= n {
            // S_r = F − 2γ(ℓ − r)
            row[r] = &BPoly::y() - &BPoly::constant(&two * gamma * (ell - &rr));
        }
        if r >= 1 {
            // T_r = E − γ² + β(2ℓ − 2r + 1)
            let c = -(gamma * gamma) + beta * (&two * ell - &two * &rr + rational_int(1));
            row[r - 1] = &BPoly::x() + &BPoly::constant(c);
        }
        if r >= 2 {
            // W_r = 2(N + 2 − r)
            row[r - 2] = BPoly::from_int(2 * (n as i64 + 2 - r as i64));
        }
    }
    m
}

fn minor(m: &[Vec<BPoly>], deleted: usize) -> BPoly {
    let sub: Vec<Vec<BPoly>> = m
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != deleted)
        .map(|(_, r)| r.clone())
        .collect();
    det_laplace(&sub)
}

fn combine(minors: &[BPoly], weight: impl Fn(usize) -> i64) -> BPoly {
    minors
        .iter()
        .enumerate()
        .fold(BPoly::zero(), |acc, (j, p)| &acc + &(&BPoly::from_int(weight(j)) * p))
}

/// Eliminates over the top and bottom minors; falls back to fixed integer combinations of all minors.
fn eliminate(minors: &[BPoly]) -> Result<(usize, CommonZeros<Mp256>)> {
    let last = minors.len() - 1;
    if let Some(z) = common_zeros::<Mp256>(&minors[last], &minors[0])? {
        return Ok((0, z));
    }
    let weights: [(fn(usize) -> i64, fn(usize) -> i64); 3] = [
        (|j| j as i64 + 1, |j| ((j * j) as i64 + 3) * if j % 2 == 0 { 1 } else { -1 }),
        (|j| (2 * j * j) as i64 + 5, |j| (j as i64 - 2) * 7 + 1),
        (|j| [3, -1, 4, -1, 5, -9][j % 6], |j| [2, 7, -1, 8, -2, 8][j % 6]),
    ];
    for (k, (wa, wb)) in weights.iter().enumerate() {
        let p = combine(minors, wa);
        let q = combine(minors, wb);
        if let Some(z) = common_zeros::<Mp256>(&p, &q)? {
            return Ok((k + 1, z));
        }
    }
    Err(QesError::Unsupported(
        "the maximal minors share a curve of common zeros; the solution set is not finite".into(),
    ))
}

fn eval_matrix(m: &[Vec<BPoly>], e: &C<Mp256>, f: &C<Mp256>) -> CMatrix<Mp256> {
    CMatrix::from_rows(m.iter().map(|r| r.iter().map(|p| p.eval_complex(e, f)).collect()).collect())
}

fn nearby_rational(z: &C<Mp256>) -> Option<BigRational> {
    let mag = Mp256::one() + cabs(z);
    if Real::abs(&z.im) > Mp256::scaled_tol(1e-15) * mag.clone() {
        return None;
    }
    let x = z.re.to_ratio()?;
    let delta = (Mp256::scaled_tol(1e-12) * mag).to_ratio()?;
    Some(simplest_between(&(&x - &delta), &(&x + &delta)))
}

fn rational_certificate(m: &[Vec<BPoly>], e: &C<Mp256>, f: &C<Mp256>) -> Option<RationalSolution> {
    let e = nearby_rational(e)?;
    let f = nearby_rational(f)?;
    let exact: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|p| p.at_x_exact(&e).eval(&f)).collect())
        .collect();
    let basis = kernel_rational(&exact);
    if basis.len() != 1 {
        return None;
    }
    let v = &basis[0];
    if v[0].is_zero() {
        return None;
    }
    let omega = v.iter().map(|x| x / &v[0]).collect();
    Some(RationalSolution {
        energy: e,
        charge: f,
        omega,
    })
}

/// `2ℓ` as an index `m ≤ N − 1` where `U_m` vanishes.
fn degenerate_index(n: usize, ell: &BigRational) -> Option<usize> {
    let twice = ell * rational_int(2);
    if !twice.is_integer() || twice.is_negative() {
        return None;
    }
    let m = usize::try_from(twice.to_integer()).ok()?;
    (m < n).then_some(m)
}

pub fn exact_solutions_small_n(n: usize, ell: &BigRational, beta: &BigRational, gamma: &BigRational) -> Result<ExactOracle> {
    if n > MAX_EXACT_N {
        return Err(QesError::Unsupported(format!("exact elimination is limited to N <= {MAX_EXACT_N}, got {n}")));
    }
    if *ell < BigRational::new(BigInt::from(-1), BigInt::from(2)) {
        return Err(QesError::Domain(format!("ell must be at least -1/2, got {ell}")));
    }
    let m = bivariate_matrix(n, ell, beta, gamma);
    let minors: Vec<BPoly> = (0..n + 2).map(|j| minor(&m, j)).collect();
    let (combination, zeros) = eliminate(&minors)?;
    let degenerate = degenerate_index(n, ell);
    let tol = Mp256::scaled_tol(1e-8);
    let null = Mp256::scaled_tol(1e-6);
    let mut solutions = Vec::new();
    let (mut companions, mut spurious) = (0, 0);
    for (e, f) in zeros.points {
        let a = eval_matrix(&m, &e, &f);
        let k = kernel_of(&a, tol.clone())?;
        let Some(omega) = k.omega.filter(|_| k.dim >= 1) else {
            spurious += 1;
            continue;
        };
        let head = degenerate.unwrap_or(0);
        let lead = omega[..=head].iter().fold(Mp256::zero(), |acc, w| acc.max_of(cabs(w)));
        if lead <= null {
            companions += 1;
            continue;
        }
        let top = k.singular_values[0].clone();
        let low = k.singular_values.last().cloned().unwrap_or_else(Mp256::zero);
        let rational = rational_certificate(&m, &e, &f);
        solutions.push(ExactSolution {
            energy: e,
            charge: f,
            omega,
            relative_sigma_min: if top.is_zero() { 0.0 } else { (low / top).to_f64() },
            rational,
        });
    }
    solutions.sort_by(|a, b| {
        let (x, y) = (a.energy_f64(), b.energy_f64());
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)).then(a.charge_f64().re.total_cmp(&b.charge_f64().re))
    });
    Ok(ExactOracle {
        n,
        eliminant: zeros.resultant,
        combination,
        solutions,
        companions,
        spurious,
    })
}

impl RationalSolution {
    pub fn omega_complex(&self) -> Vec<Complex<BigRational>> {
        self.omega.iter().map(|w| Complex::new(w.clone(), BigRational::zero())).collect()
    }
}
