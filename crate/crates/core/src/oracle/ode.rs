//! Substitution of the series ansatz into the radial equation.
//!
//! With `ψ = e^{φ} Σ c_n x^{n−ℓ}`, `φ = −ix³/3 − βx²/2 − iγx` and `c_n = i^{n−ℓ} ω_n`
//! (the common factor `i^{−ℓ}` is dropped), the equation
//! `−ψ'' + [ℓ(ℓ+1)/x² + V(x) − E]ψ = 0` divided by `e^{φ}` becomes a finite Laurent
//! sum of powers `x^{m−ℓ}`. Every coefficient vanishes exactly for a QES solution.

use std::fmt;
use std::ops::Neg;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

use crate::magyari::MagyariSystem;
use crate::model::{d_coupling_exact, d_coupling_real};
use crate::scalar::{Mp, Real, C};

/// Scalar field the certificate can run in: exact rationals or binary floats.
pub trait OdeField: Clone + Num + Neg<Output = Self> + fmt::Debug {
    fn magnitude(&self) -> f64;
    fn integer(v: i64) -> Self;
}

impl OdeField for BigRational {
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn integer(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
}

impl OdeField for f64 {
    fn magnitude(&self) -> f64 {
        f64::abs(*self)
    }
    fn integer(v: i64) -> Self {
        v as f64
    }
}

impl<const P: usize> OdeField for Mp<P> {
    fn magnitude(&self) -> f64 {
        Real::abs(self).to_f64()
    }
    fn integer(v: i64) -> Self {
        Mp::<P>::from_i64(v)
    }
}

/// Everything the substitution needs; the five couplings enter separately from `(β, γ)`.
#[derive(Clone, Debug)]
pub struct OdeInputs<K: OdeField> {
    pub n: usize,
    pub ell: K,
    pub beta: K,
    pub gamma: K,
    pub b: K,
    pub c: K,
    pub d: K,
    pub energy: Complex<K>,
    pub charge: Complex<K>,
    pub omega: Vec<Complex<K>>,
}

impl<K: OdeField> OdeInputs<K> {
    /// Quartic and cubic couplings from `B = 2β`, `C = β² − 2γ`; `D` is passed in.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        ell: K,
        beta: K,
        gamma: K,
        d: K,
        energy: Complex<K>,
        charge: Complex<K>,
        omega: Vec<Complex<K>>,
    ) -> Self {
        let two = K::integer(2);
        let b = two.clone() * beta.clone();
        let c = beta.clone() * beta.clone() - two * gamma.clone();
        OdeInputs {
            n,
            ell,
            beta,
            gamma,
            b,
            c,
            d,
            energy,
            charge,
            omega,
        }
    }
}

/// Coefficients of `x^{m−ℓ}` for `m = lowest, lowest+1, …`.
#[derive(Clone, Debug)]
pub struct OdeResidual<K: OdeField> {
    pub lowest: i64,
    pub coefficients: Vec<Complex<K>>,
    /// Largest sum of term moduli feeding one coefficient.
    pub scale: f64,
    pub max_abs_coefficient: f64,
}

impl<K: OdeField> OdeResidual<K> {
    pub fn coefficient(&self, m: i64) -> Option<&Complex<K>> {
        usize::try_from(m - self.lowest).ok().and_then(|i| self.coefficients.get(i))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coefficients.iter().all(|z| z.re.is_zero() && z.im.is_zero())
    }

    pub fn passes(&self, rel: f64) -> bool {
        self.max_abs_coefficient <= rel * self.scale
    }
}

fn cmag<K: OdeField>(z: &Complex<K>) -> f64 {
    z.re.magnitude() + z.im.magnitude()
}

fn i_pow<K: OdeField>(n: usize) -> Complex<K> {
    let (one, zero) = (K::one(), K::zero());
    match n % 4 {
        0 => Complex::new(one, zero),
        1 => Complex::new(zero, one),
        2 => Complex::new(-one, zero),
        _ => Complex::new(zero, -one),
    }
}

fn real<K: OdeField>(x: K) -> Complex<K> {
    Complex::new(x, K::zero())
}

fn imag<K: OdeField>(x: K) -> Complex<K> {
    Complex::new(K::zero(), x)
}

pub fn ode_residual<K: OdeField>(inp: &OdeInputs<K>) -> OdeResidual<K> {
    let lowest = -2i64;
    let len = inp.omega.len() + 6;
    let mut acc = vec![Complex::new(K::zero(), K::zero()); len];
    let mut mags = vec![0.0f64; len];
    let mut add = |k: i64, term: Complex<K>| {
        let idx = (k - lowest) as usize;
        mags[idx] += cmag(&term);
        acc[idx] = acc[idx].clone() + term;
    };

    // φ' = −iγ − βx − ix², as coefficients of x^0, x^1, x^2
    let dphi = [imag(-inp.gamma.clone()), real(-inp.beta.clone()), imag(-K::one())];
    let ddphi = [real(-inp.beta.clone()), imag(-K::integer(2))];

    // multiplier of P: ℓ(ℓ+1)x^{−2} + V − E − φ'' − φ'², term by term
    let mut mult: Vec<(i64, Complex<K>)> = vec![
        (-2, real(inp.ell.clone() * (inp.ell.clone() + K::one()))),
        (-1, Complex::new(K::zero(), K::one()) * inp.charge.clone()),
        (0, -inp.energy.clone()),
        (1, imag(inp.d.clone())),
        (2, real(inp.c.clone())),
        (3, imag(inp.b.clone())),
        (4, real(-K::one())),
    ];
    for (p, v) in ddphi.iter().enumerate() {
        mult.push((p as i64, -v.clone()));
    }
    for (a, pa) in dphi.iter().enumerate() {
        for (b, pb) in dphi.iter().enumerate() {
            mult.push(((a + b) as i64, -(pa.clone() * pb.clone())));
        }
    }

    let two = K::integer(2);
    for (n, w) in inp.omega.iter().enumerate() {
        let c = i_pow::<K>(n) * w.clone();
        let nl = K::integer(n as i64) - inp.ell.clone();
        let ni = n as i64;
        // −P''
        add(ni - 2, c.clone() * real(-(nl.clone() * (nl.clone() - K::one()))));
        // −2φ'P'
        for (p, v) in dphi.iter().enumerate() {
            add(ni - 1 + p as i64, c.clone() * v.clone() * real(-(two.clone() * nl.clone())));
        }
        for (p, v) in &mult {
            add(ni + p, c.clone() * v.clone());
        }
    }
    let max_abs_coefficient = acc.iter().map(cmag).fold(0.0, f64::max);
    let scale = mags.iter().copied().fold(0.0, f64::max);
    OdeResidual {
        lowest,
        coefficients: acc,
        scale,
        max_abs_coefficient,
    }
}

/// Certificate in the working precision of `sys`, with `D` from the QES condition.
pub fn ode_certificate<T: Real + OdeField>(sys: &MagyariSystem<T>, e: &C<T>, f: &C<T>, omega: &[C<T>]) -> OdeResidual<T> {
    let d = d_coupling_real(&sys.ell, &sys.beta, &sys.gamma, sys.n);
    ode_residual(&OdeInputs::new(
        sys.n,
        sys.ell.clone(),
        sys.beta.clone(),
        sys.gamma.clone(),
        d,
        e.clone(),
        f.clone(),
        omega.to_vec(),
    ))
}

/// Certificate in exact arithmetic.
pub fn ode_certificate_exact(
    n: usize,
    ell: &BigRational,
    beta: &BigRational,
    gamma: &BigRational,
    e: &Complex<BigRational>,
    f: &Complex<BigRational>,
    omega: &[Complex<BigRational>],
) -> OdeResidual<BigRational> {
    let d = d_coupling_exact(ell, beta, gamma, n);
    ode_residual(&OdeInputs::new(
        n,
        ell.clone(),
        beta.clone(),
        gamma.clone(),
        d,
        e.clone(),
        f.clone(),
        omega.to_vec(),
    ))
}
