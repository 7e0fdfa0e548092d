//! Couplings of the quartic potential, the internal parameters (β, γ, ℓ) used by
//! the polynomial ansatz, and the solution record shared by every solver.
//!
//! Potential: `V(x) = -x^4 + iBx^3 + Cx^2 + iDx + iF/x + G/x^2`, radial term
//! `L(L+1)/x^2`. The ansatz uses `β = B/2`, `γ = (β² − C)/2` and the effective
//! angular momentum `ℓ = sqrt(G + (L + 1/2)^2) − 1/2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QesError, Result};
use crate::scalar::Real;

/// Parses `"3/4"`, `"-2"`, `"0.125"`, `"1e6"` or `"-2.5e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(QesError::Parse("empty number".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d.is_zero() {
            return Err(QesError::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let exp: i64 = s[i + 1..]
                .parse()
                .map_err(|_| QesError::Parse(format!("bad exponent in {text:?}")))?;
            (&s[..i], exp)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(QesError::Parse(format!("not a number: {text:?}")));
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(
        BigInt::from_str(if all.is_empty() { "0" } else { &all })
            .map_err(|e| QesError::Parse(format!("{text:?}: {e}")))?,
    );
    let shift = exponent - frac_part.len() as i64;
    if shift.unsigned_abs() > 4000 {
        return Err(QesError::Parse(format!("exponent out of range in {text:?}")));
    }
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if neg { -value } else { value })
}

/// Formats a rational the way [`parse_rational`] reads it back.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Effective angular momentum, kept exact: either a rational or `sqrt(radicand) − 1/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ell {
    Rational(BigRational),
    Surd { radicand: BigRational },
}

impl Ell {
    /// ℓ from the discriminant `d = G + (L + 1/2)^2`.
    pub fn from_discriminant(d: BigRational) -> Result<Self> {
        if d.is_negative() {
            return Err(QesError::Domain(format!(
                "G + (L + 1/2)^2 = {} is negative",
                format_rational(&d)
            )));
        }
        Ok(match exact_sqrt(&d) {
            Some(root) => Ell::Rational(root - rational(1, 2)),
            None => Ell::Surd { radicand: d },
        })
    }

    pub fn rational(value: BigRational) -> Result<Self> {
        if value < rational(-1, 2) {
            return Err(QesError::Domain(format!(
                "effective angular momentum {} is below -1/2",
                format_rational(&value)
            )));
        }
        Ok(Ell::Rational(value))
    }

    /// `(ℓ + 1/2)^2`, always rational.
    pub fn discriminant(&self) -> BigRational {
        match self {
            Ell::Rational(v) => {
                let h = v + rational(1, 2);
                &h * &h
            }
            Ell::Surd { radicand } => radicand.clone(),
        }
    }

    /// `ℓ(ℓ + 1)`, always rational.
    pub fn centrifugal(&self) -> BigRational {
        self.discriminant() - rational(1, 4)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Ell::Rational(v) => Some(v),
            Ell::Surd { .. } => None,
        }
    }

    pub fn to_real<T: Real>(&self) -> T {
        match self {
            Ell::Rational(v) => T::from_ratio(v),
            Ell::Surd { radicand } => T::from_ratio(radicand).sqrt() - T::from_f64(0.5),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real::<f64>()
    }

    /// `2ℓ` when it is a nonnegative integer, i.e. where `U_{2ℓ}` vanishes.
    pub fn twice_as_index(&self) -> Option<usize> {
        let v = self.as_rational()?;
        let twice = v * rational_int(2);
        (twice.is_integer() && !twice.is_negative()).then(|| twice.to_integer().to_usize())?
    }
}

impl fmt::Display for Ell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ell::Rational(v) => write!(f, "{}", format_rational(v)),
            Ell::Surd { radicand } => write!(f, "sqrt({})-1/2", format_rational(radicand)),
        }
    }
}

impl FromStr for Ell {
    type Err = QesError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("sqrt(") {
            let inner = rest
                .strip_suffix(")-1/2")
                .ok_or_else(|| QesError::Parse(format!("malformed ell {s:?}")))?;
            return Ell::from_discriminant(parse_rational(inner)?);
        }
        Ell::rational(parse_rational(s)?)
    }
}

/// The five couplings of the potential plus the partial wave `L` and the degree `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParameters {
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
    pub f: BigRational,
    pub g: BigRational,
    pub l: BigRational,
    pub n: usize,
}

impl ModelParameters {
    /// Couplings with `D` fixed to its QES value and `F = 0` (F is an output of the solver).
    pub fn qes(b: BigRational, c: BigRational, g: BigRational, l: BigRational, n: usize) -> Result<Self> {
        let mut params = ModelParameters {
            b,
            c,
            d: BigRational::zero(),
            f: BigRational::zero(),
            g,
            l,
            n,
        };
        let internal = internal_from_model(&params)?;
        if let Some(ell) = internal.ell.as_rational() {
            params.d = d_coupling_exact(ell, &internal.beta, &internal.gamma, n);
        }
        Ok(params)
    }
}

/// Parameters of the polynomial ansatz.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalParameters {
    pub beta: BigRational,
    pub gamma: BigRational,
    pub ell: Ell,
}

impl InternalParameters {
    pub fn new(beta: BigRational, gamma: BigRational, ell: Ell) -> Self {
        InternalParameters { beta, gamma, ell }
    }
}

/// β = B/2, γ = (β² − C)/2, ℓ = sqrt(G + (L+1/2)²) − 1/2.
pub fn internal_from_model(p: &ModelParameters) -> Result<InternalParameters> {
    let half = rational(1, 2);
    let beta = &p.b * &half;
    let gamma = (&beta * &beta - &p.c) * &half;
    let shifted = &p.l + &half;
    let disc = &p.g + &shifted * &shifted;
    if disc.is_negative() {
        return Err(QesError::Domain(format!(
            "G + (L+1/2)^2 < 0 for G = {}, L = {}: the effective angular momentum is not real",
            format_rational(&p.g),
            format_rational(&p.l)
        )));
    }
    Ok(InternalParameters {
        beta,
        gamma,
        ell: Ell::from_discriminant(disc)?,
    })
}

/// Inverse map for a chosen partial wave `L`: B = 2β, C = β² − 2γ, G = ℓ(ℓ+1) − L(L+1).
pub fn model_from_internal(p: &InternalParameters, l: BigRational, n: usize) -> ModelParameters {
    let two = rational_int(2);
    let b = &p.beta * &two;
    let c = &p.beta * &p.beta - &p.gamma * &two;
    let g = p.ell.centrifugal() - &l * (&l + BigRational::one());
    let d = match p.ell.as_rational() {
        Some(ell) => d_coupling_exact(ell, &p.beta, &p.gamma, n),
        None => BigRational::zero(),
    };
    ModelParameters {
        b,
        c,
        d,
        f: BigRational::zero(),
        g,
        l,
        n,
    }
}

/// QES value of the linear coupling, `D = 2(ℓ + βγ − N − 1)`.
pub fn d_coupling(ell: f64, beta: f64, gamma: f64, n: usize) -> f64 {
    2.0 * (ell + beta * gamma - n as f64 - 1.0)
}

pub fn d_coupling_exact(ell: &BigRational, beta: &BigRational, gamma: &BigRational, n: usize) -> BigRational {
    (ell + beta * gamma - rational_int(n as i64 + 1)) * rational_int(2)
}

pub fn d_coupling_real<T: Real>(ell: &T, beta: &T, gamma: &T, n: usize) -> T {
    (ell.clone() + beta.clone() * gamma.clone() - T::from_i64(n as i64 + 1)) * T::from_f64(2.0)
}

/// Two-parameter regular model `−x⁴ + 2iax³ + (a² − 2b)x² + 2i(ab − N)x`.
///
/// Its `N` counts polynomial coefficients, so it is QES with polynomial degree `N − 1`:
/// `D = 2(ab − N)` equals `d_coupling(0, a, b, N − 1)`.
pub fn bbl_parameters(a: &BigRational, b: &BigRational, n: usize) -> ModelParameters {
    let two = rational_int(2);
    ModelParameters {
        b: a * &two,
        c: a * a - b * &two,
        d: (a * b - rational_int(n as i64)) * &two,
        f: BigRational::zero(),
        g: BigRational::zero(),
        l: BigRational::zero(),
        n,
    }
}

/// How a solution was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    FixedPoint,
    Newton,
    ExactElimination,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::FixedPoint => "fixed-point",
            Method::Newton => "newton",
            Method::ExactElimination => "exact-elimination",
        }
    }
}

impl FromStr for Method {
    type Err = QesError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-point" => Ok(Method::FixedPoint),
            "newton" => Ok(Method::Newton),
            "exact-elimination" => Ok(Method::ExactElimination),
            other => Err(QesError::Parse(format!("unknown method tag {other:?}"))),
        }
    }
}

/// A simultaneous QES pair (E, F) with its polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QesSolution {
    pub energy: Complex64,
    pub charge: Complex64,
    /// ω_0..ω_N, scaled so the largest-modulus entry is exactly 1.
    pub omega: Vec<Complex64>,
    /// Normwise backward error of the N+2 rows at (E, F, ω).
    pub residual_norm: f64,
    pub method: Method,
    pub precision_bits: u32,
    /// Index of the asymptotic branch the solution was continued from, when known.
    pub branch: Option<usize>,
}

/// Relative threshold below which imaginary parts count as zero.
pub const REALITY_TOL: f64 = 1e-8;

impl QesSolution {
    /// Reality is reported, never enforced.
    pub fn is_real(&self) -> bool {
        let scale = 1.0 + self.energy.norm() + self.charge.norm();
        self.energy.im.abs() < REALITY_TOL * scale && self.charge.im.abs() < REALITY_TOL * scale
    }

    pub fn conjugate(&self) -> QesSolution {
        QesSolution {
            energy: self.energy.conj(),
            charge: self.charge.conj(),
            omega: self.omega.iter().map(|w| w.conj()).collect(),
            ..self.clone()
        }
    }
}

/// Rescales `omega` so that its largest-modulus entry equals 1.
pub fn normalize_largest(omega: &[Complex64]) -> Vec<Complex64> {
    let pivot = omega
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(0.0, 0.0));
    if pivot.norm() == 0.0 {
        return omega.to_vec();
    }
    omega
        .iter()
        .enumerate()
        .map(|(i, w)| {
            if *w == pivot && omega.iter().position(|x| *x == pivot) == Some(i) {
                Complex64::new(1.0, 0.0)
            } else {
                w / pivot
            }
        })
        .collect()
}
