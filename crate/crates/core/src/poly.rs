//! Exact polynomials over ℚ in one and two variables, determinants, resultants,
//! real-root isolation and complex root finding.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QesError, Result};
use crate::scalar::{c_from_f64, c_real, c_to_f64, cabs, Real, C};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Dense univariate polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    c: Vec<BigRational>,
}

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| rat(v)).collect())
    }

    pub fn constant(v: BigRational) -> Self {
        Self::new(vec![v])
    }

    /// The variable itself.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.c.iter().map(|a| a * k).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().recip();
        self.scale(&inv)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(UPoly::one(), |acc, _| &acc * self)
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (UPoly::zero(), UPoly::zero());
        };
        if nd < dd {
            return (UPoly::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let mut q = vec![BigRational::zero(); nd - dd + 1];
        let lead_inv = d.lead().recip();
        for k in (0..=nd - dd).rev() {
            let coef = &r[k + dd] * &lead_inv;
            if coef.is_zero() {
                continue;
            }
            for (i, di) in d.c.iter().enumerate() {
                r[k + i] = &r[k + i] - &coef * di;
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * rat(i as i64))
                .collect(),
        )
    }

    /// `p / gcd(p, p')`, made monic.
    pub fn square_free(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Yun's square-free decomposition: pairs `(f_i, i)` with `p = lead · Π f_i^i`.
    pub fn square_free_decomposition(&self) -> Vec<(UPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let p = self.monic();
        let dp = p.derivative();
        let a0 = p.gcd(&dp);
        let mut b = p.exact_div(&a0).expect("gcd divides");
        let mut c = dp.exact_div(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a).expect("gcd divides");
            c = d.exact_div(&a).expect("gcd divides");
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.c
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    pub fn eval_complex<T: Real>(&self, x: &C<T>) -> C<T> {
        self.c.iter().rev().fold(C::<T>::zero(), |acc, a| {
            acc * x.clone() + c_real(T::from_ratio(a))
        })
    }

    /// Integer coefficients with unit content and positive leading coefficient.
    pub fn primitive(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self
            .c
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let ints: Vec<BigInt> = self
            .c
            .iter()
            .map(|a| (a * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
        let sign = if ints.last().is_some_and(|l| l.sign() == Sign::Minus) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        ints.into_iter().map(|a| a / &g * &sign).collect()
    }

    fn sturm_chain(&self) -> Vec<UPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        chain
    }

    fn sign_changes(chain: &[UPoly], x: &BigRational) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for p in chain {
            let v = p.eval(x);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Strict bound on the moduli of all roots.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.lead().abs();
        let m = self.c[..self.c.len().saturating_sub(1)]
            .iter()
            .map(|a| a.abs() / &lead)
            .fold(BigRational::zero(), |m, v| if v > m { v } else { m });
        m + rat(1)
    }

    /// Exact real roots where rational, isolating intervals otherwise (distinct roots, ascending).
    pub fn real_roots(&self) -> Vec<RealRoot> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let p = self.square_free();
        let chain = p.sturm_chain();
        let b = p.root_bound();
        let mut intervals = Vec::new();
        isolate(&p, &chain, -b.clone(), b, &mut intervals);
        intervals
            .into_iter()
            .map(|iv| match iv {
                Isolated::Exact(r) => RealRoot::Exact(r),
                Isolated::Interval(lo, hi) => refine(&p, lo, hi),
            })
            .collect()
    }

    pub fn rational_roots(&self) -> Vec<BigRational> {
        self.real_roots()
            .into_iter()
            .filter_map(|r| match r {
                RealRoot::Exact(v) => Some(v),
                RealRoot::Interval(..) => None,
            })
            .collect()
    }

    /// All complex roots of the square-free part.
    pub fn complex_roots<T: Real>(&self) -> Result<Vec<C<T>>> {
        aberth(&self.square_free())
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coef = crate::model::format_rational(&mag);
            match i {
                0 => out.push_str(&coef),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&coef);
                        out.push('*');
                    }
                    out.push_str(var);
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

impl Zero for UPoly {
    fn zero() -> Self {
        UPoly { c: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
}

impl One for UPoly {
    fn one() -> Self {
        UPoly { c: vec![rat(1)] }
    }
}

fn zip_with(a: &[BigRational], b: &[BigRational], f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Vec<BigRational> {
    let zero = BigRational::zero();
    (0..a.len().max(b.len()))
        .map(|i| f(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect()
}

impl<'a> Add<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn add(self, o: &UPoly) -> UPoly {
        UPoly::new(zip_with(&self.c, &o.c, |x, y| x + y))
    }
}

impl<'a> Sub<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn sub(self, o: &UPoly) -> UPoly {
        UPoly::new(zip_with(&self.c, &o.c, |x, y| x - y))
    }
}

impl<'a> Mul<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn mul(self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }
}

impl Neg for UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly::new(self.c.into_iter().map(|a| -a).collect())
    }
}

impl<'a> Neg for &'a UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        -(self.clone())
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
    };
}

owned_ops!(UPoly);
owned_ops!(BPoly);

/// A real root: exactly rational, or isolated in an open interval free of other roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealRoot {
    Exact(BigRational),
    Interval(BigRational, BigRational),
}

impl RealRoot {
    pub fn approx(&self) -> f64 {
        match self {
            RealRoot::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            RealRoot::Interval(a, b) => ((a + b) / rat(2)).to_f64().unwrap_or(f64::NAN),
        }
    }
}

enum Isolated {
    Exact(BigRational),
    Interval(BigRational, BigRational),
}

fn isolate(p: &UPoly, chain: &[UPoly], lo: BigRational, hi: BigRational, out: &mut Vec<Isolated>) {
    let count = UPoly::sign_changes(chain, &lo) - UPoly::sign_changes(chain, &hi);
    match count {
        0 => {}
        1 => out.push(Isolated::Interval(lo, hi)),
        _ => {
            let mid = (&lo + &hi) / rat(2);
            if p.eval(&mid).is_zero() {
                // step off the root to keep both halves well defined
                let mut eps = (&hi - &lo) / rat(4);
                loop {
                    let a = &mid - &eps;
                    let b = &mid + &eps;
                    if !p.eval(&a).is_zero()
                        && !p.eval(&b).is_zero()
                        && UPoly::sign_changes(chain, &a) - UPoly::sign_changes(chain, &b) == 1
                    {
                        isolate(p, chain, lo, a, out);
                        out.push(Isolated::Exact(mid));
                        isolate(p, chain, b, hi, out);
                        return;
                    }
                    eps /= rat(2);
                }
            }
            isolate(p, chain, lo, mid.clone(), out);
            isolate(p, chain, mid, hi, out);
        }
    }
}

/// Bisects an isolating interval. A rational root `r` of a primitive integer polynomial with
/// leading coefficient `a` has `a·r ∈ ℤ`, so once the interval is shorter than `1/|a|` only
/// the integers `k` with `k/a` inside it need an exact test.
fn refine(p: &UPoly, mut lo: BigRational, mut hi: BigRational) -> RealRoot {
    let lead = BigRational::from_integer(p.primitive().last().cloned().unwrap_or_else(BigInt::one).abs());
    let sign = |x: &BigRational| p.eval(x).signum();
    let s_lo = sign(&lo);
    let mut tested = false;
    for _ in 0..256 {
        let width = &hi - &lo;
        if !tested && &width * &lead < BigRational::one() {
            tested = true;
            let mut k = (&lo * &lead).ceil();
            while k <= &hi * &lead {
                let q = &k / &lead;
                if p.eval(&q).is_zero() {
                    return RealRoot::Exact(q);
                }
                k += BigRational::one();
            }
        }
        if tested && width <= rat(1) / BigRational::from_integer(BigInt::one() << 64u32) * (rat(1) + lo.abs()) {
            break;
        }
        let mid = (&lo + &hi) / rat(2);
        let s_mid = sign(&mid);
        if s_mid.is_zero() {
            return RealRoot::Exact(mid);
        }
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RealRoot::Interval(lo, hi)
}

/// Rational with the smallest denominator (then smallest magnitude) in `[lo, hi]`.
pub fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let (lo, hi) = if lo <= hi { (lo.clone(), hi.clone()) } else { (hi.clone(), lo.clone()) };
    if !lo.is_positive() && !hi.is_negative() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let c = lo.ceil();
    if c <= hi {
        return c;
    }
    let f = lo.floor();
    let inner = simplest_between(&(&hi - &f).recip(), &(&lo - &f).recip());
    f + inner.recip()
}

fn log2_abs(r: &BigRational) -> f64 {
    fn log2_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits <= 1000 {
            n.to_f64().map_or(f64::NEG_INFINITY, |v| v.abs().log2())
        } else {
            let shifted: BigInt = n >> (bits - 64);
            shifted.to_f64().map_or(0.0, |v| v.abs().log2()) + (bits - 64) as f64
        }
    }
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    log2_int(r.numer()) - log2_int(r.denom())
}

/// Aberth–Ehrlich simultaneous iteration for a square-free polynomial.
fn aberth<T: Real>(p: &UPoly) -> Result<Vec<C<T>>> {
    let Some(d) = p.degree() else {
        return Err(QesError::Domain("roots of the zero polynomial".into()));
    };
    if d == 0 {
        return Ok(Vec::new());
    }
    let monic = p.monic();
    if d == 1 {
        return Ok(vec![c_real(T::from_ratio(&-monic.coeff(0)))]);
    }
    // Fujiwara-type radius from logarithms, safe for huge coefficients
    let mut log_r = f64::NEG_INFINITY;
    for i in 1..=d {
        let a = monic.coeff(d - i);
        if !a.is_zero() {
            log_r = log_r.max(log2_abs(&a) / i as f64);
        }
    }
    let radius_log2 = if log_r.is_finite() { log_r } else { 0.0 };
    let fits_f64 = monic.c.iter().all(|a| a.is_zero() || log2_abs(a).abs() < 900.0);
    let mut init: Vec<num_complex::Complex64> = (0..d)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            num_complex::Complex64::from_polar(2f64.powf(radius_log2.min(1000.0)), ang)
        })
        .collect();
    if fits_f64 {
        let c64: Vec<num_complex::Complex64> = monic
            .c
            .iter()
            .map(|a| num_complex::Complex64::new(a.to_f64().unwrap_or(0.0), 0.0))
            .collect();
        if let Ok(z) = aberth_iterate(&c64, init.clone(), 400) {
            init = z;
        }
    }
    let coeffs: Vec<C<T>> = monic.c.iter().map(|a| c_real(T::from_ratio(a))).collect();
    let start: Vec<C<T>> = init.into_iter().map(c_from_f64).collect();
    let roots = aberth_iterate(&coeffs, start, 2000)?;
    Ok(roots)
}

fn aberth_iterate<T: Real>(coeffs: &[C<T>], z: Vec<C<T>>, max_iter: usize) -> Result<Vec<C<T>>> {
    let (z, converged, last_move) = aberth_run(coeffs, z, max_iter);
    if converged {
        Ok(z)
    } else {
        Err(QesError::NoConvergence {
            iterations: max_iter,
            last_move,
        })
    }
}

fn aberth_run<T: Real>(coeffs: &[C<T>], mut z: Vec<C<T>>, max_iter: usize) -> (Vec<C<T>>, bool, f64) {
    let d = z.len();
    let eps = T::epsilon();
    let tiny = T::from_f64(f64::MIN_POSITIVE);
    let mut done = vec![false; d];
    let mut last_move = 0.0;
    let moduli: Vec<T> = coeffs.iter().map(cabs).collect();
    let noise = eps.clone() * T::from_f64(4.0 * (d as f64 + 1.0));
    for _ in 0..max_iter {
        let mut all_done = true;
        for k in 0..d {
            if done[k] {
                continue;
            }
            let (pv, dv) = horner_with_derivative(coeffs, &z[k]);
            if pv.is_zero() {
                done[k] = true;
                continue;
            }
            let at_noise = cabs(&pv) <= noise.clone() * horner_abs(&moduli, &cabs(&z[k]));
            let ratio = pv / dv;
            let mut sum = C::<T>::zero();
            for j in 0..d {
                if j != k {
                    let diff = z[k].clone() - z[j].clone();
                    if !diff.is_zero() {
                        sum = sum + C::<T>::one() / diff;
                    }
                }
            }
            let denom = C::<T>::one() - ratio.clone() * sum;
            let w = if denom.is_zero() { ratio } else { ratio / denom };
            z[k] = z[k].clone() - w.clone();
            let step = cabs(&w);
            last_move = step.to_f64();
            if at_noise || step <= eps.clone() * T::from_f64(4.0) * cabs(&z[k]) + tiny.clone() {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return (z, true, last_move);
        }
    }
    (z, false, last_move)
}

fn horner_abs<T: Real>(moduli: &[T], r: &T) -> T {
    moduli.iter().rev().fold(T::zero(), |acc, a| acc * r.clone() + a.clone())
}

fn horner_with_derivative<T: Real>(coeffs: &[C<T>], x: &C<T>) -> (C<T>, C<T>) {
    let mut p = C::<T>::zero();
    let mut dp = C::<T>::zero();
    for a in coeffs.iter().rev() {
        dp = dp * x.clone() + p.clone();
        p = p * x.clone() + a.clone();
    }
    (p, dp)
}

/// Roots of a polynomial with complex coefficients (`coeffs[i]` multiplies `x^i`).
///
/// Multiple roots are returned at reduced accuracy instead of failing.
pub fn complex_coeff_roots<T: Real>(coeffs: &[C<T>]) -> Result<Vec<C<T>>> {
    let mut c: Vec<C<T>> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.is_zero()) {
        c.pop();
    }
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = c[d].clone();
    let c: Vec<C<T>> = c.into_iter().map(|z| z / lead.clone()).collect();
    let c64: Vec<num_complex::Complex64> = c.iter().map(c_to_f64).collect();
    let mut radius: f64 = 0.0;
    for i in 1..=d {
        let a = c64[d - i].norm();
        if a > 0.0 {
            radius = radius.max(a.powf(1.0 / i as f64));
        }
    }
    let radius = if radius > 0.0 && radius.is_finite() { radius } else { 1.0 };
    let init: Vec<num_complex::Complex64> = (0..d)
        .map(|k| num_complex::Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4))
        .collect();
    let (warm, _, _) = aberth_run(&c64, init, 500);
    let (z, _, _) = aberth_run(&c, warm.into_iter().map(c_from_f64).collect(), 2000);
    if z.iter().any(|r| !cabs(r).to_f64().is_finite()) {
        return Err(QesError::NoConvergence {
            iterations: 2000,
            last_move: f64::NAN,
        });
    }
    Ok(z)
}

/// Bivariate polynomial: a polynomial in `y` whose coefficients are [`UPoly`] in `x`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BPoly {
    c: Vec<UPoly>,
}

impl BPoly {
    pub fn new(mut c: Vec<UPoly>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        BPoly { c }
    }

    pub fn x() -> Self {
        BPoly::new(vec![UPoly::x()])
    }

    pub fn y() -> Self {
        BPoly::new(vec![UPoly::zero(), UPoly::one()])
    }

    pub fn constant(v: BigRational) -> Self {
        BPoly::new(vec![UPoly::constant(v)])
    }

    pub fn from_int(v: i64) -> Self {
        Self::constant(rat(v))
    }

    /// Coefficients in `y`.
    pub fn y_coeffs(&self) -> &[UPoly] {
        &self.c
    }

    pub fn degree_y(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        BPoly::new(self.c.iter().map(|p| p.scale(k)).collect())
    }

    /// Substitutes `x`, leaving complex coefficients in `y`.
    pub fn at_x<T: Real>(&self, x: &C<T>) -> Vec<C<T>> {
        self.c.iter().map(|p| p.eval_complex(x)).collect()
    }

    /// Substitutes a rational `x`, leaving an exact polynomial in `y`.
    pub fn at_x_exact(&self, x: &BigRational) -> UPoly {
        UPoly::new(self.c.iter().map(|p| p.eval(x)).collect())
    }

    pub fn eval_complex<T: Real>(&self, x: &C<T>, y: &C<T>) -> C<T> {
        self.at_x(x)
            .into_iter()
            .rev()
            .fold(C::<T>::zero(), |acc, a| acc * y.clone() + a)
    }

    /// Sum of coefficient moduli times monomial moduli, a scale for `eval_complex`.
    pub fn eval_magnitude<T: Real>(&self, x: &C<T>, y: &C<T>) -> T {
        let ax = cabs(x);
        let ay = cabs(y);
        let mut total = T::zero();
        let mut ypow = T::one();
        for p in &self.c {
            let mut xpow = T::one();
            for a in p.coeffs() {
                total = total + T::from_ratio(&a.abs()) * xpow.clone() * ypow.clone();
                xpow = xpow * ax.clone();
            }
            ypow = ypow * ay.clone();
        }
        total
    }

    /// Resultant with respect to `y`, a polynomial in `x`.
    pub fn resultant_y(&self, other: &BPoly) -> UPoly {
        let (Some(m), Some(n)) = (self.degree_y(), other.degree_y()) else {
            return UPoly::zero();
        };
        if m == 0 {
            return self.c[0].pow(n);
        }
        if n == 0 {
            return other.c[0].pow(m);
        }
        let size = m + n;
        let mut rows = vec![vec![UPoly::zero(); size]; size];
        for i in 0..n {
            for (j, coef) in self.c.iter().rev().enumerate() {
                rows[i][i + j] = coef.clone();
            }
        }
        for i in 0..m {
            for (j, coef) in other.c.iter().rev().enumerate() {
                rows[n + i][i + j] = coef.clone();
            }
        }
        det_bareiss(rows)
    }
}

impl Zero for BPoly {
    fn zero() -> Self {
        BPoly { c: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
}

impl One for BPoly {
    fn one() -> Self {
        BPoly { c: vec![UPoly::one()] }
    }
}

impl<'a> Add<&'a BPoly> for &'a BPoly {
    type Output = BPoly;
    fn add(self, o: &BPoly) -> BPoly {
        let z = UPoly::zero();
        BPoly::new(
            (0..self.c.len().max(o.c.len()))
                .map(|i| self.c.get(i).unwrap_or(&z) + o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a BPoly> for &'a BPoly {
    type Output = BPoly;
    fn sub(self, o: &BPoly) -> BPoly {
        let z = UPoly::zero();
        BPoly::new(
            (0..self.c.len().max(o.c.len()))
                .map(|i| self.c.get(i).unwrap_or(&z) - o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl<'a> Mul<&'a BPoly> for &'a BPoly {
    type Output = BPoly;
    fn mul(self, o: &BPoly) -> BPoly {
        if self.is_zero() || o.is_zero() {
            return BPoly::zero();
        }
        let mut c = vec![UPoly::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        BPoly::new(c)
    }
}

impl Neg for BPoly {
    type Output = BPoly;
    fn neg(self) -> BPoly {
        BPoly::new(self.c.into_iter().map(|p| -p).collect())
    }
}

impl<'a> Neg for &'a BPoly {
    type Output = BPoly;
    fn neg(self) -> BPoly {
        -(self.clone())
    }
}

/// Commutative ring operations needed by [`det_laplace`].
pub trait RingElem: Clone + Zero + One + Neg<Output = Self>
where
    for<'a> &'a Self: Add<&'a Self, Output = Self> + Sub<&'a Self, Output = Self> + Mul<&'a Self, Output = Self>,
{
}

impl<R> RingElem for R
where
    R: Clone + Zero + One + Neg<Output = R>,
    for<'a> &'a R: Add<&'a R, Output = R> + Sub<&'a R, Output = R> + Mul<&'a R, Output = R>,
{
}

/// Determinant by memoized Laplace expansion along rows; cheap for banded matrices.
pub fn det_laplace<R: RingElem>(m: &[Vec<R>]) -> R
where
    for<'a> &'a R: Add<&'a R, Output = R> + Sub<&'a R, Output = R> + Mul<&'a R, Output = R>,
{
    let n = m.len();
    assert!(n <= 63, "matrix too large for mask-based expansion");
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let mut memo: HashMap<u64, R> = HashMap::new();
    laplace_rec(m, 0, 0, &mut memo)
}

fn laplace_rec<R: RingElem>(m: &[Vec<R>], row: usize, used: u64, memo: &mut HashMap<u64, R>) -> R
where
    for<'a> &'a R: Add<&'a R, Output = R> + Sub<&'a R, Output = R> + Mul<&'a R, Output = R>,
{
    let n = m.len();
    if row == n {
        return R::one();
    }
    if let Some(v) = memo.get(&used) {
        return v.clone();
    }
    let mut acc = R::zero();
    let mut position = 0usize;
    for j in 0..n {
        if used & (1 << j) != 0 {
            continue;
        }
        let entry = &m[row][j];
        if !entry.is_zero() {
            let sub = laplace_rec(m, row + 1, used | (1 << j), memo);
            if !sub.is_zero() {
                let term = entry * &sub;
                acc = if position % 2 == 0 { &acc + &term } else { &acc - &term };
            }
        }
        position += 1;
    }
    memo.insert(used, acc.clone());
    acc
}

/// Fraction-free (Bareiss) determinant over ℚ[x].
pub fn det_bareiss(mut m: Vec<Vec<UPoly>>) -> UPoly {
    let n = m.len();
    if n == 0 {
        return UPoly::one();
    }
    let mut sign = false;
    let mut prev = UPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return UPoly::zero();
            };
            m.swap(k, p);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = UPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Exact determinant over ℚ by Gaussian elimination.
pub fn det_rational(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        let pivot = m[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            let factor = &m[i][k] / &pivot;
            if factor.is_zero() {
                continue;
            }
            for j in k..n {
                let v = &factor * &m[k][j];
                m[i][j] -= v;
            }
        }
    }
    det
}

/// Exact kernel basis of a rational matrix (reduced row echelon form).
pub fn kernel_rational(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for j in 0..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in 0..cols {
                    let v = &factor * &a[r][j];
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][f].clone();
            }
            v
        })
        .collect()
}

/// Factorization into rational linear factors and a rational-root-free remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub leading: BigRational,
    /// `(root, multiplicity)` for each factor `(x − root)`.
    pub linear: Vec<(BigRational, usize)>,
    /// Monic square-free factors without rational roots, with multiplicities.
    pub rest: Vec<(UPoly, usize)>,
}

impl Factorization {
    pub fn of(p: &UPoly) -> Self {
        let mut linear = Vec::new();
        let mut rest = Vec::new();
        for (f, mult) in p.square_free_decomposition() {
            let mut remaining = f;
            for r in remaining.rational_roots() {
                linear.push((r.clone(), mult));
                let lin = UPoly::new(vec![-r, BigRational::one()]);
                remaining = remaining.exact_div(&lin).expect("root divides");
            }
            if remaining.degree().unwrap_or(0) > 0 {
                rest.push((remaining, mult));
            }
        }
        linear.sort_by(|a, b| a.0.cmp(&b.0));
        Factorization {
            leading: p.lead(),
            linear,
            rest,
        }
    }

    pub fn expand(&self) -> UPoly {
        let mut acc = UPoly::constant(self.leading.clone());
        for (r, m) in &self.linear {
            acc = &acc * &UPoly::new(vec![-r.clone(), BigRational::one()]).pow(*m);
        }
        for (f, m) in &self.rest {
            acc = &acc * &f.pow(*m);
        }
        acc
    }

    pub fn display_in(&self, var: &str) -> String {
        let mut out = String::new();
        if !self.leading.is_one() || (self.linear.is_empty() && self.rest.is_empty()) {
            out.push_str(&crate::model::format_rational(&self.leading));
        }
        for (r, m) in &self.linear {
            let lin = if r.is_zero() {
                var.to_string()
            } else if r.is_negative() {
                format!("({var} + {})", crate::model::format_rational(&-r.clone()))
            } else {
                format!("({var} - {})", crate::model::format_rational(r))
            };
            out.push_str(&lin);
            if *m > 1 {
                out.push_str(&format!("^{m}"));
            }
        }
        for (f, m) in &self.rest {
            out.push_str(&format!("({})", f.display_in(var)));
            if *m > 1 {
                out.push_str(&format!("^{m}"));
            }
        }
        out
    }
}

/// Points where two bivariate polynomials vanish together.
#[derive(Clone, Debug)]
pub struct CommonZeros<T: Real> {
    /// Resultant in `y`; its roots are the `x` coordinates.
    pub resultant: UPoly,
    pub points: Vec<(C<T>, C<T>)>,
}

/// Common zeros of `p` and `q` through the resultant in `y`.
///
/// `None` when the resultant vanishes identically, i.e. `p` and `q` share a curve.
pub fn common_zeros<T: Real>(p: &BPoly, q: &BPoly) -> Result<Option<CommonZeros<T>>> {
    let resultant = p.resultant_y(q);
    if resultant.is_zero() {
        return Ok(None);
    }
    let xs = resultant.square_free().complex_roots::<T>()?;
    let trim = T::scaled_tol(1e-12);
    let accept = T::scaled_tol(1e-8);
    let merge = T::scaled_tol(1e-5);
    let mut points: Vec<(C<T>, C<T>)> = Vec::new();
    for x in xs {
        let mut ys: Vec<C<T>> = Vec::new();
        for (a, b) in [(p, q), (q, p)] {
            let coeffs = trim_leading(a.at_x(&x), &trim);
            if coeffs.len() <= 1 {
                continue;
            }
            for y in complex_coeff_roots(&coeffs)? {
                let other = b.eval_complex(&x, &y);
                let ok = cabs(&other) <= accept.clone() * (T::one() + b.eval_magnitude(&x, &y));
                let fresh = ys
                    .iter()
                    .all(|z| cabs(&(z.clone() - y.clone())) > merge.clone() * (T::one() + cabs(&y)));
                if ok && fresh {
                    ys.push(y);
                }
            }
        }
        points.extend(ys.into_iter().map(|y| (x.clone(), y)));
    }
    Ok(Some(CommonZeros { resultant, points }))
}

/// Drops leading coefficients that are negligible next to the largest one.
fn trim_leading<T: Real>(mut c: Vec<C<T>>, rel: &T) -> Vec<C<T>> {
    let top = c.iter().fold(T::zero(), |m, z| m.max_of(cabs(z)));
    if top.is_zero() {
        return Vec::new();
    }
    while c.last().is_some_and(|z| cabs(z) <= rel.clone() * top.clone()) {
        c.pop();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mp256;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn arithmetic_and_division() {
        let a = UPoly::from_ints(&[1, 2, 1]); // (x+1)^2
        let b = UPoly::from_ints(&[1, 1]);
        let (qt, r) = a.div_rem(&b);
        assert_eq!(qt, b);
        assert!(r.is_zero());
        assert_eq!(a.gcd(&UPoly::from_ints(&[-1, 0, 1])), b);
        assert_eq!(a.derivative(), UPoly::from_ints(&[2, 2]));
        assert_eq!(a.square_free(), b);
    }

    #[test]
    fn yun_decomposition() {
        // (t+1)(t-2)^2 = t^3 - 3t^2 + 4
        let p = UPoly::from_ints(&[4, 0, -3, 1]);
        let d = p.square_free_decomposition();
        assert_eq!(d, vec![(UPoly::from_ints(&[1, 1]), 1), (UPoly::from_ints(&[-2, 1]), 2)]);
        let f = Factorization::of(&p);
        assert_eq!(f.linear, vec![(q(-1, 1), 1), (q(2, 1), 2)]);
        assert_eq!(f.expand(), p);
        assert_eq!(f.display_in("t"), "(t + 1)(t - 2)^2");
    }

    #[test]
    fn real_roots_exact_and_irrational() {
        // (2x - 1)(x^2 - 2)(x + 3)
        let p = &(&UPoly::from_ints(&[-1, 2]) * &UPoly::from_ints(&[-2, 0, 1])) * &UPoly::from_ints(&[3, 1]);
        let roots = p.real_roots();
        assert_eq!(roots.len(), 4);
        assert_eq!(roots[0], RealRoot::Exact(q(-3, 1)));
        assert!(matches!(roots[1], RealRoot::Interval(..)));
        assert!((roots[1].approx() + 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(roots[2], RealRoot::Exact(q(1, 2)));
        assert!((roots[3].approx() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.rational_roots(), vec![q(-3, 1), q(1, 2)]);
    }

    #[test]
    fn root_at_bisection_midpoint() {
        // roots 0, 1, -1: the first midpoint is exactly a root
        let p = UPoly::from_ints(&[0, -1, 0, 1]);
        let r = p.rational_roots();
        assert_eq!(r, vec![q(-1, 1), q(0, 1), q(1, 1)]);
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&q(1, 3), &q(1, 2)), q(1, 2));
        assert_eq!(simplest_between(&q(3, 10), &q(4, 10)), q(1, 3));
        assert_eq!(simplest_between(&q(-7, 4), &q(-5, 4)), q(-3, 2));
        assert_eq!(simplest_between(&q(-1, 2), &q(1, 2)), q(0, 1));
    }

    #[test]
    fn aberth_finds_complex_roots() {
        // x^4 + 1
        let p = UPoly::from_ints(&[1, 0, 0, 0, 1]);
        let roots: Vec<C<f64>> = p.complex_roots().unwrap();
        assert_eq!(roots.len(), 4);
        for z in roots {
            assert!((z.powi(4) + Complex64::new(1.0, 0.0)).norm() < 1e-13);
        }
        let roots: Vec<C<Mp256>> = UPoly::from_ints(&[-2, 0, 1]).complex_roots().unwrap();
        for z in roots {
            let err = cabs(&(z.clone() * z - c_real(Mp256::from_f64(2.0))));
            assert!(err < Mp256::from_f64(1e-70));
        }
    }

    #[test]
    fn complex_coefficient_roots() {
        let i = Complex64::new(0.0, 1.0);
        // (x - i)(x + 2)
        let r = complex_coeff_roots(&[-2.0 * i, Complex64::new(2.0, 0.0) - i, Complex64::new(1.0, 0.0)]).unwrap();
        assert!(r.iter().any(|z| (z - i).norm() < 1e-13));
        assert!(r.iter().any(|z| (z + 2.0).norm() < 1e-13));
    }

    #[test]
    fn determinants_agree() {
        let m: Vec<Vec<BigRational>> = vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(3, 1), q(1, 1)],
            vec![q(0, 1), q(1, 1), q(4, 1)],
        ];
        assert_eq!(det_laplace(&m), q(18, 1));
        assert_eq!(det_rational(m), q(18, 1));
        let x = UPoly::x();
        let one = UPoly::one();
        let pm = vec![vec![x.clone(), one.clone()], vec![one.clone(), x.clone()]];
        assert_eq!(det_laplace(&pm), UPoly::from_ints(&[-1, 0, 1]));
        assert_eq!(det_bareiss(pm), UPoly::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn resultant_of_circle_and_line() {
        // x^2 + y^2 - 1 and y - x: resultant in y is 2x^2 - 1
        let x = BPoly::x();
        let y = BPoly::y();
        let circle = &(&(&x * &x) + &(&y * &y)) - &BPoly::from_int(1);
        let line = &y - &x;
        let r = circle.resultant_y(&line);
        assert_eq!(r.monic(), UPoly::new(vec![q(-1, 2), q(0, 1), q(1, 1)]));
    }

    #[test]
    fn rational_kernel() {
        let m = vec![vec![q(1, 1), q(2, 1), q(3, 1)], vec![q(2, 1), q(4, 1), q(6, 1)]];
        let k = kernel_rational(&m);
        assert_eq!(k.len(), 2);
        for v in k {
            let dot: BigRational = m[0].iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    proptest! {
        #[test]
        fn gcd_divides_both(a in proptest::collection::vec(-5i64..5, 1..5), b in proptest::collection::vec(-5i64..5, 1..5),
                            common in proptest::collection::vec(-5i64..5, 2..4)) {
            let c = UPoly::from_ints(&common);
            prop_assume!(c.degree().unwrap_or(0) > 0);
            let pa = &UPoly::from_ints(&a) * &c;
            let pb = &UPoly::from_ints(&b) * &c;
            prop_assume!(!pa.is_zero() && !pb.is_zero());
            let g = pa.gcd(&pb);
            prop_assert!(pa.exact_div(&g).is_some());
            prop_assert!(pb.exact_div(&g).is_some());
            prop_assert!(g.exact_div(&c.monic()).is_some());
        }

        #[test]
        fn integer_roots_are_found_exactly(roots in proptest::collection::vec(-20i64..20, 1..7)) {
            let p = roots.iter().fold(UPoly::one(), |acc, r| &acc * &UPoly::from_ints(&[-r, 1]));
            let mut expected: Vec<BigRational> = roots.iter().map(|&r| q(r, 1)).collect();
            expected.sort();
            expected.dedup();
            prop_assert_eq!(p.rational_roots(), expected);
        }

        #[test]
        fn laplace_matches_gauss(entries in proptest::collection::vec(-9i64..9, 16)) {
            let m: Vec<Vec<BigRational>> = entries.chunks(4).map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect();
            prop_assert_eq!(det_laplace(&m), det_rational(m));
        }
    }

    #[test]
    fn common_zeros_of_circle_and_line() {
        // x^2 + y^2 - 5 and y - 2x + 3 meet at (2, 1) and (2/5, -11/5)
        let x = BPoly::x();
        let y = BPoly::y();
        let p = &(&(&x * &x) + &(&y * &y)) - &BPoly::from_int(5);
        let q = &(&y - &(&BPoly::from_int(2) * &x)) + &BPoly::from_int(3);
        let mut z = common_zeros::<f64>(&p, &q).unwrap().unwrap().points;
        z.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
        assert_eq!(z.len(), 2);
        assert!((z[0].0.re - 0.4).abs() < 1e-12 && (z[0].1.re + 2.2).abs() < 1e-12);
        assert!((z[1].0.re - 2.0).abs() < 1e-12 && (z[1].1.re - 1.0).abs() < 1e-12);
        assert!(common_zeros::<f64>(&p, &p).unwrap().is_none());
    }
}
