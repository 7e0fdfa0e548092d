//! Starting points at `ℓ = ∞`: all solutions `(s, t, h)` of the rescaled system.

use num_complex::Complex64;
use num_traits::Zero;

use crate::asymptotic::{multiplet_seed, multiplets, rescaled_matrix, rescaled_matrix_bivariate, rescaled_residual, z3_rotate};
use crate::error::Result;
use crate::magyari::kernel_of;
use crate::poly::{common_zeros, det_laplace, BPoly};
use crate::scalar::{c_to_f64, Mp256, Real};

/// Above this order only the multiplets and their Z3 images are used.
pub const MAX_FULL_SEED_N: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct Seed {
    pub s: Complex64,
    pub t: Complex64,
    /// Kernel with largest entry 1.
    pub h: Vec<Complex64>,
    /// Multiplet index when the seed is the real multiplet itself.
    pub branch: Option<usize>,
}

impl Seed {
    fn from_multiplet(n: usize, k: usize) -> Result<Self> {
        let m = &multiplets(n)?[k];
        let (s, t, h) = multiplet_seed(m);
        Ok(Seed {
            s,
            t,
            h: normalize(&h),
            branch: Some(k),
        })
    }
}

fn normalize(h: &[Complex64]) -> Vec<Complex64> {
    let pivot = h.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(Complex64::new(1.0, 0.0));
    h.iter().map(|v| v / pivot).collect()
}

/// Number of solutions of the rescaled system counted with Z3 orbits.
pub fn expected_seed_count(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Multiplets and their Z3 images; a multiplet at `t = 0` is its own image.
pub fn orbit_seeds(n: usize) -> Result<Vec<Seed>> {
    let mut out = Vec::new();
    for m in multiplets(n)? {
        let base = Seed::from_multiplet(n, m.k)?;
        let mut cur = (base.s, base.t, base.h.clone());
        out.push(base.clone());
        if m.t_k == 0 {
            continue;
        }
        for _ in 0..2 {
            cur = z3_rotate(cur.0, cur.1, &cur.2);
            out.push(Seed {
                s: cur.0,
                t: cur.1,
                h: normalize(&cur.2),
                branch: None,
            });
        }
    }
    Ok(out)
}

/// Every isolated solution of the rescaled system, found by elimination at 256 bits.
///
/// Falls back to [`orbit_seeds`] for `N > MAX_FULL_SEED_N` or if elimination degenerates.
pub fn rescaled_seeds(n: usize) -> Result<Vec<Seed>> {
    if n > MAX_FULL_SEED_N {
        return orbit_seeds(n);
    }
    let m = rescaled_matrix_bivariate(n);
    let minor = |skip: usize| -> BPoly {
        let sub: Vec<Vec<BPoly>> = m.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, r)| r.clone()).collect();
        det_laplace(&sub)
    };
    let Some(zeros) = common_zeros::<Mp256>(&minor(n + 1), &minor(0))? else {
        return orbit_seeds(n);
    };
    let multiplet_t: Vec<i64> = multiplets(n)?.iter().map(|m| m.t_k).collect();
    let mut out: Vec<Seed> = Vec::new();
    for (t, s) in zeros.points {
        let a = rescaled_matrix::<Mp256>(n, &s, &t);
        let k = kernel_of(&a, Mp256::scaled_tol(1e-8))?;
        let Some(h) = k.omega.filter(|_| k.dim >= 1) else {
            continue;
        };
        let (s64, t64) = (c_to_f64(&s), c_to_f64(&t));
        let h64: Vec<Complex64> = h.iter().map(c_to_f64).collect();
        let branch = multiplet_t.iter().position(|&tk| {
            let tk = Complex64::new(tk as f64, 0.0);
            (s64 - tk).norm() < 1e-12 && (t64 - tk).norm() < 1e-12
        });
        if let Some(k) = branch {
            out.push(Seed::from_multiplet(n, k)?);
        } else {
            out.push(Seed {
                s: s64,
                t: t64,
                h: normalize(&h64),
                branch: None,
            });
        }
    }
    if out.len() < orbit_seeds(n)?.len() {
        return orbit_seeds(n);
    }
    out.sort_by(|a, b| {
        b.branch
            .is_some()
            .cmp(&a.branch.is_some())
            .then(a.branch.cmp(&b.branch))
            .then(a.t.re.total_cmp(&b.t.re))
            .then(a.t.im.total_cmp(&b.t.im))
    });
    debug_assert!(out.iter().all(|sd| rescaled_residual(n, sd.s, sd.t, &sd.h) < 1e-9 || sd.h.iter().all(|v| v.is_zero())));
    Ok(out)
}
