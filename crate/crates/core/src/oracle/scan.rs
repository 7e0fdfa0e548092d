//! Exact scan of the diagonal `s = t` of the rescaled system.

use num_traits::{One, Zero};

use crate::error::{QesError, Result};
use crate::poly::{det_laplace, Factorization, RealRoot, UPoly};

pub const MAX_SCAN_N: usize = 8;

#[derive(Clone, Debug)]
pub struct MinorFactorization {
    pub deleted_row: usize,
    pub determinant: UPoly,
}

impl MinorFactorization {
    pub fn factorization(&self) -> Factorization {
        Factorization::of(&self.determinant)
    }
}

#[derive(Clone, Debug)]
pub struct RootScan {
    pub n: usize,
    /// Every maximal minor, indexed by the deleted row.
    pub minors: Vec<MinorFactorization>,
    /// Monic gcd of all minors.
    pub common: UPoly,
    pub roots: Vec<RealRoot>,
}

impl RootScan {
    /// Minor without the last row.
    pub fn top(&self) -> &MinorFactorization {
        &self.minors[self.n + 1]
    }

    /// Minor without the first row.
    pub fn bottom(&self) -> &MinorFactorization {
        &self.minors[0]
    }

    /// Roots that are integers, ascending. `None` if some root is not an integer.
    pub fn integer_roots(&self) -> Option<Vec<i64>> {
        self.roots
            .iter()
            .map(|r| match r {
                RealRoot::Exact(q) if q.is_integer() => i64::try_from(q.to_integer()).ok(),
                _ => None,
            })
            .collect()
    }
}

/// Row `r`: `(N+2−r)` at `r−2`, `t` at `r−1`, `t` at `r`, `(r+1)` at `r+1`.
fn diagonal_matrix(n: usize) -> Vec<Vec<UPoly>> {
    let t = UPoly::x();
    let mut m = vec![vec![UPoly::zero(); n + 1]; n + 2];
    for (r, row) in m.iter_mut().enumerate() {
        if r >= 2 {
            row[r - 2] = UPoly::from_ints(&[(n + 2 - r) as i64]);
        }
        if r >= 1 && r - 1 <= n {
            row[r - 1] = t.clone();
        }
        if r <= n {
            row[r] = row[r].clone() + t.clone();
        }
        if r < n {
            row[r + 1] = UPoly::from_ints(&[r as i64 + 1]);
        }
    }
    m
}

/// The gcd of all `N+2` maximal minors is used: the top and bottom minors alone can share spurious factors.
pub fn rescaled_root_scan(n: usize) -> Result<RootScan> {
    if n > MAX_SCAN_N {
        return Err(QesError::Unsupported(format!("diagonal scan is limited to N <= {MAX_SCAN_N}, got {n}")));
    }
    let m = diagonal_matrix(n);
    let minors: Vec<MinorFactorization> = (0..n + 2)
        .map(|j| {
            let sub: Vec<Vec<UPoly>> = m
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, r)| r.clone())
                .collect();
            let determinant = det_laplace(&sub);
            MinorFactorization {
                deleted_row: j,
                determinant,
            }
        })
        .collect();
    let common = minors
        .iter()
        .fold(UPoly::zero(), |g, mf| g.gcd(&mf.determinant));
    let roots = if common.is_zero() || common == UPoly::one() {
        Vec::new()
    } else {
        common.real_roots()
    };
    Ok(RootScan {
        n,
        minors,
        common,
        roots,
    })
}
