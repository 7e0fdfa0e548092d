//! The two square eigenproblems: rows `0..N` with `F` on the diagonal and rows `1..N+1` with `E` on the diagonal.

use crate::error::Result;
use crate::linalg::{eigenvalues, CMatrix};
use crate::magyari::MagyariSystem;
use crate::scalar::{cabs, Real, C};

#[derive(Clone, Debug)]
pub struct SquareProblemPair<T: Real> {
    /// Rows `0..N` at `F = 0`.
    pub top: CMatrix<T>,
    /// Rows `1..N+1` at `E = 0`.
    pub bottom: CMatrix<T>,
}

impl<T: Real> SquareProblemPair<T> {
    /// `top` at energy `e`, `bottom` at charge `f`.
    pub fn new(sys: &MagyariSystem<T>, e: &C<T>, f: &C<T>) -> Self {
        let zero = C::new(T::zero(), T::zero());
        let n = sys.n;
        let rows_top: Vec<usize> = (0..=n).collect();
        let rows_bottom: Vec<usize> = (1..=n + 1).collect();
        let cols: Vec<usize> = (0..=n).collect();
        SquareProblemPair {
            top: sys.assemble(e, &zero).select(&rows_top, &cols),
            bottom: sys.assemble(&zero, f).select(&rows_bottom, &cols),
        }
    }
}

fn negated_spectrum<T: Real>(m: &CMatrix<T>) -> Result<Vec<C<T>>> {
    Ok(eigenvalues(m)?.into_iter().map(|z| -z).collect())
}

/// Charges making rows `0..N` singular at energy `e`.
pub fn eigen_f<T: Real>(sys: &MagyariSystem<T>, e: &C<T>) -> Result<Vec<C<T>>> {
    let zero = C::new(T::zero(), T::zero());
    negated_spectrum(&SquareProblemPair::new(sys, e, &zero).top)
}

/// Energies making rows `1..N+1` singular at charge `f`.
pub fn eigen_e<T: Real>(sys: &MagyariSystem<T>, f: &C<T>) -> Result<Vec<C<T>>> {
    let zero = C::new(T::zero(), T::zero());
    negated_spectrum(&SquareProblemPair::new(sys, &zero, f).bottom)
}

/// Entry of `values` closest to `target`.
pub fn nearest<T: Real>(values: &[C<T>], target: &C<T>) -> Option<C<T>> {
    values
        .iter()
        .min_by(|a, b| {
            cabs(&((*a).clone() - target.clone()))
                .partial_cmp(&cabs(&((*b).clone() - target.clone())))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .cloned()
}
