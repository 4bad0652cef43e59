//! ADJ-DIFF: correlate `∇s` with the edge gradients of each eigenvector,
//! scaled by the eigenvalue (the Dirichlet energy of a unit eigenvector).

use nalgebra::{DMatrix, DVector};

use crate::spectral::{EigenSystem, ZERO_EIGEN_TOL};
use crate::{Error, Result};

/// `|E| × N` matrix whose column `i` holds `|u_i(x) - u_i(y)|` per edge.
/// Columns of zero eigenvalues are all ones.
pub fn eigen_gradients(eigen: &EigenSystem, edges: &[(usize, usize)]) -> DMatrix<f64> {
    let n = eigen.len();
    let u = &eigen.vectors;
    DMatrix::from_fn(edges.len(), n, |e, i| {
        if eigen.values[i] < ZERO_EIGEN_TOL {
            1.0
        } else {
            let (x, y) = edges[e];
            (u[(x, i)] - u[(y, i)]).abs()
        }
    })
}

/// `M(i) = ⟨∇s, ∇u_i⟩ / λ_i`. For zero eigenvalues the all-ones column
/// stands in for `∇u_i`, and its own energy `⟨1, 1⟩ = |E|` replaces `λ_i`,
/// so `∇s = c·∇u_i` yields `M(i) = c` at every index.
pub fn magnitudes(eigen: &EigenSystem, grad_u: &DMatrix<f64>, grad: &[f64]) -> Result<Vec<f64>> {
    if grad.len() != grad_u.nrows() {
        return Err(Error::DimensionMismatch {
            what: "edge values",
            expected: grad_u.nrows(),
            found: grad.len(),
        });
    }
    let inner = grad_u.tr_mul(&DVector::from_column_slice(grad));
    let ones_energy = grad.len().max(1) as f64;
    Ok(inner
        .iter()
        .zip(&eigen.values)
        .map(|(&e, &lambda)| if lambda < ZERO_EIGEN_TOL { e / ones_energy } else { e / lambda })
        .collect())
}
