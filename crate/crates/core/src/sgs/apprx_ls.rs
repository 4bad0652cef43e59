//! APPRX-LS: recover a real node signal whose oriented edge differences
//! match `∇s_K` in the least-squares sense, then take its Fourier
//! magnitudes.

use crate::spectral::{EigenSystem, PseudoInverse};
use crate::Result;

/// `|Uᵀ f̂|` with `f̂ = B⁺ ∇s` for a prepared pseudo-inverse of the
/// oriented incidence `B`.
pub fn magnitudes(eigen: &EigenSystem, pinv: &PseudoInverse, grad: &[f64]) -> Result<Vec<f64>> {
    let f_hat = pinv.solve(grad)?.x;
    Ok(eigen.project(&f_hat)?.into_iter().map(f64::abs).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eig_sym, lls_min_norm};
    use crate::stratify::{graph_laplacian, incidence_matrices};
    use crate::{Graph, VectorSignal};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_edge_orthogonal() {
        let g = Graph::from_edge_list(2, [(0, 1)]).unwrap();
        let s = VectorSignal::normalize_signal(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let eigen = eig_sym(&graph_laplacian(&g)).unwrap();
        for seed in 0..4 {
            let b = incidence_matrices(1, 2, g.edges(), seed).oriented;
            let grad = s.gradient(g.edges());
            let f = lls_min_norm(&b, &grad).unwrap().x;
            assert_abs_diff_eq!(f[0].abs(), 0.353553, epsilon = 1e-6);
            assert_abs_diff_eq!(f[0], -f[1], epsilon = 1e-12);
            let m = magnitudes(&eigen, &PseudoInverse::new(&b).unwrap(), &grad).unwrap();
            assert_abs_diff_eq!(m[0], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m[1], 0.5, epsilon = 1e-12);
        }
    }
}
