//! IN-AGG: average the incident edge gradients at each node and take the
//! Fourier magnitudes of the result.

use crate::signal::divergence_from_edges;
use crate::spectral::EigenSystem;
use crate::Result;

/// `f̂(v) = Δs(v) / deg(v)`, zero at isolated nodes.
pub fn node_estimate(edges: &[(usize, usize)], degrees: &[usize], grad: &[f64]) -> Result<Vec<f64>> {
    let div = divergence_from_edges(degrees.len(), edges, grad)?;
    Ok(div
        .iter()
        .zip(degrees)
        .map(|(&d, &deg)| if deg == 0 { 0.0 } else { d / deg as f64 })
        .collect())
}

pub fn magnitudes(eigen: &EigenSystem, edges: &[(usize, usize)], degrees: &[usize], grad: &[f64]) -> Result<Vec<f64>> {
    let f_hat = node_estimate(edges, degrees, grad)?;
    Ok(eigen.project(&f_hat)?.into_iter().map(f64::abs).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_sym;
    use crate::stratify::graph_laplacian;
    use crate::{Graph, VectorSignal};
    use approx::assert_abs_diff_eq;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn cycle_pulse_estimate() {
        let g = Graph::from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let s = VectorSignal::normalize_signal(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]])
            .unwrap();
        let f = node_estimate(g.edges(), &g.degrees(), &s.gradient(g.edges())).unwrap();
        for (got, want) in f.iter().zip([H, H / 2.0, 0.0, H / 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_edge_lands_on_flat_component() {
        let g = Graph::from_edge_list(2, [(0, 1)]).unwrap();
        let s = VectorSignal::normalize_signal(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let f = node_estimate(g.edges(), &g.degrees(), &s.gradient(g.edges())).unwrap();
        assert_abs_diff_eq!(f[0], H, epsilon = 1e-12);
        assert_abs_diff_eq!(f[1], H, epsilon = 1e-12);
        let eigen = eig_sym(&graph_laplacian(&g)).unwrap();
        let m = magnitudes(&eigen, g.edges(), &g.degrees(), &s.gradient(g.edges())).unwrap();
        assert_abs_diff_eq!(m[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn isolated_nodes_get_zero() {
        let f = node_estimate(&[(0, 1)], &[1, 1, 0], &[0.5]).unwrap();
        assert_eq!(f, vec![0.5, 0.5, 0.0]);
    }
}
