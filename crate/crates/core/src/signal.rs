//! Graph signals and their edge-level geometry.
//!
//! For unit vectors `a`, `b` at angle `θ` the gradient
//! `sqrt((1 - cos θ) / 2)` equals the half chord `‖a - b‖ / 2`, and `Γ`
//! equals `‖a + b‖ / 2`. The chord forms are used because they are exactly
//! zero for identical rows and need no clamping.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::generators::is_caveman_variant;
use crate::rng::seeded;
use crate::{Error, Graph, Result};

/// One unit-norm `dim`-vector per node, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSignal {
    dim: usize,
    data: Vec<f64>,
}

impl VectorSignal {
    /// Normalizes each row to unit length.
    pub fn normalize_signal(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::EmptyInput("signal rows"))?;
        if dim == 0 {
            return Err(Error::InvalidParameter("signal dimension must be at least 1".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "signal row length",
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(dim, data)
    }

    /// Normalizes a row-major `N × dim` buffer.
    pub fn from_flat(dim: usize, mut data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "buffer of length {} is not a whole number of {dim}-vectors",
                data.len()
            )));
        }
        for (node, row) in data.chunks_mut(dim).enumerate() {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::ZeroRow { node });
            }
            row.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(Self { dim, data })
    }

    /// Same vector on every node.
    pub fn constant(n: usize, vector: &[f64]) -> Result<Self> {
        Self::from_flat(vector.len(), vector.repeat(n))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.dim..(v + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// `N × dim` matrix view.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.num_nodes(), self.dim, &self.data)
    }

    /// Cosine of the angle between rows `u` and `v`, clamped to `[-1, 1]`.
    pub fn cosine(&self, u: usize, v: usize) -> f64 {
        dot(self.row(u), self.row(v)).clamp(-1.0, 1.0)
    }

    /// `(∇s)(u, v)` for every edge, in edge order.
    pub fn gradient(&self, edges: &[(usize, usize)]) -> Vec<f64> {
        edges
            .iter()
            .map(|&(u, v)| (half_chord(self.row(u), self.row(v), -1.0)).min(1.0))
            .collect()
    }

    /// `(Γs)(u, v)` for every edge, in edge order.
    pub fn gamma(&self, edges: &[(usize, usize)]) -> Vec<f64> {
        edges
            .iter()
            .map(|&(u, v)| (half_chord(self.row(u), self.row(v), 1.0)).min(1.0))
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `‖a + sign·b‖ / 2`.
fn half_chord(a: &[f64], b: &[f64], sign: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x + sign * y).powi(2))
        .sum::<f64>()
        .sqrt()
        / 2.0
}

/// A scalar signal, kept at its raw values. Its edge gradient is the
/// absolute difference of the endpoint values.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSignal {
    values: Vec<f64>,
}

impl RealSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("signal values"));
        }
        if let Some(node) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at node {node}")));
        }
        Ok(Self { values })
    }

    /// Scales the signal to unit l2 norm over the nodes.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize an all-zero signal".into()));
        }
        Self::new(values.into_iter().map(|x| x / norm).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_nodes(&self) -> usize {
        self.values.len()
    }

    pub fn gradient(&self, edges: &[(usize, usize)]) -> Vec<f64> {
        edges
            .iter()
            .map(|&(u, v)| (self.values[u] - self.values[v]).abs())
            .collect()
    }
}

/// Either kind of signal accepted by the transforms.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphSignal {
    Vector(VectorSignal),
    Real(RealSignal),
}

impl GraphSignal {
    pub fn num_nodes(&self) -> usize {
        match self {
            Self::Vector(s) => s.num_nodes(),
            Self::Real(s) => s.num_nodes(),
        }
    }

    /// Per-edge distance: the gradient for vector signals, the absolute
    /// difference for real signals.
    pub fn edge_gradient(&self, edges: &[(usize, usize)]) -> Vec<f64> {
        match self {
            Self::Vector(s) => s.gradient(edges),
            Self::Real(s) => s.gradient(edges),
        }
    }

    pub fn as_vector(&self) -> Option<&VectorSignal> {
        match self {
            Self::Vector(s) => Some(s),
            Self::Real(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<&RealSignal> {
        match self {
            Self::Real(s) => Some(s),
            Self::Vector(_) => None,
        }
    }

    pub fn to_document(&self) -> SignalDocument {
        match self {
            Self::Vector(s) => SignalDocument {
                dim: s.dim(),
                vectors: Some(s.rows()),
                values: None,
            },
            Self::Real(s) => SignalDocument {
                dim: 1,
                vectors: None,
                values: Some(s.values().to_vec()),
            },
        }
    }
}

impl From<VectorSignal> for GraphSignal {
    fn from(s: VectorSignal) -> Self {
        Self::Vector(s)
    }
}

impl From<RealSignal> for GraphSignal {
    fn from(s: RealSignal) -> Self {
        Self::Real(s)
    }
}

/// `Δs(v)`: sum of the edge values incident to `v`, using the unsigned
/// `N × |E|` incidence.
pub fn divergence(grad: &[f64], inc_unsigned: &DMatrix<f64>) -> Result<Vec<f64>> {
    if grad.len() != inc_unsigned.ncols() {
        return Err(Error::DimensionMismatch {
            what: "edge values",
            expected: inc_unsigned.ncols(),
            found: grad.len(),
        });
    }
    Ok((0..inc_unsigned.nrows())
        .map(|v| inc_unsigned.row(v).iter().zip(grad).map(|(b, g)| b * g).sum())
        .collect())
}

/// `Δs(v)` straight from an edge list.
pub fn divergence_from_edges(n: usize, edges: &[(usize, usize)], grad: &[f64]) -> Result<Vec<f64>> {
    if grad.len() != edges.len() {
        return Err(Error::DimensionMismatch {
            what: "edge values",
            expected: edges.len(),
            found: grad.len(),
        });
    }
    let mut out = vec![0.0; n];
    for (&(u, v), &g) in edges.iter().zip(grad) {
        out[u] += g;
        out[v] += g;
    }
    Ok(out)
}

/// Signal families used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    /// `dim = 1`: uniform values in `[-1, 1]` scaled to unit l2 norm.
    /// `dim > 1`: standard normal components, each row normalized.
    Random,
    /// Standard basis vector at a seeded node.
    Pulse,
    /// The fixed 3-dimensional initial condition on the caveman variant.
    Task3Init,
}

impl std::str::FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Random),
            "pulse" => Ok(Self::Pulse),
            "task3_init" => Ok(Self::Task3Init),
            other => Err(Error::InvalidParameter(format!("unknown signal kind {other:?}"))),
        }
    }
}

pub fn make_signal(kind: SignalKind, g: &Graph, dim: usize, seed: u64) -> Result<GraphSignal> {
    let n = g.num_nodes();
    if dim == 0 {
        return Err(Error::InvalidParameter("signal dimension must be at least 1".into()));
    }
    let mut rng = seeded(seed);
    match kind {
        SignalKind::Random if dim == 1 => {
            let values = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            Ok(RealSignal::normalized(values)?.into())
        }
        SignalKind::Random => {
            let data = (0..n * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            Ok(VectorSignal::from_flat(dim, data)?.into())
        }
        SignalKind::Pulse => {
            if dim != 1 {
                return Err(Error::InvalidParameter("pulse signals are real-valued (dim 1)".into()));
            }
            Ok(RealSignal::new(pulse(n, rng.gen_range(0..n)))?.into())
        }
        SignalKind::Task3Init => {
            if dim != 3 || !is_caveman_variant(g) {
                return Err(Error::InvalidParameter(
                    "task3_init needs the caveman variant and dim 3".into(),
                ));
            }
            Ok(task3_init().into())
        }
    }
}

/// Unit impulse at `position`.
pub fn pulse(n: usize, position: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[position] = 1.0;
    v
}

/// Initial 3-dimensional embedding of the caveman variant, rows in
/// label order A..M.
pub fn task3_init() -> VectorSignal {
    const HUB: [f64; 3] = [0.58, 0.58, 0.58];
    const X: [f64; 3] = [1.0, 0.0, 0.0];
    const Y: [f64; 3] = [0.0, 1.0, 0.0];
    const Z: [f64; 3] = [0.0, 0.0, 1.0];
    const NX: [f64; 3] = [-1.0, 0.0, 0.0];
    const NY: [f64; 3] = [0.0, -1.0, 0.0];
    //        A    B  C  D  E   F   G   H   I   J   K    L    M
    let rows = [HUB, X, Y, Z, NY, NX, NX, NY, NY, NX, HUB, HUB, HUB];
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    VectorSignal::normalize_signal(&rows).expect("rows are nonzero")
}

/// Signal file format: `{"dim": M, "vectors": [[...], ...]}` or the
/// real-valued shortcut `{"dim": 1, "values": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl SignalDocument {
    pub fn to_signal(&self) -> Result<GraphSignal> {
        match (&self.vectors, &self.values) {
            (Some(rows), None) => {
                let s = VectorSignal::normalize_signal(rows)?;
                if s.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        what: "signal dim",
                        expected: self.dim,
                        found: s.dim(),
                    });
                }
                Ok(s.into())
            }
            (None, Some(values)) if self.dim == 1 => Ok(RealSignal::new(values.clone())?.into()),
            _ => Err(Error::InvalidParameter(
                "signal document needs exactly one of \"vectors\" or \"values\" (values only with dim 1)"
                    .into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_caveman_variant;
    use approx::assert_abs_diff_eq;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cycle4() -> Graph {
        Graph::from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let s = VectorSignal::normalize_signal(&[vec![3.0, 4.0]]).unwrap();
        assert_eq!(s.row(0), &[0.6, 0.8]);
        let unit = VectorSignal::normalize_signal(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(unit.rows(), vec![vec![1.0, 0.0], vec![0.0, -1.0]]);
        assert_eq!(
            VectorSignal::normalize_signal(&[vec![1.0, 0.0], vec![0.0, 0.0]]),
            Err(Error::ZeroRow { node: 1 })
        );
    }

    #[test]
    fn gradient_and_gamma_examples() {
        let s = VectorSignal::normalize_signal(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![-1.0, 0.0]])
            .unwrap();
        let edges = [(0, 1), (0, 2), (0, 3)];
        let g = s.gradient(&edges);
        assert_abs_diff_eq!(g[0], H, epsilon = 1e-12);
        assert_eq!(g[1], 0.0);
        assert_abs_diff_eq!(g[2], 1.0, epsilon = 1e-12);
        let gm = s.gamma(&edges);
        assert_abs_diff_eq!(gm[0], H, epsilon = 1e-12);
        assert_abs_diff_eq!(gm[1], 1.0, epsilon = 1e-12);
        assert_eq!(gm[2], 0.0);
    }

    #[test]
    fn divergence_examples() {
        let g = cycle4();
        let s = VectorSignal::normalize_signal(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]])
            .unwrap();
        let inc = crate::stratify::incidence_matrices(1, 4, g.edges(), 0);
        let d = divergence(&s.gradient(g.edges()), &inc.unsigned).unwrap();
        for (got, want) in d.iter().zip([2.0 * H, H, 0.0, H]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(d, divergence_from_edges(4, g.edges(), &s.gradient(g.edges())).unwrap());

        let c = VectorSignal::constant(4, &[0.3, 0.4]).unwrap();
        assert_eq!(divergence(&c.gradient(g.edges()), &inc.unsigned).unwrap(), vec![0.0; 4]);

        assert!(matches!(
            divergence(&[1.0], &inc.unsigned),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn task3_init_rows() {
        let cave = gen_caveman_variant();
        let s = make_signal(SignalKind::Task3Init, &cave.graph, 3, 0).unwrap();
        let s = s.as_vector().unwrap();
        let b = cave.graph.node_by_label("B").unwrap();
        assert_eq!(s.row(b), &[1.0, 0.0, 0.0]);
        for label in ["A", "K", "L", "M"] {
            for x in s.row(cave.graph.node_by_label(label).unwrap()) {
                assert_abs_diff_eq!(*x, 0.57735, epsilon = 1e-5);
            }
        }
        assert_eq!(s.row(cave.graph.node_by_label("E").unwrap()), &[0.0, -1.0, 0.0]);
        assert_eq!(s.row(cave.graph.node_by_label("J").unwrap()), &[-1.0, 0.0, 0.0]);
    }

    #[test]
    fn task3_init_needs_caveman() {
        assert!(make_signal(SignalKind::Task3Init, &cycle4(), 3, 0).is_err());
    }

    #[test]
    fn pulse_is_basis_vector() {
        assert_eq!(pulse(4, 2), vec![0.0, 0.0, 1.0, 0.0]);
        let s = make_signal(SignalKind::Pulse, &cycle4(), 1, 5).unwrap();
        let v = s.as_real().unwrap().values();
        assert_eq!(v.iter().filter(|&&x| x == 1.0).count(), 1);
        assert_eq!(v.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn random_signals_are_normalized() {
        let g = cycle4();
        let real = make_signal(SignalKind::Random, &g, 1, 3).unwrap();
        let norm: f64 = real.as_real().unwrap().values().iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        let vec = make_signal(SignalKind::Random, &g, 3, 3).unwrap();
        let vec = vec.as_vector().unwrap();
        for v in 0..4 {
            assert_abs_diff_eq!(dot(vec.row(v), vec.row(v)), 1.0, epsilon = 1e-12);
        }
        assert_eq!(make_signal(SignalKind::Random, &g, 3, 3).unwrap().as_vector(), Some(vec));
    }

    #[test]
    fn document_round_trip() {
        let s: GraphSignal = task3_init().into();
        let json = serde_json::to_string(&s.to_document()).unwrap();
        let back: SignalDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_signal().unwrap(), s);

        let real: SignalDocument = serde_json::from_str(r#"{"dim": 1, "values": [1, 0, 2]}"#).unwrap();
        assert_eq!(real.to_signal().unwrap().as_real().unwrap().values(), &[1.0, 0.0, 2.0]);
        let both = r#"{"dim": 1, "values": [1], "vectors": [[1]]}"#;
        assert!(serde_json::from_str::<SignalDocument>(both).unwrap().to_signal().is_err());
    }
}
