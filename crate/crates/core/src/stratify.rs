//! Stratified graphs: for each `K`, the graph linking the node pairs at
//! shortest-path distance exactly `K`.
//!
//! The family is built from boolean walk matrices: `W_K = δ(W_{K-1} · A)`
//! marks pairs joined by a walk of length `K`, and removing every pair
//! already claimed by a lower stratum (clamped subtraction) plus the
//! diagonal leaves exactly the distance-`K` pairs.

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::rng::seeded;
use crate::{Error, Graph, Result};

/// One level `K` of a stratified-graph family.
#[derive(Clone, Debug, PartialEq)]
pub struct Stratum {
    k: usize,
    graph: Graph,
    components: usize,
    singletons: usize,
}

impl Stratum {
    fn new(k: usize, graph: Graph) -> Self {
        let c = graph.connected_components();
        Self {
            k,
            graph,
            components: c.count,
            singletons: c.singletons,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The stratum as a graph on the base node set.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.graph.edges()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn singletons(&self) -> usize {
        self.singletons
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        self.graph.adjacency_matrix()
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        graph_laplacian(&self.graph)
    }

    pub fn incidence(&self, seed: u64) -> IncidencePair {
        incidence_matrices(self.k, self.graph.num_nodes(), self.graph.edges(), seed)
    }

    pub fn to_document(&self) -> StratumDocument {
        StratumDocument {
            k: self.k,
            edges: self.edges().iter().map(|&(u, v)| [u, v]).collect(),
            components: self.components,
            singletons: self.singletons,
        }
    }
}

/// The strata `K = 1..=ρ` of a connected base graph, `ρ` its diameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SgFamily {
    base: Graph,
    strata: Vec<Stratum>,
}

impl SgFamily {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// Stratum `K`, 1-based.
    pub fn stratum(&self, k: usize) -> Option<&Stratum> {
        k.checked_sub(1).and_then(|i| self.strata.get(i))
    }

    /// Number of strata, equal to the base diameter.
    pub fn rho(&self) -> usize {
        self.strata.len()
    }
}

/// Builds the full stratified family of a connected graph.
pub fn stratified_adjacencies(g: &Graph) -> Result<SgFamily> {
    let rho = g.diameter()?;
    let n = g.num_nodes();
    // claimed[x*n+y]: pair already assigned to a lower stratum (or x == y).
    let mut claimed = vec![false; n * n];
    for x in 0..n {
        claimed[x * n + x] = true;
    }
    let mut walk = vec![false; n * n];
    for x in 0..n {
        walk[x * n + x] = true;
    }
    let mut strata = Vec::with_capacity(rho);
    for k in 1..=rho {
        let mut next = vec![false; n * n];
        for x in 0..n {
            let row = &walk[x * n..(x + 1) * n];
            let out = &mut next[x * n..(x + 1) * n];
            for (y, _) in row.iter().enumerate().filter(|(_, &r)| r) {
                for &z in g.neighbors(y) {
                    out[z] = true;
                }
            }
        }
        walk = next;
        let mut pairs = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if walk[x * n + y] && !claimed[x * n + y] {
                    pairs.push((x, y));
                }
            }
        }
        for &(x, y) in &pairs {
            claimed[x * n + y] = true;
            claimed[y * n + x] = true;
        }
        strata.push(Stratum::new(k, Graph::from_edge_list(n, pairs)?));
    }
    Ok(SgFamily {
        base: g.clone(),
        strata,
    })
}

/// Oriented and unsigned incidence matrices of one stratum, in canonical
/// edge order.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidencePair {
    pub stratum: usize,
    /// `|E| × N`: `+1` at the tail, `-1` at the head of each edge.
    pub oriented: DMatrix<f64>,
    /// `N × |E|`: `1` at both endpoints of each edge.
    pub unsigned: DMatrix<f64>,
}

/// Builds the incidence pair; each edge orientation is a fair coin flip
/// from the seeded generator, taken in edge order.
pub fn incidence_matrices(stratum: usize, n: usize, edges: &[(usize, usize)], seed: u64) -> IncidencePair {
    let mut rng = seeded(seed);
    let mut oriented = DMatrix::zeros(edges.len(), n);
    let mut unsigned = DMatrix::zeros(n, edges.len());
    for (e, &(u, v)) in edges.iter().enumerate() {
        let (tail, head) = if rng.gen::<bool>() { (u, v) } else { (v, u) };
        oriented[(e, tail)] = 1.0;
        oriented[(e, head)] = -1.0;
        unsigned[(u, e)] = 1.0;
        unsigned[(v, e)] = 1.0;
    }
    IncidencePair {
        stratum,
        oriented,
        unsigned,
    }
}

/// Combinatorial Laplacian `D - A` of a 0/1 adjacency matrix.
pub fn laplacian(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "adjacency columns",
            expected: n,
            found: a.ncols(),
        });
    }
    for i in 0..n {
        if a[(i, i)] != 0.0 {
            return Err(Error::NonZeroDiagonal(i));
        }
        for j in i + 1..n {
            if a[(i, j)] != a[(j, i)] {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    let mut l = -a.clone();
    for i in 0..n {
        l[(i, i)] = a.row(i).sum();
    }
    Ok(l)
}

/// Laplacian straight from a graph's edge list.
pub fn graph_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.num_nodes();
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        l[(u, v)] = -1.0;
        l[(v, u)] = -1.0;
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
    }
    l
}

/// Line-graph adjacency `BᵀB - 2I` from the unsigned incidence.
pub fn line_graph_adjacency(inc: &IncidencePair) -> Result<DMatrix<f64>> {
    let m = inc.unsigned.ncols();
    if m == 0 {
        return Err(Error::EmptyStratum {
            stratum: inc.stratum,
        });
    }
    let mut a = inc.unsigned.transpose() * &inc.unsigned;
    for i in 0..m {
        a[(i, i)] -= 2.0;
    }
    Ok(a)
}

/// Line-graph adjacency computed directly from an edge list, without
/// forming the incidence product.
pub fn line_graph_from_edges(stratum: usize, edges: &[(usize, usize)]) -> Result<DMatrix<f64>> {
    let m = edges.len();
    if m == 0 {
        return Err(Error::EmptyStratum { stratum });
    }
    let n = edges.iter().map(|&(_, v)| v + 1).max().unwrap_or(0);
    let mut incident = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(e);
        incident[v].push(e);
    }
    let mut a = DMatrix::zeros(m, m);
    for list in &incident {
        for (i, &e) in list.iter().enumerate() {
            for &f in &list[i + 1..] {
                a[(e, f)] = 1.0;
                a[(f, e)] = 1.0;
            }
        }
    }
    Ok(a)
}

/// Per-stratum export: `{"K": k, "edges": [...], "components": c, "singletons": s}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumDocument {
    #[serde(rename = "K")]
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
    pub components: usize,
    pub singletons: usize,
}
