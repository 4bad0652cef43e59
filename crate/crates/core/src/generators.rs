//! Random and fixed graph generators used by the experiments.
//!
//! Random generators resample the whole graph until it is connected, with a
//! fresh derived seed per attempt, so the output distribution is the model
//! conditioned on connectivity.

use rand::Rng as _;

use crate::rng::{derive_seed, seeded};
use crate::{Error, Graph, Result};

/// Attempts allowed before a random generator gives up on connectivity.
pub const DEFAULT_RESAMPLE_BUDGET: usize = 1000;

/// A graph with a planted node partition.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedGraph {
    pub graph: Graph,
    /// Block or community index per node.
    pub membership: Vec<usize>,
}

impl PlantedGraph {
    /// Members of each block, in block order.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let count = self.membership.iter().max().map_or(0, |&m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (v, &m) in self.membership.iter().enumerate() {
            out[m].push(v);
        }
        out
    }
}

/// Erdős–Rényi graph `G(n, p)` conditioned on being connected.
pub fn gen_erm(n: usize, p: f64, seed: u64) -> Result<Graph> {
    gen_erm_with_budget(n, p, seed, DEFAULT_RESAMPLE_BUDGET)
}

pub fn gen_erm_with_budget(n: usize, p: f64, seed: u64, budget: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("ERM needs at least one node".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside (0, 1)")));
    }
    for attempt in 0..budget {
        let mut rng = seeded(derive_seed(seed, attempt as u64));
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    pairs.push((u, v));
                }
            }
        }
        let g = Graph::from_edge_list(n, pairs)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::ResampleBudgetExhausted { attempts: budget })
}

/// Sizes of `blocks` near-equal blocks covering `n` nodes; larger blocks
/// come first.
pub fn block_sizes(n: usize, blocks: usize) -> Vec<usize> {
    (0..blocks)
        .map(|b| n / blocks + usize::from(b < n % blocks))
        .collect()
}

/// Stochastic block model conditioned on being connected.
///
/// Each attempt draws a block count uniformly from `2..=10`, splits the
/// nodes into near-equal contiguous blocks, and draws every block-pair edge
/// probability (within-block included) from `Uniform[0, 1]`.
pub fn gen_sbm(n: usize, seed: u64) -> Result<PlantedGraph> {
    gen_sbm_with_budget(n, seed, DEFAULT_RESAMPLE_BUDGET)
}

pub fn gen_sbm_with_budget(n: usize, seed: u64, budget: usize) -> Result<PlantedGraph> {
    if n < 10 {
        return Err(Error::InvalidParameter(format!(
            "SBM needs at least 10 nodes, got {n}"
        )));
    }
    for attempt in 0..budget {
        let mut rng = seeded(derive_seed(seed, attempt as u64));
        let blocks = rng.gen_range(2..=10);
        let membership: Vec<usize> = block_sizes(n, blocks)
            .into_iter()
            .enumerate()
            .flat_map(|(b, size)| std::iter::repeat(b).take(size))
            .collect();
        let mut probs = vec![0.0; blocks * blocks];
        for a in 0..blocks {
            for b in a..blocks {
                let p: f64 = rng.gen();
                probs[a * blocks + b] = p;
                probs[b * blocks + a] = p;
            }
        }
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < probs[membership[u] * blocks + membership[v]] {
                    pairs.push((u, v));
                }
            }
        }
        let graph = Graph::from_edge_list(n, pairs)?;
        if graph.is_connected() {
            return Ok(PlantedGraph { graph, membership });
        }
    }
    Err(Error::ResampleBudgetExhausted { attempts: budget })
}

/// Labels of the caveman variant, indexed by node.
pub const CAVEMAN_LABELS: [&str; 13] = [
    "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M",
];

/// The 13-node caveman variant: three triangles `{B,E,F}`, `{C,G,H}`,
/// `{D,I,J}` hung off a hub `A`, with pendants `K–E`, `L–G`, `M–I`.
///
/// Ground-truth communities are `{A}`, `{B,E,F,K}`, `{D,I,J,M}`,
/// `{C,G,H,L}`.
pub fn gen_caveman_variant() -> PlantedGraph {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;
    const F: usize = 5;
    const G: usize = 6;
    const H: usize = 7;
    const I: usize = 8;
    const J: usize = 9;
    const K: usize = 10;
    const L: usize = 11;
    const M: usize = 12;
    let edges = [
        (B, E),
        (B, F),
        (E, F),
        (C, G),
        (C, H),
        (G, H),
        (D, I),
        (D, J),
        (I, J),
        (A, B),
        (A, C),
        (A, D),
        (K, E),
        (L, G),
        (M, I),
    ];
    let graph = Graph::from_edge_list(13, edges)
        .and_then(|g| g.with_labels(CAVEMAN_LABELS))
        .expect("caveman edge list is valid");
    let mut membership = vec![0; 13];
    for (c, members) in [[B, E, F, K], [D, I, J, M], [C, G, H, L]].iter().enumerate() {
        for &v in members {
            membership[v] = c + 1;
        }
    }
    PlantedGraph { graph, membership }
}

/// Whether `g` is exactly the caveman variant, labels included.
pub fn is_caveman_variant(g: &Graph) -> bool {
    let reference = gen_caveman_variant().graph;
    g.num_nodes() == reference.num_nodes()
        && g.edges() == reference.edges()
        && g.labels().map_or(true, |l| l == reference.labels().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erm_is_deterministic_and_connected() {
        let a = gen_erm(50, 0.1, 7).unwrap();
        let b = gen_erm(50, 0.1, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.is_connected());
    }

    #[test]
    fn erm_two_nodes_is_single_edge() {
        for seed in 0..5 {
            assert_eq!(gen_erm(2, 0.99, seed).unwrap().edges(), &[(0, 1)]);
        }
    }

    #[test]
    fn erm_tiny_probability_exhausts_budget() {
        assert_eq!(
            gen_erm(50, 1e-9, 1),
            Err(Error::ResampleBudgetExhausted { attempts: 1000 })
        );
    }

    #[test]
    fn erm_rejects_bad_probability() {
        assert!(gen_erm(10, 0.0, 1).is_err());
        assert!(gen_erm(10, 1.0, 1).is_err());
    }

    #[test]
    fn sbm_block_sizes_are_even() {
        assert_eq!(block_sizes(50, 4), vec![13, 13, 12, 12]);
        assert_eq!(block_sizes(10, 10), vec![1; 10]);
    }

    #[test]
    fn sbm_is_deterministic() {
        let a = gen_sbm(50, 3).unwrap();
        assert_eq!(a, gen_sbm(50, 3).unwrap());
        assert!(a.graph.is_connected());
        let blocks = a.communities().len();
        assert!((2..=10).contains(&blocks));
        let sizes: Vec<usize> = a.communities().iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn sbm_rejects_small_n() {
        assert!(matches!(gen_sbm(5, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn caveman_shape() {
        let cave = gen_caveman_variant();
        let g = &cave.graph;
        assert_eq!((g.num_nodes(), g.num_edges()), (13, 15));
        assert_eq!(g.diameter(), Ok(6));
        let id = |s: &str| g.node_by_label(s).unwrap();
        assert_eq!(g.degree(id("A")), 3);
        for p in ["K", "L", "M"] {
            assert_eq!(g.degree(id(p)), 1);
        }
        let d = g.distance_matrix();
        assert_eq!(d.get(id("K"), id("L")), Some(6));
        assert_eq!(d.get(id("K"), id("M")), Some(6));
        for (x, y) in [("B", "K"), ("F", "K"), ("C", "L"), ("H", "L"), ("D", "M"), ("J", "M")] {
            assert_eq!(d.get(id(x), id(y)), Some(2), "{x}-{y}");
        }
        let named: Vec<Vec<String>> = cave
            .communities()
            .iter()
            .map(|c| c.iter().map(|&v| g.label(v)).collect())
            .collect();
        assert_eq!(
            named,
            vec![
                vec!["A"],
                vec!["B", "E", "F", "K"],
                vec!["D", "I", "J", "M"],
                vec!["C", "G", "H", "L"],
            ]
        );
        assert!(is_caveman_variant(g));
    }
}
