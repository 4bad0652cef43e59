//! Canonical undirected, unweighted, simple graphs.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An undirected simple graph on nodes `0..num_nodes`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted lexicographically and
/// without duplicates. Every edge-indexed vector in the crate follows this
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a canonical graph from an arbitrary pair list. Duplicate and
    /// reversed pairs collapse to one edge.
    pub fn from_edge_list<I>(num_nodes: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if num_nodes == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node".into()));
        }
        let mut edges = Vec::new();
        for (u, v) in pairs {
            for index in [u, v] {
                if index >= num_nodes {
                    return Err(Error::NodeOutOfRange { index, num_nodes });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        edges.dedup();

        let mut neighbors = vec![Vec::new(); num_nodes];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            num_nodes,
            edges,
            neighbors,
            labels: None,
        })
    }

    /// Graph with no edges.
    pub fn empty(num_nodes: usize) -> Result<Self> {
        Self::from_edge_list(num_nodes, std::iter::empty())
    }

    /// Attaches presentation labels, one per node.
    pub fn with_labels<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.num_nodes {
            return Err(Error::DimensionMismatch {
                what: "node labels",
                expected: self.num_nodes,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_nodes && self.neighbors[u].binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `v`, or its index rendered as text.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(labels) => labels[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn node_by_label(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.num_nodes, self.num_nodes);
        for &(u, v) in &self.edges {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Unweighted shortest-path lengths from `source`; `None` marks
    /// unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        assert!(source < self.num_nodes, "BFS source {source} out of range");
        let mut dist = vec![None; self.num_nodes];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have a distance");
            for &w in &self.neighbors[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs distances by one BFS per node.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.num_nodes;
        let mut entries = Vec::with_capacity(n * n);
        for s in 0..n {
            entries.extend(self.bfs_distances(s));
        }
        DistanceMatrix { n, entries }
    }

    /// Longest shortest-path length. Fails on disconnected graphs.
    pub fn diameter(&self) -> Result<usize> {
        let components = self.connected_components();
        if components.count > 1 {
            return Err(Error::Disconnected {
                components: components.count,
            });
        }
        Ok((0..self.num_nodes)
            .map(|s| self.bfs_distances(s).into_iter().flatten().max().unwrap_or(0))
            .max()
            .unwrap_or(0))
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().count == 1
    }

    pub fn connected_components(&self) -> Components {
        let n = self.num_nodes;
        let mut assignment = vec![usize::MAX; n];
        let mut members = Vec::new();
        for start in 0..n {
            if assignment[start] != usize::MAX {
                continue;
            }
            let id = members.len();
            let mut group = vec![start];
            assignment[start] = id;
            let mut head = 0;
            while head < group.len() {
                let u = group[head];
                head += 1;
                for &w in &self.neighbors[u] {
                    if assignment[w] == usize::MAX {
                        assignment[w] = id;
                        group.push(w);
                    }
                }
            }
            group.sort_unstable();
            members.push(group);
        }
        let singletons = members.iter().filter(|m| m.len() == 1).count();
        Components {
            count: members.len(),
            singletons,
            assignment,
            members,
        }
    }

    pub fn to_document(&self, communities: Option<Vec<Vec<usize>>>) -> GraphDocument {
        GraphDocument {
            num_nodes: self.num_nodes,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            labels: self.labels.clone(),
            communities,
        }
    }
}

/// Partition of the nodes into connected components, in order of their
/// smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    pub singletons: usize,
    pub assignment: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

/// Symmetric all-pairs distance table. `None` marks unreachable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<Option<usize>>,
}

impl DistanceMatrix {
    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.entries[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[Option<usize>] {
        &self.entries[u * self.n..(u + 1) * self.n]
    }
}

/// On-disk graph format:
/// `{"num_nodes": N, "edges": [[u,v],...], "labels": [...], "communities": [[...],...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub num_nodes: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub communities: Option<Vec<Vec<usize>>>,
}

impl GraphDocument {
    pub fn to_graph(&self) -> Result<Graph> {
        let g = Graph::from_edge_list(self.num_nodes, self.edges.iter().map(|e| (e[0], e[1])))?;
        match &self.labels {
            Some(labels) => g.with_labels(labels.iter().cloned()),
            None => Ok(g),
        }
    }

    /// Community list converted to one label per node.
    pub fn community_labels(&self) -> Result<Option<Vec<usize>>> {
        let Some(communities) = &self.communities else {
            return Ok(None);
        };
        let mut labels = vec![usize::MAX; self.num_nodes];
        for (c, members) in communities.iter().enumerate() {
            for &v in members {
                if v >= self.num_nodes {
                    return Err(Error::NodeOutOfRange {
                        index: v,
                        num_nodes: self.num_nodes,
                    });
                }
                labels[v] = c;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidParameter(format!("node {v} belongs to no community")));
        }
        Ok(Some(labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edge_list(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn triangle_has_three_edges() {
        let g = Graph::from_edge_list(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn duplicates_collapse() {
        let g = Graph::from_edge_list(4, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn rejects_self_loop_and_out_of_range() {
        assert_eq!(Graph::from_edge_list(2, [(0, 0)]), Err(Error::SelfLoop(0)));
        assert_eq!(
            Graph::from_edge_list(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { index: 2, num_nodes: 2 })
        );
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(path(4).bfs_distances(0), vec![Some(0), Some(1), Some(2), Some(3)]);
        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.bfs_distances(0), vec![Some(0), Some(1), Some(1)]);
        let two = Graph::from_edge_list(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.bfs_distances(0), vec![Some(0), Some(1), None, None]);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(path(4).diameter(), Ok(3));
        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.diameter(), Ok(1));
        let two = Graph::from_edge_list(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.diameter(), Err(Error::Disconnected { components: 2 }));
    }

    #[test]
    fn component_counts() {
        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = tri.connected_components();
        assert_eq!((c.count, c.singletons), (1, 0));

        let c = Graph::empty(3).unwrap().connected_components();
        assert_eq!((c.count, c.singletons), (3, 3));

        let c = Graph::from_edge_list(3, [(0, 1)]).unwrap().connected_components();
        assert_eq!((c.count, c.singletons), (2, 1));
        assert_eq!(c.members, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn document_round_trip() {
        let g = path(5).with_labels(["a", "b", "c", "d", "e"]).unwrap();
        let doc = g.to_document(Some(vec![vec![0, 1], vec![2, 3, 4]]));
        let json = serde_json::to_string(&doc).unwrap();
        let back: GraphDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
        assert_eq!(back.community_labels().unwrap(), Some(vec![0, 0, 1, 1, 1]));
    }

    #[test]
    fn document_rejects_unknown_fields() {
        let json = r#"{"num_nodes": 2, "edges": [[0, 1]], "weights": [1.0]}"#;
        assert!(serde_json::from_str::<GraphDocument>(json).is_err());
    }
}
