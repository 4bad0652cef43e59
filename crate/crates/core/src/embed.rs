//! Shallow node-embedding learner: projected gradient descent on
//! `w_τ·τ + w_ε·ε` over unit-norm node vectors.
//!
//! `τ` is the mean squared gradient over edges (total variation) and `ε`
//! the mean `Γ²` over non-adjacent distinct pairs, which rewards pushing
//! unrelated nodes apart.

use serde::{Deserialize, Serialize};

use crate::{Error, Graph, Result, VectorSignal};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub w_tau: f64,
    pub w_eps: f64,
    /// Keep an embedding snapshot every this many epochs.
    pub snapshot_stride: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1000,
            learning_rate: 0.3,
            w_tau: 1.0,
            w_eps: 0.0,
            snapshot_stride: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        for (name, w) in [("w_tau", self.w_tau), ("w_eps", self.w_eps)] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {w} must be non-negative")));
            }
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter("snapshot stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Objective values per epoch plus embedding snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrajectory {
    /// `τ` at epochs `0..=epochs`; entry 0 is the initial condition.
    pub tau: Vec<f64>,
    /// `ε` at epochs `0..=epochs`.
    pub epsilon: Vec<f64>,
    /// `(epoch, embedding)` pairs, always including the first and last.
    pub snapshots: Vec<(usize, VectorSignal)>,
}

impl TrainTrajectory {
    pub fn initial(&self) -> &VectorSignal {
        &self.snapshots[0].1
    }

    pub fn final_embedding(&self) -> &VectorSignal {
        &self.snapshots.last().expect("trajectory has snapshots").1
    }
}

/// Mean over edges of `(1 - cos θ) / 2`.
pub fn tv_objective(s: &VectorSignal, g: &Graph) -> Result<f64> {
    if g.num_edges() == 0 {
        return Err(Error::EmptyInput("edge set"));
    }
    let sum: f64 = s.gradient(g.edges()).iter().map(|x| x * x).sum();
    Ok(sum / g.num_edges() as f64)
}

/// Mean over non-adjacent distinct pairs of `(1 + cos θ) / 2`; zero when
/// every pair is adjacent.
pub fn repel_regularizer(s: &VectorSignal, g: &Graph) -> f64 {
    let pairs = non_adjacent_pairs(g);
    if pairs.is_empty() {
        return 0.0;
    }
    let sum: f64 = s.gamma(&pairs).iter().map(|x| x * x).sum();
    sum / pairs.len() as f64
}

pub fn non_adjacent_pairs(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.num_nodes();
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect()
}

/// Objective `w_τ·τ + w_ε·ε` and its gradient for an arbitrary (not
/// necessarily normalized) row-major embedding `x`.
pub struct Objective<'a> {
    edges: &'a [(usize, usize)],
    pairs: Vec<(usize, usize)>,
    dim: usize,
    w_tau: f64,
    w_eps: f64,
}

impl<'a> Objective<'a> {
    pub fn new(g: &'a Graph, dim: usize, w_tau: f64, w_eps: f64) -> Self {
        Self {
            edges: g.edges(),
            pairs: if w_eps > 0.0 { non_adjacent_pairs(g) } else { Vec::new() },
            dim,
            w_tau,
            w_eps,
        }
    }

    /// Returns `(objective, τ, ε)` and writes the gradient into `grad`.
    pub fn evaluate(&self, x: &[f64], grad: &mut [f64]) -> (f64, f64, f64) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let norms: Vec<f64> = x
            .chunks(self.dim)
            .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
        let tau = if self.edges.is_empty() {
            0.0
        } else {
            let coef = -self.w_tau / (2.0 * self.edges.len() as f64);
            let sum = self.accumulate(x, &norms, self.edges, coef, grad);
            (self.edges.len() as f64 - sum) / (2.0 * self.edges.len() as f64)
        };
        let eps = if self.pairs.is_empty() {
            0.0
        } else {
            let coef = self.w_eps / (2.0 * self.pairs.len() as f64);
            let sum = self.accumulate(x, &norms, &self.pairs, coef, grad);
            (self.pairs.len() as f64 + sum) / (2.0 * self.pairs.len() as f64)
        };
        (self.w_tau * tau + self.w_eps * eps, tau, eps)
    }

    /// Adds `coef · ∂c/∂x` for every pair into `grad` and returns `Σ c`.
    fn accumulate(&self, x: &[f64], norms: &[f64], pairs: &[(usize, usize)], coef: f64, grad: &mut [f64]) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        for &(u, v) in pairs {
            let (xu, xv) = (&x[u * d..(u + 1) * d], &x[v * d..(v + 1) * d]);
            let nn = norms[u] * norms[v];
            let raw = xu.iter().zip(xv).map(|(a, b)| a * b).sum::<f64>() / nn;
            let c = raw.clamp(-1.0, 1.0);
            total += c;
            if raw != c {
                continue;
            }
            let (su, sv) = (c / (norms[u] * norms[u]), c / (norms[v] * norms[v]));
            for i in 0..d {
                grad[u * d + i] += coef * (xv[i] / nn - su * xu[i]);
                grad[v * d + i] += coef * (xu[i] / nn - sv * xv[i]);
            }
        }
        total
    }
}

/// Runs projected gradient descent from `init`: one full gradient step per
/// epoch, then every row is rescaled to unit norm.
pub fn train_embedding(g: &Graph, init: &VectorSignal, cfg: &TrainConfig) -> Result<TrainTrajectory> {
    cfg.validate()?;
    if init.num_nodes() != g.num_nodes() {
        return Err(Error::DimensionMismatch {
            what: "embedding rows",
            expected: g.num_nodes(),
            found: init.num_nodes(),
        });
    }
    let dim = init.dim();
    let objective = Objective::new(g, dim, cfg.w_tau, cfg.w_eps);
    let mut x = init.as_flat().to_vec();
    let mut grad = vec![0.0; x.len()];
    let mut tau = Vec::with_capacity(cfg.epochs + 1);
    let mut epsilon = Vec::with_capacity(cfg.epochs + 1);
    let mut snapshots = vec![(0, init.clone())];

    let (_, t0, e0) = objective.evaluate(&x, &mut grad);
    tau.push(t0);
    epsilon.push(if cfg.w_eps > 0.0 { e0 } else { repel_regularizer(init, g) });
    for epoch in 1..=cfg.epochs {
        for (xi, gi) in x.iter_mut().zip(&grad) {
            *xi -= cfg.learning_rate * gi;
        }
        let current = VectorSignal::from_flat(dim, std::mem::take(&mut x)).map_err(|_| Error::NonFinite { epoch })?;
        x = current.as_flat().to_vec();
        let (value, t, e) = objective.evaluate(&x, &mut grad);
        if !value.is_finite() {
            return Err(Error::NonFinite { epoch });
        }
        tau.push(t);
        epsilon.push(if cfg.w_eps > 0.0 { e } else { repel_regularizer(&current, g) });
        if epoch % cfg.snapshot_stride == 0 || epoch == cfg.epochs {
            snapshots.push((epoch, current));
        }
    }
    Ok(TrainTrajectory { tau, epsilon, snapshots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_caveman_variant;
    use crate::signal::{make_signal, task3_init, SignalKind};
    use approx::assert_abs_diff_eq;

    fn edge() -> Graph {
        Graph::from_edge_list(2, [(0, 1)]).unwrap()
    }

    fn sig(rows: &[[f64; 2]]) -> VectorSignal {
        VectorSignal::normalize_signal(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn tv_examples() {
        let g = edge();
        assert_eq!(tv_objective(&sig(&[[1.0, 0.0], [1.0, 0.0]]), &g).unwrap(), 0.0);
        assert_abs_diff_eq!(tv_objective(&sig(&[[1.0, 0.0], [-1.0, 0.0]]), &g).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tv_objective(&sig(&[[1.0, 0.0], [0.0, 1.0]]), &g).unwrap(), 0.5, epsilon = 1e-12);
        assert!(tv_objective(&sig(&[[1.0, 0.0], [0.0, 1.0]]), &Graph::empty(2).unwrap()).is_err());
    }

    #[test]
    fn repel_examples() {
        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(repel_regularizer(&sig(&[[1.0, 0.0]; 3]), &tri), 0.0);
        let iso = Graph::empty(2).unwrap();
        assert_abs_diff_eq!(repel_regularizer(&sig(&[[1.0, 0.0], [1.0, 0.0]]), &iso), 1.0, epsilon = 1e-12);
        assert_eq!(repel_regularizer(&sig(&[[1.0, 0.0], [-1.0, 0.0]]), &iso), 0.0);
    }

    #[test]
    fn constant_init_is_fixed_point() {
        let g = edge();
        let init = sig(&[[0.6, 0.8], [0.6, 0.8]]);
        let traj = train_embedding(&g, &init, &TrainConfig { epochs: 10, ..TrainConfig::default() }).unwrap();
        assert!(traj.tau.iter().all(|&t| t == 0.0));
        assert_eq!(traj.final_embedding(), &init);
        assert_eq!(traj.snapshots.len(), 11);
    }

    #[test]
    fn snapshot_stride() {
        let g = edge();
        let cfg = TrainConfig {
            epochs: 10,
            snapshot_stride: 4,
            ..TrainConfig::default()
        };
        let traj = train_embedding(&g, &sig(&[[1.0, 0.0], [0.0, 1.0]]), &cfg).unwrap();
        let epochs: Vec<usize> = traj.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(epochs, vec![0, 4, 8, 10]);
        assert_eq!(traj.tau.len(), 11);
    }

    #[test]
    fn task3_descent() {
        let cave = gen_caveman_variant();
        let cfg = TrainConfig {
            epochs: 3500,
            w_eps: 0.1,
            snapshot_stride: 3500,
            ..TrainConfig::default()
        };
        let traj = train_embedding(&cave.graph, &task3_init(), &cfg).unwrap();
        assert!(traj.tau.last().unwrap() <= &traj.tau[0]);
    }

    #[test]
    fn over_smoothing_from_random_init() {
        let cave = gen_caveman_variant();
        let init = make_signal(SignalKind::Random, &cave.graph, 3, 17).unwrap();
        let cfg = TrainConfig {
            snapshot_stride: 1000,
            ..TrainConfig::default()
        };
        let traj = train_embedding(&cave.graph, init.as_vector().unwrap(), &cfg).unwrap();
        assert!(*traj.tau.last().unwrap() < 0.01, "final tau {}", traj.tau.last().unwrap());
    }

    #[test]
    fn small_steps_do_not_increase_tau() {
        let cave = gen_caveman_variant();
        let init = make_signal(SignalKind::Random, &cave.graph, 3, 2).unwrap();
        let cfg = TrainConfig {
            epochs: 300,
            learning_rate: 0.01,
            snapshot_stride: 300,
            ..TrainConfig::default()
        };
        let traj = train_embedding(&cave.graph, init.as_vector().unwrap(), &cfg).unwrap();
        for w in traj.tau.windows(2) {
            assert!(w[1] <= w[0] + 1e-6);
        }
    }
}
