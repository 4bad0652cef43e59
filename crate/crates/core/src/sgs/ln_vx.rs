//! LN-VX: move the signal's line-graph spectrum back to the vertex domain
//! through a learned map between the two eigenbases.
//!
//! The map models `Uᵀ ≈ σ(σ(H_ln · L(U)) · H_vxᵀ)`, with `U` the stratum
//! Laplacian eigenbasis and `L(U)` that of its line graph. Because `L(U)` is
//! orthogonal, training runs on `G = H_ln · L(U)` directly, an exact
//! reparametrization that avoids a `|E|³` product per epoch;
//! `H_ln = G · L(U)ᵀ` is recovered on demand.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, seeded};
use crate::spectral::{eig_sym, EigenSystem};
use crate::stratify::line_graph_from_edges;
use crate::{Error, Result, Stratum};

const SELU_LAMBDA: f64 = 1.050_700_987_355_480_5;
const SELU_ALPHA: f64 = 1.673_263_242_354_377_3;
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Selu,
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Selu if x > 0.0 => SELU_LAMBDA * x,
            Activation::Selu => SELU_LAMBDA * SELU_ALPHA * x.exp_m1(),
            Activation::Identity => x,
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Selu if x > 0.0 => SELU_LAMBDA,
            Activation::Selu => SELU_LAMBDA * SELU_ALPHA * x.exp(),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LnVxConfig {
    /// Independently learned transforms whose magnitudes are averaged.
    pub trials: usize,
    pub epochs: usize,
    /// Training stops once the MSE reaches this value.
    pub target_mse: f64,
    /// Adam step size.
    pub learning_rate: f64,
    pub activation: Activation,
    /// Reseeded restarts allowed after a non-finite loss.
    pub retry_budget: usize,
}

impl Default for LnVxConfig {
    fn default() -> Self {
        Self {
            trials: 50,
            epochs: 1000,
            target_mse: 1e-6,
            learning_rate: 0.01,
            activation: Activation::Selu,
            retry_budget: 5,
        }
    }
}

/// One learned basis map.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnedTransform {
    /// `H_ln · L(U)`, `N × |E|`.
    pub g: DMatrix<f64>,
    /// `N × |E|`.
    pub h_vx: DMatrix<f64>,
    pub mse: f64,
    pub epochs: usize,
    pub seed: u64,
    pub activation: Activation,
}

impl LearnedTransform {
    /// `H_ln = G · L(U)ᵀ`.
    pub fn h_ln(&self, line_vectors: &DMatrix<f64>) -> DMatrix<f64> {
        &self.g * line_vectors.transpose()
    }

    /// Rows are the reweighted vertex-domain basis vectors `u^w_i`.
    fn weighted_basis(&self, weights: &[f64]) -> DMatrix<f64> {
        let act = self.activation;
        let mut pre = self.g.clone();
        for (mut col, &w) in pre.column_iter_mut().zip(weights) {
            col.apply(|x| *x = act.apply(*x * w));
        }
        let mut out = pre * self.h_vx.transpose();
        out.apply(|x| *x = act.apply(*x));
        out
    }
}

/// Learns one transform, restarting with a derived seed when the loss
/// turns non-finite.
pub fn learn_eigenbasis_transform(
    u: &EigenSystem,
    lu: &EigenSystem,
    cfg: &LnVxConfig,
    seed: u64,
) -> Result<LearnedTransform> {
    if lu.is_empty() {
        return Err(Error::InvalidParameter("line graph has no vertices".into()));
    }
    let target = u.vectors.transpose();
    let attempts = cfg.retry_budget + 1;
    for attempt in 0..attempts {
        let trial_seed = if attempt == 0 { seed } else { derive_seed(seed, attempt as u64) };
        match train(&target, &lu.vectors, cfg, trial_seed) {
            Ok(t) => return Ok(t),
            Err(Error::NonFinite { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::LearningFailed { attempts })
}

fn glorot(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> DMatrix<f64> {
    let a = (6.0 / (rows + cols) as f64).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-a..=a))
}

struct Adam {
    m: DMatrix<f64>,
    v: DMatrix<f64>,
}

impl Adam {
    fn new(shape: (usize, usize)) -> Self {
        Self {
            m: DMatrix::zeros(shape.0, shape.1),
            v: DMatrix::zeros(shape.0, shape.1),
        }
    }

    fn step(&mut self, param: &mut DMatrix<f64>, grad: &DMatrix<f64>, lr: f64, t: i32) {
        let c1 = 1.0 - ADAM_BETA1.powi(t);
        let c2 = 1.0 - ADAM_BETA2.powi(t);
        for ((p, &g), (m, v)) in param
            .iter_mut()
            .zip(grad.iter())
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
        }
    }
}

fn train(target: &DMatrix<f64>, line_vectors: &DMatrix<f64>, cfg: &LnVxConfig, seed: u64) -> Result<LearnedTransform> {
    let n = target.nrows();
    let e = line_vectors.nrows();
    let act = cfg.activation;
    let mut rng = seeded(seed);
    let h_ln = glorot(n, e, &mut rng);
    let mut h_vx = glorot(n, e, &mut rng);
    let mut g = h_ln * line_vectors;
    let mut adam_g = Adam::new(g.shape());
    let mut adam_h = Adam::new(h_vx.shape());
    let scale = 2.0 / (n * n) as f64;

    let forward = |g: &DMatrix<f64>, h_vx: &DMatrix<f64>| {
        let a1 = g.map(|x| act.apply(x));
        let z = &a1 * h_vx.transpose();
        let residual = z.zip_map(target, |z, y| act.apply(z) - y);
        let mse = residual.norm_squared() / (n * n) as f64;
        (a1, z, residual, mse)
    };

    let mut epochs = 0;
    loop {
        let (a1, z, residual, mse) = forward(&g, &h_vx);
        if !mse.is_finite() {
            return Err(Error::NonFinite { epoch: epochs });
        }
        if mse <= cfg.target_mse || epochs == cfg.epochs {
            return Ok(LearnedTransform {
                g,
                h_vx,
                mse,
                epochs,
                seed,
                activation: act,
            });
        }
        let dz = residual.zip_map(&z, |r, z| scale * r * act.derivative(z));
        let d_hvx = dz.transpose() * &a1;
        let mut d_g = &dz * &h_vx;
        d_g.zip_apply(&g, |d, x| *d *= act.derivative(x));
        epochs += 1;
        adam_g.step(&mut g, &d_g, cfg.learning_rate, epochs as i32);
        adam_h.step(&mut h_vx, &d_hvx, cfg.learning_rate, epochs as i32);
    }
}

/// Line-graph eigenbasis and learned transforms of one stratum.
#[derive(Clone, Debug)]
pub struct LnVxStratum {
    /// Columns are the line-graph Laplacian eigenvectors `L(u_i)`.
    pub line_vectors: DMatrix<f64>,
    pub transforms: Vec<LearnedTransform>,
}

impl LnVxStratum {
    pub fn learn(st: &Stratum, eigen: &EigenSystem, cfg: &LnVxConfig, seed: u64) -> Result<Self> {
        if cfg.trials == 0 {
            return Err(Error::InvalidParameter("LN-VX needs at least one trial".into()));
        }
        let line_adj = line_graph_from_edges(st.k(), st.edges())?;
        let line_lap = DMatrix::from_diagonal(&line_adj.row_sum_tr()) - &line_adj;
        let lu = eig_sym(&line_lap)?;
        let transforms = (0..cfg.trials)
            .map(|t| learn_eigenbasis_transform(eigen, &lu, cfg, derive_seed(seed, t as u64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            line_vectors: lu.vectors,
            transforms,
        })
    }

    /// Mean over transforms of `|⟨u^w_i, u_i⟩|`, where the weights are the
    /// line-domain magnitudes `|L(U)ᵀ ∇s|`.
    pub fn magnitudes(&self, eigen: &EigenSystem, grad: &[f64]) -> Result<Vec<f64>> {
        if grad.len() != self.line_vectors.nrows() {
            return Err(Error::DimensionMismatch {
                what: "edge values",
                expected: self.line_vectors.nrows(),
                found: grad.len(),
            });
        }
        let eta: Vec<f64> = self
            .line_vectors
            .tr_mul(&DVector::from_column_slice(grad))
            .iter()
            .map(|x| x.abs())
            .collect();
        let n = eigen.len();
        let mut out = vec![0.0; n];
        for t in &self.transforms {
            let w = t.weighted_basis(&eta);
            for (i, o) in out.iter_mut().enumerate() {
                *o += w.row(i).transpose().dot(&eigen.vectors.column(i)).abs();
            }
        }
        let trials = self.transforms.len() as f64;
        out.iter_mut().for_each(|x| *x /= trials);
        Ok(out)
    }
}
