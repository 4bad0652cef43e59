//! Dense symmetric eigendecomposition, the graph Fourier baseline,
//! quadratic smoothness and minimum-norm least squares.

use std::ops::Range;

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

use crate::{Error, Graph, GraphSignal, Result};

/// Tolerance for the symmetry check on eigensolver input.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as zero.
pub const ZERO_EIGEN_TOL: f64 = 1e-8;

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
///
/// Each eigenvector is sign-fixed so that its largest-magnitude entry
/// (lowest index among near-ties) is non-negative.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index ranges of eigenvalues equal within `tol` (relative to
    /// `max(1, |λ|)`).
    pub fn multiplicity_groups(&self, tol: f64) -> Vec<Range<usize>> {
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=self.values.len() {
            let split = i == self.values.len() || {
                let (a, b) = (self.values[i - 1], self.values[i]);
                (b - a).abs() > tol * a.abs().max(b.abs()).max(1.0)
            };
            if split {
                groups.push(start..i);
                start = i;
            }
        }
        groups
    }

    /// `Uᵀ s`.
    pub fn project(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.vectors.nrows() {
            return Err(Error::DimensionMismatch {
                what: "signal length",
                expected: self.vectors.nrows(),
                found: s.len(),
            });
        }
        let s = DVector::from_column_slice(s);
        Ok((self.vectors.tr_mul(&s)).iter().copied().collect())
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn eig_sym(m: &DMatrix<f64>) -> Result<EigenSystem> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "matrix columns",
            expected: n,
            found: m.ncols(),
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    if n == 0 {
        return Ok(EigenSystem {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = to_faer(m).self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let (u, lambda) = (eig.U(), eig.S().column_vector());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lambda[a].total_cmp(&lambda[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| lambda[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = DVector::from_fn(n, |r, _| u[(r, src)]);
        if col[leading_index(col.as_slice())] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(EigenSystem { values, vectors })
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Position of the largest-magnitude entry, preferring the lowest index
/// among entries within rounding of the maximum.
fn leading_index(v: &[f64]) -> usize {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tol = 1e-12 * max.max(1.0);
    v.iter().position(|x| x.abs() >= max - tol).unwrap_or(0)
}

/// Magnitudes of one transform on one stratum.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnitudeVector {
    pub raw: Vec<f64>,
    /// `raw` scaled to unit l2 norm, or all zeros when `raw` is zero.
    pub normalized: Vec<f64>,
    pub zero_norm: bool,
    pub empty_stratum: bool,
}

impl MagnitudeVector {
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let (normalized, zero_norm) = l2_normalized(&raw);
        Self {
            raw,
            normalized,
            zero_norm,
            empty_stratum: false,
        }
    }

    /// All zeros, flagged as coming from an edgeless stratum.
    pub fn empty(n: usize) -> Self {
        Self {
            empty_stratum: true,
            ..Self::from_raw(vec![0.0; n])
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.raw)
    }
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Unit-norm copy of `v` plus whether `v` was zero.
pub fn l2_normalized(v: &[f64]) -> (Vec<f64>, bool) {
    let norm = l2_norm(v);
    if norm > 0.0 {
        (v.iter().map(|x| x / norm).collect(), false)
    } else {
        (vec![0.0; v.len()], true)
    }
}

/// `|⟨u_i, s⟩|` for every eigenvector.
pub fn gft_magnitudes(sys: &EigenSystem, s: &[f64]) -> Result<MagnitudeVector> {
    let coeffs = sys.project(s)?;
    Ok(MagnitudeVector::from_raw(coeffs.into_iter().map(f64::abs).collect()))
}

/// Sum over edges of the squared per-edge distance.
pub fn quadratic_smoothness(g: &Graph, s: &GraphSignal) -> Result<f64> {
    if s.num_nodes() != g.num_nodes() {
        return Err(Error::DimensionMismatch {
            what: "signal nodes",
            expected: g.num_nodes(),
            found: s.num_nodes(),
        });
    }
    Ok(s.edge_gradient(g.edges()).iter().map(|d| d * d).sum())
}

/// Moore–Penrose pseudo-inverse with the rank cut
/// `max(rows, cols) · ε · σ_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoInverse {
    pinv: DMatrix<f64>,
    a: DMatrix<f64>,
    rank: usize,
}

impl PseudoInverse {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Ok(Self {
                pinv: DMatrix::zeros(n, m),
                a: a.clone(),
                rank: 0,
            });
        }
        let svd = to_faer(a).thin_svd().map_err(|_| Error::NoConvergence)?;
        let (u, v, sigma) = (svd.U(), svd.V(), svd.S().column_vector());
        let sigma_max = (0..sigma.nrows()).fold(0.0_f64, |acc, i| acc.max(sigma[i]));
        let tol = m.max(n) as f64 * f64::EPSILON * sigma_max;
        let mut pinv = DMatrix::zeros(n, m);
        let mut rank = 0;
        for i in 0..sigma.nrows() {
            let s = sigma[i];
            if s > tol && s > 0.0 {
                rank += 1;
                let vi = DVector::from_fn(n, |r, _| v[(r, i)] / s);
                let ui = DVector::from_fn(m, |r, _| u[(r, i)]);
                pinv += vi * ui.transpose();
            }
        }
        Ok(Self {
            pinv,
            a: a.clone(),
            rank,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    pub fn solve(&self, b: &[f64]) -> Result<LlsSolution> {
        let (m, n) = self.a.shape();
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                what: "right-hand side",
                expected: m,
                found: b.len(),
            });
        }
        let rhs = DVector::from_column_slice(b);
        let x = &self.pinv * &rhs;
        let residual = if m == 0 || n == 0 {
            rhs.norm()
        } else {
            (&self.a * &x - &rhs).norm()
        };
        Ok(LlsSolution {
            x: x.iter().copied().collect(),
            residual,
            rank: self.rank,
            empty: m == 0 || n == 0,
        })
    }
}

/// Minimum-norm least-squares solution of `a x ≈ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LlsSolution {
    pub x: Vec<f64>,
    pub residual: f64,
    pub rank: usize,
    /// The system had no rows or no columns; `x` is zero.
    pub empty: bool,
}

pub fn lls_min_norm(a: &DMatrix<f64>, b: &[f64]) -> Result<LlsSolution> {
    PseudoInverse::new(a)?.solve(b)
}

/// Eigen export: `{"K": k, "eigenvalues": [...], "eigenvectors": [[...], ...]}`
/// with one inner list per eigenvector.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EigenDocument {
    #[serde(rename = "K")]
    pub k: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl EigenDocument {
    pub fn new(k: usize, sys: &EigenSystem) -> Self {
        Self {
            k,
            eigenvalues: sys.values.clone(),
            eigenvectors: sys.vectors.column_iter().map(|c| c.iter().copied().collect()).collect(),
        }
    }
}
