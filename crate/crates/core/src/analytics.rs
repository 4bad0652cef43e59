//! Evaluation and diagnostics: spectral clustering, ARI/AMI, cosine
//! comparison, 1-D Wasserstein distance, correlation and finite
//! differences.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::rng::{derive_seed, seeded};
use crate::spectral::eig_sym;
use crate::{Error, Result, VectorSignal};

const KMEANS_RESTARTS: usize = 10;
const KMEANS_MAX_ITER: usize = 300;

/// Cluster assignment of the nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterLabels {
    /// Labels in `0..k`, numbered by first appearance.
    pub labels: Vec<usize>,
    pub k: usize,
    /// All vectors were identical, so a single cluster was returned.
    pub degenerate: bool,
    /// k-means inertia of the selected restart in the spectral embedding.
    pub inertia: f64,
}

/// Spectral clustering of node vectors.
///
/// Affinity `W_ij = (1 + cos θ_ij) / 2` off the diagonal, symmetric
/// normalized Laplacian, rows of the bottom-`k` eigenvectors scaled to unit
/// norm, then k-means++ with ten seeded restarts keeping the lowest
/// inertia.
pub fn spectral_cluster(s: &VectorSignal, k: usize, seed: u64) -> Result<ClusterLabels> {
    let n = s.num_nodes();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("cluster count {k} must lie in 1..={n}")));
    }
    let identical = (1..n).all(|v| s.row(v) == s.row(0));
    if identical {
        return Ok(ClusterLabels {
            labels: vec![0; n],
            k: 1,
            degenerate: k > 1,
            inertia: 0.0,
        });
    }
    if k == n {
        return Ok(ClusterLabels {
            labels: (0..n).collect(),
            k,
            degenerate: false,
            inertia: 0.0,
        });
    }
    let w = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { (1.0 + s.cosine(i, j)) / 2.0 });
    let inv_sqrt: Vec<f64> = w
        .row_iter()
        .map(|r| {
            let d = r.sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let l_sym = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]
    });
    let eig = eig_sym(&l_sym)?;
    let mut points: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..k).map(|c| eig.vectors[(i, c)]).collect())
        .collect();
    for p in &mut points {
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            p.iter_mut().for_each(|x| *x /= norm);
        }
    }
    let (labels, inertia) = kmeans(&points, k, seed);
    let labels = relabel(&labels);
    let k_found = labels.iter().max().map_or(0, |m| m + 1);
    Ok(ClusterLabels {
        labels,
        k: k_found,
        degenerate: false,
        inertia,
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Best of several k-means++ runs: `(labels, inertia)`.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> (Vec<usize>, f64) {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let run = kmeans_once(points, k, derive_seed(seed, restart as u64));
        if best.as_ref().map_or(true, |b| run.1 < b.1) {
            best = Some(run);
        }
    }
    best.expect("at least one restart")
}

fn kmeans_once(points: &[Vec<f64>], k: usize, seed: u64) -> (Vec<usize>, f64) {
    let mut rng = seeded(seed);
    let n = points.len();
    let mut centers = vec![points[rng.gen_range(0..n)].clone()];
    while centers.len() < k {
        let d2: Vec<f64> = points
            .iter()
            .map(|p| centers.iter().map(|c| sq_dist(p, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut r = rng.gen::<f64>() * total;
            d2.iter()
                .position(|&d| {
                    r -= d;
                    r < 0.0
                })
                .unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap_or(0))
        } else {
            rng.gen_range(0..n)
        };
        centers.push(points[next].clone());
    }
    let mut labels = vec![0; n];
    for iter in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let nearest = (0..k)
                .min_by(|&a, &b| sq_dist(p, &centers[a]).total_cmp(&sq_dist(p, &centers[b])))
                .expect("k >= 1");
            if nearest != labels[i] {
                labels[i] = nearest;
                changed = true;
            }
        }
        if !changed && iter > 0 {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
            if members.is_empty() {
                continue;
            }
            for (d, x) in center.iter_mut().enumerate() {
                *x = members.iter().map(|m| m[d]).sum::<f64>() / members.len() as f64;
            }
        }
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum();
    (labels, inertia)
}

/// Renumbers labels by order of first appearance.
pub fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

struct Contingency {
    n: usize,
    table: BTreeMap<(usize, usize), usize>,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn contingency(a: &[usize], b: &[usize]) -> Result<Contingency> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "labeling length",
            expected: a.len(),
            found: b.len(),
        });
    }
    let (a, b) = (relabel(a), relabel(b));
    let mut rows = vec![0; a.iter().max().map_or(0, |m| m + 1)];
    let mut cols = vec![0; b.iter().max().map_or(0, |m| m + 1)];
    let mut table = BTreeMap::new();
    for (&x, &y) in a.iter().zip(&b) {
        rows[x] += 1;
        cols[y] += 1;
        *table.entry((x, y)).or_insert(0) += 1;
    }
    Ok(Contingency {
        n: a.len(),
        table,
        rows,
        cols,
    })
}

fn same_partition(c: &Contingency) -> bool {
    c.table.len() == c.rows.len() && c.rows.len() == c.cols.len()
}

fn comb2(x: usize) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index (contingency-table form). Equal partitions score 1
/// even when the chance-adjusted denominator vanishes.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    let c = contingency(a, b)?;
    if same_partition(&c) {
        return Ok(1.0);
    }
    let index: f64 = c.table.values().map(|&x| comb2(x)).sum();
    let sum_a: f64 = c.rows.iter().map(|&x| comb2(x)).sum();
    let sum_b: f64 = c.cols.iter().map(|&x| comb2(x)).sum();
    let expected = sum_a * sum_b / comb2(c.n);
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return Ok(0.0);
    }
    Ok((index - expected) / (max - expected))
}

fn entropy(counts: &[usize], n: usize) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.ln()
        })
        .sum()
}

/// Adjusted mutual information with max-entropy normalization.
///
/// Equal partitions score 1; otherwise a labeling with zero entropy scores
/// 0.
pub fn ami(a: &[usize], b: &[usize]) -> Result<f64> {
    let c = contingency(a, b)?;
    if same_partition(&c) {
        return Ok(1.0);
    }
    let n = c.n;
    let (h_a, h_b) = (entropy(&c.rows, n), entropy(&c.cols, n));
    if h_a == 0.0 || h_b == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let mi: f64 = c
        .table
        .iter()
        .map(|(&(i, j), &nij)| {
            let nij = nij as f64;
            nij / nf * (nf * nij / (c.rows[i] as f64 * c.cols[j] as f64)).ln()
        })
        .sum();
    let emi = expected_mutual_information(&c.rows, &c.cols, n);
    let normalizer = h_a.max(h_b);
    let denom = normalizer - emi;
    let denom = if denom < 0.0 {
        denom.min(-f64::EPSILON)
    } else {
        denom.max(f64::EPSILON)
    };
    Ok((mi - emi) / denom)
}

/// Expected mutual information under the hypergeometric model of random
/// labelings with fixed marginals.
fn expected_mutual_information(rows: &[usize], cols: &[usize], n: usize) -> f64 {
    let mut ln_fact = vec![0.0; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let nf = n as f64;
    let mut emi = 0.0;
    for &ai in rows {
        for &bj in cols {
            let lo = (ai + bj).saturating_sub(n).max(1);
            let hi = ai.min(bj);
            for nij in lo..=hi {
                let x = nij as f64;
                let term = x / nf * (nf * x / (ai as f64 * bj as f64)).ln();
                let ln_p = ln_fact[ai] + ln_fact[bj] + ln_fact[n - ai] + ln_fact[n - bj]
                    - ln_fact[n]
                    - ln_fact[nij]
                    - ln_fact[ai - nij]
                    - ln_fact[bj - nij]
                    - ln_fact[n + nij - ai - bj];
                emi += term * ln_p.exp();
            }
        }
    }
    emi
}

/// Dot product of the l2-normalized inputs. One zero input gives 0; two
/// zero inputs are an undefined comparison.
pub fn cosine_normalized(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "magnitude vector length",
            expected: a.len(),
            found: b.len(),
        });
    }
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    match (na > 0.0, nb > 0.0) {
        (false, false) => Err(Error::UndefinedComparison),
        (true, true) => Ok(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb)),
        _ => Ok(0.0),
    }
}

/// 1-Wasserstein distance between two empirical distributions, as the
/// integral of `|F(t) - G(t)|` over the merged support.
pub fn wasserstein_1d(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyInput("sample list"));
    }
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let mut all: Vec<f64> = xs.iter().chain(&ys).copied().collect();
    all.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0, 0);
    let mut dist = 0.0;
    for w in all.windows(2) {
        while i < xs.len() && xs[i] <= w[0] {
            i += 1;
        }
        while j < ys.len() && ys[j] <= w[0] {
            j += 1;
        }
        let f = i as f64 / xs.len() as f64;
        let g = j as f64 / ys.len() as f64;
        dist += (f - g).abs() * (w[1] - w[0]);
    }
    Ok(dist)
}

/// Pearson product-moment correlation.
pub fn ppmcc(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            what: "sample length",
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::EmptyInput("correlation needs at least two samples"));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Per-epoch derivative: central differences inside, one-sided at the ends.
pub fn finite_diff_series(vals: &[f64]) -> Result<Vec<f64>> {
    let n = vals.len();
    if n < 2 {
        return Err(Error::EmptyInput("series needs at least two values"));
    }
    Ok((0..n)
        .map(|i| match i {
            0 => vals[1] - vals[0],
            i if i == n - 1 => vals[n - 1] - vals[n - 2],
            i => (vals[i + 1] - vals[i - 1]) / 2.0,
        })
        .collect())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Percentile `q ∈ [0, 1]` with linear interpolation between order
/// statistics.
pub fn percentile(xs: &[f64], q: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("percentile sample"));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

pub fn median(xs: &[f64]) -> Result<f64> {
    percentile(xs, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn antipodal_bundles_split() {
        let mut rows = vec![vec![1.0, 0.0, 0.0]; 5];
        rows.extend(vec![vec![-1.0, 0.0, 0.0]; 5]);
        let s = VectorSignal::normalize_signal(&rows).unwrap();
        let c = spectral_cluster(&s, 2, 1).unwrap();
        let truth = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        assert_eq!(ari(&c.labels, &truth).unwrap(), 1.0);
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let s = VectorSignal::normalize_signal(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(spectral_cluster(&s, 3, 0).unwrap().labels, vec![0, 1, 2]);
        assert!(spectral_cluster(&s, 4, 0).is_err());
    }

    #[test]
    fn identical_vectors_are_degenerate() {
        let s = VectorSignal::constant(4, &[0.0, 1.0]).unwrap();
        let c = spectral_cluster(&s, 2, 0).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.labels, vec![0; 4]);
    }

    #[test]
    fn clustering_is_deterministic() {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![(i as f64).cos(), (i as f64 * 0.7).sin(), 0.3]).collect();
        let s = VectorSignal::normalize_signal(&rows).unwrap();
        assert_eq!(spectral_cluster(&s, 3, 5).unwrap(), spectral_cluster(&s, 3, 5).unwrap());
    }

    #[test]
    fn ari_examples() {
        assert_eq!(ari(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_abs_diff_eq!(ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), -0.5, epsilon = 1e-12);
        assert!(ari(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn ami_examples() {
        assert_eq!(ami(&[0, 0, 1, 1, 2], &[0, 0, 1, 1, 2]).unwrap(), 1.0);
        assert_eq!(ami(&[0, 0, 1, 1], &[5, 5, 3, 3]).unwrap(), 1.0);
        assert_eq!(ami(&[0, 0, 0, 0], &[0, 1, 0, 1]).unwrap(), 0.0);
        // Reference value from the standard max-normalized AMI.
        assert_abs_diff_eq!(ami(&[0, 0, 1, 1], &[0, 0, 1, 2]).unwrap(), 0.4, epsilon = 1e-9);
    }

    #[test]
    fn cosine_examples() {
        assert_abs_diff_eq!(cosine_normalized(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(cosine_normalized(&[1.0, 0.0], &[0.0, 3.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(cosine_normalized(&[1.0, 2.0], &[3.0, 6.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(cosine_normalized(&[0.0; 2], &[0.0; 2]), Err(Error::UndefinedComparison));
    }

    #[test]
    fn wasserstein_examples() {
        assert_eq!(wasserstein_1d(&[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(wasserstein_1d(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(wasserstein_1d(&[0.0], &[0.0, 1.0]).unwrap(), 0.5);
        assert!(wasserstein_1d(&[], &[1.0]).is_err());
    }

    #[test]
    fn ppmcc_examples() {
        assert_abs_diff_eq!(ppmcc(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ppmcc(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]).unwrap(), -1.0, epsilon = 1e-12);
        assert_eq!(ppmcc(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]), Err(Error::ZeroVariance));
    }

    #[test]
    fn finite_diff_examples() {
        assert_eq!(finite_diff_series(&[0.0, 1.0, 4.0, 9.0]).unwrap(), vec![1.0, 2.0, 4.0, 5.0]);
        assert_eq!(finite_diff_series(&[3.0; 4]).unwrap(), vec![0.0; 4]);
        assert_eq!(finite_diff_series(&[0.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        assert!(finite_diff_series(&[1.0]).is_err());
    }

    #[test]
    fn percentile_interpolates() {
        let xs = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(percentile(&xs, 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&xs, 1.0).unwrap(), 4.0);
        assert_eq!(median(&xs).unwrap(), 2.5);
        assert_abs_diff_eq!(percentile(&xs, 0.1).unwrap(), 1.3, epsilon = 1e-12);
    }
}
