//! ENS: weighted combination of the four element transforms.

use serde::{Deserialize, Serialize};

use crate::spectral::{l2_normalized, MagnitudeVector};
use crate::{Error, Result};

/// Non-negative weights, not all zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsWeights {
    pub apprx_ls: f64,
    pub adj_diff: f64,
    pub in_agg: f64,
    pub ln_vx: f64,
}

impl EnsWeights {
    pub const UNIFORM: Self = Self::new(1.0, 1.0, 1.0, 1.0);

    pub const fn new(apprx_ls: f64, adj_diff: f64, in_agg: f64, ln_vx: f64) -> Self {
        Self {
            apprx_ls,
            adj_diff,
            in_agg,
            ln_vx,
        }
    }

    /// Weights in element order: APPRX-LS, ADJ-DIFF, IN-AGG, LN-VX.
    pub fn as_array(&self) -> [f64; 4] {
        [self.apprx_ls, self.adj_diff, self.in_agg, self.ln_vx]
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.as_array();
        if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidParameter(format!("ensemble weight {bad} is not a non-negative number")));
        }
        if w.iter().all(|&x| x == 0.0) {
            return Err(Error::AllZeroWeights);
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let [a, b, i, l] = self.as_array();
        Self::new(c * a, c * b, c * i, c * l)
    }
}

impl std::str::FromStr for EnsWeights {
    type Err = Error;

    /// Parses `"apprx,adj,in,ln"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad ensemble weight {p:?}")))
            })
            .collect::<Result<_>>()?;
        let [a, b, i, l] = parts[..] else {
            return Err(Error::InvalidParameter(format!(
                "expected four comma-separated weights, got {s:?}"
            )));
        };
        let w = Self::new(a, b, i, l);
        w.validate()?;
        Ok(w)
    }
}

/// Weights per stratum: entry `K - 1` applies to stratum `K`, and the last
/// entry covers every higher stratum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnsSchedule {
    per_k: Vec<EnsWeights>,
}

impl Default for EnsSchedule {
    fn default() -> Self {
        Self::uniform(EnsWeights::UNIFORM)
    }
}

impl EnsSchedule {
    pub fn uniform(w: EnsWeights) -> Self {
        Self { per_k: vec![w] }
    }

    pub fn per_k(per_k: Vec<EnsWeights>) -> Result<Self> {
        if per_k.is_empty() {
            return Err(Error::EmptyInput("ensemble schedule"));
        }
        per_k.iter().try_for_each(EnsWeights::validate)?;
        Ok(Self { per_k })
    }

    /// ADJ-DIFF 0.4, LN-VX 0.4, APPRX-LS 0.2 up to `K = 4`; ADJ-DIFF and
    /// LN-VX at 0.5 from `K = 5` on.
    pub fn task3() -> Self {
        let low = EnsWeights::new(0.2, 0.4, 0.0, 0.4);
        let high = EnsWeights::new(0.0, 0.5, 0.0, 0.5);
        Self {
            per_k: vec![low, low, low, low, high],
        }
    }

    pub fn weights_for(&self, k: usize) -> EnsWeights {
        let i = k.saturating_sub(1).min(self.per_k.len() - 1);
        self.per_k[i]
    }

    pub fn entries(&self) -> &[EnsWeights] {
        &self.per_k
    }
}

impl std::str::FromStr for EnsSchedule {
    type Err = Error;

    /// `"task3"`, or `;`-separated weight quadruples for `K = 1, 2, ...`.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("task3") {
            return Ok(Self::task3());
        }
        Self::per_k(s.split(';').map(str::parse).collect::<Result<_>>()?)
    }
}

/// Elementwise weighted sum of raw magnitudes.
pub fn ens_raw(parts: [&[f64]; 4], w: &EnsWeights) -> Result<Vec<f64>> {
    w.validate()?;
    let n = parts[0].len();
    if let Some(p) = parts.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            what: "ensemble part length",
            expected: n,
            found: p.len(),
        });
    }
    let w = w.as_array();
    Ok((0..n).map(|i| (0..4).map(|j| w[j] * parts[j][i]).sum()).collect())
}

/// Ensemble magnitudes. The raw view is the weighted sum of raw parts; the
/// normalized view is the weighted sum of the parts' normalized views,
/// rescaled to unit norm, so that no part dominates by scale alone.
pub fn ens(parts: [&MagnitudeVector; 4], w: &EnsWeights) -> Result<MagnitudeVector> {
    let raw = ens_raw(parts.map(|p| p.raw.as_slice()), w)?;
    let mixed = ens_raw(parts.map(|p| p.normalized.as_slice()), w)?;
    let (normalized, mixed_zero) = l2_normalized(&mixed);
    let zero_norm = raw.iter().all(|&x| x == 0.0) || mixed_zero;
    Ok(MagnitudeVector {
        raw,
        normalized,
        zero_norm,
        empty_stratum: parts.iter().all(|p| p.empty_stratum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_parts_uniform_weights() {
        let v = [1.0, 2.0, 0.5];
        assert_eq!(ens_raw([&v, &v, &v, &v], &EnsWeights::UNIFORM).unwrap(), vec![4.0, 8.0, 2.0]);
    }

    #[test]
    fn passthrough() {
        let a = [1.0, 2.0];
        let z = [9.0, 9.0];
        let w = EnsWeights::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(ens_raw([&a, &z, &z, &z], &w).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn errors() {
        let a = [1.0, 2.0];
        let b = [1.0];
        assert!(matches!(
            ens_raw([&a, &b, &a, &a], &EnsWeights::UNIFORM),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            ens_raw([&a, &a, &a, &a], &EnsWeights::new(0.0, 0.0, 0.0, 0.0)),
            Err(Error::AllZeroWeights)
        );
    }

    #[test]
    fn task3_schedule() {
        let s = EnsSchedule::task3();
        assert_eq!(s.weights_for(1), EnsWeights::new(0.2, 0.4, 0.0, 0.4));
        assert_eq!(s.weights_for(4), EnsWeights::new(0.2, 0.4, 0.0, 0.4));
        assert_eq!(s.weights_for(5), EnsWeights::new(0.0, 0.5, 0.0, 0.5));
        assert_eq!(s.weights_for(6), EnsWeights::new(0.0, 0.5, 0.0, 0.5));
        assert_eq!("task3".parse::<EnsSchedule>().unwrap(), s);
    }

    #[test]
    fn parse_schedule() {
        let s: EnsSchedule = "1,0,0,0; 0,1,0,1".parse().unwrap();
        assert_eq!(s.weights_for(1), EnsWeights::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(s.weights_for(9), EnsWeights::new(0.0, 1.0, 0.0, 1.0));
        assert!("1,2,3".parse::<EnsSchedule>().is_err());
        assert!("0,0,0,0".parse::<EnsSchedule>().is_err());
        assert!("-1,1,1,1".parse::<EnsSchedule>().is_err());
    }

    #[test]
    fn normalized_view_mixes_normalized_parts() {
        let big = MagnitudeVector::from_raw(vec![100.0, 0.0]);
        let small = MagnitudeVector::from_raw(vec![0.0, 1.0]);
        let m = ens([&big, &small, &small, &big], &EnsWeights::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(m.raw, vec![100.0, 1.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.normalized[0] - h).abs() < 1e-12 && (m.normalized[1] - h).abs() < 1e-12);
    }
}
