//! Stratified-graph-spectra transforms.
//!
//! Each transform estimates, per stratum `K`, how strongly a signal loads
//! on every Laplacian eigencomponent of that stratum, using only the
//! per-edge gradient `∇s_K`. Everything that does not depend on the signal
//! (eigensystems, pseudo-inverses, learned LN-VX transforms) is prepared
//! once in [`SgsEngine::prepare`] and reused by [`SgsEngine::apply`].

pub mod adj_diff;
pub mod apprx_ls;
pub mod ens;
pub mod in_agg;
pub mod ln_vx;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use ens::{ens, EnsSchedule, EnsWeights};
pub use ln_vx::{learn_eigenbasis_transform, Activation, LearnedTransform, LnVxConfig};

use crate::rng::derive_seed;
use crate::spectral::{eig_sym, EigenSystem, MagnitudeVector, PseudoInverse};
use crate::{Error, GraphSignal, Result, SgFamily, Stratum};

const STREAM_INCIDENCE: u64 = 1;
const STREAM_LN_VX: u64 = 2;

/// The four element transforms and their ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "APPRX-LS")]
    ApprxLs,
    #[serde(rename = "ADJ-DIFF")]
    AdjDiff,
    #[serde(rename = "IN-AGG")]
    InAgg,
    #[serde(rename = "LN-VX")]
    LnVx,
    #[serde(rename = "ENS")]
    Ens,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ApprxLs,
        Method::AdjDiff,
        Method::InAgg,
        Method::LnVx,
        Method::Ens,
    ];
    /// Element transforms in ensemble-weight order.
    pub const ELEMENTS: [Method; 4] = [Method::ApprxLs, Method::AdjDiff, Method::InAgg, Method::LnVx];

    pub fn name(self) -> &'static str {
        match self {
            Method::ApprxLs => "APPRX-LS",
            Method::AdjDiff => "ADJ-DIFF",
            Method::InAgg => "IN-AGG",
            Method::LnVx => "LN-VX",
            Method::Ens => "ENS",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

/// Settings shared by every transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SgsConfig {
    pub methods: Vec<Method>,
    pub seed: u64,
    pub ens: EnsSchedule,
    pub ln_vx: LnVxConfig,
    /// Highest stratum to process; `None` means all of them.
    pub k_max: Option<usize>,
}

impl Default for SgsConfig {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            seed: 0,
            ens: EnsSchedule::default(),
            ln_vx: LnVxConfig::default(),
            k_max: None,
        }
    }
}

/// Signal-independent data for one stratum.
#[derive(Clone, Debug)]
pub struct PreparedStratum {
    pub k: usize,
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub degrees: Vec<usize>,
    pub components: usize,
    pub singletons: usize,
    /// Laplacian eigensystem of the stratum.
    pub eigen: EigenSystem,
    pinv: Option<PseudoInverse>,
    grad_u: Option<DMatrix<f64>>,
    ln_vx: Option<ln_vx::LnVxStratum>,
}

impl PreparedStratum {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Final MSE of every learned LN-VX transform on this stratum.
    pub fn ln_vx_mse(&self) -> Vec<f64> {
        self.ln_vx
            .as_ref()
            .map(|l| l.transforms.iter().map(|t| t.mse).collect())
            .unwrap_or_default()
    }

    pub fn ln_vx_transforms(&self) -> &[LearnedTransform] {
        self.ln_vx.as_ref().map_or(&[], |l| &l.transforms)
    }

    fn element(&self, method: Method, grad: &[f64]) -> Result<MagnitudeVector> {
        if self.is_empty() {
            return Ok(MagnitudeVector::empty(self.num_nodes));
        }
        let raw = match method {
            Method::ApprxLs => apprx_ls::magnitudes(
                &self.eigen,
                self.pinv.as_ref().expect("APPRX-LS prepared"),
                grad,
            )?,
            Method::AdjDiff => adj_diff::magnitudes(
                &self.eigen,
                self.grad_u.as_ref().expect("ADJ-DIFF prepared"),
                grad,
            )?,
            Method::InAgg => in_agg::magnitudes(&self.eigen, &self.edges, &self.degrees, grad)?,
            Method::LnVx => self.ln_vx.as_ref().expect("LN-VX prepared").magnitudes(&self.eigen, grad)?,
            Method::Ens => unreachable!("ENS is assembled from the element transforms"),
        };
        Ok(MagnitudeVector::from_raw(raw))
    }
}

/// Prepared transforms for one base graph.
#[derive(Clone, Debug)]
pub struct SgsEngine {
    config: SgsConfig,
    num_nodes: usize,
    strata: Vec<PreparedStratum>,
    /// Element transforms evaluated on every call, in ensemble order.
    elements: Vec<Method>,
}

impl SgsEngine {
    pub fn prepare(family: &SgFamily, config: &SgsConfig) -> Result<Self> {
        if config.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods selected".into()));
        }
        let rho = family.rho();
        let k_max = config.k_max.unwrap_or(rho).min(rho);
        let ks = 1..=k_max;
        let mut elements: Vec<Method> = Method::ELEMENTS
            .into_iter()
            .filter(|m| config.methods.contains(m))
            .collect();
        if config.methods.contains(&Method::Ens) {
            for k in ks.clone() {
                let w = config.ens.weights_for(k);
                w.validate()?;
                for (m, wm) in Method::ELEMENTS.into_iter().zip(w.as_array()) {
                    if wm > 0.0 && !elements.contains(&m) {
                        elements.push(m);
                    }
                }
            }
            elements.sort();
        }
        let strata = ks
            .map(|k| prepare_stratum(family.stratum(k).expect("k within rho"), config, &elements))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: config.clone(),
            num_nodes: family.base().num_nodes(),
            strata,
            elements,
        })
    }

    pub fn config(&self) -> &SgsConfig {
        &self.config
    }

    pub fn strata(&self) -> &[PreparedStratum] {
        &self.strata
    }

    pub fn stratum(&self, k: usize) -> Option<&PreparedStratum> {
        k.checked_sub(1).and_then(|i| self.strata.get(i))
    }

    /// Magnitudes of every configured method on every prepared stratum.
    pub fn apply(&self, signal: &GraphSignal) -> Result<SpectrumSet> {
        if signal.num_nodes() != self.num_nodes {
            return Err(Error::DimensionMismatch {
                what: "signal nodes",
                expected: self.num_nodes,
                found: signal.num_nodes(),
            });
        }
        let mut entries = Vec::new();
        for st in &self.strata {
            let grad = signal.edge_gradient(&st.edges);
            let mut parts: [Option<MagnitudeVector>; 4] = Default::default();
            for (slot, m) in Method::ELEMENTS.into_iter().enumerate() {
                if self.elements.contains(&m) {
                    parts[slot] = Some(st.element(m, &grad)?);
                }
            }
            for (slot, m) in Method::ELEMENTS.into_iter().enumerate() {
                if self.config.methods.contains(&m) {
                    entries.push(SpectrumEntry {
                        method: m,
                        k: st.k,
                        magnitudes: parts[slot].clone().expect("element computed"),
                    });
                }
            }
            if self.config.methods.contains(&Method::Ens) {
                let zero = MagnitudeVector::from_raw(vec![0.0; self.num_nodes]);
                let refs: [&MagnitudeVector; 4] = std::array::from_fn(|i| parts[i].as_ref().unwrap_or(&zero));
                let mut m = ens(refs, &self.config.ens.weights_for(st.k))?;
                m.empty_stratum = st.is_empty();
                entries.push(SpectrumEntry {
                    method: Method::Ens,
                    k: st.k,
                    magnitudes: m,
                });
            }
        }
        Ok(SpectrumSet {
            eigenvalues: self.strata.iter().map(|s| s.eigen.values.clone()).collect(),
            entries,
        })
    }
}

fn prepare_stratum(st: &Stratum, config: &SgsConfig, elements: &[Method]) -> Result<PreparedStratum> {
    let g = st.graph();
    let eigen = eig_sym(&st.laplacian())?;
    let empty = st.num_edges() == 0;
    let wants = |m: Method| !empty && elements.contains(&m);
    let pinv = if wants(Method::ApprxLs) {
        let seed = derive_seed(derive_seed(config.seed, STREAM_INCIDENCE), st.k() as u64);
        Some(PseudoInverse::new(&st.incidence(seed).oriented)?)
    } else {
        None
    };
    let grad_u = wants(Method::AdjDiff).then(|| adj_diff::eigen_gradients(&eigen, st.edges()));
    let ln_vx = if wants(Method::LnVx) {
        let seed = derive_seed(derive_seed(config.seed, STREAM_LN_VX), st.k() as u64);
        Some(ln_vx::LnVxStratum::learn(st, &eigen, &config.ln_vx, seed)?)
    } else {
        None
    };
    Ok(PreparedStratum {
        k: st.k(),
        num_nodes: g.num_nodes(),
        edges: st.edges().to_vec(),
        degrees: g.degrees(),
        components: st.components(),
        singletons: st.singletons(),
        eigen,
        pinv,
        grad_u,
        ln_vx,
    })
}

/// Magnitudes of one method on one stratum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub method: Method,
    pub k: usize,
    pub magnitudes: MagnitudeVector,
}

/// All methods on all strata, aligned to ascending eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSet {
    /// Laplacian eigenvalues of stratum `K` at index `K - 1`.
    pub eigenvalues: Vec<Vec<f64>>,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumSet {
    pub fn get(&self, method: Method, k: usize) -> Option<&MagnitudeVector> {
        self.entries
            .iter()
            .find(|e| e.method == method && e.k == k)
            .map(|e| &e.magnitudes)
    }

    pub fn num_strata(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// One-shot convenience: prepare and apply.
pub fn sgs_all(family: &SgFamily, signal: &GraphSignal, config: &SgsConfig) -> Result<SpectrumSet> {
    SgsEngine::prepare(family, config)?.apply(signal)
}

/// Runs a single element method over all strata.
pub fn run_method(family: &SgFamily, signal: &GraphSignal, method: Method, config: &SgsConfig) -> Result<Vec<MagnitudeVector>> {
    let cfg = SgsConfig {
        methods: vec![method],
        ..config.clone()
    };
    let set = sgs_all(family, signal, &cfg)?;
    Ok(set.entries.into_iter().map(|e| e.magnitudes).collect())
}
