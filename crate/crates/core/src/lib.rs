//! Stratified graph spectra.
//!
//! Decodes the magnitudes of Laplacian eigencomponents carried by real- or
//! vector-valued graph signals. Every computation runs on a family of
//! *stratified graphs*: for each `K` in `1..=diameter`, the graph linking
//! exactly the node pairs at shortest-path distance `K` in the base graph.
//!
//! Module map:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | canonical simple graphs, BFS, components |
//! | [`generators`] | Erdős–Rényi, stochastic block model, the caveman variant |
//! | [`stratify`] | stratified adjacencies, incidence matrices, Laplacians, line graphs |
//! | [`signal`] | vector/real signals, gradient, divergence, Γ |
//! | [`spectral`] | eigensolver, GFT, quadratic smoothness, minimum-norm least squares |
//! | [`sgs`] | APPRX-LS, IN-AGG, ADJ-DIFF, LN-VX and the ensemble |
//! | [`embed`] | total-variation node-embedding learner |
//! | [`analytics`] | spectral clustering, ARI/AMI, Wasserstein, correlation |

pub mod analytics;
pub mod embed;
mod error;
pub mod generators;
pub mod graph;
pub mod rng;
pub mod sgs;
pub mod signal;
pub mod spectral;
pub mod stratify;

pub use error::{Error, Result};
pub use graph::{Components, DistanceMatrix, Graph, GraphDocument};
pub use sgs::{EnsSchedule, EnsWeights, Method, SgsConfig, SgsEngine, SpectrumSet};
pub use signal::{GraphSignal, RealSignal, VectorSignal};
pub use spectral::{EigenSystem, MagnitudeVector};
pub use stratify::{SgFamily, Stratum};
