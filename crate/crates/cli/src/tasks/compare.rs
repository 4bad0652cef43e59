//! Tasks 1 and 2: SGS magnitudes against the GFT and against each other
//! on random graphs with random or pulse real-valued signals.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use sgs_core::analytics::{cosine_normalized, median};
use sgs_core::generators::{gen_erm, gen_sbm};
use sgs_core::rng::derive_seed;
use sgs_core::signal::make_signal;
use sgs_core::spectral::{gft_magnitudes, l2_norm, MagnitudeVector};
use sgs_core::stratify::stratified_adjacencies;
use sgs_core::{Graph, Method, SgsConfig, SgsEngine};

use super::{header_with_summary, Summary};
use crate::config::{CompareConfig, ExperimentConfig, GraphModel, TrialClass};
use crate::error::{CliError, Result};
use crate::output::{fmt_f, fmt_opt, Artifacts, Report, Table};
use crate::svg::{line_plot, Series};

/// One stratum of one base graph.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumStats {
    pub k: usize,
    pub edges: usize,
    pub components: usize,
    pub singletons: usize,
    /// Final MSE of every LN-VX learning trial; empty when LN-VX is off.
    pub ln_vx_mse: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphRecord {
    pub model: GraphModel,
    pub trial: usize,
    pub seed: u64,
    pub strata: Vec<StratumStats>,
}

/// Comparisons on one stratum for one signal. `None` marks a method whose
/// output is all zero, where the signal has no gradient to decode.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumComparison {
    pub k: usize,
    pub grad_norm: f64,
    pub gft_norm: f64,
    pub vs_gft: Vec<(Method, Option<f64>)>,
    pub pairs: Vec<(Method, Method, Option<f64>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub class: TrialClass,
    pub trial: usize,
    pub signal_seed: u64,
    pub strata: Vec<StratumComparison>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareResult {
    pub graphs: Vec<GraphRecord>,
    pub trials: Vec<TrialRecord>,
}

pub fn graph_seed(cfg: &CompareConfig, model: GraphModel, trial: usize) -> u64 {
    derive_seed(derive_seed(cfg.seed, model.stream()), trial as u64)
}

pub fn signal_seed(cfg: &CompareConfig, class: TrialClass, trial: usize) -> u64 {
    derive_seed(derive_seed(cfg.seed, class.stream()), trial as u64)
}

fn generate(cfg: &CompareConfig, model: GraphModel, seed: u64) -> Result<Graph> {
    Ok(match model {
        GraphModel::Erm => gen_erm(cfg.nodes, cfg.erm_p, seed)?,
        GraphModel::Sbm => gen_sbm(cfg.nodes, seed)?.graph,
    })
}

fn defined_cosine(a: &MagnitudeVector, b: &MagnitudeVector) -> Result<Option<f64>> {
    if a.zero_norm || b.zero_norm {
        return Ok(None);
    }
    Ok(Some(cosine_normalized(&a.raw, &b.raw)?))
}

/// Rand and Pulse classes of one model share each base graph and its
/// prepared transforms.
fn run_graph(cfg: &CompareConfig, model: GraphModel, trial: usize) -> Result<(GraphRecord, Vec<TrialRecord>)> {
    let seed = graph_seed(cfg, model, trial);
    let g = generate(cfg, model, seed)?;
    let family = stratified_adjacencies(&g)?;
    let engine = SgsEngine::prepare(
        &family,
        &SgsConfig {
            methods: cfg.methods.clone(),
            seed,
            ens: cfg.ens.clone(),
            ln_vx: cfg.ln_vx.clone(),
            k_max: cfg.k_max,
        },
    )?;
    let graph = GraphRecord {
        model,
        trial,
        seed,
        strata: engine
            .strata()
            .iter()
            .map(|st| StratumStats {
                k: st.k,
                edges: st.edges.len(),
                components: st.components,
                singletons: st.singletons,
                ln_vx_mse: st.ln_vx_mse(),
            })
            .collect(),
    };
    let mut records = Vec::new();
    for class in cfg.classes.iter().copied().filter(|c| c.model() == model) {
        let sseed = signal_seed(cfg, class, trial);
        let signal = make_signal(class.signal(), &g, 1, sseed)?;
        let values = signal.as_real().expect("task signals are real-valued").values();
        let set = engine.apply(&signal)?;
        let mut strata = Vec::new();
        for st in engine.strata() {
            let gft = gft_magnitudes(&st.eigen, values)?;
            let mut vs_gft = Vec::new();
            let mut pairs = Vec::new();
            for (i, &a) in cfg.methods.iter().enumerate() {
                let ma = set.get(a, st.k).expect("configured method");
                let c = if ma.zero_norm { None } else { Some(cosine_normalized(&gft.raw, &ma.raw)?) };
                vs_gft.push((a, c));
                for &b in &cfg.methods[i + 1..] {
                    let mb = set.get(b, st.k).expect("configured method");
                    pairs.push((a, b, defined_cosine(ma, mb)?));
                }
            }
            strata.push(StratumComparison {
                k: st.k,
                grad_norm: l2_norm(&signal.edge_gradient(&st.edges)),
                gft_norm: gft.norm(),
                vs_gft,
                pairs,
            });
        }
        records.push(TrialRecord {
            class,
            trial,
            signal_seed: sseed,
            strata,
        });
    }
    Ok((graph, records))
}

pub fn run_compare(cfg: &CompareConfig) -> Result<CompareResult> {
    let mut methods = BTreeSet::new();
    if !cfg.methods.iter().all(|m| methods.insert(*m)) {
        return Err(CliError::Config("methods listed twice".into()));
    }
    let models: BTreeSet<GraphModel> = cfg.classes.iter().map(|c| c.model()).collect();
    let jobs: Vec<(GraphModel, usize)> = models
        .into_iter()
        .flat_map(|m| (0..cfg.trials).map(move |t| (m, t)))
        .collect();
    let results = jobs
        .into_par_iter()
        .map(|(m, t)| run_graph(cfg, m, t))
        .collect::<Result<Vec<_>>>()?;
    let mut graphs = Vec::new();
    let mut trials = Vec::new();
    for (g, recs) in results {
        graphs.push(g);
        trials.extend(recs);
    }
    trials.sort_by_key(|r| (r.class, r.trial));
    Ok(CompareResult { graphs, trials })
}

impl CompareResult {
    pub fn cosine_summary(&self) -> BTreeMap<(TrialClass, usize, Method), Summary> {
        let mut acc: BTreeMap<(TrialClass, usize, Method), Vec<Option<f64>>> = BTreeMap::new();
        for r in &self.trials {
            for st in &r.strata {
                for &(m, c) in &st.vs_gft {
                    acc.entry((r.class, st.k, m)).or_default().push(c);
                }
            }
        }
        acc.into_iter().map(|(k, v)| (k, Summary::of(&v))).collect()
    }

    pub fn pair_summary(&self) -> BTreeMap<(TrialClass, usize, Method, Method), Summary> {
        let mut acc: BTreeMap<(TrialClass, usize, Method, Method), Vec<Option<f64>>> = BTreeMap::new();
        for r in &self.trials {
            for st in &r.strata {
                for &(a, b, c) in &st.pairs {
                    acc.entry((r.class, st.k, a, b)).or_default().push(c);
                }
            }
        }
        acc.into_iter().map(|(k, v)| (k, Summary::of(&v))).collect()
    }

    /// All LN-VX final MSEs of one model, pooled per stratum.
    pub fn ln_vx_mse_by_k(&self, model: GraphModel) -> BTreeMap<usize, Vec<f64>> {
        let mut acc: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for g in self.graphs.iter().filter(|g| g.model == model) {
            for st in &g.strata {
                acc.entry(st.k).or_default().extend(&st.ln_vx_mse);
            }
        }
        acc.retain(|_, v| !v.is_empty());
        acc
    }

    pub fn undefined_count(&self) -> usize {
        self.trials
            .iter()
            .flat_map(|r| &r.strata)
            .map(|s| s.vs_gft.iter().filter(|c| c.1.is_none()).count())
            .sum()
    }

    fn cosine_table(&self) -> Table {
        let mut t = Table::new(&["class", "trial", "K", "method", "cosine"]);
        for r in &self.trials {
            for st in &r.strata {
                for &(m, c) in &st.vs_gft {
                    t.push(vec![r.class.to_string(), r.trial.to_string(), st.k.to_string(), m.to_string(), fmt_opt(c)]);
                }
            }
        }
        t
    }

    fn pair_table(&self) -> Table {
        let mut t = Table::new(&["class", "trial", "K", "method_a", "method_b", "cosine"]);
        for r in &self.trials {
            for st in &r.strata {
                for &(a, b, c) in &st.pairs {
                    t.push(vec![
                        r.class.to_string(),
                        r.trial.to_string(),
                        st.k.to_string(),
                        a.to_string(),
                        b.to_string(),
                        fmt_opt(c),
                    ]);
                }
            }
        }
        t
    }

    fn strata_table(&self) -> Table {
        let mut t = Table::new(&["model", "trial", "seed", "K", "edges", "components", "singletons"]);
        for g in &self.graphs {
            for st in &g.strata {
                t.push(vec![
                    g.model.name().into(),
                    g.trial.to_string(),
                    g.seed.to_string(),
                    st.k.to_string(),
                    st.edges.to_string(),
                    st.components.to_string(),
                    st.singletons.to_string(),
                ]);
            }
        }
        t
    }

    fn signal_table(&self) -> Table {
        let mut t = Table::new(&["class", "trial", "seed", "K", "grad_norm", "gft_norm"]);
        for r in &self.trials {
            for st in &r.strata {
                t.push(vec![
                    r.class.to_string(),
                    r.trial.to_string(),
                    r.signal_seed.to_string(),
                    st.k.to_string(),
                    fmt_f(st.grad_norm),
                    fmt_f(st.gft_norm),
                ]);
            }
        }
        t
    }

    fn mse_table(&self) -> Table {
        let mut t = Table::new(&["model", "trial", "K", "ln_vx_trial", "mse"]);
        for g in &self.graphs {
            for st in &g.strata {
                for (i, m) in st.ln_vx_mse.iter().enumerate() {
                    t.push(vec![g.model.name().into(), g.trial.to_string(), st.k.to_string(), i.to_string(), fmt_f(*m)]);
                }
            }
        }
        t
    }
}

fn per_k_series<K: Ord + Clone>(
    summary: impl Iterator<Item = (K, usize, Summary)>,
    name: impl Fn(&K) -> String,
) -> Vec<Series> {
    let mut by: BTreeMap<K, Vec<(f64, f64)>> = BTreeMap::new();
    for (key, k, s) in summary {
        by.entry(key).or_default().push((k as f64, s.mean));
    }
    by.iter().map(|(key, pts)| Series::new(name(key), pts.clone())).collect()
}

fn strata_plots(result: &CompareResult, art: &mut Artifacts) {
    let models: BTreeSet<GraphModel> = result.graphs.iter().map(|g| g.model).collect();
    for model in models {
        let mut comps: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
        let mut singles: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
        for g in result.graphs.iter().filter(|g| g.model == model) {
            for st in &g.strata {
                comps.entry(st.k).or_default().push(Some(st.components as f64));
                singles.entry(st.k).or_default().push(Some(st.singletons as f64));
            }
        }
        let pts = |m: &BTreeMap<usize, Vec<Option<f64>>>| m.iter().map(|(k, v)| (*k as f64, Summary::of(v).mean)).collect();
        art.plots.push((
            format!("strata_{}", model.name()),
            line_plot(
                &format!("{} strata", model.name()),
                "K",
                "mean count",
                &[Series::new("components", pts(&comps)), Series::new("singletons", pts(&singles))],
            ),
        ));
    }
}

/// Tables, plots and report for `task1` (against the GFT) or `task2`
/// (between methods).
pub fn outputs(cfg: &ExperimentConfig, result: &CompareResult) -> (Report, Artifacts) {
    let task2 = matches!(cfg, ExperimentConfig::Task2(_));
    let mut report = Report::new(cfg);
    let mut art = Artifacts::default();
    if task2 {
        let summary = result.pair_summary();
        let mut t = header_with_summary(&["class", "K", "method_a", "method_b"]);
        for (&(class, k, a, b), s) in &summary {
            let mut row = vec![class.to_string(), k.to_string(), a.to_string(), b.to_string()];
            row.extend(s.cells());
            t.push(row);
            report.metric(format!("pair_mean/{class}/K{k}/{a}~{b}"), s.mean);
        }
        art.table("pairwise", result.pair_table());
        art.table("pairwise_summary", t);
        for class in TrialClass::ALL {
            let series = per_k_series(
                summary.iter().filter(|e| e.0 .0 == class).map(|(&(_, k, a, b), s)| ((a, b), k, *s)),
                |(a, b)| format!("{a}~{b}"),
            );
            if !series.is_empty() {
                art.plots.push((
                    format!("pairwise_{class}"),
                    line_plot(&format!("{class} pairwise cosine"), "K", "mean cosine", &series),
                ));
            }
        }
    } else {
        let summary = result.cosine_summary();
        let mut t = header_with_summary(&["class", "K", "method"]);
        for (&(class, k, m), s) in &summary {
            let mut row = vec![class.to_string(), k.to_string(), m.to_string()];
            row.extend(s.cells());
            t.push(row);
            report.metric(format!("cosine_mean/{class}/K{k}/{m}"), s.mean);
        }
        art.table("cosine", result.cosine_table());
        art.table("cosine_summary", t);
        for class in TrialClass::ALL {
            let series = per_k_series(
                summary.iter().filter(|e| e.0 .0 == class).map(|(&(_, k, m), s)| (m, k, *s)),
                |m| m.to_string(),
            );
            if !series.is_empty() {
                art.plots.push((
                    format!("cosine_{class}"),
                    line_plot(&format!("{class} cosine vs GFT"), "K", "mean cosine", &series),
                ));
            }
        }
    }
    art.table("strata", result.strata_table());
    art.table("signal", result.signal_table());
    let mse = result.mse_table();
    if !mse.rows.is_empty() {
        art.table("ln_vx_mse", mse);
        for model in [GraphModel::Erm, GraphModel::Sbm] {
            for (k, v) in result.ln_vx_mse_by_k(model) {
                report.metric(format!("ln_vx_mse_median/{}/K{k}", model.name()), median(&v).expect("non-empty"));
            }
        }
    }
    strata_plots(result, &mut art);
    let undefined = result.undefined_count();
    if undefined > 0 {
        report.flags.push(format!(
            "{undefined} comparisons against the GFT are undefined (all-zero SGS output, the signal has no gradient on that stratum) and are excluded from means"
        ));
    }
    (report, art)
}
