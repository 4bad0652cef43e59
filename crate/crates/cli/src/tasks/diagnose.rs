//! Tasks 4 to 8: repeated over-smoothed embedding learning on the Caveman
//! variant, profiled through the ENS spectrum.

use rayon::prelude::*;
use sgs_core::analytics::{ami, ari, finite_diff_series, mean, percentile, ppmcc, spectral_cluster, wasserstein_1d};
use sgs_core::embed::{train_embedding, TrainConfig};
use sgs_core::generators::gen_caveman_variant;
use sgs_core::rng::derive_seed;
use sgs_core::signal::{make_signal, SignalKind};
use sgs_core::spectral::l2_norm;
use sgs_core::stratify::stratified_adjacencies;
use sgs_core::{Graph, GraphSignal, Method, SgsConfig, SgsEngine, VectorSignal};

use super::{header_with_summary, Summary};
use crate::config::{DiagnoseConfig, ExperimentConfig};
use crate::error::Result;
use crate::output::{fmt_f, fmt_opt, Artifacts, Report, Table};
use crate::svg::{line_plot, Series};

const STREAM_ENGINE: u64 = 1;
const STREAM_INIT: u64 = 2;
const STREAM_CLUSTER: u64 = 3;

/// ENS magnitudes and gradient norms of one embedding, indexed by `K - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub ens: Vec<Vec<f64>>,
    pub ens_normalized: Vec<Vec<f64>>,
    pub ens_norm: Vec<f64>,
    pub grad_norm: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Good,
    Bad,
    Neither,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Self::Good => "good",
            Self::Bad => "bad",
            Self::Neither => "neither",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub trial: usize,
    pub init_seed: u64,
    pub cluster_seed: u64,
    pub ari_init: f64,
    pub ami_init: f64,
    pub ari_final: f64,
    pub ami_final: f64,
    pub tau_init: f64,
    pub tau_final: f64,
    pub group: Group,
    pub init: Profile,
    pub fin: Profile,
}

/// Distribution of per-pair `E[|ΔM|]` and `max |ΔM|` for one pair family.
#[derive(Clone, Debug, PartialEq)]
pub struct PairFamily {
    pub label: &'static str,
    pub means: Vec<f64>,
    pub maxes: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub label: String,
    pub mean_distance: Option<f64>,
    pub max_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairAnalysis {
    pub name: &'static str,
    pub k: usize,
    pub families: [PairFamily; 3],
    pub comparisons: Vec<Comparison>,
    /// Largest absolute difference between the two sets' mean spectra.
    pub max_mean_diff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationRow {
    pub stage: &'static str,
    pub k: usize,
    pub score: &'static str,
    pub quantity: &'static str,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub epoch: usize,
    pub tau: f64,
    pub dtau: f64,
    pub ari: f64,
    pub dari: f64,
    pub ami: f64,
    pub dami: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub label: &'static str,
    pub trial: usize,
    pub points: Vec<TrajectoryPoint>,
    /// `(epoch, K, index, M, dM/dt, M_1, dM_1/dt)` for ENS.
    pub ens: Vec<(usize, usize, usize, f64, f64, f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct DiagnoseResult {
    pub eigenvalues: Vec<Vec<f64>>,
    pub instances: Vec<Instance>,
    pub analyses: Vec<PairAnalysis>,
    pub correlations: Vec<CorrelationRow>,
    pub trajectories: Vec<Trajectory>,
    pub flags: Vec<String>,
}

impl DiagnoseResult {
    pub fn good(&self) -> Vec<&Instance> {
        self.instances.iter().filter(|i| i.group == Group::Good).collect()
    }

    pub fn bad(&self) -> Vec<&Instance> {
        self.instances.iter().filter(|i| i.group == Group::Bad).collect()
    }

    /// `(p10, p90, p90 - p10)` of a per-instance score.
    pub fn span(&self, f: impl Fn(&Instance) -> f64) -> (f64, f64, f64) {
        let xs: Vec<f64> = self.instances.iter().map(f).collect();
        let lo = percentile(&xs, 0.1).expect("at least one trial");
        let hi = percentile(&xs, 0.9).expect("at least one trial");
        (lo, hi, hi - lo)
    }

    pub fn analysis(&self, name: &str, k: usize) -> Option<&PairAnalysis> {
        self.analyses.iter().find(|a| a.name == name && a.k == k)
    }

    pub fn correlation(&self, stage: &str, k: usize, score: &str, quantity: &str) -> Option<f64> {
        self.correlations
            .iter()
            .find(|c| c.stage == stage && c.k == k && c.score == score && c.quantity == quantity)
            .and_then(|c| c.value)
    }
}

fn profile(engine: &SgsEngine, s: &VectorSignal) -> Result<Profile> {
    let gs = GraphSignal::from(s.clone());
    let set = engine.apply(&gs)?;
    let mut p = Profile {
        ens: Vec::new(),
        ens_normalized: Vec::new(),
        ens_norm: Vec::new(),
        grad_norm: Vec::new(),
    };
    for st in engine.strata() {
        let m = set.get(Method::Ens, st.k).expect("ENS configured");
        p.ens.push(m.raw.clone());
        p.ens_normalized.push(m.normalized.clone());
        p.ens_norm.push(m.norm());
        p.grad_norm.push(l2_norm(&gs.edge_gradient(&st.edges)));
    }
    Ok(p)
}

struct Setup {
    graph: Graph,
    membership: Vec<usize>,
    engine: SgsEngine,
}

fn train_config(cfg: &DiagnoseConfig, stride: usize) -> TrainConfig {
    TrainConfig {
        epochs: cfg.epochs,
        learning_rate: cfg.learning_rate,
        w_tau: 1.0,
        w_eps: 0.0,
        snapshot_stride: stride,
    }
}

fn initial(cfg: &DiagnoseConfig, g: &Graph, seed: u64) -> Result<VectorSignal> {
    let s = make_signal(SignalKind::Random, g, cfg.dim, seed)?;
    Ok(match s {
        GraphSignal::Vector(v) => v,
        GraphSignal::Real(r) => VectorSignal::from_flat(1, r.values().to_vec())?,
    })
}

fn scores(s: &VectorSignal, k: usize, seed: u64, truth: &[usize]) -> Result<(f64, f64)> {
    let labels = spectral_cluster(s, k, seed)?;
    Ok((ari(&labels.labels, truth)?, ami(&labels.labels, truth)?))
}

fn run_instance(cfg: &DiagnoseConfig, setup: &Setup, trial: usize) -> Result<Instance> {
    let init_seed = derive_seed(derive_seed(cfg.seed, STREAM_INIT), trial as u64);
    let cluster_seed = derive_seed(derive_seed(cfg.seed, STREAM_CLUSTER), trial as u64);
    let init = initial(cfg, &setup.graph, init_seed)?;
    let traj = train_embedding(&setup.graph, &init, &train_config(cfg, cfg.epochs))?;
    let fin = traj.final_embedding();
    let (ari_init, ami_init) = scores(&init, cfg.clusters, cluster_seed, &setup.membership)?;
    let (ari_final, ami_final) = scores(fin, cfg.clusters, cluster_seed, &setup.membership)?;
    let group = if ari_final >= cfg.good_threshold && ami_final >= cfg.good_threshold {
        Group::Good
    } else if ari_final <= cfg.bad_threshold && ami_final <= cfg.bad_threshold {
        Group::Bad
    } else {
        Group::Neither
    };
    Ok(Instance {
        trial,
        init_seed,
        cluster_seed,
        ari_init,
        ami_init,
        ari_final,
        ami_final,
        tau_init: traj.tau[0],
        tau_final: *traj.tau.last().expect("non-empty"),
        group,
        init: profile(&setup.engine, &init)?,
        fin: profile(&setup.engine, fin)?,
    })
}

fn abs_diff_stats(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    (mean(&d), d.iter().copied().fold(0.0, f64::max))
}

fn family(label: &'static str, pairs: impl Iterator<Item = (&'static str, (f64, f64))>) -> PairFamily {
    let mut f = PairFamily {
        label,
        means: Vec::new(),
        maxes: Vec::new(),
    };
    for (_, (m, x)) in pairs {
        f.means.push(m);
        f.maxes.push(x);
    }
    f
}

fn within<'a>(xs: &'a [&'a [f64]]) -> impl Iterator<Item = (&'static str, (f64, f64))> + 'a {
    (0..xs.len()).flat_map(move |i| (i + 1..xs.len()).map(move |j| ("", abs_diff_stats(xs[i], xs[j]))))
}

fn across<'a>(xs: &'a [&'a [f64]], ys: &'a [&'a [f64]]) -> impl Iterator<Item = (&'static str, (f64, f64))> + 'a {
    xs.iter().flat_map(move |x| ys.iter().map(move |y| ("", abs_diff_stats(x, y))))
}

fn distance(a: &[f64], b: &[f64]) -> Option<f64> {
    wasserstein_1d(a, b).ok()
}

fn mean_vector(xs: &[&[f64]]) -> Vec<f64> {
    let n = xs[0].len();
    (0..n).map(|i| xs.iter().map(|x| x[i]).sum::<f64>() / xs.len() as f64).collect()
}

/// Pair statistics for two sets of spectra: cross pairs, pairs within the
/// first set and pairs within the second, plus Wasserstein distances
/// between the three resulting distributions.
fn analyse(name: &'static str, k: usize, labels: [&'static str; 3], xs: &[&[f64]], ys: &[&[f64]]) -> PairAnalysis {
    let families = [
        family(labels[0], across(xs, ys)),
        family(labels[1], within(xs)),
        family(labels[2], within(ys)),
    ];
    let comparisons = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .map(|(a, b)| Comparison {
            label: format!("{}-{}", labels[a], labels[b]),
            mean_distance: distance(&families[a].means, &families[b].means),
            max_distance: distance(&families[a].maxes, &families[b].maxes),
        })
        .collect();
    let (mx, my) = (mean_vector(xs), mean_vector(ys));
    let max_mean_diff = mx.iter().zip(&my).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    PairAnalysis {
        name,
        k,
        families,
        comparisons,
        max_mean_diff,
    }
}

fn pair_analyses(good: &[&Instance], bad: &[&Instance], rho: usize) -> Vec<PairAnalysis> {
    let both: Vec<&Instance> = good.iter().chain(bad).copied().collect();
    let mut out = Vec::new();
    for k in 0..rho {
        let gi: Vec<&[f64]> = good.iter().map(|i| i.init.ens_normalized[k].as_slice()).collect();
        let bi: Vec<&[f64]> = bad.iter().map(|i| i.init.ens_normalized[k].as_slice()).collect();
        let gf: Vec<&[f64]> = good.iter().map(|i| i.fin.ens_normalized[k].as_slice()).collect();
        let bf: Vec<&[f64]> = bad.iter().map(|i| i.fin.ens_normalized[k].as_slice()).collect();
        let gr: Vec<&[f64]> = good.iter().map(|i| i.fin.ens[k].as_slice()).collect();
        let br: Vec<&[f64]> = bad.iter().map(|i| i.fin.ens[k].as_slice()).collect();
        let ai: Vec<&[f64]> = both.iter().map(|i| i.init.ens_normalized[k].as_slice()).collect();
        let af: Vec<&[f64]> = both.iter().map(|i| i.fin.ens_normalized[k].as_slice()).collect();
        let gb = ["GB", "GG", "BB"];
        out.push(analyse("task5_init", k + 1, gb, &gi, &bi));
        out.push(analyse("task7_final", k + 1, gb, &gf, &bf));
        out.push(analyse("task7_init_final", k + 1, ["IF", "II", "FF"], &ai, &af));
        out.push(analyse("task8_final_raw", k + 1, gb, &gr, &br));
    }
    out
}

fn correlations(members: &[&Instance], rho: usize) -> Vec<CorrelationRow> {
    let mut out = Vec::new();
    for stage in ["init", "final"] {
        let prof = |i: &Instance| if stage == "init" { i.init.clone() } else { i.fin.clone() };
        let profiles: Vec<Profile> = members.iter().map(|i| prof(i)).collect();
        for k in 0..rho {
            for (score, xs) in [
                ("ARI", members.iter().map(|i| i.ari_final).collect::<Vec<_>>()),
                ("AMI", members.iter().map(|i| i.ami_final).collect()),
            ] {
                for (quantity, ys) in [
                    ("grad_norm", profiles.iter().map(|p| p.grad_norm[k]).collect::<Vec<_>>()),
                    ("ens_norm", profiles.iter().map(|p| p.ens_norm[k]).collect()),
                ] {
                    out.push(CorrelationRow {
                        stage,
                        k: k + 1,
                        score,
                        quantity,
                        value: ppmcc(&xs, &ys).ok(),
                    });
                }
            }
        }
    }
    out
}

fn trajectory(cfg: &DiagnoseConfig, setup: &Setup, inst: &Instance, label: &'static str) -> Result<Trajectory> {
    let init = initial(cfg, &setup.graph, inst.init_seed)?;
    let stride = cfg.trajectory_stride;
    let traj = train_embedding(&setup.graph, &init, &train_config(cfg, stride))?;
    let dtau = finite_diff_series(&traj.tau)?;
    let snaps = traj
        .snapshots
        .par_iter()
        .map(|(epoch, s)| -> Result<(usize, f64, f64, Profile)> {
            let (a, m) = scores(s, cfg.clusters, inst.cluster_seed, &setup.membership)?;
            Ok((*epoch, a, m, profile(&setup.engine, s)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let step = |xs: Vec<f64>| -> Result<Vec<f64>> {
        Ok(finite_diff_series(&xs)?.into_iter().map(|d| d / stride as f64).collect())
    };
    let aris: Vec<f64> = snaps.iter().map(|s| s.1).collect();
    let amis: Vec<f64> = snaps.iter().map(|s| s.2).collect();
    let (dari, dami) = (step(aris.clone())?, step(amis.clone())?);
    let points = snaps
        .iter()
        .enumerate()
        .map(|(j, s)| TrajectoryPoint {
            epoch: s.0,
            tau: traj.tau[s.0],
            dtau: dtau[s.0],
            ari: aris[j],
            dari: dari[j],
            ami: amis[j],
            dami: dami[j],
        })
        .collect();
    let mut ens = Vec::new();
    let rho = snaps[0].3.ens.len();
    let mut series = Vec::new();
    for k in 0..rho {
        for i in 0..snaps[0].3.ens[k].len() {
            let raw: Vec<f64> = snaps.iter().map(|s| s.3.ens[k][i]).collect();
            let norm: Vec<f64> = snaps.iter().map(|s| s.3.ens_normalized[k][i]).collect();
            series.push((k + 1, i, step(raw.clone())?, raw, step(norm.clone())?, norm));
        }
    }
    for (j, s) in snaps.iter().enumerate() {
        for (k, i, draw, raw, dnorm, norm) in &series {
            ens.push((s.0, *k, *i, raw[j], draw[j], norm[j], dnorm[j]));
        }
    }
    Ok(Trajectory {
        label,
        trial: inst.trial,
        points,
        ens,
    })
}

pub fn run_diagnose(cfg: &DiagnoseConfig) -> Result<DiagnoseResult> {
    let cave = gen_caveman_variant();
    let family = stratified_adjacencies(&cave.graph)?;
    let engine = SgsEngine::prepare(
        &family,
        &SgsConfig {
            methods: cfg.methods.clone(),
            seed: derive_seed(cfg.seed, STREAM_ENGINE),
            ens: cfg.ens.clone(),
            ln_vx: cfg.ln_vx.clone(),
            k_max: cfg.k_max,
        },
    )?;
    let setup = Setup {
        graph: cave.graph,
        membership: cave.membership,
        engine,
    };
    let rho = setup.engine.strata().len();
    let instances = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_instance(cfg, &setup, t))
        .collect::<Result<Vec<_>>>()?;
    let good: Vec<&Instance> = instances.iter().filter(|i| i.group == Group::Good).collect();
    let bad: Vec<&Instance> = instances.iter().filter(|i| i.group == Group::Bad).collect();
    let mut flags = Vec::new();
    let mut analyses = Vec::new();
    let mut corr = Vec::new();
    let mut trajectories = Vec::new();
    if good.is_empty() || bad.is_empty() {
        flags.push(format!(
            "{} good and {} bad embeddings; good/bad pair analyses, correlations and trajectories skipped",
            good.len(),
            bad.len()
        ));
    } else {
        if good.len() < 2 || bad.len() < 2 {
            flags.push("a group has a single member; its within-group pair family is empty".into());
        }
        analyses = pair_analyses(&good, &bad, rho);
        let members: Vec<&Instance> = good.iter().chain(&bad).copied().collect();
        corr = correlations(&members, rho);
        if corr.iter().any(|c| c.value.is_none()) {
            flags.push("some correlations are undefined (zero variance)".into());
        }
        trajectories.push(trajectory(cfg, &setup, good[0], "good")?);
        trajectories.push(trajectory(cfg, &setup, bad[0], "bad")?);
    }
    Ok(DiagnoseResult {
        eigenvalues: setup.engine.strata().iter().map(|s| s.eigen.values.clone()).collect(),
        instances,
        analyses,
        correlations: corr,
        trajectories,
        flags,
    })
}

fn sorted_points(xs: Vec<f64>) -> Vec<(f64, f64)> {
    let mut xs = xs;
    xs.sort_by(f64::total_cmp);
    let n = xs.len().max(2) - 1;
    xs.into_iter().enumerate().map(|(i, x)| (i as f64 / n as f64, x)).collect()
}

pub fn outputs(cfg: &ExperimentConfig, r: &DiagnoseResult) -> (Report, Artifacts) {
    let mut report = Report::new(cfg);
    report.flags.extend(r.flags.iter().cloned());
    let mut art = Artifacts::default();

    let mut trials = Table::new(&[
        "trial", "init_seed", "ari_init", "ami_init", "ari_final", "ami_final", "tau_init", "tau_final", "group",
    ]);
    for i in &r.instances {
        trials.push(vec![
            i.trial.to_string(),
            i.init_seed.to_string(),
            fmt_f(i.ari_init),
            fmt_f(i.ami_init),
            fmt_f(i.ari_final),
            fmt_f(i.ami_final),
            fmt_f(i.tau_init),
            fmt_f(i.tau_final),
            i.group.name().into(),
        ]);
    }
    art.table("trials", trials);

    let mut spans = Table::new(&["score", "p10", "p90", "span"]);
    let scores: [(&str, fn(&Instance) -> f64); 4] = [
        ("ari_init", |i| i.ari_init),
        ("ami_init", |i| i.ami_init),
        ("ari_final", |i| i.ari_final),
        ("ami_final", |i| i.ami_final),
    ];
    for (name, f) in scores {
        let (lo, hi, span) = r.span(f);
        spans.push(vec![name.into(), fmt_f(lo), fmt_f(hi), fmt_f(span)]);
        report.metric(format!("span/{name}"), span);
    }
    art.table("percentile_spans", spans);
    report.metric("good_count", r.good().len() as f64);
    report.metric("bad_count", r.bad().len() as f64);

    let mut profiles = Table::new(&["trial", "stage", "K", "index", "eigenvalue", "ens", "ens_normalized"]);
    let mut norms = Table::new(&["trial", "stage", "K", "grad_norm", "ens_norm"]);
    for i in &r.instances {
        for (stage, p) in [("init", &i.init), ("final", &i.fin)] {
            for k in 0..p.ens.len() {
                for (idx, (m, mn)) in p.ens[k].iter().zip(&p.ens_normalized[k]).enumerate() {
                    profiles.push(vec![
                        i.trial.to_string(),
                        stage.into(),
                        (k + 1).to_string(),
                        idx.to_string(),
                        fmt_f(r.eigenvalues[k][idx]),
                        fmt_f(*m),
                        fmt_f(*mn),
                    ]);
                }
                norms.push(vec![
                    i.trial.to_string(),
                    stage.into(),
                    (k + 1).to_string(),
                    fmt_f(p.grad_norm[k]),
                    fmt_f(p.ens_norm[k]),
                ]);
            }
        }
    }
    art.table("profiles", profiles);
    art.table("norms", norms);

    let mut fam = header_with_summary(&["analysis", "K", "pairs", "statistic"]);
    let mut wass = Table::new(&["analysis", "K", "statistic", "comparison", "distance"]);
    let mut mmd = Table::new(&["analysis", "K", "max_mean_diff"]);
    for a in &r.analyses {
        for f in &a.families {
            for (stat, xs) in [("mean", &f.means), ("max", &f.maxes)] {
                let vals: Vec<Option<f64>> = xs.iter().map(|x| Some(*x)).collect();
                let mut row = vec![a.name.into(), a.k.to_string(), f.label.into(), stat.into()];
                row.extend(Summary::of(&vals).cells());
                fam.push(row);
            }
        }
        for c in &a.comparisons {
            for (stat, d) in [("mean", c.mean_distance), ("max", c.max_distance)] {
                wass.push(vec![a.name.into(), a.k.to_string(), stat.into(), c.label.clone(), fmt_opt(d)]);
            }
        }
        mmd.push(vec![a.name.into(), a.k.to_string(), fmt_f(a.max_mean_diff)]);
    }
    for name in ["task5_init", "task7_final", "task7_init_final", "task8_final_raw"] {
        for stat in ["mean", "max"] {
            let worst = r
                .analyses
                .iter()
                .filter(|a| a.name == name)
                .flat_map(|a| &a.comparisons)
                .filter_map(|c| if stat == "mean" { c.mean_distance } else { c.max_distance })
                .fold(f64::NAN, f64::max);
            if !worst.is_nan() {
                report.metric(format!("wasserstein_max/{name}/{stat}"), worst);
            }
        }
        let series: Vec<Series> = ["GB-GG", "GB-BB", "GG-BB", "IF-II", "IF-FF", "II-FF"]
            .iter()
            .map(|label| {
                let pts = r
                    .analyses
                    .iter()
                    .filter(|a| a.name == name)
                    .flat_map(|a| a.comparisons.iter().map(move |c| (a.k, c)))
                    .filter(|(_, c)| c.label == *label)
                    .filter_map(|(k, c)| c.mean_distance.map(|d| (k as f64, d)))
                    .collect();
                Series::new(*label, pts)
            })
            .filter(|s| !s.points.is_empty())
            .collect();
        if !series.is_empty() {
            art.plots.push((
                format!("wasserstein_{name}"),
                line_plot(&format!("{name}: Wasserstein of E[dM]"), "K", "distance", &series),
            ));
        }
    }
    if !r.analyses.is_empty() {
        art.table("pair_families", fam);
        art.table("wasserstein", wass);
        art.table("max_mean_diff", mmd);
    }

    if !r.correlations.is_empty() {
        let mut corr = Table::new(&["stage", "K", "score", "quantity", "ppmcc"]);
        for c in &r.correlations {
            corr.push(vec![c.stage.into(), c.k.to_string(), c.score.into(), c.quantity.into(), fmt_opt(c.value)]);
            if let Some(v) = c.value {
                report.metric(format!("ppmcc/{}/K{}/{}/{}", c.stage, c.k, c.score, c.quantity), v);
            }
        }
        art.table("ppmcc", corr);
        let series: Vec<Series> = ["ARI", "AMI"]
            .iter()
            .flat_map(|score| ["grad_norm", "ens_norm"].map(|q| (*score, q)))
            .map(|(score, q)| {
                let pts = r
                    .correlations
                    .iter()
                    .filter(|c| c.stage == "final" && c.score == score && c.quantity == q)
                    .filter_map(|c| c.value.map(|v| (c.k as f64, v)))
                    .collect();
                Series::new(format!("{score}~{q}"), pts)
            })
            .collect();
        art.plots.push(("ppmcc_final".into(), line_plot("PPMCC, final embeddings", "K", "PPMCC", &series)));
    }

    if !r.trajectories.is_empty() {
        let mut traj = Table::new(&["label", "trial", "epoch", "tau", "dtau", "ari", "dari", "ami", "dami"]);
        let mut ens = Table::new(&["label", "epoch", "K", "index", "ens", "dens", "ens_normalized", "dens_normalized"]);
        for t in &r.trajectories {
            for p in &t.points {
                traj.push(vec![
                    t.label.into(),
                    t.trial.to_string(),
                    p.epoch.to_string(),
                    fmt_f(p.tau),
                    fmt_f(p.dtau),
                    fmt_f(p.ari),
                    fmt_f(p.dari),
                    fmt_f(p.ami),
                    fmt_f(p.dami),
                ]);
            }
            for &(epoch, k, i, m, dm, mn, dmn) in &t.ens {
                ens.push(vec![
                    t.label.into(),
                    epoch.to_string(),
                    k.to_string(),
                    i.to_string(),
                    fmt_f(m),
                    fmt_f(dm),
                    fmt_f(mn),
                    fmt_f(dmn),
                ]);
            }
        }
        art.table("trajectory", traj);
        art.table("ens_trajectory", ens);
        let pick = |f: fn(&TrajectoryPoint) -> f64| -> Vec<Series> {
            r.trajectories
                .iter()
                .map(|t| Series::new(t.label, t.points.iter().map(|p| (p.epoch as f64, f(p))).collect()))
                .collect()
        };
        art.plots.push(("trajectory_tau".into(), line_plot("tau", "epoch", "tau", &pick(|p| p.tau))));
        art.plots.push(("trajectory_dtau".into(), line_plot("dtau/dt", "epoch", "dtau/dt", &pick(|p| p.dtau))));
        art.plots.push(("trajectory_ari".into(), line_plot("ARI", "epoch", "ARI", &pick(|p| p.ari))));
    }

    art.plots.push((
        "score_distribution".into(),
        line_plot(
            "ARI and AMI over trials",
            "quantile",
            "score",
            &[
                Series::new("ARI init", sorted_points(r.instances.iter().map(|i| i.ari_init).collect())),
                Series::new("ARI final", sorted_points(r.instances.iter().map(|i| i.ari_final).collect())),
                Series::new("AMI init", sorted_points(r.instances.iter().map(|i| i.ami_init).collect())),
                Series::new("AMI final", sorted_points(r.instances.iter().map(|i| i.ami_final).collect())),
            ],
        ),
    ));
    (report, art)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sgs_core::sgs::LnVxConfig;

    fn small(trials: usize) -> DiagnoseConfig {
        DiagnoseConfig {
            trials,
            epochs: 40,
            trajectory_stride: 10,
            ln_vx: LnVxConfig {
                trials: 1,
                epochs: 20,
                ..LnVxConfig::default()
            },
            ..DiagnoseConfig::default()
        }
    }

    #[test]
    fn pair_families_have_expected_sizes() {
        let a = [0.0, 1.0];
        let b = [1.0, 1.0];
        let c = [0.5, 0.0];
        let xs: Vec<&[f64]> = vec![&a, &b];
        let ys: Vec<&[f64]> = vec![&c];
        let an = analyse("x", 1, ["GB", "GG", "BB"], &xs, &ys);
        assert_eq!(an.families[0].means.len(), 2);
        assert_eq!(an.families[1].means, vec![0.5]);
        assert!(an.families[2].means.is_empty());
        assert_eq!(an.comparisons[0].label, "GB-GG");
        assert!(an.comparisons[1].mean_distance.is_none());
        assert_eq!(an.max_mean_diff, 1.0);
    }

    #[test]
    fn small_run_is_deterministic_and_complete() {
        let cfg = small(12);
        let a = run_diagnose(&cfg).unwrap();
        let b = run_diagnose(&cfg).unwrap();
        assert_eq!(a.instances, b.instances);
        assert_eq!(a.instances.len(), 12);
        let (report, art) = outputs(&ExperimentConfig::Diagnose(cfg), &a);
        assert!(art.get("trials").is_some());
        if a.good().is_empty() || a.bad().is_empty() {
            assert!(!report.flags.is_empty());
        } else {
            assert_eq!(a.trajectories.len(), 2);
            assert_eq!(a.trajectories[0].points.len(), 5);
            assert_eq!(a.analyses.len(), 4 * 6);
        }
    }
}
