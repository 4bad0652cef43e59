use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sgs_core::sgs::LnVxConfig;
use sgs_core::{EnsSchedule, SgsConfig};
use sgs_cli::config::{parse_methods, CompareConfig, DiagnoseConfig, ExperimentConfig, LowPassConfig, Overrides};
use sgs_cli::output::{emit, guard_output_dir};
use sgs_cli::sources::{load_graph, load_signal};
use sgs_cli::tasks::{compare, diagnose, inspect, lowpass};
use sgs_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "sgs", version, about = "Stratified graph spectra of vector-valued graph signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the strata of a graph and their Laplacian eigensystems.
    Stratify {
        /// `caveman`, `erm:N:P:SEED`, `sbm:N:SEED` or a graph JSON file.
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "sgs-out")]
        out: PathBuf,
    },
    /// Magnitudes of every eigencomponent on every stratum for a signal.
    Spectrum(SpectrumArgs),
    /// SGS methods against the GFT on random graphs.
    Task1(TaskArgs),
    /// Pairwise agreement between SGS methods on random graphs.
    Task2(TaskArgs),
    /// Regularized low-pass filtering on the Caveman variant.
    Task3(TaskArgs),
    /// Over-smoothing diagnostics over repeated embedding trainings.
    Diagnose(TaskArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Comma-separated, e.g. `ADJ-DIFF,LN-VX,ENS`.
    #[arg(long)]
    methods: Option<String>,
    /// ENS weights `apprx,adj,in,ln`, `;`-separated per K, or `task3`.
    #[arg(long)]
    weights: Option<String>,
    /// Learned transforms averaged by LN-VX.
    #[arg(long)]
    ln_vx_trials: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    plots: bool,
    #[arg(long, default_value = "sgs-out")]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    graph: String,
    /// `random`, `pulse`, `task3_init` or a signal JSON file.
    #[arg(long)]
    signal: String,
    /// Second signal overlaid as the final state.
    #[arg(long)]
    final_signal: Option<String>,
    /// Dimension of generated signals.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TaskArgs {
    /// Experiment configuration JSON; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Restore the original trial counts (100 graphs, 500 embeddings).
    #[arg(long)]
    full_scale: bool,
    /// Overwrite a directory holding a report for another configuration.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    common: Common,
}

fn methods(c: &Common) -> Result<Option<Vec<sgs_core::Method>>> {
    c.methods.as_deref().map(parse_methods).transpose()
}

fn weights(c: &Common) -> Result<Option<EnsSchedule>> {
    Ok(c.weights.as_deref().map(str::parse).transpose()?)
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run_spectrum(a: SpectrumArgs) -> Result<()> {
    let c = &a.common;
    let seed = c.seed.unwrap_or(0);
    let g = load_graph(&a.graph)?.graph;
    let s = load_signal(&a.signal, &g, a.dim, seed)?;
    let f = a
        .final_signal
        .as_deref()
        .map(|spec| load_signal(spec, &g, a.dim, seed.wrapping_add(1)))
        .transpose()?;
    let mut cfg = SgsConfig {
        seed,
        k_max: c.k_max,
        ..SgsConfig::default()
    };
    if let Some(m) = methods(c)? {
        cfg.methods = m;
    }
    if let Some(w) = weights(c)? {
        cfg.ens = w;
    }
    if let Some(t) = c.ln_vx_trials {
        cfg.ln_vx = LnVxConfig {
            trials: t,
            ..cfg.ln_vx
        };
    }
    let art = inspect::spectrum(&g, &s, f.as_ref(), &cfg)?;
    print_written(&emit(&c.out, None, &art, c.plots)?);
    Ok(())
}

fn run_task(default: ExperimentConfig, a: TaskArgs) -> Result<()> {
    let c = &a.common;
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => default,
    };
    Overrides {
        seed: c.seed,
        trials: a.trials,
        k_max: c.k_max,
        methods: methods(c)?,
        ens: weights(c)?,
        ln_vx_trials: c.ln_vx_trials,
        full_scale: a.full_scale,
    }
    .apply(&mut cfg)?;
    cfg.validate()?;
    guard_output_dir(&c.out, &cfg.hash(), a.force)?;
    let (mut report, art) = match &cfg {
        ExperimentConfig::Task1(x) | ExperimentConfig::Task2(x) => compare::outputs(&cfg, &compare::run_compare(x)?),
        ExperimentConfig::Task3(x) => lowpass::outputs(&cfg, &lowpass::run_lowpass(x)?),
        ExperimentConfig::Diagnose(x) => diagnose::outputs(&cfg, &diagnose::run_diagnose(x)?),
    };
    print_written(&emit(&c.out, Some(&mut report), &art, c.plots)?);
    Ok(())
}

fn check_task(expected: &str, a: &TaskArgs) -> Result<()> {
    if let Some(path) = &a.config {
        let cfg = ExperimentConfig::load(path)?;
        if cfg.task_name() != expected {
            return Err(CliError::Config(format!(
                "{} holds a {} configuration, not {expected}",
                Path::new(path).display(),
                cfg.task_name()
            )));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stratify { graph, out } => {
            let g = load_graph(&graph)?.graph;
            print_written(&emit(&out, None, &inspect::stratify(&g)?, false)?);
            Ok(())
        }
        Command::Spectrum(a) => run_spectrum(a),
        Command::Task1(a) => {
            check_task("task1", &a)?;
            run_task(ExperimentConfig::Task1(CompareConfig::default()), a)
        }
        Command::Task2(a) => {
            check_task("task2", &a)?;
            run_task(ExperimentConfig::Task2(CompareConfig::default()), a)
        }
        Command::Task3(a) => {
            check_task("task3", &a)?;
            run_task(ExperimentConfig::Task3(LowPassConfig::default()), a)
        }
        Command::Diagnose(a) => {
            check_task("diagnose", &a)?;
            run_task(ExperimentConfig::Diagnose(DiagnoseConfig::default()), a)
        }
    }
}

fn fail(v: serde_json::Value, code: u8) -> ExitCode {
    eprintln!("{v}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            return fail(
                serde_json::json!({ "error": { "kind": "usage", "message": message.trim() } }),
                2,
            );
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.to_json(), 1),
    }
}
