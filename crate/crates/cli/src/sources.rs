//! Graph and signal arguments: generator shorthands or JSON documents.

use std::path::Path;

use sgs_core::generators::{gen_caveman_variant, gen_erm, gen_sbm};
use sgs_core::signal::{make_signal, SignalDocument, SignalKind};
use sgs_core::{Graph, GraphDocument, GraphSignal};

use crate::error::{CliError, Result};

/// A graph plus its planted communities when known.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub membership: Option<Vec<usize>>,
}

fn bad_spec(spec: &str, why: &str) -> CliError {
    CliError::Config(format!("graph {spec:?}: {why}"))
}

fn field<T: std::str::FromStr>(spec: &str, s: &str, name: &str) -> Result<T> {
    s.parse().map_err(|_| bad_spec(spec, &format!("cannot read {name} from {s:?}")))
}

/// `caveman`, `erm:N:P:SEED`, `sbm:N:SEED`, or a path to a graph document.
pub fn load_graph(spec: &str) -> Result<LoadedGraph> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[..] {
        ["caveman"] => {
            let p = gen_caveman_variant();
            Ok(LoadedGraph {
                graph: p.graph,
                membership: Some(p.membership),
            })
        }
        ["erm", n, p, seed] => Ok(LoadedGraph {
            graph: gen_erm(field(spec, n, "N")?, field(spec, p, "P")?, field(spec, seed, "SEED")?)?,
            membership: None,
        }),
        ["sbm", n, seed] => {
            let p = gen_sbm(field(spec, n, "N")?, field(spec, seed, "SEED")?)?;
            Ok(LoadedGraph {
                graph: p.graph,
                membership: Some(p.membership),
            })
        }
        ["erm", ..] => Err(bad_spec(spec, "expected erm:N:P:SEED")),
        ["sbm", ..] => Err(bad_spec(spec, "expected sbm:N:SEED")),
        _ => load_graph_file(Path::new(spec)),
    }
}

pub fn load_graph_file(path: &Path) -> Result<LoadedGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: GraphDocument = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let parse_err = |e: sgs_core::Error| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    Ok(LoadedGraph {
        graph: doc.to_graph().map_err(parse_err)?,
        membership: doc.community_labels().map_err(parse_err)?,
    })
}

/// `random`, `pulse`, `task3_init`, or a path to a signal document.
pub fn load_signal(spec: &str, g: &Graph, dim: usize, seed: u64) -> Result<GraphSignal> {
    let signal = match spec.parse::<SignalKind>() {
        Ok(kind) => make_signal(kind, g, dim, seed)?,
        Err(_) => {
            let path = Path::new(spec);
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let doc: SignalDocument = serde_json::from_str(&text).map_err(|e| CliError::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            doc.to_signal().map_err(|e| CliError::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
        }
    };
    if signal.num_nodes() != g.num_nodes() {
        return Err(CliError::NodeCountMismatch {
            graph: g.num_nodes(),
            signal: signal.num_nodes(),
        });
    }
    Ok(signal)
}
