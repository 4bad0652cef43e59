use std::path::PathBuf;

use serde_json::json;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sgs_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{dir} holds a report for a different configuration (hash {found}); pass --force to overwrite")]
    ReportConflict { dir: PathBuf, found: String },

    #[error("signal has {signal} nodes but the graph has {graph}")]
    NodeCountMismatch { graph: usize, signal: usize },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Core(_) => "computation",
            Self::Io { .. } => "io",
            Self::Parse { .. } => "parse",
            Self::Config(_) => "config",
            Self::ReportConflict { .. } => "report_conflict",
            Self::NodeCountMismatch { .. } => "node_count_mismatch",
        }
    }

    /// Machine-readable form written to stderr by the binary.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "error": { "kind": self.kind(), "message": self.to_string() } });
        if let Self::NodeCountMismatch { graph, signal } = self {
            v["error"]["graph_nodes"] = json!(graph);
            v["error"]["signal_nodes"] = json!(signal);
        }
        v
    }
}
