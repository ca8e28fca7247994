use std::path::PathBuf;

use clap::Args;
use meetlab::chain::eigendecompose;
use meetlab::io::{Provenance, SpectrumRecord};
use serde::{Deserialize, Serialize};

use super::emit;
use crate::config::{self, overlay};
use crate::error::CliResult;
use crate::source::GraphSource;

/// Dump the eigenvalues of the walk kernel, in descending order.
#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumArgs {
    /// JSON file with any of these options; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Graph metadata file written by `generate`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Discrete torus `DxM`.
    #[arg(long)]
    pub torus: Option<String>,
    /// Complete graph on this many vertices.
    #[arg(long)]
    pub complete: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub graph_seed: Option<u64>,
    /// Output file; printed to stdout when absent.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SpectrumOutput {
    graph_id: String,
    #[serde(flatten)]
    spectrum: SpectrumRecord,
    provenance: Provenance,
}

pub fn run(mut args: SpectrumArgs) -> CliResult<()> {
    let mut file: SpectrumArgs = config::load(args.config.as_deref())?;
    overlay!(args, file, [graph, torus, complete, k, n, graph_seed, out]);
    let source = GraphSource {
        graph: args.graph.clone(),
        torus: args.torus.clone(),
        complete: args.complete,
        k: args.k,
        n: args.n,
        graph_seed: args.graph_seed,
    };
    source.validate()?;
    let provenance = config::provenance(&args);
    let graph = source.build()?;
    let spec = eigendecompose(&graph.kernel()?)?;
    emit(
        args.out.as_deref(),
        &SpectrumOutput {
            graph_id: graph.id().to_string(),
            spectrum: SpectrumRecord::from_decomposition(&spec),
            provenance,
        },
    )
}
