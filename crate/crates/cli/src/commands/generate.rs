use std::path::PathBuf;

use clap::Args;
use meetlab::graph::DEFAULT_MAX_ATTEMPTS;
use meetlab::graph::{
    count_cycles, gap_check, sample_regular_with_budget, CycleCensus, GapReport,
    DEFAULT_GAP_THRESHOLD,
};
use meetlab::io::{save_graph, GraphMetadata, Provenance};
use serde::{Deserialize, Serialize};

use super::{emit, out_dir};
use crate::config::{self, overlay};
use crate::error::{invalid, CliError, CliResult};

/// Sample a random regular graph and report its gap and cycle census.
#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateArgs {
    /// JSON file with any of these options; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Degree.
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of vertices.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Count cycles up to this length (at most 8).
    #[arg(long)]
    pub census: Option<usize>,
    /// Spectral gap threshold.
    #[arg(long)]
    pub g0: Option<f64>,
    /// Pairing attempts before giving up.
    #[arg(long)]
    pub max_attempts: Option<usize>,
    /// Exit with status 1 unless the gap report passes.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub require_gap: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct GenerateReport {
    provenance: Provenance,
    graph: GraphMetadata,
    connected: bool,
    gap: GapReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    census: Option<CycleCensus>,
}

pub fn run(mut args: GenerateArgs) -> CliResult<()> {
    let mut file: GenerateArgs = config::load(args.config.as_deref())?;
    overlay!(
        args,
        file,
        [k, n, seed, census, g0, max_attempts, require_gap, out_dir]
    );
    let k = args.k.ok_or_else(|| invalid("--k is required"))?;
    let n = args.n.ok_or_else(|| invalid("--n is required"))?;
    if k * n % 2 == 1 {
        return Err(invalid(format!("k*n must be even, got k={k}, n={n}")));
    }
    args.seed.get_or_insert(0);
    args.g0.get_or_insert(DEFAULT_GAP_THRESHOLD);
    args.max_attempts.get_or_insert(DEFAULT_MAX_ATTEMPTS);
    let g0 = args.g0.unwrap_or_default();
    if !(0.0..1.0).contains(&g0) {
        return Err(invalid(format!("g0 must lie in [0, 1), got {g0}")));
    }
    if let Some(r) = args.census {
        if r < 3 {
            return Err(invalid(format!("census depth must be at least 3, got {r}")));
        }
    }
    let provenance = config::provenance(&args);

    let graph = sample_regular_with_budget(
        n,
        k,
        args.seed.unwrap_or_default(),
        args.max_attempts.unwrap_or_default(),
    )?;
    let gap = gap_check(&graph, g0);
    let census = args.census.map(|r| count_cycles(&graph, r)).transpose()?;
    let dir = out_dir(&args.out_dir);
    let stem = graph.id().to_string();
    let meta_path = save_graph(&dir, &stem, &graph, Some(&provenance))?;
    eprintln!("wrote {}", meta_path.display());
    let report = GenerateReport {
        provenance,
        graph: meetlab::io::read_json(&meta_path)?,
        connected: graph.is_connected(),
        gap,
        census,
    };
    emit(Some(&dir.join(format!("{stem}.report.json"))), &report)?;
    println!(
        "{}: lambda2 {:.6}, lambda_min {:.6}, gap report {}",
        stem,
        report.gap.lambda2,
        report.gap.lambda_min,
        if report.gap.passes { "passes" } else { "fails" }
    );
    if args.require_gap == Some(true) && !report.gap.passes {
        return Err(CliError::Assertion(format!(
            "spectral gap below {g0} for {stem}"
        )));
    }
    Ok(())
}
