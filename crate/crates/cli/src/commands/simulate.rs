use std::path::PathBuf;

use clap::Args;
use meetlab::io::{write_batch, Provenance};
use meetlab::montecarlo::{
    compare_to_limit, convergence_sweep, sample_meeting, LimitComparison, SweepReport,
};
use serde::{Deserialize, Serialize};

use super::{emit, out_dir};
use crate::config::{self, overlay};
use crate::error::{invalid, CliError, CliResult};
use crate::source::GraphSource;

const CALIBRATION_NOTE: &str =
    "tolerances are calibration choices; the limit theorems being tested come without convergence rates";

/// Monte Carlo meeting times and comparison with the exponential limit.
#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateArgs {
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
    /// Degree of a fresh random regular graph (or of the sweep).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub graph_seed: Option<u64>,
    /// Samples per graph.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master seed of the sampler.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated ascending graph sizes; runs a convergence sweep.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    /// Fresh graphs per sweep size.
    #[arg(long)]
    pub seeds_per_size: Option<usize>,
    /// Exit with status 1 unless the calibrated checks pass.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub check: Option<bool>,
    /// Relative tolerance on the mean of M/n.
    #[arg(long)]
    pub mean_tol: Option<f64>,
    #[arg(long)]
    pub ks_tol: Option<f64>,
    #[arg(long)]
    pub w1_tol: Option<f64>,
    /// Tolerance on the second-moment ratio.
    #[arg(long)]
    pub moment_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct BatchReport<'a> {
    provenance: Provenance,
    graph_id: &'a str,
    k: usize,
    n: usize,
    count: usize,
    master_seed: u64,
    mean_meeting_time: f64,
    mean_meeting_time_se: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<LimitComparison>,
    note: &'static str,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct SweepOutput {
    provenance: Provenance,
    report: SweepReport,
    note: &'static str,
    failures: Vec<String>,
}

pub fn run(mut args: SimulateArgs) -> CliResult<()> {
    let mut file: SimulateArgs = config::load(args.config.as_deref())?;
    overlay!(
        args,
        file,
        [
            graph,
            torus,
            complete,
            k,
            n,
            graph_seed,
            samples,
            seed,
            sweep,
            seeds_per_size,
            check,
            mean_tol,
            ks_tol,
            w1_tol,
            moment_tol,
            out_dir
        ]
    );
    let samples = *args.samples.get_or_insert(10_000);
    let seed = *args.seed.get_or_insert(0);
    let mean_tol = *args.mean_tol.get_or_insert(0.10);
    let ks_tol = *args.ks_tol.get_or_insert(0.05);
    let w1_tol = *args.w1_tol.get_or_insert(0.08);
    let moment_tol = *args.moment_tol.get_or_insert(0.15);
    for (name, v) in [
        ("mean_tol", mean_tol),
        ("ks_tol", ks_tol),
        ("w1_tol", w1_tol),
        ("moment_tol", moment_tol),
    ] {
        config::check_positive(name, v)?;
    }
    if samples == 0 {
        return Err(invalid("--samples must be at least 1"));
    }
    let check = args.check == Some(true);
    let dir = out_dir(&args.out_dir);

    if let Some(sizes) = args.sweep.clone() {
        let k = args.k.ok_or_else(|| invalid("--sweep needs --k"))?;
        if args.graph.is_some()
            || args.torus.is_some()
            || args.complete.is_some()
            || args.n.is_some()
        {
            return Err(invalid(
                "--sweep generates its own graphs; drop --graph/--torus/--complete/--n",
            ));
        }
        let seeds_per_size = *args.seeds_per_size.get_or_insert(3);
        let provenance = config::provenance(&args);
        let report = convergence_sweep(k, &sizes, seeds_per_size, samples, seed)?;
        let mut failures = Vec::new();
        if check {
            if report.deviation_non_increasing == Some(false) {
                failures.push("deviation from the limit mean increases beyond noise".to_string());
            }
            if report.ks_non_increasing == Some(false) {
                failures.push("KS distance increases beyond noise".to_string());
            }
        }
        for row in &report.rows {
            println!(
                "n={:>6}: mean(M/n) {:.4} +- {:.4}, deviation {:.4}, KS {:.4}",
                row.n, row.mean_est, row.pooled_se, row.deviation, row.ks_distance
            );
        }
        emit(
            Some(&dir.join("sweep.json")),
            &SweepOutput {
                provenance,
                report,
                note: CALIBRATION_NOTE,
                failures: failures.clone(),
            },
        )?;
        return finish(failures);
    }

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
    let batch = sample_meeting(&graph, samples, seed)?;
    write_batch(
        &dir.join("samples.csv"),
        &dir.join("samples.json"),
        &batch,
        Some(&provenance),
    )?;
    eprintln!("wrote {}", dir.join("samples.csv").display());
    let comparison = if graph.k() >= 3 {
        Some(compare_to_limit(&batch)?)
    } else {
        None
    };
    let mut failures = Vec::new();
    if check {
        let Some(c) = &comparison else {
            return Err(invalid("--check needs a graph of degree at least 3"));
        };
        if (c.mean_est / c.limit_mean - 1.0).abs() > mean_tol {
            failures.push(format!(
                "mean(M/n) {:.4} not within {mean_tol} of {:.4}",
                c.mean_est, c.limit_mean
            ));
        }
        if c.ks_distance > ks_tol {
            failures.push(format!("KS distance {:.4} > {ks_tol}", c.ks_distance));
        }
        if c.w1_distance > w1_tol {
            failures.push(format!("W1 distance {:.4} > {w1_tol}", c.w1_distance));
        }
        if (c.moment_ratios[1] - 1.0).abs() > moment_tol {
            failures.push(format!(
                "second-moment ratio {:.4} not within {moment_tol} of 1",
                c.moment_ratios[1]
            ));
        }
    }
    let mean = batch.mean();
    if let Some(c) = &comparison {
        println!(
            "{}: mean(M/n) {:.4} +- {:.4} (limit {:.4}), KS {:.4}, W1 {:.4}",
            graph.id(),
            c.mean_est,
            c.mean_se,
            c.limit_mean,
            c.ks_distance,
            c.w1_distance
        );
    } else {
        println!(
            "{}: mean meeting time {:.4} +- {:.4}",
            graph.id(),
            mean.value,
            mean.se
        );
    }
    emit(
        Some(&dir.join("comparison.json")),
        &BatchReport {
            provenance,
            graph_id: graph.id(),
            k: graph.k(),
            n: graph.n(),
            count: batch.count(),
            master_seed: seed,
            mean_meeting_time: mean.value,
            mean_meeting_time_se: mean.se,
            comparison,
            note: CALIBRATION_NOTE,
            failures: failures.clone(),
        },
    )?;
    finish(failures)
}

fn finish(failures: Vec<String>) -> CliResult<()> {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures.join("; ")))
    }
}
