use std::path::PathBuf;

use clap::Args;
use meetlab::io::{write_matrix_csv, ExactRecord, Provenance};
use meetlab::meeting::{ExactAnalysis, IdentityResiduals, TreeGapCheck, DEFAULT_CONSTANCY_DEPTH};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::emit;
use crate::config::{self, overlay};
use crate::error::{CliError, CliResult};
use crate::source::GraphSource;

/// Exact meeting-time quantities and identity residuals over a λ grid.
#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactArgs {
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
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// Largest acceptable residual.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Compare with the trace formula (tori and other transitive graphs).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub trace_formula: Option<bool>,
    /// Steps of diagonal constancy required by the trace formula.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Report the gap to the Kesten–McKay tree value at λ/N.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub tree_gap: Option<bool>,
    /// Write the matrix of mean meeting times by starting pair.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub mean_csv: Option<PathBuf>,
    /// Report file; printed to stdout when absent.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ExactReport {
    provenance: Provenance,
    graph_id: String,
    n: usize,
    mean: f64,
    mean_system_residual: f64,
    tolerance: f64,
    records: Vec<ExactRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    tree_gap: Vec<TreeGapCheck>,
    failures: Vec<String>,
}

pub fn run(mut args: ExactArgs) -> CliResult<()> {
    let mut file: ExactArgs = config::load(args.config.as_deref())?;
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
            lambdas,
            tol,
            trace_formula,
            depth,
            tree_gap,
            mean_csv,
            out
        ]
    );
    let source = GraphSource {
        graph: args.graph.clone(),
        torus: args.torus.clone(),
        complete: args.complete,
        k: args.k,
        n: args.n,
        graph_seed: args.graph_seed,
    };
    source.validate()?;
    let lambdas = args
        .lambdas
        .get_or_insert_with(|| vec![0.1, 1.0, 10.0])
        .clone();
    config::check_lambdas(&lambdas)?;
    let tol = *args.tol.get_or_insert(1e-8);
    config::check_positive("tol", tol)?;
    let depth = *args.depth.get_or_insert(DEFAULT_CONSTANCY_DEPTH);
    let trace_formula = args.trace_formula == Some(true);
    let tree_gap = args.tree_gap == Some(true);
    let provenance = config::provenance(&args);

    let graph = source.build()?;
    let analysis = ExactAnalysis::new(&graph.kernel()?)?;
    let mean_solution = analysis.mean()?;
    let mean_matrix = mean_solution
        .mean_matrix
        .as_ref()
        .expect("mean matrix populated");
    let mean = mean_solution.mean.expect("mean populated");
    let mean_system_residual = analysis.product().mean_system_residual(mean_matrix);
    if let Some(path) = &args.mean_csv {
        write_matrix_csv(path, mean_matrix, Some(&provenance))?;
        eprintln!("wrote {}", path.display());
    }

    let records = lambdas
        .par_iter()
        .map(|&lambda| -> CliResult<ExactRecord> {
            let sol = analysis.laplace(lambda)?;
            let place_equation = analysis.place_equation(&sol)?;
            let resolvent_identity = if analysis.kernel().has_uniform_pi() {
                Some(analysis.resolvent_identity(&sol)?)
            } else {
                None
            };
            let trace = if trace_formula {
                Some(analysis.trace_transform(lambda, depth)?)
            } else {
                None
            };
            Ok(ExactRecord {
                graph_id: graph.id().to_string(),
                lambda,
                laplace: sol.laplace.expect("laplace populated"),
                mean,
                residuals: IdentityResiduals {
                    green_identity: analysis.green_identity(&sol)?,
                    resolvent_identity,
                    place_equation: place_equation.equation_residual,
                },
                domination_ok: place_equation.domination_ok,
                trace_formula: trace,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let tree_gap = if tree_gap {
        lambdas
            .iter()
            .map(|&l| analysis.tree_gap(l))
            .collect::<meetlab::Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let mut failures = Vec::new();
    if mean_system_residual > tol {
        failures.push(format!(
            "mean system residual {mean_system_residual:.3e} > {tol:e}"
        ));
    }
    for r in &records {
        let l = r.lambda;
        let mut check = |name: &str, value: f64| {
            if !(value <= tol) {
                failures.push(format!(
                    "{name} at lambda={l}: residual {value:.3e} > {tol:e}"
                ));
            }
        };
        check("green_identity", r.residuals.green_identity);
        if let Some(v) = r.residuals.resolvent_identity {
            check("resolvent_identity", v);
        }
        check("place_equation", r.residuals.place_equation);
        if let Some(t) = r.trace_formula {
            check("trace_formula", (t - r.laplace).abs());
        }
        if !r.domination_ok {
            failures.push(format!(
                "domination at lambda={l}: place transform exceeds the bound"
            ));
        }
    }
    let report = ExactReport {
        provenance,
        graph_id: graph.id().to_string(),
        n: graph.n(),
        mean,
        mean_system_residual,
        tolerance: tol,
        records,
        tree_gap,
        failures: failures.clone(),
    };
    emit(args.out.as_deref(), &report)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures.join("; ")))
    }
}
