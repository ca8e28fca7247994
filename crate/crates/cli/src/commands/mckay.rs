use std::path::PathBuf;

use clap::Args;
use meetlab::io::{write_moments_csv, Provenance};
use meetlab::mckay::{limit_mean, moments_quadrature, moments_tree_dp, resolvent_sum, TreeMoments};
use serde::{Deserialize, Serialize};

use super::emit;
use crate::config::{self, overlay};
use crate::error::{invalid, CliError, CliResult};

/// Tree return probabilities by two methods and the resolvent sum.
#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MckayArgs {
    /// JSON file with any of these options; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Degree of the tree.
    #[arg(long)]
    pub k: Option<usize>,
    /// Largest moment order.
    #[arg(long = "L", id = "order")]
    #[serde(rename = "L")]
    pub order: Option<usize>,
    /// Largest acceptable disagreement between the two methods.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Directory for the moments CSV and JSON report.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct ResolventReport {
    exact: f64,
    partial: Vec<f64>,
    tail_bounds: Vec<f64>,
    bracketed: bool,
}

#[derive(Serialize)]
struct MckayReport {
    provenance: Provenance,
    k: usize,
    order: usize,
    limit_mean: f64,
    tree_dp: TreeMoments,
    quadrature: TreeMoments,
    max_difference: f64,
    resolvent: ResolventReport,
    failures: Vec<String>,
}

pub fn run(mut args: MckayArgs) -> CliResult<()> {
    let mut file: MckayArgs = config::load(args.config.as_deref())?;
    overlay!(args, file, [k, order, tol, out_dir]);
    let k = args.k.ok_or_else(|| invalid("--k is required"))?;
    let order = *args.order.get_or_insert(40);
    let tol = *args.tol.get_or_insert(1e-8);
    config::check_positive("tol", tol)?;
    let provenance = config::provenance(&args);

    // the resolvent sum rejects k = 2 as divergent before anything else runs
    let sums = resolvent_sum(k, order)?;
    let dp = moments_tree_dp(k, order)?;
    let quad = moments_quadrature(k, order)?;
    let max_difference = dp
        .moments
        .iter()
        .zip(&quad.moments)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let tail_bounds: Vec<f64> = (0..=order).map(|l| sums.tail_bound(l)).collect();
    let bracketed = sums
        .partial
        .iter()
        .zip(&tail_bounds)
        .all(|(p, t)| *p <= sums.exact && p + t >= sums.exact);

    println!(
        "{:>4} {:>22} {:>22} {:>10}",
        "ell", "tree-dp", "quadrature", "diff"
    );
    for (ell, (a, b)) in dp.moments.iter().zip(&quad.moments).enumerate() {
        println!("{ell:>4} {a:>22.15e} {b:>22.15e} {:>10.2e}", (a - b).abs());
    }
    let last = sums.partial[order];
    println!(
        "resolvent sum: exact (k-1)/(k-2) = {}, partial sum at L={order} = {last:.10}, tail bound {:.3e}",
        sums.exact, tail_bounds[order]
    );

    let mut failures = Vec::new();
    if max_difference > tol {
        failures.push(format!(
            "tree-dp and quadrature differ by {max_difference:.3e} > {tol:e}"
        ));
    }
    if !bracketed {
        failures.push("partial sums do not bracket the exact resolvent sum".to_string());
    }
    let report = MckayReport {
        provenance: provenance.clone(),
        k,
        order,
        limit_mean: limit_mean(k)?,
        tree_dp: dp.clone(),
        quadrature: quad.clone(),
        max_difference,
        resolvent: ResolventReport {
            exact: sums.exact,
            partial: sums.partial.clone(),
            tail_bounds,
            bracketed,
        },
        failures: failures.clone(),
    };
    if let Some(dir) = &args.out_dir {
        let csv = dir.join(format!("moments-k{k}.csv"));
        write_moments_csv(&csv, &[dp, quad], Some(&provenance))?;
        eprintln!("wrote {}", csv.display());
        emit(Some(&dir.join(format!("mckay-k{k}.json"))), &report)?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures.join("; ")))
    }
}
