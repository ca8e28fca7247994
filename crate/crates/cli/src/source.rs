//! Graph selection shared by several commands.

use std::path::PathBuf;

use meetlab::graph::{build_torus, sample_regular, RegularGraph};
use meetlab::io::load_graph;

use crate::config::parse_torus;
use crate::error::{invalid, CliResult};

/// Exactly one of: a saved graph, a torus, a complete graph, or a random
/// regular graph given by `k`, `n` and a seed.
#[derive(Debug, Clone, Default)]
pub struct GraphSource {
    pub graph: Option<PathBuf>,
    pub torus: Option<String>,
    pub complete: Option<usize>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub graph_seed: Option<u64>,
}

impl GraphSource {
    pub fn validate(&self) -> CliResult<()> {
        let random = self.k.is_some() || self.n.is_some();
        let chosen = [
            self.graph.is_some(),
            self.torus.is_some(),
            self.complete.is_some(),
            random,
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if chosen != 1 {
            return Err(invalid(
                "choose exactly one of --graph, --torus, --complete or --k/--n",
            ));
        }
        if random && (self.k.is_none() || self.n.is_none()) {
            return Err(invalid("a random graph needs both --k and --n"));
        }
        if let Some(t) = &self.torus {
            parse_torus(t)?;
        }
        Ok(())
    }

    pub fn build(&self) -> CliResult<RegularGraph> {
        self.validate()?;
        if let Some(path) = &self.graph {
            return Ok(load_graph(path)?);
        }
        if let Some(t) = &self.torus {
            let (d, m) = parse_torus(t)?;
            return Ok(build_torus(d, m)?);
        }
        if let Some(n) = self.complete {
            return Ok(RegularGraph::complete(n)?);
        }
        let (k, n) = (self.k.expect("validated"), self.n.expect("validated"));
        Ok(sample_regular(n, k, self.graph_seed.unwrap_or(0))?)
    }
}
