//! File formats.
//!
//! * Matrices: headerless row-major CSV, or a JSON envelope
//!   `{"n": …, "entries": [[…]]}`.
//! * Spectra: JSON `{"eigenvalues": […]}`.
//! * Graphs: an edge list with one `u v` pair per line (0-indexed) next to a
//!   JSON metadata file `{n, k, seed, id, edges}`.
//! * Moment tables: CSV with columns `ell,value,method`.
//! * Sample batches: one meeting time per line, with a JSON sidecar.
//!
//! CSV and edge-list writers accept an optional provenance block that is
//! emitted as `#` comment lines; every reader here skips such lines.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::chain::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::mckay::TreeMoments;
use crate::montecarlo::SampleBatch;

/// Origin of an output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the effective configuration.
    pub config_hash: String,
    /// Wall-clock time; kept out of every hashed or byte-compared file.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<String>,
}

impl Provenance {
    /// Comment lines for CSV-like outputs, without the timestamp so that
    /// reruns produce identical files.
    pub fn comment_lines(&self) -> Vec<String> {
        vec![
            format!("# {} {}", self.tool, self.version),
            format!("# config-sha256 {}", self.config_hash),
        ]
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_comments(out: &mut impl Write, provenance: Option<&Provenance>) -> Result<()> {
    if let Some(p) = provenance {
        for line in p.comment_lines() {
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("malformed CSV: {other:?}")),
    }
}

fn csv_reader(path: &Path, headers: bool) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_error)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn write_matrix_csv(
    path: &Path,
    matrix: &DMatrix<f64>,
    provenance: Option<&Provenance>,
) -> Result<()> {
    let mut out = create(path)?;
    write_comments(&mut out, provenance)?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for row in matrix.row_iter() {
        writer
            .write_record(row.iter().map(|v| v.to_string()))
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in csv_reader(path, false)?.records() {
        let record = record.map_err(csv_error)?;
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("not a number: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    matrix_from_rows(rows)
}

fn matrix_from_rows(rows: Vec<Vec<f64>>) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::invalid("ragged matrix rows"));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.into_iter().flatten(),
    ))
}

/// JSON envelope for a square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEnvelope {
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
}

impl MatrixEnvelope {
    pub fn from_matrix(matrix: &DMatrix<f64>) -> Self {
        Self {
            n: matrix.nrows(),
            entries: matrix
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::invalid(format!(
                "envelope entries are not {0}x{0}",
                self.n
            )));
        }
        matrix_from_rows(self.entries.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub eigenvalues: Vec<f64>,
}

impl SpectrumRecord {
    pub fn from_decomposition(spec: &SpectralDecomposition) -> Self {
        Self {
            eigenvalues: spec.eigenvalues().iter().copied().collect(),
        }
    }
}

/// JSON metadata stored next to an edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMetadata {
    pub n: usize,
    pub k: usize,
    pub seed: Option<u64>,
    pub id: String,
    /// Edge-list file, relative to the metadata file.
    pub edges: String,
}

pub fn write_edge_list(
    path: &Path,
    graph: &RegularGraph,
    provenance: Option<&Provenance>,
) -> Result<()> {
    let mut out = create(path)?;
    write_comments(&mut out, provenance)?;
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_edge_list(path: &Path) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (lineno, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace().map(str::parse::<usize>);
        match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
            _ => {
                return Err(Error::invalid(format!(
                    "{}:{}: expected `u v`, got {line:?}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(edges)
}

/// Write `<stem>.edges` and `<stem>.json`; returns the metadata path.
pub fn save_graph(
    dir: &Path,
    stem: &str,
    graph: &RegularGraph,
    provenance: Option<&Provenance>,
) -> Result<PathBuf> {
    let edges_name = format!("{stem}.edges");
    write_edge_list(&dir.join(&edges_name), graph, provenance)?;
    let meta = GraphMetadata {
        n: graph.n(),
        k: graph.k(),
        seed: graph.seed(),
        id: graph.id().to_string(),
        edges: edges_name,
    };
    let meta_path = dir.join(format!("{stem}.json"));
    write_json(&meta_path, &meta)?;
    Ok(meta_path)
}

/// Load a graph from its metadata file, checking the recorded `n` and `k`.
pub fn load_graph(meta_path: &Path) -> Result<RegularGraph> {
    let meta: GraphMetadata = read_json(meta_path)?;
    let dir = meta_path.parent().unwrap_or_else(|| Path::new("."));
    let edges = read_edge_list(&dir.join(&meta.edges))?;
    let mut graph = RegularGraph::from_edges(meta.n, &edges, meta.id.clone())?;
    if graph.k() != meta.k {
        return Err(Error::invalid(format!(
            "edge list has degree {} but metadata says {}",
            graph.k(),
            meta.k
        )));
    }
    if let Some(seed) = meta.seed {
        graph = graph.with_seed(seed);
    }
    Ok(graph)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MomentRow {
    ell: usize,
    value: f64,
    method: String,
}

pub fn write_moments_csv(
    path: &Path,
    tables: &[TreeMoments],
    provenance: Option<&Provenance>,
) -> Result<()> {
    let mut out = create(path)?;
    write_comments(&mut out, provenance)?;
    let mut writer = csv::Writer::from_writer(out);
    for table in tables {
        for (ell, &value) in table.moments.iter().enumerate() {
            writer
                .serialize(MomentRow {
                    ell,
                    value,
                    method: table.method.as_str().to_string(),
                })
                .map_err(csv_error)?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// JSON sidecar of a sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSidecar {
    pub graph_id: String,
    pub k: usize,
    pub n: usize,
    pub master_seed: u64,
    pub count: usize,
    pub seed_rule: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
}

/// Write the samples (one per line) and the sidecar next to it.
pub fn write_batch(
    csv_path: &Path,
    sidecar_path: &Path,
    batch: &SampleBatch,
    provenance: Option<&Provenance>,
) -> Result<()> {
    let mut out = create(csv_path)?;
    write_comments(
        &mut out,
        provenance
            .map(|p| Provenance {
                timestamp: None,
                ..p.clone()
            })
            .as_ref(),
    )?;
    for m in &batch.samples {
        writeln!(out, "{m}")?;
    }
    out.flush()?;
    write_json(
        sidecar_path,
        &BatchSidecar {
            graph_id: batch.graph_id.clone(),
            k: batch.k,
            n: batch.n,
            master_seed: batch.master_seed,
            count: batch.count(),
            seed_rule: batch.seed_rule.clone(),
            provenance: provenance.cloned(),
        },
    )
}

pub fn read_batch(csv_path: &Path, sidecar_path: &Path) -> Result<SampleBatch> {
    let sidecar: BatchSidecar = read_json(sidecar_path)?;
    let mut samples = Vec::with_capacity(sidecar.count);
    for line in BufReader::new(File::open(csv_path)?).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        samples.push(
            line.parse::<f64>()
                .map_err(|_| Error::invalid(format!("not a number: {line:?}")))?,
        );
    }
    if samples.len() != sidecar.count {
        return Err(Error::invalid(format!(
            "sidecar says {} samples but the file has {}",
            sidecar.count,
            samples.len()
        )));
    }
    Ok(SampleBatch {
        graph_id: sidecar.graph_id,
        k: sidecar.k,
        n: sidecar.n,
        master_seed: sidecar.master_seed,
        seed_rule: sidecar.seed_rule,
        samples,
    })
}

/// Exact-analysis residuals at one `λ`, as exported by the runner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRecord {
    pub graph_id: String,
    pub lambda: f64,
    pub laplace: f64,
    pub mean: f64,
    pub residuals: crate::meeting::IdentityResiduals,
    pub domination_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace_formula: Option<f64>,
}
