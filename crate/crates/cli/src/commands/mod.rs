pub mod exact;
pub mod generate;
pub mod mckay;
pub mod simulate;
pub mod spectrum;

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;

/// Write a JSON report, or print it when no path is given.
pub fn emit<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    match path {
        Some(p) => {
            meetlab::io::write_json(p, value)?;
            eprintln!("wrote {}", p.display());
        }
        None => println!("{}", serde_json::to_string_pretty(value)?),
    }
    Ok(())
}

pub fn out_dir(dir: &Option<PathBuf>) -> PathBuf {
    dir.clone().unwrap_or_else(|| PathBuf::from("."))
}
