//! JSON configuration files, flag overlay and provenance.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use meetlab::io::Provenance;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{invalid, CliResult};

/// Read a command configuration; unknown keys are rejected.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))
}

/// Fill every unset flag from the configuration file.
macro_rules! overlay {
    ($flags:expr, $file:expr, [$($field:ident),* $(,)?]) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field.take(); } )*
    };
}
pub(crate) use overlay;

/// SHA-256 of the effective configuration. Output locations are excluded
/// from serialization so that moving outputs does not change the hash.
pub fn hash<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("configuration serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn provenance<T: Serialize>(config: &T) -> Provenance {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Provenance {
        tool: "meetlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: hash(config),
        timestamp: Some(format!("unix:{secs}")),
    }
}

/// Parse `DxM` into a torus dimension and side.
pub fn parse_torus(spec: &str) -> CliResult<(usize, usize)> {
    let err = || invalid(format!("torus must look like DxM (e.g. 3x4), got {spec:?}"));
    let (d, m) = spec.split_once(['x', 'X']).ok_or_else(err)?;
    Ok((
        d.trim().parse().map_err(|_| err())?,
        m.trim().parse().map_err(|_| err())?,
    ))
}

pub fn check_lambdas(lambdas: &[f64]) -> CliResult<()> {
    if lambdas.is_empty() {
        return Err(invalid("at least one lambda is required"));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(invalid(format!(
            "lambda values must be positive and finite, got {l}"
        )));
    }
    Ok(())
}

pub fn check_positive(name: &str, value: f64) -> CliResult<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {value}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_specs() {
        assert_eq!(parse_torus("3x4").unwrap(), (3, 4));
        assert_eq!(parse_torus("2X5").unwrap(), (2, 5));
        assert!(parse_torus("34").is_err());
        assert!(parse_torus("ax4").is_err());
    }

    #[test]
    fn hash_is_stable_hex() {
        let h = hash(&serde_json::json!({"k": 3}));
        assert_eq!(h.len(), 64);
        assert_eq!(h, hash(&serde_json::json!({"k": 3})));
        assert_ne!(h, hash(&serde_json::json!({"k": 4})));
    }
}
