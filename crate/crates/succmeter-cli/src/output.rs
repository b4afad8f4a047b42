//! Output-file handling: provenance comments and atomic writes.

use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// The provenance comment carried by every CSV: tool version and config hash.
pub fn provenance(config_hash: &str) -> Vec<String> {
    vec![format!(
        "succmeter {} config=sha256:{config_hash}",
        env!("CARGO_PKG_VERSION")
    )]
}

/// Write atomically: to a temporary file in the same directory, then rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, &path)
        .map_err(|e| CliError::Io(format!("cannot rename to {}: {e}", path.display())))?;
    Ok(path)
}

/// Serialize a JSON value with a trailing newline.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("JSON serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}
