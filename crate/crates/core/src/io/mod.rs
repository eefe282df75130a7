//! File formats: meshes, scene descriptions, CSV tables, SVG plots.

pub mod csv;
pub mod mesh;
pub mod scene;
pub mod svg;

use std::io::Write as _;
use std::path::Path;

use crate::error::IoError;

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe partial content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| IoError::Io(e.error))?;
    Ok(())
}
