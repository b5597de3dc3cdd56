//! On-disk memo of exported coverings, one JSON file per (set, level).

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::render;
use crate::tbound::CoveringRecord;

pub const ENV_VAR: &str = "CERTOSET_CACHE_DIR";

pub struct CoveringCache {
    dir: PathBuf,
}

impl CoveringCache {
    /// The cache named by `CERTOSET_CACHE_DIR`, if set and nonempty.
    pub fn from_env() -> Option<Self> {
        let dir = std::env::var_os(ENV_VAR).filter(|d| !d.is_empty())?;
        Some(CoveringCache { dir: dir.into() })
    }

    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CoveringCache { dir: dir.into() }
    }

    /// `key` identifies the set and the export precision.
    pub fn path(&self, key: &str, level: u32) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        let hex: String = digest.iter().take(16).map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{hex}-L{level}.json"))
    }

    /// A stored record; unreadable or mismatched files count as misses.
    pub fn load(&self, key: &str, level: u32) -> Option<CoveringRecord> {
        let text = std::fs::read_to_string(self.path(key, level)).ok()?;
        render::from_json(&text).ok().filter(|r| r.level == level)
    }

    pub fn store(&self, key: &str, rec: &CoveringRecord) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        write_atomic(&self.path(key, rec.level), render::to_json(rec).as_bytes())
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
