use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{Error, Result};

/// Writes every file to a temporary sibling first and renames them into
/// place only after all writes succeeded, so a failure leaves no partial
/// outputs behind.
pub fn write_all_atomic(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let mut tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
        tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
        tmp.flush().map_err(|e| Error::io(tmp.path(), e))?;
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, dest) in staged {
        tmp.persist(&dest).map_err(|e| Error::io(&dest, e.error))?;
        written.push(dest);
    }
    Ok(written)
}

pub fn to_pretty_json<T: serde::Serialize>(value: &T, what: &str) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::json(what, e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested");
        let paths = write_all_atomic(&out, &[("a.txt", b"one".to_vec()), ("b.txt", b"two".to_vec())]).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(std::fs::read_to_string(out.join("b.txt")).unwrap(), "two");
        // no temporaries left behind
        assert_eq!(std::fs::read_dir(&out).unwrap().count(), 2);
    }
}
