use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// Writes `contents` to `dir/file` through a temporary file in the same
/// directory, so readers never observe a partial report.
pub fn write_atomic(dir: &Path, file: &str, contents: &str) -> Result<(), CliError> {
    let target = dir.join(file);
    let fail = |source| CliError::Write {
        path: target.clone(),
        source,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(&target).map_err(|e| fail(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replaces_existing_file() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.json", "old").unwrap();
        write_atomic(dir.path(), "a.json", "new").unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("a.json")).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
