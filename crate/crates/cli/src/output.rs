use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Output directory; every file is written whole by a single writer.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|source| CliError::Write {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(OutDir {
            root: root.to_path_buf(),
        })
    }

    pub fn subdir(&self, name: &str) -> Result<OutDir, CliError> {
        OutDir::create(&self.root.join(name))
    }

    pub fn write(
        &self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        let wrap = |source| CliError::Write {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(wrap)?);
        body(&mut w).map_err(wrap)?;
        w.flush().map_err(wrap)?;
        Ok(path)
    }

    pub fn write_str(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        self.write(name, |w| w.write_all(text.as_bytes()))
    }
}
