use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Writes output files into one directory, each starting with a provenance
/// comment line.
pub struct OutputDir {
    dir: PathBuf,
    provenance: String,
}

impl OutputDir {
    pub fn create(dir: &Path, config: &RunConfig, command: &str) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let provenance =
            format!("# henon {} command={command} config_sha256={}", env!("CARGO_PKG_VERSION"), config.hash());
        Ok(Self { dir: dir.to_path_buf(), provenance })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Creates `name`, writes the provenance line, then lets `body` fill it.
    pub fn write(
        &self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> Result<(), Box<dyn std::error::Error>>,
    ) -> CliResult<PathBuf> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e: std::io::Error| CliError::io(&path, e);
        writeln!(out, "{}", self.provenance).map_err(io)?;
        body(&mut out).map_err(|e| CliError::io(&path, std::io::Error::other(e.to_string())))?;
        out.flush().map_err(io)?;
        Ok(path)
    }

    /// Two whitespace-separated columns for plotting.
    pub fn write_columns(&self, name: &str, labels: (&str, &str), rows: &[(f64, f64)]) -> CliResult<PathBuf> {
        self.write(name, |out| {
            writeln!(out, "# {} {}", labels.0, labels.1)?;
            for (x, y) in rows {
                writeln!(out, "{x} {y}")?;
            }
            Ok(())
        })
    }
}
