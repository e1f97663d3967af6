//! Deterministic CSV emission.
//!
//! Every file starts with a comment line carrying the config digest and seed,
//! then the column header. Floats are printed with 12 significant digits so
//! re-runs can be compared byte for byte and oracle equalities stay visible.

use std::path::Path;

use crate::error::{CliError, Result};

/// 12 significant digits in scientific notation.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// One output CSV accumulated in memory and written in a single syscall.
pub struct OutFile {
    content: String,
}

impl OutFile {
    pub fn new(config_sha256: &str, seed: u64, header: &str) -> Self {
        let mut content = String::new();
        content.push_str(&format!("# config_sha256={config_sha256} seed={seed}\n"));
        content.push_str(header);
        content.push('\n');
        OutFile { content }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.content.push_str(&fields.join(","));
        self.content.push('\n');
    }

    pub fn write(self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| {
                    CliError::model(format!("cannot create {}: {e}", parent.display()))
                })?;
            }
        }
        std::fs::write(path, self.content)
            .map_err(|e| CliError::model(format!("cannot write {}: {e}", path.display())))
    }
}
