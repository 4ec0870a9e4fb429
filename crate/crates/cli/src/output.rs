//! Output directories with a manifest of the files written.
//!
//! The manifest records the command, the code version, the hash of the
//! resolved configuration and the SHA-256 of every file. It carries no
//! timestamp, so a rerun reproduces it byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::sha256_hex;
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.txt";

pub struct OutputDir {
    root: PathBuf,
    files: Vec<(String, String)>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)
            .map_err(|e| CliError::config(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Writes `contents` to `name`, a path relative to the root.
    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        self.files.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    pub fn finish(mut self, command: &str, config_hash: &str) -> CliResult<PathBuf> {
        self.files.sort();
        let mut text = format!(
            "command\t{command}\nversion\t{}\nconfig_sha256\t{config_hash}\n",
            env!("CARGO_PKG_VERSION")
        );
        for (name, hash) in &self.files {
            text.push_str(&format!("file\t{name}\t{hash}\n"));
        }
        let path = self.root.join(MANIFEST);
        fs::write(&path, text)?;
        Ok(path)
    }
}
