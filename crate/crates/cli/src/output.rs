//! Output directory handling and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowTiming {
    pub eps: f64,
    pub wall_seconds: f64,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseTiming {
    pub case: String,
    pub wall_seconds: f64,
    pub rows: Vec<RowTiming>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    pub files: Vec<FileEntry>,
    pub cases: Vec<CaseTiming>,
    pub errors: Vec<String>,
    pub wall_seconds: f64,
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

/// Output directory that records every file written through it.
pub struct OutDir {
    pub root: PathBuf,
    pub files: Vec<FileEntry>,
}

impl OutDir {
    /// Creates the directory if needed and checks that it is writable.
    pub fn prepare(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        let probe = root.join(".koiter-write-probe");
        fs::write(&probe, b"")?;
        fs::remove_file(&probe)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, data: &[u8]) -> std::io::Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, data)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: data.len() as u64,
            sha256: sha256_hex(data),
        });
        Ok(path)
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(self, mut manifest: Manifest) -> std::io::Result<PathBuf> {
        manifest.files = self.files;
        let text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        let path = self.root.join("manifest.json");
        fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_abc() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn missing_directory_is_created() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("a/b");
        let mut out = OutDir::prepare(&root).unwrap();
        out.write("x.txt", b"hi").unwrap();
        assert!(root.join("x.txt").exists());
        assert_eq!(out.files.len(), 1);
    }
}
