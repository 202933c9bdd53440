use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const MANIFEST: &str = "manifest.json";

/// Fixed four decimals; non-finite values become `NA`.
pub fn f4(v: f64) -> String {
    if !v.is_finite() {
        return "NA".into();
    }
    let s = format!("{v:.4}");
    if s == "-0.0000" { "0.0000".into() } else { s }
}

pub fn f4_opt(v: Option<f64>) -> String {
    v.map(f4).unwrap_or_else(|| "NA".into())
}

/// Writes run artifacts under one directory and keeps its manifest current.
pub struct Output {
    pub dir: PathBuf,
    pub seed: u64,
}

impl Output {
    pub fn new(dir: &Path, seed: u64) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Output { dir: dir.to_path_buf(), seed })
    }

    pub fn header_line(&self) -> String {
        format!("# wavepanel {VERSION} seed={}", self.seed)
    }

    /// CSV text with the provenance comment line first.
    pub fn csv_string(&self, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
        Ok(format!("{}\n{body}", self.header_line()))
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let text = self.csv_string(header, rows)?;
        self.file(name, &text)
    }

    /// Writes `rel` (which may contain subdirectories) under the output directory.
    pub fn file(&self, rel: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    /// Hashes every file under the output directory into `manifest.json`.
    pub fn write_manifest(&self) -> Result<()> {
        let mut files = Vec::new();
        collect(&self.dir, &self.dir, &mut files)?;
        files.sort_by(|a, b| a.path.cmp(&b.path));
        let m = Manifest { version: VERSION, seed: self.seed, files };
        let text = serde_json::to_string_pretty(&m)? + "\n";
        fs::write(self.dir.join(MANIFEST), text).context("cannot write manifest.json")?;
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest {
    version: &'static str,
    seed: u64,
    files: Vec<Entry>,
}

#[derive(Serialize)]
struct Entry {
    path: String,
    sha256: String,
    bytes: u64,
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<Entry>) -> Result<()> {
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            collect(root, &path, out)?;
            continue;
        }
        let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
        if rel == MANIFEST {
            continue;
        }
        let bytes = fs::read(&path).with_context(|| format!("cannot read {}", path.display()))?;
        out.push(Entry {
            path: rel,
            sha256: format!("{:x}", Sha256::digest(&bytes)),
            bytes: bytes.len() as u64,
        });
    }
    Ok(())
}
