use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use walkdir::WalkDir;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramFile {
    /// Path relative to the corpus root, `/`-separated.
    pub path: String,
    pub abs_path: PathBuf,
    pub provenance: Option<String>,
}

impl ProgramFile {
    /// Reads the program text; notebooks become their concatenated code cells.
    pub fn load(&self) -> std::result::Result<String, String> {
        let text = std::fs::read_to_string(&self.abs_path).map_err(|e| format!("cannot read: {e}"))?;
        if self.path.ends_with(".ipynb") {
            notebook_source(&text)
        } else {
            Ok(text)
        }
    }
}

/// Client programs to mine, in a stable order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub root: PathBuf,
    pub files: Vec<ProgramFile>,
}

impl Corpus {
    /// Every `*.py` and `*.ipynb` file under `root`, sorted by path.
    pub fn discover(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        check_root(&root)?;
        let mut files = Vec::new();
        for entry in WalkDir::new(&root).sort_by_file_name() {
            let entry = entry.map_err(|e| {
                let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| root.clone());
                Error::io(path, e.into())
            })?;
            let ext = entry.path().extension().and_then(|e| e.to_str());
            if !entry.file_type().is_file() || !matches!(ext, Some("py" | "ipynb")) {
                continue;
            }
            let rel = entry.path().strip_prefix(&root).expect("walkdir yields children of root");
            files.push(ProgramFile {
                path: rel.to_string_lossy().replace('\\', "/"),
                abs_path: entry.path().to_path_buf(),
                provenance: None,
            });
        }
        files.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(Self { root, files })
    }

    /// Only the files listed in `entries`; every one must exist under `root`.
    pub fn from_manifest(root: impl Into<PathBuf>, entries: Vec<ManifestEntry>) -> Result<Self> {
        let root = root.into();
        check_root(&root)?;
        let mut files = Vec::with_capacity(entries.len());
        for entry in entries {
            let rel = Path::new(&entry.path);
            if rel.is_absolute() || rel.components().any(|c| matches!(c, std::path::Component::ParentDir)) {
                return Err(Error::Corpus(format!("manifest path `{}` escapes the corpus root", entry.path)));
            }
            let abs_path = root.join(rel);
            if !abs_path.is_file() {
                return Err(Error::Corpus(format!("manifest path `{}` does not exist under the root", entry.path)));
            }
            files.push(ProgramFile { path: entry.path, abs_path, provenance: entry.provenance });
        }
        files.sort_by(|a, b| a.path.cmp(&b.path));
        files.dedup_by(|a, b| a.path == b.path);
        Ok(Self { root, files })
    }

    /// Reads a manifest file: `{"files": [{"path", "provenance"}]}` or a bare list.
    pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Manifest {
            Wrapped { files: Vec<ManifestEntry> },
            Bare(Vec<ManifestEntry>),
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|source| Error::Json { what: "manifest".into(), source })?;
        Ok(match manifest {
            Manifest::Wrapped { files } | Manifest::Bare(files) => files,
        })
    }
}

fn check_root(root: &Path) -> Result<()> {
    if root.is_dir() {
        Ok(())
    } else {
        Err(Error::io(root, std::io::Error::new(std::io::ErrorKind::NotFound, "corpus root is not a directory")))
    }
}

/// Concatenates the code cells of a notebook in order. IPython magics and
/// shell escapes are commented out so the result parses as Python.
pub fn notebook_source(json: &str) -> std::result::Result<String, String> {
    let value: Value = serde_json::from_str(json).map_err(|e| format!("malformed notebook: {e}"))?;
    let cells = value
        .get("cells")
        .and_then(Value::as_array)
        .ok_or_else(|| "malformed notebook: no `cells` array".to_string())?;
    let mut out = String::new();
    for cell in cells {
        if cell.get("cell_type").and_then(Value::as_str) != Some("code") {
            continue;
        }
        let source = match cell.get("source") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Array(lines)) => lines.iter().filter_map(Value::as_str).collect(),
            _ => String::new(),
        };
        for line in source.lines() {
            let trimmed = line.trim_start();
            if trimmed.starts_with('%') || trimmed.starts_with('!') {
                out.push_str("# ");
            }
            out.push_str(line);
            out.push('\n');
        }
    }
    Ok(out)
}
