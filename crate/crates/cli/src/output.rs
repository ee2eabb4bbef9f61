//! Output files are rendered in memory first and written only after every
//! computation has succeeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Metadata stamped on every CSV.
pub struct Header {
    pub line: String,
}

impl Header {
    pub fn new(config: &str, seed: Option<u64>) -> Self {
        let digest = Sha256::digest(config.as_bytes());
        let hash: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        let mut line = format!("nmrq {} config={hash}", env!("CARGO_PKG_VERSION"));
        if let Some(s) = seed {
            let _ = write!(line, " seed={s}");
        }
        Header { line }
    }
}

/// Builds a CSV with the header comment, a column line and rows.
pub fn csv(header: &Header, columns: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("# {}\n{columns}\n", header.line);
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

/// Writes every file under a temporary name, then renames them into place.
/// On error the temporaries are removed and no final file is created.
pub fn write_all(dir: &Path, files: &[OutputFile]) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(files.len());
    let result = (|| {
        for f in files {
            let tmp = dir.join(format!(".{}.partial", f.name));
            std::fs::write(&tmp, &f.contents)?;
            staged.push((tmp, dir.join(&f.name)));
        }
        for (tmp, path) in &staged {
            std::fs::rename(tmp, path)?;
        }
        Ok(staged.iter().map(|(_, p)| p.clone()).collect())
    })();
    if result.is_err() {
        for (tmp, _) in &staged {
            let _ = std::fs::remove_file(tmp);
        }
    }
    result
}
