//! File output: every file is written to a temporary sibling and renamed
//! into place, so readers never see a partial file.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing {}", path.display()))?;
    tmp.write_all(bytes).with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// File stem used as document id and output name.
pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "document".into())
}

/// Output path for each input; two inputs with the same stem, or an output
/// that would replace its own input, are errors.
pub fn output_paths(inputs: &[PathBuf], out: &Path, suffix: &str) -> Result<Vec<PathBuf>> {
    let mut seen: HashMap<String, &Path> = HashMap::new();
    let mut paths = Vec::new();
    for input in inputs {
        let s = stem(input);
        if let Some(other) = seen.insert(s.clone(), input) {
            bail!("{} and {} would write the same output file", other.display(), input.display());
        }
        let target = out.join(format!("{s}{suffix}"));
        let same = match (std::fs::canonicalize(input), std::fs::canonicalize(&target)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        };
        if same {
            bail!("output {} would overwrite its input", target.display());
        }
        paths.push(target);
    }
    Ok(paths)
}
