use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use shobdosetu_core::metrics::{parse_rttm, Annotation};

use crate::error::{CliError, CliResult};

/// `path` itself, or the files directly inside it with extension `ext`, sorted.
pub fn files_with_ext(path: &Path, ext: &str) -> CliResult<Vec<PathBuf>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case(ext)))
            .collect();
        files.sort();
        Ok(files)
    } else if path.is_file() {
        Ok(vec![path.to_path_buf()])
    } else {
        Err(CliError::input(format!("{} does not exist", path.display())))
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::input(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

/// Annotations from an RTTM file or a directory of `.rttm` files, keyed by
/// uri. Segments for one uri spread over several files are combined.
pub fn load_rttm(path: &Path) -> CliResult<BTreeMap<String, Annotation>> {
    let mut out: BTreeMap<String, Annotation> = BTreeMap::new();
    for file in files_with_ext(path, "rttm")? {
        let anns = parse_rttm(&read_text(&file)?).map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
        for a in anns {
            out.entry(a.uri.clone())
                .or_insert_with(|| Annotation::new(a.uri.clone(), vec![]))
                .segments
                .extend(a.segments);
        }
    }
    Ok(out)
}

/// Writes a report as pretty JSON to `out`, or to standard output.
pub fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(CliError::input)? + "\n";
    match out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
