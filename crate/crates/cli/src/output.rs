//! Number formatting and file output. Files are written atomically
//! (temporary file in the same directory, then rename), so a crashed run
//! never leaves a truncated result behind.

use std::path::{Path, PathBuf};

use crate::CliError;

/// Format with a fixed number of significant digits; plain decimal notation
/// in a readable exponent window, scientific outside it.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..sig as i32).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", sig - 1, x)
    }
}

/// Default significant digits for table output; the paper-style switch
/// reduces this to the precision of the published tables.
pub const DEFAULT_SIG: usize = 12;
pub const PAPER_SIG: usize = 7;

pub fn sig_for(paper_style: bool) -> usize {
    if paper_style {
        PAPER_SIG
    } else {
        DEFAULT_SIG
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp: PathBuf = {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".tmp");
        path.with_file_name(name)
    };
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Io(format!("cannot move result into {}: {e}", path.display())))?;
    Ok(())
}

/// Write to the file when given, otherwise to stdout.
pub fn deliver(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
