//! Input loading shared by the analysis commands: header sniffing plus
//! parse-error mapping (malformed data exits 4, unreadable files exit 3).

use std::path::{Path, PathBuf};

use freqtune::traces::{self, SweepTable, SWEEP_HEADER, TRACE_HEADER};

use crate::support::CliError;

/// First non-comment, non-empty line, which is the format header.
fn sniff(text: &str) -> Option<&str> {
    text.lines().find(|l| !l.starts_with('#') && !l.is_empty())
}

pub fn load_sweep(path: &Path) -> Result<SweepTable, CliError> {
    let text = crate::support::read_to_string(path)?;
    traces::parse_sweep(&text)
        .map_err(|e| CliError::Analysis(format!("{}: {e}", path.display())))
}

pub fn load_trace(path: &Path) -> Result<freqtune::PowerTrace, CliError> {
    let text = crate::support::read_to_string(path)?;
    traces::parse_trace(&text)
        .map_err(|e| CliError::Analysis(format!("{}: {e}", path.display())))
}

/// Load either one sweep CSV or any number of trace CSVs (reduced with
/// [`traces::build_sweep`]), telling them apart by header.
pub fn load_table(paths: &[PathBuf]) -> Result<SweepTable, CliError> {
    let mut texts = Vec::with_capacity(paths.len());
    for path in paths {
        texts.push(crate::support::read_to_string(path)?);
    }
    let sweeps = texts.iter().filter(|t| sniff(t) == Some(SWEEP_HEADER)).count();
    if sweeps == 1 && paths.len() == 1 {
        return traces::parse_sweep(&texts[0])
            .map_err(|e| CliError::Analysis(format!("{}: {e}", paths[0].display())));
    }
    if sweeps > 0 {
        return Err(CliError::Config(
            "pass either a single sweep CSV or trace CSVs, not a mix".into(),
        ));
    }
    let mut parsed = Vec::with_capacity(texts.len());
    for (path, text) in paths.iter().zip(&texts) {
        if sniff(text) != Some(TRACE_HEADER) {
            return Err(CliError::Analysis(format!(
                "{}: unrecognized header; expected a trace or sweep CSV",
                path.display()
            )));
        }
        parsed.push(
            traces::parse_trace(text)
                .map_err(|e| CliError::Analysis(format!("{}: {e}", path.display())))?,
        );
    }
    traces::build_sweep(&parsed).map_err(|e| CliError::Analysis(e.to_string()))
}

// ============================================================================
