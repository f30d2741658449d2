//! `sweep`: reduce marked trace CSVs to a per-kernel frequency sweep CSV.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use freqtune::traces::{build_sweep, emit_sweep};

use crate::inputs::load_trace;
use crate::support::{atomic_write, CliError, RunManifest, MANIFEST_KEY};

pub fn run(trace_paths: &[PathBuf], out_path: &Path) -> Result<(), CliError> {
    let mut traces = Vec::with_capacity(trace_paths.len());
    for path in trace_paths {
        traces.push(load_trace(path)?);
    }
    let table = build_sweep(&traces).map_err(|e| CliError::Analysis(e.to_string()))?;

    let manifest = RunManifest::new("sweep").inputs(trace_paths).output(out_path);
    let comments = BTreeMap::from([(MANIFEST_KEY.to_string(), manifest.to_json())]);
    atomic_write(out_path, emit_sweep(&table, &comments).as_bytes())
}
