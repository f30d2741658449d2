//! `report`: flatten a sweep into plot-ready CSVs — the energy-vs-time
//! scatter and the frequency-time product curve. Values are copied or
//! multiplied, never smoothed.

use std::fmt::Write as _;
use std::path::Path;

use freqtune::traces::SweepTable;

use crate::inputs::load_sweep;
use crate::support::{atomic_write, CliError, RunManifest, MANIFEST_KEY};

pub const ET_SCATTER: &str = "et_scatter.csv";
pub const FT_VS_F: &str = "ft_vs_f.csv";

fn render(table: &SweepTable, manifest: &str, header: &str, row: impl Fn(&str, &freqtune::SweepPoint) -> String) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {MANIFEST_KEY}={manifest}");
    out.push_str(header);
    out.push('\n');
    for (kernel, rows) in &table.kernels {
        for r in rows {
            out.push_str(&row(kernel, r));
            out.push('\n');
        }
    }
    out
}

pub fn run(sweep_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let table = load_sweep(sweep_path)?;
    if table.kernels.is_empty() {
        return Err(CliError::Analysis("empty sweep: nothing to report".into()));
    }
    let scatter_path = out_dir.join(ET_SCATTER);
    let ft_path = out_dir.join(FT_VS_F);
    let manifest = RunManifest::new("report")
        .input(sweep_path)
        .output(&scatter_path)
        .output(&ft_path)
        .to_json();

    let scatter = render(&table, &manifest, "kernel,freq_mhz,t_s,e_s", |k, r| {
        format!("{k},{},{},{}", r.freq, r.t_s, r.e_s)
    });
    let ft = render(&table, &manifest, "kernel,freq_mhz,f_times_t", |k, r| {
        format!("{k},{},{}", r.freq, r.freq * r.t_s)
    });
    atomic_write(&scatter_path, scatter.as_bytes())?;
    atomic_write(&ft_path, ft.as_bytes())
}
