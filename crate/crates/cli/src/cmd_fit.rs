//! `fit`: recover power/timing model parameters from a sweep (or traces),
//! writing a fit JSON document.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use freqtune::fitting::{
    fit_knee, fit_power_linear, fit_power_superlinear, regime_profile, FitResult,
};
use freqtune::model::{PerfModel, PowerModel, Regime};
use freqtune::traces::SweepTable;

use crate::inputs::load_table;
use crate::support::{atomic_write, CliError, RunManifest};

pub struct FitFlags {
    pub kernel: Option<String>,
    pub knee_scan: bool,
    pub superlinear_from: Option<f64>,
}

/// The kernel to fit: the flag when given, otherwise the table's only kernel.
fn pick_kernel(table: &SweepTable, flag: &Option<String>) -> Result<String, CliError> {
    if let Some(kernel) = flag {
        if table.get(kernel).is_none() {
            return Err(CliError::Analysis(format!("kernel {kernel:?} not in the sweep")));
        }
        return Ok(kernel.clone());
    }
    let mut names = table.kernels.keys();
    match (names.next(), names.next()) {
        (Some(only), None) => Ok(only.clone()),
        _ => Err(CliError::Config(
            "sweep holds several kernels; pick one with --kernel".into(),
        )),
    }
}

#[derive(Serialize)]
struct KneeReport {
    #[serde(flatten)]
    fit: FitResult<PerfModel>,
    knee_mhz: f64,
    regimes: Vec<RegimeRow>,
}

#[derive(Serialize)]
struct RegimeRow {
    freq_mhz: f64,
    regime: Regime,
}

#[derive(Serialize)]
struct FitDoc {
    manifest: Value,
    kernel: String,
    power: FitResult<PowerModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    knee: Option<KneeReport>,
}

pub fn run(input_paths: &[PathBuf], flags: &FitFlags, out_path: &Path) -> Result<(), CliError> {
    let table = load_table(input_paths)?;
    let kernel = pick_kernel(&table, &flags.kernel)?;
    let rows = table.get(&kernel).expect("picked kernel exists");

    let power_points: Vec<(f64, f64)> = rows.iter().map(|r| (r.freq, r.p_avg)).collect();
    // With a tail the affine part must come from the tail-free points below
    // the threshold; fitting it across all points would absorb some of the
    // tail and leave negative residuals where the tail starts.
    let power = match flags.superlinear_from {
        Some(from) => {
            let below: Vec<(f64, f64)> = power_points.iter().filter(|p| p.0 < from).copied().collect();
            let linear = fit_power_linear(&below).map_err(|e| CliError::Analysis(e.to_string()))?;
            fit_power_superlinear(&power_points, &linear.params, from)
                .map_err(|e| CliError::Analysis(e.to_string()))?
        }
        None => fit_power_linear(&power_points).map_err(|e| CliError::Analysis(e.to_string()))?,
    };

    let knee = if flags.knee_scan {
        let time_points: Vec<(f64, f64)> = rows.iter().map(|r| (r.freq, r.t_s)).collect();
        let fit = fit_knee(&time_points).map_err(|e| CliError::Analysis(e.to_string()))?;
        let regimes = regime_profile(&time_points)
            .map_err(|e| CliError::Analysis(e.to_string()))?
            .into_iter()
            .map(|(freq_mhz, regime)| RegimeRow { freq_mhz, regime })
            .collect();
        Some(KneeReport { knee_mhz: fit.params.crossover_frequency(), fit, regimes })
    } else {
        None
    };

    let manifest = RunManifest::new("fit").inputs(input_paths).output(out_path);
    let doc = FitDoc {
        manifest: serde_json::to_value(&manifest).expect("manifest serializes"),
        kernel,
        power,
        knee,
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("fit document serializes");
    json.push('\n');
    atomic_write(out_path, json.as_bytes())
}
