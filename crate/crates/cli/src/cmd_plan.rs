//! `plan`: choose per-kernel frequencies for a measured sweep and report
//! savings against a fixed-frequency baseline.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use freqtune::model::SwitchCost;
use freqtune::planner::{self, FrequencyPlan, Objective, SavingsReport, Workload};
use freqtune::traces::SweepTable;

use crate::inputs::load_sweep;
use crate::support::{atomic_write, CliError, RunManifest};

pub struct PlanFlags {
    pub objective: Objective,
    pub objective_text: String,
    pub switch_latency: f64,
    pub switch_energy: Option<f64>,
    pub idle_power: f64,
    pub iterations: u64,
    pub baseline: Option<f64>,
    pub sequence: Option<String>,
}

/// One iteration's kernel order: the flag's comma list, or every kernel in
/// the sweep in name order.
fn sequence(table: &SweepTable, flag: &Option<String>) -> Vec<String> {
    match flag {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => table.kernels.keys().cloned().collect(),
    }
}

/// Default baseline: the top frequency of the (shared) grid.
fn top_frequency(table: &SweepTable) -> Result<f64, CliError> {
    table
        .kernels
        .values()
        .next()
        .and_then(|rows| rows.last())
        .map(|row| row.freq)
        .ok_or_else(|| CliError::Analysis("empty sweep".into()))
}

#[derive(Serialize)]
struct PlanDoc {
    manifest: Value,
    objective: String,
    plan: FrequencyPlan,
    baseline: FrequencyPlan,
    report: SavingsReport,
}

pub fn run(sweep_path: &Path, flags: &PlanFlags, out_path: &Path) -> Result<(), CliError> {
    let table = load_sweep(sweep_path)?;
    let cost = SwitchCost::new(
        flags.switch_latency,
        flags.switch_energy.unwrap_or(flags.switch_latency * flags.idle_power),
    )
    .map_err(|e| CliError::Config(format!("bad switch cost: {e}")))?;
    let workload = Workload {
        sequence: sequence(&table, &flags.sequence),
        iterations: flags.iterations,
    };

    let plan = planner::plan(&workload, &table, cost, flags.objective)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    let baseline_freq = match flags.baseline {
        Some(f) => f,
        None => top_frequency(&table)?,
    };
    let baseline = planner::plan_fixed(&workload, &table, cost, baseline_freq)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    let report =
        planner::savings(&plan, &baseline).map_err(|e| CliError::Analysis(e.to_string()))?;

    let manifest = RunManifest::new("plan").input(sweep_path).output(out_path);
    let doc = PlanDoc {
        manifest: serde_json::to_value(&manifest).expect("manifest serializes"),
        objective: flags.objective_text.clone(),
        plan,
        baseline,
        report,
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("plan document serializes");
    json.push('\n');
    atomic_write(out_path, json.as_bytes())
}

// ============================================================================
