//! `simulate`: synthetic-processor config JSON in, deterministic trace CSV
//! out.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use freqtune::model::{MachineSpec, ModelParams};
use freqtune::simproc::{self, Phase, SimConfig, SimError};
use freqtune::traces::emit_trace;

use crate::support::{atomic_write, read_to_string, CliError, RunManifest, MANIFEST_KEY};

/// On-disk simulation document: the machine, the sampling setup, per-kernel
/// models, and the phase schedule.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimDoc {
    machine: MachineSpec,
    sample_rate_hz: f64,
    noise_sigma_w: f64,
    seed: u64,
    idle_power_w: f64,
    kernels: BTreeMap<String, ModelParams>,
    phases: Vec<Phase>,
}

/// Parse failures name the offending key path (e.g. `phases[0].freq_mhz`).
fn parse_doc(text: &str, path: &Path) -> Result<SimDoc, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        CliError::Config(format!("{}: key `{}`: {}", path.display(), e.path(), e.inner()))
    })
}

fn classify(err: SimError) -> CliError {
    match err {
        // A config that passed parsing can still be semantically broken; only
        // trace assembly failures count as analysis errors.
        SimError::Trace(e) => CliError::Analysis(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

pub fn run(config_path: &Path, out_path: &Path) -> Result<(), CliError> {
    let doc = parse_doc(&read_to_string(config_path)?, config_path)?;
    let config = SimConfig {
        machine: doc.machine,
        sample_rate: doc.sample_rate_hz,
        noise_sigma: doc.noise_sigma_w,
        seed: doc.seed,
        idle_power: doc.idle_power_w,
    };
    let mut trace = simproc::simulate(&config, &doc.kernels, &doc.phases).map_err(classify)?;

    let manifest = RunManifest::new("simulate")
        .config(config_path)
        .output(out_path)
        .seed(doc.seed);
    trace.meta.insert(MANIFEST_KEY.to_string(), manifest.to_json());
    atomic_write(out_path, emit_trace(&trace).as_bytes())
}

// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_name_the_offending_key() {
        let err = parse_doc(r#"{"machine": {"name": 3}}"#, Path::new("sim.json")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("machine.name"), "{err}");
    }

    #[test]
    fn unknown_top_level_keys_are_rejected_by_name() {
        let err = parse_doc(r#"{"machinery": {}}"#, Path::new("sim.json")).unwrap_err();
        assert!(err.to_string().contains("machinery"), "{err}");
    }
}
