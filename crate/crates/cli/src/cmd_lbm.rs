//! `lbm`: run the miniature lattice-Boltzmann workload, emitting kernel
//! markers, a counters JSON, and an optional bitwise checkpoint.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde_json::json;

use freqtune::lbm::{KernelCounts, Lattice, LbmError};
use freqtune::traces::{emit_trace, Marker, MarkerKind, PowerTrace};

use crate::support::{atomic_write, read_bytes, CliError, RunManifest, MANIFEST_KEY};

pub struct LbmFlags {
    pub nx: usize,
    pub ny: usize,
    pub p: usize,
    pub omega: f64,
    pub iters: u64,
    pub seed: u64,
    pub emit_markers: Option<PathBuf>,
    pub resume: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Relative density drift beyond which the conservation self-check fails.
const DRIFT_LIMIT: f64 = 1e-9;

fn fresh_lattice(flags: &LbmFlags) -> Result<Lattice, CliError> {
    let build = if flags.p == 9 {
        Lattice::d2q9(flags.nx, flags.ny, flags.omega, flags.seed)
    } else {
        Lattice::synthetic(flags.nx, flags.ny, flags.p, flags.omega, flags.seed)
    };
    build.map_err(|e| CliError::Config(e.to_string()))
}

/// Start from the resume state when given, else from the flags. Checkpoints
/// are only ever written, so identical invocations stay byte-identical.
fn load_lattice(flags: &LbmFlags) -> Result<Lattice, CliError> {
    match &flags.resume {
        Some(path) => Lattice::from_bytes(&read_bytes(path)?).map_err(|e| match e {
            LbmError::BadCheckpoint(_) => CliError::Analysis(e.to_string()),
            other => CliError::Config(other.to_string()),
        }),
        None => fresh_lattice(flags),
    }
}

fn counts_json(c: KernelCounts) -> serde_json::Value {
    json!({ "ops": c.ops, "bytes": c.bytes, "intensity": c.intensity() })
}

pub fn run(flags: &LbmFlags) -> Result<(), CliError> {
    if flags.nx == 0 || flags.ny == 0 || flags.p == 0 {
        return Err(CliError::Config("lattice dimensions must be positive".into()));
    }
    let mut lattice = load_lattice(flags)?;
    let mass_before = lattice.total_mass();

    // Step manually so each kernel invocation gets a marker pair on a
    // virtual one-second-per-kernel clock.
    let mut markers = Vec::with_capacity(2 * flags.iters as usize * 2);
    let stamp = |markers: &mut Vec<Marker>, kernel: &str, t: f64| {
        markers.push(Marker { t, kernel: kernel.into(), kind: MarkerKind::Begin, freq: 0.0 });
        markers.push(Marker { t: t + 1.0, kernel: kernel.into(), kind: MarkerKind::End, freq: 0.0 });
    };
    for i in 0..flags.iters {
        stamp(&mut markers, "propagate", 2.0 * i as f64);
        lattice.propagate();
        stamp(&mut markers, "collide", 2.0 * i as f64 + 1.0);
        lattice.collide();
    }

    let mass_after = lattice.total_mass();
    let drift = ((mass_after - mass_before) / mass_before).abs();
    if !(drift <= DRIFT_LIMIT) {
        return Err(CliError::Analysis(format!(
            "density drifted by {drift:.3e} (limit {DRIFT_LIMIT:.0e})"
        )));
    }

    let mut manifest = RunManifest::new("lbm").seed(flags.seed);
    if let Some(path) = &flags.resume {
        manifest = manifest.input(path);
    }
    if let Some(path) = &flags.emit_markers {
        manifest = manifest.output(path);
    }
    if let Some(path) = &flags.checkpoint {
        manifest = manifest.output(path);
    }
    if let Some(path) = &flags.out {
        manifest = manifest.output(path);
    }

    if let Some(path) = &flags.emit_markers {
        let meta = BTreeMap::from([(MANIFEST_KEY.to_string(), manifest.to_json())]);
        let trace = PowerTrace::new(Vec::new(), markers, 1.0, meta)
            .map_err(|e| CliError::Analysis(e.to_string()))?;
        atomic_write(path, emit_trace(&trace).as_bytes())?;
    }
    if let Some(path) = &flags.checkpoint {
        atomic_write(path, &lattice.to_bytes())?;
    }

    let counters = json!({
        "manifest": serde_json::to_value(&manifest).expect("manifest serializes"),
        "nx": lattice.nx(),
        "ny": lattice.ny(),
        "p": lattice.p(),
        "omega": lattice.omega(),
        "seed": lattice.seed(),
        "iterations": flags.iters,
        "pad_reps": lattice.pad_reps(),
        "kernels": {
            "propagate": counts_json(lattice.propagate_counts()),
            "collide": counts_json(lattice.collide_counts()),
        },
        "density": { "initial": mass_before, "final": mass_after, "rel_drift": drift },
    });
    let mut text = serde_json::to_string_pretty(&counters).expect("counters serialize");
    text.push('\n');
    match &flags.out {
        Some(path) => atomic_write(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}
