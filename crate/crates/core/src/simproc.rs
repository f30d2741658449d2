//! Synthetic processor: turns per-kernel models plus a phase schedule into a
//! deterministic power trace, as a real sampled measurement would look.
//!
//! The simulator walks the schedule phase by phase. Each phase runs one
//! kernel for a number of iterations at a requested grid frequency; the
//! frequency actually granted is the highest grid point at or below the
//! request whose predicted power fits the machine's TDP. Between phases whose
//! requested frequencies differ, the machine sits idle for the switch latency.
//! Power is sampled at a fixed rate with optional Gaussian noise from a
//! seeded generator, so identical inputs always produce byte-identical
//! traces. Markers are stamped with the *requested* frequency — recovering
//! the capped behavior from the trace is the measurement pipeline's job.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MachineSpec, ModelError, ModelParams, PowerModel, SwitchCost};
use crate::rng::DetRng;
use crate::traces::{Channel, Marker, MarkerKind, PowerSample, PowerTrace, TraceError};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("requested frequency {freq} MHz is not on the machine's grid")]
    OffGrid { freq: f64 },
    #[error("phase references kernel {kernel}, which has no model")]
    UnknownKernel { kernel: String },
    #[error("schedule has no phases")]
    EmptyPhases,
    #[error("invalid simulator config: {0}")]
    InvalidConfig(String),
}

/// Simulator knobs; the machine description carries the grid, TDP, and
/// switch latency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub machine: MachineSpec,
    /// Sampling rate in Hz.
    #[serde(rename = "sample_rate_hz")]
    pub sample_rate: f64,
    /// Standard deviation of additive Gaussian sample noise, in watts.
    #[serde(rename = "noise_sigma_w")]
    pub noise_sigma: f64,
    /// Seed for the noise generator.
    pub seed: u64,
    /// Power drawn while idle (during frequency switches), in watts.
    #[serde(rename = "idle_power_w")]
    pub idle_power: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.machine.validate()?;
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(SimError::InvalidConfig("sample_rate_hz must be positive".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(SimError::InvalidConfig("noise_sigma_w must not be negative".into()));
        }
        if !(self.idle_power >= 0.0 && self.idle_power.is_finite()) {
            return Err(SimError::InvalidConfig("idle_power_w must not be negative".into()));
        }
        Ok(())
    }
}

/// One scheduled stretch of work: a kernel repeated at one requested clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub kernel: String,
    #[serde(rename = "freq_mhz")]
    pub freq: f64,
    pub iterations: u64,
}

/// Outcome of resolving a requested frequency against the power budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveFreq {
    /// Grid frequency the machine actually runs at, MHz.
    pub freq: f64,
    /// True when the grant differs from the request (or even the lowest grid
    /// point still exceeds the budget).
    pub capped: bool,
}

fn grid_index(machine: &MachineSpec, requested: f64) -> Option<usize> {
    machine
        .freq_grid
        .iter()
        .position(|&g| (g - requested).abs() <= 1e-9 * g.max(1.0))
}

/// Resolve a requested grid frequency to the one the machine grants: the
/// highest grid point at or below the request whose predicted power fits the
/// TDP, falling back to the lowest grid point when nothing fits.
pub fn effective_frequency(
    machine: &MachineSpec,
    power: &PowerModel,
    requested: f64,
) -> Result<EffectiveFreq, SimError> {
    let idx = grid_index(machine, requested).ok_or(SimError::OffGrid { freq: requested })?;
    for i in (0..=idx).rev() {
        let f = machine.freq_grid[i];
        if power.predict_power(f) <= machine.tdp {
            return Ok(EffectiveFreq { freq: f, capped: i != idx });
        }
    }
    Ok(EffectiveFreq { freq: machine.freq_grid[0], capped: true })
}

/// Schedule sweeping every kernel (name order) across a frequency grid.
pub fn sweep_phases(
    kernels: &BTreeMap<String, ModelParams>,
    grid: &[f64],
    iterations: u64,
) -> Vec<Phase> {
    let mut phases = Vec::with_capacity(kernels.len() * grid.len());
    for kernel in kernels.keys() {
        for &freq in grid {
            phases.push(Phase { kernel: kernel.clone(), freq, iterations });
        }
    }
    phases
}

/// Dead time and energy charged when the clock moves from one frequency to
/// another: `(0, 0)` when they are equal, otherwise the switch cost's
/// latency and energy.
pub fn switch_penalty(from: f64, to: f64, cost: SwitchCost) -> (f64, f64) {
    if from == to {
        (0.0, 0.0)
    } else {
        (cost.latency, cost.energy)
    }
}

/// Run the schedule and return the sampled trace.
pub fn simulate(
    config: &SimConfig,
    kernels: &BTreeMap<String, ModelParams>,
    phases: &[Phase],
) -> Result<PowerTrace, SimError> {
    config.validate()?;
    if phases.is_empty() {
        return Err(SimError::EmptyPhases);
    }
    for params in kernels.values() {
        params.validate()?;
    }

    // Lay phases (and idle gaps at frequency switches) on the time axis.
    // `levels` is a step function: power level from each start time to the
    // next, ending at `total`.
    let mut markers = Vec::with_capacity(phases.len() * 2);
    let mut levels: Vec<(f64, f64)> = Vec::with_capacity(phases.len() * 2);
    let mut t = 0.0_f64;
    let mut prev_freq: Option<f64> = None;
    for phase in phases {
        let params = kernels
            .get(&phase.kernel)
            .ok_or_else(|| SimError::UnknownKernel { kernel: phase.kernel.clone() })?;
        if phase.iterations == 0 {
            return Err(SimError::InvalidConfig(format!(
                "phase for kernel {} has zero iterations",
                phase.kernel
            )));
        }
        let gap = prev_freq
            .map_or(0.0, |f| switch_penalty(f, phase.freq, config.machine.switch_cost).0);
        if gap > 0.0 {
            levels.push((t, config.idle_power));
            t += gap;
        }
        prev_freq = Some(phase.freq);
        let eff = effective_frequency(&config.machine, &params.power, phase.freq)?;
        let duration = phase.iterations as f64 * params.perf.predict_time(eff.freq);
        levels.push((t, params.power.predict_power(eff.freq)));
        markers.push(Marker { t, kernel: phase.kernel.clone(), kind: MarkerKind::Begin, freq: phase.freq });
        t += duration;
        markers.push(Marker { t, kernel: phase.kernel.clone(), kind: MarkerKind::End, freq: phase.freq });
    }
    let total = t;

    // Sample the step function at k / rate up to (and one tick past, when
    // rounding up) the end of the schedule, then add clamped noise.
    let mut rng = DetRng::new(config.seed);
    let n = (total * config.sample_rate).ceil() as u64;
    let mut samples = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let tk = k as f64 / config.sample_rate;
        let i = levels.partition_point(|&(start, _)| start <= tk);
        let level = levels[i.saturating_sub(1)].1;
        let power = if config.noise_sigma > 0.0 {
            (level + config.noise_sigma * rng.standard_normal()).max(0.0)
        } else {
            level
        };
        samples.push(PowerSample { t: tk, channel: Channel::Package, power });
    }

    let mut meta = BTreeMap::new();
    meta.insert("machine".to_string(), config.machine.name.clone());
    Ok(PowerTrace::new(samples, markers, config.sample_rate, meta)?)
}

// ============================================================================
