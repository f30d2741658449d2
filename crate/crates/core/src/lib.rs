//! Toolkit for measuring and planning the energy/performance trade-off of
//! multi-kernel workloads under processor frequency scaling.
//!
//! The crate is organized as a small pipeline. Timestamped power traces with
//! kernel markers ([`traces`]) reduce to per-kernel sweep tables; sweep tables
//! fit analytic power and timing models ([`model`], [`fitting`]); models and
//! tables feed a frequency planner ([`planner`]). A synthetic processor
//! ([`simproc`]) and a miniature lattice-Boltzmann workload ([`lbm`]) provide
//! deterministic ground truth at desk scale, and [`replay`] bundles a
//! reference accelerator profile used by the demo configs and the validation
//! suite.
//!
//! Units are uniform across the crate: frequencies in MHz, times in seconds,
//! powers in watts, energies in joules. Unit conversions (GHz, ms, ...)
//! happen at the CLI boundary, never inside the library.

pub mod fitting;
pub mod lbm;
pub mod model;
pub mod planner;
pub mod replay;
pub mod rng;
pub mod simproc;
pub mod traces;

pub use model::{
    KernelSpec, MachineSpec, ModelParams, PerfModel, PowerModel, Regime, Superlinear, SwitchCost,
};
pub use planner::{FrequencyPlan, Objective, Policy, SavingsReport};
pub use traces::{Channel, Marker, MarkerKind, PowerSample, PowerTrace, SweepPoint, SweepTable};
