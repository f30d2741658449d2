//! `freqtune`: command-line pipeline from synthetic measurements to
//! frequency plans — simulate traces, run the lattice-Boltzmann workload,
//! reduce traces to sweeps, fit models, plan clocks, and emit plot data.
//!
//! Every command is deterministic given its flags and seed; re-runs produce
//! byte-identical artifacts, each carrying a `manifest` record of how it was
//! made. Exit codes are a stable contract: 0 success, 2 usage or config
//! error, 3 I/O error, 4 analysis error.

mod cmd_fit;
mod cmd_lbm;
mod cmd_plan;
mod cmd_report;
mod cmd_simulate;
mod cmd_sweep;
mod inputs;
mod support;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use freqtune::planner::Objective;

use support::{parse_duration_s, parse_freq_mhz, CliError};

#[derive(Parser)]
#[command(name = "freqtune", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic-processor config JSON into a trace CSV.
    Simulate {
        /// Simulation document: machine, sampling, kernels, phases.
        #[arg(long)]
        config: PathBuf,
        /// Trace CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce marked trace CSVs to a per-kernel frequency sweep CSV.
    Sweep {
        /// Trace CSVs produced by `simulate` (or compatible tools).
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Sweep CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit power (and optionally timing-knee) models to a sweep.
    Fit {
        /// One sweep CSV, or any number of trace CSVs.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Kernel to fit; defaults to the sweep's only kernel.
        #[arg(long)]
        kernel: Option<String>,
        /// Also detect the performance knee and label regimes.
        #[arg(long)]
        knee_scan: bool,
        /// Fit an additive exponential power tail from this frequency up
        /// (MHz, or a MHz/GHz suffix).
        #[arg(long, value_parser = parse_freq_mhz)]
        superlinear_from: Option<f64>,
        /// Fit JSON to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Choose frequencies for a sweep and report savings vs a baseline.
    Plan {
        /// Sweep CSV with one row per kernel and grid frequency.
        sweep: PathBuf,
        /// min-energy, min-time, min-edp, or energy-under-time-cap:<eps>.
        #[arg(long, default_value = "min-energy")]
        objective: String,
        /// Dead time per frequency change (s, or a us/ms/s suffix).
        #[arg(long, default_value = "0s", value_parser = parse_duration_s)]
        switch_latency: f64,
        /// Energy per frequency change in J; default latency x idle power.
        #[arg(long)]
        switch_energy: Option<f64>,
        /// Idle draw in W used to derive the default switch energy.
        #[arg(long, default_value_t = 40.0)]
        idle_power: f64,
        /// Workload iterations the plan is costed over.
        #[arg(long, default_value_t = 1000)]
        iterations: u64,
        /// Baseline fixed frequency (MHz/GHz); default: top of the grid.
        #[arg(long, value_parser = parse_freq_mhz)]
        baseline: Option<f64>,
        /// Comma-separated kernel order of one iteration; default: every
        /// kernel once, in name order.
        #[arg(long)]
        sequence: Option<String>,
        /// Plan JSON to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the lattice-Boltzmann workload; emit markers and counters.
    Lbm {
        /// Lattice width in sites.
        #[arg(long, default_value_t = 128)]
        nx: usize,
        /// Lattice height in sites.
        #[arg(long, default_value_t = 128)]
        ny: usize,
        /// Populations per site; 9 selects the standard D2Q9 stencil.
        #[arg(long, default_value_t = 9)]
        p: usize,
        /// Relaxation rate in [0, 2].
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Propagate+collide iterations to run.
        #[arg(long, default_value_t = 10)]
        iters: u64,
        /// Seed for the initial density field.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write a marker-only trace CSV of the kernel schedule here.
        #[arg(long)]
        emit_markers: Option<PathBuf>,
        /// Start from this saved state instead of a fresh lattice.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Write the final lattice state here, bitwise restorable.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Counters JSON to write (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flatten a sweep into plot-data CSVs (E/T scatter, f·T vs f).
    Report {
        /// Sweep CSV to report on.
        sweep: PathBuf,
        /// Directory receiving et_scatter.csv and ft_vs_f.csv.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out } => cmd_simulate::run(&config, &out),
        Command::Sweep { traces, out } => cmd_sweep::run(&traces, &out),
        Command::Fit { inputs, kernel, knee_scan, superlinear_from, out } => {
            let flags = cmd_fit::FitFlags { kernel, knee_scan, superlinear_from };
            cmd_fit::run(&inputs, &flags, &out)
        }
        Command::Plan {
            sweep,
            objective,
            switch_latency,
            switch_energy,
            idle_power,
            iterations,
            baseline,
            sequence,
            out,
        } => {
            let parsed = Objective::from_str(&objective)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let flags = cmd_plan::PlanFlags {
                objective: parsed,
                objective_text: objective,
                switch_latency,
                switch_energy,
                idle_power,
                iterations,
                baseline,
                sequence,
            };
            cmd_plan::run(&sweep, &flags, &out)
        }
        Command::Lbm { nx, ny, p, omega, iters, seed, emit_markers, resume, checkpoint, out } => {
            let flags = cmd_lbm::LbmFlags {
                nx,
                ny,
                p,
                omega,
                iters,
                seed,
                emit_markers,
                resume,
                checkpoint,
                out,
            };
            cmd_lbm::run(&flags)
        }
        Command::Report { sweep, out_dir } => cmd_report::run(&sweep, &out_dir),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
