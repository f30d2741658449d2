//! Chooses clock frequencies for a multi-kernel workload from measured (or
//! modeled) sweep tables, trading energy against time and accounting for
//! frequency-switch overhead.
//!
//! A workload is a cyclic sequence of kernel executions repeated for a number
//! of iterations. All kernels must share one frequency grid; the planner
//! assigns each kernel one grid frequency and predicts the total time and
//! energy, charging the machine's switch cost once per change of frequency
//! along the cyclic sequence (steady-state accounting, wrap-around included).
//! Candidate assignments are ranked under the chosen objective; ties resolve
//! toward uniform (single frequency) assignments and lower frequencies, so
//! results are fully deterministic. Small search spaces are enumerated
//! exhaustively; large ones fall back to uniform assignments plus the
//! independent per-kernel optimum.
//!
//! Single-kernel questions are served by [`select_frequency`] (best row under
//! an objective) and [`pareto`] (the non-dominated time/energy rows).

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::SwitchCost;
use crate::traces::{SweepPoint, SweepTable};

/// Above this many candidate assignments the planner stops enumerating
/// exhaustively.
const EXHAUSTIVE_LIMIT: usize = 4096;
/// Candidate counts at or above this evaluate in parallel (when enabled).
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 256;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PlanError {
    #[error("workload references kernel {kernel}, which has no sweep rows")]
    UnknownKernel { kernel: String },
    #[error("kernel {kernel} is swept on a different frequency grid than {reference}")]
    MisalignedGrids { kernel: String, reference: String },
    #[error("no sweep row for kernel {kernel} at {freq} MHz")]
    MissingFrequency { kernel: String, freq: f64 },
    #[error("no frequency assigned to kernel {kernel}")]
    MissingAssignment { kernel: String },
    #[error("workload must name at least one kernel and one iteration")]
    EmptyWorkload,
    #[error("cannot select a frequency from an empty sweep")]
    EmptySweep,
    #[error("baseline predicts non-positive time or energy; savings are undefined")]
    ZeroBaseline,
    #[error("invalid objective: {0}")]
    InvalidObjective(String),
}

/// What the plan should minimize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Least total energy.
    MinEnergy,
    /// Least total time.
    MinTime,
    /// Least energy-delay product.
    MinEdp,
    /// Least energy among candidates no slower than `(1 + epsilon)` times the
    /// fastest candidate. `epsilon = 0` selects the fastest candidate,
    /// breaking time ties by energy.
    EnergyUnderTimeCap { epsilon: f64 },
}

impl FromStr for Objective {
    type Err = PlanError;

    /// Parses `min-energy`, `min-time`, `min-edp`, or
    /// `energy-under-time-cap:<epsilon>`.
    fn from_str(s: &str) -> Result<Objective, PlanError> {
        if let Some(eps) = s.strip_prefix("energy-under-time-cap:") {
            let epsilon: f64 = eps
                .parse()
                .map_err(|_| PlanError::InvalidObjective(format!("bad epsilon in {s:?}")))?;
            let obj = Objective::EnergyUnderTimeCap { epsilon };
            check_objective(obj)?;
            return Ok(obj);
        }
        match s {
            "min-energy" => Ok(Objective::MinEnergy),
            "min-time" => Ok(Objective::MinTime),
            "min-edp" => Ok(Objective::MinEdp),
            _ => Err(PlanError::InvalidObjective(s.to_string())),
        }
    }
}

fn check_objective(objective: Objective) -> Result<(), PlanError> {
    if let Objective::EnergyUnderTimeCap { epsilon } = objective {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(PlanError::InvalidObjective(format!(
                "time-cap epsilon must be finite and non-negative, got {epsilon}"
            )));
        }
    }
    Ok(())
}

/// Whether every kernel runs at one shared frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Fixed,
    PerKernel,
}

/// A cyclic kernel sequence repeated `iterations` times.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    /// Kernel executions of one iteration, in order.
    pub sequence: Vec<String>,
    pub iterations: u64,
}

/// Predicted cost of running a workload under one assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Total time, seconds.
    pub t: f64,
    /// Total energy, joules.
    pub e: f64,
    /// Frequency changes per iteration along the cyclic sequence.
    pub switches: u64,
}

/// Chosen frequencies plus their predicted cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyPlan {
    pub policy: Policy,
    /// Kernel name -> frequency in MHz.
    pub assignment: BTreeMap<String, f64>,
    pub predicted_t_s: f64,
    pub predicted_e_j: f64,
    pub switches_per_iteration: u64,
}

/// Relative energy/time deltas of a plan against a baseline plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SavingsReport {
    /// Fraction of baseline energy saved (positive is better).
    pub e_saving: f64,
    /// Fractional slowdown against the baseline (positive is slower).
    pub t_cost: f64,
}

/// Relative savings of `plan` against `baseline`.
///
/// The baseline must predict strictly positive time and energy; otherwise
/// the ratios are undefined and the call fails.
pub fn savings(plan: &FrequencyPlan, baseline: &FrequencyPlan) -> Result<SavingsReport, PlanError> {
    if !(baseline.predicted_e_j > 0.0) || !(baseline.predicted_t_s > 0.0) {
        return Err(PlanError::ZeroBaseline);
    }
    Ok(SavingsReport {
        e_saving: 1.0 - plan.predicted_e_j / baseline.predicted_e_j,
        t_cost: plan.predicted_t_s / baseline.predicted_t_s - 1.0,
    })
}

/// The non-dominated rows of a time/energy trade-off, sorted by ascending
/// time.
///
/// A row is dominated when some other row is no worse in both `t_s` and `e_s`
/// and strictly better in at least one. Exact duplicates survive together.
/// The result is independent of input order and idempotent.
pub fn pareto(points: &[SweepPoint]) -> Vec<SweepPoint> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        a.t_s.total_cmp(&b.t_s).then(a.e_s.total_cmp(&b.e_s)).then(a.freq.total_cmp(&b.freq))
    });
    let mut front: Vec<SweepPoint> = Vec::new();
    for pt in sorted {
        let keep = match front.last() {
            None => true,
            // Rows are visited by ascending (t, e), so the last kept row has
            // the lowest energy seen so far; only beating it (or exactly
            // tying both coordinates) escapes domination.
            Some(last) => pt.e_s < last.e_s || (pt.t_s == last.t_s && pt.e_s == last.e_s),
        };
        if keep {
            front.push(pt);
        }
    }
    front
}

/// The best single frequency in `rows` under `objective`; ties resolve to the
/// lower frequency.
pub fn select_frequency(rows: &[SweepPoint], objective: Objective) -> Result<f64, PlanError> {
    check_objective(objective)?;
    Ok(rows[best_row(rows, objective)?].freq)
}

/// Index of the row `select_frequency` picks.
fn best_row(rows: &[SweepPoint], objective: Objective) -> Result<usize, PlanError> {
    if rows.is_empty() {
        return Err(PlanError::EmptySweep);
    }
    let row = match objective {
        Objective::MinEnergy => argmin_row(rows, |r| r.e_s, |_| true),
        Objective::MinTime => argmin_row(rows, |r| r.t_s, |_| true),
        Objective::MinEdp => argmin_row(rows, |r| r.e_s * r.t_s, |_| true),
        Objective::EnergyUnderTimeCap { epsilon } => {
            let t_min = rows.iter().map(|r| r.t_s).fold(f64::INFINITY, f64::min);
            let cap = (1.0 + epsilon) * t_min;
            argmin_row(rows, |r| r.e_s, |r| r.t_s <= cap)
        }
    };
    Ok(row)
}

/// Argmin of `key` over rows passing `allowed`, breaking key ties toward the
/// lower frequency. `allowed` must accept at least one row.
fn argmin_row(
    rows: &[SweepPoint],
    key: impl Fn(&SweepPoint) -> f64,
    allowed: impl Fn(&SweepPoint) -> bool,
) -> usize {
    let mut best: Option<usize> = None;
    for (i, r) in rows.iter().enumerate() {
        if !allowed(r) {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                key(r) < key(&rows[b]) || (key(r) == key(&rows[b]) && r.freq < rows[b].freq)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best.expect("the filter keeps at least the row minimizing its own cap")
}

fn find_row(rows: &[SweepPoint], freq: f64) -> Option<usize> {
    rows.iter().position(|r| (r.freq - freq).abs() <= 1e-9 * r.freq.max(1.0))
}

/// Sorted unique kernel names with their sweep rows (verified to share one
/// frequency grid), plus the sequence as indices into that list.
struct Prepared<'a> {
    kernels: Vec<&'a str>,
    rows: Vec<&'a [SweepPoint]>,
    seq: Vec<usize>,
}

fn prepare<'a>(workload: &'a Workload, table: &'a SweepTable) -> Result<Prepared<'a>, PlanError> {
    if workload.sequence.is_empty() || workload.iterations == 0 {
        return Err(PlanError::EmptyWorkload);
    }
    let names: BTreeSet<&str> = workload.sequence.iter().map(String::as_str).collect();
    let kernels: Vec<&str> = names.into_iter().collect();
    let mut rows: Vec<&[SweepPoint]> = Vec::with_capacity(kernels.len());
    for &k in &kernels {
        let r = table.get(k).filter(|r| !r.is_empty());
        rows.push(r.ok_or_else(|| PlanError::UnknownKernel { kernel: k.into() })?);
    }
    let reference = rows[0];
    for (k, r) in rows.iter().enumerate().skip(1) {
        let aligned = r.len() == reference.len()
            && r.iter()
                .zip(reference)
                .all(|(a, b)| (a.freq - b.freq).abs() <= 1e-9 * b.freq.max(1.0));
        if !aligned {
            return Err(PlanError::MisalignedGrids {
                kernel: kernels[k].into(),
                reference: kernels[0].into(),
            });
        }
    }
    let seq = workload
        .sequence
        .iter()
        .map(|k| kernels.binary_search(&k.as_str()).expect("kernel collected above"))
        .collect();
    Ok(Prepared { kernels, rows, seq })
}

/// Cost of one assignment, given as a row index per kernel.
fn evaluate_indices(p: &Prepared<'_>, iterations: u64, cost: SwitchCost, pick: &[usize]) -> Evaluation {
    let mut t_iter = 0.0;
    let mut e_iter = 0.0;
    for &k in &p.seq {
        let row = p.rows[k][pick[k]];
        t_iter += row.t_s;
        e_iter += row.e_s;
    }
    let mut switches = 0u64;
    let n = p.seq.len();
    if n > 1 {
        for i in 0..n {
            let a = p.rows[p.seq[i]][pick[p.seq[i]]].freq;
            let b = p.rows[p.seq[(i + 1) % n]][pick[p.seq[(i + 1) % n]]].freq;
            if a != b {
                switches += 1;
            }
        }
    }
    let iters = iterations as f64;
    Evaluation {
        t: iters * (t_iter + switches as f64 * cost.latency),
        e: iters * (e_iter + switches as f64 * cost.energy),
        switches,
    }
}

fn is_uniform(pick: &[usize]) -> bool {
    pick.iter().all(|&i| i == pick[0])
}

/// Per-kernel independent optimum under the objective (lowest frequency on
/// ties).
fn independent_optimum(p: &Prepared<'_>, objective: Objective) -> Vec<usize> {
    p.rows
        .iter()
        .map(|rows| best_row(rows, objective).expect("prepare rejects empty rows"))
        .collect()
}

/// Uniform assignments (ascending), then — exhaustively when small enough —
/// every mixed assignment in lexicographic order, otherwise just the
/// independent per-kernel optimum.
fn candidates(p: &Prepared<'_>, objective: Objective) -> Vec<Vec<usize>> {
    let grid_len = p.rows[0].len();
    let mut out: Vec<Vec<usize>> = (0..grid_len).map(|j| vec![j; p.rows.len()]).collect();
    let space = (0..p.rows.len()).try_fold(1usize, |acc, _| acc.checked_mul(grid_len));
    if space.is_some_and(|s| s <= EXHAUSTIVE_LIMIT) {
        // Odometer over row indices, skipping uniform picks already listed.
        let mut pick = vec![0usize; p.rows.len()];
        loop {
            if !is_uniform(&pick) {
                out.push(pick.clone());
            }
            let mut i = p.rows.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < grid_len {
                    break;
                }
                pick[i] = 0;
            }
        }
    }
    let ind = independent_optimum(p, objective);
    if !is_uniform(&ind) {
        out.push(ind);
    }
    out
}

fn evaluate_all(p: &Prepared<'_>, iterations: u64, cost: SwitchCost, cands: &[Vec<usize>]) -> Vec<Evaluation> {
    #[cfg(feature = "parallel")]
    if cands.len() >= PARALLEL_THRESHOLD {
        return cands.par_iter().map(|c| evaluate_indices(p, iterations, cost, c)).collect();
    }
    cands.iter().map(|c| evaluate_indices(p, iterations, cost, c)).collect()
}

fn build_plan(p: &Prepared<'_>, pick: &[usize], eval: Evaluation) -> FrequencyPlan {
    let assignment: BTreeMap<String, f64> = p
        .kernels
        .iter()
        .enumerate()
        .map(|(k, name)| (name.to_string(), p.rows[k][pick[k]].freq))
        .collect();
    let policy = if is_uniform(pick) { Policy::Fixed } else { Policy::PerKernel };
    FrequencyPlan {
        policy,
        assignment,
        predicted_t_s: eval.t,
        predicted_e_j: eval.e,
        switches_per_iteration: eval.switches,
    }
}

/// Pick the best frequency assignment for the workload under the objective.
///
/// Candidates are scanned uniform-first then ascending, and only a strictly
/// better score replaces the incumbent, so ties fall to uniform assignments
/// and lower frequencies. The result is never worse under the objective than
/// any uniform assignment.
pub fn plan(
    workload: &Workload,
    table: &SweepTable,
    cost: SwitchCost,
    objective: Objective,
) -> Result<FrequencyPlan, PlanError> {
    check_objective(objective)?;
    let p = prepare(workload, table)?;
    let cands = candidates(&p, objective);
    let evals = evaluate_all(&p, workload.iterations, cost, &cands);
    let best = match objective {
        Objective::MinEnergy => argmin(&evals, |e| e.e),
        Objective::MinTime => argmin(&evals, |e| e.t),
        Objective::MinEdp => argmin(&evals, |e| e.e * e.t),
        Objective::EnergyUnderTimeCap { epsilon } => {
            let t_min = evals.iter().map(|e| e.t).fold(f64::INFINITY, f64::min);
            let cap = (1.0 + epsilon) * t_min;
            let mut best: Option<usize> = None;
            for (i, ev) in evals.iter().enumerate() {
                if ev.t <= cap && best.is_none_or(|b| ev.e < evals[b].e) {
                    best = Some(i);
                }
            }
            best.expect("the time argmin is always within the cap")
        }
    };
    Ok(build_plan(&p, &cands[best], evals[best]))
}

fn argmin(evals: &[Evaluation], key: impl Fn(&Evaluation) -> f64) -> usize {
    let mut best = 0;
    for i in 1..evals.len() {
        if key(&evals[i]) < key(&evals[best]) {
            best = i;
        }
    }
    best
}

/// Evaluate the uniform assignment at `freq` and wrap it as a plan.
pub fn plan_fixed(
    workload: &Workload,
    table: &SweepTable,
    cost: SwitchCost,
    freq: f64,
) -> Result<FrequencyPlan, PlanError> {
    let p = prepare(workload, table)?;
    let mut pick = Vec::with_capacity(p.rows.len());
    for (k, rows) in p.rows.iter().enumerate() {
        let i = find_row(rows, freq).ok_or_else(|| PlanError::MissingFrequency {
            kernel: p.kernels[k].into(),
            freq,
        })?;
        pick.push(i);
    }
    let eval = evaluate_indices(&p, workload.iterations, cost, &pick);
    Ok(build_plan(&p, &pick, eval))
}

/// Predict the cost of an explicit kernel -> frequency assignment.
pub fn evaluate(
    workload: &Workload,
    table: &SweepTable,
    cost: SwitchCost,
    assignment: &BTreeMap<String, f64>,
) -> Result<Evaluation, PlanError> {
    let p = prepare(workload, table)?;
    let mut pick = Vec::with_capacity(p.rows.len());
    for (k, rows) in p.rows.iter().enumerate() {
        let freq = *assignment
            .get(p.kernels[k])
            .ok_or_else(|| PlanError::MissingAssignment { kernel: p.kernels[k].into() })?;
        let i = find_row(rows, freq).ok_or_else(|| PlanError::MissingFrequency {
            kernel: p.kernels[k].into(),
            freq,
        })?;
        pick.push(i);
    }
    Ok(evaluate_indices(&p, workload.iterations, cost, &pick))
}

// ============================================================================
