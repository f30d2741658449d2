//! Analytic models linking clock frequency to kernel time, power, and energy.
//!
//! A kernel is characterized by its operation count `O` and memory traffic
//! `D`; a machine by its per-MHz compute rate and a fixed memory bandwidth
//! `B`. The ratio `M_b = C(f) / B` (machine balance) against the kernel's
//! arithmetic intensity `I = O / D` decides whether raising the clock buys
//! time: compute-bound kernels speed up, memory-bound kernels plateau.
//! Timing follows `t(f) = (k / f) * max(1, alpha * f)`, power
//! `P(f) = m * f + P_static` with an optional additive exponential tail above
//! a knee, and energy is their product.
//!
//! All types here are plain immutable values and all operations are pure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("frequency must be positive, got {0} MHz")]
    NonPositiveFrequency(f64),
    #[error("frequency grid must be non-empty, positive, and strictly ascending")]
    InvalidFreqGrid,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("{0} must not be negative")]
    Negative(&'static str),
    #[error("kernel moves no data (bytes = 0), so its runtime is undefined")]
    EmptyKernel,
}

/// Per-change cost of moving the processor to a different clock frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchCost {
    /// Dead time per frequency change, in seconds.
    #[serde(rename = "latency_s")]
    pub latency: f64,
    /// Energy burned per frequency change, in joules.
    #[serde(rename = "energy_j")]
    pub energy: f64,
}

impl SwitchCost {
    pub const FREE: SwitchCost = SwitchCost { latency: 0.0, energy: 0.0 };

    pub fn new(latency: f64, energy: f64) -> Result<Self, ModelError> {
        if !(latency >= 0.0) {
            return Err(ModelError::Negative("switch latency"));
        }
        if !(energy >= 0.0) {
            return Err(ModelError::Negative("switch energy"));
        }
        Ok(SwitchCost { latency, energy })
    }

    /// Cost whose energy is the dead time spent at idle power. This is the
    /// default coupling used when no measured switch energy is available.
    pub fn from_latency(latency: f64, idle_power: f64) -> Result<Self, ModelError> {
        SwitchCost::new(latency, latency * idle_power)
    }
}

/// A processor described by its settable frequency grid and roofline
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineSpec {
    pub name: String,
    /// Settable clock frequencies in MHz, strictly ascending.
    #[serde(rename = "freq_grid_mhz")]
    pub freq_grid: Vec<f64>,
    /// Memory clock in MHz (fixed; not scaled by the planner).
    #[serde(rename = "mem_freq_mhz")]
    pub mem_freq: f64,
    /// Compute rate per MHz of core clock, in ops/s per MHz.
    pub compute_per_mhz: f64,
    /// Memory bandwidth in bytes/s.
    #[serde(rename = "bandwidth_bytes_per_s")]
    pub bandwidth: f64,
    /// Power budget in watts; requests whose predicted power exceeds it are
    /// capped by the simulator.
    #[serde(rename = "tdp_w")]
    pub tdp: f64,
    pub switch_cost: SwitchCost,
}

impl MachineSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        let grid_ok = !self.freq_grid.is_empty()
            && self.freq_grid.iter().all(|&f| f > 0.0)
            && self.freq_grid.windows(2).all(|w| w[0] < w[1]);
        if !grid_ok {
            return Err(ModelError::InvalidFreqGrid);
        }
        if !(self.mem_freq > 0.0) {
            return Err(ModelError::NonPositive("mem_freq"));
        }
        if !(self.compute_per_mhz > 0.0) {
            return Err(ModelError::NonPositive("compute_per_mhz"));
        }
        if !(self.bandwidth > 0.0) {
            return Err(ModelError::NonPositive("bandwidth"));
        }
        if !(self.tdp > 0.0) {
            return Err(ModelError::NonPositive("tdp"));
        }
        SwitchCost::new(self.switch_cost.latency, self.switch_cost.energy)?;
        Ok(())
    }

    /// Compute rate `C(f)` in ops/s at core clock `f` MHz.
    pub fn compute_rate(&self, f: f64) -> f64 {
        self.compute_per_mhz * f
    }

    /// Machine balance `M_b(f) = C(f) / B` in ops per byte.
    pub fn machine_balance(&self, f: f64) -> Result<f64, ModelError> {
        if !(f > 0.0) {
            return Err(ModelError::NonPositiveFrequency(f));
        }
        Ok(self.compute_rate(f) / self.bandwidth)
    }

    pub fn min_freq(&self) -> f64 {
        self.freq_grid[0]
    }

    pub fn max_freq(&self) -> f64 {
        *self.freq_grid.last().expect("non-empty grid")
    }
}

/// Work volume of one kernel invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub name: String,
    /// Arithmetic operations per invocation.
    pub ops: f64,
    /// Bytes moved to and from memory per invocation.
    pub bytes: f64,
}

impl KernelSpec {
    pub fn new(name: impl Into<String>, ops: f64, bytes: f64) -> Result<Self, ModelError> {
        if !(ops >= 0.0) {
            return Err(ModelError::Negative("ops"));
        }
        if !(bytes > 0.0) {
            return Err(ModelError::EmptyKernel);
        }
        Ok(KernelSpec { name: name.into(), ops, bytes })
    }

    /// Arithmetic intensity `I = O / D` in ops per byte. Derived, never stored.
    pub fn intensity(&self) -> f64 {
        self.ops / self.bytes
    }
}

/// Which roofline ridge limits a kernel at a given frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ComputeBound,
    MemoryBound,
}

/// Additive exponential power tail `a * exp(b * f)` applied for `f >= f_knee`.
///
/// The tail is added on top of the affine part, so the modeled power is
/// right-continuous at the knee but deliberately jumps coming from below:
/// it is a phenomenological fit, not a physical law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Superlinear {
    #[serde(rename = "a_w")]
    pub a: f64,
    #[serde(rename = "b_per_mhz")]
    pub b: f64,
    #[serde(rename = "f_knee_mhz")]
    pub f_knee: f64,
}

/// Average-power model `P(f) = m * f + p_static (+ superlinear tail)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Slope in W per MHz.
    #[serde(rename = "m_w_per_mhz")]
    pub m: f64,
    /// Frequency-independent floor in W.
    #[serde(rename = "p_static_w")]
    pub p_static: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub superlinear: Option<Superlinear>,
}

impl PowerModel {
    pub fn new(m: f64, p_static: f64) -> Result<Self, ModelError> {
        if !(m >= 0.0) {
            return Err(ModelError::Negative("power slope m"));
        }
        if !(p_static >= 0.0) {
            return Err(ModelError::Negative("p_static"));
        }
        Ok(PowerModel { m, p_static, superlinear: None })
    }

    pub fn with_superlinear(mut self, a: f64, b: f64, f_knee: f64) -> Result<Self, ModelError> {
        if !(a > 0.0) {
            return Err(ModelError::NonPositive("superlinear a"));
        }
        if !(b > 0.0) {
            return Err(ModelError::NonPositive("superlinear b"));
        }
        if !(f_knee > 0.0) {
            return Err(ModelError::NonPositive("superlinear f_knee"));
        }
        self.superlinear = Some(Superlinear { a, b, f_knee });
        Ok(self)
    }

    /// Predicted average power in W at `f` MHz.
    pub fn predict_power(&self, f: f64) -> f64 {
        debug_assert!(f > 0.0);
        let mut p = self.m * f + self.p_static;
        if let Some(s) = &self.superlinear {
            if f >= s.f_knee {
                p += s.a * (s.b * f).exp();
            }
        }
        p
    }
}

/// Timing model `t(f) = (k / f) * max(1, alpha * f)`.
///
/// Below the crossover `f* = 1 / alpha` the kernel is compute-bound and time
/// falls as `k / f`; above it the memory roof holds time constant. The
/// plateau branch is evaluated as `k * alpha` so every frequency strictly
/// above the crossover yields the bit-identical plateau time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfModel {
    /// Work coefficient in s * MHz: time at frequency `f` MHz in the
    /// compute-bound region is `k / f` seconds.
    #[serde(rename = "k_s_mhz")]
    pub k: f64,
    /// Reciprocal of the crossover frequency, in 1/MHz.
    #[serde(rename = "alpha_per_mhz")]
    pub alpha: f64,
}

impl PerfModel {
    pub fn new(k: f64, alpha: f64) -> Result<Self, ModelError> {
        if !(k > 0.0) {
            return Err(ModelError::NonPositive("perf k"));
        }
        if !(alpha > 0.0) {
            return Err(ModelError::NonPositive("perf alpha"));
        }
        Ok(PerfModel { k, alpha })
    }

    /// Predicted kernel time in seconds at `f` MHz.
    pub fn predict_time(&self, f: f64) -> f64 {
        debug_assert!(f > 0.0);
        if self.alpha * f > 1.0 {
            self.k * self.alpha
        } else {
            self.k / f
        }
    }

    /// Crossover frequency `f* = 1 / alpha` in MHz, where the compute slope
    /// meets the memory plateau.
    pub fn crossover_frequency(&self) -> f64 {
        1.0 / self.alpha
    }
}

/// Combined power + timing parameter document, serialized flat:
/// `m_w_per_mhz`, `p_static_w`, optional `superlinear`, `k_s_mhz`,
/// `alpha_per_mhz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(flatten)]
    pub power: PowerModel,
    #[serde(flatten)]
    pub perf: PerfModel,
}

impl ModelParams {
    /// Re-check the constructor invariants (deserialization bypasses them).
    pub fn validate(&self) -> Result<(), ModelError> {
        let p = PowerModel::new(self.power.m, self.power.p_static)?;
        if let Some(s) = &self.power.superlinear {
            p.with_superlinear(s.a, s.b, s.f_knee)?;
        }
        PerfModel::new(self.perf.k, self.perf.alpha)?;
        Ok(())
    }
}

/// Roofline lower bound on one invocation: `max(O / C(f), D / B)` seconds.
pub fn roofline_time(kernel: &KernelSpec, machine: &MachineSpec, f: f64) -> Result<f64, ModelError> {
    if !(f > 0.0) {
        return Err(ModelError::NonPositiveFrequency(f));
    }
    if !(kernel.bytes > 0.0) {
        return Err(ModelError::EmptyKernel);
    }
    let t_compute = kernel.ops / machine.compute_rate(f);
    let t_memory = kernel.bytes / machine.bandwidth;
    Ok(t_compute.max(t_memory))
}

/// Roofline classification at frequency `f`: memory-bound iff the machine
/// balance exceeds the kernel's intensity. The tie goes to compute-bound.
pub fn classify_regime(
    kernel: &KernelSpec,
    machine: &MachineSpec,
    f: f64,
) -> Result<Regime, ModelError> {
    let mb = machine.machine_balance(f)?;
    Ok(if mb > kernel.intensity() { Regime::MemoryBound } else { Regime::ComputeBound })
}

/// Predicted energy of one invocation in joules: `P(f) * t(f)`.
pub fn predict_energy(power: &PowerModel, perf: &PerfModel, f: f64) -> f64 {
    power.predict_power(f) * perf.predict_time(f)
}

/// Energy-delay product.
pub fn edp(energy: f64, time: f64) -> f64 {
    energy * time
}

// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DetRng;
    use approx::assert_relative_eq;

    fn machine(compute_per_mhz: f64, bandwidth: f64) -> MachineSpec {
        MachineSpec {
            name: "test".into(),
            freq_grid: vec![500.0, 650.0, 800.0],
            mem_freq: 2505.0,
            compute_per_mhz,
            bandwidth,
            tdp: 150.0,
            switch_cost: SwitchCost::FREE,
        }
    }

    #[test]
    fn machine_balance_scales_linearly() {
        let m = machine(2.0e9, 1.0e12);
        let b1 = m.machine_balance(500.0).unwrap();
        let b2 = m.machine_balance(1000.0).unwrap();
        assert_relative_eq!(b2, 2.0 * b1, max_relative = 1e-12);
        assert_relative_eq!(b1, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn machine_balance_rejects_nonpositive_frequency() {
        let m = machine(2.0e9, 1.0e12);
        assert!(m.machine_balance(0.0).is_err());
        assert!(m.machine_balance(-1.0).is_err());
    }

    #[test]
    fn machine_balance_reference_gpu_value() {
        // Calibrated so that the balance at the top boost clock is 8.08.
        let mut m = machine(8.08 * 240e9 / 875.0, 240e9);
        m.freq_grid = vec![562.0, 875.0];
        assert_relative_eq!(m.machine_balance(875.0).unwrap(), 8.08, max_relative = 1e-12);
    }

    #[test]
    fn validate_rejects_bad_grids() {
        let mut m = machine(1.0, 1.0);
        assert!(m.validate().is_ok());
        m.freq_grid = vec![];
        assert_eq!(m.validate(), Err(ModelError::InvalidFreqGrid));
        m.freq_grid = vec![500.0, 500.0];
        assert_eq!(m.validate(), Err(ModelError::InvalidFreqGrid));
        m.freq_grid = vec![800.0, 500.0];
        assert_eq!(m.validate(), Err(ModelError::InvalidFreqGrid));
        m.freq_grid = vec![-1.0, 500.0];
        assert_eq!(m.validate(), Err(ModelError::InvalidFreqGrid));
    }

    #[test]
    fn kernel_rejects_zero_bytes() {
        assert_eq!(KernelSpec::new("k", 0.0, 0.0), Err(ModelError::EmptyKernel));
        assert_eq!(KernelSpec::new("k", -1.0, 8.0), Err(ModelError::Negative("ops")));
        let k = KernelSpec::new("k", 0.0, 8.0).unwrap();
        assert_eq!(k.intensity(), 0.0);
    }

    #[test]
    fn roofline_balance_point_splits_regimes() {
        // C(f) = f ops/s, B = 1000 bytes/s; kernel with I = 1 ops/byte.
        let m = machine(1.0, 1000.0);
        let k = KernelSpec::new("k", 1000.0, 1000.0).unwrap();
        // Below balance: compute term dominates.
        assert_relative_eq!(roofline_time(&k, &m, 500.0).unwrap(), 2.0, max_relative = 1e-12);
        // Above: memory term.
        assert_relative_eq!(roofline_time(&k, &m, 2000.0).unwrap(), 1.0, max_relative = 1e-12);
        // At balance both terms agree.
        assert_relative_eq!(roofline_time(&k, &m, 1000.0).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn roofline_pure_memory_kernel() {
        let m = machine(1.0, 1000.0);
        let k = KernelSpec::new("copy", 0.0, 1000.0).unwrap();
        assert_relative_eq!(roofline_time(&k, &m, 10.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(classify_regime(&k, &m, 10.0).unwrap(), Regime::MemoryBound);
    }

    #[test]
    fn roofline_time_is_non_increasing_then_flat() {
        let m = machine(1.0, 1000.0);
        let k = KernelSpec::new("k", 1000.0, 1000.0).unwrap(); // balance at 1000 MHz
        let freqs: Vec<f64> = (1..=30).map(|i| 100.0 * i as f64).collect();
        let times: Vec<f64> =
            freqs.iter().map(|&f| roofline_time(&k, &m, f).unwrap()).collect();
        for w in times.windows(2) {
            assert!(w[1] <= w[0], "roofline time increased with frequency");
        }
        let floor = k.bytes / m.bandwidth;
        for (&f, &t) in freqs.iter().zip(&times) {
            if m.machine_balance(f).unwrap() >= k.intensity() {
                assert_relative_eq!(t, floor, max_relative = 1e-12);
            } else {
                assert!(t > floor);
            }
        }
    }

    #[test]
    fn classify_tie_is_compute_bound() {
        let m = machine(1.0, 1000.0); // M_b(1000) = 1
        let k = KernelSpec::new("k", 1000.0, 1000.0).unwrap(); // I = 1
        assert_eq!(classify_regime(&k, &m, 1000.0).unwrap(), Regime::ComputeBound);
        assert_eq!(classify_regime(&k, &m, 1001.0).unwrap(), Regime::MemoryBound);
    }

    #[test]
    fn predict_time_plateau_above_crossover() {
        let perf = PerfModel::new(1000.0, 1.0 / 650.0).unwrap();
        let t_knee = perf.predict_time(650.0);
        let t_top = perf.predict_time(875.0);
        assert_relative_eq!(t_top, t_knee, max_relative = 1e-12);
        // Strictly above the crossover the plateau is bit-identical.
        assert_eq!(perf.predict_time(700.0).to_bits(), perf.predict_time(875.0).to_bits());
        // Halving the frequency in the compute-bound region doubles time.
        assert_relative_eq!(perf.predict_time(325.0), 2.0 * t_knee, max_relative = 1e-12);
    }

    #[test]
    fn predict_time_is_continuous_at_crossover() {
        let perf = PerfModel::new(123.0, 1.0 / 650.0).unwrap();
        let f = perf.crossover_frequency();
        assert_relative_eq!(perf.predict_time(f), perf.k * perf.alpha, max_relative = 1e-12);
    }

    #[test]
    fn crossover_values() {
        assert_relative_eq!(
            PerfModel::new(1.0, 1.0 / 650.0).unwrap().crossover_frequency(),
            650.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            PerfModel::new(1.0, 1.0 / 800.0).unwrap().crossover_frequency(),
            800.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn predict_power_reference_values() {
        let pm = PowerModel::new(0.096, 42.94).unwrap();
        assert_relative_eq!(pm.predict_power(650.0), 105.34, max_relative = 1e-12);
        assert_relative_eq!(pm.predict_power(875.0), 126.94, max_relative = 1e-12);
    }

    #[test]
    fn predict_power_static_only() {
        let pm = PowerModel::new(0.0, 55.0).unwrap();
        assert_eq!(pm.predict_power(100.0), 55.0);
        assert_eq!(pm.predict_power(900.0), 55.0);
    }

    #[test]
    fn superlinear_tail_is_additive_and_right_continuous() {
        let pm = PowerModel::new(0.109, 42.50)
            .unwrap()
            .with_superlinear(0.005, 0.0099, 650.0)
            .unwrap();
        let lin = 0.109 * 650.0 + 42.50;
        let tail = 0.005 * (0.0099f64 * 650.0).exp();
        assert_relative_eq!(pm.predict_power(650.0), lin + tail, max_relative = 1e-12);
        // Right-continuity: approaching the knee from above converges to the
        // value at the knee; from below there is a deliberate jump.
        assert_relative_eq!(pm.predict_power(650.0 + 1e-7), pm.predict_power(650.0), max_relative = 1e-9);
        assert!(pm.predict_power(650.0 - 1e-7) < pm.predict_power(650.0) - tail / 2.0);
        // Below the knee the tail is absent.
        assert_relative_eq!(pm.predict_power(600.0), 0.109 * 600.0 + 42.50, max_relative = 1e-12);
    }

    #[test]
    fn energy_ratio_between_crossover_and_top_clock() {
        let pm = PowerModel::new(0.096, 42.94).unwrap();
        let perf = PerfModel::new(1.0, 1.0 / 650.0).unwrap();
        let ratio = predict_energy(&pm, &perf, 650.0) / predict_energy(&pm, &perf, 875.0);
        // Same plateau time, so the ratio is the power ratio 105.34 / 126.94.
        assert_relative_eq!(ratio, 105.34 / 126.94, max_relative = 1e-9);
        assert!((ratio - 0.830).abs() < 1e-3);
    }

    #[test]
    fn energy_argmin_sits_at_crossover_on_grid() {
        let mut rng = DetRng::new(99);
        for _ in 0..50 {
            let f_star = rng.uniform_in(300.0, 2500.0);
            let m = rng.uniform_in(0.02, 0.5);
            let p_static = rng.uniform_in(5.0, 150.0);
            let k = rng.uniform_in(1.0, 500.0);
            let pm = PowerModel::new(m, p_static).unwrap();
            let perf = PerfModel::new(k, 1.0 / f_star).unwrap();
            // Grid built so that f_star itself is the middle point.
            let grid: Vec<f64> = (100..=400).map(|i| (i as f64 / 200.0) * f_star).collect();
            let argmin = grid
                .iter()
                .copied()
                .min_by(|a, b| {
                    predict_energy(&pm, &perf, *a)
                        .partial_cmp(&predict_energy(&pm, &perf, *b))
                        .unwrap()
                })
                .unwrap();
            assert_eq!(argmin.to_bits(), f_star.to_bits());
        }
    }

    #[test]
    fn energy_argmin_invariant_under_k_scaling() {
        let pm = PowerModel::new(0.096, 42.94).unwrap();
        let grid: Vec<f64> = (1..=40).map(|i| 100.0 + 25.0 * i as f64).collect();
        let argmin = |k: f64| {
            let perf = PerfModel::new(k, 1.0 / 650.0).unwrap();
            grid.iter()
                .copied()
                .min_by(|a, b| {
                    predict_energy(&pm, &perf, *a)
                        .partial_cmp(&predict_energy(&pm, &perf, *b))
                        .unwrap()
                })
                .unwrap()
        };
        let base = argmin(1.0);
        for k in [0.001, 0.5, 3.0, 1e4] {
            assert_eq!(argmin(k).to_bits(), base.to_bits());
        }
    }

    #[test]
    fn energy_with_zero_static_power_grows_on_plateau() {
        // With p_static = 0 the energy below the crossover is flat (m * k) and
        // grows linearly above it.
        let pm = PowerModel { m: 0.1, p_static: 0.0, superlinear: None };
        let perf = PerfModel::new(10.0, 1.0 / 500.0).unwrap();
        let e_low = predict_energy(&pm, &perf, 250.0);
        let e_mid = predict_energy(&pm, &perf, 400.0);
        assert_relative_eq!(e_low, e_mid, max_relative = 1e-12);
        assert!(predict_energy(&pm, &perf, 800.0) > e_mid * 1.5);
    }

    #[test]
    fn time_monotonicity_and_ft_shape() {
        let mut rng = DetRng::new(5);
        for _ in 0..50 {
            let f_star = rng.uniform_in(200.0, 3000.0);
            let k = rng.uniform_in(0.1, 100.0);
            let perf = PerfModel::new(k, 1.0 / f_star).unwrap();
            let mut prev_t = f64::INFINITY;
            let mut prev_ft = 0.0;
            for i in 1..=60 {
                let f = f_star * i as f64 / 30.0;
                let t = perf.predict_time(f);
                assert!(t <= prev_t * (1.0 + 1e-12), "time must never increase with f");
                let ft = f * t;
                if f > f_star * 1.001 {
                    assert!(ft > prev_ft, "f*t must strictly increase above the crossover");
                } else if f < f_star * 0.999 {
                    assert_relative_eq!(ft, k, max_relative = 1e-9);
                }
                prev_t = t;
                prev_ft = ft;
            }
        }
    }

    #[test]
    fn edp_trivia() {
        assert_eq!(edp(2.0, 3.0), 6.0);
        assert_eq!(edp(0.0, 3.0), 0.0);
    }

    #[test]
    fn switch_cost_validation_and_default_coupling() {
        assert!(SwitchCost::new(-1.0, 0.0).is_err());
        assert!(SwitchCost::new(0.0, -1.0).is_err());
        let c = SwitchCost::from_latency(10e-3, 40.0).unwrap();
        assert_relative_eq!(c.energy, 0.4, max_relative = 1e-12);
        assert_eq!(SwitchCost::FREE.latency, 0.0);
    }

    #[test]
    fn params_json_round_trip_with_exact_keys() {
        let params = ModelParams {
            power: PowerModel::new(0.096, 42.94)
                .unwrap()
                .with_superlinear(0.005, 0.0099, 650.0)
                .unwrap(),
            perf: PerfModel::new(1.3, 1.0 / 650.0).unwrap(),
        };
        let json = serde_json::to_string(&params).unwrap();
        for key in ["m_w_per_mhz", "p_static_w", "a_w", "b_per_mhz", "f_knee_mhz", "k_s_mhz", "alpha_per_mhz"] {
            assert!(json.contains(key), "missing key {key} in {json}");
        }
        let back: ModelParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, params);

        // Without the tail the superlinear key is absent entirely.
        let plain = ModelParams {
            power: PowerModel::new(0.1, 40.0).unwrap(),
            perf: PerfModel::new(1.0, 0.001).unwrap(),
        };
        let json = serde_json::to_string(&plain).unwrap();
        assert!(!json.contains("superlinear"));
        let back: ModelParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plain);
    }
}
