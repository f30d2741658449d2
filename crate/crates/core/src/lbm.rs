//! Miniature lattice-Boltzmann workload: a periodic 2-D lattice advanced by
//! alternating `propagate` (pure data movement) and `collide` (arithmetic)
//! kernels, the same two-kernel structure the planner optimizes.
//!
//! Populations are stored population-major (`idx = (l * ny + y) * nx + x`),
//! so `propagate` reduces to two slice copies per row (a rotation) and
//! `collide` walks rows of all populations in lockstep. Collision relaxes
//! every population toward `w_l * rho` (the zero-velocity equilibrium), which
//! conserves mass exactly. An optional per-site padding loop raises the
//! arithmetic intensity of `collide` without touching memory traffic, which
//! lets the workload mimic kernels on either side of the roofline ridge.
//!
//! Everything is deterministic: initialization draws from a seeded generator,
//! and the parallel row-sweeps compute bit-identical results to the
//! sequential ones because each row is processed by the same scalar routine.

use std::collections::BTreeMap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::DetRng;

#[derive(Debug, Error, PartialEq)]
pub enum LbmError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
}

/// Nominal work volume of one kernel pass over the whole lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelCounts {
    /// Arithmetic operations.
    pub ops: u64,
    /// Bytes moved (each population read once and written once).
    pub bytes: u64,
}

impl KernelCounts {
    /// Arithmetic intensity in ops per byte.
    pub fn intensity(&self) -> f64 {
        self.ops as f64 / self.bytes as f64
    }
}

/// Standard two-dimensional nine-velocity stencil.
pub fn d2q9_velocities() -> Vec<(i32, i32)> {
    vec![(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)]
}

/// Weights matching [`d2q9_velocities`]; they sum to 1.
pub fn d2q9_weights() -> Vec<f64> {
    let c = 4.0 / 9.0;
    let s = 1.0 / 9.0;
    let d = 1.0 / 36.0;
    vec![c, s, s, s, s, d, d, d, d]
}

/// First `p` lattice offsets enumerated ring by ring (Chebyshev radius, then
/// lexicographic), starting at the rest velocity. Used to build stencils of
/// arbitrary population count.
pub fn synthetic_velocities(p: usize) -> Vec<(i32, i32)> {
    let mut out = Vec::with_capacity(p);
    let mut r = 0i32;
    while out.len() < p {
        for cx in -r..=r {
            for cy in -r..=r {
                if cx.abs().max(cy.abs()) == r && out.len() < p {
                    out.push((cx, cy));
                }
            }
        }
        r += 1;
    }
    out
}

/// Positive weights for [`synthetic_velocities`], decaying with distance and
/// normalized to sum to 1.
pub fn synthetic_weights(velocities: &[(i32, i32)]) -> Vec<f64> {
    let raw: Vec<f64> = velocities
        .iter()
        .map(|&(cx, cy)| 1.0 / (1.0 + (cx * cx + cy * cy) as f64))
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

/// Padding repetitions per site needed to lift `collide`'s arithmetic
/// intensity to at least `target` ops/byte for a `p`-population stencil.
pub fn pad_for_intensity(p: usize, target: f64) -> u64 {
    let base_ops = (4 * p - 1) as f64;
    let bytes = (16 * p) as f64;
    let needed = target * bytes - base_ops;
    if needed <= 0.0 {
        0
    } else {
        (needed / 2.0).ceil() as u64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointHeader {
    nx: usize,
    ny: usize,
    p: usize,
    velocities: Vec<(i32, i32)>,
    weights: Vec<f64>,
    omega: f64,
    seed: u64,
    intensity_pad: u64,
}

/// Periodic 2-D lattice of `p` populations.
#[derive(Debug, Clone)]
pub struct Lattice {
    nx: usize,
    ny: usize,
    velocities: Vec<(i32, i32)>,
    weights: Vec<f64>,
    omega: f64,
    seed: u64,
    pad_reps: u64,
    data: Vec<f64>,
    scratch: Vec<f64>,
}

/// Equality covers the observable state; the swap buffer is excluded.
impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.velocities == other.velocities
            && self.weights == other.weights
            && self.omega == other.omega
            && self.seed == other.seed
            && self.pad_reps == other.pad_reps
            && self.data == other.data
    }
}

impl Lattice {
    /// Build a lattice with explicit stencil, relaxing at rate `omega`, with
    /// site densities drawn near 1 from the seeded generator.
    pub fn new(
        nx: usize,
        ny: usize,
        velocities: Vec<(i32, i32)>,
        weights: Vec<f64>,
        omega: f64,
        seed: u64,
    ) -> Result<Self, LbmError> {
        let p = velocities.len();
        if nx == 0 || ny == 0 || p == 0 {
            return Err(LbmError::InvalidLattice("dimensions must be positive".into()));
        }
        if weights.len() != p {
            return Err(LbmError::InvalidLattice(format!(
                "{} weights for {} velocities",
                weights.len(),
                p
            )));
        }
        let len = nx
            .checked_mul(ny)
            .and_then(|s| s.checked_mul(p))
            .ok_or_else(|| LbmError::InvalidLattice("lattice too large".into()))?;
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(LbmError::InvalidLattice("weights must be positive".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(LbmError::InvalidLattice(format!("weights sum to {sum}, expected 1")));
        }
        if !(0.0..=2.0).contains(&omega) {
            return Err(LbmError::InvalidLattice(format!("omega {omega} outside [0, 2]")));
        }
        let mut lattice = Lattice {
            nx,
            ny,
            velocities,
            weights,
            omega,
            seed,
            pad_reps: 0,
            data: vec![0.0; len],
            scratch: vec![0.0; len],
        };
        let mut rng = DetRng::new(seed);
        for y in 0..ny {
            for x in 0..nx {
                let rho = rng.uniform_in(0.95, 1.05);
                for l in 0..p {
                    lattice.data[(l * ny + y) * nx + x] = lattice.weights[l] * rho;
                }
            }
        }
        Ok(lattice)
    }

    /// Standard nine-population lattice.
    pub fn d2q9(nx: usize, ny: usize, omega: f64, seed: u64) -> Result<Self, LbmError> {
        Lattice::new(nx, ny, d2q9_velocities(), d2q9_weights(), omega, seed)
    }

    /// Lattice with a synthetic `p`-population stencil.
    pub fn synthetic(nx: usize, ny: usize, p: usize, omega: f64, seed: u64) -> Result<Self, LbmError> {
        let v = synthetic_velocities(p);
        let w = synthetic_weights(&v);
        Lattice::new(nx, ny, v, w, omega, seed)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Population count.
    pub fn p(&self) -> usize {
        self.velocities.len()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn pad_reps(&self) -> u64 {
        self.pad_reps
    }

    /// Extra arithmetic per site in `collide`: `reps` fused multiply-adds.
    pub fn set_pad_reps(&mut self, reps: u64) {
        self.pad_reps = reps;
    }

    /// Per-site density (sum over populations), row-major.
    pub fn density(&self) -> Vec<f64> {
        let sites = self.nx * self.ny;
        let mut rho = vec![0.0; sites];
        for plane in self.data.chunks(sites) {
            for (r, f) in rho.iter_mut().zip(plane) {
                *r += f;
            }
        }
        rho
    }

    /// Total mass; conserved by both kernels up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Raw population values, plane-major (`p` row-major planes of `nx*ny`).
    /// `propagate` permutes exactly this multiset.
    pub fn populations(&self) -> &[f64] {
        &self.data
    }

    pub fn propagate_counts(&self) -> KernelCounts {
        let sites = (self.nx * self.ny) as u64;
        KernelCounts { ops: 0, bytes: 16 * self.p() as u64 * sites }
    }

    pub fn collide_counts(&self) -> KernelCounts {
        let sites = (self.nx * self.ny) as u64;
        let p = self.p() as u64;
        KernelCounts { ops: (4 * p - 1 + 2 * self.pad_reps) * sites, bytes: 16 * p * sites }
    }

    /// Counts for both kernels keyed by name, as reported by the CLI.
    pub fn counts(&self) -> BTreeMap<String, KernelCounts> {
        let mut m = BTreeMap::new();
        m.insert("propagate".to_string(), self.propagate_counts());
        m.insert("collide".to_string(), self.collide_counts());
        m
    }

    /// The two kernels as roofline descriptions (propagate, collide), ready
    /// for regime classification against a machine.
    pub fn kernel_specs(&self) -> (crate::model::KernelSpec, crate::model::KernelSpec) {
        let build = |name: &str, c: KernelCounts| {
            crate::model::KernelSpec::new(name, c.ops as f64, c.bytes as f64)
                .expect("counts are non-negative with positive bytes")
        };
        (build("propagate", self.propagate_counts()), build("collide", self.collide_counts()))
    }

    /// Shift every population along its velocity (periodic pull), then swap
    /// buffers. Pure data movement; no arithmetic.
    pub fn propagate(&mut self) {
        #[cfg(feature = "parallel")]
        self.propagate_with(true);
        #[cfg(not(feature = "parallel"))]
        self.propagate_with(false);
    }

    /// Sequential [`Lattice::propagate`]; bit-identical results.
    pub fn propagate_sequential(&mut self) {
        self.propagate_with(false);
    }

    #[allow(unused_variables)]
    fn propagate_with(&mut self, parallel: bool) {
        let (nx, ny) = (self.nx, self.ny);
        let plane_len = nx * ny;
        for (l, dst_plane) in self.scratch.chunks_mut(plane_len).enumerate() {
            let (cx, cy) = self.velocities[l];
            let src_plane = &self.data[l * plane_len..(l + 1) * plane_len];
            let shift = (cx as i64).rem_euclid(nx as i64) as usize;
            let row = |y: usize, dst_row: &mut [f64]| {
                let sy = (y as i64 - cy as i64).rem_euclid(ny as i64) as usize;
                rotate_into(dst_row, &src_plane[sy * nx..(sy + 1) * nx], shift);
            };
            #[cfg(feature = "parallel")]
            if parallel {
                dst_plane.par_chunks_mut(nx).enumerate().for_each(|(y, r)| row(y, r));
                continue;
            }
            for (y, r) in dst_plane.chunks_mut(nx).enumerate() {
                row(y, r);
            }
        }
        std::mem::swap(&mut self.data, &mut self.scratch);
    }

    /// Relax every population toward `w_l * rho` at rate `omega`, plus the
    /// configured padding arithmetic.
    pub fn collide(&mut self) {
        #[cfg(feature = "parallel")]
        self.collide_with(true);
        #[cfg(not(feature = "parallel"))]
        self.collide_with(false);
    }

    /// Sequential [`Lattice::collide`]; bit-identical results.
    pub fn collide_sequential(&mut self) {
        self.collide_with(false);
    }

    #[allow(unused_variables)]
    fn collide_with(&mut self, parallel: bool) {
        let omc = 1.0 - self.omega;
        let wr: Vec<f64> = self.weights.iter().map(|w| self.omega * w).collect();
        let pad = self.pad_reps;
        let plane_len = self.nx * self.ny;
        let mut per_y = rows_by_y(&mut self.data, self.nx, self.ny, plane_len);
        #[cfg(feature = "parallel")]
        if parallel {
            per_y.par_iter_mut().for_each(|rows| collide_rows(rows, omc, &wr, pad));
            return;
        }
        for rows in per_y.iter_mut() {
            collide_rows(rows, omc, &wr, pad);
        }
    }

    /// Advance `n` iterations of propagate followed by collide.
    pub fn step(&mut self, n: u64) {
        for _ in 0..n {
            self.propagate();
            self.collide();
        }
    }

    /// Serialize as a one-line JSON header plus little-endian population data.
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = CheckpointHeader {
            nx: self.nx,
            ny: self.ny,
            p: self.p(),
            velocities: self.velocities.clone(),
            weights: self.weights.clone(),
            omega: self.omega,
            seed: self.seed,
            intensity_pad: self.pad_reps,
        };
        let mut out = serde_json::to_vec(&header).expect("header serializes");
        out.push(b'\n');
        out.reserve(self.data.len() * 8);
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Inverse of [`Lattice::to_bytes`], restoring the exact state.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LbmError> {
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| LbmError::BadCheckpoint("missing header line".into()))?;
        let header: CheckpointHeader = serde_json::from_slice(&bytes[..nl])
            .map_err(|e| LbmError::BadCheckpoint(format!("header: {e}")))?;
        if header.p != header.velocities.len() {
            return Err(LbmError::BadCheckpoint("population count disagrees with stencil".into()));
        }
        let mut lattice = Lattice::new(
            header.nx,
            header.ny,
            header.velocities,
            header.weights,
            header.omega,
            header.seed,
        )
        .map_err(|e| LbmError::BadCheckpoint(e.to_string()))?;
        lattice.pad_reps = header.intensity_pad;
        let payload = &bytes[nl + 1..];
        if payload.len() != lattice.data.len() * 8 {
            return Err(LbmError::BadCheckpoint(format!(
                "payload holds {} bytes, expected {}",
                payload.len(),
                lattice.data.len() * 8
            )));
        }
        for (v, chunk) in lattice.data.iter_mut().zip(payload.chunks_exact(8)) {
            *v = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        }
        Ok(lattice)
    }
}

/// `dst[(i + shift) % n] = src[i]`, as two contiguous copies.
fn rotate_into(dst: &mut [f64], src: &[f64], shift: usize) {
    let n = src.len();
    dst[shift..].copy_from_slice(&src[..n - shift]);
    dst[..shift].copy_from_slice(&src[n - shift..]);
}

/// Regroup population-major storage into per-row bundles: entry `y` holds
/// row `y` of every population plane, so one bundle covers all data a site
/// row needs.
fn rows_by_y<'a>(data: &'a mut [f64], nx: usize, ny: usize, plane_len: usize) -> Vec<Vec<&'a mut [f64]>> {
    let mut per_y: Vec<Vec<&'a mut [f64]>> = (0..ny).map(|_| Vec::new()).collect();
    for plane in data.chunks_mut(plane_len) {
        for (y, row) in plane.chunks_mut(nx).enumerate() {
            per_y[y].push(row);
        }
    }
    per_y
}

/// Scalar collision over one site row; both the sequential and the parallel
/// sweep call this, which keeps their results bit-identical.
fn collide_rows(rows: &mut [&mut [f64]], omc: f64, wr: &[f64], pad: u64) {
    let nx = rows[0].len();
    let p = rows.len();
    for x in 0..nx {
        let mut rho = 0.0;
        for row in rows.iter() {
            rho += row[x];
        }
        for l in 0..p {
            rows[l][x] = omc * rows[l][x] + wr[l] * rho;
        }
        let mut acc = rho;
        for _ in 0..pad {
            acc = acc * 0.999 + 1e-7;
        }
        std::hint::black_box(acc);
    }
}

// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn d2q9_stencil_shape() {
        let v = d2q9_velocities();
        let w = d2q9_weights();
        assert_eq!(v.len(), 9);
        assert_eq!(w.len(), 9);
        assert_eq!(v[0], (0, 0));
        assert_relative_eq!(w.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn synthetic_stencil_shape() {
        let v = synthetic_velocities(37);
        assert_eq!(v.len(), 37);
        assert_eq!(v[0], (0, 0));
        let unique: std::collections::BTreeSet<(i32, i32)> = v.iter().copied().collect();
        assert_eq!(unique.len(), 37);
        let w = synthetic_weights(&v);
        assert!(w.iter().all(|&x| x > 0.0));
        assert_relative_eq!(w.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn padding_reaches_target_intensity() {
        // 37 populations: 147 base ops over 592 bytes. Reaching 13.3
        // ops/byte takes 3864 extra multiply-add pairs per site.
        assert_eq!(pad_for_intensity(37, 13.3), 3864);
        let mut lat = Lattice::synthetic(8, 8, 37, 1.0, 1).unwrap();
        assert_relative_eq!(lat.collide_counts().intensity(), 147.0 / 592.0, max_relative = 1e-12);
        lat.set_pad_reps(3864);
        let i = lat.collide_counts().intensity();
        assert!(i >= 13.3 && i < 13.31, "intensity {i}");
        // Already-intense kernels need no padding.
        assert_eq!(pad_for_intensity(37, 0.1), 0);
        // Propagate moves bytes without arithmetic.
        assert_eq!(lat.propagate_counts().ops, 0);
        assert_eq!(lat.propagate_counts().bytes, 16 * 37 * 64);
    }

    #[test]
    fn kernels_classify_as_memory_and_compute_bound() {
        use crate::model::{classify_regime, Regime};
        let machine = crate::replay::machine();
        let mut lat = Lattice::synthetic(16, 16, 37, 0.9, 3).unwrap();
        lat.set_pad_reps(pad_for_intensity(37, 13.3));
        let (prop, coll) = lat.kernel_specs();
        assert_eq!(prop.ops, 0.0);
        for &f in &[machine.min_freq(), machine.max_freq()] {
            assert_eq!(classify_regime(&prop, &machine, f).unwrap(), Regime::MemoryBound);
            assert_eq!(classify_regime(&coll, &machine, f).unwrap(), Regime::ComputeBound);
        }
    }

    #[test]
    fn stepping_composes_bitwise() {
        let mut split = Lattice::d2q9(24, 16, 0.7, 9).unwrap();
        let mut whole = split.clone();
        split.step(2);
        split.step(3);
        whole.step(5);
        assert_eq!(split, whole);
    }

    #[test]
    fn mass_is_conserved() {
        let mut lat = Lattice::d2q9(32, 24, 0.8, 7).unwrap();
        let before = lat.total_mass();
        lat.step(10);
        assert_relative_eq!(lat.total_mass(), before, max_relative = 1e-12);
    }

    #[test]
    fn propagate_shifts_each_population_by_its_velocity() {
        let mut lat = Lattice::d2q9(5, 4, 1.0, 1).unwrap();
        lat.data.iter_mut().for_each(|v| *v = 0.0);
        // Population 1 moves along (1, 0); put a lone value at (x=4, y=2)
        // and expect it at (x=0, y=2) after one step (periodic wrap).
        let (nx, ny) = (lat.nx, lat.ny);
        lat.data[(1 * ny + 2) * nx + 4] = 7.25;
        // Population 8 moves along (1, -1); from (x=1, y=0) to (x=2, y=3).
        lat.data[(8 * ny) * nx + 1] = 3.5;
        lat.propagate();
        assert_eq!(lat.data[(1 * ny + 2) * nx], 7.25);
        assert_eq!(lat.data[(8 * ny + 3) * nx + 2], 3.5);
        assert_eq!(lat.data.iter().filter(|&&v| v != 0.0).count(), 2);
    }

    #[test]
    fn propagate_is_a_permutation_per_plane() {
        let mut lat = Lattice::synthetic(9, 7, 13, 1.0, 3).unwrap();
        let plane = lat.nx * lat.ny;
        let mut before: Vec<Vec<u64>> = lat
            .data
            .chunks(plane)
            .map(|c| c.iter().map(|v| v.to_bits()).collect())
            .collect();
        lat.propagate();
        let mut after: Vec<Vec<u64>> = lat
            .data
            .chunks(plane)
            .map(|c| c.iter().map(|v| v.to_bits()).collect())
            .collect();
        for (b, a) in before.iter_mut().zip(after.iter_mut()) {
            b.sort_unstable();
            a.sort_unstable();
            assert_eq!(b, a);
        }
    }

    #[test]
    fn propagate_cycles_back_after_lattice_period() {
        let mut lat = Lattice::d2q9(8, 8, 1.0, 5).unwrap();
        let original = lat.data.clone();
        for _ in 0..8 {
            lat.propagate();
        }
        assert_eq!(lat.data, original);
    }

    #[test]
    fn collide_identities_at_omega_endpoints() {
        // omega = 0: collision is the identity, bit for bit.
        let mut lat = Lattice::d2q9(6, 5, 0.0, 11).unwrap();
        let before = lat.data.clone();
        lat.collide();
        assert_eq!(lat.data, before);
        // omega = 1: every population becomes exactly w_l * rho.
        let mut lat = Lattice::d2q9(6, 5, 1.0, 11).unwrap();
        let plane = lat.nx * lat.ny;
        let p = lat.p();
        let pre = lat.data.clone();
        lat.collide();
        for site in 0..plane {
            let mut rho = 0.0;
            for l in 0..p {
                rho += pre[l * plane + site];
            }
            for l in 0..p {
                assert_eq!(lat.data[l * plane + site], lat.weights[l] * rho);
            }
        }
    }

    #[test]
    fn uniform_density_is_a_fixed_point() {
        let mut lat = Lattice::d2q9(4, 4, 0.6, 1).unwrap();
        let plane = lat.nx * lat.ny;
        for l in 0..lat.p() {
            for s in 0..plane {
                lat.data[l * plane + s] = lat.weights[l];
            }
        }
        lat.step(3);
        for l in 0..lat.p() {
            for s in 0..plane {
                assert_relative_eq!(lat.data[l * plane + s], lat.weights[l], max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn relaxation_smooths_toward_uniform_density() {
        let mut lat = Lattice::d2q9(16, 16, 0.9, 21).unwrap();
        let spread = |rho: &[f64]| {
            let max = rho.iter().cloned().fold(f64::MIN, f64::max);
            let min = rho.iter().cloned().fold(f64::MAX, f64::min);
            max - min
        };
        let before = spread(&lat.density());
        lat.step(200);
        let after = spread(&lat.density());
        assert!(after < before * 0.5, "spread {before} -> {after}");
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_sweeps_are_bit_identical() {
        let mut a = Lattice::synthetic(33, 17, 11, 0.7, 9).unwrap();
        let mut b = a.clone();
        for _ in 0..3 {
            a.propagate();
            a.collide();
            b.propagate_sequential();
            b.collide_sequential();
        }
        let bits = |l: &Lattice| l.data.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn initialization_is_seed_deterministic() {
        let a = Lattice::d2q9(12, 12, 0.8, 42).unwrap();
        let b = Lattice::d2q9(12, 12, 0.8, 42).unwrap();
        let c = Lattice::d2q9(12, 12, 0.8, 43).unwrap();
        assert_eq!(a.data, b.data);
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn checkpoint_round_trip_preserves_state_and_evolution() {
        let mut lat = Lattice::synthetic(10, 6, 37, 0.85, 4).unwrap();
        lat.set_pad_reps(17);
        lat.step(3);
        let bytes = lat.to_bytes();
        let mut back = Lattice::from_bytes(&bytes).unwrap();
        assert_eq!(back, lat);
        back.step(2);
        lat.step(2);
        assert_eq!(back.data, lat.data);
    }

    #[test]
    fn checkpoint_rejects_corrupt_input() {
        let lat = Lattice::d2q9(4, 4, 0.8, 1).unwrap();
        let bytes = lat.to_bytes();
        assert!(matches!(
            Lattice::from_bytes(&bytes[..bytes.len() - 3]),
            Err(LbmError::BadCheckpoint(_))
        ));
        assert!(matches!(Lattice::from_bytes(b"junk"), Err(LbmError::BadCheckpoint(_))));
        assert!(matches!(
            Lattice::from_bytes(b"{\"nx\":1}\n"),
            Err(LbmError::BadCheckpoint(_))
        ));
    }

    #[test]
    fn lattice_rejects_bad_parameters() {
        assert!(Lattice::new(0, 4, d2q9_velocities(), d2q9_weights(), 0.8, 1).is_err());
        assert!(Lattice::new(4, 4, d2q9_velocities(), vec![1.0; 9], 0.8, 1).is_err());
        assert!(Lattice::new(4, 4, d2q9_velocities(), d2q9_weights(), 2.5, 1).is_err());
        let mut w = d2q9_weights();
        w.pop();
        assert!(Lattice::new(4, 4, d2q9_velocities(), w, 0.8, 1).is_err());
    }

    #[test]
    fn density_sums_all_populations() {
        let lat = Lattice::d2q9(3, 3, 0.8, 2).unwrap();
        let rho = lat.density();
        assert_eq!(rho.len(), 9);
        let plane = lat.nx * lat.ny;
        let manual: f64 = (0..lat.p()).map(|l| lat.data[l * plane + 4]).sum();
        assert_relative_eq!(rho[4], manual, max_relative = 1e-15);
        assert_relative_eq!(rho.iter().sum::<f64>(), lat.total_mass(), max_relative = 1e-12);
    }
}
