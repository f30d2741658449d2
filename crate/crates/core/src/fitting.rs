//! Least-squares recovery of power and timing parameters from sweep points.
//!
//! Inputs are plain `(frequency_mhz, value)` pairs: watts for the power fits,
//! seconds for the knee fit. The affine power fit is ordinary least squares;
//! the superlinear tail is fitted in log space on the residuals above a given
//! knee; the timing knee is found by scanning every observed frequency as a
//! knee candidate for the piecewise model `f * t = k * max(1, f / f_knee)`
//! and keeping the candidate with the smallest squared error.

use crate::model::{PerfModel, PowerModel, Regime};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("all points share one frequency; the slope is undetermined")]
    DegenerateFrequencies,
    #[error("frequencies must be distinct and ascending (violated at index {index})")]
    NonAscendingFrequencies { index: usize },
    #[error("residual above the linear part is not positive at {freq} MHz; cannot fit an exponential tail")]
    NonPositiveResidual { freq: f64 },
}

/// A fitted parameter set with its quality of fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult<P> {
    pub params: P,
    /// Root-mean-square residual in the unit of the dependent variable.
    pub rms_residual: f64,
    /// Number of points that entered the fit.
    pub n_points: usize,
}

/// Ordinary least squares for `y = slope * x + intercept`.
fn ols(points: &[(f64, f64)]) -> Result<(f64, f64), FitError> {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateFrequencies);
    }
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}

fn rms<F: Fn(f64) -> f64>(points: &[(f64, f64)], model: F) -> f64 {
    let ss: f64 = points.iter().map(|&(x, y)| (y - model(x)).powi(2)).sum();
    (ss / points.len() as f64).sqrt()
}

/// Fit the affine power law `p = m * f + p_static` to `(f_mhz, watts)` points.
pub fn fit_power_linear(points: &[(f64, f64)]) -> Result<FitResult<PowerModel>, FitError> {
    if points.len() < 2 {
        return Err(FitError::TooFewPoints { needed: 2, got: points.len() });
    }
    let (m, p_static) = ols(points)?;
    let params = PowerModel { m, p_static, superlinear: None };
    Ok(FitResult {
        rms_residual: rms(points, |f| params.predict_power(f)),
        n_points: points.len(),
        params,
    })
}

/// Fit the exponential tail `a * exp(b * f)` to the residuals of `linear`
/// over the points with `f >= f_knee`. The affine part of `linear` is kept
/// as is; only the tail is estimated (in log space, so every included
/// residual must be positive).
pub fn fit_power_superlinear(
    points: &[(f64, f64)],
    linear: &PowerModel,
    f_knee: f64,
) -> Result<FitResult<PowerModel>, FitError> {
    let included: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 >= f_knee)
        .map(|&(f, p)| (f, p - (linear.m * f + linear.p_static)))
        .collect();
    if included.len() < 2 {
        return Err(FitError::TooFewPoints { needed: 2, got: included.len() });
    }
    if let Some(&(freq, _)) = included.iter().find(|&&(_, r)| r <= 0.0) {
        return Err(FitError::NonPositiveResidual { freq });
    }
    let logs: Vec<(f64, f64)> = included.iter().map(|&(f, r)| (f, r.ln())).collect();
    let (b, ln_a) = ols(&logs)?;
    let params = PowerModel {
        m: linear.m,
        p_static: linear.p_static,
        superlinear: Some(crate::model::Superlinear { a: ln_a.exp(), b, f_knee }),
    };
    let measured: Vec<(f64, f64)> = points.iter().filter(|p| p.0 >= f_knee).copied().collect();
    Ok(FitResult {
        rms_residual: rms(&measured, |f| params.predict_power(f)),
        n_points: measured.len(),
        params,
    })
}

struct KneeScan {
    knee: f64,
    k: f64,
    ssr: f64,
}

/// Scan every observed frequency as the knee of `y = k * max(1, f / knee)`
/// where `y = f * t`. For a fixed knee the optimal `k` is the closed-form
/// projection `sum(y*g) / sum(g*g)` with `g = max(1, f / knee)`. Ties on the
/// squared error resolve to the lowest knee.
fn knee_scan(points: &[(f64, f64)]) -> Result<KneeScan, FitError> {
    if points.len() < 4 {
        return Err(FitError::TooFewPoints { needed: 4, got: points.len() });
    }
    for (i, w) in points.windows(2).enumerate() {
        if !(w[1].0 > w[0].0) {
            return Err(FitError::NonAscendingFrequencies { index: i + 1 });
        }
    }
    let ys: Vec<(f64, f64)> = points.iter().map(|&(f, t)| (f, f * t)).collect();
    let mut best: Option<KneeScan> = None;
    for &(knee, _) in &ys {
        let mut sgy = 0.0;
        let mut sgg = 0.0;
        for &(f, y) in &ys {
            let g = (f / knee).max(1.0);
            sgy += g * y;
            sgg += g * g;
        }
        let k = sgy / sgg;
        let ssr: f64 = ys.iter().map(|&(f, y)| (y - k * (f / knee).max(1.0)).powi(2)).sum();
        if best.as_ref().map_or(true, |b| ssr < b.ssr) {
            best = Some(KneeScan { knee, k, ssr });
        }
    }
    Ok(best.expect("non-empty candidate set"))
}

/// Fit the timing knee on `(f_mhz, seconds)` points, recovering
/// `t(f) = (k / f) * max(1, alpha * f)` with `alpha = 1 / f_knee` restricted
/// to knees observed in the data.
pub fn fit_knee(points: &[(f64, f64)]) -> Result<FitResult<PerfModel>, FitError> {
    let scan = knee_scan(points)?;
    Ok(FitResult {
        params: PerfModel { k: scan.k, alpha: 1.0 / scan.knee },
        rms_residual: (scan.ssr / points.len() as f64).sqrt(),
        n_points: points.len(),
    })
}

/// Label every observed frequency with its fitted regime: compute-bound at or
/// below the detected knee, memory-bound above it.
pub fn regime_profile(points: &[(f64, f64)]) -> Result<Vec<(f64, Regime)>, FitError> {
    let scan = knee_scan(points)?;
    Ok(points
        .iter()
        .map(|&(f, _)| {
            (f, if f <= scan.knee { Regime::ComputeBound } else { Regime::MemoryBound })
        })
        .collect())
}

// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PerfModel, PowerModel};
    use crate::rng::DetRng;
    use approx::assert_relative_eq;

    fn grid_13() -> Vec<f64> {
        crate::replay::gpu_grid_13()
    }

    #[test]
    fn linear_fit_recovers_reference_coefficients() {
        let truth = PowerModel::new(0.096, 42.94).unwrap();
        let pts: Vec<(f64, f64)> = grid_13().iter().map(|&f| (f, truth.predict_power(f))).collect();
        let fit = fit_power_linear(&pts).unwrap();
        assert_relative_eq!(fit.params.m, 0.096, max_relative = 1e-9);
        assert_relative_eq!(fit.params.p_static, 42.94, max_relative = 1e-9);
        assert!(fit.rms_residual < 1e-9);
        assert_eq!(fit.n_points, 13);
    }

    #[test]
    fn linear_fit_two_points_is_exact() {
        let fit = fit_power_linear(&[(100.0, 52.54), (200.0, 62.14)]).unwrap();
        assert_relative_eq!(fit.params.m, 0.096, max_relative = 1e-12);
        assert_relative_eq!(fit.params.p_static, 42.94, max_relative = 1e-12);
        assert_eq!(fit.rms_residual, 0.0);
    }

    #[test]
    fn linear_fit_flat_line_gives_zero_slope() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|i| (100.0 * i as f64, 77.0)).collect();
        let fit = fit_power_linear(&pts).unwrap();
        assert_eq!(fit.params.m, 0.0);
        assert_relative_eq!(fit.params.p_static, 77.0, max_relative = 1e-12);
    }

    #[test]
    fn linear_fit_rejects_degenerate_inputs() {
        assert_eq!(
            fit_power_linear(&[(650.0, 105.0)]),
            Err(FitError::TooFewPoints { needed: 2, got: 1 })
        );
        assert_eq!(
            fit_power_linear(&[(650.0, 105.0), (650.0, 106.0)]),
            Err(FitError::DegenerateFrequencies)
        );
    }

    #[test]
    fn linear_fit_offset_equivariance() {
        let mut rng = DetRng::new(17);
        for _ in 0..50 {
            let m = rng.uniform_in(0.01, 1.0);
            let p0 = rng.uniform_in(1.0, 100.0);
            let offset = rng.uniform_in(-20.0, 20.0);
            let pts: Vec<(f64, f64)> = (0..10)
                .map(|i| {
                    let f = 400.0 + 50.0 * i as f64;
                    (f, m * f + p0 + rng.standard_normal())
                })
                .collect();
            let shifted: Vec<(f64, f64)> = pts.iter().map(|&(f, p)| (f, p + offset)).collect();
            let a = fit_power_linear(&pts).unwrap();
            let b = fit_power_linear(&shifted).unwrap();
            assert_relative_eq!(a.params.m, b.params.m, max_relative = 1e-9);
            assert_relative_eq!(a.params.p_static + offset, b.params.p_static, epsilon = 1e-9);
        }
    }

    #[test]
    fn noisy_slope_recovery_rate() {
        // Gaussian noise of 2 W on 13 points spanning >300 MHz: the slope must
        // land within 5% of truth in at least 95% of seeded trials.
        let truth = PowerModel::new(0.5, 50.0).unwrap();
        let grid = grid_13();
        let mut hits = 0;
        for trial in 0..1000u64 {
            let mut rng = DetRng::new(1000 + trial);
            let pts: Vec<(f64, f64)> = grid
                .iter()
                .map(|&f| (f, truth.predict_power(f) + 2.0 * rng.standard_normal()))
                .collect();
            let fit = fit_power_linear(&pts).unwrap();
            if (fit.params.m - truth.m).abs() / truth.m <= 0.05 {
                hits += 1;
            }
        }
        assert!(hits >= 950, "only {hits}/1000 trials within 5%");
    }

    #[test]
    fn superlinear_fit_recovers_reference_tail() {
        let truth = PowerModel::new(0.109, 42.50)
            .unwrap()
            .with_superlinear(0.005, 0.0099, 650.0)
            .unwrap();
        let pts: Vec<(f64, f64)> =
            (0..10).map(|i| 650.0 + 25.0 * i as f64).map(|f| (f, truth.predict_power(f))).collect();
        let linear = PowerModel::new(0.109, 42.50).unwrap();
        let fit = fit_power_superlinear(&pts, &linear, 650.0).unwrap();
        let s = fit.params.superlinear.unwrap();
        assert_relative_eq!(s.a, 0.005, max_relative = 1e-6);
        assert_relative_eq!(s.b, 0.0099, max_relative = 1e-6);
        assert_eq!(fit.n_points, 10);
        assert!(fit.rms_residual < 1e-6);
    }

    #[test]
    fn superlinear_fit_ignores_points_below_knee() {
        let truth = PowerModel::new(0.1, 40.0)
            .unwrap()
            .with_superlinear(0.01, 0.008, 700.0)
            .unwrap();
        let mut pts: Vec<(f64, f64)> =
            (0..6).map(|i| 700.0 + 30.0 * i as f64).map(|f| (f, truth.predict_power(f))).collect();
        // Garbage below the knee must not disturb the tail fit.
        pts.insert(0, (500.0, 1.0));
        let linear = PowerModel::new(0.1, 40.0).unwrap();
        let fit = fit_power_superlinear(&pts, &linear, 700.0).unwrap();
        let s = fit.params.superlinear.unwrap();
        assert_relative_eq!(s.a, 0.01, max_relative = 1e-6);
        assert_relative_eq!(s.b, 0.008, max_relative = 1e-6);
        assert_eq!(fit.n_points, 6);
    }

    #[test]
    fn superlinear_fit_rejects_nonpositive_residuals() {
        let linear = PowerModel::new(0.1, 40.0).unwrap();
        // Second point sits exactly on the linear law: residual 0.
        let pts = [(700.0, 115.0), (750.0, 115.0)];
        assert_eq!(
            fit_power_superlinear(&pts, &linear, 700.0),
            Err(FitError::NonPositiveResidual { freq: 750.0 })
        );
        assert_eq!(
            fit_power_superlinear(&[(700.0, 115.0)], &linear, 700.0),
            Err(FitError::TooFewPoints { needed: 2, got: 1 })
        );
    }

    #[test]
    fn knee_fit_recovers_exact_grid_knee() {
        let perf = PerfModel::new(1.3, 1.0 / 650.0).unwrap();
        let pts: Vec<(f64, f64)> =
            (0..8).map(|i| 500.0 + 50.0 * i as f64).map(|f| (f, perf.predict_time(f))).collect();
        let fit = fit_knee(&pts).unwrap();
        assert_relative_eq!(fit.params.crossover_frequency(), 650.0, max_relative = 1e-12);
        assert_relative_eq!(fit.params.k, 1.3, max_relative = 1e-9);
        assert!(fit.rms_residual < 1e-9);
    }

    #[test]
    fn knee_fit_constant_ft_picks_top_frequency() {
        // f * t constant over the whole grid means no plateau was observed:
        // the knee lands on the highest frequency.
        let pts: Vec<(f64, f64)> =
            (1..=6).map(|i| 100.0 * i as f64).map(|f| (f, 2.0 / f)).collect();
        let fit = fit_knee(&pts).unwrap();
        assert_relative_eq!(fit.params.crossover_frequency(), 600.0, max_relative = 1e-12);
        assert_relative_eq!(fit.params.k, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn knee_fit_constant_time_picks_lowest_frequency() {
        // t constant means the plateau covers the whole grid: knee at the
        // lowest frequency, memory-bound everywhere above it.
        let pts: Vec<(f64, f64)> = (1..=6).map(|i| (100.0 * i as f64, 0.25)).collect();
        let fit = fit_knee(&pts).unwrap();
        assert_relative_eq!(fit.params.crossover_frequency(), 100.0, max_relative = 1e-12);
        let profile = regime_profile(&pts).unwrap();
        assert_eq!(profile[0].1, Regime::ComputeBound); // the knee itself
        assert!(profile[1..].iter().all(|&(_, r)| r == Regime::MemoryBound));
    }

    #[test]
    fn knee_fit_rejects_bad_inputs() {
        let short = [(1.0, 1.0), (2.0, 0.5), (3.0, 0.33)];
        assert_eq!(fit_knee(&short), Err(FitError::TooFewPoints { needed: 4, got: 3 }));
        let dup = [(1.0, 1.0), (2.0, 0.5), (2.0, 0.5), (3.0, 0.33)];
        assert_eq!(fit_knee(&dup), Err(FitError::NonAscendingFrequencies { index: 2 }));
    }

    #[test]
    fn knee_scan_beats_every_other_candidate() {
        // Independent re-check: the chosen knee's squared error is minimal
        // over all candidate knees, recomputed from scratch.
        let mut rng = DetRng::new(23);
        for _ in 0..50 {
            let n = 6 + rng.index(8);
            let mut f = 300.0;
            let mut pts = Vec::new();
            let f_star = rng.uniform_in(400.0, 1200.0);
            let k = rng.uniform_in(0.5, 10.0);
            for _ in 0..n {
                f += rng.uniform_in(30.0, 120.0);
                let t = (k / f) * (f / f_star).max(1.0) * (1.0 + 0.01 * rng.standard_normal());
                pts.push((f, t));
            }
            let fit = fit_knee(&pts).unwrap();
            let chosen_ssr = fit.rms_residual.powi(2) * pts.len() as f64;
            for &(cand, _) in &pts {
                let mut sgy = 0.0;
                let mut sgg = 0.0;
                for &(f, t) in &pts {
                    let g = (f / cand).max(1.0);
                    sgy += g * f * t;
                    sgg += g * g;
                }
                let c = sgy / sgg;
                let ssr: f64 =
                    pts.iter().map(|&(f, t)| (f * t - c * (f / cand).max(1.0)).powi(2)).sum();
                assert!(chosen_ssr <= ssr * (1.0 + 1e-9), "candidate {cand} beats chosen knee");
            }
        }
    }

    #[test]
    fn regime_profile_flips_exactly_above_knee() {
        let perf = PerfModel::new(1.3, 1.0 / 650.0).unwrap();
        let pts: Vec<(f64, f64)> =
            (0..8).map(|i| 500.0 + 50.0 * i as f64).map(|f| (f, perf.predict_time(f))).collect();
        let profile = regime_profile(&pts).unwrap();
        for (f, regime) in profile {
            let want = if f <= 650.0 { Regime::ComputeBound } else { Regime::MemoryBound };
            assert_eq!(regime, want, "wrong label at {f} MHz");
        }
    }

    #[test]
    fn fit_result_serializes_with_exact_keys() {
        let fit = fit_power_linear(&[(100.0, 52.54), (200.0, 62.14)]).unwrap();
        let json = serde_json::to_string(&fit).unwrap();
        for key in ["params", "rms_residual", "n_points", "m_w_per_mhz", "p_static_w"] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
