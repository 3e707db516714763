//! Decay fits, fidelity reports and the interleaved target-gate estimate.

pub mod bound;
pub mod dataset;
pub mod fit;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use bound::{bound_holds, bound_slack, interleaved_bound, ChiBound};
pub use dataset::{Combination, DecayDataset};
pub use fit::{fit_exponential_with_offset, fit_single_exponential, DecayPoint, ExponentialFit};

use crate::error::{Error, Result};
use crate::liouville::{chi00, chi00_inv};
use crate::protocol::splitmix64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions {
    pub bootstrap_resamples: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            bootstrap_resamples: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Uncertainty {
    /// Scaled covariance of the least-squares fit.
    Covariance,
    /// Resampling sequences within each length and refitting.
    Bootstrap { resamples: usize, failed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub residual_norm_p0: f64,
    pub residual_norm_p1: f64,
    pub iterations_p0: usize,
    pub iterations_p1: usize,
    pub clamped_p0: bool,
    pub clamped_p1: bool,
    pub weighted: bool,
}

/// Interleaved estimate of the target gate's average fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetGateEstimate {
    pub reference_fidelity: f64,
    pub composite_fidelity: f64,
    pub chi_reference: f64,
    pub chi_composite: f64,
    pub fidelity: f64,
    pub fidelity_err: f64,
    /// Slack evaluated at the point estimate.
    pub interval: [f64; 2],
    /// Exact solution set of the bound inequality.
    pub implicit_interval: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub p0: f64,
    pub p0_err: f64,
    pub p1: f64,
    pub p1_err: f64,
    /// Amplitude of the parity combination (`4A` with b2 toggling).
    pub amplitude0: f64,
    /// Amplitude of the faithful combination (`2B` with b2 toggling).
    pub amplitude1: f64,
    /// Constant of the faithful combination when fitted with an offset.
    pub offset1: Option<f64>,
    pub f_avg: f64,
    pub f_avg_err: f64,
    /// Bootstrap 95% percentile interval for `f_avg`.
    pub f_avg_interval: Option<[f64; 2]>,
    pub uncertainty: Uncertainty,
    pub diagnostics: FitDiagnostics,
    pub target_gate: Option<TargetGateEstimate>,
}

/// `F = 1/2 + (p0 + 2 p1) / 6` with `sigma_F = sqrt(s0^2 + 4 s1^2) / 6`.
pub fn assemble_standard(fit0: &ExponentialFit, fit1: &ExponentialFit) -> FitReport {
    let (p0, p1) = (fit0.rate, fit1.rate);
    FitReport {
        p0,
        p0_err: fit0.rate_err,
        p1,
        p1_err: fit1.rate_err,
        amplitude0: fit0.amplitude,
        amplitude1: fit1.amplitude,
        offset1: fit1.offset,
        f_avg: 0.5 + (p0 + 2.0 * p1) / 6.0,
        f_avg_err: propagated_fidelity_err(fit0.rate_err, fit1.rate_err),
        f_avg_interval: None,
        uncertainty: Uncertainty::Covariance,
        diagnostics: FitDiagnostics {
            residual_norm_p0: fit0.residual_norm,
            residual_norm_p1: fit1.residual_norm,
            iterations_p0: fit0.iterations,
            iterations_p1: fit1.iterations,
            clamped_p0: fit0.rate_clamped,
            clamped_p1: fit1.rate_clamped,
            weighted: fit0.weighted && fit1.weighted,
        },
        target_gate: None,
    }
}

fn propagated_fidelity_err(s0: f64, s1: f64) -> f64 {
    (s0 * s0 + 4.0 * s1 * s1).sqrt() / 6.0
}

fn fit_pair(
    p0_points: &[DecayPoint],
    p1_points: &[DecayPoint],
    toggle_z: bool,
) -> Result<(ExponentialFit, ExponentialFit)> {
    let fit0 = fit_single_exponential(p0_points)?;
    let fit1 = if toggle_z {
        fit_single_exponential(p1_points)?
    } else {
        fit_exponential_with_offset(p1_points)?
    };
    Ok((fit0, fit1))
}

/// Fits both decay combinations of `dataset` and assembles the fidelity.
///
/// Without b2 toggling the faithful combination carries a constant and is
/// fitted with an offset; the parity combination then assumes `B1 = 0`
/// (preparation or measurement without a Y component).
pub fn fit_dataset(dataset: &DecayDataset, options: &FitOptions) -> Result<FitReport> {
    let toggle_z = dataset.toggles_z();
    let pts0 = dataset.combination(Combination::Parity)?;
    let pts1 = dataset.combination(Combination::Faithful)?;
    let (fit0, fit1) = fit_pair(&pts0, &pts1, toggle_z)?;
    let mut report = assemble_standard(&fit0, &fit1);
    if options.bootstrap_resamples > 0 && dataset.has_samples() {
        apply_bootstrap(&mut report, dataset, options)?;
    }
    Ok(report)
}

fn apply_bootstrap(
    report: &mut FitReport,
    dataset: &DecayDataset,
    options: &FitOptions,
) -> Result<()> {
    let toggle_z = dataset.toggles_z();
    let sizes: Vec<usize> = dataset
        .rows
        .iter()
        .map(|r| r.samples.as_ref().map_or(0, Vec::len))
        .collect();
    let outcomes: Vec<Option<(f64, f64)>> = (0..options.bootstrap_resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(splitmix64(options.seed ^ splitmix64(b as u64)));
            let picks: Vec<Vec<usize>> = sizes
                .iter()
                .map(|&k| (0..k).map(|_| rng.random_range(0..k)).collect())
                .collect();
            let p0 = dataset
                .resampled_combination(Combination::Parity, &picks)
                .ok()?;
            let p1 = dataset
                .resampled_combination(Combination::Faithful, &picks)
                .ok()?;
            fit_pair(&p0, &p1, toggle_z)
                .ok()
                .map(|(a, b)| (a.rate, b.rate))
        })
        .collect();
    let good: Vec<(f64, f64)> = outcomes.iter().flatten().copied().collect();
    let failed = outcomes.len() - good.len();
    if good.len() < 2 {
        return Err(Error::fit(
            format!(
                "bootstrap: only {} of {} refits converged",
                good.len(),
                outcomes.len()
            ),
            0,
            f64::NAN,
        ));
    }
    let std = |vals: &[f64]| {
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    let p0s: Vec<f64> = good.iter().map(|g| g.0).collect();
    let p1s: Vec<f64> = good.iter().map(|g| g.1).collect();
    let mut fs: Vec<f64> = good
        .iter()
        .map(|(a, b)| 0.5 + (a + 2.0 * b) / 6.0)
        .collect();
    fs.sort_by(f64::total_cmp);
    report.p0_err = std(&p0s);
    report.p1_err = std(&p1s);
    report.f_avg_err = propagated_fidelity_err(report.p0_err, report.p1_err);
    report.f_avg_interval = Some([percentile(&fs, 0.025), percentile(&fs, 0.975)]);
    report.uncertainty = Uncertainty::Bootstrap {
        resamples: options.bootstrap_resamples,
        failed,
    };
    Ok(())
}

/// Linear-interpolated percentile of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Target-gate estimate from the reference run and the interleaved run.
///
/// Returns the interleaved report with [`FitReport::target_gate`] filled.
pub fn assemble_interleaved(reference: &FitReport, interleaved: &FitReport) -> Result<FitReport> {
    let chi_reference = chi00(reference.f_avg);
    let chi_composite = chi00(interleaved.f_avg);
    let bound = interleaved_bound(chi_composite, chi_reference)?;
    let ratio = chi_composite / chi_reference;
    // delta method on chi_T = chi_c / chi_r, with d chi = 3/2 dF
    let rel = ((1.5 * interleaved.f_avg_err / chi_composite).powi(2)
        + (1.5 * reference.f_avg_err / chi_reference).powi(2))
    .sqrt();
    let fidelity_err = (2.0 / 3.0) * (ratio * rel).abs();
    let mut report = interleaved.clone();
    report.target_gate = Some(TargetGateEstimate {
        reference_fidelity: reference.f_avg,
        composite_fidelity: interleaved.f_avg,
        chi_reference,
        chi_composite,
        fidelity: chi00_inv(bound.point),
        fidelity_err,
        interval: bound.plug_in.map(chi00_inv),
        implicit_interval: bound.implicit.map(chi00_inv),
    });
    Ok(report)
}
