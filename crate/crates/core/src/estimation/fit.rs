//! Weighted least-squares fits of exponential decays.
//!
//! Both models are solved with a small Levenberg-Marquardt loop. Weights are
//! inverse standard errors; if any standard error is zero (exact
//! expectations) every point gets unit weight.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub const RATE_CEILING: f64 = 1.05;
const RATE_FLOOR: f64 = 1e-12;
const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPoint {
    pub m: f64,
    pub y: f64,
    pub stderr: f64,
}

impl DecayPoint {
    pub fn new(m: f64, y: f64, stderr: f64) -> Self {
        DecayPoint { m, y, stderr }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub amplitude: f64,
    pub rate: f64,
    /// Constant term, for the model `a p^m + c`.
    pub offset: Option<f64>,
    pub amplitude_err: f64,
    pub rate_err: f64,
    pub offset_err: Option<f64>,
    /// Norm of the weighted residual vector.
    pub residual_norm: f64,
    pub iterations: usize,
    /// The rate ended on the `(0, 1.05]` boundary.
    pub rate_clamped: bool,
    pub weighted: bool,
}

impl ExponentialFit {
    pub fn predict(&self, m: f64) -> f64 {
        self.amplitude * self.rate.powf(m) + self.offset.unwrap_or(0.0)
    }
}

fn weights(points: &[DecayPoint]) -> (Vec<f64>, bool) {
    let usable = points
        .iter()
        .all(|p| p.stderr.is_finite() && p.stderr > 0.0);
    if usable {
        (points.iter().map(|p| 1.0 / p.stderr).collect(), true)
    } else {
        (vec![1.0; points.len()], false)
    }
}

fn check_points(points: &[DecayPoint], min_points: usize) -> Result<()> {
    if points
        .iter()
        .any(|p| !p.m.is_finite() || !p.y.is_finite() || p.stderr.is_nan())
    {
        return Err(Error::fit("non-finite data point", 0, f64::NAN));
    }
    let mut lengths: Vec<f64> = points.iter().map(|p| p.m).collect();
    lengths.sort_by(f64::total_cmp);
    lengths.dedup();
    if lengths.len() < min_points {
        return Err(Error::fit(
            format!(
                "need at least {min_points} distinct lengths, got {}",
                lengths.len()
            ),
            0,
            f64::NAN,
        ));
    }
    Ok(())
}

/// Fit `y = a p^m` by weighted least squares.
///
/// Starts from a log-linear regression over the positive points.
pub fn fit_single_exponential(points: &[DecayPoint]) -> Result<ExponentialFit> {
    check_points(points, 3)?;
    let positive: Vec<&DecayPoint> = points.iter().filter(|p| p.y > 0.0).collect();
    if positive.len() < 2 {
        return Err(Error::fit(
            "need at least two points with y > 0",
            0,
            f64::NAN,
        ));
    }
    let (log_a, log_p) = linear_regression(positive.iter().map(|p| (p.m, p.y.ln())));
    let guess = if log_a.is_finite() && log_p.is_finite() {
        [log_a.exp(), clamp_rate(log_p.exp())]
    } else {
        [positive[0].y, 0.9]
    };
    let model = |theta: &[f64], m: f64, grad: &mut [f64]| {
        let (a, p) = (theta[0], theta[1]);
        let pm = p.powf(m);
        grad[0] = pm;
        grad[1] = if m == 0.0 {
            0.0
        } else {
            a * m * p.powf(m - 1.0)
        };
        a * pm
    };
    let out = levenberg_marquardt(points, &guess, model, 1)?;
    Ok(ExponentialFit {
        amplitude: out.params[0],
        rate: out.params[1],
        offset: None,
        amplitude_err: out.errors[0],
        rate_err: out.errors[1],
        offset_err: None,
        residual_norm: out.residual_norm,
        iterations: out.iterations,
        rate_clamped: out.clamped,
        weighted: out.weighted,
    })
}

/// Fit `y = a p^m + c` by weighted least squares.
///
/// The starting rate is picked by a grid search on which `a` and `c` are
/// solved linearly.
pub fn fit_exponential_with_offset(points: &[DecayPoint]) -> Result<ExponentialFit> {
    check_points(points, 4)?;
    let (w, _) = weights(points);
    let mut best: Option<(f64, [f64; 3])> = None;
    for i in 1..=2000 {
        let p = RATE_CEILING * i as f64 / 2000.0;
        if let Some((a, c, cost)) = linear_amplitudes(points, &w, p) {
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, [a, p, c]));
            }
        }
    }
    let Some((_, guess)) = best else {
        return Err(Error::fit("degenerate data for offset model", 0, f64::NAN));
    };
    let model = |theta: &[f64], m: f64, grad: &mut [f64]| {
        let (a, p) = (theta[0], theta[1]);
        let pm = p.powf(m);
        grad[0] = pm;
        grad[1] = if m == 0.0 {
            0.0
        } else {
            a * m * p.powf(m - 1.0)
        };
        grad[2] = 1.0;
        a * pm + theta[2]
    };
    let out = levenberg_marquardt(points, &guess, model, 1)?;
    Ok(ExponentialFit {
        amplitude: out.params[0],
        rate: out.params[1],
        offset: Some(out.params[2]),
        amplitude_err: out.errors[0],
        rate_err: out.errors[1],
        offset_err: Some(out.errors[2]),
        residual_norm: out.residual_norm,
        iterations: out.iterations,
        rate_clamped: out.clamped,
        weighted: out.weighted,
    })
}

/// Ordinary least squares `y = intercept + slope x`.
fn linear_regression(xy: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = xy.collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Weighted linear solve for `(a, c)` at a fixed rate; returns the cost too.
fn linear_amplitudes(points: &[DecayPoint], w: &[f64], p: f64) -> Option<(f64, f64, f64)> {
    let mut ata = [[0.0; 2]; 2];
    let mut atb = [0.0; 2];
    for (pt, wi) in points.iter().zip(w) {
        let row = [wi * p.powf(pt.m), *wi];
        let b = wi * pt.y;
        for r in 0..2 {
            atb[r] += row[r] * b;
            for c in 0..2 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    let a = (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det;
    let c = (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det;
    let cost = points
        .iter()
        .zip(w)
        .map(|(pt, wi)| (wi * (pt.y - a * p.powf(pt.m) - c)).powi(2))
        .sum();
    Some((a, c, cost))
}

fn clamp_rate(p: f64) -> f64 {
    p.clamp(RATE_FLOOR, RATE_CEILING)
}

struct LmOutcome {
    params: Vec<f64>,
    errors: Vec<f64>,
    residual_norm: f64,
    iterations: usize,
    clamped: bool,
    weighted: bool,
}

/// Levenberg-Marquardt with the rate parameter (index `rate_index`) kept in
/// `[1e-12, 1.05]`. `model` returns the prediction and fills the gradient.
fn levenberg_marquardt<F>(
    points: &[DecayPoint],
    guess: &[f64],
    model: F,
    rate_index: usize,
) -> Result<LmOutcome>
where
    F: Fn(&[f64], f64, &mut [f64]) -> f64,
{
    let n = points.len();
    let k = guess.len();
    let (w, weighted) = weights(points);

    let evaluate = |theta: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let mut r = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, k);
        let mut grad = vec![0.0; k];
        for (i, pt) in points.iter().enumerate() {
            let f = model(theta, pt.m, &mut grad);
            r[i] = w[i] * (pt.y - f);
            for c in 0..k {
                jac[(i, c)] = w[i] * grad[c];
            }
        }
        (r, jac)
    };

    let mut theta = guess.to_vec();
    theta[rate_index] = clamp_rate(theta[rate_index]);
    let (mut r, mut jac) = evaluate(&theta);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        if cost <= 1e-300 {
            converged = true;
            break;
        }
        let mut jtj = jac.transpose() * &jac;
        let mut jtr = jac.transpose() * &r;
        // freeze a rate pinned at a bound while descent points outward
        let rate = theta[rate_index];
        let g = jtr[rate_index];
        if (rate >= RATE_CEILING && g > 0.0) || (rate <= RATE_FLOOR && g < 0.0) {
            jtr[rate_index] = 0.0;
            for d in 0..k {
                jtj[(rate_index, d)] = 0.0;
                jtj[(d, rate_index)] = 0.0;
            }
            jtj[(rate_index, rate_index)] = 1.0;
        }
        if jtr.amax() <= 1e-15 * (1.0 + cost.sqrt()) * (1.0 + jtj.amax().sqrt()) {
            converged = true;
            break;
        }
        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = jtj.clone();
            for d in 0..k {
                damped[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            trial[rate_index] = clamp_rate(trial[rate_index]);
            let (tr, tj) = evaluate(&trial);
            let trial_cost = tr.norm_squared();
            if trial_cost.is_finite() && trial_cost < cost {
                let step_size = theta
                    .iter()
                    .zip(&trial)
                    .map(|(a, b)| (a - b).abs() / (a.abs() + 1e-12))
                    .fold(0.0, f64::max);
                let drop = (cost - trial_cost) / cost;
                theta = trial;
                r = tr;
                jac = tj;
                cost = trial_cost;
                lambda = (lambda / 5.0).max(1e-12);
                improved = true;
                if step_size < 1e-13 || drop < 1e-15 {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            // no descent direction left at working precision
            converged = true;
        }
        if converged {
            break;
        }
    }
    let residual_norm = cost.sqrt();
    if !converged {
        return Err(Error::fit(
            "no convergence within the iteration cap",
            iterations,
            residual_norm,
        ));
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::fit(
            "non-finite parameters",
            iterations,
            residual_norm,
        ));
    }

    let dof = n.saturating_sub(k);
    let scale = if dof > 0 { cost / dof as f64 } else { 0.0 };
    let jtj = jac.transpose() * &jac;
    let errors = match jtj.try_inverse() {
        Some(cov) => (0..k)
            .map(|d| (cov[(d, d)] * scale).max(0.0).sqrt())
            .collect(),
        None => vec![f64::NAN; k],
    };
    let rate = theta[rate_index];
    let clamped = rate <= RATE_FLOOR * (1.0 + 1e-9) || rate >= RATE_CEILING * (1.0 - 1e-12);
    Ok(LmOutcome {
        params: theta,
        errors,
        residual_norm,
        iterations,
        clamped,
        weighted,
    })
}
