//! Interleaved estimate of a target gate's `chi_00` and its uncertainty bound.
//!
//! The composite error `E_T o E` satisfies
//! `|chi_comp - chi_ref chi_T| <= 2 sqrt((1-chi_ref) chi_ref (1-chi_T) chi_T) + (1-chi_ref)(1-chi_T)`.
//! The point estimate is `chi_comp / chi_ref`. Two intervals are produced:
//!
//! - `plug_in`: the point estimate widened by the slack evaluated at the
//!   point estimate, `chi_T ± slack / chi_ref`;
//! - `implicit`: every `chi_T` in `[0, 1]` satisfying the inequality,
//!   located by a grid scan plus bisection on the boundary crossings.

use serde::Serialize;

use crate::error::{Error, Result};

const SCAN_STEPS: usize = 20_000;
const BISECTION_TOL: f64 = 1e-8;

/// Right-hand side of the composition bound.
pub fn bound_slack(chi_ref: f64, chi_target: f64) -> f64 {
    let cross = ((1.0 - chi_ref) * chi_ref * (1.0 - chi_target) * chi_target).max(0.0);
    2.0 * cross.sqrt() + (1.0 - chi_ref) * (1.0 - chi_target)
}

/// Whether `(chi_comp, chi_ref, chi_target)` satisfies the bound within `slack_tol`.
pub fn bound_holds(chi_comp: f64, chi_ref: f64, chi_target: f64, slack_tol: f64) -> bool {
    (chi_comp - chi_ref * chi_target).abs() <= bound_slack(chi_ref, chi_target) + slack_tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiBound {
    /// `chi_comp / chi_ref` clipped to `[0, 1]`.
    pub point: f64,
    pub plug_in: [f64; 2],
    pub implicit: [f64; 2],
}

pub fn interleaved_bound(chi_comp: f64, chi_ref: f64) -> Result<ChiBound> {
    if !chi_comp.is_finite() || !chi_ref.is_finite() {
        return Err(Error::invalid("chi values must be finite"));
    }
    if chi_ref <= 0.0 || chi_ref > 1.0 + 1e-12 {
        return Err(Error::invalid(format!(
            "reference chi_00 = {chi_ref} outside (0, 1]: point estimate undefined"
        )));
    }
    let chi_ref = chi_ref.min(1.0);
    let point = (chi_comp / chi_ref).clamp(0.0, 1.0);

    let slack = bound_slack(chi_ref, point) / chi_ref;
    let plug_in = [(point - slack).max(0.0), (point + slack).min(1.0)];

    let implicit = implicit_interval(chi_comp, chi_ref, point)?;
    Ok(ChiBound {
        point,
        plug_in,
        implicit,
    })
}

fn implicit_interval(chi_comp: f64, chi_ref: f64, point: f64) -> Result<[f64; 2]> {
    let feasible = |t: f64| bound_holds(chi_comp, chi_ref, t, 0.0);
    let mut grid: Vec<f64> = (0..=SCAN_STEPS)
        .map(|i| i as f64 / SCAN_STEPS as f64)
        .collect();
    grid.push(point);
    grid.sort_by(f64::total_cmp);
    let flags: Vec<bool> = grid.iter().map(|&t| feasible(t)).collect();
    let (Some(first), Some(last)) = (
        flags.iter().position(|&f| f),
        flags.iter().rposition(|&f| f),
    ) else {
        return Err(Error::invalid(format!(
            "no chi_T in [0, 1] is consistent with chi_comp = {chi_comp}, chi_ref = {chi_ref}"
        )));
    };
    let low = if first == 0 {
        grid[0]
    } else {
        bisect(&feasible, grid[first - 1], grid[first])
    };
    let high = if last + 1 == grid.len() {
        grid[last]
    } else {
        bisect(&feasible, grid[last + 1], grid[last])
    };
    Ok([low, high])
}

/// Boundary between an infeasible `outside` and a feasible `inside` point.
fn bisect(feasible: &impl Fn(f64) -> bool, mut outside: f64, mut inside: f64) -> f64 {
    while (outside - inside).abs() > BISECTION_TOL {
        let mid = 0.5 * (outside + inside);
        if feasible(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}
