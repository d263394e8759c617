//! Continuity method: solve with data `t·g` for increasing `t`, warm starting
//! each step from the previous solutions.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use super::grid::MaskedGrid;
use super::newton::{newton_solve, NewtonParams, SolveReport};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuationParams {
    pub initial_step: f64,
    pub min_step: f64,
    pub newton: NewtonParams,
}

impl Default for ContinuationParams {
    fn default() -> Self {
        Self { initial_step: 0.1, min_step: 1e-3, newton: NewtonParams::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "t", rename_all = "snake_case")]
pub enum ContinuationStatus {
    ReachedOne,
    StalledAt(f64),
    DivergedAt(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationStep {
    pub t: f64,
    pub report: SolveReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationPath {
    /// Accepted steps; `t = 0` is the trivial solution and not recorded.
    pub steps: Vec<ContinuationStep>,
    pub status: ContinuationStatus,
    /// Rejected attempts (step halvings) over the whole path.
    pub rejections: usize,
    /// Consecutive halvings at the final `t`.
    pub halvings_at_end: usize,
    #[serde(skip)]
    pub field: Option<ScalarField>,
}

impl ContinuationPath {
    pub fn reached_one(&self) -> bool {
        self.status == ContinuationStatus::ReachedOne
    }

    pub fn last_report(&self) -> Option<&SolveReport> {
        self.steps.last().map(|s| &s.report)
    }
}

/// Marches `t` from 0 to 1 with data `t·g`.
///
/// Steps start at `initial_step`, halve on failure and double after success
/// (never above `initial_step`); the path stalls once the step drops below
/// `min_step`. Data that is constant over all cut points gives a solution
/// independent of the path, so it is solved in a single step.
pub fn continuity_solve(grid: Arc<MaskedGrid>, g: &[f64], params: &ContinuationParams) -> Result<ContinuationPath> {
    let scaled = |t: f64| g.iter().map(|v| t * v).collect::<Vec<f64>>();
    let constant = g.iter().all(|v| (v - g[0]).abs() <= 1e-14 * (1.0 + g[0].abs()));
    if constant || g.is_empty() {
        let (field, report) = newton_solve(grid, g.to_vec(), None, &params.newton)?;
        let ok = report.converged;
        return Ok(ContinuationPath {
            status: if ok { ContinuationStatus::ReachedOne } else { ContinuationStatus::StalledAt(0.0) },
            steps: vec![ContinuationStep { t: 1.0, report }],
            rejections: usize::from(!ok),
            halvings_at_end: 0,
            field: ok.then_some(field),
        });
    }
    let n = grid.n_interior();
    let mut t = 0.0;
    let mut u = vec![0.0; n];
    let mut prev: Option<(f64, Vec<f64>)> = None;
    let mut step = params.initial_step;
    let mut steps = Vec::new();
    let mut rejections = 0;
    let mut halvings = 0;
    let mut field = None;
    let mut diverged = false;
    while t < 1.0 {
        let t_try = (t + step).min(1.0);
        // Secant predictor from the last two accepted solutions.
        let guess: Vec<f64> = match &prev {
            Some((tp, up)) => {
                let w = (t_try - t) / (t - tp);
                u.iter().zip(up).map(|(a, b)| a + w * (a - b)).collect()
            }
            None => u.iter().map(|a| a * if t > 0.0 { t_try / t } else { 1.0 }).collect(),
        };
        let start = if t == 0.0 && prev.is_none() { None } else { Some(guess.as_slice()) };
        let (f, report) = newton_solve(grid.clone(), scaled(t_try), start, &params.newton)?;
        if report.converged {
            prev = Some((t, std::mem::replace(&mut u, f.u.clone())));
            t = t_try;
            field = Some(f);
            steps.push(ContinuationStep { t, report });
            halvings = 0;
            diverged = false;
            step = (2.0 * step).min(params.initial_step);
        } else {
            diverged = !report.residual.is_finite();
            rejections += 1;
            halvings += 1;
            step *= 0.5;
            if step < params.min_step {
                break;
            }
        }
    }
    let status = if t >= 1.0 {
        ContinuationStatus::ReachedOne
    } else if diverged {
        ContinuationStatus::DivergedAt(t)
    } else {
        ContinuationStatus::StalledAt(t)
    };
    Ok(ContinuationPath { steps, status, rejections, halvings_at_end: halvings, field })
}
