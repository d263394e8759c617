use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use super::grid::{ArmEnd, MaskedGrid, EAST, NORTH, SOUTH, WEST};
use super::linear::{self, LinearMethod};
use super::operator::Problem;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonParams {
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest line-search factor before the iteration is declared stalled.
    pub min_damping: f64,
}

impl Default for NewtonParams {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 60, min_damping: 1.0 / 1024.0 / 1024.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Sup norm of the discrete operator at the final iterate.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub damping: Vec<f64>,
    /// Sup over cut points of the gap between the data and the linear
    /// extrapolation of the interior solution.
    pub boundary_attainment: f64,
    /// Sup of the metric gradient on arms ending at the boundary.
    pub boundary_gradient: f64,
    pub interior_gradient: f64,
    pub linear_solver: &'static str,
}

/// Gradient and boundary-attainment statistics of a grid function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientStats {
    pub boundary_attainment: f64,
    pub boundary_gradient: f64,
    pub interior_gradient: f64,
}

pub fn gradient_stats(grid: &MaskedGrid, g: &[f64], u: &[f64]) -> GradientStats {
    let value = |end: ArmEnd| match end {
        ArmEnd::Node(k) => u[k],
        ArmEnd::Cut(c) => g[c],
    };
    let centered = |k: usize, plus: usize, minus: usize| {
        let n = &grid.interior[k];
        let (hp, hm) = (n.arm[plus], n.arm[minus]);
        let (up, um) = (value(n.ends[plus]), value(n.ends[minus]));
        hm / (hp * (hp + hm)) * (up - u[k]) - hp / (hm * (hp + hm)) * (um - u[k])
    };
    let per_node: Vec<(f64, f64, f64)> = (0..grid.n_interior())
        .into_par_iter()
        .map(|k| {
            let n = &grid.interior[k];
            let dx = centered(k, EAST, WEST);
            let dy = centered(k, NORTH, SOUTH);
            let lam = grid.model.lambda(&n.point);
            let interior = (dx * dx + dy * dy).sqrt() / lam;
            let (mut attain, mut bgrad) = (0.0f64, 0.0f64);
            for d in 0..4 {
                if let ArmEnd::Cut(c) = n.ends[d] {
                    let opp = d ^ 1;
                    let h = n.arm[d];
                    let slope = (u[k] - value(n.ends[opp])) / n.arm[opp];
                    attain = attain.max((g[c] - (u[k] + h * slope)).abs());
                    let q = (g[c] - u[k]) / h;
                    let t = if d == EAST || d == WEST { dy } else { dx };
                    let dir = grid.cuts[c].point - n.point;
                    let lam_mid = grid.model.lambda(&(n.point + dir * 0.5));
                    bgrad = bgrad.max((q * q + t * t).sqrt() / lam_mid);
                }
            }
            (attain, bgrad, interior)
        })
        .collect();
    per_node.iter().fold(
        GradientStats { boundary_attainment: 0.0, boundary_gradient: 0.0, interior_gradient: 0.0 },
        |s, &(a, b, i)| GradientStats {
            boundary_attainment: s.boundary_attainment.max(a),
            boundary_gradient: s.boundary_gradient.max(b),
            interior_gradient: s.interior_gradient.max(i),
        },
    )
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solution of the Laplace–Beltrami problem with the same data (conformally
/// invariant in two dimensions, so λ drops out).
pub fn laplace_guess(grid: &MaskedGrid, g: &[f64]) -> Result<Vec<f64>> {
    let problem = Problem::new(grid, g.to_vec());
    let x0 = vec![0.0; grid.n_interior()];
    let (r, trips) = problem.linearize(&x0, true);
    let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
    let (dx, _) = linear::solve(grid.n_interior(), &trips, &rhs)?;
    Ok(problem.u_of_x(&dx))
}

/// Damped Newton iteration for `M_h[u] = 0` with Dirichlet data `g` at the
/// cut points, starting from `guess` (interior values) or the Laplace solution.
pub fn newton_solve(grid: Arc<MaskedGrid>, g: Vec<f64>, guess: Option<&[f64]>, params: &NewtonParams) -> Result<(ScalarField, SolveReport)> {
    let n = grid.n_interior();
    let problem = Problem::new(&grid, g.clone());
    let mut x = match guess {
        Some(u) => problem.x_of_u(u),
        None => problem.x_of_u(&laplace_guess(&grid, &g)?),
    };
    let mut r = problem.residual(&x, false);
    let mut history = vec![sup(&r)];
    let mut damping = Vec::new();
    let mut method = LinearMethod::Lu;
    let mut iterations = 0;
    let mut converged = history[0] <= params.tol;
    while !converged && iterations < params.max_iter && history.last().unwrap().is_finite() {
        let (res, trips) = problem.linearize(&x, false);
        let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
        let (dx, m) = linear::solve(n, &trips, &rhs)?;
        if m == LinearMethod::BiCgStab {
            method = m;
        }
        iterations += 1;
        let norm0 = l2(&r);
        let mut alpha = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + alpha * b).collect();
            let rt = problem.residual(&trial, false);
            let nt = l2(&rt);
            if nt.is_finite() && (nt < norm0 || sup(&rt) <= params.tol) {
                x = trial;
                r = rt;
                break true;
            }
            alpha *= 0.5;
            if alpha < params.min_damping {
                break false;
            }
        };
        if !accepted {
            break;
        }
        damping.push(alpha);
        history.push(sup(&r));
        converged = *history.last().unwrap() <= params.tol;
    }
    let u = problem.u_of_x(&x);
    let stats = gradient_stats(&grid, &g, &u);
    let report = SolveReport {
        converged,
        iterations,
        residual: *history.last().unwrap(),
        residual_history: history,
        damping,
        boundary_attainment: stats.boundary_attainment,
        boundary_gradient: stats.boundary_gradient,
        interior_gradient: stats.interior_gradient,
        linear_solver: match method {
            LinearMethod::Lu => "sparse_lu",
            LinearMethod::BiCgStab => "bicgstab",
        },
    };
    Ok((ScalarField::new(grid, g, u), report))
}
