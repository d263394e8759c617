use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use super::newton::gradient_stats;
use crate::barrier::BarrierCertificate;
use crate::domain::{BoundaryData, DomainSpec};

/// Absolute slack of the maximum-principle check.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleCheck {
    pub data_min: f64,
    pub data_max: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub pass: bool,
}

/// `|u − φ(foot)| ≤ ψ(ρ) + tol` over interior nodes with `ρ < ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCheck {
    /// False when `ψ(ε) < osc φ`; the barrier then does not dominate on `{ρ = ε}`
    /// and nothing is asserted.
    pub applicable: bool,
    pub nodes: usize,
    /// `2h·(1 + sup|∇u|)` with the chart gradient.
    pub tol: f64,
    /// Largest `|u − φ(foot)| − ψ(ρ)`.
    pub worst_excess: f64,
    pub worst_point: [f64; 2],
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientBoundCheck {
    pub boundary_gradient: f64,
    /// `a·b·(1 + ‖Dφ‖)`.
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_principle: MaxPrincipleCheck,
    pub comparison: Option<ComparisonCheck>,
    pub gradient_bound: Option<GradientBoundCheck>,
}

impl Diagnostics {
    pub fn pass(&self) -> bool {
        self.max_principle.pass
            && self.comparison.is_none_or(|c| c.pass)
            && self.gradient_bound.is_none_or(|g| g.pass)
    }
}

/// `data_min − 1e−10 ≤ u ≤ data_max + 1e−10` over interior nodes.
pub fn max_principle(field: &ScalarField, data_min: f64, data_max: f64) -> MaxPrincipleCheck {
    let (u_min, u_max) = field.u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let pass = u_min >= data_min - MAX_PRINCIPLE_TOL && u_max <= data_max + MAX_PRINCIPLE_TOL;
    MaxPrincipleCheck { data_min, data_max, u_min, u_max, pass }
}

/// Maximum principle, and with a certificate the barrier comparison on the
/// tube and the boundary gradient bound.
pub fn diagnostics(field: &ScalarField, domain: &DomainSpec, data: &BoundaryData, cert: Option<&BarrierCertificate>) -> Diagnostics {
    let norms = data.norms();
    let g_lo = field.g.iter().cloned().fold(f64::INFINITY, f64::min);
    let g_hi = field.g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_principle = max_principle(field, norms.min.min(g_lo), norms.max.max(g_hi));
    let Some(cert) = cert else {
        return Diagnostics { max_principle, comparison: None, gradient_bound: None };
    };
    let grid = &field.grid;
    let stats = gradient_stats(grid, &field.g, &field.u);
    let chart_grad = grid
        .interior
        .iter()
        .map(|n| grid.model.lambda(&n.point))
        .fold(0.0f64, f64::max)
        * stats.interior_gradient.max(stats.boundary_gradient);
    let tol = 2.0 * grid.h * (1.0 + chart_grad);
    let applicable = cert.psi(cert.eps).0 >= norms.osc;
    let per_node: Vec<Option<(f64, [f64; 2])>> = grid
        .interior
        .par_iter()
        .zip(field.u.par_iter())
        .map(|(n, &u)| {
            let foot = domain.nearest_foot(&n.point).ok()?;
            if !(foot.rho < cert.eps) {
                return None;
            }
            let phi = data.value(foot.component, foot.s);
            Some(((u - phi).abs() - cert.psi(foot.rho).0, [n.point.x, n.point.y]))
        })
        .collect();
    let (mut nodes, mut worst_excess, mut worst_point) = (0, f64::NEG_INFINITY, [f64::NAN; 2]);
    for (excess, p) in per_node.into_iter().flatten() {
        nodes += 1;
        if excess > worst_excess {
            worst_excess = excess;
            worst_point = p;
        }
    }
    let comparison = ComparisonCheck {
        applicable,
        nodes,
        tol,
        worst_excess,
        worst_point,
        pass: !applicable || nodes == 0 || worst_excess <= tol,
    };
    let bound = cert.slope() * (1.0 + norms.d1);
    let slack = 0.1 * bound + 0.05;
    let gradient_bound = GradientBoundCheck {
        boundary_gradient: stats.boundary_gradient,
        bound,
        slack,
        pass: !applicable || stats.boundary_gradient <= bound + slack,
    };
    Diagnostics { max_principle, comparison: Some(comparison), gradient_bound: Some(gradient_bound) }
}
