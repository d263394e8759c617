//! Numerical verification of the barrier: the discrete operator applied to `ω`
//! and the frame identities along a normal fiber.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BarrierCertificate;
use crate::domain::{BoundaryData, DomainSpec};
use crate::error::{Error, Result};
use crate::geometry::{Point, Vector};
use crate::msolver::regular_operator;

/// `ω` continued across `∂Ω` through the signed distance, so that centered
/// differences are available up to the boundary.
fn omega_ext(cert: &BarrierCertificate, domain: &DomainSpec, data: &BoundaryData, z: &Point) -> f64 {
    let sd = domain.signed_distance(z);
    let limit = if cert.is_degenerate() { domain.rho0 } else { (0.5 / cert.b).min(domain.rho0) };
    if !(sd > -limit && sd < domain.rho0) {
        return f64::NAN;
    }
    match domain.nearest_foot(z) {
        Ok(foot) => data.value(foot.component, foot.s) + cert.psi(sd).0,
        Err(_) => f64::NAN,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionReport {
    pub h: f64,
    /// Lattice nodes with `0 < ρ < ε`.
    pub nodes: usize,
    /// Nodes whose stencil leaves the region where `ω` is defined (only when `ε`
    /// exceeds the tube radius).
    pub skipped: usize,
    pub max_residual: f64,
    pub worst_point: [f64; 2],
    /// Sup of third chart derivatives of `ω` over the evaluated nodes.
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Max of `M_h[ω]` over the lattice nodes of `{0 < ρ < ε}` against
/// `tol = max(1e−6, 10·h²·scale)`.
pub fn check_supersolution(cert: &BarrierCertificate, domain: &DomainSpec, data: &BoundaryData, h: f64) -> Result<SupersolutionReport> {
    if !(h > 0.0) {
        return Err(Error::Config(format!("grid spacing {h} must be positive")));
    }
    // Chart extent of the tube from its two boundary curves.
    let tube = domain.build_tube(256, 1)?;
    let mut bb = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for fiber in &tube.fibers {
        let p0 = fiber.nodes[0].point;
        let p1 = domain.model.geodesic_state(&p0, &fiber.nodes[0].tn, cert.eps)?.0;
        for p in [p0, p1] {
            bb = [bb[0].min(p.x), bb[1].max(p.x), bb[2].min(p.y), bb[3].max(p.y)];
        }
    }
    let pad = 0.05 * (bb[1] - bb[0]).max(bb[3] - bb[2]);
    let i0 = ((bb[0] - pad) / h).floor() as i64 - 3;
    let i1 = ((bb[1] + pad) / h).ceil() as i64 + 3;
    let j0 = ((bb[2] - pad) / h).floor() as i64 - 3;
    let j1 = ((bb[3] + pad) / h).ceil() as i64 + 3;
    let nx = (i1 - i0 + 1) as usize;
    let ny = (j1 - j0 + 1) as usize;
    let point = |ix: usize, iy: usize| Point::new((i0 + ix as i64) as f64 * h, (j0 + iy as i64) as f64 * h);
    let sd: Vec<f64> = (0..nx * ny).into_par_iter().map(|id| domain.signed_distance(&point(id % nx, id / nx))).collect();
    let band = cert.eps + 0.5 * domain.rho0;
    let omega: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|id| if sd[id] < band { omega_ext(cert, domain, data, &point(id % nx, id / nx)) } else { f64::NAN })
        .collect();
    let evals: Vec<(f64, f64, Point)> = (2..ny - 2)
        .into_par_iter()
        .flat_map_iter(|iy| (2..nx - 2).map(move |ix| (ix, iy)))
        .filter_map(|(ix, iy)| {
            let id = iy * nx + ix;
            if !(sd[id] > 0.0 && sd[id] < cert.eps) {
                return None;
            }
            let u = |dx: i64, dy: i64| omega[(iy as i64 + dy) as usize * nx + (ix as i64 + dx) as usize];
            let mut patch = [[0.0; 3]; 3];
            for (j, row) in patch.iter_mut().enumerate() {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = u(i as i64 - 1, j as i64 - 1);
                }
            }
            let z = point(ix, iy);
            let m = regular_operator(&domain.model, &z, h, &patch);
            let h3 = 2.0 * h * h * h;
            let dxxx = (u(2, 0) - 2.0 * u(1, 0) + 2.0 * u(-1, 0) - u(-2, 0)) / h3;
            let dyyy = (u(0, 2) - 2.0 * u(0, 1) + 2.0 * u(0, -1) - u(0, -2)) / h3;
            let dxxy = ((u(1, 1) - 2.0 * u(0, 1) + u(-1, 1)) - (u(1, -1) - 2.0 * u(0, -1) + u(-1, -1))) / h3;
            let dxyy = ((u(1, 1) - 2.0 * u(1, 0) + u(1, -1)) - (u(-1, 1) - 2.0 * u(-1, 0) + u(-1, -1))) / h3;
            let third = dxxx.abs().max(dyyy.abs()).max(dxxy.abs()).max(dxyy.abs());
            Some((m, third, z))
        })
        .collect();
    if evals.is_empty() {
        return Err(Error::Config(format!("no lattice nodes of spacing {h} inside the barrier tube")));
    }
    let total = evals.len();
    let evals: Vec<_> = evals.into_iter().filter(|(m, t, _)| m.is_finite() && t.is_finite()).collect();
    if evals.is_empty() {
        return Err(Error::Validation("barrier stencil reached beyond the extended tube at every node".into()));
    }
    let scale = evals.iter().map(|e| e.1).fold(0.0, f64::max);
    let (max_residual, worst) = evals
        .iter()
        .map(|e| (e.0, e.2))
        .fold((f64::NEG_INFINITY, Point::zeros()), |acc, e| if e.0 > acc.0 { e } else { acc });
    let tol = (10.0 * h * h * scale).max(1e-6);
    Ok(SupersolutionReport {
        h,
        nodes: evals.len(),
        skipped: total - evals.len(),
        max_residual,
        worst_point: [worst.x, worst.y],
        scale,
        tol,
        pass: max_residual <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub h: f64,
    pub component: usize,
    pub s: f64,
    pub nodes: usize,
    /// Sup of `|LHS − RHS|` along the fiber for each of the four identities.
    pub residuals: [f64; 4],
}

/// Evaluates the four frame identities on the normal fiber through `(component, s)`
/// at `t = k·ε/8`, `k = 0..=8`. Left-hand sides use the covariant Hessian of `ω`
/// from centered chart differences at step `h`:
///
/// 1. `⟨∇_{T₂}∇ω, ∇ω⟩ = II·(T₁φ)² + ψ'ψ''`
/// 2. `⟨∇_{T₂}∇ω, T₂⟩ = ψ''`
/// 3. `⟨∇_{T₁}∇ω, ∇ω⟩·T₁φ = T₁T₁φ·(T₁φ)²`
/// 4. `⟨∇_{T₁}∇ω, T₁⟩ = T₁T₁φ − ψ'·H`
///
/// with `II = H` the curvature of the level curve `{ρ = t}`; in two dimensions
/// the divergence of `T₁` within the level curve vanishes.
pub fn frame_identity_check(
    domain: &DomainSpec,
    data: &BoundaryData,
    cert: &BarrierCertificate,
    component: usize,
    s: f64,
    h: f64,
) -> Result<IdentityResiduals> {
    if cert.eps > domain.rho0 {
        return Err(Error::OutOfTube { rho: cert.eps, eps: domain.rho0 });
    }
    let ts: Vec<f64> = (0..=8).map(|k| cert.eps * k as f64 / 8.0).collect();
    let fiber = domain.normal_fiber(component, s, &ts)?;
    let (_, dphi, ddphi) = data.eval(component, fiber.s);
    let model = &domain.model;
    let mut residuals = [0.0f64; 4];
    for node in &fiber.nodes {
        let z = node.point;
        let f = |i: f64, j: f64| omega_ext(cert, domain, data, &(z + Vector::new(i * h, j * h)));
        let f0 = f(0.0, 0.0);
        let grad = Vector::new((f(1.0, 0.0) - f(-1.0, 0.0)) / (2.0 * h), (f(0.0, 1.0) - f(0.0, -1.0)) / (2.0 * h));
        let hxx = (f(1.0, 0.0) - 2.0 * f0 + f(-1.0, 0.0)) / (h * h);
        let hyy = (f(0.0, 1.0) - 2.0 * f0 + f(0.0, -1.0)) / (h * h);
        let hxy = (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / (4.0 * h * h);
        if ![f0, hxx, hyy, hxy, grad.x, grad.y].iter().all(|v| v.is_finite()) {
            return Err(Error::OutOfTube { rho: node.t, eps: domain.rho0 });
        }
        let hess = |x: &Vector, y: &Vector| -> f64 {
            x.x * (hxx * y.x + hxy * y.y) + x.y * (hxy * y.x + hyy * y.y) - model.christoffel(&z, x, y).dot(&grad)
        };
        let lam = model.lambda(&z);
        let grad_metric = grad / (lam * lam);
        let (t1, t2) = (node.t1, node.tn);
        let t1phi = dphi / node.j;
        let t1t1phi = ddphi / (node.j * node.j) - dphi * node.js / node.j.powi(3);
        let curv = node.level_curvature();
        let (_, p1, p2) = cert.psi(node.t);
        let lhs = [hess(&t2, &grad_metric), hess(&t2, &t2), hess(&t1, &grad_metric) * t1phi, hess(&t1, &t1)];
        let rhs = [curv * t1phi * t1phi + p1 * p2, p2, t1t1phi * t1phi * t1phi, t1t1phi - p1 * curv];
        for i in 0..4 {
            residuals[i] = residuals[i].max((lhs[i] - rhs[i]).abs());
        }
    }
    Ok(IdentityResiduals { h, component, s: fiber.s, nodes: fiber.nodes.len(), residuals })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityStudy {
    pub coarse: IdentityResiduals,
    pub fine: IdentityResiduals,
    /// `log₂(coarse/fine)` per identity.
    pub orders: [f64; 4],
    /// `K = residual/h²` calibrated on the coarse grid.
    pub k: [f64; 4],
    pub pass: bool,
}

/// Residuals below this are treated as exact (roundoff of second differences).
pub const IDENTITY_FLOOR: f64 = 1e-8;

/// Two-grid study at `h` and `h/2`. Each identity passes when its residuals
/// are at roundoff level or when the fine residual obeys `≤ K·h²` with `K`
/// from the coarse grid (within the order-1.8 margin).
pub fn frame_identity_study(
    domain: &DomainSpec,
    data: &BoundaryData,
    cert: &BarrierCertificate,
    component: usize,
    s: f64,
    h: f64,
) -> Result<IdentityStudy> {
    let coarse = frame_identity_check(domain, data, cert, component, s, h)?;
    let fine = frame_identity_check(domain, data, cert, component, s, h / 2.0)?;
    let mut orders = [0.0; 4];
    let mut k = [0.0; 4];
    let mut pass = true;
    for i in 0..4 {
        let (c, f) = (coarse.residuals[i], fine.residuals[i]);
        orders[i] = if c <= IDENTITY_FLOOR && f <= IDENTITY_FLOOR { f64::INFINITY } else { (c / f).log2() };
        k[i] = c / (h * h);
        pass &= f <= IDENTITY_FLOOR || orders[i] >= 1.8;
    }
    Ok(IdentityStudy { coarse, fine, orders, k, pass })
}
