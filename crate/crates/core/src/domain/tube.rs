//! Normal-exponential coordinates `(s, t) ↦ exp(x(s), t·η(s))` near the boundary.
//!
//! Along each normal geodesic the frame `T₁` is parallel transported from the
//! boundary tangent and the Jacobi field `j` of the normal variation satisfies
//! `j'' = −K j`, `j(0) = 1`, `j'(0) = −H(s)`. The level curves `{ρ = t}` then
//! have geodesic curvature `−j'/j` and `T₁(f) = ∂ₛf / j` for functions of `s`.

use rayon::prelude::*;

use super::{CurveShape, DomainSpec};
use crate::error::{Error, Result};
use crate::geometry::{integrate, MetricKind, OdeOptions, Point, RadialProfile, Vector};

const RADIUS_SAMPLES: usize = 256;
const FOOT_CHECK_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct TubeNode {
    pub s: f64,
    pub t: f64,
    pub point: Point,
    /// `T_n = ∇ρ`, the unit normal-geodesic velocity.
    pub tn: Vector,
    /// Transported unit tangent `T₁`.
    pub t1: Vector,
    pub j: f64,
    /// `∂ₜ j`.
    pub jt: f64,
    /// `∂ₛ j`.
    pub js: f64,
}

impl TubeNode {
    /// Geodesic curvature of the level curve `{ρ = t}` with respect to `T_n`.
    pub fn level_curvature(&self) -> f64 {
        -self.jt / self.j
    }
}

#[derive(Debug, Clone)]
pub struct TubeFiber {
    pub component: usize,
    pub s: f64,
    pub nodes: Vec<TubeNode>,
}

#[derive(Debug, Clone)]
pub struct TubeChart {
    pub ns: usize,
    pub nt: usize,
    pub rho0: f64,
    /// Fibers ordered by component, then by `s`.
    pub fibers: Vec<TubeFiber>,
}

impl DomainSpec {
    /// Largest `t* ≤ cap/0.9` such that sampled inward normal geodesics stay
    /// distance-minimizing to `∂Ω` on `[0, t*)`, shrunk to `min(cap, 0.9 t*)`.
    pub fn tube_radius(&self, cap: f64) -> Result<f64> {
        for (ci, comp) in self.components.iter().enumerate() {
            if let CurveShape::Spline { .. } = comp.shape {
                let spike = (0..4096)
                    .map(|i| {
                        let tau = comp.shape.period() * i as f64 / 4096.0;
                        let (_, d1, d2) = comp.shape.eval(tau);
                        (d1.x * d2.y - d1.y * d2.x).abs() / d1.norm().powi(3)
                    })
                    .fold(0.0, f64::max);
                if spike * comp.chart_spacing > 0.25 {
                    return Err(Error::Validation(format!(
                        "boundary component {ci} has curvature {spike:.3e} beyond the sample resolution"
                    )));
                }
            }
        }
        let t_max = cap / 0.9;
        let tol = 1e-9;
        let mut jobs = Vec::new();
        for (ci, comp) in self.components.iter().enumerate() {
            for i in 0..RADIUS_SAMPLES {
                jobs.push((ci, comp.length() * i as f64 / RADIUS_SAMPLES as f64));
            }
        }
        let limits = jobs
            .par_iter()
            .map(|&(ci, s)| -> Result<f64> {
                let bp = self.boundary_geometry(ci, s)?;
                let minimizing = |t: f64| -> bool {
                    match self.model.geodesic_state(&bp.point, &bp.eta, t) {
                        Ok((p, _)) => self.signed_distance(&p) >= t - tol,
                        Err(_) => false,
                    }
                };
                if minimizing(t_max) {
                    return Ok(t_max);
                }
                let (mut lo, mut hi) = (0.0, t_max);
                for _ in 0..44 {
                    let mid = 0.5 * (lo + hi);
                    if minimizing(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(lo)
            })
            .collect::<Result<Vec<f64>>>()?;
        let t_star = limits.into_iter().fold(f64::INFINITY, f64::min);
        if t_star < 1e-8 {
            return Err(Error::Validation("normal geodesics cross immediately; boundary is degenerate".into()));
        }
        let rho0 = cap.min(0.9 * t_star);
        self.validate_feet(rho0)?;
        Ok(rho0)
    }

    /// Nearest-foot uniqueness on sampled tube points.
    fn validate_feet(&self, rho0: f64) -> Result<()> {
        for (ci, comp) in self.components.iter().enumerate() {
            let len = comp.length();
            for i in 0..FOOT_CHECK_SAMPLES {
                let s = len * (i as f64 + 0.5) / FOOT_CHECK_SAMPLES as f64;
                let bp = self.boundary_geometry(ci, s)?;
                for frac in [0.25, 0.5, 0.9] {
                    let t = frac * rho0;
                    let (p, _) = self.model.geodesic_state(&bp.point, &bp.eta, t)?;
                    let foot = self.nearest_foot(&p)?;
                    let ds = (foot.s - s).abs();
                    let ds = ds.min(len - ds);
                    if foot.component != ci || ds > 1e-5 * len.max(1.0) || (foot.rho - t).abs() > 1e-6 * (1.0 + t) {
                        return Err(Error::Validation(format!(
                            "normal exponential map is not injective at component {ci}, s = {s:.6}, t = {t:.6}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn curvature_gradient(&self, p: &Point) -> Vector {
        match &self.model.kind {
            MetricKind::Euclidean | MetricKind::Hyperbolic { .. } => Vector::zeros(),
            MetricKind::Rotsym { profile: RadialProfile::Constant { .. } } => Vector::zeros(),
            MetricKind::Rotsym { .. } => {
                let h = 1e-5;
                let k = |q: Point| self.model.gaussian_curvature(&q);
                Vector::new(
                    (k(p + Vector::new(h, 0.0)) - k(p - Vector::new(h, 0.0))) / (2.0 * h),
                    (k(p + Vector::new(0.0, h)) - k(p - Vector::new(0.0, h))) / (2.0 * h),
                )
            }
        }
    }

    /// Normal fiber through boundary arc-length `s`, sampled at increasing `ts`.
    pub fn normal_fiber(&self, component: usize, s: f64, ts: &[f64]) -> Result<TubeFiber> {
        let len = self.components[component].length();
        let s = s.rem_euclid(len);
        let bp = self.boundary_geometry(component, s)?;
        let ds = 1e-4 * len;
        let hp = self.boundary_geometry(component, (s + ds).rem_euclid(len))?.h;
        let hm = self.boundary_geometry(component, (s - ds).rem_euclid(len))?.h;
        let dh = (hp - hm) / (2.0 * ds);
        let rhs = |tt: f64, y: &[f64; 10]| -> Result<[f64; 10]> {
            let x = Point::new(y[0], y[1]);
            if !self.model.in_chart(&x) {
                return Err(Error::ChartExit { param: tt });
            }
            let v = Vector::new(y[2], y[3]);
            let t1 = Vector::new(y[4], y[5]);
            let acc = -self.model.christoffel(&x, &v, &v);
            let dt1 = -self.model.christoffel(&x, &v, &t1);
            let k = self.model.gaussian_curvature(&x);
            let dk_s = y[6] * self.curvature_gradient(&x).dot(&t1);
            Ok([v.x, v.y, acc.x, acc.y, dt1.x, dt1.y, y[7], -k * y[6], y[9], -k * y[8] - dk_s * y[6]])
        };
        let mut y = [bp.point.x, bp.point.y, bp.eta.x, bp.eta.y, bp.tangent.x, bp.tangent.y, 1.0, -bp.h, 0.0, -dh];
        let mut t_prev = 0.0;
        let mut nodes = Vec::with_capacity(ts.len());
        for &t in ts {
            if t < t_prev {
                return Err(Error::Input("fiber parameters must increase".into()));
            }
            if t > t_prev {
                y = integrate(rhs, t_prev, y, t, OdeOptions::default())?;
                t_prev = t;
            }
            nodes.push(TubeNode {
                s,
                t,
                point: Point::new(y[0], y[1]),
                tn: Vector::new(y[2], y[3]),
                t1: Vector::new(y[4], y[5]),
                j: y[6],
                jt: y[7],
                js: y[8],
            });
        }
        Ok(TubeFiber { component, s, nodes })
    }

    /// `ns` fibers per component with `nt` nodes each at `t = i·ρ0/nt`.
    pub fn build_tube(&self, ns: usize, nt: usize) -> Result<TubeChart> {
        if ns == 0 || nt == 0 {
            return Err(Error::Input("tube chart needs ns, nt ≥ 1".into()));
        }
        let ts: Vec<f64> = (0..nt).map(|i| self.rho0 * i as f64 / nt as f64).collect();
        let jobs: Vec<(usize, f64)> = (0..self.components.len())
            .flat_map(|ci| {
                let len = self.components[ci].length();
                (0..ns).map(move |i| (ci, len * i as f64 / ns as f64))
            })
            .collect();
        let fibers = jobs
            .par_iter()
            .map(|&(ci, s)| self.normal_fiber(ci, s, &ts))
            .collect::<Result<Vec<_>>>()?;
        Ok(TubeChart { ns, nt, rho0: self.rho0, fibers })
    }
}
