//! Two-dimensional conformal metrics `g = λ(z)² (dx² + dy²)`.
//!
//! Distances are closed form for the flat plane and the Poincaré disk; all
//! other quantities (geodesics, transport) come from the geodesic ODE with
//! Christoffel symbols `Γᵏᵢⱼ = δᵢₖ∂ⱼL + δⱼₖ∂ᵢL − δᵢⱼ∂ₖL`, `L = ln λ`.

mod ode;

pub use ode::{integrate, OdeOptions};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;
pub type Vector = Vector2<f64>;

/// Radial conformal factor `λ(r)` for rotationally symmetric metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RadialProfile {
    Constant { value: f64 },
    /// `λ(r) = base + amplitude·exp(−r²/width²)`
    GaussianBump { base: f64, amplitude: f64, width: f64 },
}

impl RadialProfile {
    pub fn lambda(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Constant { value } => value,
            RadialProfile::GaussianBump { base, amplitude, width } => {
                base + amplitude * (-(r * r) / (width * width)).exp()
            }
        }
    }

    /// `(L, L'/r, L'')` for `L = ln λ`; `L'/r` is finite at the origin.
    fn log_derivs(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            RadialProfile::Constant { value } => (value.ln(), 0.0, 0.0),
            RadialProfile::GaussianBump { base, amplitude, width } => {
                let w2 = width * width;
                let e = (-(r * r) / w2).exp();
                let lam = base + amplitude * e;
                let dlam_over_r = -2.0 * amplitude * e / w2;
                let d2lam = amplitude * e * (-2.0 / w2 + 4.0 * r * r / (w2 * w2));
                let l1_over_r = dlam_over_r / lam;
                let l1 = r * l1_over_r;
                (lam.ln(), l1_over_r, d2lam / lam - l1 * l1)
            }
        }
    }

    fn is_positive(&self) -> bool {
        match *self {
            RadialProfile::Constant { value } => value > 0.0,
            RadialProfile::GaussianBump { base, amplitude, width } => {
                base > 0.0 && base + amplitude.min(0.0) > 0.0 && width > 0.0
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricKind {
    Euclidean,
    /// Poincaré disk with `λ = 2/(k(1−|z|²))`, curvature `−k²`.
    Hyperbolic { k: f64 },
    Rotsym { profile: RadialProfile },
}

/// First and second coordinate derivatives of `L = ln λ`.
#[derive(Debug, Clone, Copy)]
pub struct LogLambdaDerivs {
    pub value: f64,
    pub grad: Vector,
    pub hess: Matrix2<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Curvature {
    /// Gaussian curvature.
    pub k: f64,
    /// Ricci form in chart coordinates (`K·g` in two dimensions).
    pub ric: Matrix2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricModel {
    #[serde(flatten)]
    pub kind: MetricKind,
    /// Dimension parameter for the barrier-constant formulas.
    #[serde(default = "default_dimension")]
    pub n: usize,
}

fn default_dimension() -> usize {
    2
}

impl MetricModel {
    pub fn euclidean() -> Self {
        Self { kind: MetricKind::Euclidean, n: 2 }
    }

    pub fn hyperbolic(k: f64) -> Self {
        Self { kind: MetricKind::Hyperbolic { k }, n: 2 }
    }

    pub fn rotsym(profile: RadialProfile) -> Self {
        Self { kind: MetricKind::Rotsym { profile }, n: 2 }
    }

    pub fn with_dimension(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Input(format!("dimension n = {} must be at least 2", self.n)));
        }
        match &self.kind {
            MetricKind::Euclidean => Ok(()),
            MetricKind::Hyperbolic { k } if *k > 0.0 && k.is_finite() => Ok(()),
            MetricKind::Hyperbolic { k } => Err(Error::Input(format!("hyperbolic k = {k} must be positive"))),
            MetricKind::Rotsym { profile } if profile.is_positive() => Ok(()),
            MetricKind::Rotsym { .. } => Err(Error::Input("radial profile must be positive".into())),
        }
    }

    pub fn is_hyperbolic(&self) -> Option<f64> {
        match self.kind {
            MetricKind::Hyperbolic { k } => Some(k),
            _ => None,
        }
    }

    /// True when the model is invariant under rotations about the origin.
    pub fn is_radial(&self) -> bool {
        !matches!(self.kind, MetricKind::Euclidean)
    }

    pub fn in_chart(&self, p: &Point) -> bool {
        match self.kind {
            MetricKind::Hyperbolic { .. } => p.norm_squared() < 1.0,
            _ => p.x.is_finite() && p.y.is_finite(),
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.in_chart(p) {
            Ok(())
        } else {
            Err(Error::OutsideChart(*p))
        }
    }

    /// Conformal factor. Callers are responsible for `p` being in the chart.
    pub fn lambda(&self, p: &Point) -> f64 {
        match &self.kind {
            MetricKind::Euclidean => 1.0,
            MetricKind::Hyperbolic { k } => 2.0 / (k * (1.0 - p.norm_squared())),
            MetricKind::Rotsym { profile } => profile.lambda(p.norm()),
        }
    }

    pub fn log_lambda(&self, p: &Point) -> LogLambdaDerivs {
        match &self.kind {
            MetricKind::Euclidean => LogLambdaDerivs {
                value: 0.0,
                grad: Vector::zeros(),
                hess: Matrix2::zeros(),
            },
            MetricKind::Hyperbolic { k } => {
                let s = 1.0 - p.norm_squared();
                LogLambdaDerivs {
                    value: (2.0 / k).ln() - s.ln(),
                    grad: p * (2.0 / s),
                    hess: Matrix2::identity() * (2.0 / s) + p * p.transpose() * (4.0 / (s * s)),
                }
            }
            MetricKind::Rotsym { profile } => {
                let r = p.norm();
                let (l, l1r, l2) = profile.log_derivs(r);
                let mut hess = Matrix2::identity() * l1r;
                if r > 1e-12 {
                    hess += p * p.transpose() * ((l2 - l1r) / (r * r));
                }
                LogLambdaDerivs { value: l, grad: p * l1r, hess }
            }
        }
    }

    /// Gaussian curvature `K = −ΔL/λ²`, without the chart check.
    pub fn gaussian_curvature(&self, p: &Point) -> f64 {
        let d = self.log_lambda(p);
        let lam = self.lambda(p);
        -(d.hess[(0, 0)] + d.hess[(1, 1)]) / (lam * lam)
    }

    pub fn curvature_at(&self, p: &Point) -> Result<Curvature> {
        self.check(p)?;
        let k = self.gaussian_curvature(p);
        let lam = self.lambda(p);
        Ok(Curvature {
            k,
            ric: Matrix2::identity() * (k * lam * lam),
        })
    }

    pub fn inner(&self, p: &Point, a: &Vector, b: &Vector) -> f64 {
        let lam = self.lambda(p);
        lam * lam * a.dot(b)
    }

    pub fn norm(&self, p: &Point, a: &Vector) -> f64 {
        self.lambda(p) * a.norm()
    }

    /// Christoffel contraction `Γ(a, b)ᵏ = Γᵏᵢⱼ aⁱ bʲ`.
    pub fn christoffel(&self, p: &Point, a: &Vector, b: &Vector) -> Vector {
        let g = self.log_lambda(p).grad;
        a * g.dot(b) + b * g.dot(a) - g * a.dot(b)
    }

    /// Riemannian distance; closed form except for rotationally symmetric
    /// profiles, which fall back to geodesic shooting.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        match &self.kind {
            MetricKind::Euclidean => Ok((p - q).norm()),
            MetricKind::Hyperbolic { k } => Ok(hyperbolic_distance(*k, p, q)),
            MetricKind::Rotsym { profile } => {
                if let RadialProfile::Constant { value } = profile {
                    return Ok(value * (p - q).norm());
                }
                self.shooting_distance(p, q)
            }
        }
    }

    fn shooting_distance(&self, p: &Point, q: &Point) -> Result<f64> {
        let chord = q - p;
        let len = chord.norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        // Straight-segment length bounds the distance from above.
        let upper = segment_length(self, p, q);
        let mut theta = chord.y.atan2(chord.x);
        let mut big_t = upper;
        let endpoint = |theta: f64, t: f64| -> Result<Point> {
            let dir = Vector::new(theta.cos(), theta.sin()) / self.lambda(p);
            self.geodesic(p, &dir, t)
        };
        let mut best = upper;
        for _ in 0..60 {
            let e = endpoint(theta, big_t)? - q;
            if e.norm() <= 1e-13 * (1.0 + q.norm()) {
                return Ok(big_t);
            }
            best = big_t;
            let dth = 1e-7;
            let dt = 1e-7 * big_t.max(1e-3);
            let ja = (endpoint(theta + dth, big_t)? - q - e) / dth;
            let jb = (endpoint(theta, big_t + dt)? - q - e) / dt;
            let jac = Matrix2::from_columns(&[ja, jb]);
            let Some(inv) = jac.try_inverse() else { break };
            let step = inv * e;
            let mut damp = 1.0;
            while big_t - damp * step.y <= 0.0 {
                damp *= 0.5;
            }
            theta -= damp * step.x;
            big_t -= damp * step.y;
        }
        Err(Error::NonConvergence {
            what: "geodesic shooting",
            best,
            lower: 0.0,
            upper,
        })
    }

    /// Point and velocity after metric arc-length `t` along the geodesic
    /// from `p` with initial velocity `v`.
    pub fn geodesic_state(&self, p: &Point, v: &Vector, t: f64) -> Result<(Point, Vector)> {
        self.check(p)?;
        let y0 = [p.x, p.y, v.x, v.y];
        let y = integrate(
            |s, y: &[f64; 4]| {
                let x = Point::new(y[0], y[1]);
                if !self.in_chart(&x) {
                    return Err(Error::ChartExit { param: s });
                }
                let vel = Vector::new(y[2], y[3]);
                let acc = -self.christoffel(&x, &vel, &vel);
                Ok([vel.x, vel.y, acc.x, acc.y])
            },
            0.0,
            y0,
            t,
            OdeOptions::default(),
        )?;
        let end = Point::new(y[0], y[1]);
        self.check(&end).map_err(|_| Error::ChartExit { param: t })?;
        Ok((end, Vector::new(y[2], y[3])))
    }

    pub fn geodesic(&self, p: &Point, v: &Vector, t: f64) -> Result<Point> {
        let speed = self.norm(p, v);
        if (speed - 1.0).abs() > 1e-8 {
            return Err(Error::Input(format!("geodesic needs a unit vector, got metric norm {speed}")));
        }
        Ok(self.geodesic_state(p, v, t)?.0)
    }

    /// Parallel transport of `v0` along a sampled path.
    ///
    /// The path is interpolated by cubic Hermite segments in arc-length, so the
    /// transported vector keeps its metric norm to the ODE tolerance.
    pub fn parallel_transport(&self, v0: &Vector, path: &CurvePath) -> Result<Vector> {
        let mut w = *v0;
        for win in path.samples.windows(2) {
            let (s0, p0, m0) = (win[0].param, win[0].point, win[0].tangent);
            let (s1, p1, m1) = (win[1].param, win[1].point, win[1].tangent);
            let ds = s1 - s0;
            let y = integrate(
                |s, y: &[f64; 2]| {
                    let u = (s - s0) / ds;
                    let (x, dx) = hermite(u, ds, &p0, &m0, &p1, &m1);
                    if !self.in_chart(&x) {
                        return Err(Error::ChartExit { param: s });
                    }
                    let wv = Vector::new(y[0], y[1]);
                    let dw = -self.christoffel(&x, &dx, &wv);
                    Ok([dw.x, dw.y])
                },
                s0,
                [w.x, w.y],
                s1,
                OdeOptions::default(),
            )?;
            w = Vector::new(y[0], y[1]);
        }
        Ok(w)
    }

    /// Integrates the geodesic from `p` with unit velocity `v` together with
    /// the parallel transport of `w` and returns `(point, velocity, w(t))`.
    pub fn transport_along_geodesic(&self, p: &Point, v: &Vector, w: &Vector, t: f64) -> Result<(Point, Vector, Vector)> {
        self.check(p)?;
        let y = integrate(
            |s, y: &[f64; 6]| {
                let x = Point::new(y[0], y[1]);
                if !self.in_chart(&x) {
                    return Err(Error::ChartExit { param: s });
                }
                let vel = Vector::new(y[2], y[3]);
                let wv = Vector::new(y[4], y[5]);
                let acc = -self.christoffel(&x, &vel, &vel);
                let dw = -self.christoffel(&x, &vel, &wv);
                Ok([vel.x, vel.y, acc.x, acc.y, dw.x, dw.y])
            },
            0.0,
            [p.x, p.y, v.x, v.y, w.x, w.y],
            t,
            OdeOptions::default(),
        )?;
        Ok((Point::new(y[0], y[1]), Vector::new(y[2], y[3]), Vector::new(y[4], y[5])))
    }
}

/// `d(p,q) = (2/k)·asinh(|p−q| / √((1−|p|²)(1−|q|²)))`, the cancellation-free
/// form of `arccosh(1 + 2|p−q|²/((1−|p|²)(1−|q|²)))/k`.
pub fn hyperbolic_distance(k: f64, p: &Point, q: &Point) -> f64 {
    let a = 1.0 - p.norm_squared();
    let b = 1.0 - q.norm_squared();
    (2.0 / k) * ((p - q).norm() / (a * b).sqrt()).asinh()
}

fn segment_length(model: &MetricModel, p: &Point, q: &Point) -> f64 {
    // 64-panel Simpson on a smooth integrand.
    let n = 64;
    let d = q - p;
    let mut acc = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * model.lambda(&(p + d * (i as f64 / n as f64)));
    }
    acc * d.norm() / (3.0 * n as f64)
}

fn hermite(u: f64, ds: f64, p0: &Point, m0: &Vector, p1: &Point, m1: &Vector) -> (Point, Vector) {
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    let d00 = 6.0 * u2 - 6.0 * u;
    let d10 = 3.0 * u2 - 4.0 * u + 1.0;
    let d01 = -6.0 * u2 + 6.0 * u;
    let d11 = 3.0 * u2 - 2.0 * u;
    let x = p0 * h00 + m0 * (h10 * ds) + p1 * h01 + m1 * (h11 * ds);
    let dx = (p0 * d00 + p1 * d01) / ds + m0 * d10 + m1 * d11;
    (x, dx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub param: f64,
    pub point: Point,
    /// Chart components of the metric-unit tangent.
    pub tangent: Vector,
}

/// Curve sampled by metric arc-length with metric-unit tangents.
#[derive(Debug, Clone)]
pub struct CurvePath {
    pub samples: Vec<PathSample>,
    pub step: f64,
}

impl CurvePath {
    pub fn new(model: &MetricModel, samples: Vec<PathSample>, step: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Input("a path needs at least two samples".into()));
        }
        for w in samples.windows(2) {
            let ds = w[1].param - w[0].param;
            if ds <= 0.0 || ds > step * (1.0 + 1e-12) {
                return Err(Error::Input(format!("sample spacing {ds} violates step {step}")));
            }
        }
        for s in &samples {
            model.check(&s.point)?;
            let n = model.norm(&s.point, &s.tangent);
            if (n - 1.0).abs() > 1e-8 {
                return Err(Error::Input(format!("tangent has metric norm {n}")));
            }
        }
        Ok(Self { samples, step })
    }

    /// Closed geodesic circle of radius `r` about the chart origin, sampled
    /// counter-clockwise from the positive x-axis. Requires a radial model.
    pub fn origin_circle(model: &MetricModel, r: f64, count: usize) -> Result<Self> {
        let chart_r = chart_radius_for(model, r)?;
        let lam = model.lambda(&Point::new(chart_r, 0.0));
        let length = 2.0 * std::f64::consts::PI * chart_r * lam;
        let step = length / count as f64;
        let samples = (0..=count)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                PathSample {
                    param: i as f64 * step,
                    point: Point::new(chart_r * th.cos(), chart_r * th.sin()),
                    tangent: Vector::new(-th.sin(), th.cos()) / lam,
                }
            })
            .collect();
        Self::new(model, samples, step * (1.0 + 1e-9))
    }

    pub fn length(&self) -> f64 {
        self.samples.last().map(|s| s.param).unwrap_or(0.0) - self.samples[0].param
    }
}

/// Chart radius of the geodesic circle of radius `r` about the origin.
pub fn chart_radius_for(model: &MetricModel, r: f64) -> Result<f64> {
    match &model.kind {
        MetricKind::Euclidean => Ok(r),
        MetricKind::Hyperbolic { k } => Ok((k * r / 2.0).tanh()),
        MetricKind::Rotsym { .. } => {
            let (p, _) = model.geodesic_state(&Point::zeros(), &Vector::new(1.0 / model.lambda(&Point::zeros()), 0.0), r)?;
            Ok(p.norm())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bump() -> MetricModel {
        MetricModel::rotsym(RadialProfile::GaussianBump { base: 1.0, amplitude: 0.5, width: 0.8 })
    }

    #[test]
    fn flat_curvature_is_zero() {
        let m = MetricModel::euclidean();
        assert_eq!(m.curvature_at(&Point::new(3.0, -7.0)).unwrap().k, 0.0);
        let r = MetricModel::rotsym(RadialProfile::Constant { value: 1.0 });
        assert_eq!(r.curvature_at(&Point::new(0.2, 0.1)).unwrap().k, 0.0);
    }

    #[test]
    fn hyperbolic_curvature_matches_minus_k_squared() {
        for &k in &[1.0, 0.5, 2.0] {
            let m = MetricModel::hyperbolic(k);
            for p in [Point::new(0.3, 0.0), Point::new(-0.7, 0.4), Point::zeros()] {
                let c = m.curvature_at(&p).unwrap();
                assert!((c.k + k * k).abs() < 1e-10, "k={k} p={p:?} K={}", c.k);
                let lam = m.lambda(&p);
                assert!((c.ric[(0, 0)] - c.k * lam * lam).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn curvature_outside_chart_is_error() {
        let m = MetricModel::hyperbolic(1.0);
        assert!(matches!(m.curvature_at(&Point::new(1.0, 0.1)), Err(Error::OutsideChart(_))));
    }

    #[test]
    fn rotsym_curvature_matches_finite_difference_of_log_lambda() {
        // Independent route: K = −ΔL/λ² with ΔL from second differences of ln λ.
        let m = bump();
        let h = 1e-4;
        for p in [Point::new(0.3, 0.2), Point::new(-0.9, 0.5), Point::new(0.0, 0.0)] {
            let l = |q: Point| m.lambda(&q).ln();
            let lap = (l(p + Vector::new(h, 0.0)) + l(p - Vector::new(h, 0.0)) + l(p + Vector::new(0.0, h))
                + l(p - Vector::new(0.0, h))
                - 4.0 * l(p))
                / (h * h);
            let lam = m.lambda(&p);
            let k_fd = -lap / (lam * lam);
            assert!((k_fd - m.gaussian_curvature(&p)).abs() < 1e-6);
        }
    }

    #[test]
    fn distances_closed_form() {
        let e = MetricModel::euclidean();
        assert_eq!(e.distance(&Point::zeros(), &Point::new(3.0, 4.0)).unwrap(), 5.0);
        let h = MetricModel::hyperbolic(1.0);
        let d = h.distance(&Point::zeros(), &Point::new(0.5, 0.0)).unwrap();
        let expected = (1.0f64 + 2.0 * 0.25 / 0.75).acosh();
        assert!((d - expected).abs() < 1e-12);
        assert!((d - 1.098612).abs() < 1e-6);
    }

    #[test]
    fn hyperbolic_distance_agrees_with_geodesic_integration() {
        let h = MetricModel::hyperbolic(1.0);
        let p = Point::new(0.1, -0.2);
        let v = Vector::new(0.6, 0.8) / h.lambda(&p);
        let q = h.geodesic(&p, &v, 1.3).unwrap();
        assert!((h.distance(&p, &q).unwrap() - 1.3).abs() < 1e-8);
    }

    #[test]
    fn radial_geodesic_in_poincare_disk() {
        for &k in &[1.0, 2.0] {
            let h = MetricModel::hyperbolic(k);
            let v = Vector::new(1.0 / h.lambda(&Point::zeros()), 0.0);
            for &t in &[0.0, 0.4, 1.5, 3.0] {
                let q = h.geodesic(&Point::zeros(), &v, t).unwrap();
                assert!((q.x - (k * t / 2.0).tanh()).abs() < 1e-9);
                assert!(q.y.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn geodesic_identity_and_euclidean_line() {
        let e = MetricModel::euclidean();
        let p = Point::new(1.0, 2.0);
        let v = Vector::new(0.6, -0.8);
        assert_eq!(e.geodesic(&p, &v, 0.0).unwrap(), p);
        let q = e.geodesic(&p, &v, 2.5).unwrap();
        assert!((q - (p + v * 2.5)).norm() < 1e-10);
    }

    #[test]
    fn geodesic_rejects_non_unit_and_reports_chart_exit() {
        let h = MetricModel::hyperbolic(1.0);
        assert!(matches!(h.geodesic(&Point::zeros(), &Vector::new(1.0, 0.0), 1.0), Err(Error::Input(_))));
        // A geodesic never leaves the disk in finite time, but a huge parameter
        // pushes the state to the chart edge in floating point.
        let v = Vector::new(0.5, 0.0);
        let r = h.geodesic(&Point::zeros(), &v, 80.0);
        assert!(r.is_err());
    }

    #[test]
    fn rotsym_shooting_distance() {
        let m = bump();
        let p = Point::new(-0.5, 0.3);
        let v = Vector::new(0.8, 0.6) / m.lambda(&p);
        let q = m.geodesic(&p, &v, 0.7).unwrap();
        let d = m.distance(&p, &q).unwrap();
        assert!((d - 0.7).abs() / 0.7 < 1e-9, "d = {d}");
        let d_rev = m.distance(&q, &p).unwrap();
        assert!((d - d_rev).abs() < 1e-9);
    }

    #[test]
    fn transport_preserves_norm_and_flat_is_trivial() {
        let e = MetricModel::euclidean();
        let path = CurvePath::origin_circle(&e, 1.0, 64).unwrap();
        let v0 = Vector::new(0.3, 0.4);
        let v1 = e.parallel_transport(&v0, &path).unwrap();
        assert!((v1 - v0).norm() < 1e-9);

        let h = MetricModel::hyperbolic(1.0);
        let path = CurvePath::origin_circle(&h, 0.8, 256).unwrap();
        let p0 = path.samples[0].point;
        let w0 = Vector::new(0.2, -0.7);
        let w1 = h.parallel_transport(&w0, &path).unwrap();
        let p1 = path.samples.last().unwrap().point;
        assert!((h.norm(&p0, &w0) - h.norm(&p1, &w1)).abs() < 1e-8);
    }

    #[test]
    fn holonomy_around_geodesic_circle_matches_gauss_bonnet() {
        let h = MetricModel::hyperbolic(1.0);
        for &r in &[0.5, 1.0] {
            let path = CurvePath::origin_circle(&h, r, 2048).unwrap();
            let p0 = path.samples[0].point;
            let w0 = Vector::new(1.0, 0.0) / h.lambda(&p0);
            let w1 = h.parallel_transport(&w0, &path).unwrap();
            let angle = w1.y.atan2(w1.x).abs();
            let expected = (2.0 * PI * (r.cosh() - 1.0)) % (2.0 * PI);
            let expected = expected.min(2.0 * PI - expected);
            assert!((angle - expected).abs() < 1e-6, "r={r} angle={angle} expected={expected}");
        }
    }
}
