//! Closed chart curves and their metric arc-length parametrization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{chart_radius_for, MetricKind, MetricModel, Point, Vector};

/// Periodic cubic spline through uniformly spaced samples (unit spacing).
#[derive(Debug, Clone)]
pub struct PeriodicCubic {
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicCubic {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 4 {
            return Err(Error::Input("periodic spline needs at least 4 samples".into()));
        }
        let rhs: Vec<f64> = (0..n)
            .map(|i| 6.0 * (values[(i + 1) % n] - 2.0 * values[i] + values[(i + n - 1) % n]))
            .collect();
        let second = solve_cyclic(1.0, 4.0, 1.0, &rhs);
        Ok(Self { values, second })
    }

    pub fn period(&self) -> f64 {
        self.values.len() as f64
    }

    /// Value and first two derivatives at parameter `tau`.
    pub fn eval(&self, tau: f64) -> (f64, f64, f64) {
        let n = self.values.len();
        let fl = tau.floor();
        let u = tau - fl;
        let i = (fl as i64).rem_euclid(n as i64) as usize;
        let j = (i + 1) % n;
        let (y0, y1, m0, m1) = (self.values[i], self.values[j], self.second[i], self.second[j]);
        let w = 1.0 - u;
        let v = w * y0 + u * y1 + ((w * w * w - w) * m0 + (u * u * u - u) * m1) / 6.0;
        let d1 = y1 - y0 + ((1.0 - 3.0 * w * w) * m0 + (3.0 * u * u - 1.0) * m1) / 6.0;
        let d2 = w * m0 + u * m1;
        (v, d1, d2)
    }
}

/// Cyclic tridiagonal solve with constant bands (Sherman–Morrison).
fn solve_cyclic(a: f64, b: f64, c: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let gamma = -b;
    let mut diag = vec![b; n];
    diag[0] = b - gamma;
    diag[n - 1] = b - a * c / gamma;
    let thomas = |d: &[f64], r: &[f64]| -> Vec<f64> {
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c / d[0];
        dp[0] = r[0] / d[0];
        for i in 1..n {
            let m = d[i] - a * cp[i - 1];
            cp[i] = c / m;
            dp[i] = (r[i] - a * dp[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    };
    let x = thomas(&diag, rhs);
    let mut uvec = vec![0.0; n];
    uvec[0] = gamma;
    uvec[n - 1] = c;
    let z = thomas(&diag, &uvec);
    let fact = (x[0] + a * x[n - 1] / gamma) / (1.0 + z[0] + a * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

#[derive(Debug, Clone)]
pub enum CurveShape {
    /// Counter-clockwise chart circle, parameter = polar angle about `center`.
    Circle { center: Point, radius: f64 },
    /// Counter-clockwise periodic spline through chart points.
    Spline { x: PeriodicCubic, y: PeriodicCubic },
}

impl CurveShape {
    pub fn spline(points: &[Point]) -> Result<Self> {
        let mut pts = points.to_vec();
        if pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() < 1e-14 {
            pts.pop();
        }
        let area: f64 = (0..pts.len())
            .map(|i| {
                let a = pts[i];
                let b = pts[(i + 1) % pts.len()];
                a.x * b.y - b.x * a.y
            })
            .sum();
        if area == 0.0 {
            return Err(Error::Input("sampled curve encloses no area".into()));
        }
        if area < 0.0 {
            pts.reverse();
        }
        Ok(CurveShape::Spline {
            x: PeriodicCubic::new(pts.iter().map(|p| p.x).collect())?,
            y: PeriodicCubic::new(pts.iter().map(|p| p.y).collect())?,
        })
    }

    pub fn period(&self) -> f64 {
        match self {
            CurveShape::Circle { .. } => 2.0 * std::f64::consts::PI,
            CurveShape::Spline { x, .. } => x.period(),
        }
    }

    /// Position and first two derivatives in the raw parameter.
    pub fn eval(&self, tau: f64) -> (Point, Vector, Vector) {
        match self {
            CurveShape::Circle { center, radius } => {
                let (s, c) = tau.sin_cos();
                (
                    center + Vector::new(c, s) * *radius,
                    Vector::new(-s, c) * *radius,
                    Vector::new(-c, -s) * *radius,
                )
            }
            CurveShape::Spline { x, y } => {
                let (x0, x1, x2) = x.eval(tau);
                let (y0, y1, y2) = y.eval(tau);
                (Point::new(x0, y0), Vector::new(x1, y1), Vector::new(x2, y2))
            }
        }
    }

    pub fn point(&self, tau: f64) -> Point {
        self.eval(tau).0
    }
}

/// Analytic curve description as accepted from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveSpec {
    /// Circle in chart coordinates.
    Circle { center: [f64; 2], radius: f64 },
    /// Geodesic circle: `center` is a chart point, `radius` a metric length.
    GeodesicCircle { center: [f64; 2], radius: f64 },
    /// Closed polyline in chart coordinates, smoothed by a periodic spline.
    Points { points: Vec<[f64; 2]> },
}

impl CurveSpec {
    pub fn to_shape(&self, model: &MetricModel) -> Result<CurveShape> {
        match self {
            CurveSpec::Circle { center, radius } => {
                if *radius <= 0.0 {
                    return Err(Error::Input(format!("circle radius {radius} must be positive")));
                }
                Ok(CurveShape::Circle { center: Point::new(center[0], center[1]), radius: *radius })
            }
            CurveSpec::GeodesicCircle { center, radius } => {
                let c = Point::new(center[0], center[1]);
                let (cc, r) = geodesic_circle_chart(model, &c, *radius)?;
                Ok(CurveShape::Circle { center: cc, radius: r })
            }
            CurveSpec::Points { points } => {
                let pts: Vec<Point> = points.iter().map(|p| Point::new(p[0], p[1])).collect();
                CurveShape::spline(&pts)
            }
        }
    }
}

/// Chart center and radius of the geodesic circle about `center`.
pub fn geodesic_circle_chart(model: &MetricModel, center: &Point, radius: f64) -> Result<(Point, f64)> {
    model.check(center)?;
    if radius <= 0.0 {
        return Err(Error::Input(format!("geodesic radius {radius} must be positive")));
    }
    match &model.kind {
        MetricKind::Euclidean => Ok((*center, radius)),
        MetricKind::Hyperbolic { k } => {
            let t = (k * radius / 2.0).tanh();
            let c2 = center.norm_squared();
            let den = 1.0 - t * t * c2;
            Ok((center * ((1.0 - t * t) / den), t * (1.0 - c2) / den))
        }
        MetricKind::Rotsym { .. } => {
            if center.norm() > 0.0 {
                return Err(Error::Input("geodesic circles of radial metrics must be centered at the origin".into()));
            }
            Ok((*center, chart_radius_for(model, radius)?))
        }
    }
}

/// Möbius translation of the unit disk sending `c` to the origin.
pub fn mobius_to_origin(c: Complex64, z: Complex64) -> Complex64 {
    (z - c) / (Complex64::new(1.0, 0.0) - c.conj() * z)
}

pub fn mobius_from_origin(c: Complex64, w: Complex64) -> Complex64 {
    (w + c) / (Complex64::new(1.0, 0.0) + c.conj() * w)
}

pub fn to_complex(p: &Point) -> Complex64 {
    Complex64::new(p.x, p.y)
}

pub fn from_complex(z: Complex64) -> Point {
    Point::new(z.re, z.im)
}

// Five-point Gauss–Legendre on [0, 1].
const GL_X: [f64; 5] = [
    0.046_910_077_030_668_0,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GL_W: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_24,
    0.284_444_444_444_444_4,
    0.239_314_335_249_683_24,
    0.118_463_442_528_094_54,
];

/// Cumulative metric arc-length over uniform raw-parameter panels.
#[derive(Debug, Clone)]
pub struct ArcLengthTable {
    panel: f64,
    cumulative: Vec<f64>,
}

impl ArcLengthTable {
    pub fn new(shape: &CurveShape, model: &MetricModel, panels: usize) -> Result<Self> {
        let panel = shape.period() / panels as f64;
        let mut cumulative = Vec::with_capacity(panels + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for k in 0..panels {
            acc += gauss_speed(shape, model, k as f64 * panel, panel)?;
            cumulative.push(acc);
        }
        Ok(Self { panel, cumulative })
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn s_of_tau(&self, shape: &CurveShape, model: &MetricModel, tau: f64) -> f64 {
        let period = shape.period();
        let tau = tau.rem_euclid(period);
        let k = ((tau / self.panel).floor() as usize).min(self.cumulative.len() - 2);
        let t0 = k as f64 * self.panel;
        self.cumulative[k] + gauss_speed(shape, model, t0, tau - t0).unwrap_or(0.0)
    }

    pub fn tau_of_s(&self, shape: &CurveShape, model: &MetricModel, s: f64) -> f64 {
        let len = self.length();
        let s = s.rem_euclid(len);
        let k = match self.cumulative.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.cumulative.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.cumulative.len() - 2),
        };
        let (s0, s1) = (self.cumulative[k], self.cumulative[k + 1]);
        let mut tau = (k as f64 + (s - s0) / (s1 - s0)) * self.panel;
        for _ in 0..30 {
            let f = self.s_of_tau(shape, model, tau) - s;
            let (p, d, _) = shape.eval(tau);
            let speed = model.lambda(&p) * d.norm();
            let step = f / speed;
            tau -= step;
            if step.abs() < 1e-15 * (1.0 + tau.abs()) {
                break;
            }
        }
        tau
    }
}

fn gauss_speed(shape: &CurveShape, model: &MetricModel, t0: f64, dt: f64) -> Result<f64> {
    if dt == 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for (x, w) in GL_X.iter().zip(GL_W.iter()) {
        let (p, d, _) = shape.eval(t0 + x * dt);
        model.check(&p)?;
        acc += w * model.lambda(&p) * d.norm();
    }
    Ok(acc * dt)
}
