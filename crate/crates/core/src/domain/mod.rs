//! Domains bounded by closed chart curves: boundary curvature, distance to the
//! boundary, normal-exponential tubes and boundary data.

pub mod curve;
mod data;
mod tube;

pub use curve::{ArcLengthTable, CurveShape, CurveSpec};
pub use data::{BoundaryData, DataNorms, PhiSpec};
pub use tube::{TubeChart, TubeFiber, TubeNode};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{MetricKind, MetricModel, Point, RadialProfile, Vector};
use curve::{from_complex, mobius_from_origin, mobius_to_origin, to_complex};

const ARC_PANELS: usize = 1024;
const COARSE_SAMPLES: usize = 1024;
const CURVATURE_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Bounded,
    Exterior,
}

/// Which side of a boundary curve the domain occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Inside,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub curve: CurveSpec,
    pub side: Side,
}

#[derive(Debug, Clone, Copy)]
enum FootSolver {
    /// Chart circle in a flat metric scaled by `scale`.
    FlatCircle { center: Point, radius: f64, scale: f64 },
    /// Hyperbolic circle about `center` with metric radius `radius`.
    HyperbolicCircle { k: f64, center: Complex64, chart_center: Point, radius: f64 },
    /// Origin-centered circle of a radial metric.
    RadialCircle { radius: f64 },
    Generic,
}

/// Nearest boundary point of a chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foot {
    pub component: usize,
    pub s: f64,
    pub point: Point,
    pub rho: f64,
}

/// Local geometry of the boundary at arc-length `s`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub point: Point,
    /// Metric-unit tangent in the direction of increasing `s`.
    pub tangent: Vector,
    /// Metric-unit normal pointing into the domain.
    pub eta: Vector,
    /// Geodesic curvature with respect to `eta`.
    pub h: f64,
    pub a_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub component: usize,
    pub s: f64,
}

#[derive(Debug, Clone)]
pub struct BoundaryComponent {
    pub shape: CurveShape,
    pub side: Side,
    table: ArcLengthTable,
    solver: FootSolver,
    coarse: Vec<(f64, Point)>,
    chart_spacing: f64,
}

impl BoundaryComponent {
    pub fn new(model: &MetricModel, shape: CurveShape, side: Side) -> Result<Self> {
        let period = shape.period();
        let coarse: Vec<(f64, Point)> = (0..COARSE_SAMPLES)
            .map(|i| {
                let tau = period * i as f64 / COARSE_SAMPLES as f64;
                (tau, shape.point(tau))
            })
            .collect();
        for (_, p) in &coarse {
            model.check(p)?;
        }
        let chart_spacing = coarse
            .iter()
            .zip(coarse.iter().cycle().skip(1))
            .map(|(a, b)| (a.1 - b.1).norm())
            .fold(0.0, f64::max);
        let table = ArcLengthTable::new(&shape, model, ARC_PANELS.max(4 * period as usize))?;
        let solver = match (&shape, &model.kind) {
            (CurveShape::Circle { center, radius }, MetricKind::Euclidean) => {
                FootSolver::FlatCircle { center: *center, radius: *radius, scale: 1.0 }
            }
            (CurveShape::Circle { center, radius }, MetricKind::Rotsym { profile: RadialProfile::Constant { value } }) => {
                FootSolver::FlatCircle { center: *center, radius: *radius, scale: *value }
            }
            (CurveShape::Circle { center, radius }, MetricKind::Rotsym { .. }) if center.norm() == 0.0 => {
                FootSolver::RadialCircle { radius: *radius }
            }
            (CurveShape::Circle { center, radius }, MetricKind::Hyperbolic { k }) => {
                // The diameter through the chart center meets the circle at two
                // points whose hyperbolic midpoint is the metric center.
                let dir = if center.norm() > 0.0 { center / center.norm() } else { Vector::new(1.0, 0.0) };
                let x1 = center.dot(&dir) + radius;
                let x2 = center.dot(&dir) - radius;
                let m = ((x1.atanh() + x2.atanh()) / 2.0).tanh();
                let metric_radius = (x1.atanh() - x2.atanh()) / k;
                FootSolver::HyperbolicCircle {
                    k: *k,
                    center: to_complex(&(dir * m)),
                    chart_center: *center,
                    radius: metric_radius,
                }
            }
            _ => FootSolver::Generic,
        };
        Ok(Self { shape, side, table, solver, coarse, chart_spacing })
    }

    pub fn length(&self) -> f64 {
        self.table.length()
    }

    fn sign(&self) -> f64 {
        match self.side {
            Side::Inside => 1.0,
            Side::Outside => -1.0,
        }
    }

    pub fn tau_of_s(&self, model: &MetricModel, s: f64) -> f64 {
        match self.shape {
            // Arc length is proportional to the angle on every circle handled by a
            // closed-form foot solver.
            CurveShape::Circle { .. } if !matches!(self.solver, FootSolver::Generic) => {
                s / self.length() * self.shape.period()
            }
            _ => self.table.tau_of_s(&self.shape, model, s),
        }
    }

    pub fn s_of_tau(&self, model: &MetricModel, tau: f64) -> f64 {
        match self.shape {
            CurveShape::Circle { .. } if !matches!(self.solver, FootSolver::Generic) => {
                tau.rem_euclid(self.shape.period()) / self.shape.period() * self.length()
            }
            _ => self.table.s_of_tau(&self.shape, model, tau),
        }
    }

    fn geometry_at_tau(&self, model: &MetricModel, tau: f64) -> BoundaryPoint {
        let (p, d1, d2) = self.shape.eval(tau);
        let speed = d1.norm();
        let lam = model.lambda(&p);
        let left = Vector::new(-d1.y, d1.x) / speed;
        let kappa = (d1.x * d2.y - d1.y * d2.x) / (speed * speed * speed);
        let dl = model.log_lambda(&p).grad;
        let h_left = (kappa - dl.dot(&left)) / lam;
        let h = self.sign() * h_left;
        BoundaryPoint {
            point: p,
            tangent: d1 / (speed * lam),
            eta: left * (self.sign() / lam),
            h,
            a_norm: h.abs(),
        }
    }

    /// Metric distance from `z` to this curve together with the foot parameter.
    fn foot(&self, model: &MetricModel, z: &Point) -> Result<(f64, f64)> {
        match self.solver {
            FootSolver::FlatCircle { center, radius, scale } => {
                let d = z - center;
                let tau = d.y.atan2(d.x).rem_euclid(2.0 * std::f64::consts::PI);
                Ok((scale * (d.norm() - radius).abs(), tau))
            }
            FootSolver::HyperbolicCircle { k, center, chart_center, radius } => {
                let w = mobius_to_origin(center, to_complex(z));
                let r = w.norm();
                let dist = ((2.0 / k) * r.atanh() - radius).abs();
                let dir = if r > 0.0 { w / r } else { Complex64::new(1.0, 0.0) };
                let fw = dir * (k * radius / 2.0).tanh();
                let f = from_complex(mobius_from_origin(center, fw)) - chart_center;
                Ok((dist, f.y.atan2(f.x).rem_euclid(2.0 * std::f64::consts::PI)))
            }
            FootSolver::RadialCircle { radius } => {
                let r = z.norm();
                let tau = z.y.atan2(z.x).rem_euclid(2.0 * std::f64::consts::PI);
                Ok((radial_length(model, r, radius), tau))
            }
            FootSolver::Generic => {
                let proxy = |c: &Point| -> f64 {
                    match &model.kind {
                        MetricKind::Hyperbolic { .. } => {
                            (z - c).norm_squared() / ((1.0 - z.norm_squared()) * (1.0 - c.norm_squared()))
                        }
                        _ => {
                            let lam = model.lambda(&((z + c) * 0.5));
                            lam * lam * (z - c).norm_squared()
                        }
                    }
                };
                let n = self.coarse.len();
                let vals: Vec<f64> = self.coarse.iter().map(|(_, c)| proxy(c)).collect();
                let best = (0..n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
                let step = self.shape.period() / n as f64;
                let mut candidates = vec![best];
                // Near-ties among separate local minima are refined as well.
                for i in 0..n {
                    let (l, r) = (vals[(i + n - 1) % n], vals[(i + 1) % n]);
                    if i != best && vals[i] <= l && vals[i] <= r && vals[i] <= vals[best] * 1.05 + 1e-14 {
                        candidates.push(i);
                    }
                }
                let mut out = (f64::INFINITY, 0.0);
                for i in candidates {
                    let tau = golden_min(|t| proxy(&self.shape.point(t)), self.coarse[i].0 - step, self.coarse[i].0 + step);
                    let d = model.distance(z, &self.shape.point(tau))?;
                    if d < out.0 {
                        out = (d, tau.rem_euclid(self.shape.period()));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Whether `z` lies on the domain side of this curve.
    fn on_domain_side(&self, z: &Point, foot_tau: f64) -> bool {
        let inside_curve = match self.shape {
            CurveShape::Circle { center, radius } => (z - center).norm() < radius,
            _ => {
                let (c, d1, _) = self.shape.eval(foot_tau);
                if (z - c).norm() < 3.0 * self.chart_spacing {
                    (z - c).dot(&Vector::new(-d1.y, d1.x)) > 0.0
                } else {
                    winding_number(&self.coarse, z) != 0
                }
            }
        };
        inside_curve == (self.side == Side::Inside)
    }
}

fn winding_number(poly: &[(f64, Point)], z: &Point) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i].1;
        let b = poly[(i + 1) % n].1;
        let cross = (b.x - a.x) * (z.y - a.y) - (z.x - a.x) * (b.y - a.y);
        if a.y <= z.y {
            if b.y > z.y && cross > 0.0 {
                wn += 1;
            }
        } else if b.y <= z.y && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Metric length of the radial segment between chart radii `r0` and `r1`.
fn radial_length(model: &MetricModel, r0: f64, r1: f64) -> f64 {
    const X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
    const W: [f64; 5] = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];
    let (a, b) = (r0.min(r1), r0.max(r1));
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W.iter()) {
            acc += w * model.lambda(&Point::new(mid + x * h / 2.0, 0.0));
        }
    }
    acc * h / 2.0
}

/// Domain with smooth boundary and validated normal-exponential tube.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub model: MetricModel,
    pub components: Vec<BoundaryComponent>,
    pub kind: DomainKind,
    pub rho0: f64,
}

impl DomainSpec {
    /// Builds the domain and determines its tube radius (capped by `rho0_cap`).
    pub fn new(model: MetricModel, specs: &[ComponentSpec], kind: DomainKind, rho0_cap: f64) -> Result<Self> {
        let shapes = specs
            .iter()
            .map(|c| Ok((c.curve.to_shape(&model)?, c.side)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_shapes(model, shapes, kind, rho0_cap)
    }

    pub fn from_shapes(model: MetricModel, shapes: Vec<(CurveShape, Side)>, kind: DomainKind, rho0_cap: f64) -> Result<Self> {
        model.validate()?;
        if shapes.is_empty() {
            return Err(Error::Input("domain needs at least one boundary component".into()));
        }
        if !(rho0_cap > 0.0) {
            return Err(Error::Input(format!("tube cap {rho0_cap} must be positive")));
        }
        let has_inside = shapes.iter().any(|(_, side)| *side == Side::Inside);
        match kind {
            DomainKind::Bounded if !has_inside => {
                return Err(Error::Input("a bounded domain needs a component with side = inside".into()));
            }
            DomainKind::Exterior if has_inside => {
                return Err(Error::Input("an exterior domain only has components with side = outside".into()));
            }
            DomainKind::Exterior if model.is_hyperbolic().is_none() => {
                return Err(Error::Input("exterior domains are supported on the hyperbolic disk only".into()));
            }
            _ => {}
        }
        let components = shapes
            .into_iter()
            .map(|(shape, side)| BoundaryComponent::new(&model, shape, side))
            .collect::<Result<Vec<_>>>()?;
        let mut domain = Self { model, components, kind, rho0: rho0_cap };
        domain.check_disjoint()?;
        domain.rho0 = domain.tube_radius(rho0_cap)?;
        Ok(domain)
    }

    /// Same domain with a prescribed tube radius (no revalidation).
    pub fn with_rho0(mut self, rho0: f64) -> Self {
        self.rho0 = rho0;
        self
    }

    fn check_disjoint(&self) -> Result<()> {
        for (i, ci) in self.components.iter().enumerate() {
            for (j, cj) in self.components.iter().enumerate() {
                if i == j {
                    continue;
                }
                // Every sample of curve i must be strictly on the domain side of curve j.
                for (_, p) in ci.coarse.iter().step_by(8) {
                    let (d, tau) = cj.foot(&self.model, p)?;
                    if d <= 0.0 || !cj.on_domain_side(p, tau) {
                        return Err(Error::Validation(format!(
                            "boundary components {i} and {j} intersect or are inconsistently oriented"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn boundary_geometry(&self, component: usize, s: f64) -> Result<BoundaryPoint> {
        let comp = self
            .components
            .get(component)
            .ok_or_else(|| Error::Range(format!("no boundary component {component}")))?;
        let len = comp.length();
        if !(0.0..=len).contains(&s) {
            return Err(Error::Range(format!("arc length {s} outside [0, {len})")));
        }
        Ok(comp.geometry_at_tau(&self.model, comp.tau_of_s(&self.model, s)))
    }

    fn curvature_extremum(&self, f: impl Fn(f64) -> f64, pick_min: bool) -> Extremum {
        let mut best = Extremum {
            value: if pick_min { f64::INFINITY } else { f64::NEG_INFINITY },
            component: 0,
            s: 0.0,
        };
        for (ci, comp) in self.components.iter().enumerate() {
            for i in 0..CURVATURE_SAMPLES {
                let tau = comp.shape.period() * i as f64 / CURVATURE_SAMPLES as f64;
                let v = f(comp.geometry_at_tau(&self.model, tau).h);
                if (pick_min && v < best.value) || (!pick_min && v > best.value) {
                    best = Extremum { value: v, component: ci, s: comp.s_of_tau(&self.model, tau) };
                }
            }
        }
        best
    }

    /// Infimum of the boundary geodesic curvature with its location.
    pub fn h_inf(&self) -> Extremum {
        self.curvature_extremum(|h| h, true)
    }

    pub fn a_norm_sup(&self) -> f64 {
        self.curvature_extremum(f64::abs, false).value
    }

    /// Nearest boundary point of any chart point (inside or outside the domain).
    pub fn nearest_foot(&self, z: &Point) -> Result<Foot> {
        self.model.check(z)?;
        let mut best: Option<(Foot, f64)> = None;
        for (ci, comp) in self.components.iter().enumerate() {
            let (d, tau) = comp.foot(&self.model, z)?;
            if best.as_ref().is_none_or(|(b, _)| d < b.rho) {
                let foot = Foot { component: ci, s: comp.s_of_tau(&self.model, tau), point: comp.shape.point(tau), rho: d };
                best = Some((foot, tau));
            }
        }
        Ok(best.unwrap().0)
    }

    /// Signed metric distance to `∂Ω`, positive inside the domain and `-∞`
    /// outside the chart.
    pub fn signed_distance(&self, z: &Point) -> f64 {
        if !self.model.in_chart(z) {
            return f64::NEG_INFINITY;
        }
        let mut sd = f64::INFINITY;
        for comp in &self.components {
            let Ok((d, tau)) = comp.foot(&self.model, z) else {
                return f64::NEG_INFINITY;
            };
            let signed = if comp.on_domain_side(z, tau) { d } else { -d };
            sd = sd.min(signed);
        }
        sd
    }

    pub fn contains(&self, z: &Point) -> bool {
        self.signed_distance(z) > 0.0
    }

    pub fn distance_to_boundary(&self, z: &Point) -> Result<Foot> {
        if !self.contains(z) {
            return Err(Error::OutsideDomain(*z));
        }
        self.nearest_foot(z)
    }

    /// Chart bounding box `[xmin, xmax] × [ymin, ymax]` of the boundary curves.
    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for comp in &self.components {
            for (_, p) in &comp.coarse {
                b[0] = b[0].min(p.x);
                b[1] = b[1].max(p.x);
                b[2] = b[2].min(p.y);
                b[3] = b[3].max(p.y);
            }
        }
        let pad = self.components.iter().map(|c| c.chart_spacing).fold(0.0, f64::max);
        [b[0] - pad, b[1] + pad, b[2] - pad, b[3] + pad]
    }

    /// Sup of the Ricci curvature magnitude over `{ρ ≤ rho}` estimated on tube samples.
    pub fn ricci_bound(&self, rho: f64) -> Result<f64> {
        match &self.model.kind {
            MetricKind::Euclidean => return Ok(0.0),
            MetricKind::Hyperbolic { k } => return Ok(k * k),
            MetricKind::Rotsym { profile: RadialProfile::Constant { .. } } => return Ok(0.0),
            MetricKind::Rotsym { .. } => {}
        }
        let mut sup: f64 = 0.0;
        for (ci, comp) in self.components.iter().enumerate() {
            for i in 0..128 {
                let s = comp.length() * i as f64 / 128.0;
                let bp = self.boundary_geometry(ci, s)?;
                for j in 0..=8 {
                    let t = rho * j as f64 / 8.0;
                    let p = self.model.geodesic_state(&bp.point, &bp.eta, t)?.0;
                    sup = sup.max(self.model.gaussian_curvature(&p).abs());
                }
            }
        }
        Ok(sup)
    }
}
