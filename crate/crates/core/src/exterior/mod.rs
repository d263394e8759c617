//! Exterior problems on the hyperbolic disk by exhaustion with geodesic balls.
//!
//! Level `n` solves the Dirichlet problem on `Ω ∩ B_n` with `φ` on `∂Ω` and the
//! extension `Ψ` of the asymptotic data on `∂B_n`. All levels share one chart
//! lattice, so successive fields are compared node by node.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::barrier::{certificate_for, solvability_gate, BarrierCertificate, GateDecision};
use crate::domain::curve::{from_complex, geodesic_circle_chart, mobius_from_origin, mobius_to_origin, to_complex};
use crate::domain::{BoundaryData, CurveShape, DomainKind, DomainSpec, Side};
use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, Point};
use crate::msolver::{max_principle, newton_solve, MaskedGrid, MaxPrincipleCheck, NewtonParams, ScalarField, SolveReport};


/// Boundary values on the circle at infinity as a function of the angle `θ`
/// seen from the exhaustion center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AsymptoticSpec {
    Constant { value: f64 },
    /// `offset + amplitude·cos(m·θ + phase)`.
    Harmonic {
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl AsymptoticSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AsymptoticSpec::Constant { value } if value.is_finite() => Ok(()),
            AsymptoticSpec::Harmonic { amplitude, wavenumber, phase, offset }
                if amplitude.is_finite() && phase.is_finite() && offset.is_finite() && wavenumber.fract() == 0.0 =>
            {
                Ok(())
            }
            _ => Err(Error::Input(format!("invalid asymptotic data {self:?}"))),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match *self {
            AsymptoticSpec::Constant { value } => value,
            AsymptoticSpec::Harmonic { amplitude, wavenumber, phase, offset } => offset + amplitude * (wavenumber * theta + phase).cos(),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match *self {
            AsymptoticSpec::Constant { value } => value.abs(),
            AsymptoticSpec::Harmonic { amplitude, offset, .. } => offset.abs() + amplitude.abs(),
        }
    }
}

/// `Ψ = ψ_∞(θ)·χ(r)` in geodesic polar coordinates `(r, θ)` about `center`.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticExtension {
    pub psi: AsymptoticSpec,
    pub center: [f64; 2],
    pub k: f64,
    pub r_in: f64,
    pub r_out: f64,
}

/// `C^∞` step, 0 for `x ≤ 0` and 1 for `x ≥ 1`.
fn smooth_step(x: f64) -> f64 {
    let f = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    let (a, b) = (f(x), f(1.0 - x));
    a / (a + b)
}

impl AsymptoticExtension {
    /// Geodesic polar coordinates about the center.
    pub fn polar(&self, z: &Point) -> (f64, f64) {
        let w = mobius_to_origin(to_complex(&Point::from(self.center)), to_complex(z));
        (2.0 / self.k * w.norm().atanh(), w.im.atan2(w.re))
    }

    pub fn cutoff(&self, r: f64) -> f64 {
        smooth_step((r - self.r_in) / (self.r_out - self.r_in))
    }

    pub fn eval(&self, z: &Point) -> f64 {
        let (r, theta) = self.polar(z);
        self.psi.eval(theta) * self.cutoff(r)
    }

    /// Chart point at geodesic polar coordinates `(r, θ)`.
    pub fn point(&self, r: f64, theta: f64) -> Point {
        let w = num_complex::Complex64::from_polar((self.k * r / 2.0).tanh(), theta);
        from_complex(mobius_from_origin(to_complex(&Point::from(self.center)), w))
    }
}

fn hyperbolic_k(domain: &DomainSpec) -> Result<f64> {
    domain.model.is_hyperbolic().ok_or_else(|| Error::Input("exterior runs need the hyperbolic disk".into()))
}

/// Largest distance from `center` to the boundary of `domain`, from 512 samples per component.
pub fn max_boundary_distance(domain: &DomainSpec, center: &Point) -> Result<f64> {
    let mut best = 0.0f64;
    for comp in &domain.components {
        let period = comp.shape.period();
        for i in 0..512 {
            let p = comp.shape.point(period * i as f64 / 512.0);
            best = best.max(domain.model.distance(center, &p)?);
        }
    }
    Ok(best)
}

/// Extension with the default cutoff radii `r_in = max dist(o, ∂Ω) + 0.5`, `r_out = r_in + 1`.
pub fn extend_asymptotic(psi: &AsymptoticSpec, domain: &DomainSpec, center: &Point) -> Result<AsymptoticExtension> {
    psi.validate()?;
    let k = hyperbolic_k(domain)?;
    domain.model.check(center)?;
    let r_in = max_boundary_distance(domain, center)? + 0.5;
    Ok(AsymptoticExtension { psi: psi.clone(), center: [center.x, center.y], k, r_in, r_out: r_in + 1.0 })
}

/// `Ω ∩ B_n` for each radius; the ball boundary is the last component of each level.
pub fn build_exhaustion(domain: &DomainSpec, center: &Point, radii: &[f64]) -> Result<Vec<DomainSpec>> {
    if domain.kind != DomainKind::Exterior {
        return Err(Error::Config("exhaustion needs an exterior domain".into()));
    }
    hyperbolic_k(domain)?;
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(format!("exhaustion radii {radii:?} must be nonempty and increasing")));
    }
    let reach = max_boundary_distance(domain, center)?;
    if !(radii[0] > reach) {
        return Err(Error::Config(format!("ball of radius {} does not contain the boundary (reach {reach})", radii[0])));
    }
    radii
        .iter()
        .map(|&n| {
            let (c, r) = geodesic_circle_chart(&domain.model, center, n)?;
            let mut shapes: Vec<(CurveShape, Side)> = domain.components.iter().map(|b| (b.shape.clone(), b.side)).collect();
            shapes.push((CurveShape::Circle { center: c, radius: r }, Side::Inside));
            let level = DomainSpec::from_shapes(domain.model.clone(), shapes, DomainKind::Bounded, domain.rho0)?;
            let outer = level.components.len() - 1;
            let period = level.components[outer].length();
            for i in 0..16 {
                let h = level.boundary_geometry(outer, period * i as f64 / 16.0)?.h;
                if !(h > 0.0) {
                    return Err(Error::Validation(format!("ball boundary of radius {n} is not mean convex (H = {h})")));
                }
            }
            Ok(level)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorParams {
    pub center: [f64; 2],
    pub radii: Vec<f64>,
    pub h: f64,
    /// Geodesic radii about the center bounding the compact annulus `K`.
    pub compact: [f64; 2],
    #[serde(default)]
    pub newton: NewtonParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    FailedAt { radius: f64 },
    GateRefused,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub radius: f64,
    /// Geodesic curvature of `∂B_n` (`coth(k·n)` up to the sampling error).
    pub outer_curvature: f64,
    pub interior_nodes: usize,
    pub solve: SolveReport,
    pub max_principle: MaxPrincipleCheck,
    pub sup_abs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionRun {
    pub params: ExteriorParams,
    pub certificate: BarrierCertificate,
    pub gate: GateDecision,
    pub extension: AsymptoticExtension,
    pub status: RunStatus,
    pub levels: Vec<LevelReport>,
    /// `sup_K |u_{n+1} − u_n|` over lattice nodes interior to both levels.
    pub cauchy_deltas: Vec<f64>,
    /// `max(sup|φ|, sup|ψ_∞|)`.
    pub bound: f64,
    pub uniform_bound_pass: bool,
    #[serde(skip)]
    pub field: Option<ScalarField>,
}

impl ExhaustionRun {
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn deltas_decreasing(&self) -> bool {
        self.cauchy_deltas.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Runs the exhaustion after checking the solvability gate of `φ` on `∂Ω`.
pub fn solve_exterior(domain: &DomainSpec, data: &BoundaryData, psi: &AsymptoticSpec, params: &ExteriorParams) -> Result<ExhaustionRun> {
    let k = hyperbolic_k(domain)?;
    if !(params.h > 0.0) {
        return Err(Error::Config(format!("grid spacing {} must be positive", params.h)));
    }
    if !(params.compact[0] < params.compact[1]) {
        return Err(Error::Config(format!("compact annulus {:?} is empty", params.compact)));
    }
    let center = Point::from(params.center);
    let norms = data.norms();
    let certificate = certificate_for(domain, &norms)?;
    let gate = solvability_gate(&norms, &certificate);
    let extension = extend_asymptotic(psi, domain, &center)?;
    let bound = norms.max.abs().max(norms.min.abs()).max(psi.sup_abs());
    let mut run = ExhaustionRun {
        params: params.clone(),
        certificate,
        gate,
        extension,
        status: RunStatus::Completed,
        levels: Vec::new(),
        cauchy_deltas: Vec::new(),
        bound,
        uniform_bound_pass: true,
        field: None,
    };
    if !gate.pass {
        run.status = RunStatus::GateRefused;
        return Ok(run);
    }
    let levels = build_exhaustion(domain, &center, &params.radii)?;
    let inner = domain.components.len();
    let in_compact = |p: &Point| {
        let r = hyperbolic_distance(k, &center, p);
        r >= params.compact[0] && r <= params.compact[1]
    };
    let mut previous: Option<ScalarField> = None;
    for (level, &radius) in levels.iter().zip(&params.radii) {
        let grid = Arc::new(MaskedGrid::new(level, params.h)?);
        let g = grid
            .cuts
            .iter()
            .map(|c| {
                let foot = level.nearest_foot(&c.point)?;
                Ok(if foot.component < inner { data.value(foot.component, foot.s) } else { run.extension.eval(&c.point) })
            })
            .collect::<Result<Vec<f64>>>()?;
        let guess: Option<Vec<f64>> = previous.as_ref().map(|prev| {
            grid.interior
                .iter()
                .map(|n| {
                    let (i, j) = grid.lattice_coords(n.node);
                    prev.at_lattice(i, j).unwrap_or_else(|| run.extension.eval(&n.point))
                })
                .collect()
        });
        let (field, solve) = newton_solve(grid.clone(), g.clone(), guess.as_deref(), &params.newton)?;
        let g_lo = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let g_hi = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mp = max_principle(&field, g_lo, g_hi);
        let sup_abs = field.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        run.uniform_bound_pass &= sup_abs <= bound + 1e-9;
        let outer = level.components.len() - 1;
        let converged = solve.converged;
        run.levels.push(LevelReport {
            radius,
            outer_curvature: level.boundary_geometry(outer, 0.0)?.h,
            interior_nodes: grid.n_interior(),
            solve,
            max_principle: mp,
            sup_abs,
        });
        if !converged {
            run.status = RunStatus::FailedAt { radius };
            return Ok(run);
        }
        if let Some(prev) = &previous {
            let delta = grid
                .interior
                .iter()
                .zip(&field.u)
                .filter(|(n, _)| in_compact(&n.point))
                .filter_map(|(n, u)| {
                    let (i, j) = grid.lattice_coords(n.node);
                    prev.at_lattice(i, j).map(|v| (u - v).abs())
                })
                .fold(0.0f64, f64::max);
            run.cauchy_deltas.push(delta);
        }
        previous = Some(field);
    }
    run.field = previous;
    Ok(run)
}

#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub radius: f64,
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
    pub psi: Vec<f64>,
    /// `sup_θ |u − ψ_∞|`.
    pub error: f64,
}

impl Trace {
    /// CSV with columns `theta, u, psi_inf`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta,u,psi_inf")?;
        for ((t, u), p) in self.theta.iter().zip(&self.u).zip(&self.psi) {
            writeln!(w, "{t:.12e},{u:.12e},{p:.12e}")?;
        }
        Ok(())
    }
}

/// Bilinear interpolation from the four surrounding interior nodes, or a
/// least-squares plane through interior nodes and cut points within `2h`.
pub fn interpolate(field: &ScalarField, z: &Point) -> Option<f64> {
    let grid = &field.grid;
    let h = grid.h;
    let (fx, fy) = (z.x / h, z.y / h);
    let (i, j) = (fx.floor() as i64, fy.floor() as i64);
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    let corners = [field.at_lattice(i, j), field.at_lattice(i + 1, j), field.at_lattice(i, j + 1), field.at_lattice(i + 1, j + 1)];
    if let [Some(a), Some(b), Some(c), Some(d)] = corners {
        return Some((1.0 - ty) * ((1.0 - tx) * a + tx * b) + ty * ((1.0 - tx) * c + tx * d));
    }
    let mut samples: Vec<(Point, f64)> = Vec::new();
    for di in -2..=3 {
        for dj in -2..=3 {
            if let Some(v) = field.at_lattice(i + di, j + dj) {
                let p = Point::new((i + di) as f64 * h, (j + dj) as f64 * h);
                if (p - z).norm() <= 2.0 * h {
                    samples.push((p, v));
                }
            }
        }
    }
    for (c, cut) in grid.cuts.iter().enumerate() {
        if (cut.point - z).norm() <= 2.0 * h {
            samples.push((cut.point, field.g[c]));
        }
    }
    let mut m = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for (p, v) in &samples {
        let row = Vector3::new(1.0, (p.x - z.x) / h, (p.y - z.y) / h);
        m += row * row.transpose();
        rhs += row * *v;
    }
    (samples.len() >= 3).then_some(())?;
    m.lu().solve(&rhs).map(|c| c[0])
}

/// Samples the final field on the geodesic circle of the given radius about the center.
pub fn asymptotic_trace(run: &ExhaustionRun, radius: f64, samples: usize) -> Result<Trace> {
    let field = run.field.as_ref().ok_or_else(|| Error::Range("exhaustion run has no solved field".into()))?;
    let n_max = run.levels.last().map(|l| l.radius).unwrap_or(0.0);
    let ext = &run.extension;
    if !(radius > ext.r_in - 0.5 && radius < n_max) {
        return Err(Error::Range(format!("sample radius {radius} is outside the solved region ({}, {n_max})", ext.r_in - 0.5)));
    }
    let mut trace = Trace { radius, theta: Vec::new(), u: Vec::new(), psi: Vec::new(), error: 0.0 };
    for i in 0..samples {
        let theta = -PI + 2.0 * PI * i as f64 / samples as f64;
        let z = ext.point(radius, theta);
        let u = interpolate(field, &z).ok_or_else(|| Error::Range(format!("no solution values near {z:?}")))?;
        let psi = ext.psi.eval(theta);
        trace.error = trace.error.max((u - psi).abs());
        trace.theta.push(theta);
        trace.u.push(u);
        trace.psi.push(psi);
    }
    Ok(trace)
}
