//! Scenario configuration files.
//!
//! A scenario is a JSON object:
//!
//! ```json
//! {
//!   "name": "annulus_zero",
//!   "description": "one line",
//!   "metric": { "kind": "euclidean" },
//!   "domain": { "kind": "bounded", "components": [ { "curve": { "type": "circle", "center": [0, 0], "radius": 2 }, "side": "inside" } ] },
//!   "phi": [ { "type": "constant", "value": 0 } ],
//!   "solver": { "h": 0.015625 },
//!   "experiment": { "kind": "certificate" }
//! }
//! ```
//!
//! `metric` is `euclidean`, `hyperbolic` (with `k`) or `rotsym` (with a radial
//! `profile`). `domain` is a curve-bounded domain (`bounded` or `exterior`,
//! curves `circle`, `geodesic_circle`, `points` or `csv_file`) or one of the
//! solver test regions `rectangle` and `annular_sector`, which need
//! `exact` boundary data instead of `phi`.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use msurf_core::barrier::BarrierCase;
use msurf_core::domain::{BoundaryData, ComponentSpec, CurveSpec, DomainKind, DomainSpec, PhiSpec, Side};
use msurf_core::exterior::AsymptoticSpec;
use msurf_core::msolver::{AnnularSector, ContinuationParams, NewtonParams, Rectangle, Region};
use msurf_core::{MetricModel, Point};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub metric: MetricModel,
    pub domain: DomainConfig,
    /// One spec per boundary component; a single spec applies to all.
    #[serde(default)]
    pub phi: Vec<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_inf: Option<AsymptoticSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Bounded {
        components: Vec<ComponentConfig>,
        #[serde(default = "default_rho0_cap")]
        rho0_cap: f64,
    },
    Exterior {
        components: Vec<ComponentConfig>,
        #[serde(default = "default_rho0_cap")]
        rho0_cap: f64,
    },
    Rectangle {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    AnnularSector {
        r0: f64,
        r1: f64,
        half_angle: f64,
    },
}

fn default_rho0_cap() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub curve: CurveConfig,
    pub side: Side,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Circle { center: [f64; 2], radius: f64 },
    GeodesicCircle { center: [f64; 2], radius: f64 },
    Points { points: Vec<[f64; 2]> },
    /// Closed curve through the rows of a CSV file with `x,y` columns; the
    /// path is relative to the scenario file.
    CsvFile { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactSolution {
    /// `ln(cos x / cos y)`
    Scherk,
    /// `atan2(y, x)`
    Helicoid,
}

impl ExactSolution {
    pub fn eval(self, p: &Point) -> f64 {
        match self {
            ExactSolution::Scherk => (p.x.cos() / p.y.cos()).ln(),
            ExactSolution::Helicoid => p.y.atan2(p.x),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub h: f64,
    pub newton: NewtonParams,
    pub continuation: ContinuationParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { h: 1.0 / 64.0, newton: NewtonParams::default(), continuation: ContinuationParams::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Certificate {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<ExpectedCertificate>,
        /// Pins the tube radius instead of using the computed one.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rho0: Option<f64>,
    },
    SupersolutionCheck {
        /// Defaults to `[h, h/2]` with the solver spacing.
        #[serde(default)]
        h_list: Vec<f64>,
        /// Factor applied to `ε` for a reported (not asserted) control run.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inflate_eps: Option<f64>,
    },
    IdentityCheck {
        component: usize,
        s: f64,
        #[serde(default = "default_identity_h")]
        h: f64,
    },
    DirichletSolve {
        #[serde(default = "default_max_error")]
        max_error: f64,
        /// Also solve at `2h` and assert the observed order.
        #[serde(default)]
        order_study: bool,
        #[serde(default = "default_min_order")]
        min_order: f64,
    },
    Continuity {
        expect: ContinuityExpectation,
        #[serde(default = "default_gradient_threshold")]
        gradient_threshold: f64,
        #[serde(default = "default_growth")]
        growth: f64,
    },
    Exterior {
        #[serde(default)]
        center: [f64; 2],
        radii: Vec<f64>,
        compact: [f64; 2],
        trace_radii: Vec<f64>,
        #[serde(default = "default_delta_tol")]
        delta_tol: f64,
        #[serde(default = "default_trace_tol")]
        trace_tol: f64,
    },
}

fn default_identity_h() -> f64 {
    2e-3
}
fn default_max_error() -> f64 {
    5e-3
}
fn default_min_order() -> f64 {
    1.8
}
fn default_gradient_threshold() -> f64 {
    1e3
}
fn default_growth() -> f64 {
    2.0
}
fn default_delta_tol() -> f64 {
    1e-4
}
fn default_trace_tol() -> f64 {
    5e-2
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Certificate { .. } => "certificate",
            Experiment::SupersolutionCheck { .. } => "supersolution_check",
            Experiment::IdentityCheck { .. } => "identity_check",
            Experiment::DirichletSolve { .. } => "dirichlet_solve",
            Experiment::Continuity { .. } => "continuity",
            Experiment::Exterior { .. } => "exterior",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedCertificate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<BarrierCase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Closed-form `C`; `"inf"` is not accepted here, use `case` instead.
    #[serde(default, rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_pass: Option<bool>,
}

fn default_rel_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuityExpectation {
    /// Reaches `t = 1` with boundary attainment at most `2h`.
    ReachedOne,
    /// Stalls before `t = 1`, or the boundary gradient exceeds the threshold
    /// at `h/2` and grows by the given factor from `h` to `h/2`.
    NonAttainment,
}

/// Where the scenario came from, for resolving relative paths.
#[derive(Debug, Clone)]
pub enum Origin {
    File(PathBuf),
    Builtin,
}

impl Origin {
    fn base_dir(&self) -> PathBuf {
        match self {
            Origin::File(p) => p.parent().map(Path::to_path_buf).unwrap_or_default(),
            Origin::Builtin => PathBuf::from("."),
        }
    }
}

pub fn parse(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).context("malformed scenario")?;
    Ok(scenario)
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

/// Reads a closed curve from CSV rows with `x` and `y` columns.
pub fn read_curve_csv(path: &Path) -> Result<Vec<[f64; 2]>> {
    #[derive(Deserialize)]
    struct Row {
        x: f64,
        y: f64,
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = reader
        .deserialize::<Row>()
        .map(|r| r.map(|row| [row.x, row.y]))
        .collect::<std::result::Result<Vec<_>, _>>()
        .with_context(|| format!("parsing {}", path.display()))?;
    ensure!(rows.len() >= 4, "{} has {} points, need at least 4", path.display(), rows.len());
    Ok(rows)
}

/// The geometric part of a scenario, built and validated.
pub enum Geometry {
    Curves { domain: DomainSpec, data: BoundaryData },
    Region { region: Box<dyn Region>, exact: ExactSolution },
}

impl Scenario {
    /// Checks parameter ranges that the type system does not.
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.name.is_empty(), "scenario name is empty");
        ensure!(self.solver.h > 0.0 && self.solver.h.is_finite(), "solver.h must be positive, got {}", self.solver.h);
        self.metric.validate()?;
        match &self.experiment {
            Experiment::SupersolutionCheck { h_list, inflate_eps } => {
                ensure!(h_list.iter().all(|h| *h > 0.0), "h_list entries must be positive");
                ensure!(inflate_eps.is_none_or(|f| f > 0.0), "inflate_eps must be positive");
            }
            Experiment::IdentityCheck { h, .. } => ensure!(*h > 0.0, "identity h must be positive"),
            Experiment::Exterior { radii, trace_radii, .. } => {
                ensure!(self.psi_inf.is_some(), "exterior experiments need psi_inf");
                ensure!(!radii.is_empty() && !trace_radii.is_empty(), "exterior experiments need radii and trace_radii");
            }
            _ => {}
        }
        let region_domain = matches!(self.domain, DomainConfig::Rectangle { .. } | DomainConfig::AnnularSector { .. });
        if region_domain {
            ensure!(self.exact.is_some(), "rectangle and annular_sector domains need exact boundary data");
            ensure!(matches!(self.experiment, Experiment::DirichletSolve { .. }), "rectangle and annular_sector domains only support dirichlet_solve");
        } else {
            ensure!(!self.phi.is_empty(), "curve-bounded domains need phi");
        }
        if matches!(self.experiment, Experiment::Exterior { .. }) {
            ensure!(matches!(self.domain, DomainConfig::Exterior { .. }), "exterior experiments need an exterior domain");
        }
        Ok(())
    }

    pub fn geometry(&self, origin: &Origin) -> Result<Geometry> {
        self.validate()?;
        let model = self.metric.clone();
        let (components, kind, cap) = match &self.domain {
            DomainConfig::Rectangle { x0, x1, y0, y1 } => {
                ensure!(x0 < x1 && y0 < y1, "rectangle bounds are empty");
                let region = Rectangle { model, x0: *x0, x1: *x1, y0: *y0, y1: *y1 };
                return Ok(Geometry::Region { region: Box::new(region), exact: self.exact.unwrap() });
            }
            DomainConfig::AnnularSector { r0, r1, half_angle } => {
                ensure!(0.0 < *r0 && r0 < r1 && *half_angle > 0.0, "annular sector parameters out of range");
                let region = AnnularSector { model, r0: *r0, r1: *r1, half_angle: *half_angle };
                return Ok(Geometry::Region { region: Box::new(region), exact: self.exact.unwrap() });
            }
            DomainConfig::Bounded { components, rho0_cap } => (components, DomainKind::Bounded, *rho0_cap),
            DomainConfig::Exterior { components, rho0_cap } => (components, DomainKind::Exterior, *rho0_cap),
        };
        let base = origin.base_dir();
        let specs = components
            .iter()
            .map(|c| {
                let curve = match &c.curve {
                    CurveConfig::Circle { center, radius } => CurveSpec::Circle { center: *center, radius: *radius },
                    CurveConfig::GeodesicCircle { center, radius } => CurveSpec::GeodesicCircle { center: *center, radius: *radius },
                    CurveConfig::Points { points } => CurveSpec::Points { points: points.clone() },
                    CurveConfig::CsvFile { path } => CurveSpec::Points { points: read_curve_csv(&base.join(path))? },
                };
                Ok(ComponentSpec { curve, side: c.side })
            })
            .collect::<Result<Vec<_>>>()?;
        let domain = DomainSpec::new(model, &specs, kind, cap)?;
        let phi = match self.phi.len() {
            1 => vec![self.phi[0].clone(); specs.len()],
            n if n == specs.len() => self.phi.clone(),
            n => bail!("phi has {n} entries for {} boundary components", specs.len()),
        };
        let data = BoundaryData::new(&domain, phi)?;
        Ok(Geometry::Curves { domain, data })
    }
}
