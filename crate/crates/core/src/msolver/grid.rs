//! Masked lattice grids with cut-cell arms.
//!
//! The lattice is anchored at the chart origin (nodes at `(i·h, j·h)`), so
//! grids built with the same spacing for nested regions share their nodes.
//! An interior node whose lattice neighbor lies outside the region gets a
//! shortened arm ending at the boundary crossing (a cut point) carrying
//! Dirichlet data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{BoundaryData, DomainSpec};
use crate::error::{Error, Result};
use crate::geometry::{MetricModel, Point, Vector};

/// A region of the chart described by a level function, negative inside.
pub trait Region: Sync {
    fn model(&self) -> &MetricModel;
    fn level(&self, z: &Point) -> f64;
    /// `[xmin, xmax, ymin, ymax]` enclosing the region.
    fn bbox(&self) -> [f64; 4];
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone)]
pub struct Rectangle {
    pub model: MetricModel,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Region for Rectangle {
    fn model(&self) -> &MetricModel {
        &self.model
    }
    fn level(&self, z: &Point) -> f64 {
        (self.x0 - z.x).max(z.x - self.x1).max(self.y0 - z.y).max(z.y - self.y1)
    }
    fn bbox(&self) -> [f64; 4] {
        [self.x0, self.x1, self.y0, self.y1]
    }
}

/// `{r0 < |z| < r1, |arg z| < half_angle}`.
#[derive(Debug, Clone)]
pub struct AnnularSector {
    pub model: MetricModel,
    pub r0: f64,
    pub r1: f64,
    pub half_angle: f64,
}

impl Region for AnnularSector {
    fn model(&self) -> &MetricModel {
        &self.model
    }
    fn level(&self, z: &Point) -> f64 {
        let r = z.norm();
        let th = z.y.atan2(z.x).abs();
        // Angular excess measured as arc length at radius r.
        (self.r0 - r).max(r - self.r1).max(r * (th - self.half_angle))
    }
    fn bbox(&self) -> [f64; 4] {
        let c = self.half_angle.cos();
        let xmin = if self.half_angle >= std::f64::consts::FRAC_PI_2 { -self.r1 } else { self.r0 * c };
        let ymax = if self.half_angle >= std::f64::consts::FRAC_PI_2 { self.r1 } else { self.r1 * self.half_angle.sin() };
        [xmin, self.r1, -ymax, ymax]
    }
}

impl Region for DomainSpec {
    fn model(&self) -> &MetricModel {
        &self.model
    }
    fn level(&self, z: &Point) -> f64 {
        -self.signed_distance(z)
    }
    fn bbox(&self) -> [f64; 4] {
        DomainSpec::bbox(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Interior,
    Dirichlet,
    Outside,
}

/// End of an arm: another interior node or a cut point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmEnd {
    Node(usize),
    Cut(usize),
}

/// Directions in arm order.
pub const EAST: usize = 0;
pub const WEST: usize = 1;
pub const NORTH: usize = 2;
pub const SOUTH: usize = 3;

pub(crate) const DIRS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

#[derive(Debug, Clone)]
pub struct InteriorNode {
    /// Lattice index.
    pub node: usize,
    pub point: Point,
    pub ends: [ArmEnd; 4],
    /// Arm lengths in chart units.
    pub arm: [f64; 4],
    /// Cut with the shortest arm, whose value offsets this node's unknown.
    pub base_cut: Option<usize>,
}

impl InteriorNode {
    pub fn is_regular(&self) -> bool {
        self.base_cut.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Cut {
    pub point: Point,
    /// Interior index owning the arm.
    pub owner: usize,
    pub dir: usize,
    /// Arm fraction in (0, 1].
    pub theta: f64,
    /// Lattice node beyond the cut.
    pub outer_node: usize,
}

#[derive(Debug, Clone)]
pub struct MaskedGrid {
    pub model: MetricModel,
    pub h: f64,
    pub i0: i64,
    pub j0: i64,
    pub nx: usize,
    pub ny: usize,
    pub kind: Vec<NodeKind>,
    /// Interior index per lattice node.
    pub index: Vec<Option<usize>>,
    pub interior: Vec<InteriorNode>,
    pub cuts: Vec<Cut>,
}

impl MaskedGrid {
    pub fn new(region: &dyn Region, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Config(format!("grid spacing {h} must be positive")));
        }
        let model = region.model().clone();
        let b = region.bbox();
        let i0 = (b[0] / h).floor() as i64 - 2;
        let i1 = (b[1] / h).ceil() as i64 + 2;
        let j0 = (b[2] / h).floor() as i64 - 2;
        let j1 = (b[3] / h).ceil() as i64 + 2;
        let nx = (i1 - i0 + 1) as usize;
        let ny = (j1 - j0 + 1) as usize;
        if nx.saturating_mul(ny) > 40_000_000 {
            return Err(Error::Config(format!("grid of {nx}×{ny} nodes is too large")));
        }
        let point = |id: usize| Point::new((i0 + (id % nx) as i64) as f64 * h, (j0 + (id / nx) as i64) as f64 * h);
        let levels: Vec<f64> = (0..nx * ny)
            .into_par_iter()
            .map(|id| {
                let p = point(id);
                if model.in_chart(&p) {
                    region.level(&p)
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let mut kind = vec![NodeKind::Outside; nx * ny];
        let mut index = vec![None; nx * ny];
        let mut interior_ids = Vec::new();
        for id in 0..nx * ny {
            if levels[id] < 0.0 {
                index[id] = Some(interior_ids.len());
                kind[id] = NodeKind::Interior;
                interior_ids.push(id);
            }
        }
        if interior_ids.is_empty() {
            return Err(Error::Config("grid has no interior nodes".into()));
        }
        let neighbor = |id: usize, d: usize| -> Option<usize> {
            let (ix, iy) = ((id % nx) as i64 + DIRS[d].0, (id / nx) as i64 + DIRS[d].1);
            (ix >= 0 && iy >= 0 && (ix as usize) < nx && (iy as usize) < ny).then(|| iy as usize * nx + ix as usize)
        };
        // Cut fractions per interior node and direction.
        let arms: Vec<[(Option<usize>, f64); 4]> = interior_ids
            .par_iter()
            .map(|&id| {
                let p = point(id);
                let mut out = [(None, 1.0); 4];
                for d in 0..4 {
                    let q = neighbor(id, d);
                    match q {
                        Some(q) if levels[q] < 0.0 => out[d] = (Some(q), 1.0),
                        Some(q) => {
                            let theta = if levels[q] == 0.0 {
                                1.0
                            } else {
                                let dir = Vector::new(DIRS[d].0 as f64, DIRS[d].1 as f64) * h;
                                crossing(|t| if model.in_chart(&(p + dir * t)) { region.level(&(p + dir * t)) } else { f64::INFINITY }, levels[id], levels[q])
                            };
                            out[d] = (Some(q), theta);
                        }
                        None => out[d] = (None, f64::NAN),
                    }
                }
                out
            })
            .collect();
        let mut interior = Vec::with_capacity(interior_ids.len());
        let mut cuts = Vec::new();
        for (k, &id) in interior_ids.iter().enumerate() {
            let p = point(id);
            let mut ends = [ArmEnd::Node(0); 4];
            let mut arm = [h; 4];
            let mut base_cut: Option<(usize, f64)> = None;
            for d in 0..4 {
                let (q, theta) = arms[k][d];
                let q = q.ok_or_else(|| Error::Config("region extends beyond its bounding box".into()))?;
                if levels[q] < 0.0 {
                    ends[d] = ArmEnd::Node(index[q].unwrap());
                } else {
                    let step = Vector::new(DIRS[d].0 as f64, DIRS[d].1 as f64) * h;
                    let c = cuts.len();
                    cuts.push(Cut { point: p + step * theta, owner: k, dir: d, theta, outer_node: q });
                    ends[d] = ArmEnd::Cut(c);
                    arm[d] = theta * h;
                    kind[q] = NodeKind::Dirichlet;
                    if base_cut.is_none_or(|(_, t)| theta < t) {
                        base_cut = Some((c, theta));
                    }
                }
            }
            interior.push(InteriorNode { node: id, point: p, ends, arm, base_cut: base_cut.map(|b| b.0) });
        }
        Ok(Self { model, h, i0, j0, nx, ny, kind, index, interior, cuts })
    }

    pub fn node_point(&self, id: usize) -> Point {
        Point::new((self.i0 + (id % self.nx) as i64) as f64 * self.h, (self.j0 + (id / self.nx) as i64) as f64 * self.h)
    }

    /// Lattice index of the chart node `(i·h, j·h)`, if inside the lattice.
    pub fn lattice_id(&self, i: i64, j: i64) -> Option<usize> {
        let (ix, iy) = (i - self.i0, j - self.j0);
        (ix >= 0 && iy >= 0 && (ix as usize) < self.nx && (iy as usize) < self.ny).then(|| iy as usize * self.nx + ix as usize)
    }

    pub fn lattice_coords(&self, id: usize) -> (i64, i64) {
        (self.i0 + (id % self.nx) as i64, self.j0 + (id / self.nx) as i64)
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    /// Dirichlet data at the cut points.
    pub fn boundary_values(&self, g: &(dyn Fn(&Point) -> f64 + Sync)) -> Vec<f64> {
        self.cuts.par_iter().map(|c| g(&c.point)).collect()
    }

    /// Boundary data at the cut points, read at each point's nearest foot.
    pub fn trace_data(&self, domain: &DomainSpec, data: &BoundaryData) -> Result<Vec<f64>> {
        self.cuts
            .par_iter()
            .map(|c| domain.nearest_foot(&c.point).map(|f| data.value(f.component, f.s)))
            .collect()
    }
}

/// Fraction in (0, 1] where a level function crosses zero along an arm with
/// `f(0) = f0 < 0 ≤ f(1) = f1` (Illinois regula falsi, bracket preserving).
fn crossing(f: impl Fn(f64) -> f64, f0: f64, f1: f64) -> f64 {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let (mut fa, mut fb) = (f0, if f1.is_finite() { f1 } else { f64::INFINITY });
    let mut side = 0;
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON {
            break;
        }
        let mut c = if fb.is_finite() { (a * fb - b * fa) / (fb - fa) } else { 0.5 * (a + b) };
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc < 0.0 {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if fc == 0.0 {
                break;
            }
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    b
}
