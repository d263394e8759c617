use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use super::grid::{MaskedGrid, NodeKind};
use crate::geometry::{MetricModel, Point};

/// Solution values on a masked grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<MaskedGrid>,
    /// Dirichlet data at the grid's cut points.
    pub g: Vec<f64>,
    /// Values at interior nodes, in interior order.
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldMeta {
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    pub interior_nodes: usize,
    pub cut_points: usize,
    pub metric: MetricModel,
}

impl ScalarField {
    pub fn new(grid: Arc<MaskedGrid>, g: Vec<f64>, u: Vec<f64>) -> Self {
        Self { grid, g, u }
    }

    /// Value per lattice node: interior values, the data at the nearest cut
    /// for Dirichlet nodes and NaN elsewhere.
    pub fn lattice_values(&self) -> Vec<f64> {
        let grid = &self.grid;
        let mut out = vec![f64::NAN; grid.nx * grid.ny];
        let mut nearest = vec![f64::INFINITY; grid.nx * grid.ny];
        for (c, cut) in grid.cuts.iter().enumerate() {
            let dist = 1.0 - cut.theta;
            if dist < nearest[cut.outer_node] {
                nearest[cut.outer_node] = dist;
                out[cut.outer_node] = self.g[c];
            }
        }
        for (k, n) in grid.interior.iter().enumerate() {
            out[n.node] = self.u[k];
        }
        out
    }

    /// Value at a lattice node if it is interior.
    pub fn at_lattice(&self, i: i64, j: i64) -> Option<f64> {
        let id = self.grid.lattice_id(i, j)?;
        self.grid.index[id].map(|k| self.u[k])
    }

    pub fn min_max(&self) -> (f64, f64) {
        let it = self.u.iter().chain(self.g.iter());
        it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn meta(&self) -> FieldMeta {
        let g = &self.grid;
        FieldMeta {
            h: g.h,
            nx: g.nx,
            ny: g.ny,
            origin: [g.i0 as f64 * g.h, g.j0 as f64 * g.h],
            interior_nodes: g.n_interior(),
            cut_points: g.cuts.len(),
            metric: g.model.clone(),
        }
    }

    /// CSV with columns `x, y, u, mask` over interior and Dirichlet nodes.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,u,mask")?;
        let values = self.lattice_values();
        for (id, kind) in self.grid.kind.iter().enumerate() {
            let label = match kind {
                NodeKind::Interior => "interior",
                NodeKind::Dirichlet => "dirichlet",
                NodeKind::Outside => continue,
            };
            let p: Point = self.grid.node_point(id);
            writeln!(w, "{:.12},{:.12},{:.15e},{}", p.x, p.y, values[id], label)?;
        }
        Ok(())
    }
}
