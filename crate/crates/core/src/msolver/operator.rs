//! Flux-form discretization of the minimal surface operator.
//!
//! For `g = λ²(dx² + dy²)` one has `grad u = λ⁻²∇u`, `|grad u|² = λ⁻²|∇u|²` and
//! `div X = λ⁻²∂ᵢ(λ²Xⁱ)`, so
//!
//! ```text
//! M[u] = div(grad u / W) = λ⁻² ∂ᵢ(∂ᵢu / W),   W = √(1 + λ⁻²|∇u|²).
//! ```
//!
//! The discrete operator evaluates the euclidean divergence with fluxes at arm
//! midpoints:
//!
//! ```text
//! M_h[u]_P = λ_P⁻² [ (F_E − F_W)/h̄ₓ + (F_N − F_S)/h̄ᵧ ],   F = q / √(1 + λ_mid⁻²(q² + t²)),
//! ```
//!
//! where `q` is the normal difference quotient along the arm, `t` the average of
//! the centered tangential differences at both arm ends (only the inner end for
//! arms ending at a cut point) and `h̄ₓ = (h_E + h_W)/2`. Differences on uneven
//! arms use the three-point formula, which is exact on quadratics.

use faer::sparse::Triplet;
use rayon::prelude::*;

use super::grid::{ArmEnd, InteriorNode, MaskedGrid, DIRS, EAST, NORTH, SOUTH, WEST};
use crate::geometry::{MetricModel, Point, Vector};

/// Value plus derivatives with respect to the nine stencil unknowns.
#[derive(Debug, Clone, Copy)]
struct Lin {
    v: f64,
    d: [f64; 9],
}

impl Lin {
    fn zero() -> Self {
        Lin { v: 0.0, d: [0.0; 9] }
    }
    fn scale(self, c: f64) -> Self {
        let mut d = self.d;
        d.iter_mut().for_each(|x| *x *= c);
        Lin { v: self.v * c, d }
    }
    fn add(self, o: Lin) -> Self {
        let mut d = self.d;
        d.iter_mut().zip(o.d.iter()).for_each(|(x, y)| *x += y);
        Lin { v: self.v + o.v, d }
    }
    fn sub(self, o: Lin) -> Self {
        self.add(o.scale(-1.0))
    }
}

fn slot(dx: i64, dy: i64) -> usize {
    match (dx, dy) {
        (0, 0) => 0,
        (1, 0) => 1,
        (-1, 0) => 2,
        (0, 1) => 3,
        (0, -1) => 4,
        (1, 1) => 5,
        (-1, 1) => 6,
        (1, -1) => 7,
        (-1, -1) => 8,
        _ => unreachable!("stencil offsets stay within one cell"),
    }
}

/// Minimal-surface flux and its partial derivatives in `q` and `t`.
pub fn flux(q: f64, t: f64, c: f64) -> (f64, f64, f64) {
    let w2 = 1.0 + c * (q * q + t * t);
    let w = w2.sqrt();
    let w3 = w2 * w;
    (q / w, (1.0 + c * t * t) / w3, -c * q * t / w3)
}

/// Dirichlet data and the per-node offsets `u = base + x`.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub grid: &'a MaskedGrid,
    pub g: Vec<f64>,
    pub base: Vec<f64>,
}

impl<'a> Problem<'a> {
    pub fn new(grid: &'a MaskedGrid, g: Vec<f64>) -> Self {
        let base = grid.interior.iter().map(|n| n.base_cut.map_or(0.0, |c| g[c])).collect();
        Self { grid, g, base }
    }

    pub fn u_of_x(&self, x: &[f64]) -> Vec<f64> {
        self.base.iter().zip(x).map(|(b, x)| b + x).collect()
    }

    pub fn x_of_u(&self, u: &[f64]) -> Vec<f64> {
        self.base.iter().zip(u).map(|(b, u)| u - b).collect()
    }

    /// `u_A − u_B` for arm ends with the lattice offsets of each relative to P.
    fn diff(&self, x: &[f64], a: (ArmEnd, (i64, i64)), b: (ArmEnd, (i64, i64))) -> Lin {
        let mut out = Lin::zero();
        let mut term = |end: ArmEnd, off: (i64, i64), sign: f64| match end {
            ArmEnd::Node(k) => {
                out.v += sign * self.base[k];
                out.d[slot(off.0, off.1)] += sign;
            }
            ArmEnd::Cut(c) => out.v += sign * self.g[c],
        };
        term(a.0, a.1, 1.0);
        term(b.0, b.1, -1.0);
        // Offsets cancel first, then the unknowns.
        let xa = if let ArmEnd::Node(k) = a.0 { x[k] } else { 0.0 };
        let xb = if let ArmEnd::Node(k) = b.0 { x[k] } else { 0.0 };
        out.v += xa - xb;
        out
    }

    /// Three-point centered derivative at interior node `k` (lattice offset
    /// `off` from P) along the axis of directions `plus`/`minus`.
    fn centered(&self, x: &[f64], k: usize, off: (i64, i64), plus: usize, minus: usize) -> Lin {
        let n = &self.grid.interior[k];
        let (hp, hm) = (n.arm[plus], n.arm[minus]);
        let at = |d: usize| (n.ends[d], (off.0 + DIRS[d].0, off.1 + DIRS[d].1));
        let me = (ArmEnd::Node(k), off);
        let wp = hm / (hp * (hp + hm));
        let wm = hp / (hm * (hp + hm));
        self.diff(x, at(plus), me).scale(wp).sub(self.diff(x, at(minus), me).scale(wm))
    }

    /// Arm fluxes of interior node `k` with derivatives in stencil slots.
    fn fluxes(&self, x: &[f64], k: usize, linear: bool) -> [Lin; 4] {
        let n: &InteriorNode = &self.grid.interior[k];
        let me = (ArmEnd::Node(k), (0, 0));
        let dx_p = self.centered(x, k, (0, 0), EAST, WEST);
        let dy_p = self.centered(x, k, (0, 0), NORTH, SOUTH);
        let mut fluxes = [Lin::zero(); 4];
        for d in 0..4 {
            let off = DIRS[d];
            let end = (n.ends[d], off);
            let h = n.arm[d];
            // Difference oriented along +x / +y.
            let q = if d == EAST || d == NORTH { self.diff(x, end, me) } else { self.diff(x, me, end) }.scale(1.0 / h);
            let horizontal = d == EAST || d == WEST;
            let t_p = if horizontal { dy_p } else { dx_p };
            let t = match n.ends[d] {
                ArmEnd::Node(m) => {
                    let t_m = if horizontal {
                        self.centered(x, m, off, NORTH, SOUTH)
                    } else {
                        self.centered(x, m, off, EAST, WEST)
                    };
                    t_p.add(t_m).scale(0.5)
                }
                ArmEnd::Cut(_) => t_p,
            };
            let c = if linear {
                0.0
            } else {
                let mid = n.point + Vector::new(off.0 as f64, off.1 as f64) * (0.5 * h);
                let lam = self.grid.model.lambda(&mid);
                1.0 / (lam * lam)
            };
            let (f, fq, ft) = flux(q.v, t.v, c);
            let mut out = q.scale(fq).add(t.scale(ft));
            out.v = f;
            fluxes[d] = out;
        }
        fluxes
    }

    /// Residual at interior node `k` with derivatives in stencil slots.
    fn local(&self, x: &[f64], k: usize, linear: bool) -> Lin {
        let n = &self.grid.interior[k];
        let f = self.fluxes(x, k, linear);
        let lam = self.grid.model.lambda(&n.point);
        let hx = 0.5 * (n.arm[EAST] + n.arm[WEST]);
        let hy = 0.5 * (n.arm[NORTH] + n.arm[SOUTH]);
        f[EAST]
            .sub(f[WEST])
            .scale(1.0 / hx)
            .add(f[NORTH].sub(f[SOUTH]).scale(1.0 / hy))
            .scale(1.0 / (lam * lam))
    }

    /// Interior index of the node at stencil slot `s` of node `k`.
    fn slot_unknown(&self, k: usize, s: usize) -> Option<usize> {
        let grid = self.grid;
        let (i, j) = grid.lattice_coords(grid.interior[k].node);
        let (dx, dy) = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)][s];
        grid.lattice_id(i + dx, j + dy).and_then(|id| grid.index[id])
    }

    pub fn residual(&self, x: &[f64], linear: bool) -> Vec<f64> {
        (0..self.grid.n_interior()).into_par_iter().map(|k| self.local(x, k, linear).v).collect()
    }

    /// Residual and Jacobian triplets.
    pub fn linearize(&self, x: &[f64], linear: bool) -> (Vec<f64>, Vec<Triplet<usize, usize, f64>>) {
        let rows: Vec<(f64, Vec<Triplet<usize, usize, f64>>)> = (0..self.grid.n_interior())
            .into_par_iter()
            .map(|k| {
                let l = self.local(x, k, linear);
                let mut t = Vec::with_capacity(9);
                for (s, &v) in l.d.iter().enumerate() {
                    if v != 0.0 {
                        let col = self.slot_unknown(k, s).expect("stencil slot refers to an interior node");
                        t.push(Triplet::new(k, col, v));
                    }
                }
                (l.v, t)
            })
            .collect();
        let mut res = Vec::with_capacity(rows.len());
        let mut trips = Vec::with_capacity(rows.len() * 9);
        for (v, t) in rows {
            res.push(v);
            trips.extend(t);
        }
        (res, trips)
    }

    /// Flux through each cut arm, oriented out of the region, times the face
    /// width; used by the discrete divergence identity.
    pub fn boundary_flux(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (k, n) in self.grid.interior.iter().enumerate() {
            let l = self.fluxes(x, k, false);
            let hx = 0.5 * (n.arm[EAST] + n.arm[WEST]);
            let hy = 0.5 * (n.arm[NORTH] + n.arm[SOUTH]);
            for d in 0..4 {
                if let ArmEnd::Cut(_) = n.ends[d] {
                    let sign = if d == EAST || d == NORTH { 1.0 } else { -1.0 };
                    let width = if d == EAST || d == WEST { hy } else { hx };
                    total += sign * l[d].v * width;
                }
            }
        }
        total
    }
}

/// The interior stencil on a regular 3×3 patch `patch[j][i]` of lattice values
/// centered at `center` (index (1, 1), rows increasing in y).
pub fn regular_operator(model: &MetricModel, center: &Point, h: f64, patch: &[[f64; 3]; 3]) -> f64 {
    let u = |i: i64, j: i64| patch[(j + 1) as usize][(i + 1) as usize];
    let dx = |i: i64, j: i64| (u(i + 1, j) - u(i - 1, j)) / (2.0 * h);
    let dy = |i: i64, j: i64| (u(i, j + 1) - u(i, j - 1)) / (2.0 * h);
    let mut f = [0.0; 4];
    for d in 0..4 {
        let (ox, oy) = DIRS[d];
        let (q, t) = if oy == 0 {
            let q = if ox > 0 { u(1, 0) - u(0, 0) } else { u(0, 0) - u(-1, 0) } / h;
            (q, 0.5 * (dy(0, 0) + dy(ox, 0)))
        } else {
            let q = if oy > 0 { u(0, 1) - u(0, 0) } else { u(0, 0) - u(0, -1) } / h;
            (q, 0.5 * (dx(0, 0) + dx(0, oy)))
        };
        let mid = center + Vector::new(ox as f64, oy as f64) * (0.5 * h);
        let lam = model.lambda(&mid);
        f[d] = flux(q, t, 1.0 / (lam * lam)).0;
    }
    let lam = model.lambda(center);
    ((f[EAST] - f[WEST]) / h + (f[NORTH] - f[SOUTH]) / h) / (lam * lam)
}
