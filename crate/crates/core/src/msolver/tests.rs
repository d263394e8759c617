use std::sync::Arc;

use super::*;
use crate::geometry::{MetricModel, Point, RadialProfile};

fn square(model: MetricModel, half: f64) -> Rectangle {
    Rectangle { model, x0: -half, x1: half, y0: -half, y1: half }
}

fn scherk(p: &Point) -> f64 {
    (p.x.cos() / p.y.cos()).ln()
}

#[test]
fn constant_data_is_reproduced_without_iterations() {
    let grid = Arc::new(MaskedGrid::new(&square(MetricModel::hyperbolic(1.0), 0.55), 1.0 / 32.0).unwrap());
    let g = grid.boundary_values(&|_| 0.7);
    let (field, report) = newton_solve(grid, g, None, &NewtonParams::default()).unwrap();
    assert!(report.converged);
    assert!(report.iterations <= 1);
    assert!(field.u.iter().all(|v| (v - 0.7).abs() < 1e-12));
}

#[test]
fn affine_data_has_zero_residual_on_aligned_grid() {
    let grid = MaskedGrid::new(&square(MetricModel::euclidean(), 1.0), 1.0 / 16.0).unwrap();
    assert!(grid.cuts.iter().all(|c| c.theta == 1.0));
    let f = |p: &Point| 3.0 * p.x - 2.0 * p.y;
    let problem = Problem::new(&grid, grid.boundary_values(&f));
    let u: Vec<f64> = grid.interior.iter().map(|n| f(&n.point)).collect();
    let r = problem.residual(&problem.x_of_u(&u), false);
    assert!(r.iter().all(|v| *v == 0.0));
}

#[test]
fn affine_data_is_consistent_on_cut_cells() {
    let grid = MaskedGrid::new(&AnnularSector { model: MetricModel::euclidean(), r0: 1.0, r1: 2.0, half_angle: 1.0 }, 1.0 / 24.0).unwrap();
    let f = |p: &Point| 0.5 * p.x + 1.5 * p.y - 0.25;
    let problem = Problem::new(&grid, grid.boundary_values(&f));
    let u: Vec<f64> = grid.interior.iter().map(|n| f(&n.point)).collect();
    let r = problem.residual(&problem.x_of_u(&u), false);
    let worst = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn jacobian_matches_finite_differences() {
    let model = MetricModel::rotsym(RadialProfile::GaussianBump { base: 1.0, amplitude: 0.4, width: 0.7 });
    let region = AnnularSector { model, r0: 0.5, r1: 1.3, half_angle: 2.0 };
    let grid = MaskedGrid::new(&region, 1.0 / 16.0).unwrap();
    let g = grid.boundary_values(&|p| (3.0 * p.x).sin() + p.y * p.y);
    let problem = Problem::new(&grid, g);
    let n = grid.n_interior();
    let x: Vec<f64> = (0..n).map(|i| 0.3 * ((i * 7919) % 101) as f64 / 101.0).collect();
    let v: Vec<f64> = (0..n).map(|i| (((i * 104_729) % 97) as f64 / 97.0) - 0.5).collect();
    let (_, trips) = problem.linearize(&x, false);
    let mut jv = vec![0.0; n];
    for t in &trips {
        jv[t.row] += t.val * v[t.col];
    }
    let eps = 1e-6;
    let xp: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + eps * b).collect();
    let xm: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - eps * b).collect();
    let (rp, rm) = (problem.residual(&xp, false), problem.residual(&xm, false));
    let scale = jv.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    for i in 0..n {
        let fd = (rp[i] - rm[i]) / (2.0 * eps);
        assert!((fd - jv[i]).abs() <= 1e-6 * scale, "row {i}: {fd} vs {}", jv[i]);
    }
}

#[test]
fn discrete_divergence_theorem_on_aligned_rectangle() {
    let model = MetricModel::hyperbolic(1.0);
    let grid = MaskedGrid::new(&Rectangle { model: model.clone(), x0: -0.5, x1: 0.5, y0: -0.25, y1: 0.5 }, 1.0 / 32.0).unwrap();
    let f = |p: &Point| (2.0 * p.x).sin() * p.y + p.x * p.x;
    let problem = Problem::new(&grid, grid.boundary_values(&f));
    let x: Vec<f64> = grid.interior.iter().enumerate().map(|(k, n)| f(&n.point) + 0.01 * (k % 5) as f64 - problem.base[k]).collect();
    let r = problem.residual(&x, false);
    let h = grid.h;
    let weighted: f64 = grid.interior.iter().zip(&r).map(|(n, v)| v * model.lambda(&n.point).powi(2) * h * h).sum();
    let boundary = problem.boundary_flux(&x);
    assert!((weighted - boundary).abs() < 1e-9, "{weighted} vs {boundary}");
}

#[test]
fn scherk_surface_coarse_accuracy() {
    let grid = Arc::new(MaskedGrid::new(&square(MetricModel::euclidean(), 1.2), 1.0 / 32.0).unwrap());
    let g = grid.boundary_values(&scherk);
    let (field, report) = newton_solve(grid.clone(), g, None, &NewtonParams::default()).unwrap();
    assert!(report.converged, "{report:?}");
    let err = grid.interior.iter().zip(&field.u).map(|(n, u)| (u - scherk(&n.point)).abs()).fold(0.0, f64::max);
    assert!(err < 2e-2, "{err}");
}

#[test]
fn helicoid_sector_coarse_accuracy() {
    let region = AnnularSector { model: MetricModel::euclidean(), r0: 1.0, r1: 2.0, half_angle: 1.0 };
    let grid = Arc::new(MaskedGrid::new(&region, 1.0 / 32.0).unwrap());
    let theta = |p: &Point| p.y.atan2(p.x);
    let (field, report) = newton_solve(grid.clone(), grid.boundary_values(&theta), None, &NewtonParams::default()).unwrap();
    assert!(report.converged);
    let err = grid.interior.iter().zip(&field.u).map(|(n, u)| (u - theta(&n.point)).abs()).fold(0.0, f64::max);
    assert!(err < 1e-2, "{err}");
}

#[test]
fn continuation_with_constant_data_takes_one_step() {
    let grid = Arc::new(MaskedGrid::new(&square(MetricModel::euclidean(), 0.5), 1.0 / 16.0).unwrap());
    let g = vec![2.0; grid.cuts.len()];
    let path = continuity_solve(grid, &g, &ContinuationParams::default()).unwrap();
    assert!(path.reached_one());
    assert_eq!(path.steps.len(), 1);
}

#[test]
fn field_csv_has_header_and_masks() {
    let grid = Arc::new(MaskedGrid::new(&square(MetricModel::euclidean(), 0.3), 0.1).unwrap());
    let g = vec![1.0; grid.cuts.len()];
    let (field, _) = newton_solve(grid, g, None, &NewtonParams::default()).unwrap();
    let mut out = Vec::new();
    field.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("x,y,u,mask\n"));
    assert!(text.contains(",interior") && text.contains(",dirichlet"));
}

fn annulus_domain() -> crate::domain::DomainSpec {
    use crate::domain::{ComponentSpec, CurveSpec, DomainKind, DomainSpec, Side};
    DomainSpec::new(
        MetricModel::euclidean(),
        &[
            ComponentSpec { curve: CurveSpec::Circle { center: [0.0, 0.0], radius: 2.0 }, side: Side::Inside },
            ComponentSpec { curve: CurveSpec::Circle { center: [0.0, 0.0], radius: 1.0 }, side: Side::Outside },
        ],
        DomainKind::Bounded,
        1.0,
    )
    .unwrap()
}

#[test]
fn diagnostics_of_a_constant_field_have_no_slack() {
    use crate::barrier::certificate_for;
    use crate::domain::BoundaryData;
    let domain = annulus_domain();
    let data = BoundaryData::constant(&domain, 0.3).unwrap();
    let cert = certificate_for(&domain, &data.norms()).unwrap();
    let grid = Arc::new(MaskedGrid::new(&domain, 1.0 / 16.0).unwrap());
    let g = grid.trace_data(&domain, &data).unwrap();
    let field = ScalarField::new(grid.clone(), g, vec![0.3; grid.n_interior()]);
    let d = diagnostics(&field, &domain, &data, Some(&cert));
    assert!(d.pass());
    assert_eq!((d.max_principle.u_min, d.max_principle.u_max), (0.3, 0.3));
    let c = d.comparison.unwrap();
    assert!(c.applicable && c.nodes > 0 && c.worst_excess <= 0.0);
    assert_eq!(d.gradient_bound.unwrap().boundary_gradient, 0.0);
}

#[test]
fn barrier_comparison_holds_for_small_annulus_data() {
    use crate::barrier::{certificate_for, solvability_gate};
    use crate::domain::{BoundaryData, PhiSpec};
    let domain = annulus_domain();
    let data = BoundaryData::new(
        &domain,
        vec![PhiSpec::Constant { value: 0.0 }, PhiSpec::Sinusoid { amplitude: 0.02, wavenumber: 1.0, phase: 0.0, offset: 0.0 }],
    )
    .unwrap();
    let cert = certificate_for(&domain, &data.norms()).unwrap();
    assert!(solvability_gate(&data.norms(), &cert).pass);
    let grid = Arc::new(MaskedGrid::new(&domain, 1.0 / 32.0).unwrap());
    let g = grid.trace_data(&domain, &data).unwrap();
    let (field, report) = newton_solve(grid, g, None, &NewtonParams::default()).unwrap();
    assert!(report.converged);
    let d = diagnostics(&field, &domain, &data, Some(&cert));
    assert!(d.pass(), "{d:?}");
    assert!(d.comparison.unwrap().applicable);
}

#[test]
fn scherk_field_obeys_the_maximum_principle() {
    let grid = Arc::new(MaskedGrid::new(&square(MetricModel::euclidean(), 1.2), 1.0 / 32.0).unwrap());
    let g = grid.boundary_values(&scherk);
    let (lo, hi) = g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (field, _) = newton_solve(grid, g, None, &NewtonParams::default()).unwrap();
    let check = max_principle(&field, lo, hi);
    assert!(check.pass, "{check:?}");
    assert!(check.u_max < hi && check.u_min > lo);
}

#[test]
fn scherk_truncation_error_is_second_order_on_regular_nodes() {
    let sup = |h: f64| {
        let grid = MaskedGrid::new(&square(MetricModel::euclidean(), 1.2), h).unwrap();
        let problem = Problem::new(&grid, grid.boundary_values(&scherk));
        let u: Vec<f64> = grid.interior.iter().map(|n| scherk(&n.point)).collect();
        let r = problem.residual(&problem.x_of_u(&u), false);
        grid.interior.iter().zip(&r).filter(|(n, _)| n.is_regular()).map(|(_, v)| v.abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (sup(1.0 / 32.0), sup(1.0 / 64.0));
    assert!(coarse / fine >= 3.5, "{coarse} {fine}");
}
