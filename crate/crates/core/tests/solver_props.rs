use std::sync::Arc;

use msurf_core::msolver::{newton_solve, AnnularSector, MaskedGrid, NewtonParams, Rectangle};
use msurf_core::{MetricModel, Point};
use proptest::prelude::*;

fn grids() -> Vec<Arc<MaskedGrid>> {
    vec![
        Arc::new(MaskedGrid::new(&Rectangle { model: MetricModel::euclidean(), x0: -0.6, x1: 0.7, y0: -0.5, y1: 0.5 }, 1.0 / 16.0).unwrap()),
        Arc::new(MaskedGrid::new(&AnnularSector { model: MetricModel::euclidean(), r0: 0.5, r1: 1.2, half_angle: 1.3 }, 1.0 / 16.0).unwrap()),
        Arc::new(MaskedGrid::new(&Rectangle { model: MetricModel::hyperbolic(1.0), x0: -0.5, x1: 0.5, y0: -0.4, y1: 0.6 }, 1.0 / 16.0).unwrap()),
    ]
}

fn data(c: [f64; 4]) -> impl Fn(&Point) -> f64 + Sync {
    move |p: &Point| c[0] * (2.0 * p.x + c[1]).sin() + c[2] * p.y * p.y + c[3] * p.x * p.y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn adding_a_constant_shifts_the_solution(which in 0usize..3, c in proptest::array::uniform4(-1.0..1.0f64), shift in -3.0..3.0f64) {
        let grid = grids().swap_remove(which);
        let f = data(c);
        let g = grid.boundary_values(&f);
        let shifted: Vec<f64> = g.iter().map(|v| v + shift).collect();
        let params = NewtonParams::default();
        let (u, r) = newton_solve(grid.clone(), g, None, &params).unwrap();
        let (v, s) = newton_solve(grid, shifted, None, &params).unwrap();
        prop_assert!(r.converged && s.converged);
        let worst = u.u.iter().zip(&v.u).map(|(a, b)| (b - a - shift).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn ordered_boundary_data_gives_ordered_solutions(which in 0usize..3, c in proptest::array::uniform4(-1.0..1.0f64), gap in proptest::array::uniform4(0.0..0.5f64)) {
        let grid = grids().swap_remove(which);
        let low = grid.boundary_values(&data(c));
        let bump = grid.boundary_values(&move |p: &Point| gap[0] + gap[1] * (3.0 * p.x).cos().abs() + gap[2] * p.y.abs() + gap[3] * p.x * p.x);
        let high: Vec<f64> = low.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let params = NewtonParams::default();
        let (u1, _) = newton_solve(grid.clone(), low, None, &params).unwrap();
        let (u2, _) = newton_solve(grid, high, None, &params).unwrap();
        prop_assert!(u1.u.iter().zip(&u2.u).all(|(a, b)| *a <= b + 1e-9));
    }
}
