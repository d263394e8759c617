use msurf_core::domain::{BoundaryData, ComponentSpec, CurveSpec, DomainKind, DomainSpec, Side};
use msurf_core::exterior::{solve_exterior, AsymptoticSpec, ExteriorParams};
use msurf_core::geometry::hyperbolic_distance;
use msurf_core::{MetricModel, Point};

#[test]
fn moving_the_exhaustion_center_changes_little() {
    let d = DomainSpec::new(
        MetricModel::hyperbolic(1.0),
        &[ComponentSpec { curve: CurveSpec::GeodesicCircle { center: [0.0, 0.0], radius: 1.0 }, side: Side::Outside }],
        DomainKind::Exterior,
        1.0,
    )
    .unwrap();
    let data = BoundaryData::constant(&d, 0.0).unwrap();
    let psi = AsymptoticSpec::Harmonic { amplitude: 1.0, wavenumber: 1.0, phase: 0.0, offset: 0.0 };
    let radii: Vec<f64> = (2..=6).map(f64::from).collect();
    let base = ExteriorParams { center: [0.0, 0.0], radii: radii.clone(), h: 1.0 / 32.0, compact: [1.5, 2.5], newton: Default::default() };
    // Geodesic distance 0.1 from the origin.
    let shifted = ExteriorParams { center: [(0.05f64).tanh(), 0.0], radii: radii.iter().map(|r| r + 0.1).collect(), ..base.clone() };
    assert!((hyperbolic_distance(1.0, &Point::zeros(), &Point::from(shifted.center)) - 0.1).abs() < 1e-12);
    let a = solve_exterior(&d, &data, &psi, &base).unwrap();
    let b = solve_exterior(&d, &data, &psi, &shifted).unwrap();
    assert!(a.completed() && b.completed() && a.deltas_decreasing());
    let (fa, fb) = (a.field.unwrap(), b.field.unwrap());
    let mut worst = 0.0f64;
    for (n, u) in fa.grid.interior.iter().zip(&fa.u) {
        let r = hyperbolic_distance(1.0, &Point::zeros(), &n.point);
        if (1.5..=2.5).contains(&r) {
            let (i, j) = fa.grid.lattice_coords(n.node);
            worst = worst.max((fb.at_lattice(i, j).unwrap() - u).abs());
        }
    }
    let last = *a.cauchy_deltas.last().unwrap();
    assert!(worst <= 10.0 * last, "{worst} vs {last}");
}
