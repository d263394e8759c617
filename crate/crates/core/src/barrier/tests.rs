use super::*;
use crate::domain::{ComponentSpec, CurveSpec, DomainKind, PhiSpec, Side};
use crate::geometry::MetricModel;

fn inputs(d1: f64, d2: f64, a_norm: f64, hinf: f64, r: f64, rho0: f64) -> BarrierInputs {
    BarrierInputs { d1, d2, a_norm, hinf, r, rho0, n: 2 }
}

fn annulus() -> DomainSpec {
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

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn annulus_constants() {
    let c = barrier_constants(inputs(0.0, 0.0, 1.0, -1.0, 0.0, 0.45)).unwrap();
    assert_eq!(c.case, BarrierCase::NegativeHinf);
    assert_eq!(c.b, 6.0);
    assert_eq!(c.a, 1.0 / 6.0);
    assert!(rel(c.eps, 0.0825) < 1e-12);
    assert!(rel(c.c_bound, 1.495f64.ln() / 6.0) < 1e-12);
    assert!((c.c_bound - 0.06699).abs() < 1e-4);
}

#[test]
fn unit_parameter_constants() {
    let c = barrier_constants(inputs(1.0, 1.0, 1.0, -1.0, 0.0, 1.0)).unwrap();
    assert_eq!(c.b, 24.0);
    assert!(rel(c.eps, 0.99 / 48.0) < 1e-15);
    assert!((c.c_bound - 0.01675).abs() < 1e-5);
}

#[test]
fn second_route_through_term_bounds() {
    for &(d1, d2, an, hinf, r, rho0) in &[(0.3, 1.2, 0.7, -2.0, -1.0, 0.4), (2.0, 0.1, 3.0, -0.1, 4.0, 0.05)] {
        let i = inputs(d1, d2, an, hinf, r, rho0);
        let c = barrier_constants(i).unwrap();
        let t = c.terms;
        let b3 = t.delta + t.sigma + t.theta - (t.c + 1.0) * hinf;
        assert!(rel(c.b / 3.0, b3) < 1e-14);
        assert!(rel(c.a * c.b, 1.0) < 1e-15);
        assert!(c.eps * c.b < 0.5 && c.eps < rho0);
        assert!(c.c_bound < c.a * 1.5f64.ln());
        assert_eq!(c.c_bound, (1.0 + c.b * c.eps).ln() / c.b);
    }
}

#[test]
fn mean_convex_case() {
    let c = barrier_constants(inputs(0.5, 0.2, 1.0, 1.0, 0.0, 0.3)).unwrap();
    assert_eq!(c.case, BarrierCase::NonnegHinf);
    assert!(c.c_bound.is_infinite());
    assert!(c.b > 1.0 / c.a);
    assert!(c.eps < (c.a - 1.0 / c.b).min(0.3));
    let flat = barrier_constants(inputs(0.0, 0.0, 1.0, 1.0, 0.0, 0.3)).unwrap();
    assert!(flat.is_degenerate());
    assert!(rel(flat.eps, 0.99 * 0.3) < 1e-15);
    assert_eq!(flat.psi(0.1).0, 0.2);
}

#[test]
fn negative_ricci_bound_enters_by_magnitude() {
    let pos = barrier_constants(inputs(0.5, 0.5, 1.0, -1.0, 2.0, 0.3)).unwrap();
    let neg = barrier_constants(inputs(0.5, 0.5, 1.0, -1.0, -2.0, 0.3)).unwrap();
    assert_eq!(pos.c_bound, neg.c_bound);
}

#[test]
fn psi_is_concave_and_increasing() {
    let c = barrier_constants(inputs(1.0, 1.0, 1.0, -1.0, 0.0, 1.0)).unwrap();
    for k in 0..=20 {
        let t = c.eps * k as f64 / 20.0;
        let (_, d1, d2) = c.psi(t);
        assert!(d1 > 0.0 && d2 < 0.0);
        assert!((d2 + c.a * c.b * c.b / (1.0 + c.b * t).powi(2)).abs() < 1e-12);
    }
    assert_eq!(c.psi(0.0).0, 0.0);
    assert!(rel(c.psi(c.eps).0, c.c_bound) < 1e-15);
}

#[test]
fn omega_on_annulus() {
    let d = annulus();
    let data = BoundaryData::constant(&d, 0.0).unwrap();
    let c = barrier_constants(inputs(0.0, 0.0, 1.0, -1.0, 0.0, 0.45)).unwrap();
    let z = crate::geometry::Point::new(1.04, 0.0);
    assert!((omega_eval(&c, &d, &data, &z).unwrap() - 1.24f64.ln() / 6.0).abs() < 1e-12);
    assert_eq!(omega_eval(&c, &d, &data, &crate::geometry::Point::new(1.0, 0.0)).unwrap(), 0.0);
    assert!(matches!(
        omega_eval(&c, &d, &data, &crate::geometry::Point::new(1.2, 0.0)),
        Err(Error::OutOfTube { .. })
    ));
}

#[test]
fn certificate_from_domain_matches_hand_constants() {
    let d = annulus();
    let data = BoundaryData::constant(&d, 0.0).unwrap();
    let cert = certificate_for(&d, &data.norms()).unwrap();
    assert!(rel(cert.b, 6.0) < 1e-12 && rel(cert.a, 1.0 / 6.0) < 1e-12);
    assert!(rel(cert.eps, 0.0825) < 1e-12);
}

#[test]
fn gate_examples() {
    let d = annulus();
    let zero = BoundaryData::constant(&d, 0.0).unwrap();
    let cert = certificate_for(&d, &zero.norms()).unwrap();
    let g = solvability_gate(&zero.norms(), &cert);
    assert!(g.pass && rel(g.margin, 1.495f64.ln() / 6.0) < 1e-12);
    let step = BoundaryData::new(&d, vec![PhiSpec::Constant { value: 0.0 }, PhiSpec::Constant { value: 0.5 }]).unwrap();
    let cert = certificate_for(&d, &step.norms()).unwrap();
    assert!(!solvability_gate(&step.norms(), &cert).pass);
}

#[test]
fn certificate_json_uses_inf_strings() {
    let c = barrier_constants(inputs(0.0, 0.0, 1.0, 1.0, 0.0, 0.3)).unwrap();
    let v = serde_json::to_value(&c).unwrap();
    assert_eq!(v["C"], "inf");
    assert_eq!(v["a"], "inf");
    let back: BarrierCertificate = serde_json::from_value(v).unwrap();
    assert!(back.c_bound.is_infinite());
}
