//! Shared fixtures for the benchmarks.

use msurf_core::domain::{BoundaryData, ComponentSpec, CurveSpec, DomainKind, DomainSpec, PhiSpec, Side};
use msurf_core::MetricModel;

/// Euclidean annulus `1 < |z| < 2`.
pub fn annulus() -> DomainSpec {
    DomainSpec::new(
        MetricModel::euclidean(),
        &[
            ComponentSpec { curve: CurveSpec::Circle { center: [0.0, 0.0], radius: 2.0 }, side: Side::Inside },
            ComponentSpec { curve: CurveSpec::Circle { center: [0.0, 0.0], radius: 1.0 }, side: Side::Outside },
        ],
        DomainKind::Bounded,
        1.0,
    )
    .expect("annulus")
}

/// Zero on the outer circle and `amplitude·sin` on the inner one.
pub fn sine_data(domain: &DomainSpec, amplitude: f64) -> BoundaryData {
    let inner = PhiSpec::Sinusoid { amplitude, wavenumber: 1.0, phase: 0.0, offset: 0.0 };
    BoundaryData::new(domain, vec![PhiSpec::Constant { value: 0.0 }, inner]).expect("data")
}
