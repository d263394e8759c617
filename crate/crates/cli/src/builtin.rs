//! Scenarios shipped with the binary.

pub struct Builtin {
    pub name: &'static str,
    pub source: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin { name: "annulus_gated", source: include_str!("../scenarios/annulus_gated.json") },
    Builtin { name: "annulus_identities", source: include_str!("../scenarios/annulus_identities.json") },
    Builtin { name: "annulus_supersolution", source: include_str!("../scenarios/annulus_supersolution.json") },
    Builtin { name: "annulus_zero", source: include_str!("../scenarios/annulus_zero.json") },
    Builtin { name: "annulus_zero_supersolution", source: include_str!("../scenarios/annulus_zero_supersolution.json") },
    Builtin { name: "bump_annulus", source: include_str!("../scenarios/bump_annulus.json") },
    Builtin { name: "catenoid_solvable", source: include_str!("../scenarios/catenoid_solvable.json") },
    Builtin { name: "catenoid_unsolvable", source: include_str!("../scenarios/catenoid_unsolvable.json") },
    Builtin { name: "disk_sentinel", source: include_str!("../scenarios/disk_sentinel.json") },
    Builtin { name: "ellipse_points", source: include_str!("../scenarios/ellipse_points.json") },
    Builtin { name: "exterior_cos", source: include_str!("../scenarios/exterior_cos.json") },
    Builtin { name: "exterior_wall_supersolution", source: include_str!("../scenarios/exterior_wall_supersolution.json") },
    Builtin { name: "helicoid", source: include_str!("../scenarios/helicoid.json") },
    Builtin { name: "hyperbolic_disk_sentinel", source: include_str!("../scenarios/hyperbolic_disk_sentinel.json") },
    Builtin { name: "scherk", source: include_str!("../scenarios/scherk.json") },
];

pub fn find(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}
