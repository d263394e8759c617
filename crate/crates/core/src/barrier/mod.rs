//! Explicit upper barriers `ω = φ + a·ln(1 + b·ρ)` near the boundary, the
//! oscillation bound `C = ln(1 + bε)/b` and the resulting solvability gate.

mod checks;

pub use checks::{
    check_supersolution, frame_identity_check, frame_identity_study, IdentityResiduals, IdentityStudy, SupersolutionReport, IDENTITY_FLOOR,
};

use serde::{Deserialize, Serialize};

use crate::domain::{BoundaryData, DataNorms, DomainSpec};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Factor applied to the strict upper bounds on `ε`.
pub const EPS_FACTOR: f64 = 0.99;

/// Inputs of the constant formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierInputs {
    /// `‖Dφ‖`
    pub d1: f64,
    /// `‖D²φ‖`
    pub d2: f64,
    /// `‖A‖`
    pub a_norm: f64,
    pub hinf: f64,
    /// Ricci bound; only `|r|` enters.
    pub r: f64,
    pub rho0: f64,
    pub n: usize,
}

/// Bookkeeping terms of the barrier inequality, all non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTermBounds {
    pub alpha: f64,
    pub beta: f64,
    pub lambda_t: f64,
    pub theta: f64,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub c: f64,
}

impl BoundaryTermBounds {
    pub fn new(i: &BarrierInputs) -> Self {
        let m = (i.n - 1) as f64;
        let alpha = i.d1 * i.d1;
        let beta = i.d2;
        let lambda_t = i.d2 * alpha;
        let theta = i.a_norm * alpha;
        let mu = m * m * i.d1 * i.rho0 * i.r.abs();
        let sigma = beta + mu;
        Self { alpha, beta, lambda_t, theta, mu, sigma, delta: lambda_t + sigma * (1.0 + alpha), c: m * (1.0 + alpha) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BarrierCase {
    #[serde(rename = "negative_Hinf")]
    NegativeHinf,
    #[serde(rename = "nonneg_Hinf")]
    NonnegHinf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierCertificate {
    pub case: BarrierCase,
    /// `+∞` marks flat data on a mean-convex boundary, where `ψ(t) = 2t`.
    #[serde(with = "crate::serde_inf")]
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    #[serde(rename = "C", with = "crate::serde_inf")]
    pub c_bound: f64,
    pub hinf: f64,
    pub rho0: f64,
    pub terms: BoundaryTermBounds,
    pub inputs: BarrierInputs,
}

/// Constants of the barrier for the given boundary norms and geometry.
pub fn barrier_constants(inputs: BarrierInputs) -> Result<BarrierCertificate> {
    let BarrierInputs { d1, d2, a_norm, hinf, r, rho0, n } = inputs;
    if !(rho0 > 0.0) || n < 2 || !(d1 >= 0.0) || !(d2 >= 0.0) || !(a_norm >= 0.0) || !hinf.is_finite() || !r.is_finite() {
        return Err(Error::Input(format!("invalid barrier inputs {inputs:?}")));
    }
    let terms = BoundaryTermBounds::new(&inputs);
    let m = (n - 1) as f64;
    let base = d1 * d1 * (d2 + a_norm) + (2.0 + d1 * d1) * (d2 + m * m * rho0 * d1 * r.abs());
    let (case, a, b, eps, c_bound) = if hinf < 0.0 {
        let b = 3.0 * (base - (2.0 + d1 * d1) * m * hinf);
        let eps = EPS_FACTOR * (1.0 / (2.0 * b)).min(rho0);
        (BarrierCase::NegativeHinf, 1.0 / b, b, eps, (1.0 + b * eps).ln() / b)
    } else if base > 0.0 {
        let a = 1.0 / base;
        (BarrierCase::NonnegHinf, a, 2.0 / a, EPS_FACTOR * (a / 2.0).min(rho0), f64::INFINITY)
    } else {
        (BarrierCase::NonnegHinf, f64::INFINITY, 0.0, EPS_FACTOR * rho0, f64::INFINITY)
    };
    Ok(BarrierCertificate { case, a, b, eps, c_bound, hinf, rho0, terms, inputs })
}

impl BarrierCertificate {
    /// `(ψ, ψ', ψ'')` at `t`; the degenerate certificate uses the limit `2t`.
    pub fn psi(&self, t: f64) -> (f64, f64, f64) {
        if self.a.is_infinite() {
            return (2.0 * t, 2.0, 0.0);
        }
        let q = 1.0 + self.b * t;
        (self.a * q.ln(), self.a * self.b / q, -self.a * self.b * self.b / (q * q))
    }

    /// `ψ'(0) = a·b`, the slope of the barrier at the boundary.
    pub fn slope(&self) -> f64 {
        self.psi(0.0).1
    }

    pub fn is_degenerate(&self) -> bool {
        self.a.is_infinite()
    }
}

/// Certificate for a domain and data: norms from the data, `‖A‖`, `H_inf`, the
/// tube radius and a Ricci bound over the tube.
pub fn certificate_for(domain: &DomainSpec, norms: &DataNorms) -> Result<BarrierCertificate> {
    barrier_constants(BarrierInputs {
        d1: norms.d1,
        d2: norms.d2,
        a_norm: domain.a_norm_sup(),
        hinf: domain.h_inf().value,
        r: domain.ricci_bound(domain.rho0)?,
        rho0: domain.rho0,
        n: domain.model.n,
    })
}

/// `ω(z) = φ(foot(z)) + ψ(ρ(z))` inside the barrier tube.
pub fn omega_eval(cert: &BarrierCertificate, domain: &DomainSpec, data: &BoundaryData, z: &Point) -> Result<f64> {
    if domain.signed_distance(z) < 0.0 {
        return Err(Error::OutsideDomain(*z));
    }
    let foot = domain.nearest_foot(z)?;
    if foot.rho > cert.eps {
        return Err(Error::OutOfTube { rho: foot.rho, eps: cert.eps });
    }
    Ok(data.value(foot.component, foot.s) + cert.psi(foot.rho).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDecision {
    pub pass: bool,
    pub osc: f64,
    #[serde(rename = "C", with = "crate::serde_inf")]
    pub c_bound: f64,
    #[serde(with = "crate::serde_inf")]
    pub margin: f64,
}

/// `osc(φ) ≤ C`; sufficient for solvability, not necessary.
pub fn solvability_gate(norms: &DataNorms, cert: &BarrierCertificate) -> GateDecision {
    GateDecision {
        pass: norms.osc <= cert.c_bound,
        osc: norms.osc,
        c_bound: cert.c_bound,
        margin: cert.c_bound - norms.osc,
    }
}

#[cfg(test)]
mod tests;
