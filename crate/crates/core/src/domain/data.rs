//! Boundary functions of metric arc-length and their intrinsic norms.

use serde::{Deserialize, Serialize};

use super::curve::PeriodicCubic;
use super::DomainSpec;
use crate::error::{Error, Result};

const NORM_SAMPLES: usize = 512;

/// Boundary function on one component, as a function of arc-length `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PhiSpec {
    Constant { value: f64 },
    /// `offset + amplitude·sin(2π·wavenumber·s/L + phase)` on a component of length `L`.
    Sinusoid {
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Values at `s = i·L/n`, `i = 0..n`, interpolated by a periodic spline.
    Sampled { values: Vec<f64> },
}

impl PhiSpec {
    fn validate(&self) -> Result<()> {
        match self {
            PhiSpec::Constant { value } if !value.is_finite() => Err(Error::Input("constant data must be finite".into())),
            PhiSpec::Sinusoid { wavenumber, amplitude, phase, offset } => {
                if ![*wavenumber, *amplitude, *phase, *offset].iter().all(|v| v.is_finite()) {
                    return Err(Error::Input("sinusoid parameters must be finite".into()));
                }
                if (wavenumber - wavenumber.round()).abs() > 1e-12 {
                    return Err(Error::Input(format!(
                        "sinusoid wavenumber {wavenumber} is not an integer, data is not periodic"
                    )));
                }
                Ok(())
            }
            PhiSpec::Sampled { values } => {
                if values.len() < 4 {
                    return Err(Error::Input("sampled data needs at least 4 values".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Input("sampled data must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Scales the data by `c`.
    pub fn scaled(&self, c: f64) -> PhiSpec {
        match self {
            PhiSpec::Constant { value } => PhiSpec::Constant { value: c * value },
            PhiSpec::Sinusoid { amplitude, wavenumber, phase, offset } => PhiSpec::Sinusoid {
                amplitude: c * amplitude,
                wavenumber: *wavenumber,
                phase: *phase,
                offset: c * offset,
            },
            PhiSpec::Sampled { values } => PhiSpec::Sampled { values: values.iter().map(|v| c * v).collect() },
        }
    }
}

#[derive(Debug, Clone)]
enum Compiled {
    Constant(f64),
    Sinusoid { amplitude: f64, omega: f64, phase: f64, offset: f64 },
    Spline { spline: PeriodicCubic, scale: f64 },
}

impl Compiled {
    fn eval(&self, s: f64) -> (f64, f64, f64) {
        match self {
            Compiled::Constant(v) => (*v, 0.0, 0.0),
            Compiled::Sinusoid { amplitude, omega, phase, offset } => {
                let (sn, cs) = (omega * s + phase).sin_cos();
                (offset + amplitude * sn, amplitude * omega * cs, -amplitude * omega * omega * sn)
            }
            Compiled::Spline { spline, scale } => {
                let (v, d1, d2) = spline.eval(s * scale);
                (v, d1 * scale, d2 * scale * scale)
            }
        }
    }
}

/// `osc(φ)`, `sup|Dφ|`, `sup|D²φ|` and the extrema of `φ` over all components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataNorms {
    pub osc: f64,
    pub d1: f64,
    pub d2: f64,
    pub min: f64,
    pub max: f64,
}

/// One boundary function per component, parametrized by metric arc-length.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub specs: Vec<PhiSpec>,
    compiled: Vec<Compiled>,
    lengths: Vec<f64>,
}

impl BoundaryData {
    pub fn new(domain: &DomainSpec, specs: Vec<PhiSpec>) -> Result<Self> {
        if specs.len() != domain.components.len() {
            return Err(Error::Input(format!(
                "{} boundary functions given for {} components",
                specs.len(),
                domain.components.len()
            )));
        }
        let lengths: Vec<f64> = domain.components.iter().map(|c| c.length()).collect();
        let compiled = specs
            .iter()
            .zip(&lengths)
            .map(|(spec, &len)| {
                spec.validate()?;
                Ok(match spec {
                    PhiSpec::Constant { value } => Compiled::Constant(*value),
                    PhiSpec::Sinusoid { amplitude, wavenumber, phase, offset } => Compiled::Sinusoid {
                        amplitude: *amplitude,
                        omega: 2.0 * std::f64::consts::PI * wavenumber.round() / len,
                        phase: *phase,
                        offset: *offset,
                    },
                    PhiSpec::Sampled { values } => Compiled::Spline {
                        spline: PeriodicCubic::new(values.clone())?,
                        scale: values.len() as f64 / len,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { specs, compiled, lengths })
    }

    pub fn constant(domain: &DomainSpec, value: f64) -> Result<Self> {
        Self::new(domain, vec![PhiSpec::Constant { value }; domain.components.len()])
    }

    /// Data resampled at uniform arc-length from values given at arbitrary
    /// increasing parameters `s` (not repeating the endpoint).
    pub fn resample(s: &[f64], values: &[f64], length: f64, count: usize) -> Result<PhiSpec> {
        if s.len() != values.len() || s.len() < 4 {
            return Err(Error::Input("resampling needs at least 4 matching samples".into()));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) || s[s.len() - 1] >= s[0] + length {
            return Err(Error::Input("sample positions must increase within one period".into()));
        }
        // Periodic linear interpolation onto the uniform grid.
        let n = s.len();
        let out = (0..count)
            .map(|i| {
                let x = s[0] + length * i as f64 / count as f64;
                let j = s.partition_point(|&v| v <= x).saturating_sub(1);
                let (s0, v0) = (s[j], values[j]);
                let (s1, v1) = if j + 1 < n { (s[j + 1], values[j + 1]) } else { (s[0] + length, values[0]) };
                v0 + (v1 - v0) * (x - s0) / (s1 - s0)
            })
            .collect::<Vec<_>>();
        // Rotate so the first value sits at s = 0.
        let shift = (s[0].rem_euclid(length) / length * count as f64).round() as usize % count;
        let mut rotated = vec![0.0; count];
        for (i, v) in out.into_iter().enumerate() {
            rotated[(i + shift) % count] = v;
        }
        Ok(PhiSpec::Sampled { values: rotated })
    }

    /// `(φ, dφ/ds, d²φ/ds²)` on `component` at arc-length `s` (taken mod length).
    pub fn eval(&self, component: usize, s: f64) -> (f64, f64, f64) {
        self.compiled[component].eval(s.rem_euclid(self.lengths[component]))
    }

    pub fn value(&self, component: usize, s: f64) -> f64 {
        self.eval(component, s).0
    }

    pub fn is_constant(&self) -> bool {
        self.compiled.iter().all(|c| matches!(c, Compiled::Constant(_)))
    }

    /// Sample-based suprema with one local refinement pass around each argmax.
    pub fn norms(&self) -> DataNorms {
        let mut n = DataNorms { osc: 0.0, d1: 0.0, d2: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY };
        for (ci, len) in self.lengths.iter().enumerate() {
            let step = len / NORM_SAMPLES as f64;
            let samples: Vec<(f64, f64, f64)> = (0..NORM_SAMPLES).map(|i| self.eval(ci, i as f64 * step)).collect();
            let refine = |pick: &dyn Fn(&(f64, f64, f64)) -> f64| -> f64 {
                let i = (0..NORM_SAMPLES).max_by(|&a, &b| pick(&samples[a]).total_cmp(&pick(&samples[b]))).unwrap();
                let mut best = pick(&samples[i]);
                for k in -64..=64 {
                    let s = (i as f64 + k as f64 / 64.0) * step;
                    best = best.max(pick(&self.eval(ci, s)));
                }
                best
            };
            n.max = n.max.max(refine(&|v| v.0));
            n.min = n.min.min(-refine(&|v| -v.0));
            n.d1 = n.d1.max(refine(&|v| v.1.abs()));
            n.d2 = n.d2.max(refine(&|v| v.2.abs()));
        }
        n.osc = n.max - n.min;
        n
    }
}
