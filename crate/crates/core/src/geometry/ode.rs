//! Adaptive Dormand–Prince 5(4) integrator over fixed-size states.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-10,
            max_steps: 200_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (difference between the 5th and embedded 4th order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// The right-hand side may fail (e.g. when the state leaves a chart); the
/// error is propagated unchanged.
pub fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: OdeOptions,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * (span.abs() * 0.01).clamp(1e-6, 0.05);
    let mut k1 = f(t, &y)?;
    let mut steps = 0usize;

    loop {
        if (t1 - t) * dir <= 0.0 {
            return Ok(y);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::NonConvergence {
                what: "ODE integration (step budget exhausted)",
                best: t,
                lower: t0.min(t1),
                upper: t0.max(t1),
            });
        }

        let y2 = axpy(&y, &[(h * A21, &k1)]);
        let k2 = f(t + C2 * h, &y2)?;
        let y3 = axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]);
        let k3 = f(t + C3 * h, &y3)?;
        let y4 = axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]);
        let k4 = f(t + C4 * h, &y4)?;
        let y5 = axpy(
            &y,
            &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)],
        );
        let k5 = f(t + C5 * h, &y5)?;
        let y6 = axpy(
            &y,
            &[
                (h * A61, &k1),
                (h * A62, &k2),
                (h * A63, &k3),
                (h * A64, &k4),
                (h * A65, &k5),
            ],
        );
        let k6 = f(t + h, &y6)?;
        let ynew = axpy(
            &y,
            &[(h * B1, &k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)],
        );
        let k7 = f(t + h, &ynew)?;

        let mut err = 0.0f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err = err.max((e / sc).abs());
        }

        if err <= 1.0 || h.abs() < 1e-14 {
            t += h;
            y = ynew;
            k1 = k7;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(|_, y: &[f64; 1]| Ok([-y[0]]), 0.0, [1.0], 2.0, OdeOptions::default()).unwrap();
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let f = |_: f64, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let y = integrate(f, 0.0, [0.0, 1.0], -1.0, OdeOptions::default()).unwrap();
        assert!((y[0] - (-1.0f64).sin()).abs() < 1e-9);
        assert!((y[1] - (-1.0f64).cos()).abs() < 1e-9);
    }

    #[test]
    fn rhs_error_propagates() {
        let r = integrate(
            |t, _y: &[f64; 1]| if t > 0.5 { Err(Error::ChartExit { param: t }) } else { Ok([1.0]) },
            0.0,
            [0.0],
            1.0,
            OdeOptions::default(),
        );
        assert!(matches!(r, Err(Error::ChartExit { .. })));
    }
}
