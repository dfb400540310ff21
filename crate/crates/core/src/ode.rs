//! Adaptive Dormand-Prince 5(4) integration with exact output times.

use crate::error::{FinslerError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-11,
            atol: 1e-12,
            h0: 1e-3,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub steps: usize,
    pub rejected: usize,
    /// Largest accepted scaled error estimate (<= 1 by construction).
    pub max_error: f64,
    /// Set when `stop` ended the integration before the last output time.
    pub truncated: bool,
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
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += h * c * v;
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` through every time in `outputs`
/// (increasing, all `>= t0`), landing on each exactly.
///
/// `stop(t, y)` is checked after every accepted step; when it returns true
/// the solution is truncated at that step.
pub fn integrate<F, S>(
    f: F,
    t0: f64,
    y0: &[f64],
    outputs: &[f64],
    opts: &OdeOptions,
    stop: S,
) -> Result<OdeSolution>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
    S: Fn(f64, &[f64]) -> bool,
{
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
        return Err(FinslerError::Integrator("output times must be increasing".into()));
    }
    let mut sol = OdeSolution {
        ts: Vec::with_capacity(outputs.len()),
        ys: Vec::with_capacity(outputs.len()),
        steps: 0,
        rejected: 0,
        max_error: 0.0,
        truncated: false,
    };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = f(t, &y)?;
    let mut h = opts.h0;
    for &target in outputs {
        while target - t > 1e-14 * target.abs().max(1.0) {
            if sol.steps + sol.rejected >= opts.max_steps {
                return Err(FinslerError::Integrator(format!(
                    "step budget {} exhausted at t = {t}",
                    opts.max_steps
                )));
            }
            let hs = h.min(target - t);
            let stage = || -> Result<(Vec<f64>, Vec<f64>, f64)> {
                let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
                let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
                let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
                let k5 = f(
                    t + C5 * hs,
                    &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                )?;
                let k6 = f(
                    t + hs,
                    &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                )?;
                let y5 = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
                let k7 = f(t + hs, &y5)?;
                let mut err = 0.0f64;
                for i in 0..y.len() {
                    let e = hs
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                    err = err.max((e / sc).abs());
                }
                Ok((y5, k7, err))
            };
            match stage() {
                Ok((y5, k7, err)) if err <= 1.0 && y5.iter().all(|v| v.is_finite()) => {
                    t += hs;
                    if (target - t).abs() <= 1e-14 * target.abs().max(1.0) {
                        t = target;
                    }
                    y = y5;
                    k1 = k7;
                    sol.steps += 1;
                    sol.max_error = sol.max_error.max(err);
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // keep the nominal step when this one was clipped by an output time
                    if hs == h || grow < 1.0 {
                        h = hs * grow;
                    }
                    if stop(t, &y) {
                        sol.truncated = true;
                        sol.ts.push(t);
                        sol.ys.push(y);
                        return Ok(sol);
                    }
                }
                Ok((_, _, err)) => {
                    sol.rejected += 1;
                    let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
                    h = hs * shrink;
                }
                Err(e @ FinslerError::Domain(_)) | Err(e @ FinslerError::Slit { .. }) => {
                    // a trial stage left the domain; retry with a smaller step
                    sol.rejected += 1;
                    h = hs * 0.25;
                    if h < 1e-14 * t.abs().max(1.0) {
                        return Err(e);
                    }
                }
                Err(e) => return Err(e),
            }
            if h < 1e-15 * t.abs().max(1.0) {
                return Err(FinslerError::Integrator(format!("step size underflow at t = {t}")));
            }
        }
        sol.ts.push(target);
        sol.ys.push(y.clone());
    }
    Ok(sol)
}
