//! Levi forms of the squared distance and the complex gradient identities.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connection_real::cartan;
use crate::error::{FinslerError, Result};
use crate::exec;
use crate::geodesic::{
    distance, distance_differential, distance_with, hessian_rho, io, legendre_gradient, radial_gradient_identity,
    DistanceOptions,
};
use crate::geometry::{
    apply_j, complex_jets, complex_metric_value, complex_to_real, euclidean_norm, norm_sqr_jet, real_to_complex, RealMetric,
};
use crate::jet::{lift_all, standard_pairs, wirtinger, Jet};
use crate::metrics::{vertical_data, MetricDef};
use crate::report::{SamplePlan, SampleRecord, VerificationReport};

type C = Complex64;

/// Points closer to the pole than this (times the domain scale) are excluded.
pub const POLE_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeviSample {
    pub z: Vec<C>,
    /// `G`-unit (1,0)-vector.
    pub v: Vec<C>,
    pub rho: f64,
    /// `∂²ρ²/∂z^α∂z̄^β v^α v̄^β` from connection Hessians of `ρ`.
    pub levi_value: f64,
    /// The same quantity from plain second differences of `ρ²`.
    pub direct_value: f64,
    /// `2 + ρK`.
    pub bound: f64,
    pub margin: f64,
    /// Largest disagreement between the two Hessian routes used.
    pub hessian_agreement: f64,
}

/// `D²ρ²(u, u) = 2ρ H(ρ)(u, u) + 2 dρ(u)²` via the index-form Hessian.
fn hessian_rho2(m: &dyn RealMetric, p: &[f64], x: &[f64], u: &[f64]) -> Result<(f64, f64)> {
    let h = hessian_rho(m, p, x, u)?;
    Ok((2.0 * h.rho * h.via_index_form + 2.0 * h.radial * h.radial, h.agreement))
}

/// Second directional difference of `ρ²` with one Richardson step.
fn direct_rho2(m: &dyn RealMetric, p: &[f64], x: &[f64], u: &[f64], rho: f64, w: &[f64]) -> Result<f64> {
    let opts = DistanceOptions::default();
    let r2 = |s: f64| -> Result<f64> {
        let y: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + s * b).collect();
        Ok(distance_with(m, p, &y, Some(w), &opts)?.rho.powi(2))
    };
    let h = 1e-2 * rho.min(1.0) / euclidean_norm(u);
    let c = r2(0.0)?;
    let second = |h: f64| -> Result<f64> { Ok((r2(h)? - 2.0 * c + r2(-h)?) / (h * h)) };
    Ok((4.0 * second(h / 2.0)? - second(h)?) / 3.0)
}

/// Levi form of `ρ²` at `z` along `v` (normalised to `G(z; v) = 1`) for the
/// distance from `pole`, checked against `2 + ρK`.
pub fn levi_rho2(def: &MetricDef, pole: &[C], z: &[C], v: &[C], k: f64) -> Result<LeviSample> {
    let m = def.realified();
    let p = complex_to_real(pole);
    let x = complex_to_real(z);
    let scale = if def.domain().is_finite() { def.domain() } else { 1.0 };
    let sep: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
    if euclidean_norm(&sep) < POLE_EXCLUSION * scale {
        return Err(FinslerError::Domain("sample too close to the pole".into()));
    }
    let gv = complex_metric_value(def.metric.as_ref(), z, v)?;
    let v: Vec<C> = v.iter().map(|a| a / gv.sqrt()).collect();
    let u = complex_to_real(&v);
    let ju = apply_j(&u);
    let (a, ea) = hessian_rho2(&m, &p, &x, &u)?;
    let (b, eb) = hessian_rho2(&m, &p, &x, &ju)?;
    let levi_value = 0.25 * (a + b);
    let base = distance(&m, &p, &x)?;
    let direct_value = 0.25
        * (direct_rho2(&m, &p, &x, &u, base.rho, &base.w)? + direct_rho2(&m, &p, &x, &ju, base.rho, &base.w)?);
    let bound = 2.0 + base.rho * k;
    Ok(LeviSample {
        z: z.to_vec(),
        v,
        rho: base.rho,
        levi_value,
        direct_value,
        bound,
        margin: bound - levi_value,
        hessian_agreement: ea.max(eb),
    })
}

/// One Levi sample per plan point, paired with a random direction.
pub fn levi_sweep(def: &MetricDef, pole: &[C], plan: &SamplePlan, k: f64) -> Vec<Result<LeviSample>> {
    let n = def.dim();
    let pts = plan.points(n, def.domain());
    let dirs = plan.random_directions(n, pts.len());
    let items: Vec<(Vec<C>, Vec<C>)> = pts
        .into_iter()
        .zip(dirs)
        .map(|(z, v)| (z.iter().zip(pole).map(|(a, b)| a + b).collect(), v))
        .collect();
    exec::map(&items, |(z, v)| levi_rho2(def, pole, z, v, k))
}

pub fn write_levi_csv<W: Write>(samples: &[LeviSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["z", "v", "rho", "levi_value", "direct_value", "bound", "margin", "hessian_agreement"])
        .map_err(io)?;
    let fmt = |c: &[C]| c.iter().map(|a| format!("{}{:+}i", a.re, a.im)).collect::<Vec<_>>().join(";");
    for s in samples {
        w.write_record([
            fmt(&s.z),
            fmt(&s.v),
            s.rho.to_string(),
            s.levi_value.to_string(),
            s.direct_value.to_string(),
            s.bound.to_string(),
            s.margin.to_string(),
            s.hessian_agreement.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Closed-form test functions in `Re z`, `Im z` and `‖z‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "f", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    RealPart { index: usize },
    ImagPart { index: usize },
    NormSqr,
    /// `(Re z^a)² + Im z^b ‖z‖²`.
    Mixed { a: usize, b: usize },
}

impl TestFunction {
    pub fn eval(&self, x: &[Jet]) -> Result<Jet> {
        let n = x.len() / 2;
        let idx = |i: usize| -> Result<usize> {
            if i < n {
                Ok(i)
            } else {
                Err(FinslerError::Config(format!("coordinate index {i} out of range for dimension {n}")))
            }
        };
        Ok(match *self {
            TestFunction::RealPart { index } => x[idx(index)?].clone(),
            TestFunction::ImagPart { index } => x[n + idx(index)?].clone(),
            TestFunction::NormSqr => norm_sqr_jet(&complex_jets(x)),
            TestFunction::Mixed { a, b } => x[idx(a)?].square() + &x[n + idx(b)?] * &norm_sqr_jet(&complex_jets(x)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeviIdentity {
    /// `Lf(X_o, conj X_o) = 4 ∂∂̄f(X_o, conj X_o)` from Wirtinger derivatives.
    pub lhs: f64,
    /// `D²f(X, X) + D²f(JX, JX)` from Cartan Hessians at `∇̂f`.
    pub rhs: f64,
    pub residual: f64,
}

/// Both sides of the Levi identity for `f` at `(z, v)`, with `X = v + conj v`.
pub fn levi_identity_residual(def: &MetricDef, f: &TestFunction, z: &[C], v: &[C]) -> Result<LeviIdentity> {
    let m = def.realified();
    let x = complex_to_real(z);
    let d = x.len();
    let jet = f.eval(&lift_all(&x, 2))?;
    let table = wirtinger(&jet, &standard_pairs(d)?)?;
    let n = d / 2;
    let mut lhs = C::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let (mut ha, mut hb) = (vec![0u8; n], vec![0u8; n]);
            ha[a] = 1;
            hb[b] = 1;
            lhs += table.get(&ha, &hb) * v[a] * v[b].conj();
        }
    }
    let lhs = 4.0 * lhs.re;
    let df: Vec<f64> = (0..d).map(|i| jet.d1(i)).collect();
    let y = legendre_gradient(&m, &x, &df)?;
    let c = cartan(&m, &x, &y)?;
    let u = complex_to_real(v);
    let hess = |w: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut conn = 0.0;
                for k in 0..d {
                    conn += c.christoffel[k][j][i] * df[k];
                }
                s += w[i] * w[j] * (jet.d2(i, j) - conn);
            }
        }
        s
    };
    let rhs = hess(&u) + hess(&apply_j(&u));
    Ok(LeviIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// `ρ = ½ Re⟨(∇̂ρ²)_o, T_o⟩_T` at `z`; the record compares the ratio of the
/// two sides with 1.
pub fn gradient_identity(def: &MetricDef, pole: &[C], z: &[C], tol: f64) -> Result<SampleRecord> {
    let m = def.realified();
    let p = complex_to_real(pole);
    let x = complex_to_real(z);
    let base = distance(&m, &p, &x)?;
    let dr = distance_differential(&m, &p, &x, &base)?;
    let d_rho2: Vec<f64> = dr.iter().map(|a| 2.0 * base.rho * a).collect();
    let grad = real_to_complex(&legendre_gradient(&m, &x, &d_rho2)?)?;
    let t = real_to_complex(&base.tangent)?;
    let vd = vertical_data(def.metric.as_ref(), z, &t)?;
    let n = z.len();
    let mut pair = C::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            pair += vd.levi[(a, b)] * grad[a] * t[b].conj();
        }
    }
    Ok(SampleRecord::identity(x, 0.5 * pair.re / base.rho, 1.0, tol))
}

/// Real pairing `g_T(∇̂ρ², T)` against `2ρ` on every plan point, and the
/// complex pairing against `ρ`.
pub fn gradient_report(def: &MetricDef, pole: &[C], plan: &SamplePlan, tol: f64) -> (VerificationReport, VerificationReport) {
    let m = def.realified();
    let n = def.dim();
    let p = complex_to_real(pole);
    let pts: Vec<Vec<C>> = plan
        .points(n, def.domain())
        .into_iter()
        .map(|z| z.iter().zip(pole).map(|(a, b)| a + b).collect())
        .collect();
    let real = exec::map(&pts, |z| {
        let x = complex_to_real(z);
        radial_gradient_identity(&m, &p, &x, tol).unwrap_or_else(|e| SampleRecord::failed(x, e))
    });
    let complex = exec::map(&pts, |z| {
        gradient_identity(def, pole, z, tol).unwrap_or_else(|e| SampleRecord::failed(complex_to_real(z), e))
    });
    (
        VerificationReport::from_samples("radial_gradient_pairing", tol, real),
        VerificationReport::from_samples("complex_gradient_pairing", tol, complex),
    )
}
