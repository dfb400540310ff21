//! Geodesics, the exponential map, shooting, Jacobi fields and the index form.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::connection_real::{cartan, spray, spray_derivatives, CartanData};
use crate::error::{FinslerError, Result};
use crate::geometry::{euclidean_norm, real_metric_jet, real_metric_value, RealMetric, SLIT_EPS};
use crate::linalg::solve;
use crate::ode::{integrate, OdeOptions};
use crate::report::sphere_lattice;

mod shooting;
pub use shooting::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// `G(x(t); u(t))`.
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// Unit speed, `G(u) = 1`.
    Normal,
    Affine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub samples: Vec<PathSample>,
    pub arc_length: f64,
    pub kind: PathKind,
    pub steps: usize,
    pub rejected: usize,
    pub max_error: f64,
    /// Largest `|G(t) - G(0)| / G(0)` over the samples.
    pub energy_drift: f64,
    /// The path reached the boundary of the metric's domain before `r`.
    pub truncated: bool,
}

impl GeodesicPath {
    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("paths have at least one sample")
    }

    pub fn length_param(&self) -> f64 {
        self.end().t
    }

    /// CSV rows `t, x..., u..., G`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let d = self.samples.first().map_or(0, |s| s.x.len());
        let mut header = vec!["t".to_string()];
        header.extend((0..d).map(|i| format!("x{i}")));
        header.extend((0..d).map(|i| format!("u{i}")));
        header.push("G".into());
        w.write_record(&header).map_err(io)?;
        for s in &self.samples {
            let mut row = vec![s.t.to_string()];
            row.extend(s.x.iter().map(f64::to_string));
            row.extend(s.u.iter().map(f64::to_string));
            row.push(s.g.to_string());
            w.write_record(&row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn io(e: csv::Error) -> FinslerError {
    FinslerError::Io(e.to_string())
}

/// A vector field along a path: values and coordinate derivatives `d/dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSamples {
    pub t: Vec<f64>,
    pub value: Vec<Vec<f64>>,
    pub deriv: Vec<Vec<f64>>,
}

impl FieldSamples {
    /// Pointwise linear combination `Σ c_k F_k`.
    pub fn combine(fields: &[FieldSamples], c: &[f64]) -> FieldSamples {
        let f0 = &fields[0];
        let d = f0.value[0].len();
        let lin = |get: &dyn Fn(&FieldSamples, usize) -> Vec<f64>, s: usize| {
            let mut out = vec![0.0; d];
            for (f, ck) in fields.iter().zip(c) {
                for (o, v) in out.iter_mut().zip(get(f, s)) {
                    *o += ck * v;
                }
            }
            out
        };
        FieldSamples {
            t: f0.t.clone(),
            value: (0..f0.t.len()).map(|s| lin(&|f, s| f.value[s].clone(), s)).collect(),
            deriv: (0..f0.t.len()).map(|s| lin(&|f, s| f.deriv[s].clone(), s)).collect(),
        }
    }

    /// Field given in closed form as `t -> (value, d/dt value)`.
    pub fn from_fn(path: &GeodesicPath, f: impl Fn(f64) -> (Vec<f64>, Vec<f64>)) -> FieldSamples {
        let (value, deriv) = path.samples.iter().map(|s| f(s.t)).unzip();
        FieldSamples {
            t: path.samples.iter().map(|s| s.t).collect(),
            value,
            deriv,
        }
    }
}

/// Geodesic together with the solutions of its linearised equation.
#[derive(Debug, Clone)]
pub struct Flow {
    pub path: GeodesicPath,
    pub fields: Vec<FieldSamples>,
}

fn times(r: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|k| r * k as f64 / intervals as f64).collect()
}

/// Integrates the geodesic from `(x0, u0)` over `[0, r]`, sampled at
/// `intervals + 1` equispaced times, carrying one Jacobi field per seed
/// `(J(0), J'(0))`.
pub fn flow(
    m: &dyn RealMetric,
    x0: &[f64],
    u0: &[f64],
    r: f64,
    intervals: usize,
    seeds: &[(Vec<f64>, Vec<f64>)],
) -> Result<Flow> {
    let d = m.dim();
    if x0.len() != d || u0.len() != d {
        return Err(FinslerError::Structural(format!("expected real dimension {d}")));
    }
    if !(r > 0.0) || intervals == 0 {
        return Err(FinslerError::Config(format!("geodesic length must be positive, got {r}")));
    }
    let nf = seeds.len();
    let mut y0 = x0.to_vec();
    y0.extend_from_slice(u0);
    for (j, jd) in seeds {
        y0.extend_from_slice(j);
        y0.extend_from_slice(jd);
    }
    let rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (x, u) = (&y[..d], &y[d..2 * d]);
        if !m.in_domain(x) {
            return Err(FinslerError::Domain(format!("{x:?}")));
        }
        let mut out = Vec::with_capacity(y.len());
        out.extend_from_slice(u);
        if nf == 0 {
            out.extend(spray(m, x, u)?.iter().map(|g| -2.0 * g));
            return Ok(out);
        }
        let sd = spray_derivatives(m, x, u)?;
        out.extend(sd.spray.iter().map(|g| -2.0 * g));
        for k in 0..nf {
            let base = 2 * d + 2 * d * k;
            let j = DVector::from_column_slice(&y[base..base + d]);
            let jd = DVector::from_column_slice(&y[base + d..base + 2 * d]);
            out.extend_from_slice(jd.as_slice());
            let acc = (&sd.dx * j + &sd.du * jd) * -2.0;
            out.extend_from_slice(acc.as_slice());
        }
        Ok(out)
    };
    let ts = times(r, intervals);
    let sol = integrate(rhs, 0.0, &y0, &ts, &OdeOptions::default(), |_, y| !m.in_domain(&y[..d]))?;
    let g0 = real_metric_value(m, x0, u0)?;
    let mut samples = Vec::with_capacity(sol.ts.len());
    let mut drift = 0.0f64;
    for (t, y) in sol.ts.iter().zip(&sol.ys) {
        let g = if m.in_domain(&y[..d]) {
            real_metric_value(m, &y[..d], &y[d..2 * d])?
        } else {
            f64::NAN
        };
        if g.is_finite() {
            drift = drift.max((g - g0).abs() / g0);
        }
        samples.push(PathSample {
            t: *t,
            x: y[..d].to_vec(),
            u: y[d..2 * d].to_vec(),
            g,
        });
    }
    let fields = (0..nf)
        .map(|k| {
            let base = 2 * d + 2 * d * k;
            FieldSamples {
                t: sol.ts.clone(),
                value: sol.ys.iter().map(|y| y[base..base + d].to_vec()).collect(),
                deriv: sol.ys.iter().map(|y| y[base + d..base + 2 * d].to_vec()).collect(),
            }
        })
        .collect();
    let end_t = *sol.ts.last().unwrap_or(&0.0);
    Ok(Flow {
        path: GeodesicPath {
            arc_length: end_t * g0.sqrt(),
            kind: if (g0 - 1.0).abs() < 1e-12 { PathKind::Normal } else { PathKind::Affine },
            steps: sol.steps,
            rejected: sol.rejected,
            max_error: sol.max_error,
            energy_drift: drift,
            truncated: sol.truncated,
            samples,
        },
        fields,
    })
}

pub fn integrate_geodesic(
    m: &dyn RealMetric,
    x0: &[f64],
    u0: &[f64],
    r: f64,
    intervals: usize,
) -> Result<GeodesicPath> {
    Ok(flow(m, x0, u0, r, intervals, &[])?.path)
}

/// `exp_p(v)`; `exp_p(0) = p`.
pub fn exp_map(m: &dyn RealMetric, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = euclidean_norm(v);
    if n < SLIT_EPS {
        return Ok(p.to_vec());
    }
    let path = integrate_geodesic(m, p, v, 1.0, 1)?;
    if path.truncated {
        return Err(FinslerError::Domain(format!("geodesic from {p:?} along {v:?} leaves the domain")));
    }
    Ok(path.end().x.clone())
}

/// Jacobi field along `path` with `J(0) = j0` and `J'(0) = j0_dot`.
pub fn jacobi_field(
    m: &dyn RealMetric,
    path: &GeodesicPath,
    j0: &[f64],
    j0_dot: &[f64],
) -> Result<FieldSamples> {
    let s0 = &path.samples[0];
    let intervals = path.samples.len() - 1;
    let f = flow(m, &s0.x, &s0.u, path.length_param(), intervals, &[(j0.to_vec(), j0_dot.to_vec())])?;
    Ok(f.fields.into_iter().next().expect("one seed"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexFormResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Connection data at each path sample, reference vector `T = x'`.
pub fn frames(m: &dyn RealMetric, path: &GeodesicPath) -> Result<Vec<CartanData>> {
    path.samples.iter().map(|s| cartan(m, &s.x, &s.u)).collect()
}

/// Covariant derivative `D_T ξ = ξ' + N(x, T) ξ` projected `g_T`-orthogonally
/// to `T`.
fn projected_derivative(c: &CartanData, value: &[f64], deriv: &[f64]) -> Vec<f64> {
    let n = &c.nonlinear * DVector::from_column_slice(value);
    let dv: Vec<f64> = deriv.iter().zip(n.iter()).map(|(a, b)| a + b).collect();
    let k = c.inner(&dv, &c.u) / c.inner(&c.u, &c.u);
    dv.iter().zip(&c.u).map(|(a, t)| a - k * t).collect()
}

fn project(c: &CartanData, v: &[f64]) -> Vec<f64> {
    let k = c.inner(v, &c.u) / c.inner(&c.u, &c.u);
    v.iter().zip(&c.u).map(|(a, t)| a - k * t).collect()
}

fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    let mut s = f[0] + f[n];
    for (k, v) in f.iter().enumerate().take(n).skip(1) {
        s += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// `I(ξ, η) = ∫ g_T(Dξ, Dη) − g_T(R_T ξ, η) dt`, Simpson's rule on the path
/// samples with one Richardson step against the half-resolution rule.
pub fn index_form_with(
    frames: &[CartanData],
    path: &GeodesicPath,
    xi: &FieldSamples,
    eta: &FieldSamples,
) -> Result<IndexFormResult> {
    let n = path.samples.len() - 1;
    if !n.is_multiple_of(4) || xi.t.len() != n + 1 || eta.t.len() != n + 1 {
        return Err(FinslerError::Config(format!(
            "index form needs a multiple of 4 path intervals with matching fields, got {n}"
        )));
    }
    let integrand: Vec<f64> = (0..=n)
        .map(|s| {
            let c = &frames[s];
            let dx = projected_derivative(c, &xi.value[s], &xi.deriv[s]);
            let de = projected_derivative(c, &eta.value[s], &eta.deriv[s]);
            c.inner(&dx, &de) - c.curvature_pairing(&project(c, &xi.value[s]), &project(c, &eta.value[s]))
        })
        .collect();
    let h = path.length_param() / n as f64;
    let fine = simpson(&integrand, h);
    let coarse_pts: Vec<f64> = integrand.iter().step_by(2).copied().collect();
    let coarse = simpson(&coarse_pts, 2.0 * h);
    Ok(IndexFormResult {
        value: (16.0 * fine - coarse) / 15.0,
        error_estimate: (fine - coarse).abs() / 15.0,
    })
}

pub fn index_form(
    m: &dyn RealMetric,
    path: &GeodesicPath,
    xi: &FieldSamples,
    eta: &FieldSamples,
) -> Result<IndexFormResult> {
    index_form_with(&frames(m, path)?, path, xi, eta)
}
