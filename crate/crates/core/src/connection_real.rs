//! Cartan connection, geodesic spray and flag curvature of real Finsler metrics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::exec;
use crate::geodesic::integrate_geodesic;
use crate::geometry::{real_metric_jet, real_metric_value, RealMetric};
use crate::report::{sphere_lattice, SamplePlan};
use crate::jet::Jet;
use crate::linalg::{invert_jets, JetMatrix};

/// Relative Cauchy-Schwarz gap below which a flag counts as degenerate.
pub const FLAG_GAP: f64 = 1e-12;

type T3 = Vec<Vec<Vec<f64>>>;

/// Jets of the spray and metric tensor built from a jet of `G` of order `order`.
struct SprayJets {
    g: JetMatrix<f64>,
    spray: Vec<Jet>,
}

fn spray_jets(m: &dyn RealMetric, x: &[f64], u: &[f64], order: usize) -> Result<SprayJets> {
    let d = m.dim();
    let gj = real_metric_jet(m, x, u, order)?;
    let low = order - 2;
    let g: JetMatrix<f64> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| gj.derivative(d + i).derivative(d + j).scale(0.5))
                .collect()
        })
        .collect();
    let ginv = invert_jets(&g)?;
    let uj: Vec<Jet> = (0..d).map(|k| Jet::variable(2 * d, low, d + k, u[k])).collect();
    let b: Vec<Jet> = (0..d)
        .map(|l| {
            let gu = gj.derivative(d + l);
            let mut acc = -gj.derivative(l).truncate(low);
            for (k, uk) in uj.iter().enumerate() {
                acc = acc + &gu.derivative(k) * uk;
            }
            acc
        })
        .collect();
    let spray = (0..d)
        .map(|i| {
            let mut acc = Jet::constant(2 * d, low, 0.0);
            for (l, bl) in b.iter().enumerate() {
                acc = acc + &ginv[i][l] * bl;
            }
            acc.scale(0.25)
        })
        .collect();
    Ok(SprayJets { g, spray })
}

/// Spray coefficients `G^i(x, u)`; geodesics solve `x'' + 2 G^i(x, x') = 0`.
pub fn spray(m: &dyn RealMetric, x: &[f64], u: &[f64]) -> Result<DVector<f64>> {
    let s = spray_jets(m, x, u, 2)?;
    Ok(DVector::from_iterator(m.dim(), s.spray.iter().map(|j| j.value())))
}

/// First-order data of the spray used by the variational equations.
#[derive(Debug, Clone)]
pub struct SprayDerivatives {
    pub spray: DVector<f64>,
    /// `dx[(i, j)] = dG^i / dx^j`.
    pub dx: DMatrix<f64>,
    /// `du[(i, j)] = dG^i / du^j`, the nonlinear connection.
    pub du: DMatrix<f64>,
}

pub fn spray_derivatives(m: &dyn RealMetric, x: &[f64], u: &[f64]) -> Result<SprayDerivatives> {
    let d = m.dim();
    let s = spray_jets(m, x, u, 3)?;
    Ok(SprayDerivatives {
        spray: DVector::from_iterator(d, s.spray.iter().map(|j| j.value())),
        dx: DMatrix::from_fn(d, d, |i, j| s.spray[i].d1(j)),
        du: DMatrix::from_fn(d, d, |i, j| s.spray[i].d1(d + j)),
    })
}

/// Cartan connection data at `(x, u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanData {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub spray: DVector<f64>,
    /// `nonlinear[(j, i)] = Γ^j_{;i} = dG^j/du^i`.
    pub nonlinear: DMatrix<f64>,
    /// `christoffel[j][i][k] = Γ^j_{i;k}`.
    pub christoffel: T3,
    /// `vertical[j][i][k] = Γ^j_{ik} = g^{jl} C_{ilk}`.
    pub vertical: T3,
    /// `cartan[i][j][k] = C_ijk = ¼ d³G/du^i du^j du^k`.
    pub cartan: T3,
    /// Jacobi operator `R_u`: `riemann[(i, k)] = R^i_k(x, u)`.
    pub riemann: DMatrix<f64>,
}

pub fn cartan(m: &dyn RealMetric, x: &[f64], u: &[f64]) -> Result<CartanData> {
    let d = m.dim();
    let s = spray_jets(m, x, u, 4)?;
    let g = DMatrix::from_fn(d, d, |i, j| s.g[i][j].value());
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or(FinslerError::Degenerate { condition: f64::INFINITY })?;
    let sp = &s.spray;
    let spray = DVector::from_iterator(d, sp.iter().map(|j| j.value()));
    let nonlinear = DMatrix::from_fn(d, d, |j, i| sp[j].d1(d + i));

    // δ_k g_il = ∂_x^k g_il − N^m_k ∂_u^m g_il
    let dg = |i: usize, l: usize, k: usize| -> f64 {
        let mut v = s.g[i][l].d1(k);
        for mm in 0..d {
            v -= nonlinear[(mm, k)] * s.g[i][l].d1(d + mm);
        }
        v
    };
    let mut christoffel = vec![vec![vec![0.0; d]; d]; d];
    let mut cartan = vec![vec![vec![0.0; d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                cartan[i][j][k] = 0.5 * s.g[i][j].d1(d + k);
            }
        }
    }
    let mut vertical = vec![vec![vec![0.0; d]; d]; d];
    for j in 0..d {
        for i in 0..d {
            for k in 0..d {
                let mut c = 0.0;
                let mut v = 0.0;
                for l in 0..d {
                    c += g_inv[(j, l)] * (dg(i, l, k) + dg(l, k, i) - dg(i, k, l));
                    v += g_inv[(j, l)] * cartan[i][l][k];
                }
                christoffel[j][i][k] = 0.5 * c;
                vertical[j][i][k] = v;
            }
        }
    }

    // R^i_k = 2 ∂_k G^i − u^j ∂_j ∂̇_k G^i + 2 G^j ∂̇_j ∂̇_k G^i − ∂̇_j G^i ∂̇_k G^j
    let riemann = DMatrix::from_fn(d, d, |i, k| {
        let mut r = 2.0 * sp[i].d1(k);
        for j in 0..d {
            r -= u[j] * sp[i].d2(j, d + k);
            r += 2.0 * spray[j] * sp[i].d2(d + j, d + k);
            r -= nonlinear[(i, j)] * nonlinear[(j, k)];
        }
        r
    });

    Ok(CartanData {
        x: x.to_vec(),
        u: u.to_vec(),
        g,
        g_inv,
        spray,
        nonlinear,
        christoffel,
        vertical,
        cartan,
        riemann,
    })
}

impl CartanData {
    /// `g_u(a, b)`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let d = self.u.len();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += self.g[(i, j)] * a[i] * b[j];
            }
        }
        s
    }

    /// `g_u(R_u a, b)`, the curvature term of the index form.
    pub fn curvature_pairing(&self, a: &[f64], b: &[f64]) -> f64 {
        let ra = &self.riemann * DVector::from_column_slice(a);
        self.inner(ra.as_slice(), b)
    }

    /// `max_{i,j} |C_ijk u^k|`, zero by homogeneity.
    pub fn cartan_annihilation(&self) -> f64 {
        let d = self.u.len();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let s: f64 = (0..d).map(|k| self.cartan[i][j][k] * self.u[k]).sum();
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    /// Flag curvature of the flag with pole `u` and transverse edge `x_edge`.
    pub fn flag_curvature(&self, x_edge: &[f64]) -> Result<f64> {
        let uu = self.inner(&self.u, &self.u);
        let xx = self.inner(x_edge, x_edge);
        let ux = self.inner(&self.u, x_edge);
        let den = uu * xx - ux * ux;
        let gap = den / (uu * xx);
        if !(gap > FLAG_GAP) {
            return Err(FinslerError::DegenerateFlag { gap });
        }
        Ok(self.curvature_pairing(x_edge, x_edge) / den)
    }
}

/// Flag curvature `K(u, X)` at `x`.
pub fn flag_curvature(m: &dyn RealMetric, x: &[f64], u: &[f64], edge: &[f64]) -> Result<f64> {
    cartan(m, x, u)?.flag_curvature(edge)
}

/// Extremes of the flag curvature over radial flags `(T, X)` along a fan of
/// unit-speed geodesics from a pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFlagBounds {
    pub k_inf: f64,
    pub k_sup: f64,
    /// `K >= 0` with `k_inf = -K²` (zero when `k_inf >= 0`).
    pub k: f64,
    pub flags: usize,
    /// Geodesics of the fan that hit the domain boundary early.
    pub truncated: usize,
}

/// Samples geodesics from `pole` in `plan.directions` directions at arc
/// lengths `k * radius_max / points`, `k = 1..=points`, and `2 dim` transverse
/// edges per sample.
pub fn radial_flag_bounds(m: &dyn RealMetric, pole: &[f64], plan: &SamplePlan) -> Result<RadialFlagBounds> {
    let d = m.dim();
    let dirs = sphere_lattice(d, plan.directions.max(1));
    let edges = sphere_lattice(d, 2 * d);
    let per_dir = exec::map(&dirs, |dir| -> Result<(f64, f64, usize, bool)> {
        let s = real_metric_value(m, pole, dir)?.sqrt();
        let t0: Vec<f64> = dir.iter().map(|a| a / s).collect();
        let path = integrate_geodesic(m, pole, &t0, plan.radius_max, plan.points.max(1))?;
        let (mut lo, mut hi, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0);
        for smp in path.samples.iter().skip(1) {
            if !smp.g.is_finite() {
                continue;
            }
            let c = cartan(m, &smp.x, &smp.u)?;
            for e in &edges {
                match c.flag_curvature(e) {
                    Ok(k) => {
                        lo = lo.min(k);
                        hi = hi.max(k);
                        n += 1;
                    }
                    Err(FinslerError::DegenerateFlag { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok((lo, hi, n, path.truncated))
    });
    let mut out = RadialFlagBounds {
        k_inf: f64::INFINITY,
        k_sup: f64::NEG_INFINITY,
        k: 0.0,
        flags: 0,
        truncated: 0,
    };
    for r in per_dir {
        let (lo, hi, n, tr) = r?;
        out.k_inf = out.k_inf.min(lo);
        out.k_sup = out.k_sup.max(hi);
        out.flags += n;
        out.truncated += tr as usize;
    }
    if out.flags == 0 {
        return Err(FinslerError::Structural("no radial flags sampled".into()));
    }
    out.k = (-out.k_inf).max(0.0).sqrt();
    Ok(out)
}
