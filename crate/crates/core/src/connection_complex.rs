//! Chern-Finsler connection and curvature of a strongly pseudoconvex metric.
//!
//! Everything is read off a single order-4 jet of `G` in the `4n` real
//! coordinates of `(z, v)`. Each Wirtinger derivative lowers the jet order by
//! one, so a quantity that has consumed `k` derivatives is still known to
//! order `4 - k` and can be differentiated again. `delta_mu` and
//! `delta_nu-bar` are applied to such intermediate jets directly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::geometry::{complex_metric_jet, complex_norm, complex_to_real, ComplexMetric};
use crate::jet::CJet;
use crate::linalg::invert_jets;
use crate::metrics::MetricDef;
use crate::report::{SamplePlan, SampleRecord, VerificationReport};

type C = Complex64;
pub type T2 = Vec<Vec<C>>;
pub type T3 = Vec<Vec<Vec<C>>>;
pub type T4 = Vec<Vec<Vec<Vec<C>>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernFinslerData {
    pub z: Vec<C>,
    pub v: Vec<C>,
    pub g: f64,
    /// `G_a`.
    pub grad: Vec<C>,
    /// `G_{a b-bar}` at `[a][b]`.
    pub levi: T2,
    /// `G^{t-bar a}` at `[t][a]`.
    pub levi_inv: T2,
    /// Nonlinear connection `Gamma^b_{;a}` at `[b][a]`.
    pub nonlinear: T2,
    /// `Gamma^a_{b;m}` at `[a][b][m]`.
    pub horizontal: T3,
    /// `Gamma^a_{b c}` at `[a][b][c]`.
    pub vertical: T3,
    /// Horizontal torsion `Gamma^a_{b;m} - Gamma^a_{m;b}` at `[a][b][m]`.
    pub torsion: T3,
    /// `R^a_{b;m n-bar}` at `[a][b][m][n]`.
    pub r_hh: T4,
    /// `R^a_{b d; n-bar}` at `[a][b][d][n]`.
    pub r_vh: T4,
    /// `R^a_{b c-bar; m}` at `[a][b][c][m]`.
    pub r_hv: T4,
    /// `R^a_{b d c-bar}` at `[a][b][d][c]`.
    pub r_vv: T4,
}

struct Ops {
    n: usize,
}

impl Ops {
    fn dz(&self, f: &CJet, a: usize) -> CJet {
        f.wirtinger(a, self.n + a, false)
    }
    fn dzb(&self, f: &CJet, a: usize) -> CJet {
        f.wirtinger(a, self.n + a, true)
    }
    fn dv(&self, f: &CJet, a: usize) -> CJet {
        f.wirtinger(2 * self.n + a, 3 * self.n + a, false)
    }
    fn dvb(&self, f: &CJet, a: usize) -> CJet {
        f.wirtinger(2 * self.n + a, 3 * self.n + a, true)
    }
}

fn sum(it: impl Iterator<Item = CJet>) -> CJet {
    it.reduce(|a, b| a + b).expect("non-empty sum")
}

fn vals2(t: &[Vec<CJet>]) -> T2 {
    t.iter().map(|r| r.iter().map(|j| j.value()).collect()).collect()
}

fn vals3(t: &[Vec<Vec<CJet>>]) -> T3 {
    t.iter().map(|r| vals2(r)).collect()
}

/// Connection and curvature of `m` at `(z, v)`.
pub fn chern_finsler(m: &dyn ComplexMetric, z: &[C], v: &[C]) -> Result<ChernFinslerData> {
    let n = m.dim();
    let g = complex_metric_jet(m, z, v, 4)?.to_complex();
    let o = Ops { n };
    let r = 0..n;

    let g_bar: Vec<CJet> = r.clone().map(|c| o.dvb(&g, c)).collect();
    let levi: Vec<Vec<CJet>> = r
        .clone()
        .map(|a| r.clone().map(|b| o.dv(&g_bar[b], a)).collect())
        .collect();
    let inv = invert_jets(&levi)?;

    // Gamma^b_{;a} = G^{c-bar b} G_{c-bar;a}
    let gbar_z: Vec<Vec<CJet>> = r
        .clone()
        .map(|c| r.clone().map(|a| o.dz(&g_bar[c], a)).collect())
        .collect();
    let nl: Vec<Vec<CJet>> = r
        .clone()
        .map(|b| {
            r.clone()
                .map(|a| sum(r.clone().map(|c| &inv[c][b] * &gbar_z[c][a])))
                .collect()
        })
        .collect();
    let nl_bar: Vec<Vec<CJet>> = nl.iter().map(|row| row.iter().map(|j| j.conj()).collect()).collect();

    let delta = |f: &CJet, mu: usize| -> CJet {
        let mut acc = o.dz(f, mu);
        for s in 0..n {
            acc = acc - &nl[s][mu] * &o.dv(f, s);
        }
        acc
    };
    let delta_bar = |f: &CJet, nu: usize| -> CJet {
        let mut acc = o.dzb(f, nu);
        for s in 0..n {
            acc = acc - &nl_bar[s][nu] * &o.dvb(f, s);
        }
        acc
    };

    // Gamma^a_{b;m} = G^{t-bar a} delta_m(G_{b t-bar});  Gamma^a_{bc} = G^{t-bar a} dG_{b t-bar}/dv^c
    let mut horiz = vec![vec![Vec::with_capacity(n); n]; n];
    let mut vert = vec![vec![Vec::with_capacity(n); n]; n];
    let dlevi: Vec<Vec<Vec<CJet>>> = r
        .clone()
        .map(|b| {
            r.clone()
                .map(|t| r.clone().map(|m| delta(&levi[b][t], m)).collect())
                .collect()
        })
        .collect();
    let vlevi: Vec<Vec<Vec<CJet>>> = r
        .clone()
        .map(|b| {
            r.clone()
                .map(|t| r.clone().map(|c| o.dv(&levi[b][t], c)).collect())
                .collect()
        })
        .collect();
    for a in r.clone() {
        for b in r.clone() {
            for k in r.clone() {
                horiz[a][b].push(sum(r.clone().map(|t| &inv[t][a] * &dlevi[b][t][k])));
                vert[a][b].push(sum(r.clone().map(|t| &inv[t][a] * &vlevi[b][t][k])));
            }
        }
    }

    let dbar_nl: Vec<Vec<Vec<CJet>>> = r
        .clone()
        .map(|s| {
            r.clone()
                .map(|m| r.clone().map(|nu| delta_bar(&nl[s][m], nu)).collect())
                .collect()
        })
        .collect();
    let vbar_nl: Vec<Vec<Vec<CJet>>> = r
        .clone()
        .map(|s| {
            r.clone()
                .map(|m| r.clone().map(|c| o.dvb(&nl[s][m], c)).collect())
                .collect()
        })
        .collect();

    let zero = C::new(0.0, 0.0);
    let mut r_hh = vec![vec![vec![vec![zero; n]; n]; n]; n];
    let mut r_vh = r_hh.clone();
    let mut r_hv = r_hh.clone();
    let mut r_vv = r_hh.clone();
    for a in r.clone() {
        for b in r.clone() {
            for k in r.clone() {
                for l in r.clone() {
                    // (k, l) = (mu, nu) for r_hh
                    let mut x = -delta_bar(&horiz[a][b][k], l).value();
                    for s in r.clone() {
                        x -= vert[a][b][s].value() * dbar_nl[s][k][l].value();
                    }
                    r_hh[a][b][k][l] = x;
                    // (k, l) = (delta, nu)
                    r_vh[a][b][k][l] = -delta_bar(&vert[a][b][k], l).value();
                    // (k, l) = (gamma, mu)
                    let mut y = -o.dvb(&horiz[a][b][l], k).value();
                    for s in r.clone() {
                        y -= vert[a][b][s].value() * vbar_nl[s][l][k].value();
                    }
                    r_hv[a][b][k][l] = y;
                    // (k, l) = (delta, gamma)
                    r_vv[a][b][k][l] = -o.dvb(&vert[a][b][k], l).value();
                }
            }
        }
    }

    let horizontal = vals3(&horiz);
    let torsion = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..n).map(|k| horizontal[a][b][k] - horizontal[a][k][b]).collect())
                .collect()
        })
        .collect();
    Ok(ChernFinslerData {
        z: z.to_vec(),
        v: v.to_vec(),
        g: g.value().re,
        grad: r.clone().map(|a| o.dv(&g, a).value()).collect(),
        levi: vals2(&levi),
        levi_inv: vals2(&inv),
        nonlinear: vals2(&nl),
        horizontal,
        vertical: vals3(&vert),
        torsion,
        r_hh,
        r_vh,
        r_hv,
        r_vv,
    })
}

impl ChernFinslerData {
    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// `(2 / G^2) G_{a c-bar} R^a_{b;m n-bar} v^b v^m conj(v^n) conj(v^c)`.
    pub fn holomorphic_curvature(&self) -> C {
        let n = self.dim();
        let v = &self.v;
        let mut acc = C::new(0.0, 0.0);
        for a in 0..n {
            // G_{a c-bar} conj(v^c) = G_a
            let ga: C = (0..n).map(|c| self.levi[a][c] * v[c].conj()).sum();
            for b in 0..n {
                for m in 0..n {
                    for l in 0..n {
                        acc += ga * self.r_hh[a][b][m][l] * v[b] * v[m] * v[l].conj();
                    }
                }
            }
        }
        acc * (2.0 / (self.g * self.g))
    }

    /// `max |G^{t-bar a} G_{a c-bar} - delta|`.
    pub fn inverse_residual(&self) -> f64 {
        let n = self.dim();
        let l = DMatrix::from_fn(n, n, |a, b| self.levi[a][b]);
        let i = DMatrix::from_fn(n, n, |a, b| self.levi_inv[a][b]);
        (l * i - DMatrix::identity(n, n)).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `K_G(v)`, computed at `v / |v|` (the value is invariant under `v -> zeta v`).
pub fn holomorphic_sectional_curvature(m: &dyn ComplexMetric, z: &[C], v: &[C]) -> Result<f64> {
    let k = holomorphic_sectional_curvature_complex(m, z, v)?;
    if k.im.abs() > 1e-8 * k.re.abs().max(1.0) {
        return Err(FinslerError::Structural(format!(
            "holomorphic sectional curvature has imaginary part {:e}",
            k.im
        )));
    }
    Ok(k.re)
}

pub fn holomorphic_sectional_curvature_complex(m: &dyn ComplexMetric, z: &[C], v: &[C]) -> Result<C> {
    let norm = complex_norm(v);
    if norm == 0.0 || !norm.is_finite() {
        return Err(FinslerError::Slit { norm, guard: 0.0 });
    }
    let u: Vec<C> = v.iter().map(|c| c / norm).collect();
    Ok(chern_finsler(m, z, &u)?.holomorphic_curvature())
}

pub const SCALE_INVARIANCE_TOL: f64 = 1e-8;

/// Compares `K_G(v)` and `K_G(zeta v)`.
pub fn scale_invariance_check(m: &dyn ComplexMetric, z: &[C], v: &[C], zeta: C) -> VerificationReport {
    let mut point = complex_to_real(z);
    point.extend(complex_to_real(v));
    let zv: Vec<C> = v.iter().map(|c| c * zeta).collect();
    let rec = match (
        holomorphic_sectional_curvature(m, z, v),
        holomorphic_sectional_curvature(m, z, &zv),
    ) {
        (Ok(a), Ok(b)) => SampleRecord::identity(point, a, b, SCALE_INVARIANCE_TOL),
        (Err(e), _) | (_, Err(e)) => SampleRecord::failed(point, e),
    };
    VerificationReport::from_samples("scale_invariance", SCALE_INVARIANCE_TOL, vec![rec])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub z: Vec<C>,
    pub v: Vec<C>,
    pub k: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// `(z, v)` pairs for a curvature sweep: each point against the direction fan.
pub fn sweep_samples(def: &MetricDef, plan: &SamplePlan) -> Vec<(Vec<C>, Vec<C>)> {
    let n = def.dim();
    let dirs = plan.fan(n);
    plan.points(n, def.domain())
        .into_iter()
        .flat_map(|z| dirs.iter().map(move |v| (z.clone(), v.clone())))
        .collect()
}

pub fn curvature_at(def: &MetricDef, sample: &(Vec<C>, Vec<C>)) -> CurvatureSample {
    let (z, v) = sample;
    match holomorphic_sectional_curvature(def.metric.as_ref(), z, v) {
        Ok(k) => CurvatureSample {
            z: z.clone(),
            v: v.clone(),
            k,
            error: None,
        },
        Err(e) => CurvatureSample {
            z: z.clone(),
            v: v.clone(),
            k: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

/// `K_G` over the sample grid of `plan`, in sample order.
pub fn curvature_sweep(def: &MetricDef, plan: &SamplePlan) -> Vec<CurvatureSample> {
    let samples = sweep_samples(def, plan);
    crate::exec::map(&samples, |s| curvature_at(def, s))
}
