//! Pullback densities on holomorphic disks and Schwarz-lemma certificates.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connection_complex::{chern_finsler, curvature_sweep};
use crate::error::{FinslerError, Result};
use crate::exec;
use crate::geodesic::io;
use crate::geometry::{complex_metric_value, ComplexMetric};
use crate::jet::{lift_all, CJet, Jet};
use crate::metrics::{instantiate, FamilySpec, HoloMap, MapSpec, MetricDef};
use crate::report::{SamplePlan, SampleRecord};

type C = Complex64;

/// `K = -(2/g) ∂²log g/∂ζ∂ζ̄` from a jet of `g` in `(Re ζ, Im ζ)`.
pub fn gaussian_curvature_jet(g: &Jet) -> Result<f64> {
    if g.nvars() != 2 || g.order() < 2 {
        return Err(FinslerError::Structural("density jet needs 2 variables and order 2".into()));
    }
    let g0 = g.value();
    if !(g0 > 0.0) {
        return Err(FinslerError::Domain(format!("density must be positive, got {g0}")));
    }
    let l = g.truncate(2).ln();
    // ∂∂̄ = Δ/4
    Ok(-(2.0 / g0) * 0.25 * (l.d2(0, 0) + l.d2(1, 1)))
}

/// Gaussian curvature at `zeta` of the density `g` given on complex jets.
pub fn gaussian_curvature(density: impl Fn(&CJet) -> Result<Jet>, zeta: C) -> Result<f64> {
    gaussian_curvature_jet(&density(&disk_variable(zeta, 2))?)
}

/// `ζ` as a complex jet in `(Re ζ, Im ζ)`.
pub fn disk_variable(zeta: C, order: usize) -> CJet {
    let j = lift_all(&[zeta.re, zeta.im], order);
    j[0].to_complex() + j[1].to_complex().scale(C::new(0.0, 1.0))
}

/// Holomorphic disk `ζ -> z0 + ζ v + ζ² w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeDisk {
    pub z0: Vec<C>,
    pub v: Vec<C>,
    pub w: Vec<C>,
}

impl ProbeDisk {
    pub fn eval(&self, zeta: &CJet) -> Result<Vec<CJet>> {
        let z2 = zeta * zeta;
        Ok((0..self.z0.len())
            .map(|a| zeta.scale(self.v[a]) + z2.scale(self.w[a]) + self.z0[a])
            .collect())
    }

    /// The disk through `z0` tangent to `v` that realises `K_G(v)`:
    /// `w = -½ Γ^α_{;μ} v^μ`.
    pub fn extremal(m: &dyn ComplexMetric, z0: &[C], v: &[C]) -> Result<ProbeDisk> {
        let cf = chern_finsler(m, z0, v)?;
        let n = z0.len();
        let w = (0..n)
            .map(|b| -0.5 * (0..n).map(|a| cf.nonlinear[b][a] * v[a]).sum::<C>())
            .collect();
        Ok(ProbeDisk {
            z0: z0.to_vec(),
            v: v.to_vec(),
            w,
        })
    }
}

fn split(w: &[CJet]) -> Vec<Jet> {
    w.iter().map(CJet::re).chain(w.iter().map(CJet::im)).collect()
}

/// Jet of `G(ψ(ζ); ψ'(ζ))` to order 2 for a holomorphic curve `ψ`.
pub fn curve_density(m: &dyn ComplexMetric, curve: &dyn Fn(&CJet) -> Result<Vec<CJet>>, zeta: C) -> Result<Jet> {
    let psi = curve(&disk_variable(zeta, 3))?;
    let at: Vec<C> = psi.iter().map(|j| j.value()).collect();
    if !m.in_domain(&at) {
        return Err(FinslerError::Domain(format!("{at:?}")));
    }
    // ψ' = ∂ψ/∂(Re ζ) for holomorphic ψ
    let dpsi: Vec<CJet> = psi.iter().map(|j| j.derivative(0)).collect();
    let psi: Vec<CJet> = psi.iter().map(|j| j.truncate(2)).collect();
    m.eval(&split(&psi), &split(&dpsi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityStatus {
    Regular,
    /// `(f∘φ)' = 0` while `φ' ≠ 0`: the ratio is 0.
    SigmaZero,
    /// Both derivatives vanish; the ratio is a one-sided limit.
    Removable,
    OutOfRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackDensity {
    pub zeta: C,
    pub lambda2: f64,
    pub sigma2: f64,
    pub ratio: f64,
    pub status: DensityStatus,
}

const ZERO_DENSITY: f64 = 1e-24;

fn densities(
    dom: &dyn ComplexMetric,
    tgt: &dyn ComplexMetric,
    f: &HoloMap,
    probe: &dyn Fn(&CJet) -> Result<Vec<CJet>>,
    zeta: C,
) -> Result<(f64, f64)> {
    let l = curve_density(dom, probe, zeta)?.value();
    let composed = |z: &CJet| f.eval_jets(&probe(z)?);
    let s = curve_density(tgt, &composed, zeta)?.value();
    Ok((l, s))
}

/// `λ² = G(φ; φ')`, `σ² = H(f∘φ; (f∘φ)')` and their ratio on `grid`.
pub fn pullback(
    f: &HoloMap,
    dom: &MetricDef,
    tgt: &MetricDef,
    probe: &dyn Fn(&CJet) -> Result<Vec<CJet>>,
    grid: &[C],
) -> Vec<PullbackDensity> {
    let (dm, tm) = (dom.metric.as_ref(), tgt.metric.as_ref());
    grid.iter()
        .map(|&zeta| match densities(dm, tm, f, probe, zeta) {
            Ok((l, s)) if l > ZERO_DENSITY => PullbackDensity {
                zeta,
                lambda2: l,
                sigma2: s,
                ratio: if s > ZERO_DENSITY { s / l } else { 0.0 },
                status: if s > ZERO_DENSITY { DensityStatus::Regular } else { DensityStatus::SigmaZero },
            },
            Ok((l, s)) => {
                // removable singularity: extrapolate from one side
                let r = |d: f64| densities(dm, tm, f, probe, zeta + d).map(|(l, s)| s / l);
                let ratio = match (r(1e-4), r(5e-5)) {
                    (Ok(a), Ok(b)) => 2.0 * b - a,
                    _ => f64::NAN,
                };
                PullbackDensity {
                    zeta,
                    lambda2: l,
                    sigma2: s,
                    ratio,
                    status: DensityStatus::Removable,
                }
            }
            Err(_) => PullbackDensity {
                zeta,
                lambda2: f64::NAN,
                sigma2: f64::NAN,
                ratio: f64::NAN,
                status: DensityStatus::OutOfRange,
            },
        })
        .collect()
}

pub fn write_density_csv<W: Write>(rows: &[PullbackDensity], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["zeta_re", "zeta_im", "lambda2", "sigma2", "ratio", "status"]).map_err(io)?;
    for r in rows {
        let status = serde_json::to_value(r.status).map_err(|e| FinslerError::Io(e.to_string()))?;
        w.write_record([
            r.zeta.re.to_string(),
            r.zeta.im.to_string(),
            r.lambda2.to_string(),
            r.sigma2.to_string(),
            r.ratio.to_string(),
            status.as_str().unwrap_or_default().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Polar grid `r_i e^{iθ_j}` inside the unit disk.
pub fn disk_grid(radii: usize, angles: usize, r_max: f64) -> Vec<C> {
    (1..=radii)
        .flat_map(|i| {
            let r = r_max * i as f64 / radii as f64;
            (0..angles).map(move |j| C::from_polar(r, std::f64::consts::TAU * j as f64 / angles as f64))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Domain,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBound {
    pub value: f64,
    /// Sampled extreme before clamping.
    pub raw: f64,
    pub clamped: bool,
    pub samples: usize,
}

/// `K₁ = min(inf K_G, 0)` for a domain, `K₂ = sup K_G < 0` for a target.
pub fn curvature_bounds(def: &MetricDef, role: Role, plan: &SamplePlan) -> Result<CurvatureBound> {
    let sweep = curvature_sweep(def, plan);
    if let Some(bad) = sweep.iter().find(|s| s.error.is_some()) {
        return Err(FinslerError::Structural(format!(
            "curvature failed at {:?}: {}",
            bad.z,
            bad.error.as_deref().unwrap_or_default()
        )));
    }
    let ks = sweep.iter().map(|s| s.k);
    match role {
        Role::Domain => {
            let raw = ks.fold(f64::INFINITY, f64::min);
            Ok(CurvatureBound {
                value: raw.min(0.0),
                raw,
                clamped: raw > 0.0,
                samples: sweep.len(),
            })
        }
        Role::Target => {
            let raw = ks.fold(f64::NEG_INFINITY, f64::max);
            if raw >= 0.0 {
                return Err(FinslerError::Hypothesis(format!(
                    "target curvature must be bounded above by a negative constant, sampled sup {raw}"
                )));
            }
            Ok(CurvatureBound {
                value: raw,
                raw,
                clamped: false,
                samples: sweep.len(),
            })
        }
    }
}

pub const SCHWARZ_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzCertificate {
    pub map: MapSpec,
    pub domain: FamilySpec,
    pub target: FamilySpec,
    pub plan: SamplePlan,
    pub tolerance: f64,
    pub k1: Option<CurvatureBound>,
    pub k2: Option<CurvatureBound>,
    pub hypotheses_met: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub bound: f64,
    pub max_ratio: f64,
    pub samples: Vec<SampleRecord>,
    pub passed: bool,
}

/// Ratio `H(f(z); f_*v) / G(z; v)` over the plan's points and direction fan,
/// compared with `K₁/K₂`.
pub fn certify_schwarz(map: &MapSpec, domain: &FamilySpec, target: &FamilySpec, plan: &SamplePlan, tolerance: f64) -> Result<SchwarzCertificate> {
    let f = HoloMap::new(map)?;
    let dom = instantiate(domain)?;
    let tgt = instantiate(target)?;
    if f.source_dim() != dom.dim() || f.target_dim() != tgt.dim() {
        return Err(FinslerError::Config(format!(
            "map C^{} -> C^{} does not match metrics of dimension {} and {}",
            f.source_dim(),
            f.target_dim(),
            dom.dim(),
            tgt.dim()
        )));
    }
    let mut notes = Vec::new();
    let k1 = curvature_bounds(&dom, Role::Domain, plan)
        .map_err(|e| notes.push(format!("domain curvature: {e}")))
        .ok();
    let k2 = curvature_bounds(&tgt, Role::Target, plan)
        .map_err(|e| notes.push(format!("target curvature: {e}")))
        .ok();
    if let Some(k) = &k1 {
        if k.clamped {
            notes.push(format!("sampled domain curvature inf {} clamped to 0", k.raw));
        }
    }
    let hypotheses_met = k1.is_some() && k2.is_some();
    if !hypotheses_met {
        notes.push("hypotheses unmet".into());
    }
    let bound = match (&k1, &k2) {
        // adding zero turns a -0 ratio into 0
        (Some(a), Some(b)) => a.value / b.value + 0.0,
        _ => f64::NAN,
    };
    let n = dom.dim();
    let dirs = plan.fan(n);
    let items: Vec<(Vec<C>, Vec<C>)> = plan
        .points(n, dom.domain())
        .into_iter()
        .flat_map(|z| dirs.iter().map(move |v| (z.clone(), v.clone())))
        .collect();
    let samples = exec::map(&items, |(z, v)| {
        let mut point: Vec<f64> = z.iter().flat_map(|c| [c.re, c.im]).collect();
        point.extend(v.iter().flat_map(|c| [c.re, c.im]));
        let ratio = || -> Result<f64> {
            let g = complex_metric_value(dom.metric.as_ref(), z, v)?;
            let fz = f.eval(z)?;
            let jac = f.jacobian(z)?;
            let fv: Vec<C> = (0..f.target_dim()).map(|i| (0..n).map(|k| jac[(i, k)] * v[k]).sum()).collect();
            if fv.iter().all(|c| c.norm() == 0.0) {
                return Ok(0.0);
            }
            Ok(complex_metric_value(tgt.metric.as_ref(), &fz, &fv)? / g)
        };
        match ratio() {
            Ok(r) => SampleRecord::upper(point, r, bound, tolerance),
            Err(e) => SampleRecord::failed(point, e),
        }
    });
    let max_ratio = samples.iter().map(|s| s.lhs).fold(f64::NEG_INFINITY, f64::max);
    let passed = hypotheses_met && samples.iter().all(|s| s.passed);
    Ok(SchwarzCertificate {
        map: map.clone(),
        domain: domain.clone(),
        target: target.clone(),
        plan: plan.clone(),
        tolerance,
        k1,
        k2,
        hypotheses_met,
        notes,
        bound,
        max_ratio,
        samples,
        passed,
    })
}

/// `∂∂̄ log σ² >= -(K₂/2) σ²` at `zeta` for the pullback of `tgt` along `curve`.
pub fn curvature_comparison(
    tgt: &dyn ComplexMetric,
    curve: &dyn Fn(&CJet) -> Result<Vec<CJet>>,
    zeta: C,
    k2: f64,
    tol: f64,
) -> Result<SampleRecord> {
    let s = curve_density(tgt, curve, zeta)?;
    let l = s.ln();
    let ddbar = 0.25 * (l.d2(0, 0) + l.d2(1, 1));
    Ok(SampleRecord::upper(vec![zeta.re, zeta.im], -0.5 * k2 * s.value(), ddbar, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalityReport {
    pub k_g: f64,
    /// Curvature of the extremal disk at its centre.
    pub extremal: f64,
    pub probes: Vec<SampleRecord>,
    pub passed: bool,
}

/// Gaussian curvature at `ζ = 0` of `G` pulled back by disks through `z`
/// tangent to `v` with second-order terms `w` (plus the extremal disk) is at
/// most `K_G(v)`.
pub fn maximality_check(def: &MetricDef, z: &[C], v: &[C], ws: &[Vec<C>], tol: f64) -> Result<MaximalityReport> {
    let m = def.metric.as_ref();
    let k_g = crate::connection_complex::holomorphic_sectional_curvature(m, z, v)?;
    let ext = ProbeDisk::extremal(m, z, v)?;
    let curv = |p: &ProbeDisk| gaussian_curvature_jet(&curve_density(m, &|s: &CJet| p.eval(s), C::new(0.0, 0.0))?);
    let extremal = curv(&ext)?;
    let probes: Vec<SampleRecord> = ws
        .iter()
        .map(|w| {
            let p = ProbeDisk {
                z0: z.to_vec(),
                v: v.to_vec(),
                w: w.clone(),
            };
            let point = w.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>();
            match curv(&p) {
                Ok(k) => SampleRecord::upper(point, k, k_g, tol),
                Err(e) => SampleRecord::failed(point, e),
            }
        })
        .collect();
    let passed = probes.iter().all(|r| r.passed) && (extremal - k_g).abs() <= tol.max(1e-6 * k_g.abs());
    Ok(MaximalityReport {
        k_g,
        extremal,
        probes,
        passed,
    })
}

#[cfg(test)]
mod tests;
