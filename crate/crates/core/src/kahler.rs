//! Kähler-type classification and the U(n)-invariant criteria.

use serde::{Deserialize, Serialize};

use crate::connection_complex::chern_finsler;
use crate::error::Result;
use crate::exec;
use crate::jet::lift_all;
use crate::metrics::{instantiate, FamilySpec, MetricDef, Profile};
use crate::report::{SamplePlan, SampleRecord, VerificationReport};

/// Relative tolerance of the three torsion residuals.
pub const CLASS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KahlerClass {
    None,
    WeaklyKahler,
    Kahler,
    StronglyKahler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KahlerReport {
    /// `max |Gamma^a_{n;m} - Gamma^a_{m;n}|`.
    pub residual_strong: f64,
    /// `max |[Gamma^a_{n;m} - Gamma^a_{m;n}] v^m|`.
    pub residual_kahler: f64,
    /// `max |G_a [Gamma^a_{n;m} - Gamma^a_{m;n}] v^m|`.
    pub residual_weak: f64,
    pub scale_strong: f64,
    pub scale_kahler: f64,
    pub scale_weak: f64,
    pub class: KahlerClass,
    pub samples: usize,
}

impl KahlerReport {
    pub fn strong_pass(&self) -> bool {
        self.residual_strong <= CLASS_TOL * self.scale_strong
    }
    pub fn kahler_pass(&self) -> bool {
        self.residual_kahler <= CLASS_TOL * self.scale_kahler
    }
    pub fn weak_pass(&self) -> bool {
        self.residual_weak <= CLASS_TOL * self.scale_weak
    }
}

struct Residuals {
    strong: f64,
    kahler: f64,
    weak: f64,
    gamma: f64,
    v1: f64,
    g1: f64,
}

/// Samples the torsion of the Chern-Finsler connection and classifies `def`.
pub fn classify(def: &MetricDef, plan: &SamplePlan) -> Result<KahlerReport> {
    let n = def.dim();
    let dirs = plan.fan(n);
    let per_point = dirs.len().clamp(1, 3);
    let mut samples = Vec::new();
    for (i, z) in plan.points(n, def.domain()).into_iter().enumerate() {
        for k in 0..per_point {
            samples.push((z.clone(), dirs[(i * per_point + k) % dirs.len()].clone()));
        }
    }
    let m = def.metric.as_ref();
    let res = exec::map(&samples, |(z, v)| -> Result<Residuals> {
        let cf = chern_finsler(m, z, v)?;
        let mut r = Residuals {
            strong: 0.0,
            kahler: 0.0,
            weak: 0.0,
            gamma: 0.0,
            v1: v.iter().map(|c| c.norm()).sum(),
            g1: cf.grad.iter().map(|c| c.norm()).sum(),
        };
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    r.strong = r.strong.max(cf.torsion[a][b][k].norm());
                    r.gamma = r.gamma.max(cf.horizontal[a][b][k].norm());
                }
            }
        }
        let mut kv = vec![vec![num_complex::Complex64::new(0.0, 0.0); n]; n];
        for a in 0..n {
            for nu in 0..n {
                kv[a][nu] = (0..n).map(|mu| cf.torsion[a][nu][mu] * v[mu]).sum();
                r.kahler = r.kahler.max(kv[a][nu].norm());
            }
        }
        for nu in 0..n {
            let w: num_complex::Complex64 = (0..n).map(|a| cf.grad[a] * kv[a][nu]).sum();
            r.weak = r.weak.max(w.norm());
        }
        Ok(r)
    });
    let res = res.into_iter().collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&Residuals) -> f64| res.iter().map(f).fold(0.0, f64::max);
    let scale_strong = fold(|r| r.gamma).max(1.0);
    let scale_kahler = scale_strong * fold(|r| r.v1);
    let scale_weak = scale_kahler * fold(|r| r.g1);
    let mut rep = KahlerReport {
        residual_strong: fold(|r| r.strong),
        residual_kahler: fold(|r| r.kahler),
        residual_weak: fold(|r| r.weak),
        scale_strong,
        scale_kahler,
        scale_weak,
        class: KahlerClass::None,
        samples: res.len(),
    };
    rep.class = if rep.strong_pass() {
        KahlerClass::StronglyKahler
    } else if rep.kahler_pass() {
        KahlerClass::Kahler
    } else if rep.weak_pass() {
        KahlerClass::WeaklyKahler
    } else {
        KahlerClass::None
    };
    Ok(rep)
}

/// Whether `phi` is literally `f(t) + f'(t) s`.
pub fn is_kahler_profile(profile: &Profile) -> bool {
    match profile {
        Profile::Kahler { .. } => true,
        Profile::Polynomial { terms } => {
            let mut coef = std::collections::BTreeMap::new();
            for term in terms {
                *coef.entry((term.t, term.s)).or_insert(0.0) += term.c;
            }
            if coef.iter().any(|(&(_, j), &c)| j >= 2 && c != 0.0) {
                return false;
            }
            let get = |i: u32, j: u32| coef.get(&(i, j)).copied().unwrap_or(0.0);
            let deg = coef.keys().map(|k| k.0).max().unwrap_or(0);
            // f = sum a_i t^i must be positive at 0 and phi_s = f'
            get(0, 0) > 0.0 && (0..=deg).all(|i| get(i, 1) == (i + 1) as f64 * get(i + 1, 0))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnInvariantCheck {
    pub symbolic_kahler: bool,
    pub class: KahlerClass,
    pub classified_kahler: bool,
    pub agree: bool,
    pub report: KahlerReport,
}

/// Compares the closed-form predicate with [`classify`] on the instantiated metric.
pub fn un_invariant_kahler_check(
    profile: &Profile,
    complex_dim: usize,
    radius: Option<f64>,
    plan: &SamplePlan,
) -> Result<UnInvariantCheck> {
    let def = instantiate(&FamilySpec::UnInvariant {
        complex_dim,
        profile: profile.clone(),
        radius,
    })?;
    let report = classify(&def, plan)?;
    let symbolic_kahler = is_kahler_profile(profile);
    let classified_kahler = report.class >= KahlerClass::Kahler;
    Ok(UnInvariantCheck {
        symbolic_kahler,
        class: report.class,
        classified_kahler,
        agree: symbolic_kahler == classified_kahler,
        report,
    })
}

pub const PDE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeGrid {
    pub t_max: f64,
    pub size: usize,
}

impl PdeGrid {
    /// A `20 x 20` grid over `0 <= s <= t <= 0.9 t_bound` (or `t <= 1`).
    pub fn for_profile(profile: &Profile) -> Self {
        PdeGrid {
            t_max: profile.t_bound().map_or(1.0, |b| 0.9 * b),
            size: 20,
        }
    }
}

/// The left side of the weak-Kähler equation for U(n)-invariant profiles and
/// the magnitude of its terms, at `(t, s)`.
pub fn weak_kahler_lhs(profile: &Profile, t: f64, s: f64) -> (f64, f64) {
    let ts = lift_all(&[t, s], 2);
    let phi = profile.eval(&ts[0], &ts[1]);
    let p = phi.value();
    let pt = phi.d1(0);
    let ps = phi.d1(1);
    let pst = phi.d2(0, 1);
    let pss = phi.d2(1, 1);
    let a = p - s * ps;
    let b = p + (t - s) * ps;
    let c = ps - pt + s * (pst + pss);
    let d = p * (ps - pt) + s * ps * (pt + ps);
    let e = s * (t - s) * pss;
    let lhs = a * b * c + e * d;
    let mag = (p.abs() + s * ps.abs())
        * (p.abs() + (t - s).abs() * ps.abs())
        * (ps.abs() + pt.abs() + s * (pst.abs() + pss.abs()))
        + e.abs() * (p.abs() * (ps.abs() + pt.abs()) + s * ps.abs() * (pt.abs() + ps.abs()));
    (lhs, mag)
}

/// Residual of the weak-Kähler equation over `0 <= s <= t` on `grid`.
pub fn weakly_kahler_pde_residual(profile: &Profile, grid: &PdeGrid) -> VerificationReport {
    let n = grid.size.max(2);
    let pts: Vec<(f64, f64)> = (0..n)
        .flat_map(|i| {
            let t = grid.t_max * i as f64 / (n - 1) as f64;
            (0..n).map(move |j| (t, t * j as f64 / (n - 1) as f64))
        })
        .collect();
    let rows = exec::map(&pts, |&(t, s)| weak_kahler_lhs(profile, t, s));
    let scale = rows.iter().map(|r| r.1).fold(1.0, f64::max);
    let samples = pts
        .iter()
        .zip(rows)
        .map(|(&(t, s), (lhs, _))| SampleRecord::identity(vec![t, s], lhs, 0.0, PDE_TOL * scale))
        .collect();
    VerificationReport::from_samples("weak_kahler_pde", PDE_TOL * scale, samples)
}

/// Grid point where the residual is largest.
pub fn worst_point(rep: &VerificationReport) -> Option<(f64, f64, f64)> {
    rep.samples
        .iter()
        .max_by(|a, b| a.lhs.abs().total_cmp(&b.lhs.abs()))
        .map(|s| (s.point[0], s.point[1], s.lhs))
}
