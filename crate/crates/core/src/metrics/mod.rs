//! Built-in metric families, the metric checker and the holomorphic map catalog.

mod check;
mod expr;
mod hermitian;
mod maps;
mod profile;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::geometry::{complex_jets, norm_sqr_jet, ComplexMetric, Realified};
use crate::jet::Jet;

pub use check::{check_metric, levi_matrix, vertical_data, MetricCheck, VerticalData};
pub use expr::{BuiltExpr, Expr};
pub use hermitian::{ComplexMatrix, HermitianForm, HermitianSpec};
pub use maps::{HoloMap, MapSpec};
pub use profile::{KahlerPotential, Profile, Term};

/// A metric family with its parameters, as read from config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Euclidean {
        complex_dim: usize,
    },
    Poincare {
        complex_dim: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    Polydisk {
        complex_dim: usize,
    },
    Hermitian {
        h: HermitianSpec,
    },
    /// `(sum_k h_k(v)^p)^(1/p) + perturb |v|^2` over constant Hermitian `h_k`.
    Minkowski {
        factors: Vec<ComplexMatrix>,
        p: f64,
        #[serde(default)]
        perturb: f64,
    },
    /// `a + b + eps (a^k + b^k)^(1/k)` with `a`, `b` Hermitian forms on two factors.
    Szabo {
        k: u32,
        eps: f64,
        factors: Vec<HermitianSpec>,
    },
    UnInvariant {
        complex_dim: usize,
        profile: Profile,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    Composite {
        complex_dim: usize,
        expr: Expr,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Real,
    Complex,
    ComplexStronglyConvex,
}

/// Ground truths a family knows about itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMeta {
    pub family: String,
    pub complex_dim: usize,
    pub real_dim: usize,
    pub kind: MetricKind,
    /// Radius of a ball around 0 inside the domain; `None` for all of `C^n`.
    pub domain_radius: Option<f64>,
    pub hermitian: bool,
    pub known_holomorphic_curvature: Option<f64>,
    pub known_kahler: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct MetricDef {
    pub spec: FamilySpec,
    pub metric: Arc<dyn ComplexMetric>,
    pub meta: MetricMeta,
}

impl MetricDef {
    pub fn dim(&self) -> usize {
        self.meta.complex_dim
    }

    pub fn realified(&self) -> Realified {
        Realified::new(self.metric.clone())
    }

    pub fn domain(&self) -> f64 {
        self.meta.domain_radius.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug)]
struct HermitianMetric(HermitianForm);

impl ComplexMetric for HermitianMetric {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, z: &[Jet], v: &[Jet]) -> Result<Jet> {
        Ok(self.0.eval(&complex_jets(z), &complex_jets(v)))
    }
    fn in_domain(&self, z: &[Complex64]) -> bool {
        self.0.in_domain(z)
    }
    fn hermitian_matrix(&self, z: &[Complex64]) -> Option<DMatrix<Complex64>> {
        Some(self.0.matrix(z))
    }
}

#[derive(Debug)]
struct MinkowskiMetric {
    n: usize,
    factors: Vec<HermitianForm>,
    p: f64,
    perturb: f64,
}

impl ComplexMetric for MinkowskiMetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Jet], v: &[Jet]) -> Result<Jet> {
        let (zc, vc) = (complex_jets(z), complex_jets(v));
        let sum = self
            .factors
            .iter()
            .map(|h| h.eval(&zc, &vc).powf(self.p))
            .reduce(|a, b| a + b)
            .expect("at least one factor");
        let mut g = sum.powf(1.0 / self.p);
        if self.perturb > 0.0 {
            g = g + norm_sqr_jet(&vc) * self.perturb;
        }
        Ok(g)
    }
    fn in_domain(&self, z: &[Complex64]) -> bool {
        z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

#[derive(Debug)]
struct SzaboMetric {
    a: HermitianForm,
    b: HermitianForm,
    k: u32,
    eps: f64,
}

impl ComplexMetric for SzaboMetric {
    fn dim(&self) -> usize {
        self.a.dim() + self.b.dim()
    }
    fn eval(&self, z: &[Jet], v: &[Jet]) -> Result<Jet> {
        let (zc, vc) = (complex_jets(z), complex_jets(v));
        let na = self.a.dim();
        let a2 = self.a.eval(&zc[..na], &vc[..na]);
        let b2 = self.b.eval(&zc[na..], &vc[na..]);
        let mix = (a2.powi(self.k) + b2.powi(self.k)).powf(1.0 / self.k as f64);
        Ok(a2 + b2 + mix * self.eps)
    }
    fn in_domain(&self, z: &[Complex64]) -> bool {
        let na = self.a.dim();
        self.a.in_domain(&z[..na]) && self.b.in_domain(&z[na..])
    }
}

#[derive(Debug)]
struct UnInvariantMetric {
    n: usize,
    profile: Profile,
    t_max: Option<f64>,
}

impl ComplexMetric for UnInvariantMetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Jet], v: &[Jet]) -> Result<Jet> {
        let (zc, vc) = (complex_jets(z), complex_jets(v));
        let t = norm_sqr_jet(&zc);
        let r = norm_sqr_jet(&vc);
        let ip = crate::geometry::hermitian_dot(&zc, &vc);
        let s = (ip.re().square() + ip.im().square()) / &r;
        Ok(r * self.profile.eval(&t, &s))
    }
    fn in_domain(&self, z: &[Complex64]) -> bool {
        let t: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        t.is_finite() && self.t_max.is_none_or(|m| t < m)
    }
}

#[derive(Debug)]
struct CompositeMetric {
    n: usize,
    expr: BuiltExpr,
}

impl ComplexMetric for CompositeMetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Jet], v: &[Jet]) -> Result<Jet> {
        Ok(self.expr.eval(&complex_jets(z), &complex_jets(v)))
    }
    fn in_domain(&self, z: &[Complex64]) -> bool {
        self.expr.in_domain(z)
    }
}

fn cfg(msg: impl Into<String>) -> FinslerError {
    FinslerError::Config(msg.into())
}

fn hermitian_def(spec: &FamilySpec, family: &str, h: &HermitianSpec) -> Result<MetricDef> {
    let form = HermitianForm::build(h)?;
    let n = form.dim();
    let meta = MetricMeta {
        family: family.into(),
        complex_dim: n,
        real_dim: 2 * n,
        kind: MetricKind::ComplexStronglyConvex,
        domain_radius: form.domain_radius(),
        hermitian: true,
        known_holomorphic_curvature: form.known_curvature(),
        known_kahler: Some(form.is_kahler()),
    };
    Ok(MetricDef {
        spec: spec.clone(),
        metric: Arc::new(HermitianMetric(form)),
        meta,
    })
}

/// Builds the evaluator for a family, validating its parameters.
pub fn instantiate(spec: &FamilySpec) -> Result<MetricDef> {
    match spec {
        FamilySpec::Euclidean { complex_dim } => hermitian_def(
            spec,
            "euclidean",
            &HermitianSpec::Identity {
                complex_dim: *complex_dim,
            },
        ),
        FamilySpec::Poincare { complex_dim, scale } => hermitian_def(
            spec,
            "poincare",
            &HermitianSpec::Poincare {
                complex_dim: *complex_dim,
                scale: *scale,
            },
        ),
        FamilySpec::Polydisk { complex_dim } => {
            if *complex_dim == 0 {
                return Err(cfg("complex_dim must be >= 1"));
            }
            let disk = HermitianSpec::Poincare {
                complex_dim: 1,
                scale: 1.0,
            };
            hermitian_def(
                spec,
                "polydisk",
                &HermitianSpec::Product {
                    factors: vec![disk; *complex_dim],
                },
            )
        }
        FamilySpec::Hermitian { h } => hermitian_def(spec, "hermitian", h),
        FamilySpec::Minkowski { factors, p, perturb } => {
            if factors.is_empty() {
                return Err(cfg("minkowski needs at least one factor"));
            }
            if !(*p >= 1.0 && p.is_finite()) {
                return Err(cfg(format!("minkowski exponent p must be >= 1, got {p}")));
            }
            if !(*perturb >= 0.0 && perturb.is_finite()) {
                return Err(cfg(format!("minkowski perturb must be >= 0, got {perturb}")));
            }
            let mats = factors
                .iter()
                .map(|m| m.hermitian(true))
                .collect::<Result<Vec<_>>>()?;
            let n = mats[0].nrows();
            if mats.iter().any(|m| m.nrows() != n) {
                return Err(cfg("minkowski factors must share one dimension"));
            }
            let total = mats.iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m);
            if crate::linalg::min_eigen_hermitian(&total) <= 1e-12 {
                return Err(cfg("minkowski factors must have a full-rank sum"));
            }
            let singular = mats
                .iter()
                .any(|m| crate::linalg::min_eigen_hermitian(m) <= 1e-12);
            if singular && p.fract() != 0.0 {
                return Err(cfg(
                    "minkowski with semidefinite factors needs an integer p to stay smooth",
                ));
            }
            let meta = MetricMeta {
                family: "minkowski".into(),
                complex_dim: n,
                real_dim: 2 * n,
                kind: MetricKind::ComplexStronglyConvex,
                domain_radius: None,
                hermitian: *p == 1.0 || factors.len() == 1,
                known_holomorphic_curvature: Some(0.0),
                known_kahler: Some(true),
            };
            Ok(MetricDef {
                spec: spec.clone(),
                metric: Arc::new(MinkowskiMetric {
                    n,
                    factors: mats.into_iter().map(HermitianForm::Constant).collect(),
                    p: *p,
                    perturb: *perturb,
                }),
                meta,
            })
        }
        FamilySpec::Szabo { k, eps, factors } => {
            if *k < 2 {
                return Err(cfg(format!("szabo exponent k must be >= 2, got {k}")));
            }
            if !(*eps > 0.0 && eps.is_finite()) {
                return Err(cfg(format!("szabo eps must be > 0, got {eps}")));
            }
            let [fa, fb] = factors.as_slice() else {
                return Err(cfg(format!("szabo needs exactly 2 factors, got {}", factors.len())));
            };
            let a = HermitianForm::build(fa)?;
            let b = HermitianForm::build(fb)?;
            let n = a.dim() + b.dim();
            let flat = a.is_constant() && b.is_constant();
            let meta = MetricMeta {
                family: "szabo".into(),
                complex_dim: n,
                real_dim: 2 * n,
                kind: MetricKind::ComplexStronglyConvex,
                domain_radius: [a.domain_radius(), b.domain_radius()]
                    .into_iter()
                    .flatten()
                    .reduce(f64::min),
                hermitian: false,
                known_holomorphic_curvature: flat.then_some(0.0),
                known_kahler: (a.is_kahler() && b.is_kahler()).then_some(true),
            };
            Ok(MetricDef {
                spec: spec.clone(),
                metric: Arc::new(SzaboMetric { a, b, k: *k, eps: *eps }),
                meta,
            })
        }
        FamilySpec::UnInvariant {
            complex_dim,
            profile,
            radius,
        } => {
            if *complex_dim == 0 {
                return Err(cfg("complex_dim must be >= 1"));
            }
            profile.validate()?;
            if let Some(r) = radius {
                if !(*r > 0.0) {
                    return Err(cfg(format!("radius must be > 0, got {r}")));
                }
            }
            let t_max = [profile.t_bound(), radius.map(|r| r * r)]
                .into_iter()
                .flatten()
                .reduce(f64::min);
            let curvature = match profile {
                Profile::Kahler {
                    f: KahlerPotential::One,
                } => Some(0.0),
                Profile::Kahler {
                    f: KahlerPotential::InvOneMinus,
                } => Some(-4.0),
                _ => None,
            };
            let meta = MetricMeta {
                family: "un_invariant".into(),
                complex_dim: *complex_dim,
                real_dim: 2 * complex_dim,
                kind: MetricKind::Complex,
                domain_radius: t_max.map(f64::sqrt),
                // r (f + f' s) = f |v|^2 + f' |<v, z>|^2 is Hermitian in v
                hermitian: profile.is_kahler_form(),
                known_holomorphic_curvature: curvature,
                known_kahler: profile.is_kahler_form().then_some(true),
            };
            Ok(MetricDef {
                spec: spec.clone(),
                metric: Arc::new(UnInvariantMetric {
                    n: *complex_dim,
                    profile: profile.clone(),
                    t_max,
                }),
                meta,
            })
        }
        FamilySpec::Composite { complex_dim, expr } => {
            if *complex_dim == 0 {
                return Err(cfg("complex_dim must be >= 1"));
            }
            let (built, degree) = BuiltExpr::build(expr, *complex_dim)?;
            if (degree - 2.0).abs() > 1e-12 {
                return Err(cfg(format!(
                    "composite metric must be 2-homogeneous in v, got degree {degree}"
                )));
            }
            let meta = MetricMeta {
                family: "composite".into(),
                complex_dim: *complex_dim,
                real_dim: 2 * complex_dim,
                kind: MetricKind::Complex,
                domain_radius: built.domain_radius(),
                hermitian: false,
                known_holomorphic_curvature: None,
                known_kahler: None,
            };
            Ok(MetricDef {
                spec: spec.clone(),
                metric: Arc::new(CompositeMetric {
                    n: *complex_dim,
                    expr: built,
                }),
                meta,
            })
        }
    }
}
