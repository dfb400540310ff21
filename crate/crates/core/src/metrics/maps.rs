//! Holomorphic maps used as Schwarz-lemma test subjects.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hermitian::ComplexMatrix;
use crate::error::{FinslerError, Result};
use crate::geometry::{complex_jets, complex_to_real};
use crate::jet::{lift_all, CJet, Jet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity {
        dim: usize,
    },
    /// `w^a -> (w^a)^m` coordinatewise.
    Power {
        m: u32,
        #[serde(default = "one")]
        dim: usize,
    },
    /// Disk automorphism `e^{i theta} (w - a) / (1 - conj(a) w)`.
    Mobius {
        a: [f64; 2],
        #[serde(default)]
        theta: f64,
    },
    /// `w -> A w + b` from `C^cols` to `C^rows`.
    Linear {
        matrix: ComplexMatrix,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        offset: Vec<[f64; 2]>,
    },
    Constant {
        dim: usize,
        value: Vec<[f64; 2]>,
    },
    /// Block product acting on consecutive coordinates.
    Product {
        maps: Vec<MapSpec>,
    },
}

fn one() -> usize {
    1
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone)]
pub struct HoloMap {
    pub spec: MapSpec,
    source: usize,
    target: usize,
    linear: Option<(DMatrix<Complex64>, Vec<Complex64>)>,
    parts: Vec<HoloMap>,
}

impl HoloMap {
    pub fn new(spec: &MapSpec) -> Result<Self> {
        let cfg = |m: &str| FinslerError::Config(m.to_string());
        let mut linear = None;
        let mut parts = Vec::new();
        let (source, target) = match spec {
            MapSpec::Identity { dim } | MapSpec::Power { dim, .. } => {
                if *dim == 0 {
                    return Err(cfg("map dimension must be >= 1"));
                }
                if let MapSpec::Power { m: 0, .. } = spec {
                    return Err(cfg("power map exponent must be >= 1"));
                }
                (*dim, *dim)
            }
            MapSpec::Mobius { a, theta } => {
                if c(*a).norm() >= 1.0 || !theta.is_finite() {
                    return Err(cfg("mobius map needs |a| < 1 and finite theta"));
                }
                (1, 1)
            }
            MapSpec::Linear { matrix, offset } => {
                let a = matrix.to_rect()?;
                let b: Vec<Complex64> = if offset.is_empty() {
                    vec![Complex64::new(0.0, 0.0); a.nrows()]
                } else {
                    offset.iter().map(|p| c(*p)).collect()
                };
                if b.len() != a.nrows() {
                    return Err(cfg("linear map offset length must equal the row count"));
                }
                let dims = (a.ncols(), a.nrows());
                linear = Some((a, b));
                dims
            }
            MapSpec::Constant { dim, value } => {
                if value.is_empty() || *dim == 0 {
                    return Err(cfg("constant map needs dim >= 1 and a value"));
                }
                (*dim, value.len())
            }
            MapSpec::Product { maps } => {
                if maps.is_empty() {
                    return Err(cfg("product map needs at least one factor"));
                }
                parts = maps.iter().map(HoloMap::new).collect::<Result<_>>()?;
                (
                    parts.iter().map(|p| p.source).sum(),
                    parts.iter().map(|p| p.target).sum(),
                )
            }
        };
        Ok(HoloMap {
            spec: spec.clone(),
            source,
            target,
            linear,
            parts,
        })
    }

    pub fn source_dim(&self) -> usize {
        self.source
    }

    pub fn target_dim(&self) -> usize {
        self.target
    }

    /// Image of complex jets (any variables, any order).
    pub fn eval_jets(&self, w: &[CJet]) -> Result<Vec<CJet>> {
        if w.len() != self.source {
            return Err(FinslerError::Structural(format!(
                "map expects {} coordinates, got {}",
                self.source,
                w.len()
            )));
        }
        let konst = |x: Complex64| Jet::constant(w[0].nvars(), w[0].order(), x);
        Ok(match &self.spec {
            MapSpec::Identity { .. } => w.to_vec(),
            MapSpec::Power { m, .. } => w.iter().map(|x| x.powi(*m)).collect(),
            MapSpec::Mobius { a, theta } => {
                let a = c(*a);
                let den = -(&w[0] * a.conj()) + Complex64::new(1.0, 0.0);
                if den.value().norm() < 1e-12 {
                    return Err(FinslerError::Domain("mobius pole".into()));
                }
                let num = &w[0] - a;
                vec![(num / den).scale(Complex64::from_polar(1.0, *theta))]
            }
            MapSpec::Linear { .. } => {
                let (a, b) = self.linear.as_ref().expect("built with matrix");
                (0..a.nrows())
                    .map(|i| {
                        (0..a.ncols()).fold(konst(b[i]), |acc, j| acc + w[j].scale(a[(i, j)]))
                    })
                    .collect()
            }
            MapSpec::Constant { value, .. } => value.iter().map(|p| konst(c(*p))).collect(),
            MapSpec::Product { .. } => {
                let mut out = Vec::with_capacity(self.target);
                let mut off = 0;
                for p in &self.parts {
                    out.extend(p.eval_jets(&w[off..off + p.source])?);
                    off += p.source;
                }
                out
            }
        })
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let w: Vec<CJet> = z.iter().map(|&x| Jet::constant(1, 0, x)).collect();
        Ok(self.eval_jets(&w)?.iter().map(|j| j.value()).collect())
    }

    /// Complex Jacobian `df^i / dz^j`.
    pub fn jacobian(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let n = self.source;
        let seeds = lift_all(&complex_to_real(z), 1);
        let w = complex_jets(&seeds);
        let f = self.eval_jets(&w)?;
        Ok(DMatrix::from_fn(self.target, n, |i, j| {
            f[i].wirtinger(j, n + j, false).value()
        }))
    }
}
