//! Composition of Hermitian quadratics by sums, scalings and real powers.

use serde::{Deserialize, Serialize};

use super::hermitian::{HermitianForm, HermitianSpec};
use crate::error::{FinslerError, Result};
use crate::jet::{CJet, Jet};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expr {
    /// A Hermitian form acting on coordinates `offset..offset + dim`.
    Quadratic {
        h: HermitianSpec,
        #[serde(default)]
        offset: usize,
    },
    Sum { terms: Vec<Expr> },
    Scale { c: f64, of: Box<Expr> },
    Power { p: f64, of: Box<Expr> },
}

#[derive(Debug, Clone)]
pub enum BuiltExpr {
    Quadratic { form: HermitianForm, offset: usize },
    Sum(Vec<BuiltExpr>),
    Scale(f64, Box<BuiltExpr>),
    Power(f64, Box<BuiltExpr>),
}

impl BuiltExpr {
    /// Builds and returns the homogeneity degree in `v`.
    pub fn build(e: &Expr, n: usize) -> Result<(BuiltExpr, f64)> {
        Ok(match e {
            Expr::Quadratic { h, offset } => {
                let form = HermitianForm::build(h)?;
                if offset + form.dim() > n {
                    return Err(FinslerError::Config(format!(
                        "quadratic block {}..{} exceeds complex_dim {n}",
                        offset,
                        offset + form.dim()
                    )));
                }
                (
                    BuiltExpr::Quadratic {
                        form,
                        offset: *offset,
                    },
                    2.0,
                )
            }
            Expr::Sum { terms } => {
                let built = terms
                    .iter()
                    .map(|t| BuiltExpr::build(t, n))
                    .collect::<Result<Vec<_>>>()?;
                let Some(d) = built.first().map(|b| b.1) else {
                    return Err(FinslerError::Config("empty sum".into()));
                };
                if built.iter().any(|b| (b.1 - d).abs() > 1e-12) {
                    return Err(FinslerError::Config("sum of terms with different degrees".into()));
                }
                (BuiltExpr::Sum(built.into_iter().map(|b| b.0).collect()), d)
            }
            Expr::Scale { c, of } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(FinslerError::Config(format!("scale must be > 0, got {c}")));
                }
                let (b, d) = BuiltExpr::build(of, n)?;
                (BuiltExpr::Scale(*c, Box::new(b)), d)
            }
            Expr::Power { p, of } => {
                if !(*p > 0.0 && p.is_finite()) {
                    return Err(FinslerError::Config(format!("power must be > 0, got {p}")));
                }
                let (b, d) = BuiltExpr::build(of, n)?;
                (BuiltExpr::Power(*p, Box::new(b)), d * p)
            }
        })
    }

    pub fn eval(&self, z: &[CJet], v: &[CJet]) -> Jet {
        match self {
            BuiltExpr::Quadratic { form, offset } => {
                let r = *offset..*offset + form.dim();
                form.eval(&z[r.clone()], &v[r])
            }
            BuiltExpr::Sum(ts) => ts
                .iter()
                .map(|t| t.eval(z, v))
                .reduce(|a, b| a + b)
                .expect("non-empty sum"),
            BuiltExpr::Scale(c, e) => e.eval(z, v) * *c,
            BuiltExpr::Power(p, e) => e.eval(z, v).powf(*p),
        }
    }

    pub fn in_domain(&self, z: &[Complex64]) -> bool {
        match self {
            BuiltExpr::Quadratic { form, offset } => form.in_domain(&z[*offset..*offset + form.dim()]),
            BuiltExpr::Sum(ts) => ts.iter().all(|t| t.in_domain(z)),
            BuiltExpr::Scale(_, e) | BuiltExpr::Power(_, e) => e.in_domain(z),
        }
    }

    pub fn domain_radius(&self) -> Option<f64> {
        match self {
            BuiltExpr::Quadratic { form, .. } => form.domain_radius(),
            BuiltExpr::Sum(ts) => ts.iter().filter_map(|t| t.domain_radius()).reduce(f64::min),
            BuiltExpr::Scale(_, e) | BuiltExpr::Power(_, e) => e.domain_radius(),
        }
    }
}
