//! Hermitian quadratic forms `h_{ab}(z) v^a conj(v^b)` from a fixed catalog.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::geometry::{hermitian_dot, norm_sqr_jet};
use crate::jet::{CJet, Jet};
use crate::linalg::min_eigen_hermitian;

/// Complex matrix in config form; `im` may be omitted for real matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrix {
    pub fn identity(n: usize) -> Self {
        ComplexMatrix {
            re: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            im: vec![],
        }
    }

    /// Any `rows x cols` matrix.
    pub fn to_rect(&self) -> Result<DMatrix<Complex64>> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 || self.re.iter().any(|r| r.len() != cols) {
            return Err(FinslerError::Config("matrix must be rectangular and non-empty".into()));
        }
        if !self.im.is_empty() && (self.im.len() != rows || self.im.iter().any(|r| r.len() != cols)) {
            return Err(FinslerError::Config("imaginary part has the wrong shape".into()));
        }
        Ok(DMatrix::from_fn(rows, cols, |i, j| {
            let im = if self.im.is_empty() { 0.0 } else { self.im[i][j] };
            Complex64::new(self.re[i][j], im)
        }))
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        let m = self.to_rect()?;
        if m.nrows() != m.ncols() {
            return Err(FinslerError::Config("matrix must be square".into()));
        }
        Ok(m)
    }

    /// Validated Hermitian matrix; positive definite unless `semidefinite`.
    pub fn hermitian(&self, semidefinite: bool) -> Result<DMatrix<Complex64>> {
        let m = self.to_matrix()?;
        let skew = (&m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if skew > 1e-12 * m.iter().map(|c| c.norm()).fold(1.0, f64::max) {
            return Err(FinslerError::Config(format!(
                "matrix is not Hermitian (|H - H*| = {skew:.3e})"
            )));
        }
        let lo = min_eigen_hermitian(&m);
        if lo < 0.0 || (!semidefinite && lo <= 0.0) {
            return Err(FinslerError::Config(format!(
                "matrix is not positive {}definite (min eigenvalue {lo:.3e})",
                if semidefinite { "semi" } else { "" }
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HermitianSpec {
    Identity {
        complex_dim: usize,
    },
    Constant {
        matrix: ComplexMatrix,
    },
    /// Ball metric of constant holomorphic curvature `-4 / scale`.
    Poincare {
        complex_dim: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Block-diagonal product; a product of unit disks is the polydisk.
    Product {
        factors: Vec<HermitianSpec>,
    },
    /// `h_aa = 1 + c |z^{a+1}|^2` (indices cyclic), not Kähler for `c != 0`.
    Warped {
        complex_dim: usize,
        c: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone)]
pub enum HermitianForm {
    Constant(DMatrix<Complex64>),
    Poincare { n: usize, scale: f64 },
    Product(Vec<HermitianForm>),
    Warped { n: usize, c: f64 },
}

impl HermitianForm {
    pub fn build(spec: &HermitianSpec) -> Result<Self> {
        Ok(match spec {
            HermitianSpec::Identity { complex_dim } => {
                nonzero(*complex_dim)?;
                HermitianForm::Constant(DMatrix::identity(*complex_dim, *complex_dim))
            }
            HermitianSpec::Constant { matrix } => HermitianForm::Constant(matrix.hermitian(false)?),
            HermitianSpec::Poincare { complex_dim, scale } => {
                nonzero(*complex_dim)?;
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(FinslerError::Config(format!("poincare scale must be > 0, got {scale}")));
                }
                HermitianForm::Poincare {
                    n: *complex_dim,
                    scale: *scale,
                }
            }
            HermitianSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(FinslerError::Config("product needs at least one factor".into()));
                }
                HermitianForm::Product(factors.iter().map(Self::build).collect::<Result<_>>()?)
            }
            HermitianSpec::Warped { complex_dim, c } => {
                if *complex_dim < 2 {
                    return Err(FinslerError::Config("warped metric needs complex_dim >= 2".into()));
                }
                if !(*c >= 0.0 && c.is_finite()) {
                    return Err(FinslerError::Config(format!("warped c must be >= 0, got {c}")));
                }
                HermitianForm::Warped {
                    n: *complex_dim,
                    c: *c,
                }
            }
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            HermitianForm::Constant(m) => m.nrows(),
            HermitianForm::Poincare { n, .. } | HermitianForm::Warped { n, .. } => *n,
            HermitianForm::Product(f) => f.iter().map(|x| x.dim()).sum(),
        }
    }

    /// `sum h_{ab}(z) v^a conj(v^b)` as a real jet.
    pub fn eval(&self, z: &[CJet], v: &[CJet]) -> Jet {
        match self {
            HermitianForm::Constant(h) => {
                let n = h.nrows();
                let mut acc: Option<CJet> = None;
                for a in 0..n {
                    for b in 0..n {
                        let hab = h[(a, b)];
                        if hab == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let t = (&v[a] * &v[b].conj()).scale(hab);
                        acc = Some(match acc {
                            Some(s) => s + t,
                            None => t,
                        });
                    }
                }
                acc.expect("positive definite matrix has a nonzero entry").re()
            }
            HermitianForm::Poincare { scale, .. } => {
                let t = norm_sqr_jet(z);
                let r = norm_sqr_jet(v);
                let ip = hermitian_dot(v, z);
                let ip2 = ip.re().square() + ip.im().square();
                let om = -t + 1.0;
                ((&om * &r + ip2) / om.square()) * *scale
            }
            HermitianForm::Product(fs) => {
                let mut off = 0;
                let mut acc: Option<Jet> = None;
                for f in fs {
                    let d = f.dim();
                    let t = f.eval(&z[off..off + d], &v[off..off + d]);
                    off += d;
                    acc = Some(match acc {
                        Some(s) => s + t,
                        None => t,
                    });
                }
                acc.expect("non-empty product")
            }
            HermitianForm::Warped { n, c } => {
                let mut acc: Option<Jet> = None;
                for a in 0..*n {
                    let w = &z[(a + 1) % n];
                    let wz = w.re().square() + w.im().square();
                    let va = v[a].re().square() + v[a].im().square();
                    let t = (wz * *c + 1.0) * va;
                    acc = Some(match acc {
                        Some(s) => s + t,
                        None => t,
                    });
                }
                acc.expect("dimension >= 2")
            }
        }
    }

    /// The matrix `h_{ab}(z)` (coefficient of `v^a conj(v^b)`).
    pub fn matrix(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        match self {
            HermitianForm::Constant(h) => h.clone(),
            HermitianForm::Poincare { n, scale } => {
                let t: f64 = z.iter().map(|c| c.norm_sqr()).sum();
                let om = 1.0 - t;
                DMatrix::from_fn(*n, *n, |a, b| {
                    let d = if a == b { 1.0 / om } else { 0.0 };
                    (z[a].conj() * z[b] / (om * om) + d) * *scale
                })
            }
            HermitianForm::Product(fs) => {
                let n = self.dim();
                let mut m = DMatrix::zeros(n, n);
                let mut off = 0;
                for f in fs {
                    let d = f.dim();
                    m.view_mut((off, off), (d, d))
                        .copy_from(&f.matrix(&z[off..off + d]));
                    off += d;
                }
                m
            }
            HermitianForm::Warped { n, c } => DMatrix::from_fn(*n, *n, |a, b| {
                if a == b {
                    Complex64::new(1.0 + c * z[(a + 1) % n].norm_sqr(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn in_domain(&self, z: &[Complex64]) -> bool {
        match self {
            HermitianForm::Poincare { .. } => z.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1.0,
            HermitianForm::Product(fs) => {
                let mut off = 0;
                fs.iter().all(|f| {
                    let d = f.dim();
                    let ok = f.in_domain(&z[off..off + d]);
                    off += d;
                    ok
                })
            }
            _ => z.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
        }
    }

    /// Radius of a ball around the origin contained in the domain.
    pub fn domain_radius(&self) -> Option<f64> {
        match self {
            HermitianForm::Poincare { .. } => Some(1.0),
            HermitianForm::Product(fs) => fs
                .iter()
                .filter_map(|f| f.domain_radius())
                .reduce(f64::min),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            HermitianForm::Constant(_) => true,
            HermitianForm::Product(fs) => fs.iter().all(|f| f.is_constant()),
            HermitianForm::Warped { c, .. } => *c == 0.0,
            HermitianForm::Poincare { .. } => false,
        }
    }

    pub fn is_kahler(&self) -> bool {
        match self {
            HermitianForm::Warped { c, .. } => *c == 0.0,
            HermitianForm::Product(fs) => fs.iter().all(|f| f.is_kahler()),
            _ => true,
        }
    }

    /// Constant holomorphic sectional curvature when the form has one.
    pub fn known_curvature(&self) -> Option<f64> {
        if self.is_constant() {
            return Some(0.0);
        }
        match self {
            HermitianForm::Poincare { scale, .. } => Some(-4.0 / scale),
            _ => None,
        }
    }
}

fn nonzero(n: usize) -> Result<()> {
    if n == 0 {
        Err(FinslerError::Config("complex_dim must be >= 1".into()))
    } else {
        Ok(())
    }
}
