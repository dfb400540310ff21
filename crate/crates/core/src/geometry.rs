//! Points, tangent vectors, the complex structure and the metric interfaces.
//!
//! Coordinates are identified once and for all as `z^a = x^a + i x^{n+a}`,
//! with `J(d/dx^a) = d/dx^{n+a}` and `J(d/dx^{n+a}) = -d/dx^a`. Under this
//! identification the (1,0)-part of a real vector `u` has components
//! `v^a = u^a + i u^{n+a}`, and `v + conj(v)` recovers `u`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::jet::{lift_all, CJet, Jet};

/// Vectors shorter than this (relative to the point scale) are never handed
/// to metric derivatives; callers rescale through homogeneity.
pub const SLIT_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealTangent {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexTangent {
    pub z: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

pub fn euclidean_norm(u: &[f64]) -> f64 {
    u.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn complex_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn check_slit(norm: f64, scale: f64) -> Result<()> {
    let guard = SLIT_EPS * scale.max(1.0);
    if norm < guard {
        Err(FinslerError::Slit { norm, guard })
    } else {
        Ok(())
    }
}

/// Real coordinates `(x, y)` to complex `x + i y`.
pub fn real_to_complex(x: &[f64]) -> Result<Vec<Complex64>> {
    if x.len() % 2 == 1 {
        return Err(FinslerError::Structural(format!(
            "odd real dimension {}",
            x.len()
        )));
    }
    let n = x.len() / 2;
    Ok((0..n).map(|a| Complex64::new(x[a], x[n + a])).collect())
}

pub fn complex_to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|c| c.re).chain(z.iter().map(|c| c.im)).collect()
}

/// The complex structure `J` on real coordinate vectors.
pub fn apply_j(u: &[f64]) -> Vec<f64> {
    let n = u.len() / 2;
    let mut out = vec![0.0; u.len()];
    for a in 0..n {
        out[a] = -u[n + a];
        out[n + a] = u[a];
    }
    out
}

/// `u -> u_o = (u - iJu)/2`, the (1,0)-part.
pub fn to_complex(t: &RealTangent) -> Result<ComplexTangent> {
    if t.x.len() != t.u.len() {
        return Err(FinslerError::Structural("point/vector length mismatch".into()));
    }
    Ok(ComplexTangent {
        z: real_to_complex(&t.x)?,
        v: real_to_complex(&t.u)?,
    })
}

/// `v -> v^o = v + conj(v)`.
pub fn to_real(t: &ComplexTangent) -> RealTangent {
    RealTangent {
        x: complex_to_real(&t.z),
        u: complex_to_real(&t.v),
    }
}

/// Complex jets `w^a = re[a] + i re[n+a]` from a block of real jets.
pub fn complex_jets(real: &[Jet]) -> Vec<CJet> {
    let n = real.len() / 2;
    (0..n)
        .map(|a| {
            let i = Complex64::new(0.0, 1.0);
            real[a].to_complex() + real[n + a].to_complex().scale(i)
        })
        .collect()
}

/// `sum_a |w^a|^2` as a real jet.
pub fn norm_sqr_jet(w: &[CJet]) -> Jet {
    let mut it = w.iter().map(|c| {
        let (re, im) = (c.re(), c.im());
        re.square() + im.square()
    });
    let first = it.next().expect("at least one coordinate");
    it.fold(first, |acc, t| acc + t)
}

/// Hermitian pairing `sum_a p^a conj(q^a)`.
pub fn hermitian_dot(p: &[CJet], q: &[CJet]) -> CJet {
    let mut it = p.iter().zip(q).map(|(a, b)| a * &b.conj());
    let first = it.next().expect("at least one coordinate");
    it.fold(first, |acc, t| acc + t)
}

/// A complex Finsler metric `G(z; v)` evaluated on real coordinate jets.
///
/// `z` and `v` hold `2n` real jets each, real parts first.
pub trait ComplexMetric: Send + Sync + std::fmt::Debug {
    /// Complex dimension `n`.
    fn dim(&self) -> usize;

    fn eval(&self, z: &[Jet], v: &[Jet]) -> Result<Jet>;

    fn in_domain(&self, z: &[Complex64]) -> bool;

    /// Hermitian matrix `h_{ab}(z)` when the metric is Hermitian quadratic.
    fn hermitian_matrix(&self, _z: &[Complex64]) -> Option<nalgebra::DMatrix<Complex64>> {
        None
    }
}

/// A real Finsler metric `G(x; u)` on real coordinate jets.
pub trait RealMetric: Send + Sync + std::fmt::Debug {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[Jet], u: &[Jet]) -> Result<Jet>;

    fn in_domain(&self, x: &[f64]) -> bool;
}

/// Joint jet of `G` over all `4n` real coordinates of `(z, v)`, in the order
/// `(Re z, Im z, Re v, Im v)`.
pub fn complex_metric_jet(
    m: &dyn ComplexMetric,
    z: &[Complex64],
    v: &[Complex64],
    order: usize,
) -> Result<Jet> {
    let n = m.dim();
    if z.len() != n || v.len() != n {
        return Err(FinslerError::Structural(format!(
            "expected complex dimension {n}, got point {} vector {}",
            z.len(),
            v.len()
        )));
    }
    if !m.in_domain(z) {
        return Err(FinslerError::Domain(format!("{z:?}")));
    }
    check_slit(complex_norm(v), 1.0)?;
    let mut vals = complex_to_real(z);
    vals.extend(complex_to_real(v));
    let jets = lift_all(&vals, order);
    m.eval(&jets[..2 * n], &jets[2 * n..])
}

pub fn complex_metric_value(m: &dyn ComplexMetric, z: &[Complex64], v: &[Complex64]) -> Result<f64> {
    if !m.in_domain(z) {
        return Err(FinslerError::Domain(format!("{z:?}")));
    }
    let mut vals = complex_to_real(z);
    vals.extend(complex_to_real(v));
    let c: Vec<Jet> = vals.iter().map(|&x| Jet::constant(1, 0, x)).collect();
    let n = m.dim();
    Ok(m.eval(&c[..2 * n], &c[2 * n..])?.value())
}

/// Joint jet of a real metric over `(x, u)`.
pub fn real_metric_jet(m: &dyn RealMetric, x: &[f64], u: &[f64], order: usize) -> Result<Jet> {
    let d = m.dim();
    if x.len() != d || u.len() != d {
        return Err(FinslerError::Structural(format!(
            "expected real dimension {d}, got point {} vector {}",
            x.len(),
            u.len()
        )));
    }
    if !m.in_domain(x) {
        return Err(FinslerError::Domain(format!("{x:?}")));
    }
    check_slit(euclidean_norm(u), 1.0)?;
    let mut vals = x.to_vec();
    vals.extend_from_slice(u);
    let jets = lift_all(&vals, order);
    m.eval(&jets[..d], &jets[d..])
}

pub fn real_metric_value(m: &dyn RealMetric, x: &[f64], u: &[f64]) -> Result<f64> {
    if !m.in_domain(x) {
        return Err(FinslerError::Domain(format!("{x:?}")));
    }
    let c = |s: &[f64]| -> Vec<Jet> { s.iter().map(|&a| Jet::constant(1, 0, a)).collect() };
    Ok(m.eval(&c(x), &c(u))?.value())
}

/// `G^o(x; u) = G(z(x); u_o)`, the real metric underlying a complex one.
#[derive(Debug, Clone)]
pub struct Realified {
    pub inner: Arc<dyn ComplexMetric>,
}

impl Realified {
    pub fn new(inner: Arc<dyn ComplexMetric>) -> Self {
        Realified { inner }
    }
}

impl RealMetric for Realified {
    fn dim(&self) -> usize {
        2 * self.inner.dim()
    }

    fn eval(&self, x: &[Jet], u: &[Jet]) -> Result<Jet> {
        // the (1,0)-part of u has exactly the real/imaginary blocks of u
        self.inner.eval(x, u)
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        real_to_complex(x)
            .map(|z| self.inner.in_domain(&z))
            .unwrap_or(false)
    }
}

pub fn realify(m: Arc<dyn ComplexMetric>) -> Realified {
    Realified::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_vectors() {
        let t = RealTangent {
            x: vec![0.0; 4],
            u: vec![1.0, 0.0, 0.0, 0.0],
        };
        let c = to_complex(&t).unwrap();
        assert_eq!(c.v, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let ju = RealTangent {
            x: vec![0.0; 4],
            u: apply_j(&t.u),
        };
        assert_eq!(ju.u, vec![0.0, 0.0, 1.0, 0.0]);
        let c = to_complex(&ju).unwrap();
        assert_eq!(c.v[0], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn i_times_frame_is_j_of_frame() {
        let c = ComplexTangent {
            z: vec![Complex64::new(0.0, 0.0)],
            v: vec![Complex64::new(0.0, 1.0)],
        };
        assert_eq!(to_real(&c).u, apply_j(&[1.0, 0.0]));
    }

    #[test]
    fn j_squared_is_minus_identity() {
        let u = [0.3, -1.2, 4.0, 0.25, 9.0, -2.0];
        let jj = apply_j(&apply_j(&u));
        for (a, b) in u.iter().zip(&jj) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn odd_dimension_rejected() {
        let t = RealTangent {
            x: vec![0.0; 3],
            u: vec![1.0; 3],
        };
        assert!(matches!(to_complex(&t), Err(FinslerError::Structural(_))));
    }

    #[test]
    fn slit_guard() {
        assert!(check_slit(1e-9, 1.0).is_err());
        assert!(check_slit(1e-7, 1.0).is_ok());
    }
}
