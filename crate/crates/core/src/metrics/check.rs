//! Pointwise validity checks: pseudoconvexity, convexity, homogeneity, Euler identities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::MetricDef;
use crate::error::{FinslerError, Result};
use crate::exec;
use crate::geometry::{check_slit, complex_metric_value, complex_norm, complex_to_real, ComplexMetric};
use crate::jet::lift;
use crate::linalg::{min_eigen_hermitian, min_eigen_symmetric};
use crate::report::{SamplePlan, SampleRecord, VerificationReport};

/// Vertical derivatives of `G` at one `(z, v)`.
#[derive(Debug, Clone)]
pub struct VerticalData {
    pub g: f64,
    /// `G_a = dG/dv^a`.
    pub grad: Vec<Complex64>,
    /// `G_{a b-bar}`.
    pub levi: DMatrix<Complex64>,
    /// `G_{ab}`.
    pub holo: DMatrix<Complex64>,
    /// `g_ij = 1/2 d^2 G / du^i du^j` of the realified metric.
    pub real: DMatrix<f64>,
}

pub fn vertical_data(m: &dyn ComplexMetric, z: &[Complex64], v: &[Complex64]) -> Result<VerticalData> {
    let n = m.dim();
    if z.len() != n || v.len() != n {
        return Err(FinslerError::Structural("dimension mismatch".into()));
    }
    if !m.in_domain(z) {
        return Err(FinslerError::Domain(format!("{z:?}")));
    }
    check_slit(complex_norm(v), 1.0)?;
    let mut vals = complex_to_real(z);
    vals.extend(complex_to_real(v));
    let active: Vec<usize> = (2 * n..4 * n).collect();
    let jets = lift(&vals, &active, 2)?;
    let jet = m.eval(&jets[..2 * n], &jets[2 * n..])?;
    let (p, q) = (|a: usize| a, |a: usize| n + a);
    let i = Complex64::new(0.0, 1.0);
    let grad = (0..n)
        .map(|a| Complex64::new(jet.d1(p(a)), -jet.d1(q(a))) * 0.5)
        .collect();
    let levi = DMatrix::from_fn(n, n, |a, b| {
        let re = jet.d2(p(a), p(b)) + jet.d2(q(a), q(b));
        let im = jet.d2(p(a), q(b)) - jet.d2(q(a), p(b));
        (Complex64::new(re, 0.0) + i * im) * 0.25
    });
    let holo = DMatrix::from_fn(n, n, |a, b| {
        let re = jet.d2(p(a), p(b)) - jet.d2(q(a), q(b));
        let im = jet.d2(p(a), q(b)) + jet.d2(q(a), p(b));
        (Complex64::new(re, 0.0) - i * im) * 0.25
    });
    let real = DMatrix::from_fn(2 * n, 2 * n, |a, b| 0.5 * jet.d2(a, b));
    Ok(VerticalData {
        g: jet.value(),
        grad,
        levi,
        holo,
        real,
    })
}

/// `G_{a b-bar}(z; v)`.
pub fn levi_matrix(m: &dyn ComplexMetric, z: &[Complex64], v: &[Complex64]) -> Result<DMatrix<Complex64>> {
    Ok(vertical_data(m, z, v)?.levi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCheck {
    pub levi_min_eigenvalue: f64,
    pub convex_min_eigenvalue: f64,
    pub pseudoconvex: bool,
    pub strongly_convex: bool,
    pub levi: VerificationReport,
    pub convexity: VerificationReport,
    pub positivity: VerificationReport,
    pub homogeneity: VerificationReport,
    pub euler: VerificationReport,
    pub realification: VerificationReport,
    pub passed: bool,
}

const HOMOGENEITY_TOL: f64 = 1e-10;
const EULER_TOL: f64 = 1e-10;
const PAIRING_TOL: f64 = 1e-8;

struct Sample {
    point: Vec<f64>,
    z: Vec<Complex64>,
    v: Vec<Complex64>,
    w: Vec<Complex64>,
}

#[derive(Default)]
struct Records {
    levi: Vec<SampleRecord>,
    convex: Vec<SampleRecord>,
    positive: Vec<SampleRecord>,
    homog: Vec<SampleRecord>,
    euler: Vec<SampleRecord>,
    pairing: Vec<SampleRecord>,
}

fn check_one(m: &dyn ComplexMetric, s: &Sample) -> Records {
    let mut r = Records::default();
    let pt = || s.point.clone();
    let d = match vertical_data(m, &s.z, &s.v) {
        Ok(d) => d,
        Err(e) => {
            for list in [&mut r.levi, &mut r.convex, &mut r.positive, &mut r.homog, &mut r.euler, &mut r.pairing] {
                list.push(SampleRecord::failed(pt(), &e));
            }
            return r;
        }
    };
    let strict = |lhs: f64, point: Vec<f64>| {
        let mut rec = SampleRecord::upper(point, 0.0, lhs, 0.0);
        rec.passed = lhs > 0.0;
        rec
    };
    r.levi.push(strict(min_eigen_hermitian(&d.levi), pt()));
    r.convex.push(strict(min_eigen_symmetric(&d.real), pt()));
    r.positive.push(strict(d.g, pt()));

    let scale = d.g.abs().max(f64::MIN_POSITIVE);
    for zeta in [
        Complex64::from_polar(2.5, 0.7),
        Complex64::from_polar(0.3, -2.0),
        Complex64::new(-1.7, 0.0),
    ] {
        let zv: Vec<Complex64> = s.v.iter().map(|c| c * zeta).collect();
        match complex_metric_value(m, &s.z, &zv) {
            Ok(gz) => {
                let k = zeta.norm_sqr();
                r.homog
                    .push(SampleRecord::identity(pt(), gz / k, d.g, HOMOGENEITY_TOL * scale));
            }
            Err(e) => r.homog.push(SampleRecord::failed(pt(), e)),
        }
    }

    let n = s.v.len();
    let gv: Complex64 = (0..n).map(|a| d.grad[a] * s.v[a]).sum();
    let vbar: Vec<Complex64> = s.v.iter().map(|c| c.conj()).collect();
    let lv: Complex64 = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| d.levi[(a, b)] * s.v[a] * vbar[b])
        .sum();
    let u = complex_to_real(&s.v);
    let gu: f64 = (0..2 * n)
        .flat_map(|i| (0..2 * n).map(move |j| (i, j)))
        .map(|(i, j)| d.real[(i, j)] * u[i] * u[j])
        .sum();
    let tol = EULER_TOL * scale;
    r.euler.push(SampleRecord::identity(pt(), gv.re, d.g, tol));
    r.euler.push(SampleRecord::identity(pt(), gv.im, 0.0, tol));
    r.euler.push(SampleRecord::identity(pt(), lv.re, d.g, tol));
    r.euler.push(SampleRecord::identity(pt(), gu, d.g, tol));

    // <V^o | W^o> = Re[<V, W> + <<V, W>>] with V = v, W = w
    let wr = complex_to_real(&s.w);
    let lhs: f64 = (0..2 * n)
        .flat_map(|i| (0..2 * n).map(move |j| (i, j)))
        .map(|(i, j)| d.real[(i, j)] * u[i] * wr[j])
        .sum();
    let mut herm = Complex64::new(0.0, 0.0);
    let mut sym = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            herm += d.levi[(a, b)] * s.v[a] * s.w[b].conj();
            sym += d.holo[(a, b)] * s.v[a] * s.w[b];
        }
    }
    let rhs = (herm + sym).re;
    let size = d.real.iter().map(|x| x.abs()).fold(0.0, f64::max)
        * complex_norm(&s.v)
        * complex_norm(&s.w);
    r.pairing
        .push(SampleRecord::identity(pt(), lhs, rhs, PAIRING_TOL * size.max(1e-300)));
    r
}

/// Samples `(z, v)` from `plan` and checks the metric axioms numerically.
pub fn check_metric(def: &MetricDef, plan: &SamplePlan) -> MetricCheck {
    let n = def.dim();
    let points = plan.points(n, def.domain());
    let dirs = plan.fan(n);
    let partners = plan.random_directions(n, dirs.len().max(1));
    let per_point = dirs.len().clamp(1, 4);
    let mut samples = Vec::new();
    for (pi, z) in points.iter().enumerate() {
        for k in 0..per_point {
            let j = (pi * per_point + k) % dirs.len();
            let v = dirs[j].clone();
            let w = partners[j % partners.len()].clone();
            let mut point = complex_to_real(z);
            point.extend(complex_to_real(&v));
            samples.push(Sample { point, z: z.clone(), v, w });
        }
    }
    let m = def.metric.as_ref();
    let results = exec::map(&samples, |s| check_one(m, s));
    let mut all = Records::default();
    for r in results {
        all.levi.extend(r.levi);
        all.convex.extend(r.convex);
        all.positive.extend(r.positive);
        all.homog.extend(r.homog);
        all.euler.extend(r.euler);
        all.pairing.extend(r.pairing);
    }
    let min_lhs = |v: &[SampleRecord]| {
        v.iter()
            .map(|s| s.rhs)
            .filter(|x| x.is_finite())
            .fold(f64::INFINITY, f64::min)
    };
    let levi_min = min_lhs(&all.levi);
    let convex_min = min_lhs(&all.convex);
    let levi = VerificationReport::from_samples("levi_positive", 0.0, all.levi);
    let convexity = VerificationReport::from_samples("real_hessian_positive", 0.0, all.convex);
    let positivity = VerificationReport::from_samples("positivity", 0.0, all.positive);
    let homogeneity = VerificationReport::from_samples("homogeneity", HOMOGENEITY_TOL, all.homog);
    let euler = VerificationReport::from_samples("euler_identities", EULER_TOL, all.euler);
    let realification = VerificationReport::from_samples("realified_pairing", PAIRING_TOL, all.pairing);
    let passed = levi.passed && positivity.passed && homogeneity.passed && euler.passed && realification.passed;
    MetricCheck {
        levi_min_eigenvalue: levi_min,
        convex_min_eigenvalue: convex_min,
        pseudoconvex: levi.passed,
        strongly_convex: convexity.passed,
        levi,
        convexity,
        positivity,
        homogeneity,
        euler,
        realification,
        passed,
    }
}
