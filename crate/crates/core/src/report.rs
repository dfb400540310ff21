//! Sampling plans and verification reports shared by every checker.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Where and how densely to sample `(z, v)`.
///
/// Radii are fractions of the metric's domain radius (or absolute radii for
/// unbounded domains, see [`SamplePlan::radius_for`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplePlan {
    pub seed: u64,
    pub points: usize,
    pub directions: usize,
    pub radius_min: f64,
    pub radius_max: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            seed: 7,
            points: 12,
            directions: 17,
            radius_min: 0.05,
            radius_max: 0.95,
        }
    }
}

impl SamplePlan {
    /// Absolute radius range for a domain of radius `domain` (infinite domains
    /// use the fractions as absolute radii).
    pub fn radius_for(&self, domain: f64) -> (f64, f64) {
        if domain.is_finite() {
            (self.radius_min * domain, self.radius_max * domain)
        } else {
            (self.radius_min, self.radius_max)
        }
    }

    /// Points in the annulus `radius_min <= |z| <= radius_max` of `C^n`.
    pub fn points(&self, n: usize, domain: f64) -> Vec<Vec<Complex64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (lo, hi) = self.radius_for(domain);
        (0..self.points)
            .map(|_| {
                let dir = random_unit(&mut rng, 2 * n);
                let r = lo + (hi - lo) * rng.random::<f64>();
                to_c(&dir.iter().map(|d| d * r).collect::<Vec<_>>())
            })
            .collect()
    }

    /// Random unit directions in `C^n` from the same seed stream (offset).
    pub fn random_directions(&self, n: usize, count: usize) -> Vec<Vec<Complex64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        (0..count).map(|_| to_c(&random_unit(&mut rng, 2 * n))).collect()
    }

    /// Deterministic direction fan of `self.directions` unit vectors in `C^n`.
    pub fn fan(&self, n: usize) -> Vec<Vec<Complex64>> {
        sphere_lattice(2 * n, self.directions)
            .iter()
            .map(|u| to_c(u))
            .collect()
    }
}

fn to_c(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|a| Complex64::new(x[a], x[n + a])).collect()
}

pub fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                // Box-Muller
                let u1: f64 = rng.random::<f64>().max(1e-300);
                let u2: f64 = rng.random::<f64>();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// Quasi-uniform unit vectors on the sphere `S^{dim-1}`.
///
/// Equal angles on the circle, the golden-angle (Fibonacci) spiral on `S^2`,
/// and normalised Halton points pushed through the Gaussian quantile above.
pub fn sphere_lattice(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => (0..count)
            .map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let y = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - y * y).sqrt();
                    let th = golden * k as f64;
                    vec![r * th.cos(), y, r * th.sin()]
                })
                .collect()
        }
        _ => {
            const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
            (0..count)
                .map(|k| {
                    let v: Vec<f64> = (0..dim)
                        .map(|d| normal_quantile(halton(k as u64 + 1, PRIMES[d % 12])))
                        .collect();
                    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
                    v.into_iter().map(|a| a / n).collect()
                })
                .collect()
        }
    }
}

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

// Acklam-style rational approximation; only used to spread lattice points.
fn normal_quantile(p: f64) -> f64 {
    let p = p.clamp(1e-9, 1.0 - 1e-9);
    let t = if p < 0.5 { (-2.0 * p.ln()).sqrt() } else { (-2.0 * (1.0 - p).ln()).sqrt() };
    let x = t - (2.515517 + 0.802853 * t + 0.010328 * t * t)
        / (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
    if p < 0.5 {
        -x
    } else {
        x
    }
}

/// One checked sample of an inequality or identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed slack: positive means the check holds with room to spare.
    pub margin: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl SampleRecord {
    /// Identity check `|lhs - rhs| <= tol`.
    pub fn identity(point: Vec<f64>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = tol - (lhs - rhs).abs();
        SampleRecord {
            point,
            lhs,
            rhs,
            margin,
            passed: margin >= 0.0,
            error: None,
        }
    }

    /// Inequality check `lhs <= rhs + tol`.
    pub fn upper(point: Vec<f64>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        SampleRecord {
            point,
            lhs,
            rhs,
            margin,
            passed: margin >= -tol,
            error: None,
        }
    }

    pub fn failed(point: Vec<f64>, error: impl ToString) -> Self {
        SampleRecord {
            point,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            passed: false,
            error: Some(error.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub tolerance: f64,
    pub samples: Vec<SampleRecord>,
    /// Largest `|lhs - rhs|` (identities) or largest violation (inequalities).
    pub worst: f64,
    pub passed: bool,
}

impl VerificationReport {
    pub fn from_samples(name: impl Into<String>, tolerance: f64, samples: Vec<SampleRecord>) -> Self {
        let worst = samples
            .iter()
            .map(|s| {
                if s.error.is_some() {
                    f64::INFINITY
                } else {
                    (s.lhs - s.rhs).abs()
                }
            })
            .fold(0.0, f64::max);
        let passed = !samples.is_empty() && samples.iter().all(|s| s.passed);
        VerificationReport {
            name: name.into(),
            tolerance,
            samples,
            worst,
            passed,
        }
    }

    pub fn min_margin(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.margin)
            .filter(|m| m.is_finite())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_is_deterministic() {
        let p = SamplePlan::default();
        assert_eq!(p.points(2, 1.0), p.points(2, 1.0));
        for z in p.points(2, 1.0) {
            let r = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((0.05 - 1e-12..=0.95 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn lattice_is_unit() {
        for dim in 1..6 {
            for u in sphere_lattice(dim, 17) {
                let n: f64 = u.iter().map(|a| a * a).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn report_aggregates() {
        let r = VerificationReport::from_samples(
            "t",
            1e-3,
            vec![
                SampleRecord::identity(vec![], 1.0, 1.0005, 1e-3),
                SampleRecord::upper(vec![], 2.0, 1.0, 1e-3),
            ],
        );
        assert!(!r.passed);
        assert!((r.worst - 1.0).abs() < 1e-12);
    }
}
