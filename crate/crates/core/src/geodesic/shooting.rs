//! Boundary-value geodesics and derived quantities of the distance function.

use super::*;
use crate::report::SampleRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceOptions {
    /// Accept when `|exp_p(w) - q| < tol * max(1, |q|)`.
    pub tol: f64,
    pub max_newton: usize,
    pub restarts: usize,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            tol: 1e-8,
            max_newton: 40,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub rho: f64,
    /// Initial velocity with `exp_p(w) = q`.
    pub w: Vec<f64>,
    /// Unit tangent `T` of the connecting geodesic at `q`.
    pub tangent: Vec<f64>,
    pub residual: f64,
    pub restarts: usize,
}

struct Shot {
    end: Vec<f64>,
    velocity: Vec<f64>,
    jac: DMatrix<f64>,
}

fn shoot(m: &dyn RealMetric, p: &[f64], w: &[f64]) -> Result<Shot> {
    let d = p.len();
    let seeds: Vec<_> = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            (vec![0.0; d], e)
        })
        .collect();
    let f = flow(m, p, w, 1.0, 1, &seeds)?;
    if f.path.truncated {
        return Err(FinslerError::Domain("shooting geodesic left the domain".into()));
    }
    let end = f.path.end();
    Ok(Shot {
        end: end.x.clone(),
        velocity: end.u.clone(),
        jac: DMatrix::from_fn(d, d, |i, k| f.fields[k].value[1][i]),
    })
}

fn mismatch(s: &Shot, q: &[f64]) -> (DVector<f64>, f64) {
    let f = DVector::from_iterator(q.len(), s.end.iter().zip(q).map(|(a, b)| a - b));
    let n = f.norm();
    (f, n)
}

/// Damped Newton on `exp_p(w) = q`.
fn newton(m: &dyn RealMetric, p: &[f64], q: &[f64], w0: &[f64], opts: &DistanceOptions) -> Result<(Vec<f64>, Shot, f64)> {
    let mut w = w0.to_vec();
    let mut shot = shoot(m, p, &w)?;
    let (mut f, mut res) = mismatch(&shot, q);
    let floor = 1e-13 * euclidean_norm(q).max(1.0);
    for _ in 0..opts.max_newton {
        if res < floor {
            break;
        }
        let step = solve(&shot.jac, &(-&f))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<f64> = w.iter().zip(step.iter()).map(|(a, b)| a + lambda * b).collect();
            if let Ok(s) = shoot(m, p, &trial) {
                let (f2, r2) = mismatch(&s, q);
                if r2 < res {
                    w = trial;
                    shot = s;
                    f = f2;
                    res = r2;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((w, shot, res))
}

/// Length of the straight polyline from `p` to `q` (midpoint rule on
/// `segments` pieces), an upper bound for the distance up to quadrature.
pub fn polyline_length(m: &dyn RealMetric, p: &[f64], q: &[f64], segments: usize) -> Result<f64> {
    let step: Vec<f64> = p.iter().zip(q).map(|(a, b)| (b - a) / segments as f64).collect();
    let mut len = 0.0;
    for k in 0..segments {
        let s = (k as f64 + 0.5) / segments as f64;
        let mid: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + s * (b - a)).collect();
        len += real_metric_value(m, &mid, &step)?.sqrt();
    }
    Ok(len)
}

pub fn distance(m: &dyn RealMetric, p: &[f64], q: &[f64]) -> Result<DistanceResult> {
    distance_with(m, p, q, None, &DistanceOptions::default())
}

/// Shooting for the normal geodesic from `p` to `q`.
///
/// Starts from `guess` (if any), then the chord `q - p`, then a lattice of
/// directions with the chord's length.
pub fn distance_with(
    m: &dyn RealMetric,
    p: &[f64],
    q: &[f64],
    guess: Option<&[f64]>,
    opts: &DistanceOptions,
) -> Result<DistanceResult> {
    let d = m.dim();
    let chord: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let len = euclidean_norm(&chord);
    if len < SLIT_EPS {
        return Err(FinslerError::Domain("target coincides with the pole".into()));
    }
    let mut starts: Vec<Vec<f64>> = guess.into_iter().map(<[f64]>::to_vec).collect();
    starts.push(chord.clone());
    starts.extend(sphere_lattice(d, opts.restarts).into_iter().map(|e| e.iter().map(|a| a * len).collect()));
    let accept = opts.tol * euclidean_norm(q).max(1.0);
    let mut best = f64::INFINITY;
    for (k, w0) in starts.iter().enumerate() {
        let Ok((w, shot, res)) = newton(m, p, q, w0, opts) else {
            continue;
        };
        if res < accept {
            let rho = real_metric_value(m, p, &w)?.sqrt();
            return Ok(DistanceResult {
                rho,
                tangent: shot.velocity.iter().map(|a| a / rho).collect(),
                w,
                residual: res,
                restarts: k,
            });
        }
        best = best.min(res);
    }
    Err(FinslerError::Shooting {
        restarts: starts.len(),
        best_residual: best,
        upper_bound: polyline_length(m, p, q, 256).ok(),
    })
}

/// `ℓ(T) = g_T(T, ·) = ½ dG/du (x, T)`.
pub fn legendre_dual(m: &dyn RealMetric, x: &[f64], t: &[f64]) -> Result<Vec<f64>> {
    let d = m.dim();
    let jet = real_metric_jet(m, x, t, 1)?;
    Ok((0..d).map(|i| 0.5 * jet.d1(d + i)).collect())
}

/// `∇̂f = ℓ^{-1}(df)`: solves `½ dG/du (x, Y) = df` by Newton's method.
pub fn legendre_gradient(m: &dyn RealMetric, x: &[f64], df: &[f64]) -> Result<Vec<f64>> {
    let d = m.dim();
    let scale = euclidean_norm(df);
    if scale < 1e-14 {
        return Err(FinslerError::Newton("differential vanishes".into()));
    }
    let eval = |y: &[f64]| -> Result<(DVector<f64>, DMatrix<f64>)> {
        let jet = real_metric_jet(m, x, y, 2)?;
        let r = DVector::from_fn(d, |i, _| 0.5 * jet.d1(d + i) - df[i]);
        let g = DMatrix::from_fn(d, d, |i, j| 0.5 * jet.d2(d + i, d + j));
        Ok((r, g))
    };
    // Euclidean dual as the starting point, then one metric-weighted correction
    let (_, g0) = eval(df)?;
    let mut y: Vec<f64> = solve(&g0, &DVector::from_column_slice(df))?.iter().copied().collect();
    let (mut r, mut g) = eval(&y)?;
    for _ in 0..60 {
        if r.norm() < 1e-13 * scale.max(1.0) {
            break;
        }
        let step = solve(&g, &(-&r))?;
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..20 {
            let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, b)| a + lambda * b).collect();
            if let Ok((r2, g2)) = eval(&trial) {
                if r2.norm() < r.norm() {
                    y = trial;
                    r = r2;
                    g = g2;
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if r.norm() > 1e-10 * scale.max(1.0) {
        return Err(FinslerError::Newton(format!("Legendre residual {:e}", r.norm())));
    }
    Ok(y)
}

/// Fourth-order central-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let at = |s: f64| {
            let mut y = x.to_vec();
            y[k] += s * h;
            f(&y)
        };
        out.push((8.0 * (at(1.0)? - at(-1.0)?) - (at(2.0)? - at(-2.0)?)) / (12.0 * h));
    }
    Ok(out)
}

/// `dρ(x)` by differencing shot distances, warm-started from `base`.
pub fn distance_differential(m: &dyn RealMetric, p: &[f64], x: &[f64], base: &DistanceResult) -> Result<Vec<f64>> {
    let h = 1e-3 * base.rho.min(1.0);
    let opts = DistanceOptions::default();
    fd_gradient(|y| Ok(distance_with(m, p, y, Some(&base.w), &opts)?.rho), x, h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianRho {
    pub rho: f64,
    /// Second differences of `dρ` plus the connection correction.
    pub via_connection: f64,
    /// `I(J, J)` for the Jacobi field with `J(0) = 0`, `J(ρ) = u`.
    pub via_index_form: f64,
    pub index_error: f64,
    pub agreement: f64,
    /// `dρ(u) = g_T(T, u)`.
    pub radial: f64,
}

pub const HESSIAN_AGREEMENT: f64 = 1e-4;

/// Intervals used along the radial geodesic for the index-form route.
pub const HESSIAN_INTERVALS: usize = 128;

/// `H(ρ)(u, u)` at `x` for the distance from `p`, computed two ways.
pub fn hessian_rho(m: &dyn RealMetric, p: &[f64], x: &[f64], u: &[f64]) -> Result<HessianRho> {
    let d = m.dim();
    let base = distance(m, p, x)?;
    let opts = DistanceOptions::default();
    let tangent = &base.tangent;

    let du = |y: &[f64]| -> Result<f64> {
        let r = distance_with(m, p, y, Some(&base.w), &opts)?;
        let l = legendre_dual(m, y, &r.tangent)?;
        Ok(l.iter().zip(u).map(|(a, b)| a * b).sum())
    };
    let along = |s: f64| -> Vec<f64> { x.iter().zip(u).map(|(a, b)| a + s * b).collect() };
    let h = 2e-3 * base.rho.min(1.0) / euclidean_norm(u);
    let diff = |h: f64| -> Result<f64> { Ok((du(&along(h))? - du(&along(-h))?) / (2.0 * h)) };
    let second = (4.0 * diff(h / 2.0)? - diff(h)?) / 3.0;
    let c = cartan(m, x, tangent)?;
    let drho = legendre_dual(m, x, tangent)?;
    let mut corr = 0.0;
    for k in 0..d {
        for j in 0..d {
            for i in 0..d {
                corr += c.christoffel[k][j][i] * u[i] * u[j] * drho[k];
            }
        }
    }
    let via_connection = second - corr;

    let t0: Vec<f64> = base.w.iter().map(|a| a / base.rho).collect();
    let seeds: Vec<_> = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            (vec![0.0; d], e)
        })
        .collect();
    let fl = flow(m, p, &t0, base.rho, HESSIAN_INTERVALS, &seeds)?;
    let fr = frames(m, &fl.path)?;
    let a = DMatrix::from_fn(d, d, |i, k| fl.fields[k].value[HESSIAN_INTERVALS][i]);
    let target = project(&fr[HESSIAN_INTERVALS], u);
    let coef = solve(&a, &DVector::from_column_slice(&target))?;
    let jf = FieldSamples::combine(&fl.fields, coef.as_slice());
    let ix = index_form_with(&fr, &fl.path, &jf, &jf)?;

    Ok(HessianRho {
        rho: base.rho,
        via_connection,
        via_index_form: ix.value,
        index_error: ix.error_estimate,
        agreement: (via_connection - ix.value).abs(),
        radial: drho.iter().zip(u).map(|(a, b)| a * b).sum(),
    })
}

/// `g_T(∇̂ρ², T)` against `2ρ`, with `∇̂ρ²` from differenced distances.
pub fn radial_gradient_identity(m: &dyn RealMetric, p: &[f64], x: &[f64], tol: f64) -> Result<SampleRecord> {
    let base = distance(m, p, x)?;
    let dr = distance_differential(m, p, x, &base)?;
    let d_rho2: Vec<f64> = dr.iter().map(|a| 2.0 * base.rho * a).collect();
    let grad = legendre_gradient(m, x, &d_rho2)?;
    let l = legendre_dual(m, x, &base.tangent)?;
    let lhs: f64 = l.iter().zip(&grad).map(|(a, b)| a * b).sum();
    let rhs = 2.0 * base.rho;
    Ok(SampleRecord::identity(x.to_vec(), lhs / rhs, 1.0, tol))
}

/// Gauss lemma: `g_T(u, T)` for `u` tangent to the geodesic sphere through
/// `x`, where tangency is taken from the differenced `dρ`.
pub fn gauss_lemma_residual(m: &dyn RealMetric, p: &[f64], x: &[f64], u: &[f64]) -> Result<f64> {
    let base = distance(m, p, x)?;
    let dr = distance_differential(m, p, x, &base)?;
    let along: f64 = dr.iter().zip(u).map(|(a, b)| a * b).sum();
    let tan: Vec<f64> = u.iter().zip(&base.tangent).map(|(a, t)| a - along * t).collect();
    let l = legendre_dual(m, x, &base.tangent)?;
    let pairing: f64 = l.iter().zip(&tan).map(|(a, b)| a * b).sum();
    Ok(pairing.abs() / euclidean_norm(&tan))
}

/// `D²ρ²(u, u) <= 2(2 + ρK)` for `g_T`-unit `u`.
pub fn rho2_hessian_bound(m: &dyn RealMetric, p: &[f64], x: &[f64], u: &[f64], k: f64, tol: f64) -> Result<SampleRecord> {
    let (h, _) = hessian_rho_bound(m, p, x, u, k, tol)?;
    Ok(rho2_record(x, &h, k, tol))
}

/// The `D²ρ²` bound from an already computed `g_T`-unit Hessian.
pub fn rho2_record(x: &[f64], h: &HessianRho, k: f64, tol: f64) -> SampleRecord {
    let lhs = 2.0 * h.rho * h.via_index_form + 2.0 * h.radial * h.radial;
    SampleRecord::upper(x.to_vec(), lhs, 2.0 * (2.0 + h.rho * k), tol)
}

/// `H(ρ)(u, u) <= 1/ρ + K` for `g_T`-unit `u`.
pub fn hessian_rho_bound(m: &dyn RealMetric, p: &[f64], x: &[f64], u: &[f64], k: f64, tol: f64) -> Result<(HessianRho, SampleRecord)> {
    let base = distance(m, p, x)?;
    let c = cartan(m, x, &base.tangent)?;
    let n = c.inner(u, u).sqrt();
    let unit: Vec<f64> = u.iter().map(|a| a / n).collect();
    let h = hessian_rho(m, p, x, &unit)?;
    let rec = SampleRecord::upper(x.to_vec(), h.via_index_form, 1.0 / h.rho + k, tol);
    Ok((h, rec))
}
