//! Finite-difference oracles shared by unit tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type C = Complex64;

/// Five-point central difference of a matrix-valued function along `dir`.
pub fn fd_dir<F>(f: &F, x: &[C], dir: &[C], h: f64) -> DMatrix<C>
where
    F: Fn(&[C]) -> DMatrix<C>,
{
    let at = |t: f64| {
        let y: Vec<C> = x.iter().zip(dir).map(|(a, d)| a + d * t).collect();
        f(&y)
    };
    (at(-2.0 * h) - at(2.0 * h) + (at(h) - at(-h)) * C::new(8.0, 0.0)) / C::new(12.0 * h, 0.0)
}

/// Wirtinger derivative along coordinate `k` (`anti` for the conjugate).
pub fn fd_wirtinger<F>(f: &F, x: &[C], k: usize, anti: bool, h: f64) -> DMatrix<C>
where
    F: Fn(&[C]) -> DMatrix<C>,
{
    let mut e = vec![C::new(0.0, 0.0); x.len()];
    e[k] = C::new(1.0, 0.0);
    let dx = fd_dir(f, x, &e, h);
    e[k] = C::new(0.0, 1.0);
    let dy = fd_dir(f, x, &e, h);
    let s = if anti { 0.5 } else { -0.5 };
    dx * C::new(0.5, 0.0) + dy * C::new(0.0, s)
}

/// Sectional curvature of `span{a, b}` for a Riemannian metric `g(x)`,
/// from finite-difference Christoffel symbols.
pub fn riemannian_sectional<F>(g: &F, x: &[f64], a: &[f64], b: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> DMatrix<f64>,
{
    let d = x.len();
    let shift = |p: &[f64], k: usize, t: f64| {
        let mut q = p.to_vec();
        q[k] += t;
        q
    };
    let dg = |p: &[f64], k: usize| {
        (g(&shift(p, k, -2.0 * h)) - g(&shift(p, k, 2.0 * h)) + (g(&shift(p, k, h)) - g(&shift(p, k, -h))) * 8.0)
            / (12.0 * h)
    };
    // gamma[l][i][j] = Γ^l_{ij}
    let christoffel = |p: &[f64]| {
        let gi = g(p).try_inverse().unwrap();
        let der: Vec<DMatrix<f64>> = (0..d).map(|k| dg(p, k)).collect();
        let mut out = vec![vec![vec![0.0; d]; d]; d];
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    out[l][i][j] = (0..d)
                        .map(|m| 0.5 * gi[(l, m)] * (der[i][(m, j)] + der[j][(m, i)] - der[m][(i, j)]))
                        .sum();
                }
            }
        }
        out
    };
    let gam = christoffel(x);
    let hh = 10.0 * h;
    let dgam: Vec<_> = (0..d)
        .map(|k| {
            let p = [-2.0, -1.0, 1.0, 2.0].map(|s| christoffel(&shift(x, k, s * hh)));
            let w = [1.0, -8.0, 8.0, -1.0];
            let mut out = vec![vec![vec![0.0; d]; d]; d];
            for l in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        out[l][i][j] = (0..4).map(|s| w[s] * p[s][l][i][j]).sum::<f64>() / (12.0 * hh);
                    }
                }
            }
            out
        })
        .collect();
    // R^l_{ijk} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik}
    let gx = g(x);
    let mut num = 0.0;
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut r = dgam[i][l][j][k] - dgam[j][l][i][k];
                    for m in 0..d {
                        r += gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k];
                    }
                    // g(R(a, b) b, a)
                    let lower: f64 = (0..d).map(|q| gx[(q, l)] * a[q]).sum();
                    num += r * a[i] * b[j] * b[k] * lower;
                }
            }
        }
    }
    let ip = |p: &[f64], q: &[f64]| (DVector::from_column_slice(p).transpose() * &gx * DVector::from_column_slice(q))[0];
    num / (ip(a, a) * ip(b, b) - ip(a, b).powi(2))
}
