//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients of a scalar function of `nvars`
//! real variables up to total degree `order <= 4`. Monomials are kept in graded
//! order, so the coefficient vector of a lower-order jet is a prefix of the
//! higher-order one; this is what lets jets of different orders be combined
//! (the result carries the smaller order) and lets [`Jet::derivative`] hand
//! back an exact jet of one order less.
//!
//! Coefficients are Taylor coefficients `f_a / a!`. Use [`Jet::partial`] for
//! the mixed partial derivative itself.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_traits::NumAssign;

use crate::error::{FinslerError, Result};

pub const MAX_ORDER: usize = 4;

/// Coefficient field of a jet: `f64` or `Complex64`.
pub trait Scalar:
    Copy + Debug + PartialEq + Send + Sync + 'static + NumAssign + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
}

/// Monomial bookkeeping shared by every jet with the same `(nvars, order)`.
#[derive(Debug)]
pub struct Layout {
    nvars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)`: monomial `i` times monomial `j` is monomial `k`.
    products: Vec<(u32, u32, u32)>,
    /// Factorial weight `a!` of each monomial.
    weight: Vec<f64>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Layout {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        for deg in 0..=order {
            let mut cur = vec![0u8; nvars];
            push_degree(&mut exponents, &mut cur, 0, deg);
        }
        let degree: Vec<u8> = exponents.iter().map(|e| e.iter().sum()).collect();
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        // prefix length for monomials of degree <= d
        let mut upto = vec![0usize; order + 1];
        for (d, slot) in upto.iter_mut().enumerate() {
            *slot = degree.iter().filter(|&&g| g as usize <= d).count();
        }
        let mut products = Vec::new();
        let mut sum = vec![0u8; nvars];
        for (i, a) in exponents.iter().enumerate() {
            let rest = order - degree[i] as usize;
            for (j, b) in exponents.iter().enumerate().take(upto[rest]) {
                for v in 0..nvars {
                    sum[v] = a[v] + b[v];
                }
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        let weight = exponents
            .iter()
            .map(|e| e.iter().map(|&k| factorial(k as usize)).product())
            .collect();
        Layout {
            nvars,
            order,
            exponents,
            index,
            products,
            weight,
        }
    }

    pub fn get(nvars: usize, order: usize) -> Arc<Layout> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(Layout::build(nvars, order)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exponents[i]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, var: usize, remaining: usize) {
    if var + 1 == cur.len() {
        cur[var] = remaining as u8;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=remaining).rev() {
        cur[var] = k as u8;
        push_degree(out, cur, var + 1, remaining - k);
    }
    cur[var] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Truncated Taylor expansion of a scalar function.
#[derive(Clone)]
pub struct Jet<T: Scalar = f64> {
    layout: Arc<Layout>,
    coeffs: Vec<T>,
}

impl<T: Scalar> Debug for Jet<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.layout.nvars)
            .field("order", &self.layout.order)
            .field("value", &self.coeffs[0])
            .finish()
    }
}

pub type CJet = Jet<Complex64>;

impl<T: Scalar> Jet<T> {
    pub fn constant(nvars: usize, order: usize, value: T) -> Self {
        let layout = Layout::get(nvars, order);
        let mut coeffs = vec![T::zero(); layout.len()];
        coeffs[0] = value;
        Jet { layout, coeffs }
    }

    /// The seed jet of variable `var` at `value`.
    pub fn variable(nvars: usize, order: usize, var: usize, value: T) -> Self {
        let mut j = Self::constant(nvars, order, value);
        if order >= 1 {
            let mut e = vec![0u8; nvars];
            e[var] = 1;
            let k = j.layout.index[&e];
            j.coeffs[k] = T::one();
        }
        j
    }

    pub fn from_coeffs(layout: Arc<Layout>, coeffs: Vec<T>) -> Self {
        assert_eq!(layout.len(), coeffs.len(), "coefficient count mismatch");
        Jet { layout, coeffs }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Taylor coefficient of the monomial with the given exponents.
    pub fn coeff(&self, exps: &[u8]) -> T {
        self.layout
            .index_of(exps)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(T::zero)
    }

    /// Mixed partial derivative `d^|a| f / dx^a`.
    pub fn partial(&self, exps: &[u8]) -> T {
        match self.layout.index_of(exps) {
            Some(i) => self.coeffs[i] * T::from_f64(self.layout.weight[i]),
            None => T::zero(),
        }
    }

    /// First partial along `var`.
    pub fn d1(&self, var: usize) -> T {
        let mut e = vec![0u8; self.nvars()];
        e[var] = 1;
        self.partial(&e)
    }

    /// Second partial along `(a, b)`.
    pub fn d2(&self, a: usize, b: usize) -> T {
        let mut e = vec![0u8; self.nvars()];
        e[a] += 1;
        e[b] += 1;
        self.partial(&e)
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let layout = Layout::get(self.nvars(), order);
        let coeffs = self.coeffs[..layout.len()].to_vec();
        Jet { layout, coeffs }
    }

    /// Exact jet of `d f / d x_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Self {
        assert!(self.order() >= 1, "jet order exhausted by differentiation");
        let layout = Layout::get(self.nvars(), self.order() - 1);
        let mut coeffs = vec![T::zero(); layout.len()];
        let mut e = vec![0u8; self.nvars()];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            e.copy_from_slice(&layout.exponents[k]);
            let p = e[var] + 1;
            e[var] = p;
            let src = self.layout.index[&e];
            *slot = self.coeffs[src] * T::from_f64(p as f64);
        }
        Jet { layout, coeffs }
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(T) -> U) -> Jet<U> {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_coeffs(|c| c * s)
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.modulus()).fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.nvars(), other.nvars(), "jets over different variable sets");
        let (small, layout) = if self.order() <= other.order() {
            (self.coeffs.len(), self.layout.clone())
        } else {
            (other.coeffs.len(), other.layout.clone())
        };
        let coeffs = (0..small)
            .map(|k| f(self.coeffs[k], other.coeffs[k]))
            .collect();
        Jet { layout, coeffs }
    }

    fn product(&self, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars(), "jets over different variable sets");
        let layout = if self.order() <= other.order() {
            self.layout.clone()
        } else {
            other.layout.clone()
        };
        let mut coeffs = vec![T::zero(); layout.len()];
        let a = &self.coeffs;
        let b = &other.coeffs;
        for &(i, j, k) in &layout.products {
            coeffs[k as usize] += a[i as usize] * b[j as usize];
        }
        Jet { layout, coeffs }
    }

    /// `sum_k taylor[k] * h^k` where `h = self - value`.
    pub fn compose(&self, taylor: &[T]) -> Self {
        let order = self.order();
        let mut h = self.clone();
        h.coeffs[0] = T::zero();
        let top = order.min(taylor.len() - 1);
        let mut acc = Jet::constant(self.nvars(), order, taylor[top]);
        for k in (0..top).rev() {
            acc = acc.product(&h);
            acc.coeffs[0] += taylor[k];
        }
        acc
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        let inv = T::one() / a;
        let mut taylor = Vec::with_capacity(self.order() + 1);
        let mut p = inv;
        for _ in 0..=self.order() {
            taylor.push(p);
            p = -p * inv;
        }
        self.compose(&taylor)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Jet::constant(self.nvars(), self.order(), T::one());
        for _ in 0..n {
            acc = acc.product(self);
        }
        acc
    }

    pub fn square(&self) -> Self {
        self.product(self)
    }
}

impl Jet<f64> {
    pub fn to_complex(&self) -> CJet {
        self.map_coeffs(|c| Complex64::new(c, 0.0))
    }

    fn unary(&self, derivs: [f64; MAX_ORDER + 1]) -> Self {
        let mut taylor = [0.0; MAX_ORDER + 1];
        for (k, t) in taylor.iter_mut().enumerate() {
            *t = derivs[k] / factorial(k);
        }
        self.compose(&taylor[..=self.order()])
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.unary([e; MAX_ORDER + 1])
    }

    pub fn ln(&self) -> Self {
        let a = self.value();
        self.unary([
            a.ln(),
            1.0 / a,
            -1.0 / (a * a),
            2.0 / (a * a * a),
            -6.0 / (a * a * a * a),
        ])
    }

    /// Real power `x^p`; requires a positive base unless `p` is a small integer.
    pub fn powf(&self, p: f64) -> Self {
        if p.fract() == 0.0 && (0.0..=8.0).contains(&p) {
            return self.powi(p as u32);
        }
        let a = self.value();
        let mut d = [0.0; MAX_ORDER + 1];
        let mut c = 1.0;
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = c * a.powf(p - k as f64);
            c *= p - k as f64;
        }
        self.unary(d)
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.unary([s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.unary([c, -s, -c, s, c])
    }

    pub fn atanh(&self) -> Self {
        let a = self.value();
        let w = 1.0 - a * a;
        self.unary([
            a.atanh(),
            1.0 / w,
            2.0 * a / (w * w),
            (2.0 + 6.0 * a * a) / (w * w * w),
            (24.0 * a + 24.0 * a * a * a) / (w * w * w * w),
        ])
    }
}

impl CJet {
    /// Real and imaginary parts as real jets.
    pub fn re(&self) -> Jet<f64> {
        self.map_coeffs(|c| c.re)
    }

    pub fn im(&self) -> Jet<f64> {
        self.map_coeffs(|c| c.im)
    }

    /// Wirtinger derivative with respect to `w = x_re + i x_im` (or its
    /// conjugate when `anti` is set).
    pub fn wirtinger(&self, re: usize, im: usize, anti: bool) -> CJet {
        let dx = self.derivative(re);
        let dy = self.derivative(im);
        let i = Complex64::new(0.0, if anti { 0.5 } else { -0.5 });
        dx.scale(Complex64::new(0.5, 0.0)) + dy.scale(i)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<T: Scalar> $tr<&Jet<T>> for &Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: &Jet<T>) -> Jet<T> {
                let f: fn(&Jet<T>, &Jet<T>) -> Jet<T> = $body;
                f(self, rhs)
            }
        }
        impl<T: Scalar> $tr<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Scalar> $tr<&Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: &Jet<T>) -> Jet<T> {
                (&self).$m(rhs)
            }
        }
        impl<T: Scalar> $tr<Jet<T>> for &Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
binop!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
binop!(Mul, mul, |a, b| a.product(b));
binop!(Div, div, |a, b| a.product(&b.recip()));

macro_rules! scalar_op {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<T: Scalar> $tr<T> for &Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: T) -> Jet<T> {
                let f: fn(&Jet<T>, T) -> Jet<T> = $body;
                f(self, rhs)
            }
        }
        impl<T: Scalar> $tr<T> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: T) -> Jet<T> {
                (&self).$m(rhs)
            }
        }
    };
}

scalar_op!(Add, add, |a, s| {
    let mut r = a.clone();
    r.coeffs[0] += s;
    r
});
scalar_op!(Sub, sub, |a, s| {
    let mut r = a.clone();
    r.coeffs[0] -= s;
    r
});
scalar_op!(Mul, mul, |a, s| a.scale(s));
scalar_op!(Div, div, |a, s| a.scale(T::one() / s));

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.map_coeffs(|c| -c)
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

/// Seed jets for `values`, differentiating with respect to the variables
/// listed in `active` (in that order); other entries are constants.
pub fn lift(values: &[f64], active: &[usize], order: usize) -> Result<Vec<Jet<f64>>> {
    if order == 0 || order > MAX_ORDER {
        return Err(FinslerError::Config(format!(
            "jet order must lie in 1..={MAX_ORDER}, got {order}"
        )));
    }
    if active.is_empty() {
        return Err(FinslerError::Config("empty active variable set".into()));
    }
    let nvars = active.len();
    let mut out: Vec<Jet<f64>> = values
        .iter()
        .map(|&v| Jet::constant(nvars, order, v))
        .collect();
    for (slot, &var) in active.iter().enumerate() {
        let v = *values.get(var).ok_or_else(|| {
            FinslerError::Config(format!("active index {var} out of range"))
        })?;
        out[var] = Jet::variable(nvars, order, slot, v);
    }
    Ok(out)
}

/// Seed jets for every entry of `values`.
pub fn lift_all(values: &[f64], order: usize) -> Vec<Jet<f64>> {
    let n = values.len();
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| Jet::variable(n, order, i, v))
        .collect()
}

/// Holomorphic and anti-holomorphic mixed partials of a jet.
///
/// Keys are `(holomorphic multi-index, anti-holomorphic multi-index)` over the
/// complex coordinates `w_k = x[pairs[k].0] + i x[pairs[k].1]`.
#[derive(Debug, Clone)]
pub struct WirtingerTable {
    pub entries: BTreeMap<(Vec<u8>, Vec<u8>), Complex64>,
}

impl WirtingerTable {
    pub fn get(&self, holo: &[u8], anti: &[u8]) -> Complex64 {
        self.entries
            .get(&(holo.to_vec(), anti.to_vec()))
            .copied()
            .unwrap_or_default()
    }
}

pub fn wirtinger(jet: &Jet<f64>, pairs: &[(usize, usize)]) -> Result<WirtingerTable> {
    if jet.nvars() % 2 == 1 && pairs.len() * 2 > jet.nvars() {
        return Err(FinslerError::Structural(format!(
            "odd real dimension {} cannot carry {} complex coordinates",
            jet.nvars(),
            pairs.len()
        )));
    }
    for &(a, b) in pairs {
        if a >= jet.nvars() || b >= jet.nvars() || a == b {
            return Err(FinslerError::Structural(format!(
                "invalid coordinate pair ({a}, {b})"
            )));
        }
    }
    let m = pairs.len();
    let mut entries = BTreeMap::new();
    let root = jet.to_complex();
    let zero = vec![0u8; m];
    entries.insert((zero.clone(), zero.clone()), root.value());
    let mut frontier = vec![((zero.clone(), zero), root)];
    for _ in 0..jet.order() {
        let mut next = Vec::new();
        for ((h, a), j) in &frontier {
            for (k, &(re, im)) in pairs.iter().enumerate() {
                for anti in [false, true] {
                    let (mut h2, mut a2) = (h.clone(), a.clone());
                    if anti {
                        a2[k] += 1;
                    } else {
                        h2[k] += 1;
                    }
                    let key = (h2, a2);
                    if entries.contains_key(&key) {
                        continue;
                    }
                    let d = j.wirtinger(re, im, anti);
                    entries.insert(key.clone(), d.value());
                    next.push((key, d));
                }
            }
        }
        frontier = next;
    }
    Ok(WirtingerTable { entries })
}

/// The standard pairing `(k, nvars/2 + k)` used throughout the crate.
pub fn standard_pairs(nvars: usize) -> Result<Vec<(usize, usize)>> {
    if nvars % 2 == 1 {
        return Err(FinslerError::Structural(format!(
            "odd real dimension {nvars}"
        )));
    }
    let n = nvars / 2;
    Ok((0..n).map(|k| (k, n + k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_counts() {
        assert_eq!(Layout::get(1, 4).len(), 5);
        assert_eq!(Layout::get(2, 2).len(), 6);
        assert_eq!(Layout::get(8, 4).len(), 495);
        // graded order makes lower orders a prefix
        let l4 = Layout::get(3, 4);
        let l2 = Layout::get(3, 2);
        for i in 0..l2.len() {
            assert_eq!(l2.exponents(i), l4.exponents(i));
        }
    }

    #[test]
    fn lift_seed() {
        let x = lift(&[2.0], &[0], 2).unwrap();
        assert_eq!(x[0].value(), 2.0);
        assert_eq!(x[0].partial(&[1]), 1.0);
        assert_eq!(x[0].partial(&[2]), 0.0);
    }

    #[test]
    fn lift_bilinear() {
        let v = lift(&[1.0, 3.0], &[0, 1], 2).unwrap();
        let f = &v[0] * &v[1];
        assert_eq!(f.partial(&[1, 1]), 1.0);
        assert_eq!(f.partial(&[1, 0]), 3.0);
    }

    #[test]
    fn quartic_fourth_partial() {
        let x = lift(&[1.0], &[0], 4).unwrap();
        let f = x[0].powi(4);
        assert_eq!(f.partial(&[4]), 24.0);
    }

    #[test]
    fn lift_rejects_bad_config() {
        assert!(matches!(lift(&[1.0], &[0], 5), Err(FinslerError::Config(_))));
        assert!(matches!(lift(&[1.0], &[], 2), Err(FinslerError::Config(_))));
        assert!(matches!(lift(&[1.0], &[0], 0), Err(FinslerError::Config(_))));
    }

    #[test]
    fn derivative_lowers_order() {
        let v = lift(&[0.5, -1.0], &[0, 1], 3).unwrap();
        let f = v[0].square() * &v[1];
        let fx = f.derivative(0);
        assert_eq!(fx.order(), 2);
        assert!((fx.value() - -1.0).abs() < 1e-15);
        assert!((fx.partial(&[1, 0]) + 2.0).abs() < 1e-15);
        assert!((fx.partial(&[0, 1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_order_product_truncates() {
        let v = lift(&[1.0, 2.0], &[0, 1], 4).unwrap();
        let a = v[0].square();
        let b = v[1].truncate(2);
        assert_eq!((&a * &b).order(), 2);
    }

    #[test]
    fn wirtinger_abs_squared() {
        let v = lift(&[0.3, -0.7], &[0, 1], 2).unwrap();
        let f = v[0].square() + v[1].square();
        let t = wirtinger(&f, &[(0, 1)]).unwrap();
        assert!((t.get(&[1], &[1]) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(t.get(&[2], &[0]).norm() < 1e-14);
    }

    #[test]
    fn wirtinger_real_part() {
        let v = lift(&[0.3, -0.7], &[0, 1], 1).unwrap();
        let t = wirtinger(&v[0], &[(0, 1)]).unwrap();
        assert!((t.get(&[1], &[0]) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn wirtinger_abs_fourth() {
        // d^2 |z|^4 / dz dzbar = 4 |z|^2
        let v = lift(&[1.0, 0.0], &[0, 1], 2).unwrap();
        let f = (v[0].square() + v[1].square()).square();
        let t = wirtinger(&f, &[(0, 1)]).unwrap();
        assert!((t.get(&[1], &[1]) - Complex64::new(4.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn wirtinger_odd_dimension() {
        let v = lift(&[1.0, 0.0, 2.0], &[0, 1, 2], 2).unwrap();
        assert!(matches!(standard_pairs(3), Err(FinslerError::Structural(_))));
        assert!(matches!(
            wirtinger(&v[0], &[(0, 1), (2, 1)]),
            Err(FinslerError::Structural(_))
        ));
    }

    #[test]
    fn elementary_values() {
        let x = lift(&[0.4], &[0], 4).unwrap();
        let e = x[0].exp();
        for k in 0..=4u8 {
            assert!((e.partial(&[k]) - 0.4f64.exp()).abs() < 1e-13);
        }
        let s = x[0].sqrt();
        assert!((s.partial(&[2]) + 0.25 * 0.4f64.powf(-1.5)).abs() < 1e-12);
        let r = x[0].recip();
        assert!((r.partial(&[3]) + 6.0 / 0.4f64.powi(4)).abs() < 1e-9);
        let q = &x[0] / &x[0];
        assert!((q.value() - 1.0).abs() < 1e-15 && q.partial(&[1]).abs() < 1e-14);
    }
}
