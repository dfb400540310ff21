//! Acceptance suite. Prints one line per criterion and exits non-zero if any fails.

use std::path::Path;
use std::time::Instant;

use finsler::app::{load_report, replay};
use finsler::connection_complex::{chern_finsler, holomorphic_sectional_curvature};
use finsler::connection_real::{flag_curvature, radial_flag_bounds};
use finsler::distance::{gradient_identity, levi_identity_residual, levi_rho2, TestFunction};
use finsler::geodesic::{
    distance, hessian_rho, hessian_rho_bound, integrate_geodesic, radial_gradient_identity, rho2_record,
};
use finsler::geometry::{apply_j, complex_to_real, real_metric_value};
use finsler::jet::{lift_all, Jet};
use finsler::kahler::{
    classify, un_invariant_kahler_check, weakly_kahler_pde_residual, KahlerClass, PdeGrid,
};
use finsler::metrics::{
    check_metric, instantiate, ComplexMatrix, FamilySpec, HermitianSpec, KahlerPotential, MapSpec, MetricDef, Profile,
    Term,
};
use finsler::report::{random_unit, SamplePlan};
use finsler::schwarz::{certify_schwarz, disk_grid, gaussian_curvature, maximality_check, pullback, SCHWARZ_TOL};
use finsler::metrics::HoloMap;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn def(spec: FamilySpec) -> MetricDef {
    instantiate(&spec).expect("catalog spec")
}

fn disk_spec() -> FamilySpec {
    FamilySpec::Poincare { complex_dim: 1, scale: 1.0 }
}

fn ball_spec() -> FamilySpec {
    FamilySpec::Poincare { complex_dim: 2, scale: 1.0 }
}

fn minkowski_spec() -> FamilySpec {
    FamilySpec::Minkowski {
        factors: vec![
            ComplexMatrix {
                re: vec![vec![2.0, 0.5], vec![0.5, 1.0]],
                im: vec![vec![0.0, 0.3], vec![-0.3, 0.0]],
            },
            ComplexMatrix::identity(2),
        ],
        p: 2.5,
        perturb: 0.1,
    }
}

fn szabo_spec() -> FamilySpec {
    FamilySpec::Szabo {
        k: 2,
        eps: 0.5,
        factors: vec![
            HermitianSpec::Poincare { complex_dim: 1, scale: 1.0 },
            HermitianSpec::Identity { complex_dim: 1 },
        ],
    }
}

fn plan(seed: u64, points: usize, rmin: f64, rmax: f64) -> SamplePlan {
    SamplePlan {
        seed,
        points,
        directions: 9,
        radius_min: rmin,
        radius_max: rmax,
    }
}

fn samples(d: &MetricDef, p: &SamplePlan) -> Vec<(Vec<C>, Vec<C>)> {
    let pts = p.points(d.dim(), d.domain());
    let dirs = p.random_directions(d.dim(), pts.len());
    pts.into_iter().zip(dirs).collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- jets

trait Num: Clone {
    fn lit(&self, v: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn recip(&self) -> Self;
}

impl Num for f64 {
    fn lit(&self, v: f64) -> Self {
        v
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
}

impl Num for Jet {
    fn lit(&self, v: f64) -> Self {
        Jet::constant(self.nvars(), self.order(), v)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn sin(&self) -> Self {
        Jet::sin(self)
    }
    fn cos(&self) -> Self {
        Jet::cos(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
    fn recip(&self) -> Self {
        Jet::recip(self)
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Var(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// `exp(e / 2)`, keeping nested values moderate
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    /// `ln(1 + e^2)`
    LogQuad(Box<Expr>),
    /// `sqrt(1 + e^2)`
    RootQuad(Box<Expr>),
    /// `1 / (2 + sin e)`
    Bump(Box<Expr>),
}

impl Expr {
    fn random(rng: &mut ChaCha8Rng, nvars: usize, depth: usize) -> Expr {
        if depth == 0 || rng.random::<f64>() < 0.2 {
            return if rng.random::<f64>() < 0.8 {
                Expr::Var(rng.random_range(0..nvars))
            } else {
                Expr::Const(rng.random_range(-1.0..1.0))
            };
        }
        let sub = |rng: &mut ChaCha8Rng| Box::new(Expr::random(rng, nvars, depth - 1));
        match rng.random_range(0..8) {
            0 => Expr::Add(sub(rng), sub(rng)),
            1 => Expr::Mul(sub(rng), sub(rng)),
            2 => Expr::Exp(sub(rng)),
            3 => Expr::Sin(sub(rng)),
            4 => Expr::Cos(sub(rng)),
            5 => Expr::LogQuad(sub(rng)),
            6 => Expr::RootQuad(sub(rng)),
            _ => Expr::Bump(sub(rng)),
        }
    }

    fn eval<T: Num>(&self, x: &[T]) -> T {
        let quad = |e: &Expr| {
            let v = e.eval(x);
            v.mul(&v).add(&v.lit(1.0))
        };
        match self {
            Expr::Var(i) => x[*i].clone(),
            Expr::Const(v) => x[0].lit(*v),
            Expr::Add(a, b) => a.eval(x).add(&b.eval(x)),
            Expr::Mul(a, b) => a.eval(x).mul(&b.eval(x)),
            Expr::Exp(a) => a.eval(x).mul(&x[0].lit(0.5)).exp(),
            Expr::Sin(a) => a.eval(x).sin(),
            Expr::Cos(a) => a.eval(x).cos(),
            Expr::LogQuad(a) => quad(a).ln(),
            Expr::RootQuad(a) => quad(a).sqrt(),
            Expr::Bump(a) => {
                let s = a.eval(x).sin();
                s.add(&s.lit(2.0)).recip()
            }
        }
    }
}

/// Second-order central stencil for the `k`-th derivative: `(offset, weight)`
/// in units of `h`, before division by `h^k`.
fn stencil(k: u8) -> &'static [(f64, f64)] {
    match k {
        0 => &[(0.0, 1.0)],
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
        3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
        _ => &[(2.0, 1.0), (1.0, -4.0), (0.0, 6.0), (-1.0, -4.0), (-2.0, 1.0)],
    }
}

fn fd_partial(f: &dyn Fn(&[f64]) -> f64, x: &[f64], exps: &[u8], h: f64) -> f64 {
    let mut acc = 0.0;
    let mut idx = vec![0usize; exps.len()];
    let sizes: Vec<usize> = exps.iter().map(|&k| stencil(k).len()).collect();
    loop {
        let mut w = 1.0;
        let mut y = x.to_vec();
        for (v, &i) in idx.iter().enumerate() {
            let (o, c) = stencil(exps[v])[i];
            w *= c;
            y[v] += o * h;
        }
        acc += w * f(&y);
        let mut v = 0;
        while v < idx.len() {
            idx[v] += 1;
            if idx[v] < sizes[v] {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
        if v == idx.len() {
            break;
        }
    }
    let order: i32 = exps.iter().map(|&k| k as i32).sum();
    acc / h.powi(order)
}

/// Richardson tableau over four halvings of `h` on the even-power error expansion.
fn richardson(f: &dyn Fn(&[f64]) -> f64, x: &[f64], exps: &[u8], h: f64) -> f64 {
    const LEVELS: usize = 4;
    let mut t: Vec<f64> = (0..LEVELS).map(|k| fd_partial(f, x, exps, h / 2f64.powi(k as i32))).collect();
    for j in 1..LEVELS {
        let q = 4f64.powi(j as i32);
        for k in (j..LEVELS).rev() {
            t[k] = (q * t[k] - t[k - 1]) / (q - 1.0);
        }
    }
    t[LEVELS - 1]
}

/// Richardson estimates over a ladder of base steps; truncation error grows
/// and roundoff shrinks with `h`, so the closest neighbouring pair marks the
/// plateau.
fn fd_oracle(f: &dyn Fn(&[f64]) -> f64, x: &[f64], exps: &[u8]) -> f64 {
    let est: Vec<f64> = [0.03, 0.045, 0.06, 0.08, 0.11, 0.15, 0.2]
        .iter()
        .map(|&h| richardson(f, x, exps, h))
        .collect();
    est.windows(2)
        .min_by(|a, b| (a[0] - a[1]).abs().total_cmp(&(b[0] - b[1]).abs()))
        .map(|w| 0.5 * (w[0] + w[1]))
        .expect("ladder has pairs")
}

fn criterion_1() -> Outcome {
    let nvars = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..100 {
        let e = Expr::random(&mut rng, nvars, 4);
        let x: Vec<f64> = (0..nvars).map(|_| rng.random_range(-0.5..0.5)).collect();
        let jet = e.eval(&lift_all(&x, 4));
        let f = |y: &[f64]| e.eval(y);
        for i in 0..jet.layout().len() {
            let exps = jet.layout().exponents(i).to_vec();
            let want = jet.partial(&exps);
            let got = fd_oracle(&f, &x, &exps);
            worst = worst.max((got - want).abs() / want.abs().max(1.0));
            checked += 1;
        }
    }
    check(worst < 1e-6, format!("{checked} partials, worst relative error {worst:.2e} (< 1e-6)"))
}

// ---------------------------------------------------------------- curvature

fn criterion_2() -> Outcome {
    let d = def(disk_spec());
    let mut worst = 0.0f64;
    let pts = samples(&d, &plan(2, 50, 0.0, 0.95));
    for (z, v) in &pts {
        let k = holomorphic_sectional_curvature(d.metric.as_ref(), z, v).map_err(|e| e.to_string())?;
        worst = worst.max((k + 4.0).abs());
    }
    let density = |w: &finsler::jet::CJet| {
        let t = w.re().square() + w.im().square();
        Ok((-t + 1.0).powi(2).recip())
    };
    let mut worst_g = 0.0f64;
    for zeta in disk_grid(5, 8, 0.9) {
        let k = gaussian_curvature(density, zeta).map_err(|e| e.to_string())?;
        worst_g = worst_g.max((k + 4.0).abs());
    }
    check(
        worst < 1e-5 && worst_g < 1e-8,
        format!("K_G + 4 max {worst:.1e} over {} samples (< 1e-5), Gaussian + 4 max {worst_g:.1e} (< 1e-8)", pts.len()),
    )
}

fn criterion_3() -> Outcome {
    let d = def(minkowski_spec());
    let m = d.realified();
    let pts = samples(&d, &plan(3, 20, 0.1, 3.0));
    let (mut gamma, mut kg) = (0.0f64, 0.0f64);
    for (z, v) in &pts {
        let cf = chern_finsler(d.metric.as_ref(), z, v).map_err(|e| e.to_string())?;
        for g in cf.horizontal.iter().flatten().flatten() {
            gamma = gamma.max(g.norm());
        }
        kg = kg.max(holomorphic_sectional_curvature(d.metric.as_ref(), z, v).map_err(|e| e.to_string())?.abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (mut flag, mut ray) = (0.0f64, 0.0f64);
    for (z, _) in pts.iter().take(10) {
        let x = complex_to_real(z);
        let u = random_unit(&mut rng, 4);
        let e = random_unit(&mut rng, 4);
        flag = flag.max(flag_curvature(&m, &x, &u, &e).map_err(|e| e.to_string())?.abs());
        let s = real_metric_value(&m, &x, &u).map_err(|e| e.to_string())?.sqrt();
        let t: Vec<f64> = u.iter().map(|a| a / s).collect();
        let path = integrate_geodesic(&m, &x, &t, 2.0, 8).map_err(|e| e.to_string())?;
        for smp in &path.samples {
            for i in 0..4 {
                ray = ray.max((smp.x[i] - x[i] - smp.t * t[i]).abs());
            }
        }
    }
    let class = classify(&d, &plan(3, 12, 0.1, 3.0)).map_err(|e| e.to_string())?.class;
    check(
        gamma < 1e-9 && kg < 1e-7 && flag < 1e-6 && ray < 1e-9 && class == KahlerClass::StronglyKahler,
        format!("|Γ| {gamma:.1e}, |K_G| {kg:.1e}, |flag| {flag:.1e}, ray error {ray:.1e}, class {class:?}"),
    )
}

fn criterion_4() -> Outcome {
    let p = plan(4, 12, 0.05, 0.9);
    let mut lines = Vec::new();
    let mut ok = true;
    for f in [
        KahlerPotential::One,
        KahlerPotential::Exp { c: 1.0 },
        KahlerPotential::Exp { c: -0.5 },
        KahlerPotential::InvOneMinus,
    ] {
        let prof = Profile::Kahler { f };
        let chk = un_invariant_kahler_check(&prof, 2, Some(0.9), &p).map_err(|e| e.to_string())?;
        let pde = weakly_kahler_pde_residual(&prof, &PdeGrid::for_profile(&prof));
        ok &= chk.class >= KahlerClass::Kahler && pde.worst < 1e-8;
        lines.push(format!("{:?}/{:.0e}", chk.class, pde.worst));
    }
    let bad = Profile::Polynomial {
        terms: vec![Term { t: 0, s: 0, c: 1.0 }, Term { t: 0, s: 2, c: 1.0 }],
    };
    let chk = un_invariant_kahler_check(&bad, 2, Some(0.9), &p).map_err(|e| e.to_string())?;
    let pde = weakly_kahler_pde_residual(&bad, &PdeGrid::for_profile(&bad));
    let bad_ok = chk.class < KahlerClass::Kahler && chk.report.residual_kahler > 1e-3 && pde.worst > 1e-3;
    check(
        ok && bad_ok,
        format!(
            "catalog [{}]; 1+s² class {:?}, Kähler residual {:.2e}, PDE residual {:.2e}",
            lines.join(", "),
            chk.class,
            chk.report.residual_kahler,
            pde.worst
        ),
    )
}

// ---------------------------------------------------------------- distance

fn criterion_5() -> Outcome {
    let surfaces = [
        ("euclidean", def(FamilySpec::Euclidean { complex_dim: 1 }), 0.2, 2.0),
        ("hyperbolic", def(disk_spec()), 0.1, 0.6),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, d, rmin, rmax) in &surfaces {
        let m = d.realified();
        let pole = vec![c(0.0, 0.0)];
        let p = complex_to_real(&pole);
        let radial = radial_flag_bounds(&m, &p, &plan(5, 6, 0.1, 0.6)).map_err(|e| e.to_string())?;
        let pts = samples(d, &plan(5, 100, *rmin, *rmax));
        let (mut closed, mut agree, mut margin) = (0.0f64, 0.0f64, f64::INFINITY);
        for (z, _) in pts.iter().take(10) {
            let x = complex_to_real(z);
            let dist = distance(&m, &p, &x).map_err(|e| e.to_string())?;
            let u = apply_j(&dist.tangent);
            let h = hessian_rho(&m, &p, &x, &u).map_err(|e| e.to_string())?;
            let g = real_metric_value(&m, &x, &u).map_err(|e| e.to_string())?;
            let want = if *name == "euclidean" { 1.0 / h.rho } else { 2.0 / (2.0 * h.rho).tanh() } * g;
            closed = closed.max((h.via_connection - want).abs().max((h.via_index_form - want).abs()) / g);
            agree = agree.max(h.agreement);
        }
        let margins = finsler::exec::map(&pts, |(z, v)| -> std::result::Result<[f64; 3], String> {
            let x = complex_to_real(z);
            let u = complex_to_real(v);
            let e = |e: finsler::FinslerError| e.to_string();
            let (h, rec) = hessian_rho_bound(&m, &p, &x, &u, radial.k, 1e-3).map_err(e)?;
            let cor = rho2_record(&x, &h, radial.k, 1e-3);
            let levi = levi_rho2(d, &pole, z, v, radial.k).map_err(e)?;
            Ok([rec.margin, cor.margin, levi.margin])
        });
        let margins = margins.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
        let n = margins.len();
        let low = |k: usize| margins.iter().map(|a| a[k]).fold(f64::INFINITY, f64::min);
        let (cor, levi) = (low(1), low(2));
        margin = margin.min(low(0));
        ok &= closed < 1e-3 && agree < 1e-4 && margin >= -1e-3 && cor >= -1e-3 && levi >= -1e-3 && n == 100;
        detail.push(format!(
            "{name}: closed form {closed:.1e}, routes {agree:.1e}, Hessian bound margin {margin:.2e}, ρ² bound margin {cor:.2e}, Levi margin {levi:.2e} ({n} samples, K = {:.3})",
            radial.k
        ));
    }
    check(ok, detail.join("; "))
}

fn criterion_6() -> Outcome {
    let members = [
        ("euclidean", def(FamilySpec::Euclidean { complex_dim: 2 })),
        ("poincare", def(disk_spec())),
        ("minkowski", def(minkowski_spec())),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, d) in &members {
        let m = d.realified();
        let pole: Vec<C> = (0..d.dim()).map(|a| c(0.05 * a as f64, -0.02)).collect();
        let p = complex_to_real(&pole);
        let (mut real, mut complex) = (0.0f64, 0.0f64);
        for (z, _) in samples(d, &plan(6, 8, 0.2, 0.8)) {
            let x = complex_to_real(&z);
            let r = radial_gradient_identity(&m, &p, &x, 1e-6).map_err(|e| e.to_string())?;
            real = real.max((r.lhs / r.rhs - 1.0).abs());
            let r = gradient_identity(d, &pole, &z, 1e-6).map_err(|e| e.to_string())?;
            complex = complex.max((r.lhs / r.rhs - 1.0).abs());
        }
        ok &= real < 1e-6 && complex < 1e-6;
        detail.push(format!("{name}: pairing/2ρ {real:.1e}, pairing/ρ {complex:.1e}"));
    }
    check(ok, detail.join("; "))
}

fn weakly_kahler_catalog() -> Vec<(&'static str, MetricDef)> {
    let un = |f| FamilySpec::UnInvariant {
        complex_dim: 2,
        profile: Profile::Kahler { f },
        radius: Some(0.9),
    };
    vec![
        ("euclidean", def(FamilySpec::Euclidean { complex_dim: 2 })),
        ("ball", def(ball_spec())),
        ("minkowski", def(minkowski_spec())),
        ("szabo", def(szabo_spec())),
        ("un-exp", def(un(KahlerPotential::Exp { c: 1.0 }))),
        ("un-ball", def(un(KahlerPotential::InvOneMinus))),
    ]
}

fn criterion_7() -> Outcome {
    let fs = [
        TestFunction::RealPart { index: 0 },
        TestFunction::ImagPart { index: 1 },
        TestFunction::NormSqr,
        TestFunction::Mixed { a: 0, b: 1 },
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, d) in weakly_kahler_catalog() {
        let p = plan(7, 50, 0.05, 0.8);
        let real = check_metric(&d, &p).realification;
        let mut worst = 0.0f64;
        let pts = samples(&d, &p);
        for (k, (z, v)) in pts.iter().enumerate() {
            let r = levi_identity_residual(&d, &fs[k % fs.len()], z, v).map_err(|e| format!("{name}: {e}"))?;
            worst = worst.max(r.residual / r.lhs.abs().max(r.rhs.abs()).max(1.0));
        }
        ok &= real.passed && real.samples.len() >= 50 && worst < 1e-6;
        detail.push(format!("{name}: realification {:.1e} ({} samples), Levi {worst:.1e} ({})", real.worst, real.samples.len(), pts.len()));
    }
    check(ok, detail.join("; "))
}

// ---------------------------------------------------------------- schwarz

fn criterion_8() -> Outcome {
    let p = plan(8, 8, 0.05, 0.9);
    let mut detail = Vec::new();
    let mut ok = true;
    for map in [MapSpec::Identity { dim: 1 }, MapSpec::Mobius { a: [0.4, 0.1], theta: 1.3 }] {
        let cert = certify_schwarz(&map, &disk_spec(), &disk_spec(), &p, SCHWARZ_TOL).map_err(|e| e.to_string())?;
        ok &= cert.passed && (cert.max_ratio - 1.0).abs() < 1e-6 && (cert.bound - 1.0).abs() < 1e-6;
        detail.push(format!("max ratio {:.9} bound {:.6}", cert.max_ratio, cert.bound));
    }
    let sq_spec = MapSpec::Power { m: 2, dim: 1 };
    let d = def(disk_spec());
    let sq = HoloMap::new(&sq_spec).map_err(|e| e.to_string())?;
    let probe = |z: &finsler::jet::CJet| Ok(vec![z.clone()]);
    let mut closed = 0.0f64;
    for r in pullback(&sq, &d, &d, &probe, &disk_grid(5, 7, 0.95)) {
        let t = r.zeta.norm_sqr();
        closed = closed.max((r.ratio - 4.0 * t / (1.0 + t).powi(2)).abs());
    }
    let cert = certify_schwarz(&sq_spec, &disk_spec(), &disk_spec(), &p, SCHWARZ_TOL).map_err(|e| e.to_string())?;
    ok &= closed < 1e-8 && cert.passed;
    detail.push(format!("ζ² closed form {closed:.1e}, certificate passed {}", cert.passed));
    let mink = FamilySpec::Minkowski {
        factors: vec![ComplexMatrix::identity(2)],
        p: 2.0,
        perturb: 0.0,
    };
    let lin = MapSpec::Linear {
        matrix: ComplexMatrix {
            re: vec![vec![0.3, 0.2]],
            im: vec![vec![0.0, 0.1]],
        },
        offset: vec![],
    };
    let cert = certify_schwarz(&lin, &mink, &disk_spec(), &p, SCHWARZ_TOL).map_err(|e| e.to_string())?;
    ok &= !cert.passed && cert.bound == 0.0;
    detail.push(format!("Minkowski→disk passed {} bound {} max ratio {:.3e}", cert.passed, cert.bound, cert.max_ratio));
    check(ok, detail.join("; "))
}

/// Szabó holomorphic curvatures at the maximality samples, pinned from the first run.
const SZABO_PINNED: [f64; 4] = [-2.114026817061858, -0.0027973950412334865, -1.4567162963182592, -1.012330842283115];

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ws: Vec<Vec<C>> = std::iter::once(vec![c(0.0, 0.0); 2])
        .chain((0..6).map(|_| (0..2).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect()))
        .collect();
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, d) in [("ball", def(ball_spec())), ("szabo", def(szabo_spec()))] {
        let pts = samples(&d, &plan(9, 4, 0.1, 0.7));
        let mut worst = f64::NEG_INFINITY;
        let mut kgs = Vec::new();
        for (z, v) in &pts {
            let r = maximality_check(&d, z, v, &ws, 1e-6).map_err(|e| e.to_string())?;
            ok &= r.passed;
            for p in &r.probes {
                worst = worst.max(p.lhs - p.rhs);
            }
            kgs.push(r.k_g);
        }
        let drifted = |(a, b): (&f64, f64)| (a - b).abs().partial_cmp(&(1e-9 * b.abs().max(1.0))) != Some(std::cmp::Ordering::Less);
        if name == "szabo" && kgs.iter().zip(SZABO_PINNED).any(drifted) {
            ok = false;
            detail.push(format!("szabo K_G {kgs:?} differ from pinned values"));
        }
        detail.push(format!("{name}: max probe excess over K_G {worst:.2e}"));
    }
    check(ok, detail.join("; "))
}

fn criterion_10() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut names = Vec::new();
    for f in ["schwarz_identity.json", "schwarz_mobius.json", "schwarz_square.json"] {
        let stored = load_report(&dir.join(f)).map_err(|e| format!("{f}: {e}"))?;
        let out = replay(&stored, None).map_err(|e| format!("{f}: {e}"))?;
        if !out.passed {
            return Err(format!("{f}: mismatch at {:?}", out.mismatches));
        }
        names.push(f);
    }
    Ok(format!("bitwise replay of {}", names.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("jet partials vs finite differences", criterion_1),
        ("Poincaré disk curvature", criterion_2),
        ("complex Minkowski flatness", criterion_3),
        ("Kähler profiles and PDE", criterion_4),
        ("distance Hessian and comparison bounds", criterion_5),
        ("gradient identities", criterion_6),
        ("realification and Levi identities", criterion_7),
        ("Schwarz certificates", criterion_8),
        ("holomorphic curvature maximality", criterion_9),
        ("replay determinism", criterion_10),
    ];
    // optional criterion numbers on the command line restrict the run
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(k + 1)) {
            continue;
        }
        let t = Instant::now();
        let r = run();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("criterion {:>2} PASS [{secs:.1}s] {name}: {d}", k + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.1}s] {name}: {d}", k + 1)
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
