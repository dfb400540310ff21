use finsler::connection_real::flag_curvature;
use finsler::geometry::{complex_metric_value, complex_to_real};
use finsler::jet::lift_all;
use finsler::metrics::{instantiate, ComplexMatrix, FamilySpec, HermitianSpec, KahlerPotential, MetricDef, Profile};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn catalog() -> Vec<MetricDef> {
    [
        FamilySpec::Poincare { complex_dim: 2, scale: 1.0 },
        FamilySpec::Minkowski {
            factors: vec![ComplexMatrix::identity(2), ComplexMatrix { re: vec![vec![2.0, 0.5], vec![0.5, 1.0]], im: vec![] }],
            p: 2.5,
            perturb: 0.1,
        },
        FamilySpec::Szabo {
            k: 2,
            eps: 0.5,
            factors: vec![HermitianSpec::Poincare { complex_dim: 1, scale: 1.0 }, HermitianSpec::Identity { complex_dim: 1 }],
        },
        FamilySpec::UnInvariant {
            complex_dim: 2,
            profile: Profile::Kahler { f: KahlerPotential::Exp { c: 1.0 } },
            radius: Some(0.9),
        },
    ]
    .iter()
    .map(|s| instantiate(s).unwrap())
    .collect()
}

fn cvec(a: [f64; 4]) -> Vec<C> {
    vec![C::new(a[0], a[1]), C::new(a[2], a[3])]
}

fn coords() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-0.3..0.3f64)
}

fn dirs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64).prop_filter("away from zero", |v| v.iter().map(|a| a * a).sum::<f64>() > 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn complex_homogeneity(z in coords(), v in dirs(), re in -2.0..2.0f64, im in -2.0..2.0f64, which in 0usize..4) {
        prop_assume!(re * re + im * im > 0.01);
        let d = &catalog()[which];
        let (z, v) = (cvec(z), cvec(v));
        let lam = C::new(re, im);
        let scaled: Vec<C> = v.iter().map(|a| a * lam).collect();
        let g = complex_metric_value(d.metric.as_ref(), &z, &v).unwrap();
        let gs = complex_metric_value(d.metric.as_ref(), &z, &scaled).unwrap();
        prop_assert!((gs - lam.norm_sqr() * g).abs() <= 1e-12 * gs.abs().max(1.0));
    }

    #[test]
    fn flag_curvature_depends_only_on_the_flag(z in coords(), u in dirs(), e in dirs(), s in 0.3..3.0f64, a in -2.0..2.0f64, which in 0usize..4) {
        let d = &catalog()[which];
        let m = d.realified();
        let x = complex_to_real(&cvec(z));
        let k = flag_curvature(&m, &x, &u, &e);
        prop_assume!(k.is_ok());
        let k = k.unwrap();
        let u2: Vec<f64> = u.iter().map(|c| s * c).collect();
        let e2: Vec<f64> = e.iter().zip(&u).map(|(b, c)| -1.5 * b + a * c).collect();
        let k2 = flag_curvature(&m, &x, &u2, &e2).unwrap();
        prop_assert!((k - k2).abs() <= 1e-8 * k.abs().max(1.0), "{} vs {}", k, k2);
    }

    #[test]
    fn jet_first_and_second_derivatives(x in -1.0..1.0f64, y in -1.0..1.0f64) {
        // f = sin(x) e^{xy} / (2 + y^2)
        let v = lift_all(&[x, y], 4);
        let f = v[0].sin() * (&v[0] * &v[1]).exp() * (v[1].square() + 2.0).recip();
        let e = (x * y).exp();
        let q = 2.0 + y * y;
        let fx = (x.cos() + y * x.sin()) * e / q;
        let fy = x.sin() * e * (x / q - 2.0 * y / (q * q));
        let fxx = (-x.sin() + 2.0 * y * x.cos() + y * y * x.sin()) * e / q;
        prop_assert!((f.partial(&[1, 0]) - fx).abs() < 1e-12);
        prop_assert!((f.partial(&[0, 1]) - fy).abs() < 1e-12);
        prop_assert!((f.partial(&[2, 0]) - fxx).abs() < 1e-12);
    }
}
