use super::*;
use crate::metrics::{ComplexMatrix, HermitianSpec};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn disk_spec() -> FamilySpec {
    FamilySpec::Poincare {
        complex_dim: 1,
        scale: 1.0,
    }
}

fn id1() -> HoloMap {
    HoloMap::new(&MapSpec::Identity { dim: 1 }).unwrap()
}

fn small_plan() -> SamplePlan {
    SamplePlan {
        points: 6,
        directions: 5,
        ..SamplePlan::default()
    }
}

#[test]
fn gaussian_curvature_examples() {
    let hyp = |z: &CJet| -> Result<Jet> {
        let t = (z * &z.conj()).re();
        Ok((-t + 1.0).powi(2).recip())
    };
    for zeta in [c(0.0, 0.0), c(0.3, -0.4), c(-0.7, 0.1)] {
        assert!((gaussian_curvature(hyp, zeta).unwrap() + 4.0).abs() < 1e-8);
        assert_eq!(gaussian_curvature(|_z: &CJet| Ok(Jet::constant(2, 2, 3.0)), zeta).unwrap(), 0.0);
    }
    let gauss = |z: &CJet| -> Result<Jet> { Ok((z * &z.conj()).re().exp()) };
    assert!((gaussian_curvature(gauss, c(0.0, 0.0)).unwrap() + 2.0).abs() < 1e-12);
    assert!(gaussian_curvature(|_z: &CJet| Ok(Jet::constant(2, 2, -1.0)), c(0.0, 0.0)).is_err());
}

#[test]
fn identity_pullback_ratio_is_one() {
    let d = instantiate(&disk_spec()).unwrap();
    let probe = |z: &CJet| Ok(vec![z.clone()]);
    for r in pullback(&id1(), &d, &d, &probe, &disk_grid(4, 6, 0.9)) {
        assert_eq!(r.status, DensityStatus::Regular);
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }
}

#[test]
fn square_map_ratio_matches_closed_form() {
    let d = instantiate(&disk_spec()).unwrap();
    let sq = HoloMap::new(&MapSpec::Power { m: 2, dim: 1 }).unwrap();
    let probe = |z: &CJet| Ok(vec![z.clone()]);
    let rows = pullback(&sq, &d, &d, &probe, &disk_grid(5, 7, 0.95));
    for r in &rows {
        let t = r.zeta.norm_sqr();
        assert!((r.ratio - 4.0 * t / (1.0 + t).powi(2)).abs() < 1e-8);
        assert!(r.ratio < 1.0);
    }
    // at the origin the derivative of ζ² vanishes
    let r0 = &pullback(&sq, &d, &d, &probe, &[c(0.0, 0.0)])[0];
    assert_eq!(r0.status, DensityStatus::SigmaZero);
    assert_eq!(r0.ratio, 0.0);
}

#[test]
fn removable_point_uses_the_limit() {
    let d = instantiate(&disk_spec()).unwrap();
    let probe = |z: &CJet| Ok(vec![(z * z).scale(c(0.5, 0.0))]);
    let r = &pullback(&id1(), &d, &d, &probe, &[c(0.0, 0.0)])[0];
    assert_eq!(r.status, DensityStatus::Removable);
    assert!((r.ratio - 1.0).abs() < 1e-6);
}

#[test]
fn reparametrisation_covariance() {
    let d = instantiate(&disk_spec()).unwrap();
    let sq = HoloMap::new(&MapSpec::Power { m: 2, dim: 1 }).unwrap();
    let h = HoloMap::new(&MapSpec::Mobius {
        a: [0.3, -0.2],
        theta: 0.7,
    })
    .unwrap();
    let probe = |z: &CJet| Ok(vec![(z * z).scale(c(0.3, 0.1)) + z.scale(c(0.6, 0.0)) + c(0.05, 0.0)]);
    let composed = |z: &CJet| probe(&h.eval_jets(std::slice::from_ref(z))?[0]);
    let grid = disk_grid(3, 5, 0.6);
    let moved: Vec<C> = grid.iter().map(|w| h.eval(&[*w]).unwrap()[0]).collect();
    let a = pullback(&sq, &d, &d, &composed, &grid);
    let b = pullback(&sq, &d, &d, &probe, &moved);
    for (x, y) in a.iter().zip(&b) {
        assert!((x.ratio - y.ratio).abs() < 1e-9, "{} vs {}", x.ratio, y.ratio);
    }
}

#[test]
fn curvature_bounds_by_role() {
    let plan = small_plan();
    let d = instantiate(&disk_spec()).unwrap();
    for role in [Role::Domain, Role::Target] {
        assert!((curvature_bounds(&d, role, &plan).unwrap().value + 4.0).abs() < 1e-8);
    }
    let scaled = instantiate(&FamilySpec::Poincare {
        complex_dim: 1,
        scale: 2.0,
    })
    .unwrap();
    assert!((curvature_bounds(&scaled, Role::Target, &plan).unwrap().value + 2.0).abs() < 1e-8);
    let e = instantiate(&FamilySpec::Euclidean { complex_dim: 2 }).unwrap();
    assert_eq!(curvature_bounds(&e, Role::Domain, &plan).unwrap().value, 0.0);
    assert!(matches!(curvature_bounds(&e, Role::Target, &plan), Err(FinslerError::Hypothesis(_))));
}

#[test]
fn certificates() {
    let plan = small_plan();
    let id = certify_schwarz(&MapSpec::Identity { dim: 1 }, &disk_spec(), &disk_spec(), &plan, SCHWARZ_TOL).unwrap();
    assert!(id.passed && (id.max_ratio - 1.0).abs() < 1e-6 && (id.bound - 1.0).abs() < 1e-6, "{id:?}");
    let mob = certify_schwarz(
        &MapSpec::Mobius {
            a: [0.4, 0.1],
            theta: 1.3,
        },
        &disk_spec(),
        &disk_spec(),
        &plan,
        SCHWARZ_TOL,
    )
    .unwrap();
    assert!(mob.passed && (mob.max_ratio - 1.0).abs() < 1e-6, "{mob:?}");
    let sq = certify_schwarz(&MapSpec::Power { m: 2, dim: 1 }, &disk_spec(), &disk_spec(), &plan, SCHWARZ_TOL).unwrap();
    assert!(sq.passed && sq.max_ratio < 1.0);

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
    let cert = certify_schwarz(&lin, &mink, &disk_spec(), &plan, SCHWARZ_TOL).unwrap();
    assert!(cert.hypotheses_met && cert.bound == 0.0 && !cert.passed, "{cert:?}");
    let constant = MapSpec::Constant {
        dim: 2,
        value: vec![[0.2, 0.1]],
    };
    let cert = certify_schwarz(&constant, &mink, &disk_spec(), &plan, SCHWARZ_TOL);
    assert!(cert.unwrap().passed);
}

#[test]
fn unmet_hypotheses_are_recorded() {
    let e = FamilySpec::Euclidean { complex_dim: 1 };
    let cert = certify_schwarz(&MapSpec::Identity { dim: 1 }, &disk_spec(), &e, &small_plan(), SCHWARZ_TOL).unwrap();
    assert!(!cert.hypotheses_met && !cert.passed);
    assert!(cert.notes.iter().any(|n| n.contains("hypotheses unmet")));
}

#[test]
fn comparison_is_equality_on_poincare() {
    let d = instantiate(&disk_spec()).unwrap();
    let curve = |z: &CJet| Ok(vec![z.clone()]);
    for zeta in [c(0.0, 0.0), c(0.5, 0.2)] {
        let r = curvature_comparison(d.metric.as_ref(), &curve, zeta, -4.0, 1e-9).unwrap();
        assert!(r.passed && (r.lhs - r.rhs).abs() < 1e-9, "{r:?}");
    }
    let ball = instantiate(&FamilySpec::Poincare {
        complex_dim: 2,
        scale: 1.0,
    })
    .unwrap();
    let curve = |z: &CJet| Ok(vec![z.scale(c(0.4, 0.1)), (z * z).scale(c(0.2, -0.3))]);
    let r = curvature_comparison(ball.metric.as_ref(), &curve, c(0.3, 0.3), -4.0, 1e-9).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn extremal_disks_attain_holomorphic_curvature() {
    let ball = instantiate(&FamilySpec::Poincare {
        complex_dim: 2,
        scale: 1.0,
    })
    .unwrap();
    let warped = instantiate(&FamilySpec::Hermitian {
        h: HermitianSpec::Warped {
            complex_dim: 2,
            c: 0.7,
        },
    })
    .unwrap();
    let z = [c(0.3, -0.2), c(0.1, 0.4)];
    let v = [c(0.7, 0.2), c(-0.3, 0.5)];
    let ws = vec![
        vec![c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.5, 0.1), c(-0.2, 0.3)],
        vec![c(-1.0, 0.0), c(0.0, 2.0)],
    ];
    for d in [ball, warped] {
        let r = maximality_check(&d, &z, &v, &ws, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
