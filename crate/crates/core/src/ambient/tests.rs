use super::*;

fn schw(m: f64) -> AmbientMetric {
    AmbientMetric::schwarzschild(m).unwrap()
}

fn bump() -> AmbientMetric {
    AmbientMetric::rotsym(Warp::Bump {
        amplitude: 0.3,
        center: 2.0,
        width: 0.7,
    })
    .unwrap()
}

fn perturbed(eps: f64) -> AmbientMetric {
    AmbientMetric::perturbed(
        Warp::Schwarzschild { mass: 0.1 },
        Perturbation {
            amplitude: eps,
            l: 2,
            m: 1,
            s_in: 0.5,
            s_out: 3.0,
        },
    )
    .unwrap()
}

fn sample_points() -> Vec<Vector3<f64>> {
    vec![
        Vector3::new(1.0, 2.0, 2.5),
        Vector3::new(-3.0, 0.5, 0.2),
        Vector3::new(0.1, -0.2, 4.0),
        Vector3::new(2.2, -1.7, -1.1),
    ]
}

fn directions() -> Vec<Vector3<f64>> {
    vec![
        Vector3::new(0.3, -0.4, 0.9),
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(-0.2, 0.7, 0.1),
    ]
}

fn unit(g: &Matrix3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    v / v.dot(&(g * v)).sqrt()
}

#[test]
fn warp_derivatives_match_finite_differences() {
    for w in [
        Warp::Schwarzschild { mass: 1.0 },
        Warp::Bump {
            amplitude: 0.3,
            center: 2.0,
            width: 0.7,
        },
    ] {
        for s in [2.5, 3.0, 4.7] {
            let h = 1e-4;
            let f = |x: f64| w.eval(x).0;
            let (_, d1, d2) = w.eval(s);
            let fd1 = (f(s + h) - f(s - h)) / (2.0 * h);
            let fd2 = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-7 * (1.0 + d1.abs()), "{w:?} {s}");
            assert!((d2 - fd2).abs() < 1e-5 * (1.0 + d2.abs()), "{w:?} {s}");
        }
    }
}

#[test]
fn analytic_metric_derivatives_match_finite_differences() {
    let amb = bump();
    for y in sample_points() {
        let d1 = amb.metric_d1(&y).unwrap();
        let d2 = amb.metric_d2(&y).unwrap();
        let h = 1e-5;
        for k in 0..3 {
            let e = Vector3::ith(k, h);
            let fd = (amb.metric(&(y + e)).unwrap() - amb.metric(&(y - e)).unwrap()) / (2.0 * h);
            assert!((fd - d1[k]).abs().max() < 1e-8);
            let fd2 = (amb.metric_d1(&(y + e)).unwrap()[0] - amb.metric_d1(&(y - e)).unwrap()[0]) / (2.0 * h);
            assert!((fd2 - d2[k][0]).abs().max() < 1e-7);
        }
    }
}

#[test]
fn closed_form_connection_matches_generic() {
    for amb in [schw(0.7), bump()] {
        for y in sample_points() {
            let c = amb.connection(&y).unwrap();
            let generic = christoffel(&c.g_inv, &amb.metric_d1(&y).unwrap());
            for l in 0..3 {
                assert!((c.gamma[l] - generic[l]).abs().max() < 1e-13);
            }
            assert!((c.g * c.g_inv - Matrix3::identity()).abs().max() < 1e-13);
        }
    }
}

#[test]
fn schwarzschild_is_vacuum() {
    for m in [0.1, 1.0] {
        let amb = schw(m);
        for y in sample_points() {
            assert!(amb.scalar_curvature(&y).unwrap().abs() < 1e-10);
            assert!(amb.riemann(&y).unwrap().scalar().abs() < 1e-10);
        }
    }
}

#[test]
fn schwarzschild_radial_curvatures() {
    let m = 1.0;
    let amb = schw(m);
    for s in [2.5, 3.0, 10.0] {
        let y = Vector3::new(0.0, 0.6, 0.8) * s;
        let g = amb.metric(&y).unwrap();
        let nu = unit(&g, &(y / s));
        let c = amb.normal_curvatures(&y, &nu).unwrap();
        let exact = 2.0 * m / s.powi(3);
        assert!((c.ricci_nn + exact).abs() < 1e-12 * (1.0 + exact));
        assert!((c.k12 - exact).abs() < 1e-12 * (1.0 + exact));
        assert!((amb.ricci_normal(&y, &nu).unwrap() + exact).abs() < 1e-12);
    }
}

#[test]
fn generic_riemann_agrees_with_closed_forms() {
    for amb in [schw(0.5), bump()] {
        for y in sample_points() {
            let g = amb.metric(&y).unwrap();
            let rm = amb.riemann(&y).unwrap();
            let ric = rm.ricci();
            for d in directions() {
                let nu = unit(&g, &d);
                let closed = amb.normal_curvatures(&y, &nu).unwrap();
                assert!((rm.scalar() - closed.scalar).abs() < 1e-10);
                assert!((nu.dot(&(ric * nu)) - closed.ricci_nn).abs() < 1e-10);
                let (e1, e2) = orthonormal_complement(&g, &nu);
                assert!((rm.sectional(&e1, &e2) - closed.k12).abs() < 1e-10);
                assert!((amb.sectional_tangent(&y, &e1, &e2).unwrap() - closed.k12).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn round_sphere_sign_convention() {
    // the bump warp with positive amplitude has positive tangential curvature
    let amb = bump();
    let y = Vector3::new(0.0, 0.0, 2.0);
    let (kr, kt) = amb.radial_tangential(2.0);
    assert!(kt > 0.0);
    let rm = amb.riemann(&y).unwrap();
    let k = rm.sectional(&Vector3::x(), &Vector3::y());
    assert!((k - kt).abs() < 1e-10, "{k} {kt} {kr}");
}

#[test]
fn k12_identity_holds_everywhere() {
    for amb in [AmbientMetric::euclidean(), schw(0.3), bump(), perturbed(0.05)] {
        for y in sample_points() {
            let g = amb.metric(&y).unwrap();
            for d in directions() {
                let c = amb.normal_curvatures(&y, &unit(&g, &d)).unwrap();
                assert!((c.k12 - 0.5 * (c.scalar - 2.0 * c.ricci_nn)).abs() < 1e-10, "{:?}", amb.kind());
            }
        }
    }
}

#[test]
fn flat_cases_have_zero_curvature() {
    let flat = AmbientMetric::euclidean();
    let rot_flat = AmbientMetric::rotsym(Warp::Bump {
        amplitude: 0.0,
        center: 1.0,
        width: 1.0,
    })
    .unwrap();
    for amb in [flat, rot_flat] {
        for y in sample_points() {
            let g = amb.metric(&y).unwrap();
            let c = amb.normal_curvatures(&y, &unit(&g, &directions()[0])).unwrap();
            assert_eq!((c.scalar, c.ricci_nn, c.k12), (0.0, 0.0, 0.0));
        }
    }
}

#[test]
fn perturbation_converges_linearly() {
    let base = schw(0.1);
    let y = Vector3::new(0.6, 0.8, 1.0);
    let nu = Vector3::new(0.2, 0.3, 0.9);
    let defect = |eps: f64| {
        let amb = perturbed(eps);
        let g = amb.metric(&y).unwrap();
        let c = amb.normal_curvatures(&y, &unit(&g, &nu)).unwrap();
        let gb = base.metric(&y).unwrap();
        let b = base.normal_curvatures(&y, &unit(&gb, &nu)).unwrap();
        ((c.scalar - b.scalar).abs(), (c.ricci_nn - b.ricci_nn).abs())
    };
    let (r1, q1) = defect(1e-2);
    let (r2, q2) = defect(5e-3);
    assert!(r1 > 1e-6 && q1 > 1e-6);
    assert!((r1 / r2 - 2.0).abs() < 0.05, "{r1} {r2}");
    assert!((q1 / q2 - 2.0).abs() < 0.05, "{q1} {q2}");
}

#[test]
fn outside_chart_is_rejected() {
    let amb = schw(1.0);
    assert!(matches!(
        amb.metric(&Vector3::new(1.5, 0.0, 0.0)),
        Err(Error::OutsideChart { .. })
    ));
    assert!(AmbientMetric::euclidean().metric(&Vector3::zeros()).is_err());
}

#[test]
fn af_constants_of_model_families() {
    let shells = [10.0, 100.0, 1000.0];
    let e = AmbientMetric::euclidean().af_constants(&shells);
    assert_eq!((e.c_metric, e.c_deriv, e.c_deriv2), (0.0, 0.0, 0.0));

    let m = 0.5;
    let s = schw(m).af_constants(&shells);
    let far = s.shells.last().unwrap();
    assert!((far.c_metric - 2.0 * m).abs() < 2e-3 * 2.0 * m, "{}", far.c_metric);
    assert!(s.tail.windows(2).all(|w| w[0].c_metric >= w[1].c_metric));
    assert!(s.c_metric.is_finite() && s.c_deriv.is_finite() && s.c_deriv2.is_finite());

    let zonal = |eps: f64| {
        AmbientMetric::perturbed(
            Warp::Schwarzschild { mass: 0.1 },
            Perturbation {
                amplitude: eps,
                l: 2,
                m: 0,
                s_in: 0.5,
                s_out: 3.0,
            },
        )
        .unwrap()
        .af_constants(&[1.0, 2.0, 5.0])
    };
    let base = schw(0.1).af_constants(&[1.0, 2.0, 5.0]);
    let d1 = zonal(0.01).c_metric - base.c_metric;
    let d2 = zonal(0.02).c_metric - base.c_metric;
    assert!(d1 > 0.0 && (d2 / d1 - 2.0).abs() < 0.2, "{d1} {d2}");
}
