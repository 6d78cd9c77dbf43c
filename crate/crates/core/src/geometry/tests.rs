use super::*;
use crate::harmonics::real_ylm;
use std::f64::consts::PI;

fn grid(nt: usize) -> Arc<SphericalGrid> {
    Arc::new(SphericalGrid::new(nt, 2 * nt).unwrap())
}

fn sphere(amb: &AmbientMetric, nt: usize, r: f64) -> FlowState {
    induced_geometry(amb, &ScalarField::constant(grid(nt), r)).unwrap()
}

fn max_dev(v: &[f64], c: f64) -> f64 {
    v.iter().fold(0.0, |m, x| m.max((x - c).abs()))
}

/// Radial graph of the ellipsoid x²/a² + y²/a² + z²/c² = 1.
fn ellipsoid(nt: usize, a: f64, c: f64) -> ScalarField {
    ScalarField::from_fn(grid(nt), |t, _| {
        1.0 / ((t.sin() / a).powi(2) + (t.cos() / c).powi(2)).sqrt()
    })
}

/// Closed-form (H, K) of that ellipsoid at a surface point.
fn ellipsoid_oracle(p: &V3, a: f64, c: f64) -> (f64, f64) {
    let n2 = (p.x * p.x + p.y * p.y) / a.powi(4) + p.z * p.z / c.powi(4);
    let abc2 = (a * a * c).powi(2);
    let h = (2.0 * a * a + c * c - p.norm_squared()) / (abc2 * n2.powf(1.5));
    let k = 1.0 / (abc2 * n2 * n2);
    (h, k)
}

#[test]
fn euclidean_round_sphere() {
    let r = 1.7;
    let s = sphere(&AmbientMetric::euclidean(), 16, r);
    assert!(max_dev(&s.h.values, 2.0 / r) < 1e-12);
    assert!(max_dev(&s.lambda1.values, 1.0 / r) < 1e-7);
    assert!(max_dev(&s.lambda2.values, 1.0 / r) < 1e-7);
    assert!((s.area - 4.0 * PI * r * r).abs() < 1e-12 * s.area);
    let k = gauss_curvature(&s, &AmbientMetric::euclidean()).unwrap();
    assert!(max_dev(&k.extrinsic.values, 1.0 / (r * r)) < 1e-12);
    assert!(max_dev(&k.intrinsic.values, 1.0 / (r * r)) < 1e-10);
    let chi = euler_characteristic(&s, &AmbientMetric::euclidean()).unwrap();
    assert!((chi - 2.0).abs() < 1e-8);
}

#[test]
fn schwarzschild_coordinate_sphere() {
    let m = 1.0;
    let amb = AmbientMetric::schwarzschild(m).unwrap();
    for s0 in [2.5, 3.0, 7.0] {
        let s = sphere(&amb, 12, s0);
        let h = 2.0 / s0 * (1.0 - 2.0 * m / s0).sqrt();
        assert!(max_dev(&s.h.values, h) < 1e-12 * h);
        let k = gauss_curvature(&s, &amb).unwrap();
        assert!(max_dev(&k.extrinsic.values, 1.0 / (s0 * s0)) < 1e-12);
        assert!(max_dev(&k.intrinsic.values, 1.0 / (s0 * s0)) < 1e-10);
        assert!((euler_characteristic(&s, &amb).unwrap() - 2.0).abs() < 1e-8);
        assert!(max_dev(&s.normal.iter().map(|n| n.dot(&(n.normalize())) - n.norm()).collect::<Vec<_>>(), 0.0) < 1e-14);
    }
}

#[test]
fn trace_of_a_equals_h() {
    let amb = AmbientMetric::schwarzschild(0.2).unwrap();
    let rho = ScalarField::from_fn(grid(16), |t, p| 2.0 + 0.1 * real_ylm(3, 1, t, p).value);
    let s = induced_geometry(&amb, &rho).unwrap();
    for (tr, h) in s.trace_a().iter().zip(&s.h.values) {
        assert!((tr - h).abs() < 1e-10 * h.abs());
    }
}

#[test]
fn ellipsoid_matches_closed_form() {
    let (a, c) = (1.0, 1.3);
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for nt in [32, 64] {
        let s = induced_geometry(&AmbientMetric::euclidean(), &ellipsoid(nt, a, c)).unwrap();
        let k = gauss_curvature(&s, &AmbientMetric::euclidean()).unwrap();
        let (mut eh, mut ek) = (0.0_f64, 0.0_f64);
        for (i, p) in s.positions.iter().enumerate() {
            let (h, kk) = ellipsoid_oracle(p, a, c);
            eh = eh.max((s.h.values[i] - h).abs());
            ek = ek.max((k.extrinsic.values[i] - kk).abs());
        }
        // third order next to the poles, fourth order elsewhere
        assert!(eh < prev.0 / 6.0 && ek < prev.1 / 6.0, "{nt}: {eh} {ek}");
        prev = (eh, ek);
    }
    assert!(prev.0 < 5e-5 && prev.1 < 5e-5, "{prev:?}");
}

fn perturbed_rho(nt: usize) -> ScalarField {
    ScalarField::from_fn(grid(nt), |t, p| {
        2.5 * (1.0 + 0.15 * real_ylm(2, 0, t, p).value + 0.1 * real_ylm(2, 2, t, p).value
            - 0.05 * real_ylm(3, -1, t, p).value)
    })
}

#[test]
fn gauss_bonnet_converges() {
    let amb = AmbientMetric::schwarzschild(0.3).unwrap();
    let mut errs = Vec::new();
    for nt in [12, 24] {
        let s = induced_geometry(&amb, &perturbed_rho(nt)).unwrap();
        let chi = euler_characteristic(&s, &amb).unwrap();
        errs.push(((chi - 2.0).abs(), s.grid().spacing()));
    }
    assert!(errs[1].0 < 1e-4, "{errs:?}");
    let slope = (errs[0].0 / errs[1].0).ln() / (errs[0].1 / errs[1].1).ln();
    assert!(slope >= 1.8, "slope {slope} {errs:?}");
}

#[test]
fn gauss_equation_consistency_converges() {
    let amb = AmbientMetric::schwarzschild(0.3).unwrap();
    let mut errs = Vec::new();
    for nt in [16, 32] {
        let s = induced_geometry(&amb, &perturbed_rho(nt)).unwrap();
        let k = gauss_curvature(&s, &amb).unwrap();
        let e = k
            .extrinsic
            .values
            .iter()
            .zip(&k.intrinsic.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        errs.push((e, s.grid().spacing()));
    }
    let slope = (errs[0].0 / errs[1].0).ln() / (errs[0].1 / errs[1].1).ln();
    assert!(slope >= 1.8, "slope {slope} {errs:?}");
}

#[test]
fn gradient_of_cos_theta() {
    let g = grid(24);
    let metric = SymTensorField2::round(g.clone(), 1.0);
    let f = ScalarField::from_fn(g.clone(), |t, _| t.cos());
    let gn = grad_norm_sq(&f, &metric).unwrap();
    for (k, v) in gn.values.iter().enumerate() {
        let t = g.node(k).0;
        assert!((v - t.sin().powi(2)).abs() < 5e-5, "{t}: {}", v - t.sin().powi(2));
    }
    let scaled = grad_norm_sq(&f, &metric.scale(4.0)).unwrap();
    for (a, b) in scaled.values.iter().zip(&gn.values) {
        assert!((a - b / 4.0).abs() < 1e-15);
    }
    let c = grad_norm_sq(&ScalarField::constant(g, 3.0), &metric).unwrap();
    assert!(c.max_abs() < 1e-12);
}

#[test]
fn surface_outside_chart_is_an_error() {
    let amb = AmbientMetric::schwarzschild(1.0).unwrap();
    let rho = ScalarField::constant(grid(8), 1.9);
    assert!(matches!(induced_geometry(&amb, &rho), Err(Error::OutsideChart { .. })));
}
