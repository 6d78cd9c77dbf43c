use super::*;
use crate::ambient::Warp;
use std::f64::consts::{LN_2, PI};

fn config(amb: AmbientMetric, s0: f64, t: f64, mode: FlowMode, nt: usize) -> FlowConfig {
    FlowConfig {
        n_theta: nt,
        n_phi: 2 * nt,
        diagnostics: DiagnosticsOptions::minimal(),
        ..FlowConfig::sphere(amb, s0, t, mode)
    }
}

#[test]
fn ode_radius_doubles() {
    assert!((step_ode_rotsym(1.3, 2.0 * LN_2) - 2.6).abs() < 1e-14);
    assert_eq!(step_ode_rotsym(1.3, 0.0), 1.3);
}

#[test]
fn output_times_cover_interval() {
    let mut c = config(AmbientMetric::euclidean(), 1.0, 1.0, FlowMode::Ode, 8);
    c.output_dt = 0.3;
    let t = c.output_times();
    assert_eq!(t.first(), Some(&0.0));
    assert_eq!(t.last(), Some(&1.0));
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    c.output_dt = 0.25;
    assert_eq!(c.output_times().len(), 5);
}

#[test]
fn ode_area_law() {
    let trace = run_flow(&config(AmbientMetric::euclidean(), 1.0, 1.0, FlowMode::Ode, 16)).unwrap();
    let last = trace.states.last().unwrap();
    assert!((last.area - 4.0 * PI * 1f64.exp()).abs() < 1e-8 * last.area);
    for s in &trace.states {
        let want = trace.states[0].area * s.t.exp();
        assert!((s.area - want).abs() < 1e-8 * want);
    }
}

#[test]
fn validation_rejects_bad_configs() {
    let mut c = config(AmbientMetric::euclidean(), 1.0, 1.0, FlowMode::Ode, 16);
    c.bounds.h0 = 0.0;
    assert!(c.validate().is_err());
    let mut c = config(AmbientMetric::euclidean(), 1.0, 1.0, FlowMode::Ode, 16);
    c.bounds.a1 = 0.1;
    c.bounds.h1 = 1.0;
    assert!(c.validate().is_err());
    let mut c = config(AmbientMetric::euclidean(), 1.0, 1.0, FlowMode::Ode, 16);
    c.initial = InitialSurface::Perturbed {
        s0: 1.0,
        amplitude: 0.1,
        l: 2,
        m: 0,
    };
    assert!(c.validate().is_err());
}

#[test]
fn pde_tracks_ode_on_round_spheres() {
    for amb in [AmbientMetric::euclidean(), AmbientMetric::schwarzschild(1.0).unwrap()] {
        let s0 = if amb.mass() > 0.0 { 3.0 } else { 1.0 };
        let ode = run_flow(&config(amb, s0, 0.4, FlowMode::Ode, 12)).unwrap();
        let pde = run_flow(&config(amb, s0, 0.4, FlowMode::Pde, 12)).unwrap();
        for (a, b) in ode.states.iter().zip(&pde.states) {
            assert_eq!(a.t, b.t);
            let dev = b.rho.values.iter().fold(0.0_f64, |m, r| m.max((r / a.rho.values[0] - 1.0).abs()));
            assert!(dev < 1e-6, "{:?} t={} {dev}", amb.kind(), a.t);
            assert!((b.area / a.area - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn perturbed_sphere_becomes_rounder() {
    let mut c = config(AmbientMetric::euclidean(), 1.0, 0.6, FlowMode::Pde, 16);
    c.initial = InitialSurface::Perturbed {
        s0: 1.0,
        amplitude: 0.05,
        l: 2,
        m: 0,
    };
    c.output_dt = 0.1;
    let trace = run_flow(&c).unwrap();
    let aniso: Vec<f64> = trace
        .states
        .iter()
        .map(|s| {
            s.lambda1
                .values
                .iter()
                .zip(&s.lambda2.values)
                .zip(&s.h.values)
                .fold(0.0_f64, |m, ((a, b), h)| m.max((b - a) / h))
        })
        .collect();
    assert!(aniso.windows(2).all(|w| w[1] < w[0]), "{aniso:?}");
    let a0 = trace.states[0].area;
    for s in &trace.states {
        assert!((s.area / (a0 * s.t.exp()) - 1.0).abs() < 1e-4, "{}", s.t);
    }
}

#[test]
fn class_violations_follow_policy() {
    let mut c = config(AmbientMetric::euclidean(), 1.0, 0.5, FlowMode::Ode, 8);
    c.bounds = ClassBounds {
        h0: 1.9,
        h1: 10.0,
        a1: 10.0,
    };
    let trace = run_flow(&c).unwrap();
    assert!(trace.outside_class);
    assert!(trace.class_violations.iter().all(|v| v.bound == Bound::H0 && v.t > 0.0));
    c.policy = ViolationPolicy::Abort;
    assert!(matches!(run_flow(&c), Err(Error::ClassViolation { bound: "H0", .. })));
}

#[test]
fn rotsym_warp_sphere_stays_round() {
    let amb = AmbientMetric::rotsym(Warp::Bump {
        amplitude: 0.2,
        center: 1.5,
        width: 0.5,
    })
    .unwrap();
    let pde = run_flow(&config(amb, 1.2, 0.3, FlowMode::Pde, 10)).unwrap();
    for s in &pde.states {
        let want = step_ode_rotsym(1.2, s.t);
        assert!(s.rho.values.iter().all(|r| (r / want - 1.0).abs() < 1e-6), "{}", s.t);
    }
}
