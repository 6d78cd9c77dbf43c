use super::*;
use crate::field::ScalarField;
use crate::flow::{run_flow, FlowConfig, FlowMode, InitialSurface};
use crate::geometry::induced_geometry;
use crate::grid::SphericalGrid;
use std::sync::Arc;

fn ode(amb: AmbientMetric, s0: f64, t: f64, opts: DiagnosticsOptions) -> FlowTrace {
    let mut c = FlowConfig::sphere(amb, s0, t, FlowMode::Ode);
    c.diagnostics = opts;
    run_flow(&c).unwrap()
}

fn schwarzschild_trace() -> FlowTrace {
    ode(AmbientMetric::schwarzschild(1.0).unwrap(), 3.0, 1.0, DiagnosticsOptions::minimal())
}

fn round(r: f64, nt: usize) -> FlowState {
    let grid = Arc::new(SphericalGrid::new(nt, 2 * nt).unwrap());
    induced_geometry(&AmbientMetric::euclidean(), &ScalarField::constant(grid, r)).unwrap()
}

#[test]
fn hawking_mass_closed_forms() {
    assert!(hawking_mass(&round(1.7, 12)).abs() < 1e-12);
    let amb = AmbientMetric::schwarzschild(0.8).unwrap();
    let grid = Arc::new(SphericalGrid::new(12, 24).unwrap());
    for s in [2.0, 4.0, 9.0] {
        let st = induced_geometry(&amb, &ScalarField::constant(grid.clone(), s)).unwrap();
        assert!((hawking_mass(&st) - 0.8).abs() < 1e-10);
    }
    let r0 = 2.5;
    let m = 0.3;
    let v = hawking_mass_from(4.0 * PI * r0 * r0, 16.0 * PI * (1.0 - 2.0 * m / r0));
    assert!((v - m).abs() < 1e-14);
}

#[test]
fn average_h2_targets() {
    assert_eq!(avg_h2_target(0.0, 2.0, 0.0, Scenario::Pmt), 1.0);
    assert!((avg_h2_target(0.0, 2.0, 0.3, Scenario::Rpi) - (1.0 - 0.3)).abs() < 1e-15);
    assert_eq!(
        avg_h2_target(0.7, 2.0, 0.0, Scenario::Rpi),
        avg_h2_target(0.7, 2.0, 0.0, Scenario::Pmt)
    );
}

#[test]
fn euclidean_identities_vanish() {
    let tr = ode(AmbientMetric::euclidean(), 1.0, 1.0, DiagnosticsOptions::minimal());
    for k in 1..tr.diagnostics.len() - 1 {
        let (l, r) = dt_int_h2_identity(&tr, k).unwrap();
        assert!(l.abs() < 1e-8 && r.abs() < 1e-8, "{l} {r}");
        assert!(crucial_identity_residual(&tr, k).unwrap().residual < 1e-8);
    }
    assert!(dt_int_h2_identity(&tr, 0).is_err());
    assert!(dt_int_h2_identity(&tr, tr.diagnostics.len() - 1).is_err());
    for row in corollary_limits_report(&tr, 0.0) {
        assert!(row.deviations.iter().all(|d| *d < 1e-8), "{row:?}");
    }
}

#[test]
fn schwarzschild_lemma22_against_analytic_derivative() {
    let tr = schwarzschild_trace();
    for k in 1..tr.diagnostics.len() - 1 {
        let r = &tr.diagnostics[k];
        let s = 3.0 * (0.5 * r.t).exp();
        let exact = 16.0 * PI / s;
        assert!((r.dt_int_h2 - exact).abs() < 1e-6, "{} {}", r.dt_int_h2, exact);
        let (l, rhs) = dt_int_h2_identity(&tr, k).unwrap();
        assert!((l - rhs).abs() < 1e-6);
        assert!((rhs - 0.5 * r.m_h * (16.0 * PI).powf(1.5) / r.area.sqrt()).abs() < 1e-6);
    }
}

#[test]
fn schwarzschild_crucial_identity_and_slack_band() {
    let tr = schwarzschild_trace();
    for k in 1..tr.diagnostics.len() - 1 {
        let c = crucial_identity_residual(&tr, k).unwrap();
        let r = &tr.diagnostics[k];
        assert!(c.residual < 1e-6, "{}", c.residual);
        assert!(c.slack_statement.abs() < 1e-6);
        let band = r.m_h * (16.0 * PI).powf(1.5) / (2.0 * r.area.sqrt());
        assert!((c.slack_proof - band).abs() < 1e-6);
    }
    let ic = integrated_crucial(&tr);
    assert!(ic.slack_statement >= -1e-6 && ic.slack_proof >= -1e-6, "{ic:?}");
}

#[test]
fn schwarzschild_corollary_targets() {
    let tr = schwarzschild_trace();
    for row in corollary_limits_report(&tr, 1.0) {
        assert!(row.deviations.iter().all(|d| *d < 1e-6), "{row:?}");
        let s = 3.0 * (0.5 * row.t).exp();
        assert!((row.values[4] - 4.0 * PI * s * s * 2.0 / s.powi(3)).abs() < 1e-8);
    }
}

#[test]
fn weak_ricci_identity_on_model_flows() {
    let flat = ode(AmbientMetric::euclidean(), 1.0, 1.0, DiagnosticsOptions::minimal());
    let phi = TestFunction { a: 0.1, b: 0.9, l: 0, m: 0 };
    let (l, r) = weak_ricci_identity(&flat, &phi).unwrap();
    assert!(l.abs() < 1e-12 && r.abs() < 1e-6, "{l} {r}");
    let tr = schwarzschild_trace();
    for phi in [
        TestFunction { a: 0.1, b: 0.9, l: 0, m: 0 },
        TestFunction { a: 0.0, b: 1.0, l: 2, m: 0 },
        TestFunction { a: 0.2, b: 0.7, l: 1, m: 1 },
    ] {
        let (l, r) = weak_ricci_identity(&tr, &phi).unwrap();
        assert!((l - r).abs() < 1e-6, "{phi:?} {l} {r}");
    }
    let bad = TestFunction { a: 0.5, b: 1.5, l: 0, m: 0 };
    assert!(matches!(weak_ricci_identity(&tr, &bad), Err(Error::Support { .. })));
}

#[test]
fn bump_derivative_matches_difference() {
    let phi = TestFunction { a: 0.2, b: 1.1, l: 0, m: 0 };
    for t in [0.3, 0.5, 0.9, 1.05] {
        let h = 1e-6;
        let fd = (phi.bump(t + h).0 - phi.bump(t - h).0) / (2.0 * h);
        assert!((fd - phi.bump(t).1).abs() < 1e-6);
    }
    assert_eq!(phi.bump(0.2), (0.0, 0.0));
    assert_eq!(phi.bump(1.1), (0.0, 0.0));
}

#[test]
fn round_sphere_eigenvalue_and_isoperimetric_ratio() {
    for r in [1.0, 2.3] {
        let st = round(r, 16);
        let p = poincare_check(&st, &AmbientMetric::euclidean(), 4).unwrap();
        assert!((p.lambda1 - 2.0 / (r * r)).abs() < 1e-10 * p.lambda1, "{}", p.lambda1);
        assert!((p.in1_upper - 1.0 / r).abs() < 1e-6, "{}", p.in1_upper);
        assert!(p.cheeger_ok);
        let eq = CurveMeter::new(&st, &AmbientMetric::euclidean())
            .measure(&ParamCircle::equator())
            .unwrap();
        assert!((eq.length - 2.0 * PI * r).abs() < 1e-7 * r, "{}", eq.length - 2.0 * PI * r);
        assert!((eq.area_cap - 2.0 * PI * r * r).abs() < 1e-10 * r * r);
    }
}

#[test]
fn ritz_spectrum_multiplicities_on_round_sphere() {
    let st = round(1.0, 16);
    let v = ritz_spectrum(&st, &HarmonicBasis::new(st.grid(), 3)).unwrap();
    assert!(v[0].abs() < 1e-10);
    for (i, l) in [(1, 1), (3, 1), (4, 2), (8, 2), (9, 3), (15, 3)] {
        assert!((v[i] - (l * (l + 1)) as f64).abs() < 1e-9, "{i} {}", v[i]);
    }
}

#[test]
fn off_axis_cap_area_converges() {
    let st = round(1.0, 16);
    let flat = AmbientMetric::euclidean();
    let m = CurveMeter::new(&st, &flat);
    for c in candidate_family() {
        let want = 2.0 * PI * (1.0 - c.level);
        assert!((m.cap_area(&c) - want).abs() < 1e-6, "{c:?}");
        let len = 2.0 * PI * (1.0 - c.level * c.level).sqrt();
        assert!((m.length(&c).unwrap() - len).abs() < 1e-6, "{c:?}");
    }
}

#[test]
fn h_concentration_scales_quadratically() {
    assert!(h_concentration(&round(1.3, 12)) < 1e-12);
    let grid = Arc::new(SphericalGrid::new(16, 32).unwrap());
    let conc = |eps: f64| {
        let rho = ScalarField::from_fn(grid.clone(), |t, p| 1.0 + eps * real_ylm(2, 0, t, p).value);
        h_concentration(&induced_geometry(&AmbientMetric::euclidean(), &rho).unwrap())
    };
    let ratio = conc(0.02) / conc(0.01);
    assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
}

#[test]
fn sandwich_and_length_bounds_on_exact_flows() {
    for (amb, s0) in [
        (AmbientMetric::euclidean(), 1.0),
        (AmbientMetric::schwarzschild(1.0).unwrap(), 3.0),
    ] {
        let tr = ode(amb, s0, 1.0, DiagnosticsOptions::default());
        assert!(sandwich_check(&tr).holds(1e-6), "{:?}", sandwich_check(&tr));
        let lb = length_bounds(&tr).unwrap();
        assert!(lb.holds(1e-6), "{lb:?}");
        let l = &lb.lengths[0];
        let want = 2.0 * PI * s0 * (0.5 * tr.states.last().unwrap().t).exp();
        assert!((l.last().unwrap() - want).abs() < 1e-6 * want);
        assert!(isoperimetric_band(&tr).unwrap().holds(1e-3));
        assert!(geroch_worst_drop(&tr) < 1e-8);
    }
}

#[test]
fn pde_identities_on_perturbed_sphere() {
    let mut c = FlowConfig::sphere(AmbientMetric::schwarzschild(0.1).unwrap(), 1.0, 0.4, FlowMode::Pde);
    c.initial = InitialSurface::Perturbed {
        s0: 1.0,
        amplitude: 0.05,
        l: 2,
        m: 0,
    };
    c.diagnostics = DiagnosticsOptions::minimal();
    c.n_theta = 24;
    c.n_phi = 48;
    let tr = run_flow(&c).unwrap();
    for k in 1..tr.diagnostics.len() - 1 {
        let (l, r) = dt_int_h2_identity(&tr, k).unwrap();
        assert!((l - r).abs() < 1e-3);
        let cc = crucial_identity_residual(&tr, k).unwrap();
        assert!(cc.residual < 1e-3 && cc.slack_statement >= -1e-3, "{cc:?}");
    }
    let phi = TestFunction { a: 0.05, b: 0.35, l: 2, m: 0 };
    let (l, r) = weak_ricci_identity(&tr, &phi).unwrap();
    assert!((l - r).abs() < 1e-3, "{l} {r}");
    assert!(sandwich_check(&tr).holds(1e-3));
    assert!(geroch_worst_drop(&tr) < 1e-3);
}
