//! Integral quantities along a flow and the identities and inequalities they
//! satisfy: Hawking mass, evolution of ∫H², the crucial estimate, integral
//! limits, weak Ricci identity, eigenvalue and isoperimetric bounds, metric
//! sandwich and length bounds.

pub mod curves;
pub mod spectral;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::AmbientMetric;
use crate::error::{Error, Result};
use crate::flow::FlowTrace;
use crate::geometry::{extrinsic_gauss_curvature, gradient_norm_values, FlowState, GridOps};
use crate::harmonics::{real_ylm, HarmonicBasis};
use crate::timeseries;

pub use curves::{candidate_family, in1_upper, CurveMeasure, CurveMeter, ParamCircle};
pub use spectral::{first_eigenvalue, ritz_spectrum};

const SIXTEEN_PI: f64 = 16.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiagnosticsOptions {
    /// Degree of the harmonic Ritz basis for λ₁; 0 skips the eigenvalue.
    pub spectral_l_max: usize,
    /// Evaluate the candidate-curve isoperimetric estimate.
    pub candidates: bool,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            spectral_l_max: 6,
            candidates: true,
        }
    }
}

impl DiagnosticsOptions {
    pub fn minimal() -> Self {
        Self {
            spectral_l_max: 0,
            candidates: false,
        }
    }
}

/// One row of per-time diagnostics. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub area: f64,
    pub m_h: f64,
    pub int_h2: f64,
    pub avg_h2: f64,
    pub h_bar: f64,
    /// d/dt ∫H² from the sampled series.
    pub dt_int_h2: f64,
    /// (16π)^{3/2}|Σ|^{-1/2}(m_H/2 − d/dt m_H).
    pub lemma22_rhs: f64,
    /// 4πχ − ∫(2|∇H|²/H² + ½(λ₁−λ₂)² + R + ½H²).
    pub crucial_rhs: f64,
    pub crucial_residual: f64,
    /// m_H(16π)^{3/2}/(2|Σ|^{1/2}) − d/dt∫H² − ∫(2|∇H|²/H² + ½(λ₁−λ₂)² + R).
    pub slack_statement: f64,
    /// Same with m_H(16π)^{3/2}/|Σ|^{1/2} on the left.
    pub slack_proof: f64,
    pub geroch_rate: f64,
    /// ∫|∇H|²/H².
    pub int_grad_h: f64,
    /// ∫(λ₁−λ₂)².
    pub int_shear: f64,
    pub int_r: f64,
    pub int_rc: f64,
    pub int_k12: f64,
    pub int_a2: f64,
    pub int_prod: f64,
    pub chi: f64,
    pub lambda1_neumann: f64,
    pub in1_upper: f64,
    pub cheeger_ok: bool,
    /// ∫(H − H̄)².
    pub l2_h_minus_avg: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub a_max: f64,
    pub r_min: f64,
}

/// Per-node curvature data kept alongside each state.
#[derive(Debug, Clone, Default)]
pub struct NodeFields {
    /// λ₁λ₂ + K₁₂.
    pub gauss: Vec<f64>,
    pub scalar: Vec<f64>,
    pub ricci_nn: Vec<f64>,
    pub k12: Vec<f64>,
    pub a_norm_sq: Vec<f64>,
    /// ∂_θ H, ∂_φ H.
    pub h_t: Vec<f64>,
    pub h_p: Vec<f64>,
    /// |∇H|²/H².
    pub grad_h_rel: Vec<f64>,
}

impl NodeFields {
    pub fn compute(state: &FlowState, ambient: &AmbientMetric, ops: &GridOps) -> Result<Self> {
        let n = state.positions.len();
        let mut f = Self {
            scalar: Vec::with_capacity(n),
            ricci_nn: Vec::with_capacity(n),
            k12: Vec::with_capacity(n),
            ..Self::default()
        };
        for (y, nu) in state.positions.iter().zip(&state.normal) {
            let c = ambient.normal_curvatures(y, nu)?;
            f.scalar.push(c.scalar);
            f.ricci_nn.push(c.ricci_nn);
            f.k12.push(c.k12);
        }
        f.gauss = extrinsic_gauss_curvature(state, &f.k12).values;
        f.a_norm_sq = state.a_norm_sq();
        let (ht, hp) = ops.gradient(&state.h.values);
        f.grad_h_rel = gradient_norm_values(&state.g.values, &ht, &hp)
            .iter()
            .zip(&state.h.values)
            .map(|(g, h)| g / (h * h))
            .collect();
        f.h_t = ht;
        f.h_p = hp;
        Ok(f)
    }
}

/// √(|Σ|/(16π)³)·(16π − ∫H²).
pub fn hawking_mass(state: &FlowState) -> f64 {
    let h2: Vec<f64> = state.h.values.iter().map(|h| h * h).collect();
    hawking_mass_from(state.area, state.integrate(&h2))
}

pub fn hawking_mass_from(area: f64, int_h2: f64) -> f64 {
    (area / SIXTEEN_PI.powi(3)).sqrt() * (SIXTEEN_PI - int_h2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Pmt,
    Rpi,
}

/// Limit of the average of H² at time t.
pub fn avg_h2_target(t: f64, r0: f64, m: f64, scenario: Scenario) -> f64 {
    let base = 4.0 / (r0 * r0) * (-t).exp();
    match scenario {
        Scenario::Pmt => base,
        Scenario::Rpi => base * (1.0 - 2.0 * m / r0 * (-0.5 * t).exp()),
    }
}

/// ∫(H − H̄)² with H̄ the area average.
pub fn h_concentration(state: &FlowState) -> f64 {
    let h_bar = state.integrate(&state.h.values) / state.area;
    let d: Vec<f64> = state.h.values.iter().map(|h| (h - h_bar).powi(2)).collect();
    state.integrate(&d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareCheck {
    pub lambda1: f64,
    pub in1_upper: f64,
    pub cheeger_ok: bool,
}

const CHEEGER_TOL: f64 = 1e-9;

/// λ₁ and the candidate-curve isoperimetric estimate; `cheeger_ok` reports
/// λ₁ ≥ in1²/4 (informative only, since in1 is an upper bound).
pub fn poincare_check(state: &FlowState, ambient: &AmbientMetric, l_max: usize) -> Result<PoincareCheck> {
    let basis = HarmonicBasis::new(state.grid(), l_max);
    let lambda1 = first_eigenvalue(state, &basis)?;
    let in1 = in1_upper(state, ambient)?;
    Ok(PoincareCheck {
        lambda1,
        in1_upper: in1,
        cheeger_ok: lambda1 >= in1 * in1 / 4.0 - CHEEGER_TOL,
    })
}

fn state_record(
    state: &FlowState,
    ambient: &AmbientMetric,
    ops: &GridOps,
    basis: Option<&HarmonicBasis>,
    opts: &DiagnosticsOptions,
) -> Result<(DiagnosticsRecord, NodeFields)> {
    let f = NodeFields::compute(state, ambient, ops)?;
    let h = &state.h.values;
    let int = |v: &[f64]| state.integrate(v);
    let h2: Vec<f64> = h.iter().map(|h| h * h).collect();
    let prod: Vec<f64> = state
        .lambda1
        .values
        .iter()
        .zip(&state.lambda2.values)
        .map(|(a, b)| a * b)
        .collect();
    let area = state.area;
    let int_h2 = int(&h2);
    let h_bar = int(h) / area;
    let lambda1 = match basis {
        Some(b) => first_eigenvalue(state, b)?,
        None => f64::NAN,
    };
    let in1 = if opts.candidates {
        in1_upper(state, ambient)?
    } else {
        f64::NAN
    };
    let a_max = f.a_norm_sq.iter().fold(0.0_f64, |m, v| m.max(*v)).sqrt();
    let rec = DiagnosticsRecord {
        t: state.t,
        area,
        m_h: hawking_mass_from(area, int_h2),
        int_h2,
        avg_h2: int_h2 / area,
        h_bar,
        dt_int_h2: f64::NAN,
        lemma22_rhs: f64::NAN,
        crucial_rhs: f64::NAN,
        crucial_residual: f64::NAN,
        slack_statement: f64::NAN,
        slack_proof: f64::NAN,
        geroch_rate: f64::NAN,
        int_grad_h: int(&f.grad_h_rel),
        int_shear: int(&state.shear()),
        int_r: int(&f.scalar),
        int_rc: int(&f.ricci_nn),
        int_k12: int(&f.k12),
        int_a2: int(&f.a_norm_sq),
        int_prod: int(&prod),
        chi: int(&f.gauss) / (2.0 * PI),
        lambda1_neumann: lambda1,
        in1_upper: in1,
        cheeger_ok: lambda1 >= in1 * in1 / 4.0 - CHEEGER_TOL,
        l2_h_minus_avg: h_concentration(state),
        h_min: state.h.min(),
        h_max: state.h.max(),
        a_max,
        r_min: state.rho.min(),
    };
    Ok((rec, f))
}

/// Fills per-state records and node fields, then the time-derivative columns.
pub fn fill(trace: &mut FlowTrace, opts: &DiagnosticsOptions) -> Result<()> {
    let basis = (opts.spectral_l_max > 0).then(|| HarmonicBasis::new(trace.grid(), opts.spectral_l_max));
    let ambient = trace.ambient;
    let ops = trace.ops.clone();
    let out: Vec<(DiagnosticsRecord, NodeFields)> = trace
        .states
        .par_iter()
        .map(|s| state_record(s, &ambient, &ops, basis.as_ref(), opts))
        .collect::<Result<_>>()?;
    let (mut recs, fields): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    finish_time_columns(&mut recs);
    trace.diagnostics = recs;
    trace.fields = fields;
    Ok(())
}

fn finish_time_columns(recs: &mut [DiagnosticsRecord]) {
    let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let ih2: Vec<f64> = recs.iter().map(|r| r.int_h2).collect();
    let mh: Vec<f64> = recs.iter().map(|r| r.m_h).collect();
    let d_ih2 = timeseries::derivative(&t, &ih2);
    let d_mh = timeseries::derivative(&t, &mh);
    let c = SIXTEEN_PI.powf(1.5);
    for (k, r) in recs.iter_mut().enumerate() {
        let sq = r.area.sqrt();
        let bulk = 2.0 * r.int_grad_h + 0.5 * r.int_shear + r.int_r;
        r.dt_int_h2 = d_ih2[k];
        r.geroch_rate = d_mh[k];
        r.lemma22_rhs = c / sq * (0.5 * r.m_h - d_mh[k]);
        r.crucial_rhs = 4.0 * PI * r.chi - bulk - 0.5 * r.int_h2;
        r.crucial_residual = (r.dt_int_h2 - r.crucial_rhs).abs();
        r.slack_statement = r.m_h * c / (2.0 * sq) - r.dt_int_h2 - bulk;
        r.slack_proof = r.m_h * c / sq - r.dt_int_h2 - bulk;
    }
}

fn check_interior(trace: &FlowTrace, k: usize) -> Result<&DiagnosticsRecord> {
    let n = trace.diagnostics.len();
    if n < 3 || k == 0 || k + 1 >= n {
        return Err(Error::IndexOutOfRange {
            index: k,
            lo: 1,
            hi: n.saturating_sub(2),
        });
    }
    Ok(&trace.diagnostics[k])
}

/// (d/dt ∫H², (16π)^{3/2}|Σ|^{-1/2}(m_H/2 − d/dt m_H)) at an interior output index.
pub fn dt_int_h2_identity(trace: &FlowTrace, k: usize) -> Result<(f64, f64)> {
    let r = check_interior(trace, k)?;
    Ok((r.dt_int_h2, r.lemma22_rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrucialCheck {
    pub residual: f64,
    pub slack_statement: f64,
    pub slack_proof: f64,
}

pub fn crucial_identity_residual(trace: &FlowTrace, k: usize) -> Result<CrucialCheck> {
    let r = check_interior(trace, k)?;
    Ok(CrucialCheck {
        residual: r.crucial_residual,
        slack_statement: r.slack_statement,
        slack_proof: r.slack_proof,
    })
}

/// m_H(T) − m_H(0) against ∫₀ᵀ |Σ|^{1/2}(16π)^{-3/2} ∫(2|∇H|²/H² + ½(λ₁−λ₂)² + R) dt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratedCrucial {
    pub mass_gain: f64,
    pub bulk: f64,
    /// mass_gain − bulk; nonnegative by the estimate with the statement's factor.
    pub slack_statement: f64,
    /// mass_gain − bulk + ½∫m_H dt, the proof's factor.
    pub slack_proof: f64,
}

pub fn integrated_crucial(trace: &FlowTrace) -> IntegratedCrucial {
    let d = &trace.diagnostics;
    let t: Vec<f64> = d.iter().map(|r| r.t).collect();
    let f: Vec<f64> = d
        .iter()
        .map(|r| r.area.sqrt() / SIXTEEN_PI.powf(1.5) * (2.0 * r.int_grad_h + 0.5 * r.int_shear + r.int_r))
        .collect();
    let mh: Vec<f64> = d.iter().map(|r| r.m_h).collect();
    let bulk = timeseries::simpson(&t, &f);
    let gain = mh[mh.len() - 1] - mh[0];
    IntegratedCrucial {
        mass_gain: gain,
        bulk,
        slack_statement: gain - bulk,
        slack_proof: gain - bulk + 0.5 * timeseries::simpson(&t, &mh),
    }
}

/// Recorded integrals against their limits, in the order
/// ∫H², ∫|A|², ∫λ₁λ₂, ∫Rc(ν,ν), ∫K₁₂, ∫|∇H|²/H², ∫(λ₁−λ₂)², ∫R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryRow {
    pub t: f64,
    pub values: [f64; 8],
    pub targets: [f64; 8],
    /// |value − target| / max(|target|, 1).
    pub deviations: [f64; 8],
}

pub const COROLLARY_NAMES: [&str; 8] = [
    "int_h2", "int_a2", "int_prod", "int_rc", "int_k12", "int_grad_h", "int_shear", "int_r",
];

pub fn corollary_targets(t: f64, r0: f64, m: f64) -> [f64; 8] {
    let e = (-0.5 * t).exp();
    let q = 1.0 - 2.0 * m / r0 * e;
    let c = 8.0 * PI / r0 * m * e;
    [16.0 * PI * q, 8.0 * PI * q, 4.0 * PI * q, -c, c, 0.0, 0.0, 0.0]
}

pub fn corollary_limits_report(trace: &FlowTrace, m: f64) -> Vec<CorollaryRow> {
    trace
        .diagnostics
        .iter()
        .map(|r| {
            let values = [
                r.int_h2, r.int_a2, r.int_prod, r.int_rc, r.int_k12, r.int_grad_h, r.int_shear, r.int_r,
            ];
            let targets = corollary_targets(r.t, trace.r0, m);
            let deviations = std::array::from_fn(|i| (values[i] - targets[i]).abs() / targets[i].abs().max(1.0));
            CorollaryRow {
                t: r.t,
                values,
                targets,
                deviations,
            }
        })
        .collect()
}

/// φ(x, t) = b(t)·Y_lm(x) with b a smooth bump supported in (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub a: f64,
    pub b: f64,
    pub l: usize,
    pub m: i32,
}

impl TestFunction {
    /// (b(t), b'(t)).
    pub fn bump(&self, t: f64) -> (f64, f64) {
        let w = self.b - self.a;
        let tau = (2.0 * t - self.a - self.b) / w;
        if tau.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let q = 1.0 - tau * tau;
        let v = (1.0 - 1.0 / q).exp();
        (v, v * (-2.0 * tau / (q * q)) * (2.0 / w))
    }
}

/// Both sides of the weak Ricci identity
/// ∫∫2φRc(ν,ν) = ∫_{Σa}φH² − ∫_{Σb}φH² + ∫∫[−2φ|∇H|²/H² − 2⟨∇φ,∇H⟩/H + φ(H² − 2|A|²) + φ_t H²],
/// with the spatial integrals interpolated in time and integrated against b, b'.
pub fn weak_ricci_identity(trace: &FlowTrace, phi: &TestFunction) -> Result<(f64, f64)> {
    let t0 = trace.states.first().map_or(0.0, |s| s.t);
    let t1 = trace.states.last().map_or(0.0, |s| s.t);
    if !(phi.a >= t0 && phi.b <= t1 && phi.a < phi.b) {
        return Err(Error::Support {
            a: phi.a,
            b: phi.b,
            t0,
            t1,
        });
    }
    let grid = trace.grid();
    let y: Vec<_> = grid.nodes().map(|(t, p)| real_ylm(phi.l, phi.m, t, p)).collect();
    let n = trace.states.len();
    let (mut ric, mut bulk, mut dtw) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (s, f) in trace.states.iter().zip(&trace.fields) {
        let mut a = vec![0.0; y.len()];
        let mut b = vec![0.0; y.len()];
        let mut c = vec![0.0; y.len()];
        for k in 0..y.len() {
            let (yv, h, gi) = (y[k].value, s.h.values[k], s.g.values[k].inverse());
            let dot = gi.tt * y[k].d_theta * f.h_t[k]
                + gi.tp * (y[k].d_theta * f.h_p[k] + y[k].d_phi * f.h_t[k])
                + gi.pp * y[k].d_phi * f.h_p[k];
            a[k] = 2.0 * yv * f.ricci_nn[k];
            b[k] = -2.0 * yv * f.grad_h_rel[k] - 2.0 * dot / h + yv * (h * h - 2.0 * f.a_norm_sq[k]);
            c[k] = yv * h * h;
        }
        ric.push(s.integrate(&a));
        bulk.push(s.integrate(&b));
        dtw.push(s.integrate(&c));
    }
    let t = trace.times();
    let bump = |x: f64| phi.bump(x).0;
    let bump_t = |x: f64| phi.bump(x).1;
    // φ vanishes at a and b, so the slice terms ∫_{Σa}φH² − ∫_{Σb}φH² drop out.
    let lhs = timeseries::integrate_weighted(&t, &ric, bump);
    let rhs = timeseries::integrate_weighted(&t, &bulk, bump) + timeseries::integrate_weighted(&t, &dtw, bump_t);
    Ok((lhs, rhs))
}

/// Worst normalized margins of e^{∫2λ₁/H} g(0) ≤ g(t) ≤ e^{∫2λ₂/H} g(0);
/// negative values are violations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub lower_margin: f64,
    pub upper_margin: f64,
}

impl SandwichReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower_margin >= -tol && self.upper_margin >= -tol
    }
}

pub fn sandwich_check(trace: &FlowTrace) -> SandwichReport {
    let t = trace.times();
    let n = trace.grid().len();
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    let g0 = &trace.states[0].g.values;
    for k in 0..n {
        let f1: Vec<f64> = trace
            .states
            .iter()
            .map(|s| 2.0 * s.lambda1.values[k] / s.h.values[k])
            .collect();
        let f2: Vec<f64> = trace
            .states
            .iter()
            .map(|s| 2.0 * s.lambda2.values[k] / s.h.values[k])
            .collect();
        let e1 = timeseries::cumulative_trapezoid(&t, &f1);
        let e2 = timeseries::cumulative_trapezoid(&t, &f2);
        for (j, s) in trace.states.iter().enumerate() {
            let (mu1, mu2) = s.g.values[k].relative_eigenvalues(&g0[k]);
            lower = lower.min((mu1 - e1[j].exp()) / mu2);
            upper = upper.min((e2[j].exp() - mu2) / mu2);
        }
    }
    SandwichReport {
        lower_margin: lower,
        upper_margin: upper,
    }
}

/// Lengths of the marked curves over time and the worst relative margins of
/// L⁰e^{−ct} ≤ Lᵗ ≤ L⁰e^{ct}, c = 2A₀/H₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthReport {
    pub lengths: Vec<Vec<f64>>,
    pub rate: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
}

impl LengthReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower_margin >= -tol && self.upper_margin >= -tol
    }
}

/// The equator and the offset circle x = 0.3.
pub fn marked_curves() -> [ParamCircle; 2] {
    [ParamCircle::equator(), ParamCircle::new(nalgebra::Vector3::x(), 0.3)]
}

pub fn length_bounds(trace: &FlowTrace) -> Result<LengthReport> {
    let (h0, a0) = trace.recorded_bounds();
    let rate = 2.0 * a0 / h0;
    let curves = marked_curves();
    let lengths: Vec<Vec<f64>> = curves
        .iter()
        .map(|c| {
            trace
                .states
                .iter()
                .map(|s| CurveMeter::new(s, &trace.ambient).length(c))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for l in &lengths {
        for (s, lt) in trace.states.iter().zip(l) {
            let e = (rate * s.t).exp();
            lower = lower.min((lt - l[0] / e) / lt);
            upper = upper.min((l[0] * e - lt) / lt);
        }
    }
    Ok(LengthReport {
        lengths,
        rate,
        lower_margin: lower,
        upper_margin: upper,
    })
}

/// IN(0)e^{−(c+1)t} ≤ in1_upper(t) ≤ IN(0)e^{(c−1)t} with c = 2A₀/H₀; worst
/// relative margins over the recorded trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandReport {
    pub lower_margin: f64,
    pub upper_margin: f64,
}

impl BandReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower_margin >= -tol && self.upper_margin >= -tol
    }
}

pub fn isoperimetric_band(trace: &FlowTrace) -> Result<BandReport> {
    let (h0, a0) = trace.recorded_bounds();
    let c = 2.0 * a0 / h0;
    let traj: Vec<f64> = trace.diagnostics.iter().map(|r| r.in1_upper).collect();
    if traj.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("candidate curves were not evaluated".into()));
    }
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for (r, v) in trace.diagnostics.iter().zip(&traj) {
        lower = lower.min((v - traj[0] * (-(c + 1.0) * r.t).exp()) / v);
        upper = upper.min((traj[0] * ((c - 1.0) * r.t).exp() - v) / v);
    }
    Ok(BandReport {
        lower_margin: lower,
        upper_margin: upper,
    })
}

/// Largest drop m_H(t_k) − m_H(t_{k+1}) over steps where R ≥ 0 on both surfaces.
pub fn geroch_worst_drop(trace: &FlowTrace) -> f64 {
    let nonneg = |f: &NodeFields| f.scalar.iter().all(|r| *r >= -1e-12);
    trace
        .diagnostics
        .windows(2)
        .zip(trace.fields.windows(2))
        .filter(|(_, f)| nonneg(&f[0]) && nonneg(&f[1]))
        .map(|(d, _)| d[0].m_h - d[1].m_h)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests;
