//! Inverse mean curvature flow ∂X/∂t = ν/H: exact ODE for coordinate spheres in
//! rotationally symmetric ambients, Runge–Kutta–Legendre steps in the normal
//! parameterization for general star-shaped surfaces.

use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::ambient::AmbientMetric;
use crate::diagnostics::{self, DiagnosticsOptions, DiagnosticsRecord, NodeFields};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{surface_geometry, FlowState, GridOps};
use crate::grid::SphericalGrid;
use crate::harmonics::real_ylm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMode {
    #[serde(alias = "ode_rotsym")]
    Ode,
    #[serde(alias = "pde_graph")]
    Pde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationPolicy {
    Abort,
    #[default]
    #[serde(alias = "record_and_continue")]
    Record,
}

/// H₀ ≤ H ≤ H₁ and |A| ≤ A₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassBounds {
    pub h0: f64,
    pub h1: f64,
    pub a1: f64,
}

impl Default for ClassBounds {
    fn default() -> Self {
        Self {
            h0: 1e-3,
            h1: 1e3,
            a1: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSurface {
    Sphere { s0: f64 },
    /// ρ = s₀(1 + amplitude·Y_lm).
    Perturbed { s0: f64, amplitude: f64, l: usize, m: i32 },
    Graph(ScalarField),
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub ambient: AmbientMetric,
    pub initial: InitialSurface,
    pub t_final: f64,
    /// Upper bound on the PDE substep; the stability limit may force smaller steps.
    pub dt: f64,
    pub output_dt: f64,
    pub mode: FlowMode,
    pub bounds: ClassBounds,
    pub policy: ViolationPolicy,
    pub n_theta: usize,
    pub n_phi: usize,
    pub diagnostics: DiagnosticsOptions,
}

impl FlowConfig {
    pub fn sphere(ambient: AmbientMetric, s0: f64, t_final: f64, mode: FlowMode) -> Self {
        Self {
            ambient,
            initial: InitialSurface::Sphere { s0 },
            t_final,
            dt: 0.01,
            output_dt: 0.02,
            mode,
            bounds: ClassBounds::default(),
            policy: ViolationPolicy::Record,
            n_theta: 16,
            n_phi: 32,
            diagnostics: DiagnosticsOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = self.bounds;
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(b.h0 > 0.0 && b.h0 < b.h1 && b.h1.is_finite()) {
            return bad("class bounds need 0 < H0 < H1 < inf");
        }
        if !(b.a1 >= b.h1 / 2.0) {
            return bad("class bounds need A1 >= H1/2");
        }
        if !(self.t_final > 0.0 && self.dt > 0.0 && self.output_dt > 0.0) {
            return bad("T, dt and output_dt must be positive");
        }
        if self.mode == FlowMode::Ode {
            if !self.ambient.is_rotationally_symmetric() {
                return bad("ode mode needs a rotationally symmetric ambient");
            }
            if !matches!(self.initial, InitialSurface::Sphere { .. }) {
                return bad("ode mode needs a coordinate sphere");
            }
        }
        Ok(())
    }

    /// Output times 0, Δ, 2Δ, …, T (the last interval may be shorter).
    pub fn output_times(&self) -> Vec<f64> {
        let n = (self.t_final / self.output_dt - 1e-9).ceil().max(1.0) as usize;
        let mut v: Vec<f64> = (0..n).map(|k| k as f64 * self.output_dt).collect();
        v.push(self.t_final);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    H0,
    H1,
    A1,
}

impl Bound {
    pub fn name(&self) -> &'static str {
        match self {
            Bound::H0 => "H0",
            Bound::H1 => "H1",
            Bound::A1 => "A1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassViolation {
    pub t: f64,
    pub bound: Bound,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub ambient: AmbientMetric,
    pub mode: FlowMode,
    pub states: Vec<FlowState>,
    pub fields: Vec<NodeFields>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub class_violations: Vec<ClassViolation>,
    pub outside_class: bool,
    /// Radius of the round sphere with the initial area.
    pub r0: f64,
    /// Velocity evaluations spent by the PDE integrator.
    pub evaluations: usize,
    pub ops: Arc<GridOps>,
}

impl FlowTrace {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn grid(&self) -> &Arc<SphericalGrid> {
        &self.ops.grid
    }

    /// Smallest H and largest |A| seen over the whole run.
    pub fn recorded_bounds(&self) -> (f64, f64) {
        let mut h0 = f64::INFINITY;
        let mut a0: f64 = 0.0;
        for s in &self.states {
            h0 = h0.min(s.h.min());
            a0 = a0.max(s.a_norm_sq().iter().fold(0.0_f64, |m, v| m.max(*v)).sqrt());
        }
        (h0, a0)
    }
}

/// Coordinate-sphere radius after time dt: ds/dt = s/2 for every warp.
pub fn step_ode_rotsym(s: f64, dt: f64) -> f64 {
    s * (0.5 * dt).exp()
}

fn velocity(state: &FlowState) -> Result<Vec<Vector3<f64>>> {
    state
        .normal
        .iter()
        .zip(&state.h.values)
        .map(|(nu, h)| {
            if !(*h > 0.0) {
                return Err(Error::ClassViolation {
                    t: state.t,
                    bound: "H>0",
                    value: *h,
                });
            }
            Ok(nu / *h)
        })
        .collect()
}

fn check_graph(state: &FlowState) -> Result<()> {
    for (k, (nu, y)) in state.normal_cov.iter().zip(&state.positions).enumerate() {
        if !(nu.dot(y) > 0.0) {
            return Err(Error::GraphLost { node: k, t: state.t });
        }
    }
    Ok(())
}

const STABILITY_SAFETY: f64 = 0.7;
const MAX_RELATIVE_RADIAL_STEP: f64 = 0.01;
const MAX_STAGES: usize = 64;

/// Step limits for the current geometry: (forward-Euler stability limit of the
/// diffusive part, cap from |Δρ|/ρ ≤ 0.01).
pub fn step_limits(state: &FlowState, ops: &GridOps, vel: &[Vector3<f64>]) -> (f64, f64) {
    let grid = &ops.grid;
    let nt = grid.n_theta;
    let dtheta: Vec<f64> = (0..nt)
        .map(|i| {
            let lo = if i == 0 { 2.0 * grid.theta[0] } else { grid.theta[i] - grid.theta[i - 1] };
            let hi = if i + 1 == nt {
                2.0 * (std::f64::consts::PI - grid.theta[i])
            } else {
                grid.theta[i + 1] - grid.theta[i]
            };
            lo.min(hi)
        })
        .collect();
    let dphi = grid.dphi();
    let mut euler = f64::INFINITY;
    let mut radial_cap = f64::INFINITY;
    for k in 0..grid.len() {
        let m = state.g.values[k];
        let h = state.h.values[k];
        let st = dtheta[k / grid.n_phi];
        let lam = (16.0 / 3.0) / (h * h) * (1.0 / (m.tt * st * st) + 1.0 / (m.pp * dphi * dphi));
        euler = euler.min(2.0 * STABILITY_SAFETY / lam);
        let y = state.positions[k];
        let radial = vel[k].dot(&y).abs() / y.norm();
        if radial > 0.0 {
            radial_cap = radial_cap.min(MAX_RELATIVE_RADIAL_STEP * y.norm() / radial);
        }
    }
    (euler, radial_cap)
}

/// Stage count of the Runge–Kutta–Legendre scheme that makes `tau` stable.
fn stages_for(tau: f64, euler: f64) -> usize {
    let mut s = 2;
    while ((s * s + s - 2) as f64) / 4.0 * euler < tau {
        s += 1;
    }
    s
}

fn axpy(out: &mut [Vector3<f64>], terms: &[(f64, &[Vector3<f64>])]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = terms.iter().map(|(c, v)| *c * v[k]).sum();
    }
}

/// One second-order Runge–Kutta–Legendre step with `s` stages.
fn rkl2(
    ambient: &AmbientMetric,
    ops: &GridOps,
    state: &FlowState,
    v0: &[Vector3<f64>],
    tau: f64,
    s: usize,
) -> Result<FlowState> {
    let b = |j: usize| {
        if j < 2 {
            1.0 / 3.0
        } else {
            let j = j as f64;
            (j * j + j - 2.0) / (2.0 * j * (j + 1.0))
        }
    };
    let w1 = 4.0 / ((s * s + s - 2) as f64);
    let y0 = &state.positions;
    let mut prev2 = y0.clone();
    let mut prev: Vec<Vector3<f64>> = y0.iter().zip(v0).map(|(x, v)| x + w1 / 3.0 * tau * v).collect();
    let mut next = prev.clone();
    for j in 2..=s {
        let st = surface_geometry(ambient, ops, prev.clone(), state.t)?;
        let vj = velocity(&st)?;
        let jf = j as f64;
        let mu = (2.0 * jf - 1.0) / jf * b(j) / b(j - 1);
        let nu = -(jf - 1.0) / jf * b(j) / b(j - 2);
        let mu_t = mu * w1;
        let gamma_t = -(1.0 - b(j - 1)) * mu_t;
        axpy(
            &mut next,
            &[
                (mu, &prev),
                (nu, &prev2),
                (1.0 - mu - nu, y0),
                (mu_t * tau, &vj),
                (gamma_t * tau, v0),
            ],
        );
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut next);
    }
    let out = surface_geometry(ambient, ops, prev, state.t + tau)?;
    check_graph(&out)?;
    Ok(out)
}

/// Advances a state by exactly `dt`. Substeps are no longer than `max_substep`
/// and the radial cap; each is a Runge–Kutta–Legendre step with enough stages
/// to be stable. Returns the new state and the number of velocity evaluations.
pub fn step_pde_graph(
    state: &FlowState,
    ambient: &AmbientMetric,
    ops: &GridOps,
    dt: f64,
    max_substep: f64,
) -> Result<(FlowState, usize)> {
    let t_end = state.t + dt;
    let mut cur = state.clone();
    let mut remaining = dt;
    let mut evals = 0;
    while remaining > 1e-12 * dt {
        let v = velocity(&cur)?;
        let (euler, cap) = step_limits(&cur, ops, &v);
        let max_tau = ((MAX_STAGES * MAX_STAGES + MAX_STAGES - 2) as f64) / 4.0 * euler;
        let limit = max_substep.min(cap).min(max_tau);
        let n = (remaining / limit).ceil().max(1.0);
        let tau = remaining / n;
        let s = stages_for(tau, euler);
        cur = rkl2(ambient, ops, &cur, &v, tau, s)?;
        evals += s;
        remaining -= tau;
    }
    cur.t = t_end;
    Ok((cur, evals))
}

fn initial_positions(cfg: &FlowConfig, ops: &GridOps) -> Vec<Vector3<f64>> {
    let grid = &ops.grid;
    let rho: Vec<f64> = match &cfg.initial {
        InitialSurface::Sphere { s0 } => vec![*s0; grid.len()],
        InitialSurface::Perturbed { s0, amplitude, l, m } => grid
            .nodes()
            .map(|(t, p)| s0 * (1.0 + amplitude * real_ylm(*l, *m, t, p).value))
            .collect(),
        InitialSurface::Graph(f) => f.values.clone(),
    };
    rho.iter().zip(&ops.unit).map(|(r, u)| *r * u).collect()
}

fn class_check(state: &FlowState, bounds: &ClassBounds, out: &mut Vec<ClassViolation>) {
    let hmin = state.h.min();
    let hmax = state.h.max();
    let amax = state.a_norm_sq().iter().fold(0.0_f64, |m, v| m.max(*v)).sqrt();
    let t = state.t;
    if hmin < bounds.h0 {
        out.push(ClassViolation { t, bound: Bound::H0, value: hmin });
    }
    if hmax > bounds.h1 {
        out.push(ClassViolation { t, bound: Bound::H1, value: hmax });
    }
    if amax > bounds.a1 {
        out.push(ClassViolation { t, bound: Bound::A1, value: amax });
    }
}

/// Runs the flow, samples it at the output times, checks class bounds and
/// fills per-state diagnostics.
pub fn run_flow(cfg: &FlowConfig) -> Result<FlowTrace> {
    cfg.validate()?;
    let grid = Arc::new(SphericalGrid::new(cfg.n_theta, cfg.n_phi)?);
    let ops = GridOps::new(grid);
    let amb = &cfg.ambient;
    let times = cfg.output_times();
    let mut states = Vec::with_capacity(times.len());
    let mut violations = Vec::new();
    let mut evaluations = 0;
    let mut record = |s: FlowState, states: &mut Vec<FlowState>| -> Result<()> {
        let before = violations.len();
        class_check(&s, &cfg.bounds, &mut violations);
        if cfg.policy == ViolationPolicy::Abort && violations.len() > before {
            let v = violations[before];
            return Err(Error::ClassViolation {
                t: v.t,
                bound: v.bound.name(),
                value: v.value,
            });
        }
        states.push(s);
        Ok(())
    };
    match cfg.mode {
        FlowMode::Ode => {
            let InitialSurface::Sphere { s0 } = cfg.initial else {
                unreachable!("validated")
            };
            for &t in &times {
                let s = step_ode_rotsym(s0, t);
                let pos = ops.unit.iter().map(|u| s * u).collect();
                let st = surface_geometry(amb, &ops, pos, t)?;
                record(st, &mut states)?;
            }
        }
        FlowMode::Pde => {
            let st = surface_geometry(amb, &ops, initial_positions(cfg, &ops), 0.0)?;
            check_graph(&st)?;
            record(st, &mut states)?;
            for w in times.windows(2) {
                let cur = states.last().expect("initial state");
                let (mut next, n) = step_pde_graph(cur, amb, &ops, w[1] - w[0], cfg.dt)?;
                next.t = w[1];
                evaluations += n;
                record(next, &mut states)?;
            }
        }
    }
    let r0 = (states[0].area / (4.0 * std::f64::consts::PI)).sqrt();
    let mut trace = FlowTrace {
        ambient: *amb,
        mode: cfg.mode,
        outside_class: !violations.is_empty(),
        class_violations: violations,
        states,
        fields: Vec::new(),
        diagnostics: Vec::new(),
        r0,
        evaluations,
        ops,
    };
    diagnostics::fill(&mut trace, &cfg.diagnostics)?;
    Ok(trace)
}

#[cfg(test)]
mod tests;
