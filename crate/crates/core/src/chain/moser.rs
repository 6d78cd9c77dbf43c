//! Area-preserving relabelling of the initial surface by Moser's method, and
//! the flow slices pulled back through it.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Sym2, SymTensorField2};
use crate::flow::FlowTrace;
use crate::geometry::embedding_derivatives;
use crate::grid::{angles, unit_vector, SphericalGrid};
use crate::harmonics::HarmonicSeries;
use crate::interp::{PointStencil, SphereInterpolator};
use crate::stencil::Parity;

type V3 = Vector3<f64>;

/// Allowed relative mismatch between |Σ₀| and 4πr₀².
pub const AREA_TOL: f64 = 1e-6;
/// Allowed relative error of the pulled-back area density.
pub const MOSER_TOL: f64 = 1e-5;
const TRANSPORT_TOL: f64 = 1e-11;
const MAX_STEPS: usize = 1024;
const INTERP_POINTS: usize = 8;
const DIFF_STEP: f64 = 1e-5;

/// Node-wise map x ↦ M(x) of the parameter sphere with M*(dμ₀) = r₀² dσ.
#[derive(Debug, Clone)]
pub struct ReparamMap {
    /// Image of each node on the label sphere.
    pub targets: Vec<V3>,
    /// ∂M/∂θ and ∂M/∂φ at each node.
    pub d_theta: Vec<V3>,
    pub d_phi: Vec<V3>,
    /// Jacobian determinant of M against dσ.
    pub jacobian: Vec<f64>,
    /// max |ρ₀(M(x)) J(x) / r₀² − 1|.
    pub density_error: f64,
    pub identity: bool,
}

impl ReparamMap {
    pub fn identity(grid: &SphericalGrid) -> Self {
        let (d_theta, d_phi) = grid
            .nodes()
            .map(|(t, p)| {
                let (st, ct) = t.sin_cos();
                let (sp, cp) = p.sin_cos();
                (V3::new(ct * cp, ct * sp, -st), V3::new(-st * sp, st * cp, 0.0))
            })
            .unzip();
        Self {
            targets: grid.unit_vectors(),
            d_theta,
            d_phi,
            jacobian: vec![1.0; grid.len()],
            density_error: 0.0,
            identity: true,
        }
    }
}

fn interp_points(grid: &SphericalGrid) -> usize {
    INTERP_POINTS.min(grid.n_theta & !1)
}

/// Solves Δu = ρ̄₀ − ρ₀ spectrally and follows x' = ∇u / ((1−s)r₀² + sρ₀)
/// from s = 0 to 1 with RK4, halving the step until the endpoints settle.
/// The Jacobian is carried along the same paths by Liouville's formula.
pub fn moser_reparam(g0: &SymTensorField2, r0: f64) -> Result<ReparamMap> {
    let grid = g0.grid.clone();
    let rho = g0.area_density()?;
    let target = r0 * r0;
    let area = grid.integrate_round(&rho);
    if !(r0 > 0.0) || (area / (4.0 * PI * target) - 1.0).abs() > AREA_TOL {
        return Err(Error::Moser(format!(
            "area {area} does not match 4πr₀² = {}",
            4.0 * PI * target
        )));
    }
    if rho.iter().all(|d| (d / target - 1.0).abs() <= 1e-12) {
        return Ok(ReparamMap::identity(&grid));
    }
    let l_max = (grid.n_theta - 1).min(grid.n_phi / 2 - 1);
    let dens = HarmonicSeries::fit(&grid, l_max, &rho);
    let u = dens.map_degrees(|l| if l == 0 { 0.0 } else { 1.0 / (l * (l + 1)) as f64 });
    let mean = dens.map_degrees(|l| if l == 0 { 1.0 } else { 0.0 }).eval(0.0, 0.0).value;
    // Velocity and its divergence on the unit sphere.
    let field = |x: &V3, s: f64| -> (V3, f64) {
        let (t, p) = angles(x);
        let (st, ct) = t.sin_cos();
        let (sp, cp) = p.sin_cos();
        let st = st.max(1e-300);
        let e_t = V3::new(ct * cp, ct * sp, -st);
        let e_p = V3::new(-sp, cp, 0.0);
        let [du, r] = HarmonicSeries::eval_many(&[&u, &dens], t, p);
        let w = (1.0 - s) * target + s * r.value;
        let grad_dot = du.d_theta * r.d_theta + du.d_phi * r.d_phi / (st * st);
        let div = (mean - r.value) / w - s * grad_dot / (w * w);
        ((du.d_theta * e_t + du.d_phi / st * e_p) / w, div)
    };
    let transport = |x0: &V3, steps: usize| -> (V3, f64) {
        let h = 1.0 / steps as f64;
        let (mut x, mut log_j) = (*x0, 0.0);
        for n in 0..steps {
            let s = n as f64 * h;
            let (k1, d1) = field(&x, s);
            let (k2, d2) = field(&(x + 0.5 * h * k1).normalize(), s + 0.5 * h);
            let (k3, d3) = field(&(x + 0.5 * h * k2).normalize(), s + 0.5 * h);
            let (k4, d4) = field(&(x + h * k3).normalize(), s + h);
            x = (x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).normalize();
            log_j += h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
        }
        (x, log_j)
    };
    let start = grid.unit_vectors();
    let mut steps = 8;
    let mut prev: Vec<(V3, f64)> = start.par_iter().map(|x| transport(x, steps)).collect();
    loop {
        steps *= 2;
        if steps > MAX_STEPS {
            return Err(Error::Moser("transport did not converge".into()));
        }
        let next: Vec<(V3, f64)> = start.par_iter().map(|x| transport(x, steps)).collect();
        let change = next
            .iter()
            .zip(&prev)
            .fold(0.0_f64, |m, (a, b)| m.max((a.0 - b.0).norm()).max((a.1 - b.1).abs()));
        prev = next;
        if change <= TRANSPORT_TOL {
            break;
        }
    }
    let targets: Vec<V3> = prev.iter().map(|p| p.0).collect();
    let jacobian: Vec<f64> = prev.iter().map(|p| p.1.exp()).collect();
    let nodes: Vec<(f64, f64)> = grid.nodes().collect();
    let diff = |f: &dyn Fn(f64) -> V3| -> V3 { (f(DIFF_STEP) - f(-DIFF_STEP)) / (2.0 * DIFF_STEP) };
    let (d_theta, d_phi): (Vec<V3>, Vec<V3>) = nodes
        .par_iter()
        .map(|&(t, p)| {
            let along_t = diff(&|e| transport(&unit_vector(t + e, p), steps).0);
            let along_p = diff(&|e| transport(&unit_vector(t, p + e), steps).0);
            (along_t, along_p)
        })
        .unzip();
    let interp = SphereInterpolator::new(&grid, interp_points(&grid));
    let density_error = targets
        .iter()
        .zip(&jacobian)
        .map(|(x, j)| {
            let (t, p) = angles(x);
            (interp.at(&rho, t, p) * j / target - 1.0).abs()
        })
        .fold(0.0, f64::max);
    if density_error > MOSER_TOL {
        return Err(Error::Moser(format!(
            "pulled-back density error {density_error:.3e} exceeds {MOSER_TOL:.0e}"
        )));
    }
    Ok(ReparamMap {
        targets,
        d_theta,
        d_phi,
        jacobian,
        density_error,
        identity: false,
    })
}

/// Metric, mean curvature and area density of one flow state in the new labels.
#[derive(Debug, Clone)]
pub struct Slice {
    pub t: f64,
    pub g: Vec<Sym2>,
    pub h: Vec<f64>,
    /// dμ/dσ.
    pub density: Vec<f64>,
}

/// Pulls every state of the trace back through the map. Positions, H and the
/// Cartesian differential of the embedding are interpolated at M(x) and
/// composed with the exact tangent map of M.
pub fn reparameterize(trace: &FlowTrace, map: &ReparamMap) -> Result<Vec<Slice>> {
    if map.identity {
        return Ok(trace
            .states
            .iter()
            .map(|s| Slice {
                t: s.t,
                g: s.g.values.clone(),
                h: s.h.values.clone(),
                density: s.density.clone(),
            })
            .collect());
    }
    let grid = trace.grid();
    if map.targets.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let interp = SphereInterpolator::new(grid, interp_points(grid));
    let stencils: Vec<PointStencil> = map
        .targets
        .iter()
        .map(|x| {
            let (t, p) = angles(x);
            interp.stencil(t, p)
        })
        .collect();
    let ops = &trace.ops;
    trace
        .states
        .par_iter()
        .map(|s| {
            let d = embedding_derivatives(ops, &s.positions);
            // dX as a 3×3 map on tangent vectors: X_θ e_θᵀ + (X_φ / sin θ) e_φᵀ.
            let dx: Vec<Matrix3<f64>> = (0..grid.len())
                .map(|k| {
                    let e_phi = ops.unit_p[k] / ops.sin[k];
                    d.t[k] * ops.unit_t[k].transpose() + (d.p[k] / ops.sin[k]) * e_phi.transpose()
                })
                .collect();
            let comps: [Vec<f64>; 3] = [0, 1, 2].map(|c| s.positions.iter().map(|p| p[c]).collect());
            let dx_comps: Vec<Vec<f64>> = (0..9).map(|c| dx.iter().map(|m| m[(c / 3, c % 3)]).collect()).collect();
            let mut g = Vec::with_capacity(grid.len());
            let mut h = Vec::with_capacity(grid.len());
            let mut density = Vec::with_capacity(grid.len());
            for (k, st) in stencils.iter().enumerate() {
                let pos = V3::from_fn(|c, _| interp.eval(st, &comps[c], Parity::Even));
                let jac = Matrix3::from_fn(|r, c| interp.eval(st, &dx_comps[3 * r + c], Parity::Even));
                h.push(interp.eval(st, &s.h.values, Parity::Even));
                let m = trace.ambient.metric(&pos)?;
                let (xt, xp) = (jac * map.d_theta[k], jac * map.d_phi[k]);
                let metric = Sym2::new(xt.dot(&(m * xt)), xt.dot(&(m * xp)), xp.dot(&(m * xp)));
                if !metric.is_positive_definite() {
                    return Err(Error::DegenerateMetric { node: k });
                }
                density.push(metric.det().sqrt() / ops.sin[k]);
                g.push(metric);
            }
            Ok(Slice { t: s.t, g, h, density })
        })
        .collect()
}
