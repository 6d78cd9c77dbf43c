//! Induced geometry of embedded spheres: metric, second fundamental form,
//! principal curvatures, Gauss curvature, gradients.

use std::sync::Arc;

use nalgebra::Vector3;

use crate::ambient::AmbientMetric;
use crate::error::{Error, Result};
use crate::field::{integrate_with_density, ScalarField, Sym2, SymTensorField2};
use crate::grid::SphericalGrid;
use crate::stencil::{d_phi, d_phi_phi, Parity, Partials, ThetaOperator};

type V3 = Vector3<f64>;

/// Grid-dependent operators and tabulated unit-sphere data, built once per grid.
#[derive(Debug, Clone)]
pub struct GridOps {
    pub grid: Arc<SphericalGrid>,
    pub theta4: ThetaOperator,
    pub unit: Vec<V3>,
    pub unit_t: Vec<V3>,
    pub unit_p: Vec<V3>,
    pub unit_tp: Vec<V3>,
    pub unit_pp: Vec<V3>,
    pub sin: Vec<f64>,
    pub cos: Vec<f64>,
}

impl GridOps {
    pub fn new(grid: Arc<SphericalGrid>) -> Arc<Self> {
        let n = grid.len();
        let mut ops = Self {
            theta4: ThetaOperator::new(&grid, 2),
            unit: Vec::with_capacity(n),
            unit_t: Vec::with_capacity(n),
            unit_p: Vec::with_capacity(n),
            unit_tp: Vec::with_capacity(n),
            unit_pp: Vec::with_capacity(n),
            sin: Vec::with_capacity(n),
            cos: Vec::with_capacity(n),
            grid: grid.clone(),
        };
        for (t, p) in grid.nodes() {
            let (st, ct) = t.sin_cos();
            let (sp, cp) = p.sin_cos();
            ops.unit.push(V3::new(st * cp, st * sp, ct));
            ops.unit_t.push(V3::new(ct * cp, ct * sp, -st));
            ops.unit_p.push(V3::new(-st * sp, st * cp, 0.0));
            ops.unit_tp.push(V3::new(-ct * sp, ct * cp, 0.0));
            ops.unit_pp.push(V3::new(-st * cp, -st * sp, 0.0));
            ops.sin.push(st);
            ops.cos.push(ct);
        }
        Arc::new(ops)
    }

    /// Partials of a scalar field with the five-point θ stencil.
    pub fn partials(&self, f: &[f64]) -> Partials {
        Partials::compute(&self.grid, &self.theta4, f, Parity::Even)
    }

    /// First partials only.
    pub fn gradient(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.theta4.d1(f, Parity::Even), d_phi(&self.grid, f))
    }
}

/// Embedding derivatives X_θ, X_φ, X_θθ, X_θφ, X_φφ at every node.
#[derive(Debug, Clone)]
pub struct EmbeddingDerivatives {
    pub t: Vec<V3>,
    pub p: Vec<V3>,
    pub tt: Vec<V3>,
    pub tp: Vec<V3>,
    pub pp: Vec<V3>,
}

/// Differentiates X − c·n̂ numerically and adds the exact derivatives of c·n̂,
/// c being the mean radius; coordinate spheres are then exact to roundoff.
pub fn embedding_derivatives(ops: &GridOps, x: &[V3]) -> EmbeddingDerivatives {
    let n = x.len();
    let c = x.iter().map(|v| v.norm()).sum::<f64>() / n as f64;
    let mut parts = Vec::with_capacity(3);
    for comp in 0..3 {
        let r: Vec<f64> = x
            .iter()
            .zip(&ops.unit)
            .map(|(v, u)| v[comp] - c * u[comp])
            .collect();
        parts.push(ops.partials(&r));
    }
    let gather = |sel: fn(&Partials) -> &Vec<f64>, exact: &[V3]| -> Vec<V3> {
        (0..n)
            .map(|k| {
                V3::new(sel(&parts[0])[k], sel(&parts[1])[k], sel(&parts[2])[k]) + c * exact[k]
            })
            .collect()
    };
    let minus_unit: Vec<V3> = ops.unit.iter().map(|u| -u).collect();
    EmbeddingDerivatives {
        t: gather(|p| &p.t, &ops.unit_t),
        p: gather(|p| &p.p, &ops.unit_p),
        tt: gather(|p| &p.tt, &minus_unit),
        tp: gather(|p| &p.tp, &ops.unit_tp),
        pp: gather(|p| &p.pp, &ops.unit_pp),
    }
}

/// One time slice of the flow together with its induced geometry.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    /// Chart position of each label.
    pub positions: Vec<V3>,
    /// Ambient radial coordinate s = |X|.
    pub rho: ScalarField,
    pub g: SymTensorField2,
    pub a: SymTensorField2,
    pub h: ScalarField,
    pub lambda1: ScalarField,
    pub lambda2: ScalarField,
    /// Contravariant unit normal.
    pub normal: Vec<V3>,
    /// Covariant unit normal.
    pub normal_cov: Vec<V3>,
    /// √det g / sin θ: density of dμ against dσ.
    pub density: Vec<f64>,
    pub area: f64,
}

impl FlowState {
    pub fn grid(&self) -> &Arc<SphericalGrid> {
        &self.h.grid
    }

    /// ∫ f dμ.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        integrate_with_density(self.grid(), f, &self.density)
    }

    /// |A|² = g^ac g^bd A_ab A_cd.
    pub fn a_norm_sq(&self) -> Vec<f64> {
        self.a
            .values
            .iter()
            .zip(&self.g.values)
            .map(|(a, g)| a.norm_sq_with(&g.inverse()))
            .collect()
    }

    /// (λ₁ − λ₂)², computed as 2|A|² − H² to avoid the square root.
    pub fn shear(&self) -> Vec<f64> {
        self.a_norm_sq()
            .iter()
            .zip(&self.h.values)
            .map(|(a2, h)| (2.0 * a2 - h * h).max(0.0))
            .collect()
    }

    /// tr_g A at every node, recomputed from the stored tensors.
    pub fn trace_a(&self) -> Vec<f64> {
        self.a
            .values
            .iter()
            .zip(&self.g.values)
            .map(|(a, g)| g.inverse().contract(a))
            .collect()
    }

    pub fn mean_radius(&self) -> f64 {
        self.rho.values.iter().sum::<f64>() / self.rho.values.len() as f64
    }
}

/// Principal curvatures λ₁ ≤ λ₂ from H and det A / det g.
pub fn principal_curvatures(h: f64, det_ratio: f64) -> (f64, f64) {
    let disc = (h * h - 4.0 * det_ratio).max(0.0).sqrt();
    (0.5 * (h - disc), 0.5 * (h + disc))
}

/// Full induced geometry of the surface with the given chart positions.
pub fn surface_geometry(
    ambient: &AmbientMetric,
    ops: &GridOps,
    positions: Vec<V3>,
    t: f64,
) -> Result<FlowState> {
    let grid = ops.grid.clone();
    let n = grid.len();
    let d = embedding_derivatives(ops, &positions);
    let mut g = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    let mut l1 = Vec::with_capacity(n);
    let mut l2 = Vec::with_capacity(n);
    let mut normal = Vec::with_capacity(n);
    let mut normal_cov = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    for k in 0..n {
        let y = positions[k];
        let conn = ambient.connection(&y)?;
        let (xt, xp) = (d.t[k], d.p[k]);
        let gt = conn.g * xt;
        let gp = conn.g * xp;
        let metric = Sym2::new(xt.dot(&gt), xt.dot(&gp), xp.dot(&gp));
        let det = metric.det();
        if !(det > 0.0 && metric.tt > 0.0) {
            return Err(Error::DegenerateMetric { node: k });
        }
        let ncov = xt.cross(&xp);
        let nn = ncov.dot(&(conn.g_inv * ncov));
        let nu_cov = ncov / nn.sqrt();
        let nu = conn.g_inv * nu_cov;
        let second = |xab: &V3, u: &V3, v: &V3| -nu_cov.dot(&(xab + conn.apply(u, v)));
        let form = Sym2::new(
            second(&d.tt[k], &xt, &xt),
            second(&d.tp[k], &xt, &xp),
            second(&d.pp[k], &xp, &xp),
        );
        let hk = metric.inverse().contract(&form);
        let (a1, a2) = principal_curvatures(hk, form.det() / det);
        g.push(metric);
        a.push(form);
        h.push(hk);
        l1.push(a1);
        l2.push(a2);
        normal.push(nu);
        normal_cov.push(nu_cov);
        density.push(det.sqrt() / ops.sin[k]);
    }
    let area = grid.integrate_round(&density);
    let rho = positions.iter().map(|v| v.norm()).collect();
    Ok(FlowState {
        t,
        rho: ScalarField::new(grid.clone(), rho),
        g: SymTensorField2::new(grid.clone(), g),
        a: SymTensorField2::new(grid.clone(), a),
        h: ScalarField::new(grid.clone(), h),
        lambda1: ScalarField::new(grid.clone(), l1),
        lambda2: ScalarField::new(grid, l2),
        positions,
        normal,
        normal_cov,
        density,
        area,
    })
}

/// Induced geometry of the radial graph s = ρ(θ, φ); `t` is left at 0.
pub fn induced_geometry(ambient: &AmbientMetric, rho: &ScalarField) -> Result<FlowState> {
    let ops = GridOps::new(rho.grid.clone());
    let positions = rho
        .values
        .iter()
        .zip(&ops.unit)
        .map(|(r, u)| *r * u)
        .collect();
    surface_geometry(ambient, &ops, positions, 0.0)
}

/// Gauss curvature computed extrinsically and intrinsically.
#[derive(Debug, Clone)]
pub struct GaussCurvature {
    /// λ₁λ₂ + K₁₂.
    pub extrinsic: ScalarField,
    /// Brioschi formula applied to finite differences of g.
    pub intrinsic: ScalarField,
}

/// K₁₂ (ambient sectional curvature of the tangent plane) at every node.
pub fn tangent_sectional(state: &FlowState, ambient: &AmbientMetric) -> Result<Vec<f64>> {
    state
        .positions
        .iter()
        .zip(&state.normal)
        .map(|(y, nu)| Ok(ambient.normal_curvatures(y, nu)?.k12))
        .collect()
}

pub fn extrinsic_gauss_curvature(state: &FlowState, k12: &[f64]) -> ScalarField {
    let values = state
        .lambda1
        .values
        .iter()
        .zip(&state.lambda2.values)
        .zip(k12)
        .map(|((a, b), k)| a * b + k)
        .collect();
    ScalarField::new(state.grid().clone(), values)
}

pub fn gauss_curvature(state: &FlowState, ambient: &AmbientMetric) -> Result<GaussCurvature> {
    let k12 = tangent_sectional(state, ambient)?;
    Ok(GaussCurvature {
        extrinsic: extrinsic_gauss_curvature(state, &k12),
        intrinsic: intrinsic_gauss_curvature(&state.g)?,
    })
}

/// Brioschi formula in (u, v) = (θ, φ). F and G are differentiated through
/// F/sin θ and G/sin²θ, which stay smooth across the poles.
pub fn intrinsic_gauss_curvature(g: &SymTensorField2) -> Result<ScalarField> {
    let grid = g.grid.clone();
    if grid.n_theta < 8 {
        return Err(Error::Grid {
            n_theta: grid.n_theta,
            n_phi: grid.n_phi,
            reason: "grid too coarse for the curvature stencil",
        });
    }
    let op = ThetaOperator::new(&grid, 2);
    let n = grid.len();
    let sc: Vec<(f64, f64)> = (0..n).map(|k| grid.node(k).0.sin_cos()).collect();
    let e: Vec<f64> = g.values.iter().map(|m| m.tt).collect();
    let fh: Vec<f64> = g.values.iter().zip(&sc).map(|(m, (s, _))| m.tp / s).collect();
    let gh: Vec<f64> = g.values.iter().zip(&sc).map(|(m, (s, _))| m.pp / (s * s)).collect();
    let e_u = op.d1(&e, Parity::Even);
    let e_v = d_phi(&grid, &e);
    let e_vv = d_phi_phi(&grid, &e);
    let fh_u = op.d1(&fh, Parity::Even);
    let fh_v = d_phi(&grid, &fh);
    let fh_uv = op.d1(&fh_v, Parity::Even);
    let gh_u = op.d1(&gh, Parity::Even);
    let gh_uu = op.d2(&gh, Parity::Even);
    let gh_v = d_phi(&grid, &gh);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (s, c) = sc[k];
        let (ee, ff, gg) = (e[k], fh[k] * s, gh[k] * s * s);
        let f_u = fh_u[k] * s + fh[k] * c;
        let f_v = fh_v[k] * s;
        let f_uv = fh_uv[k] * s + fh_v[k] * c;
        let g_u = gh_u[k] * s * s + 2.0 * gh[k] * s * c;
        let g_v = gh_v[k] * s * s;
        let g_uu = gh_uu[k] * s * s + 4.0 * gh_u[k] * s * c + 2.0 * gh[k] * (c * c - s * s);
        let m1 = [
            [-0.5 * e_vv[k] + f_uv - 0.5 * g_uu, 0.5 * e_u[k], f_u - 0.5 * e_v[k]],
            [f_v - 0.5 * g_u, ee, ff],
            [0.5 * g_v, ff, gg],
        ];
        let m2 = [
            [0.0, 0.5 * e_v[k], 0.5 * g_u],
            [0.5 * e_v[k], ee, ff],
            [0.5 * g_u, ff, gg],
        ];
        let dd = ee * gg - ff * ff;
        if !(dd > 0.0) {
            return Err(Error::NotPositiveDefinite { node: k });
        }
        out.push((det3(&m1) - det3(&m2)) / (dd * dd));
    }
    Ok(ScalarField::new(grid, out))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// χ = (1/2π) ∫ K dμ with the extrinsic Gauss curvature.
pub fn euler_characteristic(state: &FlowState, ambient: &AmbientMetric) -> Result<f64> {
    let k = gauss_curvature(state, ambient)?.extrinsic;
    Ok(state.integrate(&k.values) / (2.0 * std::f64::consts::PI))
}

/// |∇f|²_g = g^ab ∂_a f ∂_b f.
pub fn grad_norm_sq(f: &ScalarField, g: &SymTensorField2) -> Result<ScalarField> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let op = ThetaOperator::new(&f.grid, 2);
    let fu = op.d1(&f.values, Parity::Even);
    let fv = d_phi(&f.grid, &f.values);
    Ok(ScalarField::new(
        f.grid.clone(),
        gradient_norm_values(&g.values, &fu, &fv),
    ))
}

pub fn gradient_norm_values(g: &[Sym2], fu: &[f64], fv: &[f64]) -> Vec<f64> {
    g.iter()
        .zip(fu.iter().zip(fv))
        .map(|(m, (a, b))| m.inverse().contract(&Sym2::new(a * a, a * b, b * b)))
        .collect()
}

#[cfg(test)]
mod tests;
