//! Model asymptotically flat 3-metrics in a Cartesian chart y ∈ R³.
//!
//! Rotationally symmetric members φ(s)²ds² + s²σ are written as
//! g_ij = δ_ij + ψ(s) y_i y_j with ψ = (φ² − 1)/s², s = |y|.

mod af;

pub use af::{AfReport, ShellConstants};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::angles;
use crate::harmonics::real_ylm;

/// Warp function φ(s) of a rotationally symmetric metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warp {
    Flat,
    Schwarzschild { mass: f64 },
    /// φ = 1 + amplitude·exp(−((s − center)/width)²).
    Bump { amplitude: f64, center: f64, width: f64 },
}

impl Warp {
    /// (φ, φ', φ'').
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        match *self {
            Warp::Flat => (1.0, 0.0, 0.0),
            Warp::Schwarzschild { mass } => {
                let phi = (1.0 - 2.0 * mass / s).powf(-0.5);
                let p3 = phi.powi(3);
                let d1 = -mass / (s * s) * p3;
                let d2 = 2.0 * mass / s.powi(3) * p3 + 3.0 * mass * mass / s.powi(4) * phi.powi(5);
                (phi, d1, d2)
            }
            Warp::Bump {
                amplitude,
                center,
                width,
            } => {
                let u = (s - center) / width;
                let e = amplitude * (-u * u).exp();
                (1.0 + e, -2.0 * u * e / width, e * (4.0 * u * u - 2.0) / (width * width))
            }
        }
    }

    pub fn inner_radius(&self) -> f64 {
        match *self {
            Warp::Schwarzschild { mass } => 2.0 * mass.max(0.0),
            _ => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Warp::Flat => Ok(()),
            Warp::Schwarzschild { mass } if mass >= 0.0 && mass.is_finite() => Ok(()),
            Warp::Bump {
                amplitude,
                center,
                width,
            } if amplitude > -1.0 && width > 0.0 && center.is_finite() => Ok(()),
            w => Err(Error::InvalidParameter(format!("warp {w:?}"))),
        }
    }
}

/// Conformal factor 1 + ε·Y_lm(ŷ)·χ(s) with χ a smooth bump supported in (s_in, s_out).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub amplitude: f64,
    pub l: usize,
    pub m: i32,
    pub s_in: f64,
    pub s_out: f64,
}

/// Smooth compactly supported cutoff, equal to 1 at the midpoint of (a, b).
pub fn cutoff(s: f64, a: f64, b: f64) -> f64 {
    let tau = (2.0 * s - a - b) / (b - a);
    if tau.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - tau * tau)).exp()
    }
}

impl Perturbation {
    fn factor(&self, y: &Vector3<f64>) -> f64 {
        let s = y.norm();
        let chi = cutoff(s, self.s_in, self.s_out);
        if chi == 0.0 {
            return 1.0;
        }
        let (t, p) = angles(y);
        1.0 + self.amplitude * real_ylm(self.l, self.m, t, p).value * chi
    }
}

/// Family tag used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientKind {
    Euclidean,
    Schwarzschild,
    RotSym,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientMetric {
    pub warp: Warp,
    pub perturbation: Option<Perturbation>,
}

/// Metric, inverse and Christoffel symbols Γ^l_ij (`gamma[l][(i, j)]`) at a point.
#[derive(Debug, Clone, Copy)]
pub struct Connection {
    pub g: Matrix3<f64>,
    pub g_inv: Matrix3<f64>,
    pub gamma: [Matrix3<f64>; 3],
}

impl Connection {
    /// Γ(u, v)^l = Γ^l_ij u^i v^j.
    pub fn apply(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(
            u.dot(&(self.gamma[0] * v)),
            u.dot(&(self.gamma[1] * v)),
            u.dot(&(self.gamma[2] * v)),
        )
    }
}

/// Curvature quantities seen by a surface with unit normal ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalCurvatures {
    pub scalar: f64,
    pub ricci_nn: f64,
    pub k12: f64,
}

/// All-lower Riemann tensor R_ijkl with sectional curvature R(X,Y,X,Y)/|X∧Y|².
#[derive(Debug, Clone)]
pub struct Riemann {
    pub g: Matrix3<f64>,
    pub g_inv: Matrix3<f64>,
    pub r: [[[[f64; 3]; 3]; 3]; 3],
}

impl Riemann {
    pub fn ricci(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|k, m| {
            let mut s = 0.0;
            for i in 0..3 {
                for l in 0..3 {
                    s += self.g_inv[(i, l)] * self.r[i][k][l][m];
                }
            }
            s
        })
    }

    pub fn scalar(&self) -> f64 {
        self.g_inv.component_mul(&self.ricci()).sum()
    }

    pub fn sectional(&self, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
        let mut num = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        num += self.r[i][k][l][m] * x[i] * y[k] * x[l] * y[m];
                    }
                }
            }
        }
        let gxx = x.dot(&(self.g * x));
        let gyy = y.dot(&(self.g * y));
        let gxy = x.dot(&(self.g * y));
        num / (gxx * gyy - gxy * gxy)
    }
}

type D1 = [Matrix3<f64>; 3];
type D2 = [[Matrix3<f64>; 3]; 3];

const FD_STEP: f64 = 1e-4;
const FD_STEP_SECOND: f64 = 1e-3;

impl AmbientMetric {
    pub fn euclidean() -> Self {
        Self {
            warp: Warp::Flat,
            perturbation: None,
        }
    }

    pub fn schwarzschild(mass: f64) -> Result<Self> {
        Self::rotsym(Warp::Schwarzschild { mass })
    }

    pub fn rotsym(warp: Warp) -> Result<Self> {
        warp.validate()?;
        Ok(Self {
            warp,
            perturbation: None,
        })
    }

    pub fn perturbed(base: Warp, perturbation: Perturbation) -> Result<Self> {
        base.validate()?;
        let p = perturbation;
        if p.l < p.m.unsigned_abs() as usize || !(p.s_out > p.s_in && p.s_in >= 0.0) {
            return Err(Error::InvalidParameter(format!("perturbation {p:?}")));
        }
        Ok(Self {
            warp: base,
            perturbation: Some(p),
        })
    }

    pub fn kind(&self) -> AmbientKind {
        match (self.perturbation, self.warp) {
            (Some(_), _) => AmbientKind::Perturbed,
            (None, Warp::Flat) => AmbientKind::Euclidean,
            (None, Warp::Schwarzschild { .. }) => AmbientKind::Schwarzschild,
            (None, Warp::Bump { .. }) => AmbientKind::RotSym,
        }
    }

    pub fn is_rotationally_symmetric(&self) -> bool {
        self.perturbation.is_none()
    }

    pub fn chart_inner_radius(&self) -> f64 {
        self.warp.inner_radius()
    }

    /// Schwarzschild mass parameter of the base warp (0 otherwise).
    pub fn mass(&self) -> f64 {
        match self.warp {
            Warp::Schwarzschild { mass } => mass,
            _ => 0.0,
        }
    }

    fn check(&self, y: &Vector3<f64>) -> Result<f64> {
        let s = y.norm();
        let inner = self.chart_inner_radius();
        if !(s > inner) || !s.is_finite() || s == 0.0 {
            return Err(Error::OutsideChart { radius: s, inner });
        }
        Ok(s)
    }

    /// Mean curvature of the coordinate sphere of radius s in a symmetric ambient.
    pub fn coordinate_sphere_h(&self, s: f64) -> f64 {
        2.0 / (s * self.warp.eval(s).0)
    }

    /// (ψ, ψ', ψ'').
    fn psi(&self, s: f64) -> (f64, f64, f64) {
        let (p, d1, d2) = self.warp.eval(s);
        let q = p * p - 1.0;
        (
            q / (s * s),
            2.0 * p * d1 / (s * s) - 2.0 * q / s.powi(3),
            2.0 * (d1 * d1 + p * d2) / (s * s) - 8.0 * p * d1 / s.powi(3) + 6.0 * q / s.powi(4),
        )
    }

    fn base_metric(&self, y: &Vector3<f64>, s: f64) -> Matrix3<f64> {
        let (psi, _, _) = self.psi(s);
        Matrix3::identity() + psi * y * y.transpose()
    }

    fn base_d1(&self, y: &Vector3<f64>, s: f64) -> D1 {
        let (psi, dpsi, _) = self.psi(s);
        let yh = y / s;
        let yy = y * y.transpose();
        std::array::from_fn(|k| {
            let mut m = dpsi * yh[k] * yy;
            for i in 0..3 {
                m[(i, k)] += psi * y[i];
                m[(k, i)] += psi * y[i];
            }
            m
        })
    }

    fn base_d2(&self, y: &Vector3<f64>, s: f64) -> D2 {
        let (psi, d1, d2) = self.psi(s);
        let yh = y / s;
        std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                let dkl = if k == l { 1.0 } else { 0.0 };
                Matrix3::from_fn(|i, j| {
                    let dik = if i == k { 1.0 } else { 0.0 };
                    let djl = if j == l { 1.0 } else { 0.0 };
                    let dil = if i == l { 1.0 } else { 0.0 };
                    let djk = if j == k { 1.0 } else { 0.0 };
                    d2 * yh[k] * yh[l] * y[i] * y[j]
                        + d1 * (dkl - yh[k] * yh[l]) / s * y[i] * y[j]
                        + d1 * yh[k] * (dil * y[j] + djl * y[i])
                        + d1 * yh[l] * (dik * y[j] + djk * y[i])
                        + psi * (dik * djl + djk * dil)
                })
            })
        })
    }

    /// Metric components g_ij at y.
    pub fn metric(&self, y: &Vector3<f64>) -> Result<Matrix3<f64>> {
        let s = self.check(y)?;
        Ok(self.metric_unchecked(y, s))
    }

    fn metric_unchecked(&self, y: &Vector3<f64>, s: f64) -> Matrix3<f64> {
        let g = self.base_metric(y, s);
        match &self.perturbation {
            None => g,
            Some(p) => p.factor(y) * g,
        }
    }

    fn fd_metric(&self, y: &Vector3<f64>) -> Matrix3<f64> {
        self.metric_unchecked(y, y.norm())
    }

    /// ∂_k g_ij, returned as `[k]`.
    pub fn metric_d1(&self, y: &Vector3<f64>) -> Result<D1> {
        let s = self.check(y)?;
        if self.perturbation.is_none() {
            return Ok(self.base_d1(y, s));
        }
        let h = FD_STEP * s;
        Ok(std::array::from_fn(|k| {
            let e = Vector3::ith(k, h);
            (self.fd_metric(&(y - 2.0 * e)) - 8.0 * self.fd_metric(&(y - e))
                + 8.0 * self.fd_metric(&(y + e))
                - self.fd_metric(&(y + 2.0 * e)))
                / (12.0 * h)
        }))
    }

    /// ∂_k ∂_l g_ij, returned as `[k][l]`.
    pub fn metric_d2(&self, y: &Vector3<f64>) -> Result<D2> {
        let s = self.check(y)?;
        if self.perturbation.is_none() {
            return Ok(self.base_d2(y, s));
        }
        let h = FD_STEP_SECOND * s;
        let g0 = self.fd_metric(y);
        let mut out = [[Matrix3::zeros(); 3]; 3];
        for k in 0..3 {
            let ek = Vector3::ith(k, h);
            out[k][k] = (-self.fd_metric(&(y + 2.0 * ek)) + 16.0 * self.fd_metric(&(y + ek))
                - 30.0 * g0
                + 16.0 * self.fd_metric(&(y - ek))
                - self.fd_metric(&(y - 2.0 * ek)))
                / (12.0 * h * h);
            for l in k + 1..3 {
                let el = Vector3::ith(l, h);
                let c = [1.0, -8.0, 8.0, -1.0];
                let o = [-2.0, -1.0, 1.0, 2.0];
                let mut m = Matrix3::zeros();
                for a in 0..4 {
                    for b in 0..4 {
                        m += c[a] * c[b] * self.fd_metric(&(y + o[a] * ek + o[b] * el));
                    }
                }
                m /= 144.0 * h * h;
                out[k][l] = m;
                out[l][k] = m;
            }
        }
        Ok(out)
    }

    pub fn connection(&self, y: &Vector3<f64>) -> Result<Connection> {
        let s = self.check(y)?;
        let g = self.metric_unchecked(y, s);
        if self.perturbation.is_none() {
            let (phi, _, _) = self.warp.eval(s);
            let (psi, dpsi, _) = self.psi(s);
            let yh = y / s;
            let g_inv = Matrix3::identity() - ((phi * phi - 1.0) / (phi * phi)) * yh * yh.transpose();
            let alpha = dpsi * s * s / (2.0 * phi * phi);
            let beta = psi * s / (phi * phi);
            let base = alpha * yh * yh.transpose() + beta * Matrix3::identity();
            let gamma = std::array::from_fn(|l| yh[l] * base);
            return Ok(Connection { g, g_inv, gamma });
        }
        let g_inv = g
            .try_inverse()
            .ok_or(Error::NotPositiveDefinite { node: 0 })?;
        let d = self.metric_d1(y)?;
        Ok(Connection {
            g,
            g_inv,
            gamma: christoffel(&g_inv, &d),
        })
    }

    /// Riemann tensor from the metric and its first and second derivatives.
    pub fn riemann(&self, y: &Vector3<f64>) -> Result<Riemann> {
        let s = self.check(y)?;
        let g = self.metric_unchecked(y, s);
        let g_inv = g
            .try_inverse()
            .ok_or(Error::NotPositiveDefinite { node: 0 })?;
        let d1 = self.metric_d1(y)?;
        let d2 = self.metric_d2(y)?;
        let gamma = christoffel(&g_inv, &d1);
        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        let mut v = 0.5
                            * (d2[k][l][(i, m)] + d2[i][m][(k, l)]
                                - d2[k][m][(i, l)]
                                - d2[i][l][(k, m)]);
                        for n in 0..3 {
                            for p in 0..3 {
                                v += g[(n, p)]
                                    * (gamma[n][(k, l)] * gamma[p][(i, m)]
                                        - gamma[n][(k, m)] * gamma[p][(i, l)]);
                            }
                        }
                        r[i][k][l][m] = v;
                    }
                }
            }
        }
        Ok(Riemann { g, g_inv, r })
    }

    /// (K_rad, K_tan) of a rotationally symmetric metric at radius s.
    fn radial_tangential(&self, s: f64) -> (f64, f64) {
        let (p, d1, _) = self.warp.eval(s);
        (d1 / (s * p.powi(3)), (1.0 - 1.0 / (p * p)) / (s * s))
    }

    pub fn scalar_curvature(&self, y: &Vector3<f64>) -> Result<f64> {
        let s = self.check(y)?;
        if self.is_rotationally_symmetric() {
            let (kr, kt) = self.radial_tangential(s);
            return Ok(4.0 * kr + 2.0 * kt);
        }
        Ok(self.riemann(y)?.scalar())
    }

    /// Normalizes ν against g; warns when it was off by more than 1e-8.
    fn normalize(g: &Matrix3<f64>, nu: &Vector3<f64>) -> Vector3<f64> {
        let n2 = nu.dot(&(g * nu));
        if (n2 - 1.0).abs() > 1e-8 {
            log::warn!("normal not unit (|ν|² = {n2}); normalizing");
        }
        nu / n2.sqrt()
    }

    /// Rc(ν, ν) for a contravariant normal ν.
    pub fn ricci_normal(&self, y: &Vector3<f64>, nu: &Vector3<f64>) -> Result<f64> {
        Ok(self.normal_curvatures(y, nu)?.ricci_nn)
    }

    /// Sectional curvature of the plane spanned by e1, e2.
    pub fn sectional_tangent(
        &self,
        y: &Vector3<f64>,
        e1: &Vector3<f64>,
        e2: &Vector3<f64>,
    ) -> Result<f64> {
        let s = self.check(y)?;
        let g = self.metric_unchecked(y, s);
        let g11 = e1.dot(&(g * e1));
        let g22 = e2.dot(&(g * e2));
        let g12 = e1.dot(&(g * e2));
        let area = g11 * g22 - g12 * g12;
        if !(area > 1e-14 * g11 * g22) {
            return Err(Error::InvalidParameter("degenerate tangent plane".into()));
        }
        if self.is_rotationally_symmetric() {
            // the normal covector of the plane is e1 × e2
            let n_cov = e1.cross(e2);
            let g_inv = g.try_inverse().unwrap();
            let nn = n_cov.dot(&(g_inv * n_cov));
            let (phi, _, _) = self.warp.eval(s);
            let c = n_cov.dot(&(y / s)) / (phi * nn.sqrt());
            let (kr, kt) = self.radial_tangential(s);
            return Ok(kt * c * c + kr * (1.0 - c * c));
        }
        Ok(self.riemann(y)?.sectional(e1, e2))
    }

    /// R, Rc(ν,ν) and the sectional curvature K₁₂ of the plane ⟂ ν.
    pub fn normal_curvatures(&self, y: &Vector3<f64>, nu: &Vector3<f64>) -> Result<NormalCurvatures> {
        let s = self.check(y)?;
        let g = self.metric_unchecked(y, s);
        let nu = Self::normalize(&g, nu);
        if self.is_rotationally_symmetric() {
            let (phi, _, _) = self.warp.eval(s);
            let c = (g * nu).dot(&(y / s)) / phi;
            let c2 = (c * c).min(1.0);
            let (kr, kt) = self.radial_tangential(s);
            return Ok(NormalCurvatures {
                scalar: 4.0 * kr + 2.0 * kt,
                ricci_nn: 2.0 * kr * c2 + (kr + kt) * (1.0 - c2),
                k12: kt * c2 + kr * (1.0 - c2),
            });
        }
        let rm = self.riemann(y)?;
        let ric = rm.ricci();
        let scalar = rm.g_inv.component_mul(&ric).sum();
        let ricci_nn = nu.dot(&(ric * nu));
        let (e1, e2) = orthonormal_complement(&g, &nu);
        Ok(NormalCurvatures {
            scalar,
            ricci_nn,
            k12: rm.sectional(&e1, &e2),
        })
    }
}

fn christoffel(g_inv: &Matrix3<f64>, d: &D1) -> [Matrix3<f64>; 3] {
    // first kind: Γ_kij = ½(∂_i g_kj + ∂_j g_ki − ∂_k g_ij)
    let first: [Matrix3<f64>; 3] = std::array::from_fn(|k| {
        Matrix3::from_fn(|i, j| 0.5 * (d[i][(k, j)] + d[j][(k, i)] - d[k][(i, j)]))
    });
    std::array::from_fn(|l| {
        let mut m = Matrix3::zeros();
        for (k, fk) in first.iter().enumerate() {
            m += g_inv[(l, k)] * fk;
        }
        m
    })
}

/// Two g-orthonormal vectors spanning the g-orthogonal complement of a unit ν.
pub fn orthonormal_complement(g: &Matrix3<f64>, nu: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let gn = g * nu;
    let trial = if gn.x.abs() < 0.9 * gn.norm() {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let mut e1 = trial - trial.dot(&gn) * nu;
    e1 /= e1.dot(&(g * e1)).sqrt();
    let mut e2 = g.try_inverse().unwrap() * gn.cross(&(g * e1));
    e2 -= e2.dot(&gn) * nu + e2.dot(&(g * e1)) * e1;
    e2 /= e2.dot(&(g * e2)).sqrt();
    (e1, e2)
}

#[cfg(test)]
mod tests;
