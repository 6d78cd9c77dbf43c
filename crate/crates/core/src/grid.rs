//! Gauss–Legendre × uniform-φ product grid on the unit sphere.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub const MIN_N_THETA: usize = 8;
pub const MIN_N_PHI: usize = 16;

/// Gauss–Legendre nodes and weights on [-1, 1], nodes in descending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product grid. Node `k = i * n_phi + j` sits at (θ_i, φ_j); θ ascends from the
/// north pole, φ_j = 2πj / n_phi.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Gauss–Legendre weights in cos θ (sum to 2).
    pub cos_weights: Vec<f64>,
    /// Per-node weights for the round measure dσ (sum to 4π).
    pub weights: Vec<f64>,
}

impl SphericalGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        let reject = |reason| Error::Grid {
            n_theta,
            n_phi,
            reason,
        };
        if n_theta < MIN_N_THETA {
            return Err(reject("n_theta must be at least 8"));
        }
        if n_phi < MIN_N_PHI {
            return Err(reject("n_phi must be at least 16"));
        }
        if n_phi % 2 != 0 {
            return Err(reject("n_phi must be even for antipodal continuation"));
        }
        let (x, cw) = gauss_legendre(n_theta);
        let theta: Vec<f64> = x.iter().map(|c| c.acos()).collect();
        let dphi = 2.0 * PI / n_phi as f64;
        let phi: Vec<f64> = (0..n_phi).map(|j| j as f64 * dphi).collect();
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for &wi in &cw {
            weights.extend(std::iter::repeat_n(wi * dphi, n_phi));
        }
        Ok(Self {
            n_theta,
            n_phi,
            theta,
            phi,
            cos_weights: cw,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_phi + j
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    pub fn node(&self, k: usize) -> (f64, f64) {
        (self.theta[k / self.n_phi], self.phi[k % self.n_phi])
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|k| self.node(k))
    }

    /// Unit position vector of every node.
    pub fn unit_vectors(&self) -> Vec<Vector3<f64>> {
        self.nodes().map(|(t, p)| unit_vector(t, p)).collect()
    }

    /// sin θ at every node.
    pub fn node_sines(&self) -> Vec<f64> {
        self.nodes().map(|(t, _)| t.sin()).collect()
    }

    /// ∫ f dσ over the unit sphere.
    pub fn integrate_round(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// Largest θ-gap between neighbouring nodes (poles crossed by continuation).
    pub fn spacing(&self) -> f64 {
        let mut h = 2.0 * self.theta[0];
        for w in self.theta.windows(2) {
            h = h.max(w[1] - w[0]);
        }
        h.max(self.dphi())
    }
}

pub fn unit_vector(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// (θ, φ) of a nonzero vector, φ in [0, 2π).
pub fn angles(v: &Vector3<f64>) -> (f64, f64) {
    let r = v.norm();
    let theta = (v.z / r).clamp(-1.0, 1.0).acos();
    let mut phi = v.y.atan2(v.x);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    (theta, phi)
}
