//! Nodewise fields on a [`SphericalGrid`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::SphericalGrid;

/// Symmetric 2×2 matrix in the (θ, φ) coordinate basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2 {
    pub tt: f64,
    pub tp: f64,
    pub pp: f64,
}

impl Sym2 {
    pub const fn new(tt: f64, tp: f64, pp: f64) -> Self {
        Self { tt, tp, pp }
    }

    pub fn det(&self) -> f64 {
        self.tt * self.pp - self.tp * self.tp
    }

    pub fn trace(&self) -> f64 {
        self.tt + self.pp
    }

    pub fn is_positive_definite(&self) -> bool {
        self.tt > 0.0 && self.det() > 0.0
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.pp / d, -self.tp / d, self.tt / d)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(c * self.tt, c * self.tp, c * self.pp)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.tt + o.tt, self.tp + o.tp, self.pp + o.pp)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.tt - o.tt, self.tp - o.tp, self.pp - o.pp)
    }

    /// tr(self · other) for symmetric matrices.
    pub fn contract(&self, o: &Self) -> f64 {
        self.tt * o.tt + 2.0 * self.tp * o.tp + self.pp * o.pp
    }

    /// Product self · other (not symmetric in general), as row-major [a, b; c, d].
    pub fn mul(&self, o: &Self) -> [f64; 4] {
        [
            self.tt * o.tt + self.tp * o.tp,
            self.tt * o.tp + self.tp * o.pp,
            self.tp * o.tt + self.pp * o.tp,
            self.tp * o.tp + self.pp * o.pp,
        ]
    }

    /// |h|² measured with metric g: tr(g⁻¹ h g⁻¹ h).
    pub fn norm_sq_with(&self, g_inv: &Self) -> f64 {
        let m = g_inv.mul(self);
        m[0] * m[0] + 2.0 * m[1] * m[2] + m[3] * m[3]
    }

    /// Eigenvalues of g⁻¹·self (ascending), i.e. of the form self relative to g.
    pub fn relative_eigenvalues(&self, g: &Self) -> (f64, f64) {
        let tr = g.inverse().contract(self);
        let det = self.det() / g.det();
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        (0.5 * (tr - disc), 0.5 * (tr + disc))
    }

    pub fn max_abs(&self) -> f64 {
        self.tt.abs().max(self.tp.abs()).max(self.pp.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Arc<SphericalGrid>,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<SphericalGrid>, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len(), "field length must match grid");
        Self { grid, values }
    }

    pub fn constant(grid: Arc<SphericalGrid>, c: f64) -> Self {
        let n = grid.len();
        Self::new(grid, vec![c; n])
    }

    pub fn from_fn(grid: Arc<SphericalGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid.nodes().map(|(t, p)| f(t, p)).collect();
        Self::new(grid, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.values.iter().zip(&o.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField2 {
    pub grid: Arc<SphericalGrid>,
    pub values: Vec<Sym2>,
}

impl SymTensorField2 {
    pub fn new(grid: Arc<SphericalGrid>, values: Vec<Sym2>) -> Self {
        assert_eq!(grid.len(), values.len(), "field length must match grid");
        Self { grid, values }
    }

    /// c · σ, the round metric of radius √c.
    pub fn round(grid: Arc<SphericalGrid>, c: f64) -> Self {
        let values = grid
            .nodes()
            .map(|(t, _)| Sym2::new(c, 0.0, c * t.sin().powi(2)))
            .collect();
        Self::new(grid, values)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.grid.clone(), self.values.iter().map(|m| m.scale(c)).collect())
    }

    /// √det g / √det σ at every node: the density of dμ_g against dσ.
    pub fn area_density(&self) -> Result<Vec<f64>> {
        let nphi = self.grid.n_phi;
        self.values
            .iter()
            .enumerate()
            .map(|(k, m)| {
                if !m.is_positive_definite() {
                    return Err(Error::NotPositiveDefinite { node: k });
                }
                Ok(m.det().sqrt() / self.grid.theta[k / nphi].sin())
            })
            .collect()
    }
}

/// ∫ f dμ_g.
pub fn integrate(f: &ScalarField, g: &SymTensorField2) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let dens = g.area_density()?;
    Ok(f.values
        .iter()
        .zip(&dens)
        .zip(&f.grid.weights)
        .map(|((f, d), w)| f * d * w)
        .sum())
}

/// ∫ f dμ for a precomputed area density.
pub fn integrate_with_density(grid: &SphericalGrid, f: &[f64], density: &[f64]) -> f64 {
    f.iter()
        .zip(density)
        .zip(&grid.weights)
        .map(|((f, d), w)| f * d * w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Arc<SphericalGrid> {
        Arc::new(SphericalGrid::new(16, 32).unwrap())
    }

    #[test]
    fn round_area() {
        let g = grid();
        let one = ScalarField::constant(g.clone(), 1.0);
        let r0: f64 = 1.7;
        let a = integrate(&one, &SymTensorField2::round(g.clone(), r0 * r0)).unwrap();
        assert!((a - 4.0 * PI * r0 * r0).abs() < 1e-12 * a);
        let t: f64 = 0.8;
        let a = integrate(&one, &SymTensorField2::round(g, t.exp() * r0 * r0)).unwrap();
        assert!((a - 4.0 * PI * r0 * r0 * t.exp()).abs() < 1e-12 * a);
    }

    #[test]
    fn rejects_indefinite_metric() {
        let g = grid();
        let mut m = SymTensorField2::round(g.clone(), 1.0);
        m.values[5] = Sym2::new(1.0, 2.0, 1.0);
        let one = ScalarField::constant(g, 1.0);
        assert!(matches!(integrate(&one, &m), Err(Error::NotPositiveDefinite { node: 5 })));
    }

    #[test]
    fn sym2_algebra() {
        let g = Sym2::new(2.0, 0.3, 1.5);
        let gi = g.inverse();
        let p = g.mul(&gi);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15 && (p[3] - 1.0).abs() < 1e-15);
        let (a, b) = g.relative_eigenvalues(&g);
        assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        assert!((g.norm_sq_with(&gi) - 2.0).abs() < 1e-14);
    }
}
