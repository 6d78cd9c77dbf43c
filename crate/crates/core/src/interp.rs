//! Tensor-product Lagrange interpolation of grid fields at arbitrary points.

use crate::grid::SphericalGrid;
use crate::stencil::{meridian_point, Parity};

/// Interpolation weights for one target point.
#[derive(Debug, Clone)]
pub struct PointStencil {
    rows: Vec<(usize, bool, f64)>,
    cols: Vec<(usize, f64)>,
}

fn lagrange_weights(x: &[f64], z: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            x.iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| (z - xk) / (x[j] - xk))
                .product()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SphereInterpolator<'a> {
    grid: &'a SphericalGrid,
    points: usize,
}

impl<'a> SphereInterpolator<'a> {
    /// `points` per direction; must be even and no larger than n_theta.
    pub fn new(grid: &'a SphericalGrid, points: usize) -> Self {
        assert!(points % 2 == 0 && points >= 2 && points <= grid.n_theta);
        Self { grid, points }
    }

    pub fn stencil(&self, theta: f64, phi: f64) -> PointStencil {
        let g = self.grid;
        let half = (self.points / 2) as isize;
        let i0 = g.theta.partition_point(|&t| t <= theta) as isize - 1;
        let rows_ext: Vec<_> = (i0 - half + 1..=i0 + half)
            .map(|k| meridian_point(g, k))
            .collect();
        let xt: Vec<f64> = rows_ext.iter().map(|p| p.theta).collect();
        let wt = lagrange_weights(&xt, theta);

        let h = g.dphi();
        let n = g.n_phi as isize;
        let u = phi.rem_euclid(2.0 * std::f64::consts::PI) / h;
        let j0 = u.floor() as isize;
        let offs: Vec<f64> = (-half + 1..=half).map(|o| o as f64).collect();
        let wp = lagrange_weights(&offs, u - j0 as f64);
        let cols = (-half + 1..=half)
            .zip(wp)
            .map(|(o, w)| ((j0 + o).rem_euclid(n) as usize, w))
            .collect();
        let rows = rows_ext
            .iter()
            .zip(wt)
            .map(|(p, w)| (p.row, p.flipped, w))
            .collect();
        PointStencil { rows, cols }
    }

    pub fn eval(&self, s: &PointStencil, f: &[f64], parity: Parity) -> f64 {
        let np = self.grid.n_phi;
        let half = np / 2;
        let mut acc = 0.0;
        for &(row, flipped, wr) in &s.rows {
            let base = row * np;
            let mut r = 0.0;
            for &(j, wc) in &s.cols {
                let jj = if flipped { (j + half) % np } else { j };
                r += wc * f[base + jj];
            }
            let sign = if flipped && parity == Parity::Odd { -1.0 } else { 1.0 };
            acc += sign * wr * r;
        }
        acc
    }

    pub fn at(&self, f: &[f64], theta: f64, phi: f64) -> f64 {
        self.eval(&self.stencil(theta, phi), f, Parity::Even)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::unit_vector;

    #[test]
    fn reproduces_smooth_function_near_poles() {
        let f = |t: f64, p: f64| {
            let n = unit_vector(t, p);
            (n.x * 1.3 + n.z * n.y).exp()
        };
        let worst = |nt: usize| {
            let g = SphericalGrid::new(nt, 2 * nt).unwrap();
            let vals: Vec<f64> = g.nodes().map(|(t, p)| f(t, p)).collect();
            let it = SphereInterpolator::new(&g, 8);
            [(0.01, 1.0), (0.3, 5.9), (1.57, 0.1), (3.13, 2.0), (2.0, 6.2)]
                .iter()
                .map(|&(t, p)| (it.at(&vals, t, p) - f(t, p)).abs())
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (worst(24), worst(48));
        assert!(fine < 5e-8, "{fine}");
        assert!(coarse / fine > 64.0, "{coarse} {fine}");
    }

    #[test]
    fn exact_at_nodes() {
        let g = SphericalGrid::new(8, 16).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|k| (k as f64 * 0.37).sin()).collect();
        let it = SphereInterpolator::new(&g, 6);
        for k in [0, 17, 63, 127] {
            let (t, p) = g.node(k);
            assert!((it.at(&vals, t, p) - vals[k]).abs() < 1e-12);
        }
    }
}
