use nalgebra::{Matrix3, Vector3};

use super::AmbientMetric;
use crate::grid::SphericalGrid;

/// Decay products sampled on one shell |y| = radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellConstants {
    pub radius: f64,
    pub c_metric: f64,
    pub c_deriv: f64,
    pub c_deriv2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AfReport {
    /// Per-shell values, ascending in radius.
    pub shells: Vec<ShellConstants>,
    /// Sup over shells ≥ the given one (non-increasing in radius).
    pub tail: Vec<ShellConstants>,
    pub c_metric: f64,
    pub c_deriv: f64,
    pub c_deriv2: f64,
}

fn max_abs(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

impl AmbientMetric {
    /// Sampled sup of |g−δ|·|y|, |∂g|·|y|² and max(|∂²g|, |∂³g|) on each shell.
    pub fn af_constants(&self, shells: &[f64]) -> AfReport {
        let mut dirs = SphericalGrid::new(8, 16).expect("fixed grid").unit_vectors();
        for k in 0..3 {
            dirs.push(Vector3::ith(k, 1.0));
            dirs.push(Vector3::ith(k, -1.0));
        }
        let mut radii: Vec<f64> = shells
            .iter()
            .copied()
            .filter(|&s| s > self.chart_inner_radius())
            .collect();
        radii.sort_by(f64::total_cmp);
        let per: Vec<ShellConstants> = radii
            .iter()
            .map(|&s| {
                let mut c = ShellConstants {
                    radius: s,
                    c_metric: 0.0,
                    c_deriv: 0.0,
                    c_deriv2: 0.0,
                };
                for d in &dirs {
                    let y = d * s;
                    let g = self.metric(&y).expect("shell inside chart");
                    c.c_metric = c.c_metric.max(max_abs(&(g - Matrix3::identity())) * s);
                    let d1 = self.metric_d1(&y).expect("shell inside chart");
                    c.c_deriv = c.c_deriv.max(d1.iter().map(max_abs).fold(0.0, f64::max) * s * s);
                    let d2 = self.metric_d2(&y).expect("shell inside chart");
                    let second = d2.iter().flatten().map(max_abs).fold(0.0, f64::max);
                    c.c_deriv2 = c.c_deriv2.max(second.max(self.third_derivative_max(&y)));
                }
                c
            })
            .collect();
        let mut tail = per.clone();
        for k in (0..tail.len().saturating_sub(1)).rev() {
            let next = tail[k + 1];
            let t = &mut tail[k];
            t.c_metric = t.c_metric.max(next.c_metric);
            t.c_deriv = t.c_deriv.max(next.c_deriv);
            t.c_deriv2 = t.c_deriv2.max(next.c_deriv2);
        }
        let head = tail.first().copied();
        AfReport {
            c_metric: head.map_or(0.0, |c| c.c_metric),
            c_deriv: head.map_or(0.0, |c| c.c_deriv),
            c_deriv2: head.map_or(0.0, |c| c.c_deriv2),
            shells: per,
            tail,
        }
    }

    /// max |∂_m ∂_k ∂_l g_ij| by central differences of the second derivatives.
    fn third_derivative_max(&self, y: &Vector3<f64>) -> f64 {
        let h = 1e-3 * y.norm();
        let mut worst: f64 = 0.0;
        for m in 0..3 {
            let e = Vector3::ith(m, h);
            let (Ok(a), Ok(b), Ok(c), Ok(d)) = (
                self.metric_d2(&(y - 2.0 * e)),
                self.metric_d2(&(y - e)),
                self.metric_d2(&(y + e)),
                self.metric_d2(&(y + 2.0 * e)),
            ) else {
                continue;
            };
            for k in 0..3 {
                for l in 0..3 {
                    let t = (a[k][l] - 8.0 * b[k][l] + 8.0 * c[k][l] - d[k][l]) / (12.0 * h);
                    worst = worst.max(max_abs(&t));
                }
            }
        }
        worst
    }
}
