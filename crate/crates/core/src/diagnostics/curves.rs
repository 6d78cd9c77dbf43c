//! Closed curves fixed on the parameter sphere, measured on a surface: lengths
//! and the areas of the two pieces they cut off.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::ambient::AmbientMetric;
use crate::error::{Error, Result};
use crate::geometry::FlowState;
use crate::grid::{angles, gauss_legendre};
use crate::interp::SphereInterpolator;
use crate::stencil::{periodic_d1_8, Parity};

type V3 = Vector3<f64>;

const INTERP_POINTS: usize = 8;

/// The circle {p ∈ S² : p·axis = level}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamCircle {
    pub axis: V3,
    pub level: f64,
}

impl ParamCircle {
    pub fn new(axis: V3, level: f64) -> Self {
        Self {
            axis: axis.normalize(),
            level,
        }
    }

    pub fn equator() -> Self {
        Self::new(V3::z(), 0.0)
    }

    fn frame(&self) -> (V3, V3) {
        let a = self.axis;
        let seed = if a.x.abs() < 0.9 { V3::x() } else { V3::y() };
        let e1 = (seed - a * a.dot(&seed)).normalize();
        (e1, a.cross(&e1))
    }

    fn point(&self, z: f64, psi: f64) -> V3 {
        let (e1, e2) = self.frame();
        let r = (1.0 - z * z).max(0.0).sqrt();
        self.axis * z + r * (psi.cos() * e1 + psi.sin() * e2)
    }
}

/// Latitude circles at levels -0.75..=0.75 about the three coordinate axes.
pub fn candidate_family() -> Vec<ParamCircle> {
    let levels = [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75];
    [V3::z(), V3::x(), V3::y()]
        .iter()
        .flat_map(|a| levels.iter().map(move |&l| ParamCircle::new(*a, l)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMeasure {
    pub length: f64,
    /// Area of the side p·axis > level.
    pub area_cap: f64,
    pub area_rest: f64,
}

impl CurveMeasure {
    /// L / min(|S₁|, |S₂|).
    pub fn ratio(&self) -> f64 {
        self.length / self.area_cap.min(self.area_rest)
    }
}

/// Measures parameter circles on one surface.
pub struct CurveMeter<'a> {
    state: &'a FlowState,
    ambient: &'a AmbientMetric,
    interp: SphereInterpolator<'a>,
    components: [Vec<f64>; 3],
    samples: usize,
}

impl<'a> CurveMeter<'a> {
    pub fn new(state: &'a FlowState, ambient: &'a AmbientMetric) -> Self {
        let grid = state.grid();
        Self {
            state,
            ambient,
            interp: SphereInterpolator::new(grid, INTERP_POINTS.min(grid.n_theta)),
            components: [0, 1, 2].map(|c| state.positions.iter().map(|p| p[c]).collect()),
            samples: 2 * grid.n_phi,
        }
    }

    fn position(&self, p: &V3) -> V3 {
        let (t, f) = angles(p);
        let s = self.interp.stencil(t, f);
        V3::from_fn(|c, _| self.interp.eval(&s, &self.components[c], Parity::Even))
    }

    pub fn length(&self, c: &ParamCircle) -> Result<f64> {
        let n = self.samples;
        let h = 2.0 * PI / n as f64;
        let pts: Vec<V3> = (0..n)
            .map(|j| self.position(&c.point(c.level, j as f64 * h)))
            .collect();
        let mut tangent = [Vec::new(), Vec::new(), Vec::new()];
        for (d, tv) in tangent.iter_mut().enumerate() {
            let v: Vec<f64> = pts.iter().map(|p| p[d]).collect();
            *tv = periodic_d1_8(&v, h);
        }
        let mut len = 0.0;
        for (j, p) in pts.iter().enumerate() {
            let g = self.ambient.metric(p)?;
            let v = V3::new(tangent[0][j], tangent[1][j], tangent[2][j]);
            len += v.dot(&(g * v)).sqrt() * h;
        }
        Ok(len)
    }

    /// Area of {p·axis > level} by Gauss–Legendre in p·axis and uniform ψ,
    /// with the area ratio dμ/dσ interpolated.
    pub fn cap_area(&self, c: &ParamCircle) -> f64 {
        let grid = self.state.grid();
        let (x, w) = gauss_legendre(grid.n_theta);
        let np = grid.n_phi;
        let hpsi = 2.0 * PI / np as f64;
        let half = 0.5 * (1.0 - c.level);
        let mut area = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let z = c.level + half * (xi + 1.0);
            for j in 0..np {
                let (t, f) = angles(&c.point(z, j as f64 * hpsi));
                area += wi * half * hpsi * self.interp.at(&self.state.density, t, f);
            }
        }
        area
    }

    pub fn measure(&self, c: &ParamCircle) -> Result<CurveMeasure> {
        let length = self.length(c)?;
        let cap = self.cap_area(c);
        let rest = self.state.area - cap;
        if !(cap > 0.0 && rest > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "circle at level {} does not split the surface",
                c.level
            )));
        }
        Ok(CurveMeasure {
            length,
            area_cap: cap,
            area_rest: rest,
        })
    }
}

/// min over the candidate family of L/min(|S₁|,|S₂|), an upper bound on IN₁.
pub fn in1_upper(state: &FlowState, ambient: &AmbientMetric) -> Result<f64> {
    let meter = CurveMeter::new(state, ambient);
    candidate_family()
        .iter()
        .map(|c| meter.measure(c).map(|m| m.ratio()))
        .try_fold(f64::INFINITY, |acc, r| r.map(|r| acc.min(r)))
}
