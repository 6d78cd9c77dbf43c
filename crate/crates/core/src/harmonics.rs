//! Real orthonormal spherical harmonics with analytic angular derivatives.

use std::f64::consts::PI;

use crate::grid::SphericalGrid;

/// Value, ∂_θ and ∂_φ of one harmonic at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicValue {
    pub value: f64,
    pub d_theta: f64,
    pub d_phi: f64,
}

fn factorial_ratio(l: usize, m: usize) -> f64 {
    // (l-m)!/(l+m)!
    ((l - m + 1)..=(l + m)).fold(1.0, |acc, k| acc / k as f64)
}

/// P_l^m(x) for l = m..=l_max without the Condon–Shortley phase.
fn assoc_legendre_column(m: usize, l_max: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; l_max + 1];
    if m > l_max {
        return p;
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 0..m {
        pmm *= (2 * k + 1) as f64 * s;
    }
    p[m] = pmm;
    if m < l_max {
        p[m + 1] = x * (2 * m + 1) as f64 * pmm;
    }
    for l in m + 2..=l_max {
        p[l] = ((2 * l - 1) as f64 * x * p[l - 1] - (l + m - 1) as f64 * p[l - 2]) / (l - m) as f64;
    }
    p
}

/// Real Y_lm: m > 0 uses cos(mφ), m < 0 uses sin(|m|φ).
pub fn real_ylm(l: usize, m: i32, theta: f64, phi: f64) -> HarmonicValue {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "|m| must not exceed l");
    let (st, ct) = theta.sin_cos();
    let col = assoc_legendre_column(am, l, ct);
    let p = col[l];
    let pm1 = if l > am { col[l - 1] } else { 0.0 };
    let dp = (l as f64 * ct * p - (l + am) as f64 * pm1) / st;
    let mut n = ((2 * l + 1) as f64 / (4.0 * PI) * factorial_ratio(l, am)).sqrt();
    if m != 0 {
        n *= std::f64::consts::SQRT_2;
    }
    let mf = am as f64;
    let (a, da) = match m.signum() {
        0 => (1.0, 0.0),
        1 => ((mf * phi).cos(), -mf * (mf * phi).sin()),
        _ => ((mf * phi).sin(), mf * (mf * phi).cos()),
    };
    HarmonicValue {
        value: n * p * a,
        d_theta: n * dp * a,
        d_phi: n * p * da,
    }
}

/// (l, m) pairs in the order used by [`HarmonicBasis`].
pub fn basis_indices(l_max: usize) -> Vec<(usize, i32)> {
    (0..=l_max)
        .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
        .collect()
}

/// All real harmonics up to `l_max` tabulated on a grid.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub l_max: usize,
    pub indices: Vec<(usize, i32)>,
    /// `values[b][k]`, basis function b at node k.
    pub values: Vec<Vec<f64>>,
    pub d_theta: Vec<Vec<f64>>,
    pub d_phi: Vec<Vec<f64>>,
}

impl HarmonicBasis {
    pub fn new(grid: &SphericalGrid, l_max: usize) -> Self {
        let indices = basis_indices(l_max);
        let nb = indices.len();
        let mut values = vec![Vec::with_capacity(grid.len()); nb];
        let mut d_theta = values.clone();
        let mut d_phi = values.clone();
        for (t, p) in grid.nodes() {
            for (b, &(l, m)) in indices.iter().enumerate() {
                let h = real_ylm(l, m, t, p);
                values[b].push(h.value);
                d_theta[b].push(h.d_theta);
                d_phi[b].push(h.d_phi);
            }
        }
        Self {
            l_max,
            indices,
            values,
            d_theta,
            d_phi,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Coefficients ∫ f Y_b dσ by grid quadrature.
    pub fn project(&self, grid: &SphericalGrid, f: &[f64]) -> Vec<f64> {
        self.values
            .iter()
            .map(|y| {
                y.iter()
                    .zip(f)
                    .zip(&grid.weights)
                    .map(|((y, f), w)| y * f * w)
                    .sum()
            })
            .collect()
    }
}

/// A truncated harmonic expansion Σ c_lm Y_lm, evaluable anywhere.
#[derive(Debug, Clone)]
pub struct HarmonicSeries {
    pub l_max: usize,
    /// Coefficients in [`basis_indices`] order.
    pub coeffs: Vec<f64>,
    norms: Vec<Vec<f64>>,
}

impl HarmonicSeries {
    pub fn new(l_max: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), (l_max + 1) * (l_max + 1));
        let norms = (0..=l_max)
            .map(|l| {
                (0..=l)
                    .map(|m| {
                        let n = ((2 * l + 1) as f64 / (4.0 * PI) * factorial_ratio(l, m)).sqrt();
                        if m > 0 {
                            n * std::f64::consts::SQRT_2
                        } else {
                            n
                        }
                    })
                    .collect()
            })
            .collect();
        Self { l_max, coeffs, norms }
    }

    /// Least-squares fit by grid quadrature.
    pub fn fit(grid: &SphericalGrid, l_max: usize, f: &[f64]) -> Self {
        Self::new(l_max, HarmonicBasis::new(grid, l_max).project(grid, f))
    }

    pub fn coeff(&self, l: usize, m: i32) -> f64 {
        self.coeffs[l * l + (l as i64 + m as i64) as usize]
    }

    /// Same expansion with each degree-l coefficient multiplied by `f(l)`.
    pub fn map_degrees(&self, f: impl Fn(usize) -> f64) -> Self {
        let coeffs = basis_indices(self.l_max)
            .iter()
            .zip(&self.coeffs)
            .map(|(&(l, _), c)| f(l) * c)
            .collect();
        Self {
            l_max: self.l_max,
            coeffs,
            norms: self.norms.clone(),
        }
    }

    pub fn eval(&self, theta: f64, phi: f64) -> HarmonicValue {
        Self::eval_many(&[self], theta, phi)[0]
    }

    /// Evaluates several expansions of the same degree at one point, sharing
    /// the Legendre recurrences.
    pub fn eval_many<const N: usize>(series: &[&Self; N], theta: f64, phi: f64) -> [HarmonicValue; N] {
        let zero = HarmonicValue {
            value: 0.0,
            d_theta: 0.0,
            d_phi: 0.0,
        };
        let mut out = [zero; N];
        let Some(first) = series.first() else {
            return out;
        };
        let l_max = first.l_max;
        assert!(series.iter().all(|s| s.l_max == l_max), "degrees must agree");
        let (st, ct) = theta.sin_cos();
        let mut col = vec![0.0; l_max + 1];
        let mut pmm = 1.0;
        for am in 0..=l_max {
            if am > 0 {
                pmm *= (2 * am - 1) as f64 * st;
            }
            col[am] = pmm;
            if am < l_max {
                col[am + 1] = ct * (2 * am + 1) as f64 * pmm;
            }
            for l in am + 2..=l_max {
                col[l] = ((2 * l - 1) as f64 * ct * col[l - 1] - (l + am - 1) as f64 * col[l - 2]) / (l - am) as f64;
            }
            let mf = am as f64;
            let (sm, cm) = (mf * phi).sin_cos();
            for l in am..=l_max {
                let p = col[l];
                let pm1 = if l > am { col[l - 1] } else { 0.0 };
                let dp = (l as f64 * ct * p - (l + am) as f64 * pm1) / st;
                let base = l * l + l;
                for (s, o) in series.iter().zip(out.iter_mut()) {
                    let n = s.norms[l][am];
                    if am == 0 {
                        let c = s.coeffs[base] * n;
                        o.value += c * p;
                        o.d_theta += c * dp;
                    } else {
                        let a = s.coeffs[base + am] * n;
                        let b = s.coeffs[base - am] * n;
                        let ang = a * cm + b * sm;
                        o.value += p * ang;
                        o.d_theta += dp * ang;
                        o.d_phi += p * mf * (b * cm - a * sm);
                    }
                }
            }
        }
        out
    }

    /// Values at every grid node.
    pub fn synthesize(&self, grid: &SphericalGrid) -> Vec<f64> {
        grid.nodes().map(|(t, p)| self.eval(t, p).value).collect()
    }
}
