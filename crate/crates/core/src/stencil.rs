//! Finite-difference operators on the product grid.
//!
//! θ-derivatives use Lagrange/Fornberg weights on the extended meridian: a row
//! beyond a pole is the antipodal row, i.e. (−θ, φ+π) or (2π−θ, φ+π). φ-derivatives
//! are periodic fourth-order central differences.

use crate::grid::SphericalGrid;

/// Sign picked up by a quantity when continued across a pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Fornberg's algorithm: weights `c[d][j]` for the d-th derivative at `z` from
/// values at `x[j]`, for d = 0..=m.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// A point on the extended meridian: real row, and whether the column is shifted by π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeridianPoint {
    pub row: usize,
    pub flipped: bool,
    pub theta: f64,
}

/// Resolve extended row index `k` (may be negative or ≥ n_theta).
pub fn meridian_point(grid: &SphericalGrid, k: isize) -> MeridianPoint {
    let n = grid.n_theta as isize;
    if k < 0 {
        let row = (-k - 1) as usize;
        MeridianPoint {
            row,
            flipped: true,
            theta: -grid.theta[row],
        }
    } else if k >= n {
        let row = (2 * n - 1 - k) as usize;
        MeridianPoint {
            row,
            flipped: true,
            theta: 2.0 * std::f64::consts::PI - grid.theta[row],
        }
    } else {
        let row = k as usize;
        MeridianPoint {
            row,
            flipped: false,
            theta: grid.theta[row],
        }
    }
}

#[derive(Debug, Clone)]
struct Tap {
    row: usize,
    flipped: bool,
    d1: f64,
    d2: f64,
}

/// θ-derivative operator with a fixed half-width (2 → five points, 1 → three points).
#[derive(Debug, Clone)]
pub struct ThetaOperator {
    n_theta: usize,
    n_phi: usize,
    rows: Vec<Vec<Tap>>,
}

impl ThetaOperator {
    pub fn new(grid: &SphericalGrid, half_width: usize) -> Self {
        assert!(half_width >= 1 && half_width < grid.n_theta);
        let hw = half_width as isize;
        let rows = (0..grid.n_theta as isize)
            .map(|i| {
                let pts: Vec<MeridianPoint> =
                    (i - hw..=i + hw).map(|k| meridian_point(grid, k)).collect();
                let x: Vec<f64> = pts.iter().map(|p| p.theta).collect();
                let c = fornberg(grid.theta[i as usize], &x, 2);
                pts.iter()
                    .enumerate()
                    .map(|(j, p)| Tap {
                        row: p.row,
                        flipped: p.flipped,
                        d1: c[1][j],
                        d2: c[2][j],
                    })
                    .collect()
            })
            .collect();
        Self {
            n_theta: grid.n_theta,
            n_phi: grid.n_phi,
            rows,
        }
    }

    fn apply(&self, f: &[f64], parity: Parity, second: bool) -> Vec<f64> {
        let np = self.n_phi;
        let half = np / 2;
        let sign = match parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        };
        let mut out = vec![0.0; self.n_theta * np];
        for (i, taps) in self.rows.iter().enumerate() {
            for tap in taps {
                let w = if second { tap.d2 } else { tap.d1 };
                let w = if tap.flipped { w * sign } else { w };
                let src = &f[tap.row * np..(tap.row + 1) * np];
                let dst = &mut out[i * np..(i + 1) * np];
                if tap.flipped {
                    for j in 0..np {
                        dst[j] += w * src[(j + half) % np];
                    }
                } else {
                    for j in 0..np {
                        dst[j] += w * src[j];
                    }
                }
            }
        }
        out
    }

    pub fn d1(&self, f: &[f64], parity: Parity) -> Vec<f64> {
        self.apply(f, parity, false)
    }

    pub fn d2(&self, f: &[f64], parity: Parity) -> Vec<f64> {
        self.apply(f, parity, true)
    }
}

const PHI_D1: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
const PHI_D2: [f64; 5] = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];

fn phi_apply(f: &[f64], n_phi: usize, coef: &[f64; 5], scale: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for (row_in, row_out) in f.chunks(n_phi).zip(out.chunks_mut(n_phi)) {
        for j in 0..n_phi {
            let mut s = 0.0;
            for (o, c) in coef.iter().enumerate() {
                if *c != 0.0 {
                    s += c * row_in[(j + n_phi + o - 2) % n_phi];
                }
            }
            row_out[j] = s * scale;
        }
    }
    out
}

/// ∂_φ, periodic fourth order.
pub fn d_phi(grid: &SphericalGrid, f: &[f64]) -> Vec<f64> {
    phi_apply(f, grid.n_phi, &PHI_D1, 1.0 / grid.dphi())
}

/// ∂²_φ, periodic fourth order.
pub fn d_phi_phi(grid: &SphericalGrid, f: &[f64]) -> Vec<f64> {
    let h = grid.dphi();
    phi_apply(f, grid.n_phi, &PHI_D2, 1.0 / (h * h))
}

const PERIODIC_D1_8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// First derivative of a periodic sequence with spacing `h`, eighth order.
pub fn periodic_d1_8(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|j| {
            PERIODIC_D1_8
                .iter()
                .enumerate()
                .map(|(o, c)| c * (f[(j + o + 1) % n] - f[(j + n - o - 1) % n]))
                .sum::<f64>()
                / h
        })
        .collect()
}

/// The first and second partials of a scalar field.
#[derive(Debug, Clone)]
pub struct Partials {
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub tt: Vec<f64>,
    pub tp: Vec<f64>,
    pub pp: Vec<f64>,
}

impl Partials {
    pub fn compute(grid: &SphericalGrid, op: &ThetaOperator, f: &[f64], parity: Parity) -> Self {
        let p = d_phi(grid, f);
        Self {
            t: op.d1(f, parity),
            tt: op.d2(f, parity),
            tp: op.d1(&p, parity),
            pp: d_phi_phi(grid, f),
            p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::unit_vector;

    #[test]
    fn fornberg_recovers_central_weights() {
        let c = fornberg(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        for (a, b) in c[1].iter().zip(PHI_D1) {
            assert!((a - b).abs() < 1e-14);
        }
        for (a, b) in c[2].iter().zip(PHI_D2) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// f = z + x y + x on the sphere, exercised across both poles.
    fn sample(grid: &SphericalGrid) -> (Vec<f64>, Vec<[f64; 5]>) {
        let mut f = Vec::new();
        let mut d = Vec::new();
        for (t, p) in grid.nodes() {
            let (st, ct) = t.sin_cos();
            let (sp, cp) = p.sin_cos();
            let n = unit_vector(t, p);
            f.push(n.z + n.x * n.y + n.x);
            // closed-form partials
            let ft = -st + 2.0 * st * ct * sp * cp + ct * cp;
            let fp = st * st * (cp * cp - sp * sp) - st * sp;
            let ftt = -ct + 2.0 * (ct * ct - st * st) * sp * cp - st * cp;
            let ftp = 2.0 * st * ct * (cp * cp - sp * sp) - ct * sp;
            let fpp = -4.0 * st * st * sp * cp - st * cp;
            d.push([ft, fp, ftt, ftp, fpp]);
        }
        (f, d)
    }

    #[test]
    fn derivatives_converge_across_poles() {
        let mut prev = f64::INFINITY;
        for (nt, np) in [(16, 32), (32, 64)] {
            let g = SphericalGrid::new(nt, np).unwrap();
            let op = ThetaOperator::new(&g, 2);
            let (f, d) = sample(&g);
            let pd = Partials::compute(&g, &op, &f, Parity::Even);
            let col = |k: usize| d.iter().map(|r| r[k]).collect::<Vec<_>>();
            let e = [
                max_err(&pd.t, &col(0)),
                max_err(&pd.p, &col(1)),
                max_err(&pd.tt, &col(2)),
                max_err(&pd.tp, &col(3)),
                max_err(&pd.pp, &col(4)),
            ];
            let worst = e.iter().cloned().fold(0.0, f64::max);
            assert!(worst < 5e-3, "{nt}: {e:?}");
            assert!(worst < prev / 8.0);
            prev = worst;
        }
    }

    #[test]
    fn odd_parity_flips_ghosts() {
        // f = ∂_θ(cos θ) = −sin θ continues as an odd quantity.
        let g = SphericalGrid::new(24, 48).unwrap();
        let op = ThetaOperator::new(&g, 2);
        let f: Vec<f64> = g.nodes().map(|(t, _)| -t.sin()).collect();
        let d = op.d1(&f, Parity::Odd);
        let exact: Vec<f64> = g.nodes().map(|(t, _)| -t.cos()).collect();
        let e = max_err(&d, &exact);
        assert!(e < 2e-5, "{e}");
    }

    #[test]
    fn periodic_eighth_order() {
        let n = 128;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let f: Vec<f64> = (0..n).map(|j| (3.0 * j as f64 * h).sin()).collect();
        let d = periodic_d1_8(&f, h);
        let exact: Vec<f64> = (0..n).map(|j| 3.0 * (3.0 * j as f64 * h).cos()).collect();
        assert!(max_err(&d, &exact) < 1e-8);
    }
}
