//! Differentiation and integration of quantities sampled at output times.

use crate::stencil::fornberg;

const STENCIL: usize = 5;

/// df/dt at every sample from the five nearest samples (fourth order; one-sided
/// near the ends). Falls back to fewer points on short series.
pub fn derivative(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    assert_eq!(n, f.len());
    if n < 2 {
        return vec![0.0; n];
    }
    let w = STENCIL.min(n);
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(w / 2).min(n - w);
            let c = fornberg(t[k], &t[lo..lo + w], 1);
            c[1].iter().zip(&f[lo..lo + w]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

pub fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2)
        .zip(f.windows(2))
        .map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1]))
        .sum()
}

/// Running trapezoid integral, starting at 0.
pub fn cumulative_trapezoid(t: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    if !t.is_empty() {
        out.push(0.0);
    }
    for (t, f) in t.windows(2).zip(f.windows(2)) {
        acc += 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
        out.push(acc);
    }
    out
}

fn is_uniform(t: &[f64]) -> bool {
    let h = t[1] - t[0];
    t.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs())
}

/// Composite Simpson rule (3/8 rule on the last three intervals when the
/// interval count is odd). Non-uniform samples use the trapezoid rule, except
/// that a short final interval is handled separately.
pub fn simpson(t: &[f64], f: &[f64]) -> f64 {
    let n = t.len();
    if n < 3 {
        return trapezoid(t, f);
    }
    if !is_uniform(t) {
        if is_uniform(&t[..n - 1]) && n - 1 >= 3 {
            let tail = &t[n - 2..];
            return simpson(&t[..n - 1], &f[..n - 1]) + interpolated_tail(t, f, tail[0], tail[1]);
        }
        return trapezoid(t, f);
    }
    let h = t[1] - t[0];
    let intervals = n - 1;
    let (even, rest) = if intervals % 2 == 0 {
        (intervals, 0)
    } else if intervals >= 3 {
        (intervals - 3, 3)
    } else {
        return trapezoid(t, f);
    };
    let mut s = 0.0;
    for k in (0..even).step_by(2) {
        s += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
    }
    if rest == 3 {
        let k = even;
        s += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    }
    s
}

/// ∫ over [a, b] of the cubic through the last four samples.
fn interpolated_tail(t: &[f64], f: &[f64], a: f64, b: f64) -> f64 {
    let n = t.len();
    let lo = n.saturating_sub(4);
    let (xs, ys) = (&t[lo..], &f[lo..]);
    let gl = [
        (-(3.0_f64 / 5.0).sqrt(), 5.0 / 9.0),
        (0.0, 8.0 / 9.0),
        ((3.0_f64 / 5.0).sqrt(), 5.0 / 9.0),
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    gl.iter()
        .map(|(x, w)| {
            let z = mid + half * x;
            let c = fornberg(z, xs, 0);
            w * half * c[0].iter().zip(ys).map(|(c, y)| c * y).sum::<f64>()
        })
        .sum()
}

const WEIGHTED_POINTS: usize = 6;

/// ∫ w(t) f(t) dt over the sampled range, with f replaced on each interval by
/// the degree-5 interpolant through the nearest samples and the product
/// integrated by 8-point Gauss–Legendre. Suited to weights that are smooth but
/// steep, such as compactly supported bumps.
pub fn integrate_weighted(t: &[f64], f: &[f64], w: impl Fn(f64) -> f64) -> f64 {
    let n = t.len();
    if n < 2 {
        return 0.0;
    }
    let p = WEIGHTED_POINTS.min(n);
    let (x, wq) = crate::grid::gauss_legendre(8);
    let mut total = 0.0;
    for k in 0..n - 1 {
        let lo = (k + 1).saturating_sub(p / 2).min(n - p);
        let (a, b) = (t[k], t[k + 1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (xi, wi) in x.iter().zip(&wq) {
            let z = mid + half * xi;
            let c = fornberg(z, &t[lo..lo + p], 0);
            let fz: f64 = c[0].iter().zip(&f[lo..lo + p]).map(|(c, y)| c * y).sum();
            total += wi * half * w(z) * fz;
        }
    }
    total
}
