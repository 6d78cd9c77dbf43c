//! First nonzero Laplace–Beltrami eigenvalue by Rayleigh–Ritz on real spherical
//! harmonics pulled back to the surface.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::FlowState;
use crate::harmonics::HarmonicBasis;

/// Ritz values of -Δ_g in span{Y_lm : l ≤ l_max}, ascending. The first is the
/// constant mode (zero up to roundoff).
pub fn ritz_spectrum(state: &FlowState, basis: &HarmonicBasis) -> Result<Vec<f64>> {
    let grid = state.grid();
    let n = grid.len();
    let nb = basis.len();
    let mut y = DMatrix::zeros(nb, n);
    let mut yt = DMatrix::zeros(nb, n);
    let mut yp = DMatrix::zeros(nb, n);
    for b in 0..nb {
        for k in 0..n {
            y[(b, k)] = basis.values[b][k];
            yt[(b, k)] = basis.d_theta[b][k];
            yp[(b, k)] = basis.d_phi[b][k];
        }
    }
    let mut wy = y.clone();
    let mut wt = yt.clone();
    let mut wp = yp.clone();
    for k in 0..n {
        let w = grid.weights[k] * state.density[k];
        let gi = state.g.values[k].inverse();
        for b in 0..nb {
            wy[(b, k)] *= w;
            let (a, c) = (yt[(b, k)], yp[(b, k)]);
            wt[(b, k)] = w * (gi.tt * a + gi.tp * c);
            wp[(b, k)] = w * (gi.tp * a + gi.pp * c);
        }
    }
    let mass = &wy * y.transpose();
    let stiff = &wt * yt.transpose() + &wp * yp.transpose();
    let stiff = 0.5 * (&stiff + stiff.transpose());
    let chol = mass
        .cholesky()
        .ok_or_else(|| Error::Eigen("mass matrix not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigen("singular Cholesky factor".into()))?;
    let c = &linv * stiff * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite Ritz value".into()));
    }
    vals.sort_by(|a, b| a.total_cmp(b));
    Ok(vals)
}

/// λ₁, the first nonzero eigenvalue.
pub fn first_eigenvalue(state: &FlowState, basis: &HarmonicBasis) -> Result<f64> {
    if basis.l_max < 1 {
        return Err(Error::Eigen("basis needs l_max >= 1".into()));
    }
    let v = ritz_spectrum(state, basis)?;
    Ok(v[1])
}
