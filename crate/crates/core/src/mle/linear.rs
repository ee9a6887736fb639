use super::DataPoint;
use crate::error::{Error, Result};
use crate::linalg::{solve, Matrix};
use crate::model::LinearModel;
use crate::scalar::max_abs;

/// Damped Newton ascent of `θ ↦ Σ u_i log f_i(θ)` from the centre of the parameter box.
pub fn mle_linear(model: &LinearModel, u: &DataPoint, tol: f64) -> Result<Vec<f64>> {
    if u.len() != model.n() {
        return Err(Error::Dimension("data length differs from the linear model".into()));
    }
    let uh = u.normalized();
    let l = model.l();
    let d = model.d();
    let value = |f: &[f64]| -> f64 {
        if f.iter().any(|&v| !(v > 0.0)) {
            f64::NEG_INFINITY
        } else {
            uh.iter().zip(f).map(|(a, b)| a * b.ln()).sum()
        }
    };
    let mut theta = model.center();
    let mut f = model.eval(&theta);
    let mut g = value(&f);
    if !g.is_finite() {
        return Err(Error::LeftDomain);
    }
    let max_iter = 100;
    let mut grad_norm = f64::INFINITY;
    for _ in 0..max_iter {
        let mut grad = vec![0.0; d];
        let mut hess = Matrix::zeros(d, d);
        for i in 0..model.n() {
            let li = l.row(i);
            for a in 0..d {
                grad[a] += uh[i] * li[a] / f[i];
                for b in 0..d {
                    hess[(a, b)] -= uh[i] * li[a] * li[b] / (f[i] * f[i]);
                }
            }
        }
        grad_norm = max_abs(&grad);
        if grad_norm <= tol {
            return Ok(f);
        }
        let neg: Vec<f64> = grad.iter().map(|v| -v).collect();
        let step = solve(&hess, &neg)?;
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + alpha * s).collect();
            let ft = model.eval(&trial);
            let gt = value(&ft);
            if gt.is_finite() && gt >= g {
                theta = trial;
                f = ft;
                g = gt;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            return Err(Error::LeftDomain);
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: grad_norm })
}
