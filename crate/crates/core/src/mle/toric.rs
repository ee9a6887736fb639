use super::DataPoint;
use crate::error::{Error, Result};
use crate::linalg::{solve, Matrix};
use crate::model::ToricModel;
use crate::scalar::max_abs;

/// `A·u / Σu`.
pub fn moment_map(model: &ToricModel, u: &DataPoint) -> Vec<f64> {
    model.a().mul_vec(&u.normalized())
}

fn birch_residual(a: &Matrix<f64>, p: &[f64], target: &[f64]) -> f64 {
    let ap = a.mul_vec(p);
    max_abs(&ap.iter().zip(target).map(|(x, y)| x - y).collect::<Vec<_>>())
}

/// The model point `p` (summing to 1) with `A·p = A·u/Σu`.
pub fn mle_toric(model: &ToricModel, u: &DataPoint, tol: f64) -> Result<Vec<f64>> {
    if u.len() != model.n() {
        return Err(Error::Dimension("data length differs from the toric model".into()));
    }
    let a = model.a();
    let target = moment_map(model, u);
    match newton(model, u, &a, &target, tol) {
        Some(p) => Ok(p),
        None => scaling(model, u, &a, &target, tol),
    }
}

/// Newton on the convex dual `F(θ) = Σ_j c_j exp((Bᵀθ)_j) − θ·B·û`.
fn newton(model: &ToricModel, u: &DataPoint, a: &Matrix<f64>, target: &[f64], tol: f64) -> Option<Vec<f64>> {
    let b = model.row_basis();
    let c = model.weights();
    let uh = u.normalized();
    let bu = b.mul_vec(&uh);
    let k = b.rows();
    let raw = |theta: &[f64]| -> Vec<f64> { b.vec_mul(theta).iter().zip(c).map(|(e, w)| w * e.exp()).collect() };
    let objective = |p: &[f64], theta: &[f64]| -> f64 {
        p.iter().sum::<f64>() - theta.iter().zip(&bu).map(|(t, v)| t * v).sum::<f64>()
    };
    let logs: Vec<f64> = uh.iter().zip(c).map(|(v, w)| (v / w).ln()).collect();
    let mut theta = b.mul_vec(&logs);
    let mut p = raw(&theta);
    let mut f = objective(&p, &theta);
    for _ in 0..200 {
        if birch_residual(a, &p, target) <= tol {
            return Some(p);
        }
        let grad: Vec<f64> = b.mul_vec(&p).iter().zip(&bu).map(|(x, y)| x - y).collect();
        let mut h = Matrix::zeros(k, k);
        for r in 0..k {
            for s in 0..k {
                h[(r, s)] = (0..p.len()).map(|j| b[(r, j)] * p[j] * b[(s, j)]).sum();
            }
        }
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let step = solve(&h, &neg).ok()?;
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..50 {
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + alpha * s).collect();
            let pt = raw(&trial);
            let ft = objective(&pt, &trial);
            if ft.is_finite() && ft <= f {
                theta = trial;
                p = pt;
                f = ft;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (birch_residual(a, &p, target) <= tol).then_some(p)
}

/// Generalised iterative scaling on a nonnegative matrix with constant column sums
/// spanning the same row space.
fn scaling(model: &ToricModel, u: &DataPoint, a: &Matrix<f64>, target: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = model.n();
    let mut rows: Vec<Vec<f64>> = a
        .row_vecs()
        .into_iter()
        .map(|r| {
            let m = r.iter().cloned().fold(f64::INFINITY, f64::min).min(0.0);
            r.iter().map(|v| v - m).collect()
        })
        .collect();
    let colsum: Vec<f64> = (0..n).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
    let s = colsum.iter().cloned().fold(0.0, f64::max).max(1.0);
    rows.push(colsum.iter().map(|v| s - v).collect());
    let g = Matrix::from_rows(n, &rows).expect("finite");
    let goal = g.mul_vec(&u.normalized());
    let w = model.weights();
    let ws: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|v| v / ws).collect();
    let max_iter = 200_000;
    for _ in 0..max_iter {
        if birch_residual(a, &p, target) <= tol {
            return Ok(p);
        }
        let gp = g.mul_vec(&p);
        for j in 0..n {
            let mut e = 0.0;
            for r in 0..g.rows() {
                if g[(r, j)] != 0.0 && goal[r] > 0.0 {
                    e += g[(r, j)] / s * (goal[r] / gp[r]).ln();
                }
            }
            p[j] *= e.exp();
        }
        let t: f64 = p.iter().sum();
        for v in p.iter_mut() {
            *v /= t;
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: birch_residual(a, &p, target) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, Model};

    fn toric(name: &str) -> ToricModel {
        match builtin(name).unwrap() {
            Model::Toric(t) => t,
            _ => unreachable!(),
        }
    }

    #[test]
    fn twisted_cubic_on_model_data() {
        let m = toric("twisted_cubic");
        let u = DataPoint::new(vec![0.125, 0.375, 0.375, 0.125]).unwrap();
        let p = mle_toric(&m, &u, 1e-12).unwrap();
        for (a, b) in p.iter().zip(u.u()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_fallback_agrees_with_newton() {
        let m = toric("twisted_cubic");
        let u = DataPoint::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let a = m.a();
        let target = moment_map(&m, &u);
        let p1 = newton(&m, &u, &a, &target, 1e-12).unwrap();
        let p2 = scaling(&m, &u, &a, &target, 1e-11).unwrap();
        for (x, y) in p1.iter().zip(&p2) {
            assert!((x - y).abs() < 1e-9);
        }
        let seg = toric("segre");
        let u = DataPoint::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let a = seg.a();
        let target = moment_map(&seg, &u);
        let q = scaling(&seg, &u, &a, &target, 1e-11).unwrap();
        assert!((q[0] - 0.3 * 0.4).abs() < 1e-9);
    }
}
