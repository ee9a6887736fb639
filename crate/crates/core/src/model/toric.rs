use crate::error::{Error, Result};
use crate::linalg::{least_squares, null_space_basis, row_space_basis, Matrix};
use crate::scalar::max_abs;

/// Log-linear model `{p ∈ Δ : log p − log c ∈ rowspan A}` with positive weights `c`
/// (all ones for a plain toric model).
#[derive(Clone, Debug, PartialEq)]
pub struct ToricModel {
    matrix: Vec<Vec<i64>>,
    weights: Vec<f64>,
}

impl ToricModel {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.first().map(|r| r.len()).unwrap_or(0);
        Self::with_weights(matrix, vec![1.0; n])
    }

    pub fn with_weights(matrix: Vec<Vec<i64>>, weights: Vec<f64>) -> Result<Self> {
        let n = matrix.first().map(|r| r.len()).unwrap_or(0);
        if n == 0 || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel("toric matrix must be a nonempty rectangle".into()));
        }
        if weights.len() != n || weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidModel("toric weights must be positive, one per column".into()));
        }
        if (0..n).any(|j| matrix.iter().all(|r| r[j] == 0)) {
            return Err(Error::InvalidModel("toric matrix has a zero column".into()));
        }
        let model = ToricModel { matrix, weights };
        let a = model.a();
        let at = a.transpose();
        let coef = least_squares(&at, &vec![1.0; n], 1e-12);
        let res = at.mul_vec(&coef).iter().map(|v| v - 1.0).fold(0.0f64, |m, v| m.max(v.abs()));
        if res > 1e-10 {
            return Err(Error::InvalidModel("the all-ones vector is not in the row span of the toric matrix".into()));
        }
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn a(&self) -> Matrix<f64> {
        let rows: Vec<Vec<f64>> = self.matrix.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        Matrix::from_rows(self.n(), &rows).expect("integer entries are finite")
    }

    /// Orthonormal basis of the row span of `A`.
    pub fn row_basis(&self) -> Matrix<f64> {
        row_space_basis(&self.a(), 1e-12)
    }

    /// Model point `c ⊙ exp(Bᵀθ)` normalised to sum 1, where `B` is [`Self::row_basis`].
    pub fn point(&self, theta: &[f64]) -> Vec<f64> {
        let b = self.row_basis();
        let e = b.vec_mul(theta);
        let m = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = e.iter().zip(&self.weights).map(|(v, c)| c * (v - m).exp()).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|v| v / s).collect()
    }

    /// Residual of `log p − log c` against the row span of `A`.
    pub fn residual(&self, p: &[f64]) -> f64 {
        if p.len() != self.n() || p.iter().any(|&v| !(v > 0.0)) {
            return f64::INFINITY;
        }
        let l: Vec<f64> = p.iter().zip(&self.weights).map(|(v, c)| (v / c).ln()).collect();
        let b = self.row_basis();
        let proj = b.vec_mul(&b.mul_vec(&l));
        let sum_res = (p.iter().sum::<f64>() - 1.0).abs();
        max_abs(&l.iter().zip(&proj).map(|(a, b)| a - b).collect::<Vec<_>>()).max(sum_res)
    }

    /// Orthonormal basis of the tangent space `{diag(p)·Aᵀθ} ∩ {Σ = 0}` at `p`.
    pub fn tangent_basis(&self, p: &[f64]) -> Matrix<f64> {
        let b = self.row_basis();
        let n = self.n();
        let mut gens: Vec<Vec<f64>> = Vec::new();
        for k in 0..b.rows() {
            gens.push((0..n).map(|i| p[i] * b[(k, i)]).collect());
        }
        // Columns of `gens` span diag(p)·rowspan(A); keep the part with zero sum.
        let g = Matrix::from_rows(n, &gens).expect("finite");
        let sums: Vec<f64> = (0..g.rows()).map(|k| g.row(k).iter().sum()).collect();
        let coef = Matrix::new(1, sums.len(), sums).expect("finite");
        let ker = null_space_basis(&coef, 1e-12);
        let t = ker.matmul(&g);
        row_space_basis(&t, 1e-10)
    }
}
