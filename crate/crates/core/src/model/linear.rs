use crate::error::{Error, Result};
use crate::linalg::{least_squares, row_space_basis, Matrix};
use crate::scalar::max_abs;

/// `f(θ) = offset + L·θ` with `θ` in a box; the components sum to 1 identically.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    offset: Vec<f64>,
    /// `n` rows of `d` coefficients.
    coefficients: Vec<Vec<f64>>,
    bounds: Vec<(f64, f64)>,
}

impl LinearModel {
    pub fn new(offset: Vec<f64>, coefficients: Vec<Vec<f64>>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let n = offset.len();
        let d = bounds.len();
        if n == 0 || coefficients.len() != n || coefficients.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("linear model needs n offsets and an n×d coefficient table".into()));
        }
        if offset.iter().chain(coefficients.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if (offset.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel("constant terms must sum to 1".into()));
        }
        for k in 0..d {
            if coefficients.iter().map(|r| r[k]).sum::<f64>().abs() > 1e-12 {
                return Err(Error::InvalidModel(format!("coefficients of θ_{} must sum to 0", k + 1)));
            }
        }
        for i in 0..n {
            if offset[i] == 0.0 && coefficients[i].iter().all(|&c| c == 0.0) {
                return Err(Error::InvalidModel(format!("component {} is identically zero", i + 1)));
            }
        }
        if bounds.iter().any(|&(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidModel("each θ bound must satisfy lo < hi".into()));
        }
        Ok(LinearModel { offset, coefficients, bounds })
    }

    pub fn n(&self) -> usize {
        self.offset.len()
    }

    pub fn d(&self) -> usize {
        self.bounds.len()
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn l(&self) -> Matrix<f64> {
        Matrix::from_rows(self.d(), &self.coefficients).expect("checked finite")
    }

    pub fn eval(&self, theta: &[f64]) -> Vec<f64> {
        let lt = self.l().mul_vec(theta);
        self.offset.iter().zip(&lt).map(|(c, v)| c + v).collect()
    }

    /// Least-squares parameters of `p`.
    pub fn locate(&self, p: &[f64]) -> Vec<f64> {
        let rhs: Vec<f64> = p.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        least_squares(&self.l(), &rhs, 1e-12)
    }

    /// Distance of `p` from the affine image of `f`.
    pub fn residual(&self, p: &[f64]) -> f64 {
        let q = self.eval(&self.locate(p));
        max_abs(&p.iter().zip(&q).map(|(a, b)| a - b).collect::<Vec<_>>())
    }

    /// Orthonormal basis of the column space of `L`.
    pub fn tangent_basis(&self) -> Matrix<f64> {
        row_space_basis(&self.l().transpose(), 1e-12)
    }

    /// Midpoint of the parameter box.
    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}
