use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{PolyMap, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, row_space_basis, Matrix};
use crate::scalar::max_abs;

/// Polynomial map from a parameter box into the simplex.
#[derive(Clone, Debug)]
pub struct ParametricModel {
    map: PolyMap,
    domain: Vec<(f64, f64)>,
}

impl ParametricModel {
    /// Checks that the components sum to 1 at 100 random parameters.
    pub fn new(map: Vec<Polynomial>, domain: Vec<(f64, f64)>) -> Result<Self> {
        let d = domain.len();
        if map.is_empty() || map.iter().any(|p| p.nvars() != d) {
            return Err(Error::Dimension("map components must be polynomials in the parameters".into()));
        }
        if domain.iter().any(|&(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidModel("each parameter bound must satisfy lo < hi".into()));
        }
        let model = ParametricModel { map: PolyMap::new(map), domain };
        let mut rng = ChaCha8Rng::seed_from_u64(2019);
        for _ in 0..100 {
            let theta = model.random_parameter(&mut rng);
            let s: f64 = model.eval(&theta).iter().sum();
            if (s - 1.0).abs() >= 1e-12 {
                return Err(Error::InvalidModel(format!("components sum to {s} at parameter {theta:?}")));
            }
        }
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn params(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn components(&self) -> &[Polynomial] {
        self.map.polys()
    }

    pub fn eval(&self, theta: &[f64]) -> Vec<f64> {
        self.map.eval(theta)
    }

    /// `n × params` derivative of the map.
    pub fn jacobian(&self, theta: &[f64]) -> Matrix<f64> {
        self.map.jacobian(theta)
    }

    /// Hessian of each component at `theta`.
    pub fn hessians(&self, theta: &[f64]) -> Vec<Matrix<f64>> {
        self.map.hessians(theta)
    }

    pub fn random_parameter<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.domain.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect()
    }

    /// Parameters mapping to `p`, by Gauss–Newton from seeded starts.
    pub fn locate(&self, p: &[f64]) -> Option<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut theta = self.random_parameter(&mut rng);
            for _ in 0..80 {
                let r: Vec<f64> = self.eval(&theta).iter().zip(p).map(|(a, b)| a - b).collect();
                if max_abs(&r) < 1e-14 {
                    break;
                }
                let step = least_squares(&self.jacobian(&theta), &r, 1e-12);
                for (t, s) in theta.iter_mut().zip(&step) {
                    *t -= s;
                }
                if theta.iter().any(|v| !v.is_finite()) {
                    break;
                }
            }
            if theta.iter().all(|v| v.is_finite()) {
                let r: Vec<f64> = self.eval(&theta).iter().zip(p).map(|(a, b)| a - b).collect();
                if max_abs(&r) < 1e-11 {
                    return Some(theta);
                }
            }
        }
        None
    }

    /// Orthonormal basis of the image of the derivative at `theta`.
    pub fn tangent_basis(&self, theta: &[f64]) -> Matrix<f64> {
        row_space_basis(&self.jacobian(theta).transpose(), 1e-10)
    }
}
