use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::poly::{PolyMap, Polynomial};
use super::random_simplex_point;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, rank, Matrix};
use crate::scalar::max_abs;

const RANK_TOL: f64 = 1e-9;

/// Zero set of `f_1, …, f_m` in the simplex, with `f_1 = Σx_i − 1`.
#[derive(Clone, Debug)]
pub struct ImplicitModel {
    n: usize,
    map: PolyMap,
    codim: usize,
    sample_point: Vec<f64>,
}

impl ImplicitModel {
    /// Finds a positive model point by Gauss–Newton from seeded random starts and
    /// takes the codimension from the Jacobian rank there.
    pub fn new(n: usize, polynomials: Vec<Polynomial>) -> Result<Self> {
        Self::check(n, &polynomials)?;
        let map = PolyMap::new(polynomials);
        let point = find_model_point(&map, n, 2019)
            .ok_or_else(|| Error::InvalidModel("no positive point found on the variety".into()))?;
        Self::finish(n, map, point)
    }

    /// Uses `sample_point` (which must lie on the model) for the codimension.
    pub fn with_sample_point(n: usize, polynomials: Vec<Polynomial>, sample_point: Vec<f64>) -> Result<Self> {
        Self::check(n, &polynomials)?;
        if sample_point.len() != n {
            return Err(Error::Dimension("sample point has the wrong length".into()));
        }
        let map = PolyMap::new(polynomials);
        let res = max_abs(&map.eval(&sample_point));
        if res > 1e-9 {
            return Err(Error::NotOnModel(res));
        }
        Self::finish(n, map, sample_point)
    }

    fn check(n: usize, polynomials: &[Polynomial]) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidModel("no coordinates".into()));
        }
        if polynomials.iter().any(|p| p.nvars() != n) {
            return Err(Error::Dimension("polynomial in the wrong number of variables".into()));
        }
        match polynomials.first() {
            Some(p) if *p == Polynomial::simplex(n) => Ok(()),
            _ => Err(Error::InvalidModel("the first polynomial must be x_1 + ... + x_n - 1".into())),
        }
    }

    fn finish(n: usize, map: PolyMap, sample_point: Vec<f64>) -> Result<Self> {
        let codim = rank(&map.jacobian(&sample_point), RANK_TOL);
        Ok(ImplicitModel { n, map, codim, sample_point })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of polynomials, including the simplex.
    pub fn m(&self) -> usize {
        self.map.len()
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        self.map.polys()
    }

    pub fn sample_point(&self) -> &[f64] {
        &self.sample_point
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        self.map.eval(x)
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        max_abs(&self.evaluate(x))
    }

    pub fn jacobian(&self, x: &[f64]) -> Matrix<f64> {
        self.map.jacobian(x)
    }

    pub fn hessians(&self, x: &[f64]) -> Vec<Matrix<f64>> {
        self.map.hessians(x)
    }

    /// Jacobian rank at `x`.
    pub fn rank_at(&self, x: &[f64]) -> usize {
        rank(&self.jacobian(x), RANK_TOL)
    }

    /// Gauss–Newton projection of `x` onto the variety.
    pub fn project(&self, x: &[f64]) -> Option<Vec<f64>> {
        gauss_newton(&self.map, x)
    }
}

fn gauss_newton(map: &PolyMap, x0: &[f64]) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    for _ in 0..60 {
        let f = map.eval(&x);
        if max_abs(&f) < 1e-14 {
            return Some(x);
        }
        let step = least_squares(&map.jacobian(&x), &f, 1e-12);
        for (xi, s) in x.iter_mut().zip(&step) {
            *xi -= s;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    (max_abs(&map.eval(&x)) < 1e-12).then_some(x)
}

fn find_model_point(map: &PolyMap, n: usize, seed: u64) -> Option<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..500 {
        let start = random_simplex_point(&mut rng, n);
        if let Some(x) = gauss_newton(map, &start) {
            if x.iter().all(|&v| v > 1e-6) {
                return Some(x);
            }
        }
    }
    None
}
