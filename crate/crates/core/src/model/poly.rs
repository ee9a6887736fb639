use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

/// Sparse polynomial in `nvars` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    /// Combines like terms and drops zero coefficients.
    pub fn new(nvars: usize, terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != nvars {
                return Err(Error::Dimension(format!(
                    "monomial has {} exponents, expected {nvars}",
                    t.exponents.len()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self::collect(nvars, terms))
    }

    fn collect(nvars: usize, terms: Vec<Monomial>) -> Self {
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for t in terms {
            *map.entry(t.exponents).or_insert(0.0) += t.coeff;
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(exponents, coeff)| Monomial { coeff, exponents })
            .collect();
        Polynomial { nvars, terms }
    }

    /// Shorthand: `(coefficient, exponent vector)` pairs.
    pub fn from_pairs(nvars: usize, pairs: &[(f64, &[u32])]) -> Result<Self> {
        Self::new(nvars, pairs.iter().map(|(c, e)| Monomial { coeff: *c, exponents: e.to_vec() }).collect())
    }

    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::collect(nvars, vec![Monomial { coeff: c, exponents: vec![0; nvars] }])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Polynomial { nvars, terms: vec![Monomial { coeff: 1.0, exponents: e }] }
    }

    /// `x_1 + … + x_n − 1`.
    pub fn simplex(nvars: usize) -> Self {
        let mut p = Self::constant(nvars, -1.0);
        for i in 0..nvars {
            p = &p + &Self::var(nvars, i);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exponents.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.exponents
                    .iter()
                    .zip(x)
                    .fold(t.coeff, |acc, (&e, &xi)| if e == 0 { acc } else { acc * xi.powi(e as i32) })
            })
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[var] > 0)
            .map(|t| {
                let mut e = t.exponents.clone();
                let k = e[var];
                e[var] -= 1;
                Monomial { coeff: t.coeff * k as f64, exponents: e }
            })
            .collect();
        Self::collect(self.nvars, terms)
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Self::collect(
            self.nvars,
            self.terms.iter().map(|t| Monomial { coeff: t.coeff * c, exponents: t.exponents.clone() }).collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Self::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, o.nvars, "adding polynomials in different rings");
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        Polynomial::collect(self.nvars, t)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        self + &(-o)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, o.nvars, "multiplying polynomials in different rings");
        let mut t = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                t.push(Monomial {
                    coeff: a.coeff * b.coeff,
                    exponents: a.exponents.iter().zip(&b.exponents).map(|(x, y)| x + y).collect(),
                });
            }
        }
        Polynomial::collect(self.nvars, t)
    }
}

/// A polynomial map `R^n → R^m` with cached first and second derivatives.
#[derive(Clone, Debug)]
pub struct PolyMap {
    polys: Vec<Polynomial>,
    grads: Vec<Vec<Polynomial>>,
    hess: Vec<Vec<Vec<Polynomial>>>,
}

impl PolyMap {
    pub fn new(polys: Vec<Polynomial>) -> Self {
        let grads: Vec<Vec<Polynomial>> = polys.iter().map(|p| p.gradient()).collect();
        let hess = grads.iter().map(|g| g.iter().map(|d| d.gradient()).collect()).collect();
        PolyMap { polys, grads, hess }
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.polys.iter().map(|p| p.eval(x)).collect()
    }

    pub fn jacobian(&self, x: &[f64]) -> Matrix<f64> {
        let n = x.len();
        let mut j = Matrix::zeros(self.polys.len(), n);
        for (r, g) in self.grads.iter().enumerate() {
            for (c, d) in g.iter().enumerate() {
                j[(r, c)] = d.eval(x);
            }
        }
        j
    }

    /// One `n×n` Hessian per component.
    pub fn hessians(&self, x: &[f64]) -> Vec<Matrix<f64>> {
        let n = x.len();
        self.hess
            .iter()
            .map(|h| {
                let mut m = Matrix::zeros(n, n);
                for (r, row) in h.iter().enumerate() {
                    for (c, d) in row.iter().enumerate() {
                        m[(r, c)] = d.eval(x);
                    }
                }
                m
            })
            .collect()
    }
}
