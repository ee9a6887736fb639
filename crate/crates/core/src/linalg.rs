//! Dense linear algebra for the small systems that show up here (at most a few
//! dozen rows and columns): singular values by one-sided Jacobi, LU solves,
//! and a damped Newton iteration for square nonlinear systems.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{dot, max_abs, Scalar};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Stacks rows; all rows must share the length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row of length {} in a matrix with {cols} columns", r.len())));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn push_row(&mut self, row: &[T]) {
        assert_eq!(row.len(), self.cols, "row length");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "mul_vec shape");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀ · self`, i.e. the linear combination of rows with weights `x`.
    pub fn vec_mul(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.rows, x.len(), "vec_mul shape");
        let mut out = vec![T::zero(); self.cols];
        for (i, &w) in x.iter().enumerate() {
            for (o, &v) in out.iter_mut().zip(self.row(i)) {
                *o += w * v;
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.data)
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.cols, "stack shape");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

/// Singular values and right singular vectors.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// Descending.
    pub singular: Vec<T>,
    /// Columns are the right singular vectors, in the order of `singular`.
    pub v: Matrix<T>,
}

impl<T: Scalar> Svd<T> {
    fn threshold(&self, tol: T) -> T {
        let smax = self.singular.first().copied().unwrap_or_else(T::zero);
        tol * smax
    }

    pub fn rank(&self, tol: T) -> usize {
        let thr = self.threshold(tol);
        self.singular.iter().filter(|&&s| s > thr && s > T::zero()).count()
    }
}

/// One-sided Jacobi SVD. Works for any shape; only `V` is accumulated.
pub fn svd<T: Scalar>(m: &Matrix<T>) -> Svd<T> {
    let (rows, n) = (m.rows(), m.cols());
    // Work column-major: cols[j] is column j of the working matrix.
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| m.col(j)).collect();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (a, b) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * a - s * b;
                    cols[q][i] = s * a + c * b;
                }
                for i in 0..n {
                    let (a, b) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * a - s * b;
                    v[(i, q)] = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<T> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut vs = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vs[(i, new)] = v[(i, old)];
        }
    }
    Svd { singular: order.iter().map(|&j| sigma[j]).collect(), v: vs }
}

/// Numerical rank with the relative threshold `tol · σ_max`.
pub fn rank<T: Scalar>(m: &Matrix<T>, tol: T) -> usize {
    svd(m).rank(tol)
}

/// Orthonormal rows spanning the kernel of `m`.
pub fn null_space_basis<T: Scalar>(m: &Matrix<T>, tol: T) -> Matrix<T> {
    let s = svd(m);
    let r = s.rank(tol);
    let n = m.cols();
    let mut out = Matrix::zeros(n - r, n);
    for (k, j) in (r..n).enumerate() {
        for i in 0..n {
            out[(k, i)] = s.v[(i, j)];
        }
    }
    out
}

/// Orthonormal rows spanning the row space of `m`.
pub fn row_space_basis<T: Scalar>(m: &Matrix<T>, tol: T) -> Matrix<T> {
    let s = svd(m);
    let r = s.rank(tol);
    let n = m.cols();
    let mut out = Matrix::zeros(r, n);
    for j in 0..r {
        for i in 0..n {
            out[(j, i)] = s.v[(i, j)];
        }
    }
    out
}

/// LU factorisation with partial pivoting.
struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
}

fn lu_factor<T: Scalar>(a: &Matrix<T>) -> Result<Lu<T>> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::Dimension("LU of a non-square matrix".into()));
    }
    let scale = a.max_abs();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = T::one();
    for k in 0..n {
        let (piv, pval) =
            (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pval <= scale * T::epsilon() * T::lit(n as f64) || pval == T::zero() {
            return Err(Error::SingularJacobian);
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            perm.swap(k, piv);
            sign = -sign;
        }
        let d = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            if f != T::zero() {
                for j in (k + 1)..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
    }
    Ok(Lu { lu, perm, sign })
}

/// Solves `a · x = b` for square `a`.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let f = lu_factor(a)?;
    let n = a.rows();
    let mut x: Vec<T> = f.perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for k in 0..i {
            let t = x[k];
            x[i] -= f.lu[(i, k)] * t;
        }
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let t = x[k];
            x[i] -= f.lu[(i, k)] * t;
        }
        x[i] /= f.lu[(i, i)];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularJacobian);
    }
    Ok(x)
}

/// Determinant; exactly zero for matrices LU flags as singular.
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> T {
    match lu_factor(a) {
        Ok(f) => (0..a.rows()).fold(f.sign, |acc, i| acc * f.lu[(i, i)]),
        Err(_) => T::zero(),
    }
}

/// Minimum-norm least-squares solution of `a · x = b` through the SVD.
pub fn least_squares<T: Scalar>(a: &Matrix<T>, b: &[T], tol: T) -> Vec<T> {
    // Normal form via A = U Σ Vᵀ with U = A V Σ⁻¹.
    let s = svd(a);
    let r = s.rank(tol);
    let n = a.cols();
    let mut x = vec![T::zero(); n];
    for j in 0..r {
        let vj: Vec<T> = (0..n).map(|i| s.v[(i, j)]).collect();
        let avj = a.mul_vec(&vj);
        let sigma = s.singular[j];
        let coef = dot(&avj, b) / (sigma * sigma);
        for i in 0..n {
            x[i] += coef * vj[i];
        }
    }
    x
}

/// Square nonlinear system `F(x) = 0` with an analytic Jacobian.
pub trait SquareSystem<T> {
    fn dim(&self) -> usize;
    fn residual(&self, x: &[T]) -> Vec<T>;
    fn jacobian(&self, x: &[T]) -> Matrix<T>;
}

/// Adapter turning a pair of closures into a [`SquareSystem`].
pub struct FnSystem<F, J> {
    pub dim: usize,
    pub f: F,
    pub j: J,
}

impl<T, F, J> SquareSystem<T> for FnSystem<F, J>
where
    F: Fn(&[T]) -> Vec<T>,
    J: Fn(&[T]) -> Matrix<T>,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn residual(&self, x: &[T]) -> Vec<T> {
        (self.f)(x)
    }
    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        (self.j)(x)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonConfig<T> {
    /// Max-norm residual threshold.
    pub tol: T,
    pub max_iter: usize,
    /// Initial step scale in (0, 1].
    pub damping: T,
}

impl<T: Scalar> Default for NewtonConfig<T> {
    fn default() -> Self {
        NewtonConfig { tol: T::default_tol(), max_iter: 100, damping: T::one() }
    }
}

impl<T: Scalar> NewtonConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) || self.max_iter == 0 {
            return Err(Error::Dimension("Newton needs tol > 0 and max_iter >= 1".into()));
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return Err(Error::Dimension("Newton damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome<T> {
    pub x: Vec<T>,
    /// Max-norm of the residual at `x`.
    pub residual: T,
    pub iterations: usize,
}

fn sq_norm<T: Scalar>(r: &[T]) -> T {
    let s = dot(r, r);
    if s.is_finite() {
        s
    } else {
        T::infinity()
    }
}

/// Damped Newton with step halving whenever the residual does not decrease.
pub fn newton_solve<T: Scalar, S: SquareSystem<T> + ?Sized>(
    system: &S,
    x0: &[T],
    cfg: &NewtonConfig<T>,
) -> Result<NewtonOutcome<T>> {
    cfg.validate()?;
    if system.dim() != x0.len() {
        return Err(Error::Dimension(format!(
            "start point of length {} for a system of size {}",
            x0.len(),
            system.dim()
        )));
    }
    let mut x = x0.to_vec();
    let mut r = system.residual(&x);
    let mut merit = sq_norm(&r);
    if !merit.is_finite() {
        return Err(Error::NoConvergence { iterations: 0, residual: f64::INFINITY });
    }
    for iter in 0..cfg.max_iter {
        let res = max_abs(&r);
        if res <= cfg.tol {
            return Ok(NewtonOutcome { x, residual: res, iterations: iter });
        }
        let jac = system.jacobian(&x);
        let neg: Vec<T> = r.iter().map(|&v| -v).collect();
        let step = solve(&jac, &neg)?;
        let mut alpha = cfg.damping;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<T> = x.iter().zip(&step).map(|(&a, &s)| a + alpha * s).collect();
            let rt = system.residual(&trial);
            let mt = sq_norm(&rt);
            if mt < merit {
                x = trial;
                r = rt;
                merit = mt;
                accepted = true;
                break;
            }
            alpha = alpha * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    let res = max_abs(&r);
    if res <= cfg.tol {
        return Ok(NewtonOutcome { x, residual: res, iterations: cfg.max_iter });
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter, residual: res.to_f64_lossy() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        let cols = rows[0].len();
        Matrix::from_rows(cols, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
        assert!(Matrix::<f64>::new(1, 2, vec![1.0]).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::<f64>::identity(3), 1e-10), 3);
        assert_eq!(rank(&Matrix::<f64>::zeros(2, 4), 1e-10), 0);
        assert_eq!(rank(&m(&[&[1.0, 2.0], &[2.0, 4.0]]), 1e-10), 1);
    }

    #[test]
    fn null_space_of_hyperplane() {
        let a = m(&[&[1.0, 1.0, 1.0]]);
        let k = null_space_basis(&a, 1e-10);
        assert_eq!(k.rows(), 2);
        for i in 0..2 {
            assert!(dot(k.row(i), &[1.0, 1.0, 1.0]).abs() < 1e-12);
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(k.row(i), k.row(j)) - expect).abs() < 1e-12);
            }
        }
        assert_eq!(null_space_basis(&Matrix::<f64>::identity(4), 1e-10).rows(), 0);
    }

    #[test]
    fn null_space_of_two_rows() {
        let a = m(&[&[1.0, 1.0, 1.0, 1.0], &[3.0, 2.0, 1.0, 0.0]]);
        let k = null_space_basis(&a, 1e-10);
        assert_eq!(k.rows(), 2);
        for i in 0..2 {
            for r in 0..2 {
                assert!(dot(k.row(i), a.row(r)).abs() < 1e-12);
            }
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(k.row(i), k.row(j)) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn solve_and_determinant() {
        let a = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!((determinant(&a) - 5.0).abs() < 1e-14);
        let s = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(solve(&s, &[1.0, 1.0]), Err(Error::SingularJacobian)));
        assert_eq!(determinant(&s), 0.0);
    }

    #[test]
    fn least_squares_min_norm() {
        let a = m(&[&[1.0, 1.0]]);
        let x = least_squares(&a, &[2.0], 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn newton_scalar_root() {
        let sys = FnSystem {
            dim: 1,
            f: |x: &[f64]| vec![x[0] * x[0] - 4.0],
            j: |x: &[f64]| Matrix::new(1, 1, vec![2.0 * x[0]]).unwrap(),
        };
        let out = newton_solve(&sys, &[3.0], &NewtonConfig::default()).unwrap();
        assert!((out.x[0] - 2.0).abs() < 1e-10);
        assert!(out.residual <= 1e-10);
    }

    #[test]
    fn newton_linear_one_step() {
        let a = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let a2 = a.clone();
        let sys = FnSystem {
            dim: 2,
            f: move |x: &[f64]| {
                let y = a.mul_vec(x);
                vec![y[0] - 3.0, y[1] - 5.0]
            },
            j: move |_: &[f64]| a2.clone(),
        };
        let out = newton_solve(&sys, &[0.0, 0.0], &NewtonConfig::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((out.x[0] - 0.8).abs() < 1e-12 && (out.x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn newton_reports_failures() {
        // x² + 1 has no real root.
        let sys = FnSystem {
            dim: 1,
            f: |x: &[f64]| vec![x[0] * x[0] + 1.0],
            j: |x: &[f64]| Matrix::new(1, 1, vec![2.0 * x[0]]).unwrap(),
        };
        let cfg = NewtonConfig { max_iter: 20, ..NewtonConfig::default() };
        assert!(newton_solve(&sys, &[0.5], &cfg).is_err());
        assert!(matches!(newton_solve(&sys, &[0.0], &cfg), Err(Error::SingularJacobian)));
        let bad = NewtonConfig { tol: 0.0, ..NewtonConfig::default() };
        assert!(newton_solve(&sys, &[1.0], &bad).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let a: Matrix<f32> = Matrix::from_rows(3, &[vec![1.0, 1.0, 1.0]]).unwrap();
        let k = null_space_basis(&a, 1e-4);
        assert_eq!(k.rows(), 2);
        assert!(dot(k.row(0), &[1.0f32, 1.0, 1.0]).abs() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rank_nullity(rows in 1usize..5, cols in 1usize..6, seed in proptest::collection::vec(-3i32..4, 30)) {
                let data: Vec<f64> = (0..rows * cols).map(|k| seed[k % seed.len()] as f64 * 0.5).collect();
                let a = Matrix::new(rows, cols, data).unwrap();
                let tol = 1e-10;
                let r = rank(&a, tol);
                let k = null_space_basis(&a, tol);
                prop_assert_eq!(r + k.rows(), cols);
                let scale = a.max_abs().max(1.0);
                for i in 0..k.rows() {
                    for row in 0..rows {
                        prop_assert!(dot(k.row(i), a.row(row)).abs() < 10.0 * tol * scale * (cols as f64));
                    }
                    for j in 0..k.rows() {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((dot(k.row(i), k.row(j)) - expect).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
