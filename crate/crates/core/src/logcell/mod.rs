//! Log-normal spaces and polytopes, and logarithmic Voronoi cells.

mod classify;
mod finite;

pub use classify::{
    classify, disjointness_probe, parametric_critical_points, sample_cell, CellSample, ClassifyOptions,
    DisjointnessReport, Label, SampleOptions,
};
pub use finite::{finite_voronoi_cell, finite_voronoi_cell_from};

use crate::error::{Error, Result};
use crate::linalg::{null_space_basis, row_space_basis, svd, Matrix};
use crate::model::Model;
use crate::polytope::{vertices_of, HPolytope, VPolytope};
use crate::scalar::{dot, max_abs, norm2};

/// `log N_p M = {u : (u_i/p_i)_i ∈ N_p M}` as a linear subspace of `R^n`.
#[derive(Clone, Debug)]
pub struct LogNormalSpace {
    point: Vec<f64>,
    /// Orthonormal rows.
    basis: Matrix<f64>,
}

impl LogNormalSpace {
    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn basis(&self) -> &Matrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.point.len()
    }

    /// Orthonormal rows spanning the orthogonal complement.
    pub fn complement(&self) -> Matrix<f64> {
        null_space_basis(&self.basis, 1e-12)
    }

    /// Euclidean norm of the component of `u` orthogonal to the space, relative to `‖u‖`.
    pub fn residual(&self, u: &[f64]) -> f64 {
        let coef = self.basis.mul_vec(u);
        let proj = self.basis.vec_mul(&coef);
        let r: Vec<f64> = u.iter().zip(&proj).map(|(a, b)| a - b).collect();
        norm2(&r) / norm2(u).max(1e-300)
    }

    /// The slice with `Σu = scale` and `u ≥ 0`.
    pub fn polytope_h(&self, scale: f64) -> HPolytope<f64> {
        let n = self.ambient_dim();
        let mut h = HPolytope::simplex(n, scale);
        let comp = self.complement();
        for k in 0..comp.rows() {
            h.push_equality(comp.row(k), 0.0);
        }
        h
    }
}

/// Rows spanning the normal space `N_p M` (for an implicit model, the Jacobian rows,
/// which may be dependent) and the codimension `c`.
pub fn normal_rows(model: &Model, p: &[f64]) -> Result<(Matrix<f64>, usize)> {
    let n = model.n();
    if p.len() != n {
        return Err(Error::Dimension(format!("point has {} coordinates, model has {n}", p.len())));
    }
    if let Some(index) = p.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonpositiveCoordinate { index });
    }
    let scale = max_abs(p).max(1.0);
    match model {
        Model::Implicit(m) => {
            let res = m.residual(p);
            if res > 1e-8 * scale {
                return Err(Error::NotOnModel(res));
            }
            let j = m.jacobian(p);
            let rank = crate::linalg::rank(&j, 1e-9);
            if rank < m.codim() {
                return Err(Error::SingularPoint { rank, codim: m.codim() });
            }
            Ok((j, m.codim()))
        }
        Model::Toric(t) => {
            let res = t.residual(p);
            if res > 1e-8 {
                return Err(Error::NotOnModel(res));
            }
            let nb = null_space_basis(&t.tangent_basis(p), 1e-12);
            let c = nb.rows();
            Ok((nb, c))
        }
        Model::Linear(l) => {
            let res = l.residual(p);
            if res > 1e-8 * scale {
                return Err(Error::NotOnModel(res));
            }
            let nb = null_space_basis(&l.tangent_basis(), 1e-12);
            let c = nb.rows();
            Ok((nb, c))
        }
        Model::Parametric(pm) => {
            let theta = pm.locate(p).ok_or(Error::NotOnModel(f64::NAN))?;
            let t = pm.tangent_basis(&theta);
            if t.rows() < pm.params() {
                return Err(Error::SingularPoint { rank: n - t.rows(), codim: n - pm.params() });
            }
            let nb = null_space_basis(&t, 1e-12);
            let c = nb.rows();
            Ok((nb, c))
        }
        Model::Finite(_) => {
            Err(Error::InvalidModel("a finite model has no log-normal space; use finite_voronoi_cell".into()))
        }
    }
}

/// Orthonormal basis of `diag(p)·N_p M`.
pub fn log_normal_space(model: &Model, p: &[f64], tol: f64) -> Result<LogNormalSpace> {
    let (rows, c) = normal_rows(model, p)?;
    let scaled = Matrix::from_rows(
        p.len(),
        &rows.row_vecs().iter().map(|r| r.iter().zip(p).map(|(a, b)| a * b).collect()).collect::<Vec<Vec<f64>>>(),
    )?;
    let basis = row_space_basis(&scaled, tol.max(1e-12));
    if basis.rows() != c {
        return Err(Error::SingularPoint { rank: basis.rows(), codim: c });
    }
    Ok(LogNormalSpace { point: p.to_vec(), basis })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Linear functionals in `u` given by the maximal minors of `[rows_R ; u/p]` over
/// every choice `R` of `c` rows and `c + 1` columns.
pub fn minor_functionals(rows: &Matrix<f64>, p: &[f64], c: usize) -> Matrix<f64> {
    let n = p.len();
    let mut out = Matrix::zeros(0, n);
    for r in subsets(rows.rows(), c) {
        for s in subsets(n, c + 1) {
            let mut f = vec![0.0; n];
            for (pos, &k) in s.iter().enumerate() {
                // Cofactor of the (c, pos) entry of the (c+1)×(c+1) minor.
                let mut sub = Matrix::zeros(c, c);
                for (a, &ri) in r.iter().enumerate() {
                    let mut b = 0;
                    for (q, &col) in s.iter().enumerate() {
                        if q != pos {
                            sub[(a, b)] = rows[(ri, col)];
                            b += 1;
                        }
                    }
                }
                let sign = if (c + pos) % 2 == 0 { 1.0 } else { -1.0 };
                f[k] = sign * crate::linalg::determinant(&sub) / p[k];
            }
            if max_abs(&f) > 0.0 {
                out.push_row(&f);
            }
        }
    }
    out
}

/// The log-normal space as the common kernel of the maximal-minor functionals.
pub fn log_normal_space_minors(model: &Model, p: &[f64]) -> Result<LogNormalSpace> {
    let (rows, c) = normal_rows(model, p)?;
    let n = p.len();
    let f = minor_functionals(&rows, p, c);
    let s = svd(&f);
    let mut basis = Matrix::zeros(c, n);
    for (k, j) in (n - c..n).enumerate() {
        for i in 0..n {
            basis[(k, i)] = s.v[(i, j)];
        }
    }
    Ok(LogNormalSpace { point: p.to_vec(), basis })
}

/// `‖P_a − P_b‖₂`, the sine of the largest principal angle between two row spaces
/// (1 when the dimensions differ).
pub fn subspace_gap(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return 1.0;
    }
    let pa = a.transpose().matmul(a);
    let pb = b.transpose().matmul(b);
    let n = a.cols();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            d[(i, j)] = pa[(i, j)] - pb[(i, j)];
        }
    }
    svd(&d).singular.first().copied().unwrap_or(0.0)
}

/// Vertices of `log N_p M ∩ {Σu = Σp} ∩ {u ≥ 0}`.
pub fn log_normal_polytope(model: &Model, p: &[f64], tol: f64) -> Result<VPolytope<f64>> {
    let space = log_normal_space(model, p, tol)?;
    let scale: f64 = p.iter().sum();
    vertices_of(&space.polytope_h(scale), tol.max(1e-12))
}

/// Orthonormal rows spanning `{Σx = 0}`, by Gram–Schmidt on `e_1 − e_n, …, e_{n−1} − e_n`.
pub fn simplex_projection_basis(n: usize) -> Matrix<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v[n - 1] = -1.0;
        for r in &rows {
            let c = dot(&v, r);
            for (x, y) in v.iter_mut().zip(r) {
                *x -= c * y;
            }
        }
        let nr = norm2(&v);
        rows.push(v.iter().map(|x| x / nr).collect());
    }
    Matrix::from_rows(n, &rows).expect("finite")
}

/// Coordinates of `x` in [`simplex_projection_basis`].
pub fn project_to_simplex_coords(x: &[f64]) -> Vec<f64> {
    simplex_projection_basis(x.len()).mul_vec(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, cousin_point, mixture_reference_point};

    fn segre_equations(u: &[f64], x: &[f64]) -> [f64; 4] {
        let (u1, u2, u3, u4) = (u[0], u[1], u[2], u[3]);
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        [
            u2 - u3 - u1 * x2 / x1 + u1 * x3 / x1 + u2 * x4 / x2 - u3 * x4 / x3,
            u1 - u4 - u2 * x1 / x2 + u1 * x3 / x1 - u4 * x3 / x4 + u2 * x4 / x2,
            u1 - u4 + u1 * x2 / x1 - u3 * x1 / x3 - u4 * x2 / x4 + u3 * x4 / x3,
            u2 - u3 + u2 * x1 / x2 - u3 * x1 / x3 - u4 * x2 / x4 + u4 * x3 / x4,
        ]
    }

    #[test]
    fn segre_space_satisfies_displayed_minors() {
        let m = builtin("segre_implicit").unwrap();
        for &(a, b) in &[(0.5, 0.5), (0.2, 0.7), (0.9, 0.35)] {
            let p = vec![a * b, a * (1.0 - b), (1.0 - a) * b, (1.0 - a) * (1.0 - b)];
            let s = log_normal_space(&m, &p, 1e-12).unwrap();
            assert_eq!(s.dim(), 2);
            for row in s.basis().row_vecs() {
                assert!(segre_equations(&row, &p).iter().all(|v| v.abs() < 1e-12));
            }
            let v = log_normal_polytope(&m, &p, 1e-10).unwrap();
            assert_eq!(v.len(), 2);
        }
    }

    #[test]
    fn routes_agree_and_contain_p() {
        for name in ["segre", "segre_implicit", "twisted_cubic", "cousin_hardy_weinberg", "mixture_binomial_5"] {
            let m = builtin(name).unwrap();
            let p = match name {
                "cousin_hardy_weinberg" => cousin_point(0.8),
                "mixture_binomial_5" => mixture_reference_point(),
                "twisted_cubic" => vec![0.216, 0.432, 0.288, 0.064],
                _ => vec![0.06, 0.24, 0.14, 0.56],
            };
            let a = log_normal_space(&m, &p, 1e-12).unwrap();
            let b = log_normal_space_minors(&m, &p).unwrap();
            assert!(subspace_gap(a.basis(), b.basis()) < 1e-9, "{name}");
            assert!(a.residual(&p) < 1e-12, "{name}");
        }
    }

    #[test]
    fn cousin_segment_direction() {
        let m = builtin("cousin_hardy_weinberg").unwrap();
        let v = log_normal_polytope(&m, &cousin_point(1.7), 1e-10).unwrap();
        assert_eq!(v.len(), 2);
        let d: Vec<f64> = v.vertices[0].iter().zip(&v.vertices[1]).map(|(a, b)| a - b).collect();
        let cross = [d[1] * 1.0 - d[2] * -2.0, d[2] * 1.0 - d[0] * 1.0, d[0] * -2.0 - d[1] * 1.0];
        assert!(max_abs(&cross) / norm2(&d) < 1e-9);
    }

    #[test]
    fn finite_model_has_no_space() {
        let g = builtin("grid(3,6)").unwrap();
        assert!(matches!(log_normal_space(&g, &[2.0, 2.0, 2.0], 1e-10), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn projection_basis_is_orthonormal() {
        let b = simplex_projection_basis(4);
        let g = b.matmul(&b.transpose());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - want).abs() < 1e-14);
            }
            assert!(b.row(i).iter().sum::<f64>().abs() < 1e-14);
        }
    }
}
