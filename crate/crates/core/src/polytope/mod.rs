//! Convex polytopes in low ambient dimension, held either as inequalities and
//! equalities (`HPolytope`) or as a vertex list (`VPolytope`).
//!
//! Every computation first moves to orthonormal coordinates on the affine hull
//! (`AffineFrame`), so lower-dimensional polytopes such as cells inside a
//! simplex are handled as full-dimensional ones there.

mod dd;
pub mod io;
mod lattice;

pub use lattice::{f_vector, face_lattice_of, Face, FaceLattice};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, svd, Matrix};
use crate::scalar::{dot, max_abs, norm2, sub, Scalar};

/// `{x : A·x ≤ b, E·x = g}`.
#[derive(Clone, Debug)]
pub struct HPolytope<T> {
    pub ineq: Matrix<T>,
    pub rhs: Vec<T>,
    pub eq: Matrix<T>,
    pub eq_rhs: Vec<T>,
}

impl<T: Scalar> HPolytope<T> {
    pub fn new(ineq: Matrix<T>, rhs: Vec<T>, eq: Matrix<T>, eq_rhs: Vec<T>) -> Result<Self> {
        if ineq.rows() != rhs.len() || eq.rows() != eq_rhs.len() || ineq.cols() != eq.cols() {
            return Err(Error::Dimension(format!(
                "inequalities {}x{} with {} right-hand sides, equalities {}x{} with {}",
                ineq.rows(),
                ineq.cols(),
                rhs.len(),
                eq.rows(),
                eq.cols(),
                eq_rhs.len()
            )));
        }
        Ok(HPolytope { ineq, rhs, eq, eq_rhs })
    }

    /// Only inequalities.
    pub fn from_inequalities(ineq: Matrix<T>, rhs: Vec<T>) -> Result<Self> {
        let n = ineq.cols();
        Self::new(ineq, rhs, Matrix::zeros(0, n), Vec::new())
    }

    /// The scaled simplex `{x ≥ 0, Σx = scale}`.
    pub fn simplex(n: usize, scale: T) -> Self {
        let mut neg = Matrix::identity(n);
        for i in 0..n {
            neg[(i, i)] = -T::one();
        }
        let ones = Matrix::new(1, n, vec![T::one(); n]).expect("finite");
        HPolytope { ineq: neg, rhs: vec![T::zero(); n], eq: ones, eq_rhs: vec![scale] }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ineq.cols()
    }

    pub fn push_inequality(&mut self, a: &[T], b: T) {
        self.ineq.push_row(a);
        self.rhs.push(b);
    }

    pub fn push_equality(&mut self, e: &[T], g: T) {
        self.eq.push_row(e);
        self.eq_rhs.push(g);
    }

    /// Both constraint systems together.
    pub fn intersect(&self, other: &HPolytope<T>) -> Result<HPolytope<T>> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::Dimension("intersecting polytopes of different ambient dimension".into()));
        }
        let mut rhs = self.rhs.clone();
        rhs.extend_from_slice(&other.rhs);
        let mut eq_rhs = self.eq_rhs.clone();
        eq_rhs.extend_from_slice(&other.eq_rhs);
        HPolytope::new(self.ineq.stack(&other.ineq), rhs, self.eq.stack(&other.eq), eq_rhs)
    }

    /// Largest constraint violation at `x` (negative when strictly inside all inequalities
    /// and there are no equalities).
    pub fn violation(&self, x: &[T]) -> T {
        let mut worst = T::neg_infinity();
        for i in 0..self.ineq.rows() {
            worst = worst.max(dot(self.ineq.row(i), x) - self.rhs[i]);
        }
        for i in 0..self.eq.rows() {
            worst = worst.max((dot(self.eq.row(i), x) - self.eq_rhs[i]).abs());
        }
        worst
    }

    /// Smallest slack `b_i − a_i·x` over the inequalities, with rows normalised.
    pub fn min_slack(&self, x: &[T]) -> T {
        (0..self.ineq.rows())
            .map(|i| {
                let row = self.ineq.row(i);
                let nr = norm2(row);
                let s = self.rhs[i] - dot(row, x);
                if nr > T::zero() {
                    s / nr
                } else {
                    s
                }
            })
            .fold(T::infinity(), |a, b| a.min(b))
    }

    /// Keeps only inequalities that define facets of `v` (the same polytope as vertices).
    pub fn prune(&self, v: &VPolytope<T>, tol: T) -> HPolytope<T> {
        let frame = v.frame(tol);
        let k = frame.dim();
        let mut kept: Vec<Vec<usize>> = Vec::new();
        let mut out = HPolytope {
            ineq: Matrix::zeros(0, self.ambient_dim()),
            rhs: Vec::new(),
            eq: self.eq.clone(),
            eq_rhs: self.eq_rhs.clone(),
        };
        for i in 0..self.ineq.rows() {
            let row = self.ineq.row(i);
            let scale = T::one().max(norm2(row)).max(self.rhs[i].abs());
            let tight: Vec<usize> = v
                .vertices
                .iter()
                .enumerate()
                .filter(|(_, x)| (dot(row, x) - self.rhs[i]).abs() <= tol * scale)
                .map(|(j, _)| j)
                .collect();
            if tight.len() == v.vertices.len() || tight.len() < k {
                continue;
            }
            let pts: Vec<Vec<T>> = tight.iter().map(|&j| v.vertices[j].clone()).collect();
            if affine_rank(&pts, tol) + 1 != k || kept.contains(&tight) {
                continue;
            }
            kept.push(tight);
            out.push_inequality(row, self.rhs[i]);
        }
        out
    }
}

/// Membership within `tol` on every equality and inequality.
pub fn contains<T: Scalar>(h: &HPolytope<T>, x: &[T], tol: T) -> bool {
    if x.len() != h.ambient_dim() {
        return false;
    }
    h.violation(x) <= tol
}

/// Vertex list of a polytope; the list is irredundant.
#[derive(Clone, Debug, PartialEq)]
pub struct VPolytope<T> {
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<T>>,
}

impl<T: Scalar> VPolytope<T> {
    /// Trusts that `vertices` are the extreme points.
    pub fn new(ambient_dim: usize, vertices: Vec<Vec<T>>) -> Result<Self> {
        if vertices.iter().any(|v| v.len() != ambient_dim) {
            return Err(Error::Dimension("vertex of wrong length".into()));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(VPolytope { ambient_dim, vertices })
    }

    /// Convex hull of arbitrary points, keeping only the extreme ones.
    pub fn from_points(ambient_dim: usize, points: Vec<Vec<T>>, tol: T) -> Result<Self> {
        let raw = Self::new(ambient_dim, dd::dedup_points(points, tol))?;
        if raw.vertices.len() <= 1 {
            return Ok(raw);
        }
        let frame = raw.frame(tol);
        let k = frame.dim();
        if k == 0 {
            return Self::new(ambient_dim, vec![raw.vertices[0].clone()]);
        }
        let local: Vec<Vec<T>> = raw.vertices.iter().map(|x| frame.to_local(x)).collect();
        let facets = local_facets(&local, tol)?;
        let keep: Vec<Vec<T>> = local
            .iter()
            .zip(&raw.vertices)
            .filter(|(y, _)| {
                let normals: Vec<Vec<T>> = facets
                    .iter()
                    .filter(|f| (dot(f, y) - T::one()).abs() <= tol.sqrt() * T::lit(1e-2))
                    .cloned()
                    .collect();
                normals.len() >= k && rank_of_rows(&normals, k, tol) == k
            })
            .map(|(_, x)| x.clone())
            .collect();
        Self::new(ambient_dim, keep)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn centroid(&self) -> Vec<T> {
        let n = T::lit(self.vertices.len() as f64);
        let mut c = vec![T::zero(); self.ambient_dim];
        for v in &self.vertices {
            for (ci, &x) in c.iter_mut().zip(v) {
                *ci += x;
            }
        }
        c.iter().map(|&x| x / n).collect()
    }

    pub fn frame(&self, tol: T) -> AffineFrame<T> {
        AffineFrame::from_points(self.ambient_dim, &self.vertices, tol)
    }

    pub fn dim(&self, tol: T) -> usize {
        self.frame(tol).dim()
    }
}

/// Orthonormal coordinates on an affine subspace: `x = origin + basisᵀ·y`.
#[derive(Clone, Debug)]
pub struct AffineFrame<T> {
    pub origin: Vec<T>,
    /// k×n, orthonormal rows spanning the direction space.
    pub basis: Matrix<T>,
    /// (n−k)×n, orthonormal rows spanning its orthogonal complement.
    pub complement: Matrix<T>,
}

impl<T: Scalar> AffineFrame<T> {
    /// Affine hull of `points` (the first point's hull if there is only one).
    pub fn from_points(n: usize, points: &[Vec<T>], tol: T) -> Self {
        if points.is_empty() {
            return AffineFrame {
                origin: vec![T::zero(); n],
                basis: Matrix::zeros(0, n),
                complement: Matrix::identity(n),
            };
        }
        let count = T::lit(points.len() as f64);
        let mut origin = vec![T::zero(); n];
        for p in points {
            for (o, &x) in origin.iter_mut().zip(p) {
                *o += x;
            }
        }
        for o in origin.iter_mut() {
            *o /= count;
        }
        let rows: Vec<Vec<T>> = points.iter().map(|p| sub(p, &origin)).collect();
        let d = Matrix::from_rows(n, &rows).expect("finite points");
        let s = svd(&d);
        let coord_scale = points.iter().map(|p| max_abs(p)).fold(T::one(), |a, b| a.max(b));
        let smax = s.singular.first().copied().unwrap_or_else(T::zero);
        let thr = tol * smax.max(coord_scale);
        let k = s.singular.iter().filter(|&&x| x > thr).count();
        Self::split(origin, &s.v, k)
    }

    /// Solution set of `E·x = g`; `Empty` when inconsistent.
    pub fn from_equalities(e: &Matrix<T>, g: &[T], tol: T) -> Result<Self> {
        let n = e.cols();
        if e.rows() == 0 {
            return Ok(AffineFrame {
                origin: vec![T::zero(); n],
                basis: Matrix::identity(n),
                complement: Matrix::zeros(0, n),
            });
        }
        let s = svd(e);
        let r = s.rank(tol);
        let origin = least_squares(e, g, tol);
        let res = sub(&e.mul_vec(&origin), g);
        let scale = T::one().max(max_abs(g)).max(e.max_abs());
        if max_abs(&res) > tol.sqrt() * T::lit(1e-2) * scale {
            return Err(Error::Empty);
        }
        // Row space of E is the complement, kernel is the direction space.
        let split = Self::split(origin, &s.v, r);
        Ok(AffineFrame { origin: split.origin, basis: split.complement, complement: split.basis })
    }

    fn split(origin: Vec<T>, v: &Matrix<T>, k: usize) -> Self {
        let n = v.rows();
        let mut basis = Matrix::zeros(k, n);
        let mut complement = Matrix::zeros(n - k, n);
        for j in 0..n {
            for i in 0..n {
                if j < k {
                    basis[(j, i)] = v[(i, j)];
                } else {
                    complement[(j - k, i)] = v[(i, j)];
                }
            }
        }
        AffineFrame { origin, basis, complement }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.origin.len()
    }

    pub fn to_local(&self, x: &[T]) -> Vec<T> {
        self.basis.mul_vec(&sub(x, &self.origin))
    }

    pub fn to_ambient(&self, y: &[T]) -> Vec<T> {
        let mut x = self.basis.vec_mul(y);
        for (xi, &o) in x.iter_mut().zip(&self.origin) {
            *xi += o;
        }
        x
    }

    /// Distance-like measure of how far `x` is from the affine subspace.
    pub fn residual(&self, x: &[T]) -> T {
        max_abs(&self.complement.mul_vec(&sub(x, &self.origin)))
    }
}

fn rank_of_rows<T: Scalar>(rows: &[Vec<T>], cols: usize, tol: T) -> usize {
    if rows.is_empty() {
        return 0;
    }
    crate::linalg::rank(&Matrix::from_rows(cols, rows).expect("finite"), tol.sqrt() * T::lit(1e-2))
}

/// Dimension of the affine hull of a point set.
pub fn affine_rank<T: Scalar>(points: &[Vec<T>], tol: T) -> usize {
    match points.first() {
        None => 0,
        Some(p) => AffineFrame::from_points(p.len(), points, tol).dim(),
    }
}

/// Vertices of `h` within `tol`.
pub fn vertices_of<T: Scalar>(h: &HPolytope<T>, tol: T) -> Result<VPolytope<T>> {
    let n = h.ambient_dim();
    let frame = AffineFrame::from_equalities(&h.eq, &h.eq_rhs, tol)?;
    let k = frame.dim();
    let mut a_loc: Vec<Vec<T>> = Vec::new();
    let mut b_loc: Vec<T> = Vec::new();
    for i in 0..h.ineq.rows() {
        let row = h.ineq.row(i);
        let proj = frame.basis.mul_vec(row);
        let rhs = h.rhs[i] - dot(row, &frame.origin);
        let nr = norm2(&proj);
        let scale = T::one().max(norm2(row));
        if nr <= tol * scale {
            if rhs < -tol * scale.max(rhs.abs()) {
                return Err(Error::Empty);
            }
            continue;
        }
        a_loc.push(proj.iter().map(|&x| x / nr).collect());
        b_loc.push(rhs / nr);
    }
    if k == 0 {
        return if b_loc.iter().all(|&b| b >= -tol) {
            VPolytope::new(n, vec![frame.origin.clone()])
        } else {
            Err(Error::Empty)
        };
    }
    let local = dd::vertices(k, &a_loc, &b_loc, tol)?;
    VPolytope::new(n, local.iter().map(|y| frame.to_ambient(y)).collect())
}

/// Facet normals `f` (meaning `f·y ≤ 1`) of a full-dimensional point set whose
/// centroid is the origin of the local coordinates.
fn local_facets<T: Scalar>(local: &[Vec<T>], tol: T) -> Result<Vec<Vec<T>>> {
    let k = local[0].len();
    let mut a = Vec::with_capacity(local.len());
    let mut b = Vec::with_capacity(local.len());
    for y in local {
        let nr = norm2(y);
        if nr <= tol {
            continue;
        }
        a.push(y.iter().map(|&x| x / nr).collect::<Vec<T>>());
        b.push(T::one() / nr);
    }
    dd::vertices(k, &a, &b, tol)
}

/// Irredundant inequality description of `conv(v)` inside its affine hull;
/// the equalities describe the affine hull.
pub fn hull_of<T: Scalar>(v: &VPolytope<T>, tol: T) -> Result<HPolytope<T>> {
    let n = v.ambient_dim;
    if v.is_empty() {
        return Err(Error::Empty);
    }
    let frame = v.frame(tol);
    let k = frame.dim();
    let complement = frame.complement.clone();
    let eq_rhs = complement.mul_vec(&frame.origin);
    let mut h = HPolytope::new(Matrix::zeros(0, n), Vec::new(), complement, eq_rhs)?;
    if k == 0 {
        return Ok(h);
    }
    let local: Vec<Vec<T>> = v.vertices.iter().map(|x| frame.to_local(x)).collect();
    for f in local_facets(&local, tol)? {
        let a = frame.basis.vec_mul(&f);
        let rhs = T::one() + dot(&a, &frame.origin);
        let nr = norm2(&a);
        let row: Vec<T> = a.iter().map(|&x| x / nr).collect();
        h.push_inequality(&row, rhs / nr);
    }
    Ok(h)
}

/// Polar dual `{y : (y − c)·(v − c) ≤ 1 for all vertices v} + c`, computed in the
/// affine hull of `p` with `c = center`.
pub fn dual_of<T: Scalar>(p: &VPolytope<T>, center: &[T], tol: T) -> Result<VPolytope<T>> {
    if p.is_empty() || center.len() != p.ambient_dim {
        return Err(Error::CenterNotInterior);
    }
    let frame = p.frame(tol);
    let scale = T::one().max(max_abs(center));
    if frame.residual(center) > tol.sqrt() * T::lit(1e-2) * scale {
        return Err(Error::CenterNotInterior);
    }
    let k = frame.dim();
    if k == 0 {
        return VPolytope::new(p.ambient_dim, vec![center.to_vec()]);
    }
    let c = frame.to_local(center);
    let shifted: Vec<Vec<T>> = p.vertices.iter().map(|x| sub(&frame.to_local(x), &c)).collect();
    if shifted.iter().any(|y| norm2(y) <= tol) {
        return Err(Error::CenterNotInterior);
    }
    let dual_local = match local_facets(&shifted, tol) {
        Ok(f) => f,
        Err(Error::Unbounded) | Err(Error::Empty) => return Err(Error::CenterNotInterior),
        Err(e) => return Err(e),
    };
    let verts = dual_local
        .iter()
        .map(|z| {
            let y: Vec<T> = z.iter().zip(&c).map(|(&a, &b)| a + b).collect();
            frame.to_ambient(&y)
        })
        .collect();
    VPolytope::new(p.ambient_dim, verts)
}

/// Greedy nearest-neighbour matching of two vertex sets; returns the largest
/// max-norm distance between matched pairs, or `None` if the counts differ or
/// some vertex has no partner within `match_tol`.
pub fn match_vertex_sets<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>], match_tol: T) -> Option<T> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = T::zero();
    for x in a {
        let best =
            b.iter().enumerate().filter(|(j, _)| !used[*j]).map(|(j, y)| (j, crate::scalar::max_abs_diff(x, y))).fold(
                None,
                |acc: Option<(usize, T)>, cur| match acc {
                    Some(a) if a.1 <= cur.1 => Some(a),
                    _ => Some(cur),
                },
            )?;
        if best.1 > match_tol {
            return None;
        }
        used[best.0] = true;
        worst = worst.max(best.1);
    }
    Some(worst)
}
