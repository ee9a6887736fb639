//! Logarithmic root polytopes of type A and their duality with the finite-model cells.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::binomial;
use crate::polytope::{dual_of, face_lattice_of, vertices_of, HPolytope, VPolytope};
use crate::scalar::{dot, max_abs, Scalar};

/// Largest `n` for exhaustive partition-pair enumeration.
pub const MAX_ENUMERATION_N: usize = 8;

/// Convex hull of the vectors `v_ij` for a grid point with all coordinates above 1.
#[derive(Clone, Debug)]
pub struct LogRootPolytope<T> {
    p: Vec<u64>,
    a: Vec<T>,
    b: Vec<T>,
}

/// `(I, J)`: disjoint nonempty index sets, stored sorted and 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartitionPair {
    i: Vec<usize>,
    j: Vec<usize>,
}

impl OrderedPartitionPair {
    pub fn new(mut i: Vec<usize>, mut j: Vec<usize>, n: usize) -> Result<Self> {
        i.sort_unstable();
        j.sort_unstable();
        i.dedup();
        j.dedup();
        if i.is_empty() || j.is_empty() {
            return Err(Error::InvalidPartition("both blocks must be nonempty".into()));
        }
        if i.iter().chain(&j).any(|&k| k >= n) {
            return Err(Error::InvalidPartition(format!("index out of range for n = {n}")));
        }
        if i.iter().any(|k| j.contains(k)) {
            return Err(Error::InvalidPartition("blocks must be disjoint".into()));
        }
        Ok(OrderedPartitionPair { i, j })
    }

    /// Parses `1,4:2,3,5` (1-based).
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let (left, right) = s.split_once(':').ok_or_else(|| Error::Parse(format!("expected I:J, got {s:?}")))?;
        let block = |t: &str| -> Result<Vec<usize>> {
            t.split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| match x.trim().parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(Error::Parse(format!("bad index {x:?}"))),
                })
                .collect()
        };
        Self::new(block(left)?, block(right)?, n)
    }

    pub fn i(&self) -> &[usize] {
        &self.i
    }

    pub fn j(&self) -> &[usize] {
        &self.j
    }

    /// Dimension `|I| + |J| − 2` of the corresponding face.
    pub fn face_dim(&self) -> usize {
        self.i.len() + self.j.len() - 2
    }
}

impl fmt::Display for OrderedPartitionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[usize]| v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}:{}", show(&self.i), show(&self.j))
    }
}

impl<T: Scalar> LogRootPolytope<T> {
    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn d(&self) -> u64 {
        self.p.iter().sum()
    }

    pub fn p(&self) -> &[u64] {
        &self.p
    }

    /// `a_i = log((p_i + 1)/p_i)`.
    pub fn a(&self) -> &[T] {
        &self.a
    }

    /// `b_j = log(p_j/(p_j − 1))`.
    pub fn b(&self) -> &[T] {
        &self.b
    }

    fn pt(&self, k: usize) -> T {
        T::lit(self.p[k] as f64)
    }

    /// `b_j p_j − a_i p_i`, positive for `i ≠ j`.
    pub fn denominator(&self, i: usize, j: usize) -> T {
        self.b[j] * self.pt(j) - self.a[i] * self.pt(i)
    }

    /// `v_ij = (a_i e_i − b_j e_j − ((a_i − b_j)/n)·1) / (b_j p_j − a_i p_i)`.
    pub fn vertex(&self, i: usize, j: usize) -> Vec<T> {
        let n = self.n();
        let den = self.denominator(i, j);
        let shift = (self.a[i] - self.b[j]) / T::lit(n as f64);
        (0..n)
            .map(|k| {
                let mut x = -shift;
                if k == i {
                    x += self.a[i];
                }
                if k == j {
                    x -= self.b[j];
                }
                x / den
            })
            .collect()
    }

    /// All ordered pairs `(i, j)` with `i ≠ j`, row-major.
    pub fn vertex_labels(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect()
    }

    pub fn vertices(&self) -> Vec<Vec<T>> {
        self.vertex_labels().iter().map(|&(i, j)| self.vertex(i, j)).collect()
    }

    pub fn v_polytope(&self) -> VPolytope<T> {
        VPolytope::new(self.n(), self.vertices()).expect("consistent dimensions")
    }
}

/// Validates `p` (all coordinates at least 2) and computes `a`, `b`.
pub fn build<T: Scalar>(p: &[u64]) -> Result<LogRootPolytope<T>> {
    if p.len() < 2 {
        return Err(Error::Dimension("need at least two states".into()));
    }
    if let Some(index) = p.iter().position(|&v| v <= 1) {
        return Err(Error::CoordinateTooSmall { index, value: p[index] });
    }
    let a = p.iter().map(|&v| (T::lit((v + 1) as f64) / T::lit(v as f64)).ln()).collect();
    let b = p.iter().map(|&v| (T::lit(v as f64) / T::lit((v - 1) as f64)).ln()).collect();
    Ok(LogRootPolytope { p: p.to_vec(), a, b })
}

fn prod<T: Scalar>(xs: &[T], set: &[usize], skip: &[usize]) -> T {
    set.iter().filter(|k| !skip.contains(k)).fold(T::one(), |acc, &k| acc * xs[k])
}

/// The functional `g_IJ`, constant on `{v_ij : i ∈ I, j ∈ J}`. For large faces it is
/// maximised there; for some small faces and uneven `p` another vertex scores higher,
/// which [`FaceCertificate::gap`] reports.
pub fn face_functional<T: Scalar>(poly: &LogRootPolytope<T>, part: &OrderedPartitionPair) -> Vec<T> {
    let (a, b) = (&poly.a, &poly.b);
    let (big_i, big_j) = (&part.i, &part.j);
    let ap = |k: usize| a[k] * poly.pt(k);
    let bp = |k: usize| b[k] * poly.pt(k);
    (0..poly.n())
        .map(|l| {
            if big_i.contains(&l) {
                let mut g = T::zero();
                for &i in big_i.iter().filter(|&&i| i != l) {
                    g += prod(a, big_i, &[l, i]) * prod(b, big_j, &[]) * (ap(i) - ap(l));
                }
                for &j in big_j {
                    g += prod(a, big_i, &[l]) * prod(b, big_j, &[j]) * (bp(j) - ap(l));
                }
                g
            } else if big_j.contains(&l) {
                let mut g = T::zero();
                for &i in big_i {
                    g += prod(a, big_i, &[i]) * prod(b, big_j, &[l]) * (ap(i) - bp(l));
                }
                for &j in big_j.iter().filter(|&&j| j != l) {
                    g += prod(a, big_i, &[]) * prod(b, big_j, &[l, j]) * (bp(j) - bp(l));
                }
                g
            } else {
                T::zero()
            }
        })
        .collect()
}

/// `Σ_{i∈I} a^{I∖i} b^J + Σ_{j∈J} a^I b^{J∖j}`, the value of `g_IJ` on its face.
pub fn common_value<T: Scalar>(poly: &LogRootPolytope<T>, part: &OrderedPartitionPair) -> T {
    let (a, b) = (&poly.a, &poly.b);
    let mut s = T::zero();
    for &i in &part.i {
        s += prod(a, &part.i, &[i]) * prod(b, &part.j, &[]);
    }
    for &j in &part.j {
        s += prod(a, &part.i, &[]) * prod(b, &part.j, &[j]);
    }
    s
}

/// Face vertices of `(I, J)` with the scores of `g_IJ` on every vertex.
#[derive(Clone, Debug)]
pub struct FaceCertificate<T> {
    pub functional: Vec<T>,
    pub face: Vec<(usize, usize)>,
    /// Predicted common value.
    pub value: T,
    /// `g_IJ · v_ij` for every vertex, in [`LogRootPolytope::vertex_labels`] order.
    pub scores: Vec<((usize, usize), T)>,
    /// Largest relative deviation of a face score from `value`.
    pub spread: T,
    /// `value` minus the best score off the face (positive when the face is exposed).
    pub gap: T,
}

impl<T: Scalar> FaceCertificate<T> {
    pub fn holds(&self, spread_tol: T) -> bool {
        self.spread <= spread_tol && self.gap > T::zero()
    }
}

pub fn face_vertices<T: Scalar>(poly: &LogRootPolytope<T>, part: &OrderedPartitionPair) -> FaceCertificate<T> {
    let g = face_functional(poly, part);
    let value = common_value(poly, part);
    let mut face = Vec::new();
    let mut scores = Vec::new();
    let mut spread = T::zero();
    let mut best_other = T::neg_infinity();
    for (i, j) in poly.vertex_labels() {
        let s = dot(&g, &poly.vertex(i, j));
        if part.i.contains(&i) && part.j.contains(&j) {
            face.push((i, j));
            spread = spread.max((s - value).abs() / value.abs());
        } else {
            best_other = best_other.max(s);
        }
        scores.push(((i, j), s));
    }
    FaceCertificate { functional: g, face, value, scores, spread, gap: value - best_other }
}

/// The partition pair of the face on which `f` is maximised, read off from the
/// vertices attaining the maximum (within a relative `1e-12`).
pub fn partition_from_functional<T: Scalar>(poly: &LogRootPolytope<T>, f: &[T]) -> Result<OrderedPartitionPair> {
    let n = poly.n();
    if f.len() != n {
        return Err(Error::Dimension(format!("functional has {} entries, expected {n}", f.len())));
    }
    let labels = poly.vertex_labels();
    let scores: Vec<T> = labels.iter().map(|&(i, j)| dot(f, &poly.vertex(i, j))).collect();
    let best = scores.iter().fold(T::neg_infinity(), |m, &s| m.max(s));
    let worst = scores.iter().fold(T::infinity(), |m, &s| m.min(s));
    let vmax = poly.vertices().iter().fold(T::zero(), |m, v| m.max(max_abs(v)));
    let scale = (max_abs(f) * vmax * T::lit(n as f64)).max(T::min_positive_value());
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * scale;
    if best - worst <= tol {
        return Err(Error::TrivialFace);
    }
    let top: Vec<(usize, usize)> =
        labels.iter().zip(&scores).filter(|(_, &s)| best - s <= tol).map(|(&l, _)| l).collect();
    let mut i: Vec<usize> = top.iter().map(|l| l.0).collect();
    let mut j: Vec<usize> = top.iter().map(|l| l.1).collect();
    i.sort_unstable();
    i.dedup();
    j.sort_unstable();
    j.dedup();
    let part = OrderedPartitionPair::new(i, j, n)?;
    if top.len() != part.i.len() * part.j.len() {
        return Err(Error::InvalidPartition(format!("maximising vertices {top:?} do not form a product I×J")));
    }
    Ok(part)
}

/// Face numbers of the logarithmic root polytope: 1, then `f_m` for `m = 0..n−2`, then 1.
pub fn f_vector_combinatorial(n: usize) -> Vec<u64> {
    let n64 = n as u64;
    let mut out = vec![1];
    for m in 0..n.saturating_sub(1) {
        let total = m as u64 + 2;
        let f: u64 = (1..total).map(|s| binomial(n64, s) * binomial(n64.saturating_sub(s), total - s)).sum();
        out.push(f);
    }
    out.push(1);
    out
}

/// Every ordered pair of disjoint nonempty subsets of `[n]`, ordered by
/// `|I| + |J|`, then lexicographically.
pub fn enumerate_partition_pairs(n: usize) -> Result<Vec<OrderedPartitionPair>> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::Dimension(format!("enumeration is limited to n ≤ {MAX_ENUMERATION_N}")));
    }
    let mut out = Vec::new();
    // Base-3 digits: 0 unused, 1 in I, 2 in J.
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let (mut i, mut j) = (Vec::new(), Vec::new());
        for k in 0..n {
            match c % 3 {
                1 => i.push(k),
                2 => j.push(k),
                _ => {}
            }
            c /= 3;
        }
        if !i.is_empty() && !j.is_empty() {
            out.push(OrderedPartitionPair { i, j });
        }
    }
    out.sort_by(|x, y| (x.i.len() + x.j.len(), &x.i, &x.j).cmp(&(y.i.len() + y.j.len(), &y.i, &y.j)));
    Ok(out)
}

/// `3^n − 2^{n+1} + 1`.
pub fn partition_pair_count(n: usize) -> u64 {
    3u64.pow(n as u32) + 1 - 2u64.pow(n as u32 + 1)
}

/// The cell of `p` in `M_{n,d}`, as `p` plus the polar dual of the polytope.
pub fn dual_cell<T: Scalar>(poly: &LogRootPolytope<T>, tol: T) -> Result<VPolytope<T>> {
    let n = poly.n();
    let dual = dual_of(&poly.v_polytope(), &vec![T::zero(); n], tol)?;
    let p: Vec<T> = (0..n).map(|k| poly.pt(k)).collect();
    VPolytope::new(n, dual.vertices.iter().map(|y| y.iter().zip(&p).map(|(&a, &b)| a + b).collect()).collect())
}

/// `H_δ(u) = Σ u_k log(p_k/(p_k + δ_k)) ≥ 0` for the root `δ = e_i − e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootHalfspace<T> {
    pub i: usize,
    pub j: usize,
    pub coefficients: Vec<T>,
}

impl<T: Scalar> RootHalfspace<T> {
    pub fn eval(&self, u: &[T]) -> T {
        dot(&self.coefficients, u)
    }
}

/// The `2·binom(n, 2)` halfspaces `H_δ ≥ 0`, one per root `e_i − e_j`.
pub fn sufficient_halfspaces<T: Scalar>(p: &[u64]) -> Result<Vec<RootHalfspace<T>>> {
    let poly = build::<T>(p)?;
    Ok(poly
        .vertex_labels()
        .into_iter()
        .map(|(i, j)| {
            let mut c = vec![T::zero(); p.len()];
            c[i] = -poly.a[i];
            c[j] = poly.b[j];
            RootHalfspace { i, j, coefficients: c }
        })
        .collect())
}

/// The cell cut out of the scaled simplex by [`sufficient_halfspaces`].
pub fn sufficient_cell<T: Scalar>(p: &[u64], tol: T) -> Result<(HPolytope<T>, VPolytope<T>)> {
    let n = p.len();
    let d = T::lit(p.iter().sum::<u64>() as f64);
    let mut h = HPolytope::simplex(n, d);
    for hs in sufficient_halfspaces::<T>(p)? {
        let row: Vec<T> = hs.coefficients.iter().map(|&c| -c).collect();
        h.push_inequality(&row, T::zero());
    }
    let v = vertices_of(&h, tol)?;
    Ok((h, v))
}

/// Outcome of the affine identity linking `v_{i,j}` to `v_{i,j1}`, `v_{i1,j1}`, `v_{i1,j}`.
#[derive(Clone, Copy, Debug)]
pub struct AffineCheck<T> {
    pub residual: T,
    pub coefficient_sum: T,
}

pub fn affine_identity_check<T: Scalar>(
    poly: &LogRootPolytope<T>,
    i: usize,
    j: usize,
    i1: usize,
    j1: usize,
) -> Result<AffineCheck<T>> {
    let n = poly.n();
    if [i, j, i1, j1].iter().any(|&k| k >= n) || i == j || i == j1 || i1 == j || i1 == j1 {
        return Err(Error::InvalidPartition("indices must name vertices v_ij with i ≠ j".into()));
    }
    let den = poly.denominator(i, j);
    let c1 = poly.denominator(i, j1) / den;
    let c2 = -poly.denominator(i1, j1) / den;
    let c3 = poly.denominator(i1, j) / den;
    let (v, v1, v2, v3) = (poly.vertex(i, j), poly.vertex(i, j1), poly.vertex(i1, j1), poly.vertex(i1, j));
    let combo: Vec<T> = (0..n).map(|k| c1 * v1[k] + c2 * v2[k] + c3 * v3[k]).collect();
    let residual = v.iter().zip(&combo).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()));
    Ok(AffineCheck { residual, coefficient_sum: c1 + c2 + c3 })
}

/// Face vertex sets of the polytope keyed by partition pair, with the measured affine dimension.
pub fn face_report<T: Scalar>(
    poly: &LogRootPolytope<T>,
) -> Result<Vec<(OrderedPartitionPair, usize, FaceCertificate<T>)>> {
    let parts = enumerate_partition_pairs(poly.n())?;
    Ok(parts
        .into_iter()
        .map(|part| {
            let cert = face_vertices(poly, &part);
            let pts: Vec<Vec<T>> = cert.face.iter().map(|&(i, j)| poly.vertex(i, j)).collect();
            let dim = crate::polytope::affine_rank(&pts, T::lit(1e-9).max(T::default_tol()));
            (part, dim, cert)
        })
        .collect())
}

/// Partition pair and dimension of every proper nonempty face of the computed face
/// lattice. Fails if a face's vertex set is not a product `I×J`.
pub fn lattice_faces<T: Scalar>(poly: &LogRootPolytope<T>, tol: T) -> Result<Vec<(OrderedPartitionPair, usize)>> {
    let labels = poly.vertex_labels();
    let lattice = face_lattice_of(&poly.v_polytope(), tol);
    let top = lattice.dim;
    let mut out = Vec::new();
    for face in lattice.faces.iter().filter(|f| f.dim >= 0 && f.dim < top) {
        let pairs: Vec<(usize, usize)> = face.vertices.iter().map(|&k| labels[k]).collect();
        let mut i: Vec<usize> = pairs.iter().map(|l| l.0).collect();
        let mut j: Vec<usize> = pairs.iter().map(|l| l.1).collect();
        i.sort_unstable();
        i.dedup();
        j.sort_unstable();
        j.dedup();
        let part = OrderedPartitionPair::new(i, j, poly.n())?;
        if pairs.len() != part.i.len() * part.j.len() {
            return Err(Error::InvalidPartition(format!("face {pairs:?} is not a product I×J")));
        }
        out.push((part, face.dim as usize));
    }
    Ok(out)
}

/// Dense `(2·binom(n,2)) × n` matrix of the vertices.
pub fn vertex_matrix<T: Scalar>(poly: &LogRootPolytope<T>) -> Matrix<T> {
    Matrix::from_rows(poly.n(), &poly.vertices()).expect("finite vertices")
}
