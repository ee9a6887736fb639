use std::collections::HashSet;

use super::{affine_rank, hull_of, VPolytope};
use crate::scalar::{dot, norm2, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.0.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let t = x.trailing_zeros() as usize;
                out.push(w * 64 + t);
                x &= x - 1;
            }
        }
        out
    }
}

/// A face given by the indices of the vertices it contains. The empty face has
/// dimension −1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: isize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    /// Sorted by dimension, then by vertex list.
    pub faces: Vec<Face>,
    /// `covers[i]` lists the faces of dimension `faces[i].dim − 1` contained in face `i`.
    pub covers: Vec<Vec<usize>>,
    pub dim: isize,
}

impl FaceLattice {
    /// `(1, f_0, …, f_{dim−1}, 1)`.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; (self.dim + 2) as usize];
        for face in &self.faces {
            f[(face.dim + 1) as usize] += 1;
        }
        f
    }

    pub fn faces_of_dim(&self, d: isize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == d)
    }

    pub fn facets(&self) -> Vec<&Face> {
        self.faces_of_dim(self.dim - 1).collect()
    }

    pub fn top(&self) -> &Face {
        self.faces.last().expect("lattice has a top face")
    }
}

/// Face lattice from the vertex–facet incidences, closed under intersection.
pub fn face_lattice_of<T: Scalar>(p: &VPolytope<T>, tol: T) -> FaceLattice {
    let nv = p.vertices.len();
    if nv == 0 {
        return FaceLattice { faces: vec![Face { dim: -1, vertices: vec![] }], covers: vec![vec![]], dim: -1 };
    }
    let top = Bits::full(nv);
    let mut sets: Vec<Bits> = Vec::new();
    let h = hull_of(p, tol).expect("nonempty polytope has a hull");
    for i in 0..h.ineq.rows() {
        let row = h.ineq.row(i);
        let scale = T::one().max(norm2(row)).max(h.rhs[i].abs());
        let slack_tol = tol.sqrt() * T::lit(1e-2) * scale;
        let mut b = Bits::empty(nv);
        for (j, v) in p.vertices.iter().enumerate() {
            if (h.rhs[i] - dot(row, v)).abs() <= slack_tol {
                b.set(j);
            }
        }
        if !sets.contains(&b) {
            sets.push(b);
        }
    }
    let facets = sets.clone();
    let mut seen: HashSet<Bits> = sets.iter().cloned().collect();
    seen.insert(top.clone());
    let mut frontier = sets.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in &facets {
                let x = f.and(g);
                if !seen.contains(&x) {
                    seen.insert(x.clone());
                    next.push(x);
                }
            }
        }
        sets.extend(next.iter().cloned());
        frontier = next;
    }
    sets.push(top);
    let empty = Bits::empty(nv);
    if !sets.contains(&empty) {
        sets.push(empty);
    }

    let mut faces: Vec<(isize, Bits, Vec<usize>)> = sets
        .into_iter()
        .map(|b| {
            let idx = b.indices();
            let d = if idx.is_empty() {
                -1
            } else {
                let pts: Vec<Vec<T>> = idx.iter().map(|&j| p.vertices[j].clone()).collect();
                affine_rank(&pts, tol) as isize
            };
            (d, b, idx)
        })
        .collect();
    faces.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.2.cmp(&b.2)));
    let dim = faces.last().map(|f| f.0).unwrap_or(-1);

    let covers = faces
        .iter()
        .map(|(d, b, _)| {
            faces
                .iter()
                .enumerate()
                .filter(|(_, (d2, b2, _))| *d2 + 1 == *d && b2.subset_of(b))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    FaceLattice { faces: faces.into_iter().map(|(dim, _, vertices)| Face { dim, vertices }).collect(), covers, dim }
}

/// `(1, f_0, …, f_{dim−1}, 1)` at the vertex deduplication tolerance.
pub fn f_vector<T: Scalar>(p: &VPolytope<T>) -> Vec<usize> {
    face_lattice_of(p, T::lit(1e-9).max(T::default_tol())).f_vector()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pts: Vec<Vec<f64>>) -> VPolytope<f64> {
        let n = pts[0].len();
        VPolytope::new(n, pts).unwrap()
    }

    #[test]
    fn triangle() {
        let l = face_lattice_of(&poly(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]), 1e-9);
        assert_eq!(l.f_vector(), vec![1, 3, 3, 1]);
        for (i, f) in l.faces.iter().enumerate() {
            if f.dim == 1 {
                assert_eq!(l.covers[i].len(), 2);
            }
        }
    }

    #[test]
    fn hexagon() {
        let pts = (0..6)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        assert_eq!(f_vector(&poly(pts)), vec![1, 6, 6, 1]);
    }

    #[test]
    fn segment_and_point() {
        assert_eq!(f_vector(&poly(vec![vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 0.0]])), vec![1, 2, 1]);
        assert_eq!(f_vector(&poly(vec![vec![0.5, 0.5]])), vec![1, 1]);
    }

    #[test]
    fn cube_in_higher_space() {
        let mut pts = Vec::new();
        for m in 0..8 {
            let mut v: Vec<f64> = (0..3).map(|i| (m >> i & 1) as f64).collect();
            v.push(1.0 - v[0]);
            pts.push(v);
        }
        let l = face_lattice_of(&poly(pts), 1e-9);
        assert_eq!(l.f_vector(), vec![1, 8, 12, 6, 1]);
        assert_eq!(l.dim, 3);
        assert_eq!(l.facets().len(), 6);
        assert_eq!(l.top().vertices.len(), 8);
    }

    #[test]
    fn euler_relation_on_cross_polytope() {
        let mut pts = Vec::new();
        for i in 0..4 {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; 4];
                e[i] = s;
                pts.push(e);
            }
        }
        let f = f_vector(&poly(pts));
        assert_eq!(f, vec![1, 8, 24, 32, 16, 1]);
        let alt: i64 =
            f[1..f.len() - 1].iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        assert_eq!(alt, 0);
    }
}
