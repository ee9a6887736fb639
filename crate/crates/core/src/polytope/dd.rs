//! Incremental double description on the homogenised cone
//! `{(t, y) : b·t − A·y ≥ 0, t ≥ 0}`. Rays with `t > 0` are the vertices of
//! `{y : A·y ≤ b}`; rays with `t = 0` are recession directions.

use crate::error::{Error, Result};
use crate::scalar::{dot, max_abs, Scalar};

#[derive(Clone)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(words: usize) -> Self {
        ZeroSet(vec![0; words])
    }

    fn first(words: usize, count: usize) -> Self {
        let mut z = Self::new(words);
        for i in 0..count {
            z.set(i);
        }
        z
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn subset_of(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray<T> {
    v: Vec<T>,
    zeros: ZeroSet,
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let m = max_abs(v);
    if m > T::zero() {
        for x in v.iter_mut() {
            *x /= m;
        }
    }
}

/// Vertices of `{y ∈ R^dim : a_i·y ≤ b_i}`. Rows of `a` should be normalised.
pub(crate) fn vertices<T: Scalar>(dim: usize, a: &[Vec<T>], b: &[T], eps: T) -> Result<Vec<Vec<T>>> {
    let d = dim + 1;
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(a.len() + 1);
    let mut scale: Vec<T> = Vec::with_capacity(a.len() + 1);
    let mut t_row = vec![T::zero(); d];
    t_row[0] = T::one();
    rows.push(t_row);
    scale.push(T::one());
    for (ai, &bi) in a.iter().zip(b) {
        let mut h = Vec::with_capacity(d);
        h.push(bi);
        h.extend(ai.iter().map(|&x| -x));
        rows.push(h);
        scale.push(T::one().max(bi.abs()));
    }
    let words = rows.len().div_ceil(64);

    let mut lineality: Vec<Vec<T>> = (0..d)
        .map(|i| {
            let mut e = vec![T::zero(); d];
            e[i] = T::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray<T>> = Vec::new();

    for (ci, h) in rows.iter().enumerate() {
        let tol = eps * scale[ci];
        let pivot =
            lineality.iter().enumerate().map(|(i, l)| (i, dot(h, l))).fold(None, |best: Option<(usize, T)>, (i, v)| {
                match best {
                    Some((_, bv)) if bv.abs() >= v.abs() => best,
                    _ => Some((i, v)),
                }
            });
        if let Some((li, hl)) = pivot {
            if hl.abs() > tol {
                let l = lineality.swap_remove(li);
                for other in lineality.iter_mut() {
                    let c = dot(h, other) / hl;
                    for (o, &x) in other.iter_mut().zip(&l) {
                        *o -= c * x;
                    }
                    normalize(other);
                }
                for r in rays.iter_mut() {
                    let c = dot(h, &r.v) / hl;
                    for (o, &x) in r.v.iter_mut().zip(&l) {
                        *o -= c * x;
                    }
                    normalize(&mut r.v);
                    r.zeros.set(ci);
                }
                let mut v: Vec<T> = if hl > T::zero() { l } else { l.into_iter().map(|x| -x).collect() };
                normalize(&mut v);
                rays.push(Ray { v, zeros: ZeroSet::first(words, ci) });
                continue;
            }
        }

        let vals: Vec<T> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > tol).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < -tol).collect();
        for (i, r) in rays.iter_mut().enumerate() {
            if vals[i].abs() <= tol {
                r.zeros.set(ci);
            }
        }
        if neg.is_empty() {
            continue;
        }

        let pointed_dim = d - lineality.len();
        let needed = pointed_dim.saturating_sub(2);
        let mut fresh: Vec<Ray<T>> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() < needed {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(k, r)| k != p && k != q && common.subset_of(&r.zeros));
                if blocked {
                    continue;
                }
                let (vp, vq) = (vals[p], vals[q]);
                let mut v: Vec<T> = rays[q].v.iter().zip(&rays[p].v).map(|(&x, &y)| vp * x - vq * y).collect();
                normalize(&mut v);
                let mut zeros = common;
                zeros.set(ci);
                fresh.push(Ray { v, zeros });
            }
        }
        let neg_set: std::collections::HashSet<usize> = neg.into_iter().collect();
        let mut kept: Vec<Ray<T>> =
            rays.into_iter().enumerate().filter(|(i, _)| !neg_set.contains(i)).map(|(_, r)| r).collect();
        kept.extend(fresh);
        rays = kept;
    }

    let mut out: Vec<Vec<T>> = Vec::new();
    let mut recession = !lineality.is_empty();
    for r in &rays {
        if r.v[0] > eps {
            let y: Vec<T> = r.v[1..].iter().map(|&x| x / r.v[0]).collect();
            out.push(y);
        } else {
            recession = true;
        }
    }
    if out.is_empty() {
        return Err(Error::Empty);
    }
    if recession {
        return Err(Error::Unbounded);
    }
    Ok(dedup_points(out, eps))
}

pub(crate) fn dedup_points<T: Scalar>(points: Vec<Vec<T>>, tol: T) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(points.len());
    for p in points {
        let dup = out.iter().any(|q| q.iter().zip(&p).all(|(&a, &b)| (a - b).abs() <= tol * T::one().max(a.abs())));
        if !dup {
            out.push(p);
        }
    }
    out
}
