use crate::error::{Error, Result};

/// `M_{n,d}`: all nonnegative integer vectors of length `n` summing to `d`, in
/// colexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGridModel {
    n: usize,
    d: u64,
    points: Vec<Vec<u64>>,
}

impl FiniteGridModel {
    pub fn new(n: usize, d: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("grid needs at least one state".into()));
        }
        let count = binomial(n as u64 + d - 1, d);
        if count > 5_000_000 {
            return Err(Error::InvalidModel(format!("grid with {count} points is too large")));
        }
        Ok(FiniteGridModel { n, d, points: compositions(n, d) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn points(&self) -> &[Vec<u64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &[u64]) -> Option<usize> {
        self.points.binary_search_by(|q| colex_cmp(q, p)).ok()
    }

    /// Points with every coordinate at least `min`.
    pub fn points_at_least(&self, min: u64) -> impl Iterator<Item = &Vec<u64>> {
        self.points.iter().filter(move |p| p.iter().all(|&v| v >= min))
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

fn colex_cmp(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

fn compositions(n: usize, d: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    fn rec(i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let n = cur.len();
        if i == n - 1 {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    rec(0, d, &mut cur, &mut out);
    out.sort_by(|a, b| colex_cmp(a, b));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomials() {
        for n in 1..=7usize {
            for d in 0..=12u64 {
                let g = FiniteGridModel::new(n, d).unwrap();
                assert_eq!(g.len() as u64, binomial(n as u64 + d - 1, d), "n={n} d={d}");
            }
        }
        assert_eq!(FiniteGridModel::new(4, 9).unwrap().len(), 220);
    }

    #[test]
    fn colex_order_and_lookup() {
        let g = FiniteGridModel::new(3, 2).unwrap();
        assert_eq!(
            g.points(),
            &[vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0], vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 2]]
        );
        for (i, p) in g.points().iter().enumerate() {
            assert_eq!(g.index_of(p), Some(i));
        }
        assert_eq!(g.index_of(&[1, 1, 1]), None);
    }

    #[test]
    fn interior_counts() {
        let g = FiniteGridModel::new(4, 9).unwrap();
        assert_eq!(g.points_at_least(1).count(), 56);
        assert_eq!(g.points_at_least(2).count(), 4);
    }
}
