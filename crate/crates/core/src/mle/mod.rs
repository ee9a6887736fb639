//! Maximum likelihood estimation on each model class.

mod critical;
mod linear;
mod toric;

pub use critical::{
    build_critical_system, find_critical_points, find_critical_points_from, mle_implicit, CriticalOptions,
    CriticalPoint, CriticalPointSet, CriticalSystem, ImplicitMle,
};
pub use linear::mle_linear;
pub use toric::{mle_toric, moment_map};

use crate::error::{Error, Result};
use crate::model::FiniteGridModel;

/// Strictly positive data vector with its total.
#[derive(Clone, Debug, PartialEq)]
pub struct DataPoint {
    u: Vec<f64>,
    scale: f64,
}

impl DataPoint {
    /// Takes the scale from the coordinate sum.
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::InvalidData("empty data point".into()));
        }
        if let Some(index) = u.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::NonpositiveCoordinate { index });
        }
        let scale = u.iter().sum();
        Ok(DataPoint { u, scale })
    }

    /// Allows zero coordinates as long as the total is positive.
    pub fn nonnegative(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::InvalidData("empty data point".into()));
        }
        if let Some(index) = u.iter().position(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::NonpositiveCoordinate { index });
        }
        let scale: f64 = u.iter().sum();
        if !(scale > 0.0) {
            return Err(Error::InvalidData("data point sums to zero".into()));
        }
        Ok(DataPoint { u, scale })
    }

    /// Requires the coordinates to sum to `scale` within `1e-10·scale`.
    pub fn with_scale(u: Vec<f64>, scale: f64) -> Result<Self> {
        let d = Self::new(u)?;
        if (d.scale - scale).abs() > 1e-10 * scale.abs().max(1.0) {
            return Err(Error::InvalidData(format!("coordinates sum to {} instead of {scale}", d.scale)));
        }
        Ok(DataPoint { scale, ..d })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `u / scale`.
    pub fn normalized(&self) -> Vec<f64> {
        self.u.iter().map(|v| v / self.scale).collect()
    }
}

/// `Σ u_i log p_i`.
pub fn log_likelihood(u: &DataPoint, p: &[f64]) -> Result<f64> {
    if p.len() != u.len() {
        return Err(Error::Dimension("data and point lengths differ".into()));
    }
    if let Some(index) = p.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonpositiveCoordinate { index });
    }
    Ok(u.u.iter().zip(p).map(|(a, b)| a * b.ln()).sum())
}

/// Grid point maximising the likelihood; grid points with a zero coordinate never win.
pub fn mle_finite(model: &FiniteGridModel, u: &DataPoint) -> Result<Vec<u64>> {
    if u.len() != model.n() {
        return Err(Error::Dimension("data length differs from the number of states".into()));
    }
    let scores: Vec<(usize, f64)> = model
        .points()
        .iter()
        .enumerate()
        .filter(|(_, q)| q.iter().all(|&v| v > 0))
        .map(|(i, q)| (i, q.iter().zip(&u.u).map(|(&qi, ui)| ui * (qi as f64).ln()).sum()))
        .collect();
    let best = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return Err(Error::InvalidData("no grid point has all coordinates positive".into()));
    }
    let tie_tol = 1e-12 * best.abs().max(1.0);
    let winners: Vec<Vec<u64>> =
        scores.iter().filter(|s| best - s.1 <= tie_tol).map(|s| model.points()[s.0].clone()).collect();
    if winners.len() > 1 {
        return Err(Error::Tie(winners));
    }
    Ok(winners.into_iter().next().expect("one winner"))
}

/// One point per nonblank line, comma separated; `#` starts a comment line.
pub fn parse_data_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        if let Some(first) = out.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "line {}: {} coordinates, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barycenter_likelihood() {
        let u = DataPoint::new(vec![0.5, 0.5]).unwrap();
        assert!((log_likelihood(&u, &[0.5, 0.5]).unwrap() + 2f64.ln()).abs() < 1e-15);
        assert!(matches!(log_likelihood(&u, &[1.0, 0.0]), Err(Error::NonpositiveCoordinate { index: 1 })));
    }

    #[test]
    fn data_point_validation() {
        assert!(matches!(DataPoint::new(vec![0.5, 0.0]), Err(Error::NonpositiveCoordinate { index: 1 })));
        assert!(DataPoint::with_scale(vec![1.0, 2.0], 3.0).is_ok());
        assert!(DataPoint::with_scale(vec![1.0, 2.0], 1.0).is_err());
        assert_eq!(DataPoint::new(vec![1.0, 3.0]).unwrap().normalized(), vec![0.25, 0.75]);
    }

    #[test]
    fn finite_mle_examples() {
        let g = FiniteGridModel::new(2, 3).unwrap();
        let u = DataPoint::new(vec![1.9, 1.1]).unwrap();
        assert_eq!(mle_finite(&g, &u).unwrap(), vec![2, 1]);
        // 1.5·log 2 + 1.5·log 1 = 1.5·log 1 + 1.5·log 2
        let tie = DataPoint::new(vec![1.5, 1.5]).unwrap();
        match mle_finite(&g, &tie) {
            Err(Error::Tie(w)) => assert_eq!(w.len(), 2),
            other => panic!("expected a tie, got {other:?}"),
        }
        let g36 = FiniteGridModel::new(3, 6).unwrap();
        for q in g36.points_at_least(1) {
            let u = DataPoint::new(q.iter().map(|&v| v as f64).collect()).unwrap();
            assert_eq!(&mle_finite(&g36, &u).unwrap(), q);
        }
    }

    #[test]
    fn data_file_parsing() {
        let pts = parse_data_points("# header\n0.1, 0.9\n\n0.5,0.5\n").unwrap();
        assert_eq!(pts, vec![vec![0.1, 0.9], vec![0.5, 0.5]]);
        assert!(parse_data_points("0.1,0.9\n0.2\n").is_err());
        assert!(parse_data_points("a,b\n").is_err());
    }
}
