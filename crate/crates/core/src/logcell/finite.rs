use crate::error::{Error, Result};
use crate::model::FiniteGridModel;
use crate::polytope::{vertices_of, HPolytope, VPolytope};

/// Cell of `p` in the finite model: `Σ u_i log(q_i/p_i) ≤ 0` for every grid point
/// `q ≠ p` with positive coordinates, inside the scaled simplex `Σu = d`.
pub fn finite_voronoi_cell(model: &FiniteGridModel, p: &[u64], tol: f64) -> Result<(HPolytope<f64>, VPolytope<f64>)> {
    let competitors: Vec<&Vec<u64>> = model.points_at_least(1).filter(|q| q.as_slice() != p).collect();
    finite_voronoi_cell_from(model, p, competitors, tol)
}

/// As [`finite_voronoi_cell`] with an explicit list of competitors.
pub fn finite_voronoi_cell_from<'a, I>(
    model: &FiniteGridModel,
    p: &[u64],
    competitors: I,
    tol: f64,
) -> Result<(HPolytope<f64>, VPolytope<f64>)>
where
    I: IntoIterator<Item = &'a Vec<u64>>,
{
    let n = model.n();
    if p.len() != n || p.iter().sum::<u64>() != model.d() {
        return Err(Error::Dimension(format!("{p:?} is not a point of the grid")));
    }
    if let Some(index) = p.iter().position(|&v| v < 1) {
        return Err(Error::CoordinateTooSmall { index, value: p[index] });
    }
    let mut h = HPolytope::simplex(n, model.d() as f64);
    for q in competitors {
        if q.as_slice() == p || q.iter().any(|&v| v == 0) {
            continue;
        }
        let row: Vec<f64> = q.iter().zip(p).map(|(&a, &b)| (a as f64 / b as f64).ln()).collect();
        h.push_inequality(&row, 0.0);
    }
    let v = vertices_of(&h, tol)?;
    let pruned = h.prune(&v, tol.max(1e-10));
    Ok((pruned, v))
}
