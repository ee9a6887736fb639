use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{log_likelihood, DataPoint};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, newton_solve, rank, row_space_basis, solve, Matrix, NewtonConfig, SquareSystem};
use crate::model::{random_simplex_point, ImplicitModel};
use crate::scalar::{max_abs, norm2};

const MAX_DRAWS: usize = 10;

/// The randomised square Lagrange system in the unknowns `(x, λ)`:
/// `[λᵀ·A·df(x) − u/x, f(x)] · [I; B] = 0`.
#[derive(Clone, Debug)]
pub struct CriticalSystem {
    model: ImplicitModel,
    u: Vec<f64>,
    a_rand: Matrix<f64>,
    b_rand: Matrix<f64>,
    seed: u64,
}

/// Draws `A` (c×m) and `B` ((m−c)×(n+c)) with standard normal entries, redrawing
/// from a fresh stream when `A·df` loses rank at the model's sample point.
pub fn build_critical_system(model: &ImplicitModel, u: &DataPoint, seed: u64) -> Result<CriticalSystem> {
    if u.len() != model.n() {
        return Err(Error::Dimension("data length differs from the model".into()));
    }
    let (n, m, c) = (model.n(), model.m(), model.codim());
    let jac = model.jacobian(model.sample_point());
    for draw in 0..MAX_DRAWS {
        let stream = seed.wrapping_add((draw as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        let mut normal = |r: usize, k: usize| {
            let data: Vec<f64> = (0..r * k).map(|_| rng.sample(StandardNormal)).collect();
            Matrix::new(r, k, data).expect("normal draws are finite")
        };
        let a_rand = normal(c, m);
        let b_rand = normal(m - c, n + c);
        if rank(&a_rand.matmul(&jac), 1e-9) == c {
            return Ok(CriticalSystem { model: model.clone(), u: u.normalized(), a_rand, b_rand, seed: stream });
        }
    }
    Err(Error::RankDeficient(MAX_DRAWS))
}

impl CriticalSystem {
    pub fn model(&self) -> &ImplicitModel {
        &self.model
    }

    /// Data normalised to sum 1.
    pub fn data(&self) -> &[f64] {
        &self.u
    }

    pub fn a_rand(&self) -> &Matrix<f64> {
        &self.a_rand
    }

    pub fn b_rand(&self) -> &Matrix<f64> {
        &self.b_rand
    }

    /// Seed of the stream that produced the accepted random matrices.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn codim(&self) -> usize {
        self.model.codim()
    }

    /// Multipliers fitting `λᵀ·A·df(x) ≈ u/x` in the least-squares sense.
    pub fn fit_multipliers(&self, x: &[f64]) -> Vec<f64> {
        let aj = self.a_rand.matmul(&self.model.jacobian(x));
        let rhs: Vec<f64> = self.u.iter().zip(x).map(|(u, v)| u / v).collect();
        least_squares(&aj.transpose(), &rhs, 1e-13)
    }

    /// Whether `u/x` lies in the row space of `df(x)` (relative residual).
    pub fn normal_residual(&self, x: &[f64]) -> f64 {
        let g: Vec<f64> = self.u.iter().zip(x).map(|(u, v)| u / v).collect();
        let basis = row_space_basis(&self.model.jacobian(x), 1e-9);
        let coef = basis.mul_vec(&g);
        let proj = basis.vec_mul(&coef);
        let r: Vec<f64> = g.iter().zip(&proj).map(|(a, b)| a - b).collect();
        norm2(&r) / norm2(&g).max(1e-300)
    }
}

impl SquareSystem<f64> for CriticalSystem {
    fn dim(&self) -> usize {
        self.n() + self.codim()
    }

    fn residual(&self, z: &[f64]) -> Vec<f64> {
        let (n, c) = (self.n(), self.codim());
        let (x, lambda) = z.split_at(n);
        let f = self.model.evaluate(x);
        let aj = self.a_rand.matmul(&self.model.jacobian(x));
        let mut out = Vec::with_capacity(n + c);
        for k in 0..n {
            let s: f64 = (0..c).map(|r| lambda[r] * aj[(r, k)]).sum();
            out.push(s - self.u[k] / x[k]);
        }
        out.extend_from_slice(&f[..c]);
        for l in 0..self.b_rand.rows() {
            let fl = f[c + l];
            for (k, o) in out.iter_mut().enumerate() {
                *o += fl * self.b_rand[(l, k)];
            }
        }
        out
    }

    fn jacobian(&self, z: &[f64]) -> Matrix<f64> {
        let (n, c) = (self.n(), self.codim());
        let m = self.model.m();
        let (x, lambda) = z.split_at(n);
        let jac = self.model.jacobian(x);
        let hess = self.model.hessians(x);
        let aj = self.a_rand.matmul(&jac);
        // Σ_r λ_r A[r][j] weights each polynomial's Hessian.
        let w: Vec<f64> = (0..m).map(|j| (0..c).map(|r| lambda[r] * self.a_rand[(r, j)]).sum()).collect();
        let dim = n + c;
        let mut out = Matrix::zeros(dim, dim);
        for k in 0..n {
            for i in 0..n {
                out[(k, i)] = (0..m).map(|j| w[j] * hess[j][(k, i)]).sum();
            }
            out[(k, k)] += self.u[k] / (x[k] * x[k]);
            for r in 0..c {
                out[(k, n + r)] = aj[(r, k)];
            }
        }
        for r in 0..c {
            for i in 0..n {
                out[(n + r, i)] = jac[(r, i)];
            }
        }
        for l in 0..self.b_rand.rows() {
            for k in 0..dim {
                let b = self.b_rand[(l, k)];
                if b != 0.0 {
                    for i in 0..n {
                        out[(k, i)] += b * jac[(c + l, i)];
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CriticalOptions {
    pub starts: usize,
    pub seed: u64,
    /// Residual certification threshold.
    pub tol: f64,
    /// Newton polishing target.
    pub polish_tol: f64,
    /// Relative max-norm radius on `(x, λ)` below which two solutions coincide.
    pub dedup_radius: f64,
    /// Stop once this many distinct real solutions are known.
    pub ml_degree: Option<usize>,
    pub batch: usize,
    pub max_iter: usize,
    /// Start the multipliers at the least-squares fit for the start `x` instead of N(0,1).
    pub fit_start_multipliers: bool,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            starts: 500,
            seed: 2019,
            tol: 1e-10,
            polish_tol: 1e-12,
            dedup_radius: 1e-6,
            ml_degree: None,
            batch: 256,
            max_iter: 100,
            fit_start_multipliers: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Max-norm residual of the square system.
    pub residual: f64,
    /// `ℓ_u(x)` for the normalised data; `None` unless `x` is positive.
    pub log_likelihood: Option<f64>,
    pub positive: bool,
    /// Index of the start that first reached this solution.
    pub start: usize,
}

#[derive(Clone, Debug, Default)]
pub struct CriticalPointSet {
    /// Distinct real solutions in the order they were first found.
    pub points: Vec<CriticalPoint>,
    pub starts_used: usize,
}

impl CriticalPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positive(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(|p| p.positive)
    }

    /// The positive solution with the largest likelihood.
    pub fn best(&self) -> Option<&CriticalPoint> {
        self.positive()
            .max_by(|a, b| a.log_likelihood.partial_cmp(&b.log_likelihood).unwrap_or(std::cmp::Ordering::Equal))
    }

    fn same(a: &[f64], b: &[f64], radius: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= radius * x.abs().max(1.0))
    }

    /// Index of a stored solution within `radius` of `(x, λ)`.
    pub fn find(&self, x: &[f64], lambda: &[f64], radius: f64) -> Option<usize> {
        self.points.iter().position(|p| Self::same(&p.x, x, radius) && Self::same(&p.lambda, lambda, radius))
    }

    /// Index of a stored solution whose `x` is within `radius` of `x`.
    pub fn find_x(&self, x: &[f64], radius: f64) -> Option<usize> {
        self.points.iter().position(|p| Self::same(&p.x, x, radius))
    }

    fn insert(&mut self, cp: CriticalPoint, radius: f64) {
        match self.find(&cp.x, &cp.lambda, radius) {
            Some(i) => {
                if cp.residual < self.points[i].residual {
                    let start = self.points[i].start;
                    self.points[i] = CriticalPoint { start, ..cp };
                }
            }
            None => self.points.push(cp),
        }
    }
}

fn polish(sys: &CriticalSystem, z0: &[f64], opts: &CriticalOptions) -> Option<(Vec<f64>, f64)> {
    let cfg = NewtonConfig { tol: opts.tol, max_iter: opts.max_iter, damping: 1.0 };
    let out = newton_solve(sys, z0, &cfg).ok()?;
    let mut z = out.x;
    let mut res = out.residual;
    for _ in 0..4 {
        if res <= opts.polish_tol {
            break;
        }
        let r = sys.residual(&z);
        let Ok(step) = solve(&sys.jacobian(&z), &r.iter().map(|v| -v).collect::<Vec<_>>()) else {
            break;
        };
        let trial: Vec<f64> = z.iter().zip(&step).map(|(a, b)| a + b).collect();
        let rt = max_abs(&sys.residual(&trial));
        if !(rt < res) {
            break;
        }
        z = trial;
        res = rt;
    }
    Some((z, res))
}

/// Certifies a Newton solution as a genuine real critical point of the
/// unrandomised problem.
fn certify(sys: &CriticalSystem, z: Vec<f64>, residual: f64, start: usize) -> Option<CriticalPoint> {
    let n = sys.n();
    if z.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let (x, lambda) = z.split_at(n);
    let scale = max_abs(x).max(1e-300);
    if x.iter().any(|v| v.abs() <= 1e-10 * scale) {
        return None;
    }
    let fres = sys.model.residual(x);
    if fres > 1e-8 * scale.max(1.0).powi(3) {
        return None;
    }
    if sys.model.rank_at(x) != sys.codim() || sys.normal_residual(x) > 1e-8 {
        return None;
    }
    let positive = x.iter().all(|&v| v > 0.0);
    let ll = if positive {
        let d = DataPoint::nonnegative(sys.u.clone()).ok()?;
        log_likelihood(&d, x).ok()
    } else {
        None
    };
    Some(CriticalPoint { x: x.to_vec(), lambda: lambda.to_vec(), residual, log_likelihood: ll, positive, start })
}

/// Start `i` for the given seed: `x` uniform on the simplex for even `i` and a
/// signed Gaussian point of the hyperplane `Σx = 1` for odd `i`; `λ` standard normal
/// (or fitted by least squares).
pub(crate) fn start_point(sys: &CriticalSystem, seed: u64, i: usize, fit: bool) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
    let x = if i % 2 == 0 { random_simplex_point(&mut rng, sys.n()) } else { signed_point(&mut rng, sys.n()) };
    let lambda: Vec<f64> =
        if fit { sys.fit_multipliers(&x) } else { (0..sys.codim()).map(|_| rng.sample(StandardNormal)).collect() };
    let mut z = x;
    z.extend(lambda);
    z
}

fn signed_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let t: f64 = g.iter().sum();
        if t.abs() > 0.2 {
            return g.iter().map(|v| v / t).collect();
        }
    }
}

/// Runs Newton from `starts` seeded starts and returns the deduplicated certified
/// real solutions. Finding all of them is not guaranteed.
pub fn find_critical_points(sys: &CriticalSystem, opts: &CriticalOptions) -> CriticalPointSet {
    find_critical_points_from(sys, opts, &[])
}

/// As [`find_critical_points`], trying the `extra` starting points `(x, λ)` first.
pub fn find_critical_points_from(sys: &CriticalSystem, opts: &CriticalOptions, extra: &[Vec<f64>]) -> CriticalPointSet {
    let mut set = CriticalPointSet::default();
    for (k, z0) in extra.iter().enumerate() {
        if let Some((z, r)) = polish(sys, z0, opts) {
            if let Some(cp) = certify(sys, z, r, usize::MAX - k) {
                set.insert(cp, opts.dedup_radius);
            }
        }
    }
    let batch = opts.batch.max(1);
    let mut begin = 0;
    while begin < opts.starts {
        let end = (begin + batch).min(opts.starts);
        let found: Vec<Option<CriticalPoint>> = (begin..end)
            .into_par_iter()
            .map(|i| {
                let z0 = start_point(sys, opts.seed, i, opts.fit_start_multipliers);
                let (z, r) = polish(sys, &z0, opts)?;
                certify(sys, z, r, i)
            })
            .collect();
        for cp in found.into_iter().flatten() {
            set.insert(cp, opts.dedup_radius);
        }
        set.starts_used = end;
        begin = end;
        if let Some(deg) = opts.ml_degree {
            if set.len() >= deg {
                break;
            }
        }
    }
    set
}

#[derive(Clone, Debug)]
pub struct ImplicitMle {
    pub point: Vec<f64>,
    pub log_likelihood: f64,
    /// Positive certified critical points compared.
    pub candidates: usize,
    /// All distinct real critical points found.
    pub real_solutions: usize,
    pub starts_used: usize,
    /// Always true: multi-start Newton cannot certify that every critical point was found.
    pub best_effort: bool,
}

/// Best positive critical point of the likelihood on an implicit model.
pub fn mle_implicit(model: &ImplicitModel, u: &DataPoint, opts: &CriticalOptions) -> Result<ImplicitMle> {
    let sys = build_critical_system(model, u, opts.seed)?;
    let set = find_critical_points(&sys, opts);
    let best = set.best().ok_or(Error::NoCriticalPointFound)?;
    Ok(ImplicitMle {
        point: best.x.clone(),
        log_likelihood: best.log_likelihood.expect("positive points carry a likelihood") * u.scale(),
        candidates: set.positive().count(),
        real_solutions: set.len(),
        starts_used: set.starts_used,
        best_effort: true,
    })
}
