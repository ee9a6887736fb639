use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{finite_voronoi_cell, log_normal_space, LogNormalSpace};
use crate::error::{Error, Result};
use crate::linalg::{newton_solve, FnSystem, Matrix, NewtonConfig};
use crate::mle::{build_critical_system, find_critical_points_from, CriticalOptions, DataPoint};
use crate::model::{Model, ParametricModel};
use crate::polytope::{contains, vertices_of, AffineFrame, HPolytope, VPolytope};
use crate::scalar::norm2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    In,
    Out,
    Boundary,
    Undetermined,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::In => "in",
            Label::Out => "out",
            Label::Boundary => "boundary",
            Label::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in" => Ok(Label::In),
            "out" => Ok(Label::Out),
            "boundary" => Ok(Label::Boundary),
            "undetermined" => Ok(Label::Undetermined),
            other => Err(Error::Parse(format!("unknown label {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub critical: CriticalOptions,
    /// Likelihood gaps (or face distances for finite models) within this band give `boundary`.
    pub boundary_band: f64,
    /// Largest relative distance from the log-normal space still treated as inside it.
    pub space_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            critical: CriticalOptions { starts: 200, ..Default::default() },
            boundary_band: 1e-10,
            space_tol: 1e-9,
        }
    }
}

impl ClassifyOptions {
    /// One-line description of the solver configuration.
    pub fn describe(&self) -> String {
        format!(
            "starts={} seed={} tol={:e} band={:e}",
            self.critical.starts, self.critical.seed, self.critical.tol, self.boundary_band
        )
    }
}

fn check_data(u: &[f64], n: usize) -> Result<DataPoint> {
    if u.len() != n {
        return Err(Error::Dimension(format!("data has {} coordinates, model has {n}", u.len())));
    }
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let clean: Vec<f64> = u.iter().map(|&v| if v.abs() <= 1e-12 * scale { 0.0 } else { v }).collect();
    DataPoint::nonnegative(clean)
}

fn grid_point(p: &[f64]) -> Result<Vec<u64>> {
    p.iter()
        .map(|&v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as u64)
            } else {
                Err(Error::InvalidData(format!("{v} is not a grid coordinate")))
            }
        })
        .collect()
}

fn label_by_slack(h: &HPolytope<f64>, u: &[f64], band: f64) -> Label {
    let s = h.min_slack(u);
    if s > band {
        Label::In
    } else if s < -band {
        Label::Out
    } else {
        Label::Boundary
    }
}

/// Whether `Φ(u) = p`. `u` is rescaled to the total of `p`.
pub fn classify(model: &Model, p: &[f64], u: &[f64], opts: &ClassifyOptions) -> Result<Label> {
    let data = check_data(u, model.n())?;
    if let Model::Finite(g) = model {
        let q = grid_point(p)?;
        let (h, _) = finite_voronoi_cell(g, &q, 1e-10)?;
        let scaled: Vec<f64> = data.normalized().iter().map(|v| v * g.d() as f64).collect();
        return Ok(label_by_slack(&h, &scaled, opts.boundary_band));
    }
    let space = log_normal_space(model, p, 1e-12)?;
    classify_in_space(model, &space, &data, opts)
}

fn classify_in_space(model: &Model, space: &LogNormalSpace, data: &DataPoint, opts: &ClassifyOptions) -> Result<Label> {
    let p = space.point();
    if space.residual(data.u()) > opts.space_tol {
        return Ok(Label::Out);
    }
    let ref_ll = |x: &[f64]| -> f64 {
        let s: f64 = x.iter().sum();
        data.normalized().iter().zip(x).map(|(a, b)| a * (b / s).ln()).sum()
    };
    let lp = ref_ll(p);
    let competitors: Vec<Vec<f64>> = match model {
        Model::Toric(_) | Model::Linear(_) | Model::Finite(_) => return Ok(Label::In),
        Model::Implicit(m) => {
            let sys = build_critical_system(m, data, opts.critical.seed)?;
            // p is critical for every u in its log-normal space, so it seeds the search.
            let mut zp = p.to_vec();
            zp.extend(sys.fit_multipliers(p));
            let set = find_critical_points_from(&sys, &opts.critical, &[zp]);
            set.positive().map(|c| c.x.clone()).collect()
        }
        Model::Parametric(pm) => parametric_critical_points(pm, data, &opts.critical),
    };
    if competitors.is_empty() {
        return Ok(Label::Undetermined);
    }
    let radius = opts.critical.dedup_radius;
    let mut label = Label::In;
    for q in competitors {
        if q.iter().zip(p).all(|(a, b)| (a - b).abs() <= radius * b.abs().max(1.0)) {
            continue;
        }
        let gap = ref_ll(&q) - lp;
        if gap > opts.boundary_band {
            return Ok(Label::Out);
        }
        if gap >= -opts.boundary_band {
            label = Label::Boundary;
        }
    }
    // With a zero count the likelihood can peak on the boundary of the simplex,
    // where there is no critical point to compare against.
    if data.u().iter().any(|&v| v == 0.0) {
        return Ok(Label::Undetermined);
    }
    Ok(label)
}

/// Positive model points `f(θ)` with `∇_θ ℓ_u(f(θ)) = 0`, by Newton from seeded
/// parameters in the domain box.
pub fn parametric_critical_points(pm: &ParametricModel, data: &DataPoint, opts: &CriticalOptions) -> Vec<Vec<f64>> {
    let u = data.normalized();
    let k = pm.params();
    let grad = |t: &[f64]| -> Vec<f64> {
        let f = pm.eval(t);
        let j = pm.jacobian(t);
        let w: Vec<f64> = u.iter().zip(&f).map(|(a, b)| a / b).collect();
        j.transpose().mul_vec(&w)
    };
    let hess = |t: &[f64]| -> Matrix<f64> {
        let f = pm.eval(t);
        let j = pm.jacobian(t);
        let hs = pm.hessians(t);
        let mut h = Matrix::zeros(k, k);
        for (i, hi) in hs.iter().enumerate() {
            let w = u[i] / f[i];
            let w2 = u[i] / (f[i] * f[i]);
            for a in 0..k {
                for b in 0..k {
                    h[(a, b)] += w * hi[(a, b)] - w2 * j[(i, a)] * j[(i, b)];
                }
            }
        }
        h
    };
    let sys = FnSystem { dim: k, f: grad, j: hess };
    let cfg = NewtonConfig { tol: opts.tol, max_iter: opts.max_iter, damping: 1.0 };
    let mut found: Vec<Vec<f64>> = Vec::new();
    for i in 0..opts.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
        let t0 = pm.random_parameter(&mut rng);
        let Ok(out) = newton_solve(&sys, &t0, &cfg) else { continue };
        let x = pm.eval(&out.x);
        if x.iter().any(|&v| !(v > 0.0)) {
            continue;
        }
        let radius = opts.dedup_radius;
        if !found.iter().any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= radius * a.abs().max(1.0))) {
            found.push(x);
        }
    }
    found
}

#[derive(Clone, Debug)]
pub struct SampleOptions {
    pub classify: ClassifyOptions,
    /// Keep only points within this Euclidean distance of `p`.
    pub radius: Option<f64>,
    /// Draws used to estimate the acceptance rate before sampling.
    pub pilot: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { classify: ClassifyOptions::default(), radius: None, pilot: 10_000 }
    }
}

/// Labelled points of the log-normal polytope of `point`.
#[derive(Clone, Debug)]
pub struct CellSample {
    pub point: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub seed: u64,
    /// Fraction of pilot draws accepted.
    pub acceptance: f64,
    pub solver: String,
}

impl CellSample {
    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Header `u1,…,un,label`, then one row per point.
    pub fn to_csv(&self) -> String {
        let n = self.point.len();
        let mut out = String::new();
        for i in 1..=n {
            out.push_str(&format!("u{i},"));
        }
        out.push_str("label\n");
        for (x, l) in self.points.iter().zip(&self.labels) {
            for v in x {
                out.push_str(&format!("{v},"));
            }
            out.push_str(l.as_str());
            out.push('\n');
        }
        out
    }

    /// Inverse of [`CellSample::to_csv`]; metadata other than the points is left empty.
    pub fn parse_csv(text: &str) -> Result<(Vec<Vec<f64>>, Vec<Label>)> {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).skip(1) {
            let mut fields: Vec<&str> = line.split(',').collect();
            let label: Label = fields.pop().unwrap_or_default().trim().parse()?;
            let x: std::result::Result<Vec<f64>, _> = fields.iter().map(|s| s.trim().parse::<f64>()).collect();
            points.push(x.map_err(|e| Error::Parse(e.to_string()))?);
            labels.push(label);
        }
        Ok((points, labels))
    }
}

/// Rejection sampler on a polytope: uniform in the bounding box of its affine-hull
/// coordinates, optionally cut to a ball around `center`.
struct BoxSampler {
    frame: AffineFrame<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    h: HPolytope<f64>,
    center: Vec<f64>,
    radius: Option<f64>,
}

impl BoxSampler {
    fn new(h: HPolytope<f64>, v: &VPolytope<f64>, center: &[f64], radius: Option<f64>) -> Result<Self> {
        let frame = v.frame(1e-10);
        let k = frame.dim();
        if k == 0 {
            return Err(Error::Dimension("the polytope is a single point".into()));
        }
        let local: Vec<Vec<f64>> = v.vertices.iter().map(|x| frame.to_local(x)).collect();
        let mut lo: Vec<f64> = (0..k).map(|i| local.iter().map(|y| y[i]).fold(f64::INFINITY, f64::min)).collect();
        let mut hi: Vec<f64> = (0..k).map(|i| local.iter().map(|y| y[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        if let Some(r) = radius {
            let c = frame.to_local(center);
            for i in 0..k {
                lo[i] = lo[i].max(c[i] - r);
                hi[i] = hi[i].min(c[i] + r);
            }
        }
        Ok(BoxSampler { frame, lo, hi, h, center: center.to_vec(), radius })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        let y: Vec<f64> =
            self.lo.iter().zip(&self.hi).map(|(&a, &b)| if b > a { rng.random_range(a..b) } else { a }).collect();
        let x = self.frame.to_ambient(&y);
        if !contains(&self.h, &x, 1e-12) {
            return None;
        }
        if let Some(r) = self.radius {
            let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
            if norm2(&d) > r {
                return None;
            }
        }
        Some(x)
    }

    fn pilot(&self, seed: u64, draws: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let hits = (0..draws).filter(|_| self.draw(&mut rng).is_some()).count();
        hits as f64 / draws.max(1) as f64
    }

    /// Point `i` comes from its own stream of the seeded generator.
    fn point(&self, seed: u64, i: usize) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        for _ in 0..1_000_000 {
            if let Some(x) = self.draw(&mut rng) {
                return Ok(x);
            }
        }
        Err(Error::RejectionStalled(0.0))
    }

    fn points(&self, seed: u64, count: usize, pilot: usize) -> Result<(Vec<Vec<f64>>, f64)> {
        let rate = self.pilot(seed, pilot);
        if rate < 1e-4 {
            return Err(Error::RejectionStalled(rate));
        }
        let pts: Result<Vec<Vec<f64>>> = (0..count).into_par_iter().map(|i| self.point(seed, i)).collect();
        Ok((pts?, rate))
    }
}

/// Uniform rejection samples of the log-normal polytope of `p` (the cell itself for a
/// finite model), each classified.
pub fn sample_cell(model: &Model, p: &[f64], count: usize, seed: u64, opts: &SampleOptions) -> Result<CellSample> {
    let solver = opts.classify.describe();
    if let Model::Finite(g) = model {
        let q = grid_point(p)?;
        let (h, v) = finite_voronoi_cell(g, &q, 1e-10)?;
        let sampler = BoxSampler::new(h.clone(), &v, p, opts.radius)?;
        let (points, acceptance) = sampler.points(seed, count, opts.pilot)?;
        let labels = points.iter().map(|x| label_by_slack(&h, x, opts.classify.boundary_band)).collect();
        return Ok(CellSample { point: p.to_vec(), points, labels, seed, acceptance, solver });
    }
    let space = log_normal_space(model, p, 1e-12)?;
    let scale: f64 = p.iter().sum();
    let h = space.polytope_h(scale);
    let v = vertices_of(&h, 1e-12)?;
    let sampler = BoxSampler::new(h.clone(), &v, p, opts.radius)?;
    let (points, acceptance) = sampler.points(seed, count, opts.pilot)?;
    for x in &points {
        assert!(space.residual(x) < 1e-9 && h.violation(x) < 1e-9, "sample left the log-normal polytope");
    }
    let labels: Result<Vec<Label>> =
        points.par_iter().map(|x| classify_in_space(model, &space, &check_data(x, x.len())?, &opts.classify)).collect();
    Ok(CellSample { point: p.to_vec(), points, labels: labels?, seed, acceptance, solver })
}

#[derive(Clone, Debug, Default)]
pub struct DisjointnessReport {
    pub pairs: usize,
    /// Pairs whose polytopes intersect.
    pub intersecting: Vec<(usize, usize)>,
    /// Pairs `(i, j)` where a sample of polytope `i` lies in polytope `j`.
    pub sample_hits: Vec<(usize, usize)>,
}

impl DisjointnessReport {
    pub fn all_disjoint(&self) -> bool {
        self.intersecting.is_empty() && self.sample_hits.is_empty()
    }
}

/// Pairwise intersection test of the log-normal polytopes at `points`, cross-checked
/// with `samples` random points per polytope.
pub fn disjointness_probe(model: &Model, points: &[Vec<f64>], samples: usize, seed: u64) -> Result<DisjointnessReport> {
    let spaces: Vec<LogNormalSpace> =
        points.iter().map(|p| log_normal_space(model, p, 1e-12)).collect::<Result<_>>()?;
    let hs: Vec<HPolytope<f64>> = spaces.iter().map(|s| s.polytope_h(s.point().iter().sum())).collect();
    let mut report = DisjointnessReport::default();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            report.pairs += 1;
            match vertices_of(&hs[i].intersect(&hs[j])?, 1e-10) {
                Ok(_) => report.intersecting.push((i, j)),
                Err(Error::Empty) => {}
                Err(e) => return Err(e),
            }
        }
    }
    if samples > 0 {
        for (i, h) in hs.iter().enumerate() {
            let v = vertices_of(h, 1e-12)?;
            let Ok(sampler) = BoxSampler::new(h.clone(), &v, spaces[i].point(), None) else { continue };
            let (pts, _) = sampler.points(seed.wrapping_add(i as u64), samples, 1000)?;
            for (j, s) in spaces.iter().enumerate() {
                if j != i && pts.iter().any(|x| s.residual(x) < 1e-9 && hs[j].violation(x) < 1e-9) {
                    report.sample_hits.push((i, j));
                }
            }
        }
    }
    Ok(report)
}
