mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use logvoronoi::logcell::{
    finite_voronoi_cell, log_normal_space, parametric_critical_points, project_to_simplex_coords, sample_cell, Label,
    SampleOptions,
};
use logvoronoi::logroot::{
    self, common_value, dual_cell, f_vector_combinatorial, face_report, face_vertices, lattice_faces,
    partition_from_functional, partition_pair_count, sufficient_cell, OrderedPartitionPair, MAX_ENUMERATION_N,
};
use logvoronoi::mle::{
    build_critical_system, find_critical_points, log_likelihood, mle_finite, mle_implicit, mle_linear, mle_toric,
    moment_map, parse_data_points, CriticalOptions, DataPoint,
};
use logvoronoi::model::{binomial, builtin_entry, BuiltinEntry, FiniteGridModel, ImplicitModel, Model};
use logvoronoi::polytope::io::PolytopeFile;
use logvoronoi::polytope::{f_vector, match_vertex_sets, vertices_of, VPolytope};

const DEFAULT_SEED: u64 = 2019;

#[derive(Parser, Debug)]
#[command(name = "logvoronoi", version, about = "Logarithmic Voronoi cells of discrete statistical models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Log-normal polytope of a model point (the exact cell for toric, linear and finite models).
    Cell(Common),
    /// Labelled uniform sample of the log-normal polytope.
    Sample(Common),
    /// Logarithmic root polytope of an interior grid point, its face report and dual cell.
    Logroot(Common),
    /// Figure of the cells of every grid point with positive coordinates, for n = 3 or 4.
    Tessellate(Common),
    /// Maximum likelihood estimate for each data point.
    Mle(Common),
    /// Certified real critical points of the likelihood on an implicit model.
    Critical(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Builtin model name, `grid` (with --n and --d), or a model JSON file.
    #[arg(long)]
    model: Option<String>,
    /// Model point or grid point, comma separated; entries may be fractions `a/b`.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Data points: a file with one point per line, or a single comma-separated point.
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<u64>,
    /// Parameters of the model's parametrization; used instead of --point.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Numerical tolerance; each command has its own default.
    #[arg(long)]
    tol: Option<f64>,
    /// Newton starts per critical point search.
    #[arg(long)]
    starts: Option<usize>,
    /// Write an SVG figure, to the given path or next to --out.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    svg: Option<String>,
    /// Main output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Partition pair `I:J` (1-based, e.g. `1,4:2,3,5`) for logroot.
    #[arg(long)]
    functional: Option<String>,
    /// Restrict samples to this distance from the point.
    #[arg(long)]
    radius: Option<f64>,
}

impl Common {
    fn tol(&self, default: f64) -> Result<f64> {
        let t = self.tol.unwrap_or(default);
        if !(t > 0.0 && t.is_finite()) {
            bail!("--tol must be positive, got {t}");
        }
        Ok(t)
    }

    fn out_path(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }

    fn svg_path(&self, stem: &str) -> Option<PathBuf> {
        let s = self.svg.as_ref()?;
        if !s.is_empty() {
            return Some(PathBuf::from(s));
        }
        Some(match &self.out {
            Some(p) => p.with_extension("svg"),
            None => PathBuf::from(format!("{stem}.svg")),
        })
    }

    fn critical(&self, default_starts: usize) -> CriticalOptions {
        CriticalOptions { starts: self.starts.unwrap_or(default_starts), seed: self.seed, ..Default::default() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Cell(a) => cmd_cell(a),
        Cmd::Sample(a) => cmd_sample(a),
        Cmd::Logroot(a) => cmd_logroot(a),
        Cmd::Tessellate(a) => cmd_tessellate(a),
        Cmd::Mle(a) => cmd_mle(a),
        Cmd::Critical(a) => cmd_critical(a),
    };
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| anyhow!("{} is not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>()? / b.trim().parse::<f64>()?,
        None => s.parse::<f64>()?,
    };
    if !v.is_finite() {
        bail!("`{s}` is not a finite number");
    }
    Ok(v)
}

fn parse_vec(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| parse_number(t).with_context(|| format!("parsing `{t}`"))).collect()
}

fn parse_grid_point(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().with_context(|| format!("`{t}` is not a nonnegative integer")))
        .collect()
}

/// Zeroes entries below `1e-13` of the largest one; vertex enumeration leaves round-off there.
fn clean(x: &[f64]) -> Vec<f64> {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    x.iter().map(|&v| if v.abs() <= 1e-13 * m { 0.0 } else { v }).collect()
}

fn clean_all(v: &VPolytope<f64>) -> Result<VPolytope<f64>> {
    Ok(VPolytope::new(v.ambient_dim, v.vertices.iter().map(|x| clean(x)).collect())?)
}

fn fmt_vec(x: &[f64]) -> String {
    x.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
}

fn fmt_counts<T: std::fmt::Display>(x: &[T]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn load_model(args: &Common) -> Result<BuiltinEntry> {
    let name = args.model.as_deref().ok_or_else(|| anyhow!("--model is required"))?;
    if name == "grid" {
        let n = args.n.ok_or_else(|| anyhow!("--model grid needs --n"))?;
        let d = args.d.ok_or_else(|| anyhow!("--model grid needs --d"))?;
        return Ok(builtin_entry(&format!("grid({n},{d})"))?);
    }
    if let Ok(entry) = builtin_entry(name) {
        return Ok(entry);
    }
    let path = Path::new(name);
    if !path.exists() {
        bail!("`{name}` is neither a builtin model nor a readable file");
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
    let model = Model::from_json(&text).with_context(|| format!("parsing model file {name}"))?;
    let implicit = match &model {
        Model::Implicit(m) => Some(m.clone()),
        _ => None,
    };
    let parametrization = match &model {
        Model::Parametric(m) => Some(m.clone()),
        _ => None,
    };
    Ok(BuiltinEntry { name: name.to_string(), model, implicit, parametrization, ml_degree: None })
}

fn model_point(entry: &BuiltinEntry, args: &Common) -> Result<Vec<f64>> {
    let n = entry.model.n();
    let p = match (&args.point, &args.params) {
        (Some(p), None) => parse_vec(p)?,
        (None, Some(t)) => {
            let theta = parse_vec(t)?;
            if let Some(pm) = &entry.parametrization {
                if theta.len() != pm.params() {
                    bail!("--params needs {} values", pm.params());
                }
                pm.eval(&theta)
            } else {
                match &entry.model {
                    Model::Linear(l) => l.eval(&theta),
                    Model::Toric(t) => t.point(&theta),
                    _ => bail!("model `{}` has no parametrization; use --point", entry.name),
                }
            }
        }
        (Some(_), Some(_)) => bail!("give either --point or --params, not both"),
        (None, None) => bail!("a model point is required (--point or --params)"),
    };
    if p.len() != n {
        bail!("point has {} coordinates, model has {n}", p.len());
    }
    Ok(p)
}

fn data_points(args: &Common) -> Result<Vec<Vec<f64>>> {
    let spec = args.data.as_deref().or(args.point.as_deref()).ok_or_else(|| anyhow!("--data is required"))?;
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        let pts = parse_data_points(&text)?;
        if pts.is_empty() {
            bail!("{spec} contains no data points");
        }
        Ok(pts)
    } else {
        Ok(vec![parse_vec(spec)?])
    }
}

fn implicit_of<'a>(entry: &'a BuiltinEntry) -> Result<&'a ImplicitModel> {
    entry.implicit.as_ref().ok_or_else(|| anyhow!("model `{}` has no implicit description", entry.name))
}

fn polytope_figure(title: &str, v: &VPolytope<f64>, marks: &[(Vec<f64>, &str)]) -> String {
    let frame = v.frame(1e-9);
    let coords = svg::frame_coords(&frame);
    let mut fig = svg::Figure::new(title);
    svg::draw_polytope(&mut fig, v, &coords, "black", "#dddddd");
    for (x, color) in marks {
        let y = coords(x);
        let at = if y.len() >= 3 && v.dim(1e-9) >= 3 { svg::isometric(&y) } else { [y[0], y[1]] };
        fig.dot(at, color);
    }
    fig.render()
}

fn cmd_cell(args: &Common) -> Result<String> {
    let entry = load_model(args)?;
    let tol = args.tol(1e-10)?;
    let mut r = String::new();
    let (h, v, what, p) = match &entry.model {
        Model::Finite(g) => {
            let p = match (&args.point, &args.params) {
                (Some(s), _) => parse_grid_point(s)?,
                _ => bail!("a finite model needs --point"),
            };
            let (h, v) = finite_voronoi_cell(g, &p, tol)?;
            (h, v, "voronoi cell", p.iter().map(|&x| x as f64).collect::<Vec<f64>>())
        }
        model => {
            let p = model_point(&entry, args)?;
            let space = log_normal_space(model, &p, tol)?;
            let scale: f64 = p.iter().sum();
            let h = space.polytope_h(scale);
            let v = vertices_of(&h, tol.max(1e-12))?;
            let what = match model {
                Model::Toric(_) | Model::Linear(_) => "voronoi cell",
                _ => "log-normal polytope",
            };
            (h, v, what, p)
        }
    };
    let v = clean_all(&v)?;
    let dim = v.dim(1e-9);
    let _ = writeln!(r, "model: {} ({})", entry.name, entry.model.kind());
    let _ = writeln!(r, "point: {}", fmt_vec(&p));
    let _ = writeln!(r, "object: {what}");
    let _ = writeln!(r, "dimension: {dim}");
    let _ = writeln!(r, "vertices: {}", v.len());
    let _ = writeln!(r, "f-vector: {}", fmt_counts(&f_vector(&v)));
    for (k, x) in v.vertices.iter().enumerate() {
        let _ = writeln!(r, "vertex {}: {}", k + 1, fmt_vec(x));
    }
    let out = args.out_path("cell.json");
    write_atomic(&out, &PolytopeFile::new(Some(&h), Some(&v)).to_json())?;
    let _ = writeln!(r, "wrote {}", out.display());
    if let Some(path) = args.svg_path("cell") {
        let title = format!("{what} of {} at {}", entry.name, fmt_vec(&p));
        write_atomic(&path, &polytope_figure(&title, &v, &[(p.clone(), "red")]))?;
        let _ = writeln!(r, "wrote {}", path.display());
    }
    Ok(r)
}

fn label_color(l: Label) -> &'static str {
    match l {
        Label::In => svg::IN_COLOR,
        Label::Out => svg::OUT_COLOR,
        Label::Boundary => svg::BOUNDARY_COLOR,
        Label::Undetermined => svg::UNDETERMINED_COLOR,
    }
}

fn cmd_sample(args: &Common) -> Result<String> {
    let entry = load_model(args)?;
    let p = match &entry.model {
        Model::Finite(_) => parse_vec(args.point.as_deref().ok_or_else(|| anyhow!("--point is required"))?)?,
        _ => model_point(&entry, args)?,
    };
    let mut opts = SampleOptions::default();
    opts.classify.critical = args.critical(opts.classify.critical.starts);
    opts.classify.critical.ml_degree = entry.ml_degree;
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            bail!("--tol must be positive");
        }
        opts.classify.boundary_band = t;
    }
    opts.radius = args.radius;
    let sample = sample_cell(&entry.model, &p, args.samples, args.seed, &opts)?;
    let mut csv = format!("# seed={} solver={} acceptance={}\n", sample.seed, sample.solver, sample.acceptance);
    csv.push_str(&sample.to_csv());
    let out = args.out_path("sample.csv");
    write_atomic(&out, &csv)?;

    let mut r = String::new();
    let _ = writeln!(r, "model: {} ({})", entry.name, entry.model.kind());
    let _ = writeln!(r, "point: {}", fmt_vec(&p));
    let _ = writeln!(r, "seed: {}", sample.seed);
    let _ = writeln!(r, "samples: {}", sample.points.len());
    for l in [Label::In, Label::Out, Label::Boundary, Label::Undetermined] {
        let _ = writeln!(r, "{l}: {}", sample.count(l));
    }
    let _ = writeln!(r, "wrote {}", out.display());
    if let Some(path) = args.svg_path("sample") {
        let poly = match &entry.model {
            Model::Finite(g) => {
                let gp: Vec<u64> = p.iter().map(|&x| x as u64).collect();
                finite_voronoi_cell(g, &gp, 1e-10)?.1
            }
            model => {
                let space = log_normal_space(model, &p, 1e-10)?;
                vertices_of(&space.polytope_h(p.iter().sum()), 1e-12)?
            }
        };
        let marks: Vec<(Vec<f64>, &str)> =
            sample.points.iter().zip(&sample.labels).map(|(x, &l)| (x.clone(), label_color(l))).collect();
        let title = format!("sample of {} at {} (seed {})", entry.name, fmt_vec(&p), sample.seed);
        write_atomic(&path, &polytope_figure(&title, &poly, &marks))?;
        let _ = writeln!(r, "wrote {}", path.display());
    }
    Ok(r)
}

/// Largest grid for which the all-competitor cell is used in the duality check.
const BRUTE_FORCE_GRID: u64 = 20_000;

fn cmd_logroot(args: &Common) -> Result<String> {
    let p = parse_grid_point(args.point.as_deref().ok_or_else(|| anyhow!("--point is required"))?)?;
    let n = p.len();
    let d: u64 = p.iter().sum();
    if let Some(nn) = args.n {
        if nn != n {
            bail!("--n {nn} but the point has {n} coordinates");
        }
    }
    if let Some(dd) = args.d {
        if dd != d {
            bail!("--d {dd} but the point sums to {d}");
        }
    }
    let tol = args.tol(1e-9)?;
    let poly = logroot::build::<f64>(&p)?;
    let mut r = String::new();
    let _ = writeln!(r, "n: {n}");
    let _ = writeln!(r, "d: {d}");
    let _ = writeln!(r, "point: {}", fmt_counts(&p));
    let _ = writeln!(r, "a: {}", fmt_vec(poly.a()));
    let _ = writeln!(r, "b: {}", fmt_vec(poly.b()));
    let _ = writeln!(r, "vertices: {}", poly.vertex_labels().len());
    for (i, j) in poly.vertex_labels() {
        let _ = writeln!(r, "v{},{}: {}", i + 1, j + 1, fmt_vec(&poly.vertex(i, j)));
    }
    let root_f = f_vector(&poly.v_polytope());
    let _ = writeln!(r, "root polytope f-vector: {}", fmt_counts(&root_f));
    let expected = f_vector_combinatorial(n);
    let cell = dual_cell(&poly, 1e-10)?;
    let mut cell_f = f_vector(&cell);
    let _ = writeln!(r, "dual cell f-vector: {}", fmt_counts(&cell_f));
    let mut ok = root_f.iter().map(|&x| x as u64).eq(expected.iter().copied());
    cell_f.reverse();
    ok &= cell_f == root_f;

    if n <= MAX_ENUMERATION_N {
        let lattice: std::collections::BTreeMap<OrderedPartitionPair, usize> =
            lattice_faces(&poly, 1e-9)?.into_iter().collect();
        let mut bijection = lattice.len() as u64 == partition_pair_count(n);
        let mut exposed = 0usize;
        let report = face_report(&poly)?;
        for (part, dim, cert) in &report {
            let found = lattice.get(part).copied();
            let good = found == Some(part.face_dim()) && *dim == part.face_dim();
            bijection &= good;
            let g_ok = cert.holds(1e-9);
            exposed += g_ok as usize;
            let _ = writeln!(
                r,
                "face {part}: vertices {} dim {dim} {} g-gap {:e}{}",
                cert.face.len(),
                if good { "ok" } else { "FAIL" },
                cert.gap,
                if g_ok { "" } else { " (not exposed by g)" }
            );
        }
        let _ = writeln!(
            r,
            "faces: {} of {} partition pairs {}",
            lattice.len(),
            partition_pair_count(n),
            if bijection { "ok" } else { "FAIL" }
        );
        let _ = writeln!(r, "faces exposed by g: {exposed}");
        ok &= bijection;
    }

    let grid_size = binomial(d + n as u64 - 1, n as u64 - 1);
    let (route, reference) = if grid_size <= BRUTE_FORCE_GRID {
        ("all grid points", finite_voronoi_cell(&FiniteGridModel::new(n, d)?, &p, 1e-10)?.1)
    } else {
        ("root halfspaces", sufficient_cell::<f64>(&p, 1e-10)?.1)
    };
    let gap = match_vertex_sets(&cell.vertices, &reference.vertices, 1e-6);
    let dual_ok = gap.is_some_and(|g| g <= tol);
    match gap {
        Some(g) => {
            let _ = writeln!(
                r,
                "duality check against {route}: max deviation {g:e} {}",
                if dual_ok { "ok" } else { "FAIL" }
            );
        }
        None => {
            let _ = writeln!(
                r,
                "duality check against {route}: vertex sets differ ({} vs {}) FAIL",
                cell.len(),
                reference.len()
            );
        }
    }
    ok &= dual_ok;

    if let Some(spec) = &args.functional {
        let part = OrderedPartitionPair::parse(spec, n)?;
        let cert = face_vertices(&poly, &part);
        let _ = writeln!(r, "functional {part}: {}", fmt_vec(&cert.functional));
        let _ = writeln!(r, "common value: {}", common_value(&poly, &part));
        for ((i, j), s) in &cert.scores {
            let mark = if cert.face.contains(&(*i, *j)) { " *" } else { "" };
            let _ = writeln!(r, "score v{},{}: {s}{mark}", i + 1, j + 1);
        }
        let _ = writeln!(r, "spread: {:e}", cert.spread);
        let _ = writeln!(r, "gap: {:e}", cert.gap);
        let recovered = partition_from_functional(&poly, &cert.functional)?;
        let _ = writeln!(r, "recovered partition: {recovered}");
        ok &= cert.holds(1e-9) && recovered == part;
    }

    if let Some(out) = &args.out {
        write_atomic(out, &PolytopeFile::new(None, Some(&cell)).to_json())?;
        let _ = writeln!(r, "wrote {}", out.display());
    }
    if !ok {
        eprint!("{r}");
        bail!("logroot checks failed");
    }
    let _ = writeln!(r, "status: ok");
    Ok(r)
}

fn cmd_tessellate(args: &Common) -> Result<String> {
    let n = args.n.ok_or_else(|| anyhow!("--n is required"))?;
    let d = args.d.ok_or_else(|| anyhow!("--d is required"))?;
    if !(3..=4).contains(&n) {
        bail!("tessellate draws n = 3 or n = 4, got {n}");
    }
    let g = FiniteGridModel::new(n, d)?;
    let mut fig = svg::Figure::new(&format!("cells of M({n},{d})"));
    let corners: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = d as f64;
            e
        })
        .collect();
    let simplex = VPolytope::new(n, corners)?;
    svg::draw_polytope(&mut fig, &simplex, project_to_simplex_coords, "#999999", "none");
    let mut r = String::new();
    let mut count = 0usize;
    let mut shapes: std::collections::BTreeMap<Vec<usize>, usize> = Default::default();
    for p in g.points_at_least(1) {
        let (_, v) = finite_voronoi_cell(&g, p, 1e-10)?;
        svg::draw_polytope(&mut fig, &v, project_to_simplex_coords, "black", "#c6dbef");
        let pf: Vec<f64> = p.iter().map(|&x| x as f64).collect();
        let y = project_to_simplex_coords(&pf);
        fig.dot(if n == 4 { svg::isometric(&y) } else { [y[0], y[1]] }, "red");
        *shapes.entry(f_vector(&v)).or_default() += 1;
        count += 1;
    }
    let _ = writeln!(r, "n: {n}");
    let _ = writeln!(r, "d: {d}");
    let _ = writeln!(r, "cells: {count}");
    for (fv, k) in &shapes {
        let _ = writeln!(r, "f-vector {}: {k}", fmt_counts(fv));
    }
    let path =
        args.svg_path("tessellate").or_else(|| args.out.clone()).unwrap_or_else(|| PathBuf::from("tessellate.svg"));
    write_atomic(&path, &fig.render())?;
    let _ = writeln!(r, "wrote {}", path.display());
    Ok(r)
}

fn cmd_mle(args: &Common) -> Result<String> {
    let entry = load_model(args)?;
    let tol = args.tol(1e-12)?;
    let mut r = String::new();
    let _ = writeln!(r, "model: {} ({})", entry.name, entry.model.kind());
    for u in data_points(args)? {
        let _ = writeln!(r, "data: {}", fmt_vec(&u));
        match &entry.model {
            Model::Finite(g) => {
                let data = DataPoint::nonnegative(u)?;
                let q = mle_finite(g, &data)?;
                let _ = writeln!(r, "route: grid enumeration");
                let _ = writeln!(r, "estimate: {}", fmt_counts(&q));
                let _ = writeln!(r, "candidates: {}", g.points_at_least(1).count());
            }
            Model::Toric(t) => {
                let data = DataPoint::new(u)?;
                let p = mle_toric(t, &data, tol)?;
                let target = moment_map(t, &data);
                let ap = t.a().mul_vec(&p);
                let res = ap.iter().zip(&target).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                let _ = writeln!(r, "route: toric moment map");
                let _ = writeln!(r, "estimate: {}", fmt_vec(&p));
                let _ = writeln!(r, "moment residual: {res:e}");
                let _ = writeln!(r, "log-likelihood: {}", log_likelihood(&data, &p)?);
            }
            Model::Linear(l) => {
                let data = DataPoint::new(u)?;
                let p = mle_linear(l, &data, tol)?;
                let _ = writeln!(r, "route: linear concave maximisation");
                let _ = writeln!(r, "estimate: {}", fmt_vec(&p));
                let _ = writeln!(r, "log-likelihood: {}", log_likelihood(&data, &p)?);
            }
            Model::Implicit(_) | Model::Parametric(_) => {
                let data = DataPoint::new(u)?;
                let mut opts = args.critical(500);
                opts.ml_degree = entry.ml_degree;
                if let Some(m) = &entry.implicit {
                    let est = mle_implicit(m, &data, &opts)?;
                    let _ = writeln!(r, "route: critical points of the implicit system (best effort)");
                    let _ = writeln!(r, "estimate: {}", fmt_vec(&est.point));
                    let _ = writeln!(r, "log-likelihood: {}", est.log_likelihood);
                    let _ = writeln!(r, "model residual: {:e}", m.residual(&est.point));
                    let _ = writeln!(r, "candidates: {}", est.candidates);
                    let _ = writeln!(r, "real critical points: {}", est.real_solutions);
                    let _ = writeln!(r, "starts: {} seed: {}", est.starts_used, opts.seed);
                } else {
                    let Model::Parametric(pm) = &entry.model else { unreachable!() };
                    let pts = parametric_critical_points(pm, &data, &opts);
                    let best = pts
                        .iter()
                        .filter_map(|x| log_likelihood(&data, x).ok().map(|l| (l, x)))
                        .max_by(|a, b| a.0.total_cmp(&b.0))
                        .ok_or_else(|| anyhow!("no critical point found"))?;
                    let _ = writeln!(r, "route: parameter-space Newton (best effort)");
                    let _ = writeln!(r, "estimate: {}", fmt_vec(best.1));
                    let _ = writeln!(r, "log-likelihood: {}", best.0);
                    let _ = writeln!(r, "candidates: {}", pts.len());
                    let _ = writeln!(r, "starts: {} seed: {}", opts.starts, opts.seed);
                }
            }
        }
    }
    if let Some(out) = &args.out {
        write_atomic(out, &r)?;
    }
    Ok(r)
}

fn cmd_critical(args: &Common) -> Result<String> {
    let entry = load_model(args)?;
    let model = implicit_of(&entry)?;
    let mut opts = args.critical(500);
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            bail!("--tol must be positive");
        }
        opts.tol = t;
    }
    let mut r = String::new();
    let mut csv = String::new();
    let _ = writeln!(csv, "# model={} seed={} starts={}", entry.name, opts.seed, opts.starts);
    let n = model.n();
    let c = model.codim();
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=c).map(|i| format!("lambda{i}")))
        .chain(["data", "residual", "log_likelihood", "positive"].map(String::from))
        .collect();
    let _ = writeln!(csv, "{}", header.join(","));
    let _ = writeln!(r, "model: {}", entry.name);
    for (k, u) in data_points(args)?.into_iter().enumerate() {
        let data = DataPoint::new(u)?;
        let sys = build_critical_system(model, &data, opts.seed)?;
        let set = find_critical_points(&sys, &opts);
        let _ = writeln!(r, "data {}: {}", k + 1, fmt_vec(data.u()));
        let _ = writeln!(r, "real critical points: {}", set.len());
        let _ = writeln!(r, "positive: {}", set.positive().count());
        if let Some(best) = set.best() {
            let _ = writeln!(r, "best: {}", fmt_vec(&best.x));
        }
        for cp in &set.points {
            let ll = cp.log_likelihood.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt_vec(&cp.x),
                fmt_vec(&cp.lambda),
                k + 1,
                cp.residual,
                ll,
                cp.positive
            );
        }
    }
    let out = args.out_path("critical.csv");
    write_atomic(&out, &csv)?;
    let _ = writeln!(r, "wrote {}", out.display());
    Ok(r)
}
