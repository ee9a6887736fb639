//! Acceptance checks, one line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use logvoronoi::logcell::{
    classify, finite_voronoi_cell, log_normal_polytope, log_normal_space, log_normal_space_minors, sample_cell,
    subspace_gap, ClassifyOptions, Label, SampleOptions,
};
use logvoronoi::logroot::{build, dual_cell, face_vertices, sufficient_cell, OrderedPartitionPair};
use logvoronoi::mle::{build_critical_system, find_critical_points, mle_finite, mle_toric, CriticalOptions, DataPoint};
use logvoronoi::model::{
    builtin, builtin_entry, catalog, cousin_point, mixture_reference_point, random_simplex_point, FiniteGridModel,
    Model,
};
use logvoronoi::polytope::{f_vector, match_vertex_sets, HPolytope};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn interior_points(n: usize, d: u64) -> Vec<Vec<u64>> {
    FiniteGridModel::new(n, d).unwrap().points_at_least(2).cloned().collect()
}

fn dual_f_vector(p: &[u64]) -> Vec<usize> {
    f_vector(&dual_cell(&build::<f64>(p).unwrap(), 1e-10).unwrap())
}

fn f_vector_table() -> Outcome {
    let table: [(usize, Vec<usize>); 5] = [
        (2, vec![1, 2, 1]),
        (3, vec![1, 6, 6, 1]),
        (4, vec![1, 14, 24, 12, 1]),
        (5, vec![1, 30, 70, 60, 20, 1]),
        (6, vec![1, 62, 180, 210, 120, 30, 1]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for (n, expected) in &table {
        let mut points = vec![vec![2u64; *n], (0..*n as u64).map(|k| 2 + k % 3).collect()];
        points.push((0..*n).map(|_| rng.random_range(2u64..20)).collect());
        for p in points {
            let got = dual_f_vector(&p);
            if &got != expected {
                return outcome(false, format!("p = {p:?}: {got:?}, expected {expected:?}"));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} points, n = 2..6 exact"))
}

fn f_vector_table_n7() -> Outcome {
    let expected = vec![1, 126, 434, 630, 490, 210, 42, 1];
    let p = [2u64, 3, 4, 2, 3, 4, 2];
    let got = dual_f_vector(&p);
    outcome(got == expected, format!("n = 7: {got:?}"))
}

/// Scores `g·v_ij` printed in the worked example, row-major over `i ≠ j`.
const EXAMPLE_SCORES: [f64; 30] = [
    0.008135843945,
    0.008135843948,
    0.002052114856,
    0.008135843948,
    0.005950315119,
    -0.007192386292,
    0.005982647332,
    -0.008044880930,
    0.002322216671,
    -0.001027169161,
    -0.007691322875,
    -0.005863205380,
    -0.008723741580,
    -0.004075725208,
    -0.004962538041,
    -0.004242519680,
    0.008135843941,
    0.008135843947,
    0.008135843947,
    0.004743470845,
    -0.007271750954,
    -0.001944541355,
    0.004878535171,
    -0.008151512920,
    -0.002105123850,
    -0.006239195419,
    0.001256424608,
    0.005540018448,
    -0.005547164875,
    0.002536892813,
];

fn agrees_to_sig(x: f64, reference: f64, digits: i32) -> bool {
    if reference == 0.0 {
        return x.abs() < 0.5 * 10f64.powi(-3 - digits);
    }
    let unit = 10f64.powi(reference.abs().log10().floor() as i32 - digits + 1);
    (x - reference).abs() <= 0.5 * unit
}

fn example_functional() -> Outcome {
    let poly = build::<f64>(&[2, 15, 3, 5, 9, 6]).unwrap();
    let part = OrderedPartitionPair::parse("1,4:2,3,5", 6).unwrap();
    let cert = face_vertices(&poly, &part);
    let expected_g = [0.00415, -0.00200, -0.00398, 0.00474, -0.00291, 0.0];
    let g_ok = cert.functional.iter().zip(expected_g).all(|(&a, b)| agrees_to_sig(a, b, 3));
    let value_ok = agrees_to_sig(cert.value, 0.008135843945, 9);
    let others_below = cert.face.len() == 6 && cert.gap > 0.0;
    let scores_ok = cert.scores.iter().zip(EXAMPLE_SCORES).all(|((_, s), t)| (s - t).abs() < 1e-11);
    outcome(
        g_ok && value_ok && others_below && scores_ok,
        format!(
            "g = {:.5?}, value = {:.12}, gap = {:.3e}, 30 scores within 1e-11: {scores_ok}",
            cert.functional, cert.value, cert.gap
        ),
    )
}

fn duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, p) in [(7u64, vec![3u64, 2, 2]), (10, vec![3, 3, 2, 2])] {
        let g = FiniteGridModel::new(p.len(), d).unwrap();
        let dual = dual_cell(&build::<f64>(&p).unwrap(), 1e-10).unwrap();
        let (_, brute) = finite_voronoi_cell(&g, &p, 1e-10).unwrap();
        match match_vertex_sets(&dual.vertices, &brute.vertices, 1e-6) {
            Some(gap) => worst = worst.max(gap),
            None => return outcome(false, format!("{p:?}: {} vs {} vertices", dual.len(), brute.len())),
        }
    }
    outcome(worst < 1e-9, format!("max deviation {worst:.2e}"))
}

fn sufficiency() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (n, d) in [(3, 6), (3, 7), (4, 8)] {
        let g = FiniteGridModel::new(n, d).unwrap();
        for p in interior_points(n, d) {
            let (_, brute) = finite_voronoi_cell(&g, &p, 1e-10).unwrap();
            let (_, few) = sufficient_cell::<f64>(&p, 1e-10).unwrap();
            match match_vertex_sets(&brute.vertices, &few.vertices, 1e-6) {
                Some(gap) => worst = worst.max(gap),
                None => return outcome(false, format!("{p:?}: vertex counts differ")),
            }
            count += 1;
        }
    }
    outcome(worst < 1e-9, format!("{count} interior points, max deviation {worst:.2e}"))
}

fn reference_hexagon() -> Vec<Vec<f64>> {
    [
        [0.0, 651.0 / 1625.0, 0.0, 30569.0 / 58500.0, 43.0 / 2250.0, 3377.0 / 58500.0],
        [0.0, 124.0 / 375.0, 88.0 / 375.0, 77.0 / 375.0, 86.0 / 375.0, 0.0],
        [8288.0 / 76875.0, 0.0, 3176.0 / 5125.0, 0.0, 1376.0 / 5125.0, 307.0 / 76875.0],
        [259.0 / 1875.0, 0.0, 52.0 / 125.0, 91.0 / 250.0, 0.0, 307.0 / 3750.0],
        [518.0 / 76875.0, 1984.0 / 5125.0, 0.0, 2779.0 / 5125.0, 0.0, 4912.0 / 76875.0],
        [2849.0 / 29250.0, 31.0 / 1125.0, 8734.0 / 14625.0, 0.0, 903.0 / 3250.0, 0.0],
    ]
    .iter()
    .map(|r| r.to_vec())
    .collect()
}

fn hexagon() -> Outcome {
    let model = builtin("mixture_binomial_5").unwrap();
    let v = log_normal_polytope(&model, &mixture_reference_point(), 1e-12).unwrap();
    match match_vertex_sets(&v.vertices, &reference_hexagon(), 1e-6) {
        Some(gap) => outcome(v.len() == 6 && gap < 1e-9, format!("{} vertices, max deviation {gap:.2e}", v.len())),
        None => outcome(false, format!("{} vertices do not match", v.len())),
    }
}

fn cubic(t: f64) -> Vec<f64> {
    let s = 1.0 - t;
    vec![t * t * t, 3.0 * t * t * s, 3.0 * t * s * s, s * s * s]
}

fn birch() -> Outcome {
    let Model::Toric(tc) = builtin("twisted_cubic").unwrap() else { unreachable!() };
    let Model::Toric(segre) = builtin("segre").unwrap() else { unreachable!() };
    let a = tc.a();
    let (mut moment, mut closed, mut product) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = DataPoint::new(random_simplex_point(&mut rng, 4)).unwrap();
        let p = mle_toric(&tc, &u, 1e-13).unwrap();
        for (x, y) in a.mul_vec(&p).iter().zip(a.mul_vec(u.u())) {
            moment = moment.max((x - y).abs());
        }
        let w = u.u();
        let t = (3.0 * w[0] + 2.0 * w[1] + w[2]) / 3.0;
        for (x, y) in p.iter().zip(cubic(t)) {
            closed = closed.max((x - y).abs());
        }
        let q = mle_toric(&segre, &u, 1e-14).unwrap();
        let expected = [
            (w[0] + w[1]) * (w[0] + w[2]),
            (w[0] + w[1]) * (w[1] + w[3]),
            (w[2] + w[3]) * (w[0] + w[2]),
            (w[2] + w[3]) * (w[1] + w[3]),
        ];
        for (x, y) in q.iter().zip(expected) {
            product = product.max((x - y).abs());
        }
    }
    outcome(
        moment < 1e-9 && closed < 1e-9 && product < 1e-10,
        format!("moment {moment:.1e}, closed form {closed:.1e}, Segre {product:.1e}"),
    )
}

fn ml_degree() -> Outcome {
    let cousin = builtin_entry("cousin_hardy_weinberg").unwrap().implicit.unwrap();
    let mut two = 0;
    for k in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k);
        let u = DataPoint::new(random_simplex_point(&mut rng, 3)).unwrap();
        let sys = build_critical_system(&cousin, &u, 2019 + k).unwrap();
        let set = find_critical_points(&sys, &CriticalOptions { starts: 500, seed: k, ..Default::default() });
        two += (set.len() == 2) as usize;
    }
    let part_a = two >= 19;

    let mixture = builtin_entry("mixture_binomial_5").unwrap();
    let implicit = mixture.implicit.as_ref().unwrap();
    let p = mixture_reference_point();
    let hexagon = log_normal_polytope(&mixture.model, &p, 1e-12).unwrap();
    let mut recovered = 0;
    let trials = 5;
    for k in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + k);
        let w = random_simplex_point(&mut rng, hexagon.len());
        let mut u = vec![0.0; 6];
        for (v, wk) in hexagon.vertices.iter().zip(&w) {
            for (a, b) in u.iter_mut().zip(v) {
                *a += wk * b;
            }
        }
        let data = DataPoint::new(u).unwrap();
        let sys = build_critical_system(implicit, &data, 2019).unwrap();
        let set = find_critical_points(&sys, &CriticalOptions { starts: 1000, seed: k, ..Default::default() });
        if let Some(i) = set.find_x(&p, 1e-6) {
            recovered += (set.points[i].residual < 1e-8) as usize;
        }
    }
    let part_b = recovered == trials as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let u = DataPoint::new(random_simplex_point(&mut rng, 6)).unwrap();
    let sys = build_critical_system(implicit, &u, 2019).unwrap();
    let set = find_critical_points(&sys, &CriticalOptions { starts: 5000, ..Default::default() });
    let part_c = set.len() >= 10;
    outcome(
        part_a && part_b && part_c,
        format!(
            "(a) {two}/20 with 2 real; (b) p recovered {recovered}/{trials}; (c) {} distinct real critical points ({} positive) at u = {:.4?}",
            set.len(),
            set.positive().count(),
            u.u()
        ),
    )
}

fn model_points(name: &str, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let entry = builtin_entry(name).unwrap();
    (0..count)
        .map(|_| match (&entry.model, &entry.parametrization) {
            (_, Some(pm)) => {
                let lo_hi = pm.domain();
                let theta: Vec<f64> =
                    lo_hi.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random_range(0.05..0.95)).collect();
                pm.eval(&theta)
            }
            (Model::Linear(l), None) => {
                let theta: Vec<f64> =
                    l.bounds().iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random_range(0.05..0.95)).collect();
                l.eval(&theta)
            }
            (Model::Implicit(_), None) => cousin_point(rng.random_range(0.1..10.0)),
            (Model::Toric(t), None) => {
                let theta: Vec<f64> = (0..t.row_basis().rows()).map(|_| rng.random_range(-1.0..1.0)).collect();
                t.point(&theta)
            }
            _ => unreachable!("finite models have no log-normal space"),
        })
        .collect()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn segre_equations(u: &[f64], x: &[f64]) -> [f64; 4] {
    let (u1, u2, u3, u4) = (u[0], u[1], u[2], u[3]);
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    [
        u2 - u3 - u1 * x2 / x1 + u1 * x3 / x1 + u2 * x4 / x2 - u3 * x4 / x3,
        u1 - u4 - u2 * x1 / x2 + u1 * x3 / x1 - u4 * x3 / x4 + u2 * x4 / x2,
        u1 - u4 + u1 * x2 / x1 - u3 * x1 / x3 - u4 * x2 / x4 + u3 * x4 / x3,
        u2 - u3 + u2 * x1 / x2 - u3 * x1 / x3 - u4 * x2 / x4 + u4 * x3 / x4,
    ]
}

fn log_normal_geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cousin = builtin("cousin_hardy_weinberg").unwrap();
    let d = [1.0, -2.0, 1.0];
    let dn = 6f64.sqrt();
    let mut direction: f64 = 0.0;
    for _ in 0..50 {
        let p = cousin_point(rng.random_range(0.05..20.0));
        let s = log_normal_space(&cousin, &p, 1e-12).unwrap();
        let rows = s.basis().row_vecs();
        let nrm = cross(&rows[0], &rows[1]);
        let nn = nrm.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = nrm.iter().zip(d).map(|(a, b)| a * b).sum::<f64>().abs() / (nn * dn);
        direction = direction.max(r);
    }

    let segre = builtin("segre_implicit").unwrap();
    let mut minors: f64 = 0.0;
    for p in model_points("segre_implicit", 20, &mut rng) {
        let s = log_normal_space(&segre, &p, 1e-12).unwrap();
        for row in s.basis().row_vecs() {
            for v in segre_equations(&row, &p) {
                minors = minors.max(v.abs());
            }
        }
    }

    let mut gap: f64 = 0.0;
    let mut models = 0;
    for name in catalog().iter().filter(|n| !n.starts_with("grid")) {
        let model = builtin(name).unwrap();
        for p in model_points(name, 20, &mut rng) {
            let a = log_normal_space(&model, &p, 1e-12).unwrap();
            let b = log_normal_space_minors(&model, &p).unwrap();
            gap = gap.max(subspace_gap(a.basis(), b.basis()));
        }
        models += 1;
    }
    outcome(
        direction < 1e-9 && minors < 1e-9 && gap < 1e-9,
        format!("(a) {direction:.1e}; (b) {minors:.1e}; (c) gap {gap:.1e} over {models} models"),
    )
}

/// Euclidean distance from `u` to the nearest facet hyperplane.
fn face_distance(h: &HPolytope<f64>, u: &[f64]) -> f64 {
    (0..h.ineq.rows())
        .map(|i| {
            let row = h.ineq.row(i);
            let nr = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            (h.rhs[i] - row.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()).abs() / nr
        })
        .fold(f64::INFINITY, f64::min)
}

fn classification() -> Outcome {
    let g = FiniteGridModel::new(3, 6).unwrap();
    let cells: Vec<(Vec<u64>, HPolytope<f64>)> =
        g.points_at_least(1).map(|p| (p.clone(), finite_voronoi_cell(&g, p, 1e-10).unwrap().0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut mismatches, mut compared) = (0, 0);
    for _ in 0..1000 {
        let u: Vec<f64> = random_simplex_point(&mut rng, 3).iter().map(|x| 6.0 * x).collect();
        if cells.iter().any(|(_, h)| face_distance(h, &u) <= 1e-8) {
            continue;
        }
        let best = mle_finite(&g, &DataPoint::new(u.clone()).unwrap()).unwrap();
        for (p, h) in &cells {
            if (p == &best) != (h.min_slack(&u) > 0.0) {
                mismatches += 1;
            }
        }
        compared += 1;
    }

    let model = builtin("mixture_binomial_5").unwrap();
    let p = mixture_reference_point();
    let critical = CriticalOptions { starts: 32, ..Default::default() };
    let opts = SampleOptions {
        classify: ClassifyOptions { critical: critical.clone(), ..Default::default() },
        radius: Some(0.05),
        ..Default::default()
    };
    let sample = sample_cell(&model, &p, 80, 2019, &opts).unwrap();
    let inside: Vec<&Vec<f64>> =
        sample.points.iter().zip(&sample.labels).filter(|(_, &l)| l == Label::In).map(|(x, _)| x).collect();
    let copts = ClassifyOptions { critical, ..Default::default() };
    let mut violations = 0;
    let probes = 500;
    for _ in 0..probes {
        let a = inside[rng.random_range(0..inside.len())];
        let b = inside[rng.random_range(0..inside.len())];
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        if classify(&model, &p, &mid, &copts).unwrap() == Label::Out {
            violations += 1;
        }
    }
    outcome(
        mismatches == 0 && violations == 0 && inside.len() >= 2,
        format!(
            "{mismatches} mismatches over {compared} grid data points; {violations} of {probes} midpoints out ({} in-cell endpoints)",
            inside.len()
        ),
    )
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_logvoronoi")).args(args).output().expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = "518/9375,124/625,192/625,168/625,86/625,307/9375";
    let runs: Vec<(&str, Vec<&str>)> = vec![
        (
            "sample.csv",
            vec![
                "sample",
                "--model",
                "mixture_binomial_5",
                "--point",
                p,
                "--samples",
                "20",
                "--starts",
                "16",
                "--radius",
                "0.05",
            ],
        ),
        ("tc.csv", vec!["sample", "--model", "twisted_cubic", "--params", "0.4", "--samples", "200"]),
        ("cell.json", vec!["cell", "--model", "mixture_binomial_5", "--point", p]),
        ("grid.json", vec!["cell", "--model", "grid", "--n", "4", "--d", "10", "--point", "3,3,2,2"]),
        (
            "crit.csv",
            vec![
                "critical",
                "--model",
                "mixture_binomial_5",
                "--data",
                "0.13,0.21,0.17,0.19,0.18,0.12",
                "--starts",
                "300",
            ],
        ),
        ("root.json", vec!["logroot", "--point", "2,15,3,5,9,6"]),
        ("mle.txt", vec!["mle", "--model", "cousin_hardy_weinberg", "--data", "0.2,0.5,0.3"]),
    ];
    let mut identical = 0;
    for (name, args) in &runs {
        let mut bytes = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("{k}-{name}"));
            let mut a = args.clone();
            a.extend(["--out", path.to_str().unwrap()]);
            run_cli(&a);
            bytes.push(std::fs::read(&path).unwrap());
        }
        identical += (bytes[0] == bytes[1]) as usize;
    }
    let svg_a = dir.path().join("a.svg");
    let svg_b = dir.path().join("b.svg");
    run_cli(&["tessellate", "--n", "4", "--d", "9", "--svg", svg_a.to_str().unwrap()]);
    run_cli(&["tessellate", "--n", "4", "--d", "9", "--svg", svg_b.to_str().unwrap()]);
    let svg_same = std::fs::read(&svg_a).unwrap() == std::fs::read(&svg_b).unwrap();
    let total = runs.len() + 1;
    let same = identical + svg_same as usize;
    outcome(same == total, format!("{same}/{total} commands byte-identical"))
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let checks: Vec<(&str, Check, Duration)> = vec![
        ("1", f_vector_table, Duration::from_secs(120)),
        ("1 (n = 7)", f_vector_table_n7, Duration::from_secs(1800)),
        ("2", example_functional, Duration::from_secs(1)),
        ("3", duality, Duration::from_secs(10)),
        ("4", sufficiency, Duration::from_secs(60)),
        ("5", hexagon, Duration::from_secs(5)),
        ("6", birch, Duration::from_secs(5)),
        ("7", ml_degree, Duration::from_secs(600)),
        ("8", log_normal_geometry, Duration::from_secs(10)),
        ("9", classification, Duration::from_secs(120)),
        ("10", determinism, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (name, check, limit) in checks {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= limit, o.detail),
            Err(e) => (
                false,
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into()),
            ),
        };
        failed += (!pass) as usize;
        println!(
            "criterion {name}: {} ({detail}; {:.2}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
