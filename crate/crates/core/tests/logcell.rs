use logvoronoi::logcell::{
    classify, log_normal_polytope, log_normal_space, log_normal_space_minors, sample_cell, subspace_gap,
    ClassifyOptions, Label, SampleOptions,
};
use logvoronoi::mle::{mle_linear, mle_toric, CriticalOptions, DataPoint};
use logvoronoi::model::{builtin, builtin_entry, cousin_point, mixture_reference_point, Model};
use proptest::prelude::*;

fn cubic(t: f64) -> Vec<f64> {
    let s = 1.0 - t;
    vec![t * t * t, 3.0 * t * t * s, 3.0 * t * s * s, s * s * s]
}

fn mix(vertices: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().take(vertices.len()).sum();
    let mut u = vec![0.0; vertices[0].len()];
    for (v, w) in vertices.iter().zip(weights) {
        for (a, b) in u.iter_mut().zip(v) {
            *a += w / total * b;
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn toric_cell_points_map_back(t in 0.05f64..0.95, w in prop::collection::vec(0.05f64..1.0, 8)) {
        let model = builtin("twisted_cubic").unwrap();
        let Model::Toric(m) = &model else { unreachable!() };
        let p = cubic(t);
        let cell = log_normal_polytope(&model, &p, 1e-12).unwrap();
        let u = mix(&cell.vertices, &w);
        let est = mle_toric(m, &DataPoint::new(u).unwrap(), 1e-13).unwrap();
        for (a, b) in est.iter().zip(&p) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn linear_cell_points_map_back(theta in 0.1f64..0.9, w in prop::collection::vec(0.05f64..1.0, 8)) {
        let model = builtin("linear_example").unwrap();
        let Model::Linear(m) = &model else { unreachable!() };
        let lo = m.bounds()[0].0;
        let hi = m.bounds()[0].1;
        let mut th = vec![lo + theta * (hi - lo)];
        th.resize(m.d(), 0.5 * (lo + hi));
        let p = m.eval(&th);
        let cell = log_normal_polytope(&model, &p, 1e-12).unwrap();
        let u = mix(&cell.vertices, &w);
        let est = mle_linear(m, &DataPoint::new(u).unwrap(), 1e-13).unwrap();
        for (a, b) in est.iter().zip(&p) {
            prop_assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn minor_route_agrees_on_the_cousin_curve(r in 0.1f64..10.0) {
        let model = builtin("cousin_hardy_weinberg").unwrap();
        let p = cousin_point(r);
        let a = log_normal_space(&model, &p, 1e-12).unwrap();
        let b = log_normal_space_minors(&model, &p).unwrap();
        prop_assert!(subspace_gap(a.basis(), b.basis()) < 1e-9);
        let d = [1.0, -2.0, 1.0];
        prop_assert!(a.residual(&d) < 1e-9);
    }
}

#[test]
fn cousin_cells_are_convex() {
    let model = builtin("cousin_hardy_weinberg").unwrap();
    let p = cousin_point(1.7);
    let mut opts = SampleOptions::default();
    opts.classify.critical = CriticalOptions { starts: 40, ..Default::default() };
    let sample = sample_cell(&model, &p, 60, 3, &opts).unwrap();
    let inside: Vec<&Vec<f64>> =
        sample.points.iter().zip(&sample.labels).filter(|(_, &l)| l == Label::In).map(|(x, _)| x).collect();
    assert!(inside.len() >= 10);
    let copts = ClassifyOptions { critical: opts.classify.critical.clone(), ..Default::default() };
    for k in 0..inside.len() - 1 {
        let mid: Vec<f64> = inside[k].iter().zip(inside[k + 1]).map(|(a, b)| 0.5 * (a + b)).collect();
        assert_ne!(classify(&model, &p, &mid, &copts).unwrap(), Label::Out);
    }
}

#[test]
fn mixture_point_lies_in_its_polytope() {
    let entry = builtin_entry("mixture_binomial_5").unwrap();
    let p = mixture_reference_point();
    let poly = log_normal_polytope(&entry.model, &p, 1e-12).unwrap();
    assert_eq!(poly.len(), 6);
    let space = log_normal_space(&entry.model, &p, 1e-12).unwrap();
    assert!(space.residual(&p) < 1e-12);
}
