use logvoronoi::polytope::io::PolytopeFile;
use logvoronoi::polytope::{
    contains, dual_of, f_vector, hull_of, match_vertex_sets, vertices_of, HPolytope, VPolytope,
};
use logvoronoi::Matrix64;
use proptest::prelude::*;

fn cloud(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), k..k + 12)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Every feasible intersection of three constraint planes, deduplicated.
fn brute_force_vertices(a: &[Vec<f64>], b: &[f64]) -> Vec<Vec<f64>> {
    let m = a.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let rows = [&a[i], &a[j], &a[k]];
                let mat = [
                    [rows[0][0], rows[0][1], rows[0][2]],
                    [rows[1][0], rows[1][1], rows[1][2]],
                    [rows[2][0], rows[2][1], rows[2][2]],
                ];
                let d = det3(mat);
                if d.abs() < 1e-9 {
                    continue;
                }
                let rhs = [b[i], b[j], b[k]];
                let x: Vec<f64> = (0..3)
                    .map(|c| {
                        let mut mc = mat;
                        for r in 0..3 {
                            mc[r][c] = rhs[r];
                        }
                        det3(mc) / d
                    })
                    .collect();
                let feasible =
                    a.iter().zip(b).all(|(row, &bb)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bb + 1e-9);
                if feasible && !out.iter().any(|y| y.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-7)) {
                    out.push(x);
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hull_and_vertices_round_trip(points in cloud(5)) {
        let v = VPolytope::from_points(3, points.clone(), 1e-10).unwrap();
        prop_assume!(v.dim(1e-9) == 3);
        let h = hull_of(&v, 1e-10).unwrap();
        for x in &points {
            prop_assert!(contains(&h, x, 1e-9));
        }
        let back = vertices_of(&h, 1e-10).unwrap();
        prop_assert!(match_vertex_sets(&back.vertices, &v.vertices, 1e-7).is_some_and(|g| g < 1e-9));
        let f = f_vector(&v);
        prop_assert_eq!(f[1] as i64 - f[2] as i64 + f[3] as i64, 2);
    }

    #[test]
    fn vertices_match_brute_force(normals in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 4..10),
                                  rhs in prop::collection::vec(0.2f64..1.0, 10)) {
        let mut a: Vec<Vec<f64>> = Vec::new();
        let mut b: Vec<f64> = Vec::new();
        for (k, nrm) in normals.iter().enumerate() {
            let len = nrm.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assume!(len > 0.1);
            a.push(nrm.iter().map(|x| x / len).collect());
            b.push(rhs[k]);
        }
        for s in [1.0, -1.0] {
            for c in 0..3 {
                let mut row = vec![0.0; 3];
                row[c] = s;
                a.push(row);
                b.push(2.0);
            }
        }
        let h = HPolytope::from_inequalities(Matrix64::from_rows(3, &a).unwrap(), b.clone()).unwrap();
        let v = vertices_of(&h, 1e-10).unwrap();
        let brute = brute_force_vertices(&a, &b);
        prop_assert!(match_vertex_sets(&v.vertices, &brute, 1e-6).is_some_and(|g| g < 1e-9),
            "{} vs {}", v.len(), brute.len());
    }

    #[test]
    fn double_dual_is_identity(points in cloud(6)) {
        let v = VPolytope::from_points(3, points, 1e-10).unwrap();
        prop_assume!(v.dim(1e-9) == 3);
        let c = v.centroid();
        let Ok(d) = dual_of(&v, &c, 1e-10) else { return Ok(()) };
        let dd = dual_of(&d, &c, 1e-10).unwrap();
        prop_assert!(match_vertex_sets(&dd.vertices, &v.vertices, 1e-6).is_some_and(|g| g < 1e-8));
    }
}

#[test]
fn cube_dual_is_octahedron() {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for mask in 0..8 {
        pts.push((0..3).map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 }).collect());
    }
    let cube = VPolytope::from_points(3, pts, 1e-12).unwrap();
    let oct = dual_of(&cube, &[0.0; 3], 1e-12).unwrap();
    assert_eq!(oct.len(), 6);
    assert_eq!(f_vector(&oct), vec![1, 6, 12, 8, 1]);
    for x in &oct.vertices {
        assert!((x.iter().map(|v| v.abs()).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn files_round_trip() {
    let h = HPolytope::simplex(3, 1.0);
    let v = vertices_of(&h, 1e-12).unwrap();
    let file = PolytopeFile::new(Some(&h), Some(&v));
    let back = PolytopeFile::from_json(&file.to_json()).unwrap();
    assert_eq!(back, file);
    let hv = back.v_polytope().unwrap().unwrap();
    assert_eq!(hv, v);
    assert!(back.h_polytope().unwrap().is_some());
}
