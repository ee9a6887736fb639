use super::{binomial, FiniteGridModel, ImplicitModel, LinearModel, Model, ParametricModel, Polynomial, ToricModel};
use crate::error::{Error, Result};

/// A catalog model together with the alternative descriptions it has.
#[derive(Clone, Debug)]
pub struct BuiltinEntry {
    pub name: String,
    pub model: Model,
    pub implicit: Option<ImplicitModel>,
    pub parametrization: Option<ParametricModel>,
    /// Number of complex critical points of the log-likelihood for generic data.
    pub ml_degree: Option<usize>,
}

const CATALOG: &[&str] = &[
    "twisted_cubic",
    "twisted_cubic_implicit",
    "twisted_cubic_parametric",
    "segre",
    "independence_2x2",
    "segre_implicit",
    "segre_parametric",
    "cousin_hardy_weinberg",
    "mixture_binomial_5",
    "mixture_binomial_5_parametric",
    "linear_example",
    "grid(3,6)",
];

/// Names accepted by [`builtin`]; `grid(n,d)` works for any `n ≥ 1`, `d ≥ 0`.
pub fn catalog() -> &'static [&'static str] {
    CATALOG
}

pub fn builtin(name: &str) -> Result<Model> {
    builtin_entry(name).map(|e| e.model)
}

pub fn builtin_entry(name: &str) -> Result<BuiltinEntry> {
    let entry = |model: Model, implicit, parametrization, ml_degree| BuiltinEntry {
        name: name.to_string(),
        model,
        implicit,
        parametrization,
        ml_degree,
    };
    let name_trim = name.trim();
    if let Some(args) = name_trim.strip_prefix("grid(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let (n, d) = match parts.as_slice() {
            [n, d] => (
                n.parse::<usize>().map_err(|_| Error::UnknownModel(name.into()))?,
                d.parse::<u64>().map_err(|_| Error::UnknownModel(name.into()))?,
            ),
            _ => return Err(Error::UnknownModel(name.into())),
        };
        return Ok(entry(Model::Finite(FiniteGridModel::new(n, d)?), None, None, None));
    }
    Ok(match name_trim {
        "twisted_cubic" => entry(
            Model::Toric(twisted_cubic_toric()),
            Some(twisted_cubic_implicit()),
            Some(twisted_cubic_parametric()),
            Some(1),
        ),
        "twisted_cubic_implicit" => entry(
            Model::Implicit(twisted_cubic_implicit()),
            Some(twisted_cubic_implicit()),
            Some(twisted_cubic_parametric()),
            Some(1),
        ),
        "twisted_cubic_parametric" => entry(
            Model::Parametric(twisted_cubic_parametric()),
            Some(twisted_cubic_implicit()),
            Some(twisted_cubic_parametric()),
            Some(1),
        ),
        "segre" | "independence_2x2" => {
            entry(Model::Toric(segre_toric()), Some(segre_implicit()), Some(segre_parametric()), Some(1))
        }
        "segre_implicit" => {
            entry(Model::Implicit(segre_implicit()), Some(segre_implicit()), Some(segre_parametric()), Some(1))
        }
        "segre_parametric" => {
            entry(Model::Parametric(segre_parametric()), Some(segre_implicit()), Some(segre_parametric()), Some(1))
        }
        "cousin_hardy_weinberg" => entry(Model::Implicit(cousin_implicit()), Some(cousin_implicit()), None, Some(2)),
        "mixture_binomial_5" => {
            entry(Model::Implicit(mixture_implicit()), Some(mixture_implicit()), Some(mixture_parametric()), Some(39))
        }
        "mixture_binomial_5_parametric" => entry(
            Model::Parametric(mixture_parametric()),
            Some(mixture_implicit()),
            Some(mixture_parametric()),
            Some(39),
        ),
        "linear_example" => entry(Model::Linear(linear_example()), None, None, Some(1)),
        _ => return Err(Error::UnknownModel(name.into())),
    })
}

fn poly(n: usize, pairs: &[(f64, &[u32])]) -> Polynomial {
    Polynomial::from_pairs(n, pairs).expect("catalog polynomials are well formed")
}

fn twisted_cubic_toric() -> ToricModel {
    ToricModel::with_weights(vec![vec![3, 2, 1, 0], vec![0, 1, 2, 3]], vec![1.0, 3.0, 3.0, 1.0])
        .expect("valid toric matrix")
}

fn twisted_cubic_implicit() -> ImplicitModel {
    let polys = vec![
        Polynomial::simplex(4),
        poly(4, &[(3.0, &[1, 0, 1, 0]), (-1.0, &[0, 2, 0, 0])]),
        poly(4, &[(3.0, &[0, 1, 0, 1]), (-1.0, &[0, 0, 2, 0])]),
        poly(4, &[(9.0, &[1, 0, 0, 1]), (-1.0, &[0, 1, 1, 0])]),
    ];
    ImplicitModel::with_sample_point(4, polys, vec![0.125, 0.375, 0.375, 0.125])
        .expect("p(1/2) lies on the twisted cubic")
}

/// `t ↦ (t³, 3t²(1−t), 3t(1−t)², (1−t)³)`.
fn twisted_cubic_parametric() -> ParametricModel {
    let t = Polynomial::var(1, 0);
    let s = &Polynomial::constant(1, 1.0) - &t;
    let map = (0..4u32).map(|k| (&t.pow(3 - k) * &s.pow(k)).scale(binomial(3, k as u64) as f64)).collect();
    ParametricModel::new(map, vec![(0.0, 1.0)]).expect("binomial map sums to 1")
}

fn segre_toric() -> ToricModel {
    ToricModel::new(vec![vec![1, 1, 1, 1], vec![1, 1, 0, 0], vec![1, 0, 1, 0]]).expect("valid toric matrix")
}

fn segre_implicit() -> ImplicitModel {
    let polys = vec![Polynomial::simplex(4), poly(4, &[(1.0, &[1, 0, 0, 1]), (-1.0, &[0, 1, 1, 0])])];
    ImplicitModel::with_sample_point(4, polys, vec![0.25; 4]).expect("uniform point is independent")
}

/// `(a, b) ↦ (ab, a(1−b), (1−a)b, (1−a)(1−b))`.
fn segre_parametric() -> ParametricModel {
    let a = Polynomial::var(2, 0);
    let b = Polynomial::var(2, 1);
    let one = Polynomial::constant(2, 1.0);
    let na = &one - &a;
    let nb = &one - &b;
    let map = vec![&a * &b, &a * &nb, &na * &b, &na * &nb];
    ParametricModel::new(map, vec![(0.0, 1.0), (0.0, 1.0)]).expect("product map sums to 1")
}

fn cousin_implicit() -> ImplicitModel {
    let polys = vec![Polynomial::simplex(3), poly(3, &[(1.0, &[0, 2, 0]), (-1.0, &[1, 0, 1])])];
    ImplicitModel::with_sample_point(3, polys, cousin_point(1.0)).expect("curve point")
}

/// Point `(1, r, r²)/(1 + r + r²)` of the curve `x₂² = x₁x₃`.
pub fn cousin_point(r: f64) -> Vec<f64> {
    let s = 1.0 + r + r * r;
    vec![1.0 / s, r / s, r * r / s]
}

/// `(518/9375, 124/625, 192/625, 168/625, 86/625, 307/9375)`.
pub fn mixture_reference_point() -> Vec<f64> {
    vec![518.0 / 9375.0, 124.0 / 625.0, 192.0 / 625.0, 168.0 / 625.0, 86.0 / 625.0, 307.0 / 9375.0]
}

fn mixture_implicit() -> ImplicitModel {
    let polys = vec![
        Polynomial::simplex(6),
        poly(
            6,
            &[
                (20.0, &[1, 0, 1, 0, 1, 0]),
                (-10.0, &[1, 0, 0, 2, 0, 0]),
                (-8.0, &[0, 2, 0, 0, 1, 0]),
                (4.0, &[0, 1, 1, 1, 0, 0]),
                (-1.0, &[0, 0, 3, 0, 0, 0]),
            ],
        ),
        poly(
            6,
            &[
                (100.0, &[1, 0, 1, 0, 0, 1]),
                (-20.0, &[1, 0, 0, 1, 1, 0]),
                (-40.0, &[0, 2, 0, 0, 0, 1]),
                (4.0, &[0, 1, 1, 0, 1, 0]),
                (2.0, &[0, 1, 0, 2, 0, 0]),
                (-1.0, &[0, 0, 2, 1, 0, 0]),
            ],
        ),
        poly(
            6,
            &[
                (100.0, &[1, 0, 0, 1, 0, 1]),
                (-40.0, &[1, 0, 0, 0, 2, 0]),
                (-20.0, &[0, 1, 1, 0, 0, 1]),
                (4.0, &[0, 1, 0, 1, 1, 0]),
                (2.0, &[0, 0, 2, 0, 1, 0]),
                (-1.0, &[0, 0, 1, 2, 0, 0]),
            ],
        ),
        poly(
            6,
            &[
                (20.0, &[0, 1, 0, 1, 0, 1]),
                (-8.0, &[0, 1, 0, 0, 2, 0]),
                (-10.0, &[0, 0, 2, 0, 0, 1]),
                (4.0, &[0, 0, 1, 1, 1, 0]),
                (-1.0, &[0, 0, 0, 3, 0, 0]),
            ],
        ),
    ];
    ImplicitModel::with_sample_point(6, polys, mixture_reference_point()).expect("reference point on the mixture")
}

/// `(w, s, t) ↦ w·Bin(5, s) + (1 − w)·Bin(5, t)`, coordinate `k + 1` holding `k` heads.
fn mixture_parametric() -> ParametricModel {
    let w = Polynomial::var(3, 0);
    let s = Polynomial::var(3, 1);
    let t = Polynomial::var(3, 2);
    let one = Polynomial::constant(3, 1.0);
    let nw = &one - &w;
    let ns = &one - &s;
    let nt = &one - &t;
    let map = (0..=5u32)
        .map(|k| {
            let c = binomial(5, k as u64) as f64;
            let left = &(&s.pow(k) * &ns.pow(5 - k)) * &w;
            let right = &(&t.pow(k) * &nt.pow(5 - k)) * &nw;
            (&left + &right).scale(c)
        })
        .collect();
    ParametricModel::new(map, vec![(0.0, 1.0); 3]).expect("mixture map sums to 1")
}

/// `θ ↦ (θ/2, θ/2, 1 − θ)` on `0 ≤ θ ≤ 1`.
fn linear_example() -> LinearModel {
    LinearModel::new(vec![0.0, 0.0, 1.0], vec![vec![0.5], vec![0.5], vec![-1.0]], vec![(0.0, 1.0)])
        .expect("valid linear model")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_builds() {
        for name in catalog() {
            builtin_entry(name).unwrap();
        }
        assert!(matches!(builtin("nope"), Err(Error::UnknownModel(_))));
        assert!(matches!(builtin("grid(3)"), Err(Error::UnknownModel(_))));
        match builtin("grid(4,9)").unwrap() {
            Model::Finite(g) => assert_eq!(g.len(), 220),
            _ => panic!("grid is finite"),
        }
    }

    #[test]
    fn codimensions() {
        assert_eq!(twisted_cubic_implicit().codim(), 3);
        assert_eq!(segre_implicit().codim(), 2);
        assert_eq!(cousin_implicit().codim(), 2);
        assert_eq!(mixture_implicit().codim(), 3);
        assert_eq!(mixture_implicit().m(), 5);
    }

    #[test]
    fn twisted_cubic_matrix() {
        assert_eq!(twisted_cubic_toric().matrix(), &[vec![3, 2, 1, 0], vec![0, 1, 2, 3]]);
    }
}
