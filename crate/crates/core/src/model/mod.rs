//! The model classes: implicit, toric, linear, finite grid and parametric.

mod builtin;
mod grid;
mod implicit;
mod linear;
mod parametric;
pub mod poly;
mod toric;

pub use builtin::{builtin, builtin_entry, catalog, cousin_point, mixture_reference_point, BuiltinEntry};
pub use grid::{binomial, FiniteGridModel};
pub use implicit::ImplicitModel;
pub use linear::LinearModel;
pub use parametric::ParametricModel;
pub use poly::{Monomial, PolyMap, Polynomial};
pub use toric::ToricModel;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform (Dirichlet(1, …, 1)) point of the open simplex.
pub fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1).max(1e-300)).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

#[derive(Clone, Debug)]
pub enum Model {
    Implicit(ImplicitModel),
    Toric(ToricModel),
    Linear(LinearModel),
    Finite(FiniteGridModel),
    Parametric(ParametricModel),
}

impl Model {
    pub fn n(&self) -> usize {
        match self {
            Model::Implicit(m) => m.n(),
            Model::Toric(m) => m.n(),
            Model::Linear(m) => m.n(),
            Model::Finite(m) => m.n(),
            Model::Parametric(m) => m.n(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Implicit(_) => "implicit",
            Model::Toric(_) => "toric",
            Model::Linear(_) => "linear",
            Model::Finite(_) => "finite",
            Model::Parametric(_) => "parametric",
        }
    }

    pub fn to_spec(&self) -> ModelSpec {
        fn enc(ps: &[Polynomial]) -> Vec<Vec<Monomial>> {
            ps.iter().map(|p| p.terms().to_vec()).collect()
        }
        match self {
            Model::Implicit(m) => ModelSpec::Implicit {
                n: m.n(),
                polynomials: enc(m.polynomials()),
                sample_point: Some(m.sample_point().to_vec()),
            },
            Model::Toric(m) => ModelSpec::Toric {
                matrix: m.matrix().to_vec(),
                weights: m.weights().iter().any(|&w| w != 1.0).then(|| m.weights().to_vec()),
            },
            Model::Linear(m) => ModelSpec::Linear {
                offset: m.offset().to_vec(),
                coefficients: m.coefficients().to_vec(),
                bounds: m.bounds().iter().map(|&(a, b)| [a, b]).collect(),
            },
            Model::Finite(m) => ModelSpec::Finite { n: m.n(), d: m.d() },
            Model::Parametric(m) => ModelSpec::Parametric {
                params: m.params(),
                map: enc(m.components()),
                domain: m.domain().iter().map(|&(a, b)| [a, b]).collect(),
            },
        }
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Model> {
        fn dec(nvars: usize, ps: &[Vec<Monomial>]) -> Result<Vec<Polynomial>> {
            ps.iter().map(|t| Polynomial::new(nvars, t.clone())).collect()
        }
        Ok(match spec {
            ModelSpec::Implicit { n, polynomials, sample_point } => {
                let polys = dec(*n, polynomials)?;
                Model::Implicit(match sample_point {
                    Some(p) => ImplicitModel::with_sample_point(*n, polys, p.clone())?,
                    None => ImplicitModel::new(*n, polys)?,
                })
            }
            ModelSpec::Toric { matrix, weights } => Model::Toric(match weights {
                Some(w) => ToricModel::with_weights(matrix.clone(), w.clone())?,
                None => ToricModel::new(matrix.clone())?,
            }),
            ModelSpec::Linear { offset, coefficients, bounds } => Model::Linear(LinearModel::new(
                offset.clone(),
                coefficients.clone(),
                bounds.iter().map(|b| (b[0], b[1])).collect(),
            )?),
            ModelSpec::Finite { n, d } => Model::Finite(FiniteGridModel::new(*n, *d)?),
            ModelSpec::Parametric { params, map, domain } => {
                if domain.len() != *params {
                    return Err(Error::InvalidModel("domain needs one interval per parameter".into()));
                }
                Model::Parametric(ParametricModel::new(
                    dec(*params, map)?,
                    domain.iter().map(|b| (b[0], b[1])).collect(),
                )?)
            }
        })
    }

    pub fn from_json(s: &str) -> Result<Model> {
        Model::from_spec(&ModelSpec::from_json(s)?)
    }
}

/// Serialised model description, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Implicit {
        n: usize,
        polynomials: Vec<Vec<Monomial>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_point: Option<Vec<f64>>,
    },
    Toric {
        matrix: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Linear {
        offset: Vec<f64>,
        coefficients: Vec<Vec<f64>>,
        bounds: Vec<[f64; 2]>,
    },
    Finite {
        n: usize,
        d: u64,
    },
    Parametric {
        params: usize,
        map: Vec<Vec<Monomial>>,
        domain: Vec<[f64; 2]>,
    },
}

impl ModelSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model specs serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn dirichlet_points_are_in_the_simplex() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = random_simplex_point(&mut rng, 5);
            assert!(p.iter().all(|&v| v > 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn spec_round_trip_for_every_builtin() {
        for name in catalog() {
            let m = builtin(name).unwrap();
            let json = m.to_spec().to_json();
            let spec = ModelSpec::from_json(&json).unwrap();
            assert_eq!(ModelSpec::from_json(&spec.to_json()).unwrap(), spec, "{name}");
            let back = Model::from_spec(&spec).unwrap();
            assert_eq!(back.to_spec(), m.to_spec(), "{name}");
        }
    }

    #[test]
    fn spec_parsing_errors() {
        assert!(ModelSpec::from_json(r#"{"kind": "cubic"}"#).is_err());
        assert!(ModelSpec::from_json(r#"{"kind": "finite", "n": 3}"#).is_err());
        let m = Model::from_json(r#"{"kind": "finite", "n": 3, "d": 4}"#).unwrap();
        assert_eq!(m.kind(), "finite");
        let bad = r#"{"kind": "toric", "matrix": [[1, 0], [0, 0]]}"#;
        assert!(Model::from_json(bad).is_err());
    }
}
