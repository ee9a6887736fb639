//! JSON polytope files: `{"vertices": [[..]], "h": {"A": .., "b": .., "E": .., "g": ..}}`,
//! both keys optional.

use serde::{Deserialize, Serialize};

use super::{HPolytope, VPolytope};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<HFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(rename = "E", default)]
    pub e: Vec<Vec<f64>>,
    #[serde(default)]
    pub g: Vec<f64>,
}

impl PolytopeFile {
    pub fn new(h: Option<&HPolytope<f64>>, v: Option<&VPolytope<f64>>) -> Self {
        PolytopeFile {
            vertices: v.map(|v| v.vertices.clone()),
            h: h.map(|h| HFile { a: h.ineq.row_vecs(), b: h.rhs.clone(), e: h.eq.row_vecs(), g: h.eq_rhs.clone() }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite numbers serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    fn width(&self) -> Option<usize> {
        self.vertices
            .as_ref()
            .and_then(|v| v.first().map(|x| x.len()))
            .or_else(|| self.h.as_ref().and_then(|h| h.a.first().or(h.e.first()).map(|r| r.len())))
    }

    pub fn v_polytope(&self) -> Result<Option<VPolytope<f64>>> {
        match &self.vertices {
            None => Ok(None),
            Some(v) => {
                let n = self.width().unwrap_or(0);
                VPolytope::new(n, v.clone()).map(Some)
            }
        }
    }

    pub fn h_polytope(&self) -> Result<Option<HPolytope<f64>>> {
        let Some(h) = &self.h else { return Ok(None) };
        let n = self.width().unwrap_or(0);
        let a = Matrix::from_rows(n, &h.a)?;
        let e = Matrix::from_rows(n, &h.e)?;
        HPolytope::new(a, h.b.clone(), e, h.g.clone()).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let h = HPolytope::simplex(3, 1.0);
        let v = super::super::vertices_of(&h, 1e-9).unwrap();
        let f = PolytopeFile::new(Some(&h), Some(&v));
        let back = PolytopeFile::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let h2 = back.h_polytope().unwrap().unwrap();
        assert_eq!(h2.ineq.rows(), 3);
        assert_eq!(h2.eq_rhs, vec![1.0]);
        assert_eq!(back.v_polytope().unwrap().unwrap().len(), 3);
    }

    #[test]
    fn optional_keys() {
        let f = PolytopeFile::from_json(r#"{"h": {"A": [[1.0], [-1.0]], "b": [1.0, 0.0]}}"#).unwrap();
        assert!(f.vertices.is_none());
        let h = f.h_polytope().unwrap().unwrap();
        assert_eq!(h.eq.rows(), 0);
        assert!(PolytopeFile::from_json("[1,2]").is_err());
        assert_eq!(PolytopeFile::from_json("{}").unwrap(), PolytopeFile::default());
    }
}
