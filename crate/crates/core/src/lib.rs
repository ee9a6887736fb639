pub mod error;
pub mod linalg;
pub mod logcell;
pub mod logroot;
pub mod mle;
pub mod model;
pub mod polytope;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix64 = linalg::Matrix<f64>;
pub type HPolytope64 = polytope::HPolytope<f64>;
pub type VPolytope64 = polytope::VPolytope<f64>;
pub type LogRootPolytope64 = logroot::LogRootPolytope<f64>;
