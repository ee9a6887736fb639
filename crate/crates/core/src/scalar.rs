use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point type the geometric kernels are written against: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Tolerance used when the caller does not pass one.
    fn default_tol() -> Self;

    /// Converts an `f64` literal. Panics only for values the type cannot hold at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_tol() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn default_tol() -> Self {
        1e-4
    }
}

pub(crate) fn max_abs<T: Scalar>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub(crate) fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub(crate) fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}
