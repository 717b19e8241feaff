//! Scalar abstraction used by all numeric kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar the toolkit is generic over (`f32` or `f64`).
///
/// Default tolerances are calibrated for `f64`; with `f32` pass explicit
/// tolerances wherever an operation accepts one.
pub trait Scalar: Float + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from an `f64` constant.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Scalars that additionally support the dense decompositions backed by
/// `nalgebra` (eigendecomposition, Cholesky, QR).
pub trait FactorScalar: Scalar + nalgebra::RealField {}

impl FactorScalar for f32 {}
impl FactorScalar for f64 {}
