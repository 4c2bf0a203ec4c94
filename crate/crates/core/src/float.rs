//! Scalar abstraction shared by every kernel in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float as NumFloat, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the pricing and solver kernels are written against.
///
/// The associated constants carry the precision-dependent thresholds used by
/// the solvers, so the same code runs at `f32` and `f64` with sensible stopping
/// rules.
pub trait Float:
    NumFloat + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative solver tolerance (price and sigma) used by the default controls.
    const SOLVER_TOL: Self;
    /// Smallest magnitude treated as a meaningful positive quantity.
    const TINY: Self;
    /// Below this total volatility `sigma * sqrt(t)` the contract is priced as zero vol.
    const VOL_CUTOFF: Self;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn c(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 literal representable")
    }
}

impl Float for f64 {
    const SOLVER_TOL: Self = 1e-12;
    const TINY: Self = 1e-300;
    const VOL_CUTOFF: Self = 1e-12;
}

impl Float for f32 {
    const SOLVER_TOL: Self = 1e-5;
    const TINY: Self = 1e-36;
    const VOL_CUTOFF: Self = 1e-6;
}

#[inline]
pub(crate) fn c<T: Float>(v: f64) -> T {
    T::c(v)
}
