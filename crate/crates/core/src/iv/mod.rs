//! Implied volatility.
//!
//! Two solvers share one result type: [`implied_vol_halley`] works on the
//! price residual directly, [`implied_vol_lbr`] works in normalized Black
//! coordinates with a Householder(3) iteration.

use std::fmt;
use std::str::FromStr;

use crate::error::PricingError;
use crate::float::Float;

mod halley;
mod lbr;
pub mod normalized;

pub use halley::{implied_vol_halley, HalleyControls};
pub use lbr::{
    atm_inverse, householder3_step, implied_vol_lbr, initial_guess, objective_branch, select_region, Anchors,
    LbrControls, Objective, RegionId,
};
pub use normalized::{
    normalize_quote, normalized_black, normalized_black_complement, normalized_intrinsic, normalized_vega,
    NormalizedQuote,
};

/// Outcome of one implied-volatility solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    /// Converged, but at least one bisection step replaced a rejected Newton-type step.
    FellBackToBisection,
    BelowIntrinsic,
    AboveUpperBound,
    MaxIterations,
}

impl SolveStatus {
    /// Whether the accompanying sigma may be used.
    pub fn is_success(self) -> bool {
        matches!(self, SolveStatus::Converged | SolveStatus::FellBackToBisection)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::FellBackToBisection => "bisection",
            SolveStatus::BelowIntrinsic => "below_intrinsic",
            SolveStatus::AboveUpperBound => "above_upper_bound",
            SolveStatus::MaxIterations => "max_iterations",
        }
    }

    /// Stable numeric code for columnar consumers.
    pub fn code(self) -> u8 {
        match self {
            SolveStatus::Converged => 0,
            SolveStatus::FellBackToBisection => 1,
            SolveStatus::BelowIntrinsic => 2,
            SolveStatus::AboveUpperBound => 3,
            SolveStatus::MaxIterations => 4,
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveStatus {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "converged" => SolveStatus::Converged,
            "bisection" => SolveStatus::FellBackToBisection,
            "below_intrinsic" => SolveStatus::BelowIntrinsic,
            "above_upper_bound" => SolveStatus::AboveUpperBound,
            "max_iterations" => SolveStatus::MaxIterations,
            other => return Err(PricingError::Domain(format!("unknown solver status {other:?}"))),
        })
    }
}

/// Implied volatility together with convergence information.
///
/// `sigma` is NaN unless `status.is_success()`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverResult<T> {
    pub sigma: T,
    pub iterations: u32,
    pub status: SolveStatus,
    /// Model price at `sigma` minus the target (NaN when no sigma was produced).
    pub residual: T,
}

impl<T: Float> SolverResult<T> {
    pub(crate) fn failed(status: SolveStatus, iterations: u32) -> Self {
        Self { sigma: T::nan(), iterations, status, residual: T::nan() }
    }
}

/// Solver selection for batch callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum IvMethod {
    #[default]
    Halley,
    Lbr,
}

impl FromStr for IvMethod {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "halley" => Ok(IvMethod::Halley),
            "lbr" | "jaeckel" | "rational" => Ok(IvMethod::Lbr),
            other => Err(PricingError::Domain(format!("unknown iv method {other:?}"))),
        }
    }
}

impl fmt::Display for IvMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IvMethod::Halley => "halley",
            IvMethod::Lbr => "lbr",
        })
    }
}
