use thiserror::Error;

/// Errors raised by the scalar pricing, Greek and inversion kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PricingError {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A sensitivity was requested at zero time or zero volatility, where the
    /// payoff kink makes the derivative undefined.
    #[error("sensitivity undefined at the payoff kink (zero time or zero volatility)")]
    StepFunctionEdge,
    /// The quote is below the intrinsic value of the contract.
    #[error("price is at or below intrinsic value")]
    BelowIntrinsic,
    /// The quote is at or above the maximum attainable option value.
    #[error("price is at or above the upper bound")]
    AboveUpperBound,
    /// An option flag other than c/C/p/P.
    #[error("unrecognised option flag {0:?} (expected \"c\" or \"p\")")]
    BadFlag(String),
}

impl PricingError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
}
