//! European option pricing, analytic Greeks and implied volatility.
//!
//! Every routine is generic over [`Float`] (implemented for `f32` and `f64`).
//! The `*64` aliases below fix the scalar to `f64`, which is what the batch
//! engine and the command line use.
//!
//! ```
//! use vol_core::{implied_vol_halley, price, HalleyControls, OptionFlag, PricingInputs, PricingInputs64};
//!
//! let inputs: PricingInputs64 = PricingInputs::black_scholes(100.0, 100.0, 0.25, 0.05, 0.2);
//! let p = price(OptionFlag::Call, &inputs).unwrap();
//! let iv = implied_vol_halley(p, OptionFlag::Call, &inputs, &HalleyControls::default()).unwrap();
//! assert!((iv.sigma - 0.2).abs() < 1e-10);
//! ```

#![allow(clippy::excessive_precision)]

mod error;
mod float;
mod greeks;
pub mod iv;
mod model;
pub mod normal;
pub mod special;

pub use error::PricingError;
pub use float::Float;
pub use greeks::{all_greeks, delta, gamma, rho, theta, vega, GreekConventions, GreekTerms, GreeksRecord};
pub use iv::{
    implied_vol_halley, implied_vol_lbr, normalize_quote, normalized_black, HalleyControls, IvMethod, LbrControls,
    NormalizedQuote, SolveStatus, SolverResult,
};
pub use model::{
    forward_cap, forward_intrinsic, price, price_black76, price_black_scholes, price_bsm, Model, OptionFlag,
    PricingInputs,
};
pub use normal::{inv_norm_cdf, norm_cdf, norm_pdf};

pub type Real = f64;
pub type PricingInputs64 = PricingInputs<f64>;
pub type GreeksRecord64 = GreeksRecord<f64>;
pub type GreekConventions64 = GreekConventions<f64>;
pub type SolverResult64 = SolverResult<f64>;
pub type HalleyControls64 = HalleyControls<f64>;
pub type NormalizedQuote64 = NormalizedQuote<f64>;
