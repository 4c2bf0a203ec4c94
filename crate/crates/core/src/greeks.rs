//! Analytic first and second order sensitivities.
//!
//! Every Greek is written as a method on [`GreekTerms`], which holds `d1`,
//! `d2`, `Phi(theta d1)`, `Phi(theta d2)` and `phi(d1)` for one contract. The
//! individual functions build the terms and call one method; [`all_greeks`]
//! builds them once and calls all five, so both paths are bit-identical.
//!
//! Black-76 is handled as a spot model on `F` with the carry equal to the rate
//! (`F e^{-rt}` plays the role of `S e^{-qt}`), except for rho where the
//! forward is held fixed.

use crate::error::PricingError;
use crate::float::{c, Float};
use crate::model::{forward_cap, forward_intrinsic, Model, OptionFlag, PricingInputs};
use crate::normal::{norm_cdf, norm_pdf};

/// Reporting scalings applied to theta, vega and rho.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreekConventions<T> {
    /// Report plain partial derivatives (no per-day or per-1% scaling).
    pub raw: bool,
    /// Theta is reported per `1 / days_per_year` of a year.
    pub days_per_year: T,
}

impl<T: Float> Default for GreekConventions<T> {
    fn default() -> Self {
        Self { raw: false, days_per_year: c(365.0) }
    }
}

impl<T: Float> GreekConventions<T> {
    pub fn raw() -> Self {
        Self { raw: true, ..Self::default() }
    }

    #[inline]
    fn per_day(&self, v: T) -> T {
        if self.raw {
            v
        } else {
            v / self.days_per_year
        }
    }

    #[inline]
    fn per_percent(&self, v: T) -> T {
        if self.raw {
            v
        } else {
            v / c(100.0)
        }
    }
}

/// The five reported sensitivities of one contract.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GreeksRecord<T> {
    pub delta: T,
    pub gamma: T,
    pub theta: T,
    pub rho: T,
    pub vega: T,
}

/// Shared intermediates for one contract.
#[derive(Debug, Clone, Copy)]
pub struct GreekTerms<T> {
    model: Model,
    theta_sign: T,
    underlying: T,
    strike: T,
    t: T,
    r: T,
    /// Carry yield: `q` for spot models, `r` for Black-76.
    carry: T,
    sqrt_t: T,
    sigma: T,
    forward: T,
    discount: T,
    carry_discount: T,
    d1: T,
    cdf_d1: T,
    cdf_d2: T,
    pdf_d1: T,
}

impl<T: Float> GreekTerms<T> {
    /// Fails with `StepFunctionEdge` at zero time or zero volatility.
    pub fn new(flag: OptionFlag, inputs: &PricingInputs<T>) -> Result<Self, PricingError> {
        inputs.validate()?;
        let sqrt_t = inputs.t.sqrt();
        let total_vol = inputs.sigma * sqrt_t;
        if total_vol < T::VOL_CUTOFF {
            return Err(PricingError::StepFunctionEdge);
        }
        let theta_sign = flag.theta::<T>();
        let forward = inputs.forward();
        let carry = match inputs.model {
            Model::Black76 => inputs.r,
            _ => inputs.dividend_yield(),
        };
        let d1 = ((forward / inputs.strike).ln() + c::<T>(0.5) * total_vol * total_vol) / total_vol;
        let d2 = d1 - total_vol;
        Ok(Self {
            model: inputs.model,
            theta_sign,
            underlying: inputs.underlying,
            strike: inputs.strike,
            t: inputs.t,
            r: inputs.r,
            carry,
            sqrt_t,
            sigma: inputs.sigma,
            forward,
            discount: inputs.discount(),
            carry_discount: (-carry * inputs.t).exp(),
            d1,
            cdf_d1: norm_cdf(theta_sign * d1),
            cdf_d2: norm_cdf(theta_sign * d2),
            pdf_d1: norm_pdf(d1),
        })
    }

    pub fn d1(&self) -> T {
        self.d1
    }

    pub fn d2(&self) -> T {
        self.d1 - self.sigma * self.sqrt_t
    }

    pub fn delta(&self) -> T {
        self.theta_sign * self.carry_discount * self.cdf_d1
    }

    pub fn gamma(&self) -> T {
        self.carry_discount * self.pdf_d1 / (self.underlying * self.sigma * self.sqrt_t)
    }

    /// `-dV/dt` in value per year.
    pub fn theta_raw(&self) -> T {
        let decay = -self.underlying * self.carry_discount * self.pdf_d1 * self.sigma / (c::<T>(2.0) * self.sqrt_t);
        decay
            - self.theta_sign
                * (self.r * self.strike * self.discount * self.cdf_d2
                    - self.carry * self.underlying * self.carry_discount * self.cdf_d1)
    }

    /// `dV/dr` per unit rate.
    pub fn rho_raw(&self) -> T {
        match self.model {
            Model::Black76 => -self.t * self.price(),
            _ => self.theta_sign * self.strike * self.t * self.discount * self.cdf_d2,
        }
    }

    /// `dV/dsigma` per unit volatility.
    pub fn vega_raw(&self) -> T {
        self.underlying * self.carry_discount * self.pdf_d1 * self.sqrt_t
    }

    /// Model value reconstructed from the shared terms.
    pub fn price(&self) -> T {
        let flag = if self.theta_sign > T::zero() { OptionFlag::Call } else { OptionFlag::Put };
        let undiscounted = self.theta_sign * (self.forward * self.cdf_d1 - self.strike * self.cdf_d2);
        let clamped = undiscounted
            .max(forward_intrinsic(flag, self.forward, self.strike))
            .min(forward_cap(flag, self.forward, self.strike));
        self.discount * clamped
    }

    pub fn record(&self, conv: &GreekConventions<T>) -> GreeksRecord<T> {
        GreeksRecord {
            delta: self.delta(),
            gamma: self.gamma(),
            theta: conv.per_day(self.theta_raw()),
            rho: conv.per_percent(self.rho_raw()),
            vega: conv.per_percent(self.vega_raw()),
        }
    }
}

/// Delta with respect to the underlying (forward delta for Black-76).
///
/// At zero time or zero volatility the payoff-kink limit is returned when the
/// contract is strictly in or out of the money.
pub fn delta<T: Float>(flag: OptionFlag, inputs: &PricingInputs<T>) -> Result<T, PricingError> {
    match GreekTerms::new(flag, inputs) {
        Ok(terms) => Ok(terms.delta()),
        Err(PricingError::StepFunctionEdge) => kink_delta(flag, inputs),
        Err(e) => Err(e),
    }
}

fn kink_delta<T: Float>(flag: OptionFlag, inputs: &PricingInputs<T>) -> Result<T, PricingError> {
    let forward = inputs.forward();
    let carry = match inputs.model {
        Model::Black76 => inputs.r,
        _ => inputs.dividend_yield(),
    };
    let full = (-carry * inputs.t).exp();
    let moneyness = forward - inputs.strike;
    if moneyness == T::zero() {
        return Err(PricingError::StepFunctionEdge);
    }
    let in_the_money = (flag.theta::<T>() * moneyness) > T::zero();
    Ok(if in_the_money { flag.theta::<T>() * full } else { T::zero() })
}

pub fn gamma<T: Float>(inputs: &PricingInputs<T>) -> Result<T, PricingError> {
    Ok(GreekTerms::new(OptionFlag::Call, inputs)?.gamma())
}

/// Calendar decay `-dV/dt`, per day unless `conv.raw`.
pub fn theta<T: Float>(flag: OptionFlag, inputs: &PricingInputs<T>, conv: &GreekConventions<T>) -> Result<T, PricingError> {
    Ok(conv.per_day(GreekTerms::new(flag, inputs)?.theta_raw()))
}

/// Rate sensitivity, per 1% move unless `conv.raw`.
pub fn rho<T: Float>(flag: OptionFlag, inputs: &PricingInputs<T>, conv: &GreekConventions<T>) -> Result<T, PricingError> {
    Ok(conv.per_percent(GreekTerms::new(flag, inputs)?.rho_raw()))
}

/// Volatility sensitivity, per 1% move unless `conv.raw`.
pub fn vega<T: Float>(inputs: &PricingInputs<T>, conv: &GreekConventions<T>) -> Result<T, PricingError> {
    Ok(conv.per_percent(GreekTerms::new(OptionFlag::Call, inputs)?.vega_raw()))
}

/// All five Greeks from a single evaluation of the shared terms.
pub fn all_greeks<T: Float>(
    flag: OptionFlag,
    inputs: &PricingInputs<T>,
    conv: &GreekConventions<T>,
) -> Result<GreeksRecord<T>, PricingError> {
    Ok(GreekTerms::new(flag, inputs)?.record(conv))
}
