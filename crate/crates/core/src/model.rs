//! Contract description and the Black-76 / Black-Scholes / Black-Scholes-Merton
//! pricing maps.
//!
//! All three models share one forward-form kernel: each is reduced to a
//! forward `F` and a discount factor `exp(-r t)`.

use std::fmt;
use std::str::FromStr;

use crate::error::PricingError;
use crate::float::{c, Float};
use crate::normal::norm_cdf;

/// Call/put indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptionFlag {
    Call,
    Put,
}

impl OptionFlag {
    /// `+1` for calls, `-1` for puts.
    #[inline]
    pub fn theta<T: Float>(self) -> T {
        match self {
            OptionFlag::Call => T::one(),
            OptionFlag::Put => -T::one(),
        }
    }

    /// Parses the single-byte encoding used by columnar callers.
    pub fn from_byte(b: u8) -> Result<Self, PricingError> {
        match b {
            b'c' | b'C' => Ok(OptionFlag::Call),
            b'p' | b'P' => Ok(OptionFlag::Put),
            other => Err(PricingError::BadFlag(String::from_utf8_lossy(&[other]).into_owned())),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            OptionFlag::Call => 'c',
            OptionFlag::Put => 'p',
        }
    }

    pub fn flip(self) -> Self {
        match self {
            OptionFlag::Call => OptionFlag::Put,
            OptionFlag::Put => OptionFlag::Call,
        }
    }
}

impl FromStr for OptionFlag {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.as_bytes() {
            [b] => OptionFlag::from_byte(*b).map_err(|_| PricingError::BadFlag(s.to_owned())),
            _ => Err(PricingError::BadFlag(s.to_owned())),
        }
    }
}

impl fmt::Display for OptionFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Pricing model. Black-76 reads the underlying as a forward, the two spot
/// models read it as a spot price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Black76,
    BlackScholes,
    BlackScholesMerton,
}

impl Model {
    pub fn is_spot(self) -> bool {
        !matches!(self, Model::Black76)
    }

    /// Short name used on the command line and in serialized output.
    pub fn name(self) -> &'static str {
        match self {
            Model::Black76 => "black",
            Model::BlackScholes => "bs",
            Model::BlackScholesMerton => "bsm",
        }
    }
}

impl FromStr for Model {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "black" | "black76" | "b76" => Ok(Model::Black76),
            "bs" | "black_scholes" | "blackscholes" => Ok(Model::BlackScholes),
            "bsm" | "black_scholes_merton" | "blackscholesmerton" => Ok(Model::BlackScholesMerton),
            other => Err(PricingError::domain(format!("unknown model {other:?}"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One European contract under a given model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricingInputs<T> {
    pub model: Model,
    /// Spot `S` for the spot models, forward `F` for Black-76.
    pub underlying: T,
    pub strike: T,
    /// Time to expiry in years.
    pub t: T,
    /// Continuously compounded rate.
    pub r: T,
    /// Continuous dividend yield; ignored unless the model is Black-Scholes-Merton.
    pub q: T,
    pub sigma: T,
}

impl<T: Float> PricingInputs<T> {
    pub fn black76(forward: T, strike: T, t: T, r: T, sigma: T) -> Self {
        Self { model: Model::Black76, underlying: forward, strike, t, r, q: T::zero(), sigma }
    }

    pub fn black_scholes(spot: T, strike: T, t: T, r: T, sigma: T) -> Self {
        Self { model: Model::BlackScholes, underlying: spot, strike, t, r, q: T::zero(), sigma }
    }

    pub fn bsm(spot: T, strike: T, t: T, r: T, q: T, sigma: T) -> Self {
        Self { model: Model::BlackScholesMerton, underlying: spot, strike, t, r, q, sigma }
    }

    pub fn with_sigma(mut self, sigma: T) -> Self {
        self.sigma = sigma;
        self
    }

    /// Dividend yield actually used by the model (zero for plain Black-Scholes).
    #[inline]
    pub fn dividend_yield(&self) -> T {
        match self.model {
            Model::BlackScholesMerton => self.q,
            _ => T::zero(),
        }
    }

    /// Forward price `F`.
    #[inline]
    pub fn forward(&self) -> T {
        match self.model {
            Model::Black76 => self.underlying,
            _ => self.underlying * ((self.r - self.dividend_yield()) * self.t).exp(),
        }
    }

    /// `exp(-r t)`.
    #[inline]
    pub fn discount(&self) -> T {
        (-self.r * self.t).exp()
    }

    /// Checks everything except sigma.
    pub fn validate_contract(&self) -> Result<(), PricingError> {
        if !(self.underlying.is_finite() && self.underlying > T::zero()) {
            return Err(PricingError::domain(format!("underlying must be positive, got {}", self.underlying)));
        }
        if !(self.strike.is_finite() && self.strike > T::zero()) {
            return Err(PricingError::domain(format!("strike must be positive, got {}", self.strike)));
        }
        if !(self.t.is_finite() && self.t >= T::zero()) {
            return Err(PricingError::domain(format!("time to expiry must be non-negative, got {}", self.t)));
        }
        if !self.r.is_finite() {
            return Err(PricingError::domain(format!("rate must be finite, got {}", self.r)));
        }
        if !self.q.is_finite() {
            return Err(PricingError::domain(format!("dividend yield must be finite, got {}", self.q)));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), PricingError> {
        self.validate_contract()?;
        if !(self.sigma.is_finite() && self.sigma >= T::zero()) {
            return Err(PricingError::domain(format!("volatility must be non-negative, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Undiscounted intrinsic value `max(theta (F - K), 0)`.
#[inline]
pub fn forward_intrinsic<T: Float>(flag: OptionFlag, forward: T, strike: T) -> T {
    (flag.theta::<T>() * (forward - strike)).max(T::zero())
}

/// Undiscounted upper bound: `F` for calls, `K` for puts.
#[inline]
pub fn forward_cap<T: Float>(flag: OptionFlag, forward: T, strike: T) -> T {
    match flag {
        OptionFlag::Call => forward,
        OptionFlag::Put => strike,
    }
}

/// Forward-form Black kernel; every model funnels through here.
pub(crate) fn black_kernel<T: Float>(flag: OptionFlag, forward: T, strike: T, t: T, discount: T, sigma: T) -> T {
    let intrinsic = forward_intrinsic(flag, forward, strike);
    let total_vol = sigma * t.sqrt();
    if total_vol < T::VOL_CUTOFF {
        return discount * intrinsic;
    }
    let theta = flag.theta::<T>();
    let d1 = ((forward / strike).ln() + c::<T>(0.5) * total_vol * total_vol) / total_vol;
    let d2 = d1 - total_vol;
    let undiscounted = theta * (forward * norm_cdf(theta * d1) - strike * norm_cdf(theta * d2));
    discount * undiscounted.max(intrinsic).min(forward_cap(flag, forward, strike))
}

/// Prices a validated contract.
pub fn price<T: Float>(flag: OptionFlag, inputs: &PricingInputs<T>) -> Result<T, PricingError> {
    inputs.validate()?;
    Ok(black_kernel(flag, inputs.forward(), inputs.strike, inputs.t, inputs.discount(), inputs.sigma))
}

/// Black-76 price of an option on a forward.
pub fn price_black76<T: Float>(flag: OptionFlag, forward: T, strike: T, t: T, r: T, sigma: T) -> Result<T, PricingError> {
    price(flag, &PricingInputs::black76(forward, strike, t, r, sigma))
}

/// Black-Scholes price on a non-dividend-paying spot.
pub fn price_black_scholes<T: Float>(flag: OptionFlag, spot: T, strike: T, t: T, r: T, sigma: T) -> Result<T, PricingError> {
    price(flag, &PricingInputs::black_scholes(spot, strike, t, r, sigma))
}

/// Black-Scholes-Merton price with continuous dividend yield `q`.
pub fn price_bsm<T: Float>(flag: OptionFlag, spot: T, strike: T, t: T, r: T, q: T, sigma: T) -> Result<T, PricingError> {
    price(flag, &PricingInputs::bsm(spot, strike, t, r, q, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use OptionFlag::{Call, Put};

    #[test]
    fn flags_parse_case_insensitively() {
        assert_eq!("c".parse::<OptionFlag>().unwrap(), Call);
        assert_eq!("C".parse::<OptionFlag>().unwrap(), Call);
        assert_eq!("p".parse::<OptionFlag>().unwrap(), Put);
        assert_eq!("P".parse::<OptionFlag>().unwrap(), Put);
        for bad in ["x", "", "call", "cp", " c"] {
            assert!(matches!(bad.parse::<OptionFlag>(), Err(PricingError::BadFlag(_))), "{bad:?}");
        }
        assert_eq!(Call.theta::<f64>(), 1.0);
        assert_eq!(Put.theta::<f64>(), -1.0);
    }

    #[test]
    fn black76_atm_identity() {
        let p = price_black76(Call, 100.0f64, 100.0, 1.0, 0.0, 0.2).unwrap();
        assert!((p - 7.965_567_455_405_796_7).abs() < 1e-12, "{p}");
    }

    #[test]
    fn zero_vol_and_zero_time_are_intrinsic() {
        assert_eq!(price_black76(Call, 100.0, 80.0, 1.0, 0.0, 0.0).unwrap(), 20.0);
        assert_eq!(price_black_scholes(Put, 90.0, 100.0, 0.0, 0.05, 0.3).unwrap(), 10.0);
        assert_eq!(price_black_scholes(Call, 90.0, 100.0, 0.0, 0.05, 0.3).unwrap(), 0.0);
        let p = price_bsm(Call, 100.0, 90.0, 1.0, 0.03, 0.01, 0.0).unwrap();
        let want = (-0.03f64).exp() * (100.0 * 0.02f64.exp() - 90.0);
        assert!((p - want).abs() < 1e-12);
        assert!(!p.is_nan());
    }

    #[test]
    fn black_scholes_reference() {
        let p = price_black_scholes(Call, 100.0f64, 100.0, 0.25, 0.05, 0.2).unwrap();
        assert!((p - 4.614_997_129_602_865_6).abs() < 1e-12, "{p}");
        let call = price_black_scholes(Call, 100.0, 105.0, 0.25, 0.05, 0.2).unwrap();
        let put = price_black_scholes(Put, 100.0f64, 105.0, 0.25, 0.05, 0.2).unwrap();
        assert!((put - 6.173_570_925_930_804_8).abs() < 1e-12);
        assert!((call - put - (100.0 - 105.0 * (-0.0125f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn bsm_equal_rates_reduce_to_discounted_atm() {
        let p = price_bsm(Call, 100.0f64, 100.0, 1.0, 0.05, 0.05, 0.2).unwrap();
        assert!((p - 7.577_082_146_427_272_9).abs() < 1e-12, "{p}");
    }

    #[test]
    fn bsm_deep_itm_call() {
        let p = price_bsm(Call, 100.0, 1e-8, 1.0, 0.05, 0.02, 0.3).unwrap();
        assert!((p - 100.0 * (-0.02f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(price_black76(Call, -1.0, 100.0, 1.0, 0.0, 0.2).is_err());
        assert!(price_black76(Call, 100.0, 0.0, 1.0, 0.0, 0.2).is_err());
        assert!(price_black76(Call, 100.0, 100.0, -1.0, 0.0, 0.2).is_err());
        assert!(price_black76(Call, 100.0, 100.0, 1.0, 0.0, -0.2).is_err());
        assert!(price_black76(Call, 100.0, 100.0, 1.0, f64::NAN, 0.2).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let p: f32 = price_black76(Call, 100.0f32, 100.0, 1.0, 0.0, 0.2).unwrap();
        assert!((p - 7.965_567).abs() < 1e-3);
    }

    fn contract() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64)> {
        (50.0..150.0f64, -1.5..1.5f64, 0.0..5.0f64, -0.05..0.1f64, -0.02..0.08f64, 0.0..2.0f64)
    }

    proptest! {
        #[test]
        fn bsm_with_zero_yield_is_black_scholes((s, x, t, r, _q, sigma) in contract()) {
            let k = s * x.exp();
            for flag in [Call, Put] {
                let a = price_bsm(flag, s, k, t, r, 0.0, sigma).unwrap();
                let b = price_black_scholes(flag, s, k, t, r, sigma).unwrap();
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn parity_and_bounds((s, x, t, r, q, sigma) in contract()) {
            let k = s * x.exp();
            for inputs in [
                PricingInputs::black76(s, k, t, r, sigma),
                PricingInputs::black_scholes(s, k, t, r, sigma),
                PricingInputs::bsm(s, k, t, r, q, sigma),
            ] {
                let call = price(Call, &inputs).unwrap();
                let put = price(Put, &inputs).unwrap();
                let f = inputs.forward();
                let df = inputs.discount();
                prop_assert!((call - put - df * (f - k)).abs() <= 1e-12 * (f + k));
                for (flag, p) in [(Call, call), (Put, put)] {
                    prop_assert!(p >= df * forward_intrinsic(flag, f, k));
                    prop_assert!(p <= df * forward_cap(flag, f, k));
                }
            }
        }

        #[test]
        fn price_nondecreasing_in_sigma((s, x, t, r, q, sigma) in contract(), bump in 1e-6..0.5f64) {
            let k = s * x.exp();
            for flag in [Call, Put] {
                let lo = price_bsm(flag, s, k, t, r, q, sigma).unwrap();
                let hi = price_bsm(flag, s, k, t, r, q, sigma + bump).unwrap();
                prop_assert!(hi >= lo);
                let inputs = PricingInputs::bsm(s, k, t, r, q, sigma);
                let (f, df) = (inputs.forward(), inputs.discount());
                let margin = 1e-10 * (f + k);
                let interior = lo - df * forward_intrinsic(flag, f, k) > margin
                    && df * forward_cap(flag, f, k) - hi > margin;
                if interior && bump >= 1e-3 {
                    prop_assert!(hi > lo);
                }
            }
        }
    }
}
