//! Normalized Black coordinates.
//!
//! A quote is mapped to log-moneyness `x = ln(F/K)`, total volatility
//! `s = sigma sqrt(t)` and normalized price `beta = price e^{rt} / sqrt(FK)`.
//! The call price becomes
//!
//! ```text
//! b(x, s) = e^{x/2} Phi(x/s + s/2) - e^{-x/2} Phi(x/s - s/2)
//! ```
//!
//! Out-of-the-money calls (`x <= 0`) are the working case; every other quote is
//! reduced to one by put-call parity and the reflection `b_put(x, s) = b_call(-x, s)`.

use crate::error::PricingError;
use crate::float::{c, Float};
use crate::model::OptionFlag;
use crate::normal::{norm_cdf, FRAC_1_SQRT_2PI};
use crate::special::erfcx;

/// Below this half total volatility the odd Taylor expansion in `s/2` is used.
const SERIES_HALF_VOL: f64 = 0.25;
/// Forward recursion for the Mills-ratio derivatives is used for `h >= -3`.
const FORWARD_RECURSION_H: f64 = -3.0;
/// Highest odd derivative the expansion may use.
const SERIES_ORDER: usize = 23;
/// sqrt(pi/2)
const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_251_2;

/// `exp(-(h^2 + t^2)/2)` with `h = x/s`, `t = s/2`.
///
/// The exponent can reach several hundred, so the rounding of `h` and `h^2` is
/// carried separately to keep the result accurate to a few ulps of the inputs.
#[inline]
pub(crate) fn gaussian_factor<T: Float>(x: T, s: T) -> T {
    let h = x / s;
    let h_err = (-h).mul_add(s, x) / s;
    let hh = h * h;
    let hh_err = h.mul_add(h, -hh);
    let t = c::<T>(0.5) * s;
    let low = hh_err + c::<T>(2.0) * h * h_err + t * t;
    (c::<T>(-0.5) * hh).exp() * (c::<T>(-0.5) * low).exp()
}

/// `Phi(h)/phi(h)` for `h <= 0`.
#[inline]
fn mills<T: Float>(h: T) -> T {
    c::<T>(SQRT_HALF_PI) * erfcx(-h * T::FRAC_1_SQRT_2())
}

/// `2 * sum_{k odd} Y^{(k)}(h) t^k / k!` where `Y = Phi/phi`.
///
/// `Y^{(k)}(h) = int_0^inf u^k e^{hu - u^2/2} du > 0` obeys
/// `Y^{(n+1)} = n Y^{(n-1)} + h Y^{(n)}`. The forward recursion loses digits for
/// strongly negative `h`, where the ratios `Y^{(n)}/Y^{(n-1)}` are taken from the
/// backward continued fraction instead.
fn odd_series<T: Float>(h: T, t: T) -> T {
    let mut derivs = [T::zero(); SERIES_ORDER + 1];
    derivs[0] = mills(h);
    if h >= c(FORWARD_RECURSION_H) {
        derivs[1] = T::one() + h * derivs[0];
        for n in 1..SERIES_ORDER {
            derivs[n + 1] = c::<T>(n as f64) * derivs[n - 1] + h * derivs[n];
        }
    } else {
        let hf = h.to_f64().unwrap_or(f64::NEG_INFINITY);
        let depth = SERIES_ORDER + 20 + (600.0 / (hf * hf)).ceil() as usize;
        let mut ratio = T::zero();
        let mut ratios = [T::zero(); SERIES_ORDER + 1];
        for n in (1..=depth).rev() {
            ratio = c::<T>(n as f64) / (ratio - h);
            if n <= SERIES_ORDER {
                ratios[n] = ratio;
            }
        }
        for n in 1..=SERIES_ORDER {
            derivs[n] = ratios[n] * derivs[n - 1];
        }
    }
    let t2 = t * t;
    let mut power = t;
    let mut factorial = T::one();
    let mut sum = T::zero();
    let mut k = 1;
    while k <= SERIES_ORDER {
        let term = derivs[k] * power / factorial;
        sum = sum + term;
        if term <= T::epsilon() * c::<T>(0.01) * sum {
            break;
        }
        power = power * t2;
        factorial = factorial * c::<T>(((k + 1) * (k + 2)) as f64);
        k += 2;
    }
    c::<T>(2.0) * sum
}

/// Normalized out-of-the-money call price `b(x, s)` for `x <= 0`.
///
/// For `x > 0` the in-the-money call value (intrinsic plus the reflected
/// out-of-the-money value) is returned. `s <= 0` gives the intrinsic value.
pub fn normalized_black<T: Float>(x: T, s: T) -> T {
    if x > T::zero() {
        return normalized_intrinsic(OptionFlag::Call, x) + normalized_black(-x, s);
    }
    if !(s > T::zero()) {
        return T::zero();
    }
    if s.is_infinite() {
        return (c::<T>(0.5) * x).exp();
    }
    let h = x / s;
    let t = c::<T>(0.5) * s;
    if t < c(SERIES_HALF_VOL) {
        c::<T>(FRAC_1_SQRT_2PI) * gaussian_factor(x, s) * odd_series(h, t)
    } else if h + t < T::zero() {
        let r = T::FRAC_1_SQRT_2();
        c::<T>(0.5) * gaussian_factor(x, s) * (erfcx(-(h + t) * r) - erfcx(-(h - t) * r))
    } else {
        let half_x = c::<T>(0.5) * x;
        half_x.exp() * norm_cdf(h + t) - (-half_x).exp() * norm_cdf(h - t)
    }
}

/// `b_max - b(x, s)` for `x <= 0`, evaluated without cancellation.
pub fn normalized_black_complement<T: Float>(x: T, s: T) -> T {
    let cap = (c::<T>(0.5) * x).exp();
    if !(s > T::zero()) {
        return cap;
    }
    let b = normalized_black(x, s);
    if b < c::<T>(0.5) * cap {
        return cap - b;
    }
    let h = x / s;
    let t = c::<T>(0.5) * s;
    let r = T::FRAC_1_SQRT_2();
    c::<T>(0.5) * gaussian_factor(x, s) * (erfcx((h + t) * r) + erfcx((t - h) * r))
}

/// Normalized vega `db/ds = e^{x/2} phi(x/s + s/2)`.
pub fn normalized_vega<T: Float>(x: T, s: T) -> T {
    if !(s > T::zero()) {
        return T::zero();
    }
    c::<T>(FRAC_1_SQRT_2PI) * gaussian_factor(x, s)
}

/// Normalized intrinsic value `max(theta (e^{x/2} - e^{-x/2}), 0)`.
#[inline]
pub fn normalized_intrinsic<T: Float>(flag: OptionFlag, x: T) -> T {
    let theta_x = flag.theta::<T>() * x;
    if theta_x <= T::zero() {
        T::zero()
    } else {
        c::<T>(2.0) * (c::<T>(0.5) * theta_x).sinh()
    }
}

/// A quote in normalized coordinates together with its out-of-the-money call
/// reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedQuote<T> {
    pub flag: OptionFlag,
    /// `ln(F/K)` of the original quote.
    pub x: T,
    /// Normalized price of the original quote.
    pub beta: T,
    /// Normalized intrinsic value of the original quote.
    pub intrinsic: T,
    /// Normalized upper bound `e^{theta x / 2}` of the original quote.
    pub b_max: T,
    /// Log-moneyness of the working out-of-the-money call, always `<= 0`.
    pub working_x: T,
    /// Normalized price of the working out-of-the-money call.
    pub working_beta: T,
}

impl<T: Float> NormalizedQuote<T> {
    /// Upper bound of the working quote, `e^{working_x / 2} <= 1`.
    pub fn working_b_max(&self) -> T {
        (c::<T>(0.5) * self.working_x).exp()
    }
}

/// Maps a quote to normalized coordinates and reduces it to an
/// out-of-the-money call. The solution `s` is shared by the original and the
/// working quote.
pub fn normalize_quote<T: Float>(
    flag: OptionFlag,
    forward: T,
    strike: T,
    t: T,
    r: T,
    price: T,
) -> Result<NormalizedQuote<T>, PricingError> {
    if !(forward.is_finite() && forward > T::zero() && strike.is_finite() && strike > T::zero()) {
        return Err(PricingError::domain("forward and strike must be positive"));
    }
    if !(t.is_finite() && t > T::zero()) {
        return Err(PricingError::domain("time to expiry must be positive"));
    }
    if !(r.is_finite() && price.is_finite()) {
        return Err(PricingError::domain("rate and price must be finite"));
    }
    let x = (forward / strike).ln();
    let beta = price * (r * t).exp() / (forward * strike).sqrt();
    let intrinsic = normalized_intrinsic(flag, x);
    let b_max = (c::<T>(0.5) * flag.theta::<T>() * x).exp();
    // The lower guard scales with the intrinsic value so that out-of-the-money
    // quotes stay invertible down to the smallest normal numbers.
    let eps = c::<T>(1e-15);
    if beta <= intrinsic * (T::one() + eps) {
        return Err(PricingError::BelowIntrinsic);
    }
    if beta >= b_max * (T::one() - eps) {
        return Err(PricingError::AboveUpperBound);
    }
    Ok(NormalizedQuote {
        flag,
        x,
        beta,
        intrinsic,
        b_max,
        working_x: -x.abs(),
        working_beta: beta - intrinsic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // mpmath, 40 digits
    const REFERENCE: [(f64, f64, f64); 11] = [
        (0.0, 0.2, 0.079_655_674_554_057_967_338),
        (-0.5, 0.4, 0.019_960_509_897_655_521_99),
        (-8.0, 0.3, 6.361_838_192_424_413_023_5e-159),
        (-1.0, 0.03, 5.706_160_297_273_786_479_2e-247),
        (-0.01, 0.0003, 5.706_801_063_919_860_352_3e-249),
        (-10.0, 0.3, 5.643_072_956_996_988_149_7e-246),
        (-10.0, 5.0, 0.004_154_778_013_882_376_542_2),
        (-0.001, 0.001, 8.331_546_397_705_101_508_6e-5),
        (-3.0, 2.5, 0.084_002_172_210_340_093_636),
        (-36.0, 1.0, 1.023_940_463_487_151_996_1e-285),
        (-0.0001, 0.001, 3.509_353_148_112_488_643_6e-4),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for (x, s, want) in REFERENCE {
            let got = normalized_black(x, s);
            assert!(((got - want) / want).abs() <= 1e-13, "b({x}, {s}) = {got:e}, want {want:e}");
        }
    }

    #[test]
    fn complement_matches_reference() {
        for (x, s, want) in REFERENCE {
            let cap = (0.5 * x).exp();
            let got = normalized_black_complement(x, s);
            assert!(((got - (cap - want)) / (cap - want)).abs() <= 1e-13, "x={x} s={s}");
        }
        // deep saturation: cap - b ~ 2 Phi(-s/2)
        let got = normalized_black_complement(0.0f64, 40.0);
        let want = 2.0 * norm_cdf(-20.0);
        assert!(((got - want) / want).abs() < 1e-13);
    }

    #[test]
    fn limits() {
        assert_eq!(normalized_black(-1.0, 0.0), 0.0);
        assert!(normalized_black(-1.0, 1e-3) == 0.0 || normalized_black(-1.0, 1e-3) < 1e-300);
        assert!((normalized_black(-1.0, 60.0) - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(normalized_black(-1.0, f64::INFINITY), (-0.5f64).exp());
    }

    #[test]
    fn normalize_atm_example() {
        let q = normalize_quote(OptionFlag::Call, 100.0f64, 100.0, 1.0, 0.0, 7.965_567_4).unwrap();
        assert_eq!(q.x, 0.0);
        assert!((q.beta - 0.079_655_674).abs() < 1e-15);
        assert_eq!(q.working_x, 0.0);
        assert_eq!(q.intrinsic, 0.0);
    }

    #[test]
    fn put_reflects_onto_working_call() {
        let (f, k) = (100.0 * 0.5f64.exp(), 100.0);
        let q = normalize_quote(OptionFlag::Put, f, k, 1.0, 0.0, 3.0).unwrap();
        assert!((q.x - 0.5).abs() < 1e-15);
        assert!((q.working_x + 0.5).abs() < 1e-15);
        assert_eq!(q.working_beta, q.beta);
    }

    #[test]
    fn boundary_quotes_are_rejected() {
        assert_eq!(normalize_quote(OptionFlag::Call, 100.0, 100.0, 1.0, 0.0, 0.0), Err(PricingError::BelowIntrinsic));
        assert_eq!(normalize_quote(OptionFlag::Call, 100.0, 100.0, 1.0, 0.0, 100.0), Err(PricingError::AboveUpperBound));
        assert_eq!(normalize_quote(OptionFlag::Put, 90.0, 100.0, 1.0, 0.0, 9.0), Err(PricingError::BelowIntrinsic));
        assert!(matches!(normalize_quote(OptionFlag::Put, 90.0, 100.0, 0.0, 0.0, 11.0), Err(PricingError::Domain(_))));
        let wing = normalize_quote(OptionFlag::Call, 100.0, 300.0, 1.0, 0.0, 1e-250).unwrap();
        assert!(wing.working_beta > 0.0 && wing.working_beta < 1e-250);
    }

    proptest! {
        #[test]
        fn below_cap_and_increasing(x in -10.0f64..0.0, s in 1e-3f64..5.0, frac in 1e-3f64..0.5) {
            let b = normalized_black(x, s);
            prop_assert!(b < (0.5 * x).exp());
            let b_up = normalized_black(x, s * (1.0 + frac));
            if b > 1e-300 {
                prop_assert!(b_up > b);
            }
        }

        #[test]
        fn itm_call_is_intrinsic_plus_otm(x in 0.01f64..5.0, s in 0.01f64..3.0) {
            let direct = x.exp().sqrt() * norm_cdf(x / s + s / 2.0) - (-x).exp().sqrt() * norm_cdf(x / s - s / 2.0);
            let reduced = normalized_black(x, s);
            prop_assert!(((direct - reduced) / direct).abs() < 1e-13);
        }
    }
}
