use crate::error::PricingError;
use crate::float::{c, Float};
use crate::model::{black_kernel, forward_cap, forward_intrinsic, OptionFlag, PricingInputs};
use crate::normal::norm_pdf;

use super::{SolveStatus, SolverResult};

const BRACKET_LO: f64 = 1e-9;
const BRACKET_HI: f64 = 10.0;
const BRACKET_CAP: f64 = 100.0;

/// Stopping rules for [`implied_vol_halley`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalleyControls<T> {
    /// Absolute price tolerance; `None` means `SOLVER_TOL * max(1, discounted cap)`.
    pub tol_price: Option<T>,
    /// Relative step tolerance on sigma.
    pub tol_sigma: T,
    pub max_halley: u32,
    pub max_bisect: u32,
}

impl<T: Float> Default for HalleyControls<T> {
    fn default() -> Self {
        Self { tol_price: None, tol_sigma: T::SOLVER_TOL, max_halley: 16, max_bisect: 128 }
    }
}

/// Residual and its first two sigma derivatives.
struct Eval<T> {
    f: T,
    vega: T,
    vomma: T,
}

struct Residual<T> {
    flag: OptionFlag,
    forward: T,
    strike: T,
    t: T,
    sqrt_t: T,
    discount: T,
    target: T,
}

impl<T: Float> Residual<T> {
    fn value(&self, sigma: T) -> T {
        black_kernel(self.flag, self.forward, self.strike, self.t, self.discount, sigma) - self.target
    }

    fn eval(&self, sigma: T) -> Eval<T> {
        let f = self.value(sigma);
        let total_vol = sigma * self.sqrt_t;
        if total_vol < T::VOL_CUTOFF {
            return Eval { f, vega: T::zero(), vomma: T::zero() };
        }
        let d1 = ((self.forward / self.strike).ln() + c::<T>(0.5) * total_vol * total_vol) / total_vol;
        let d2 = d1 - total_vol;
        let vega = self.discount * self.forward * norm_pdf(d1) * self.sqrt_t;
        Eval { f, vega, vomma: vega * d1 * d2 / sigma }
    }
}

/// Implied volatility by safeguarded Halley iteration on `price(sigma) - target`.
///
/// `inputs.sigma` is ignored. The root is kept inside a sign-change bracket
/// that starts at `[1e-9, 10]` and widens its upper end up to 100; any Halley
/// step that is non-finite, leaves the bracket or fails to shrink the residual
/// is replaced by a bisection step.
///
/// Quotes at or within the tolerance of the discounted intrinsic value are
/// reported as `BelowIntrinsic`; quotes above the discounted cap as
/// `AboveUpperBound`. Both carry a NaN sigma.
pub fn implied_vol_halley<T: Float>(
    target: T,
    flag: OptionFlag,
    inputs: &PricingInputs<T>,
    controls: &HalleyControls<T>,
) -> Result<SolverResult<T>, PricingError> {
    inputs.validate_contract()?;
    if !target.is_finite() {
        return Err(PricingError::domain(format!("target price must be finite, got {target}")));
    }
    let forward = inputs.forward();
    let discount = inputs.discount();
    let cap = discount * forward_cap(flag, forward, inputs.strike);
    let intrinsic = discount * forward_intrinsic(flag, forward, inputs.strike);
    let tol_price = controls.tol_price.unwrap_or_else(|| T::SOLVER_TOL * cap.max(T::one()));

    if target > cap + tol_price {
        return Ok(SolverResult::failed(SolveStatus::AboveUpperBound, 0));
    }
    if target <= intrinsic + tol_price {
        return Ok(SolverResult::failed(SolveStatus::BelowIntrinsic, 0));
    }

    let residual = Residual {
        flag,
        forward,
        strike: inputs.strike,
        t: inputs.t,
        sqrt_t: inputs.t.sqrt(),
        discount,
        target,
    };

    let mut lo = c::<T>(BRACKET_LO);
    let mut hi = c::<T>(BRACKET_HI);
    if residual.value(lo) >= T::zero() {
        hi = lo;
        lo = T::zero();
    } else {
        while residual.value(hi) < T::zero() {
            if hi >= c(BRACKET_CAP) {
                return Ok(SolverResult::failed(SolveStatus::MaxIterations, 0));
            }
            hi = (hi * c(2.0)).min(c(BRACKET_CAP));
        }
    }

    let guess = ((c::<T>(2.0) * T::PI() / inputs.t).sqrt() * target / inputs.underlying).max(c(0.05)).min(c(2.0));
    let mut sigma = if guess > lo && guess < hi { guess } else { c::<T>(0.5) * (lo + hi) };
    let mut cur = residual.eval(sigma);

    let mut halley_steps = 0u32;
    let mut bisect_steps = 0u32;
    let done = |sigma: T, f: T, halley: u32, bisect: u32| {
        let status = if bisect == 0 { SolveStatus::Converged } else { SolveStatus::FellBackToBisection };
        Ok(SolverResult { sigma, iterations: halley + bisect, status, residual: f })
    };

    loop {
        if cur.f < T::zero() {
            lo = sigma;
        } else {
            hi = sigma;
        }
        if cur.f == T::zero() {
            return done(sigma, cur.f, halley_steps, bisect_steps);
        }
        let step_tol = controls.tol_sigma * sigma.max(T::one());
        if hi - lo <= step_tol && cur.f.abs() <= tol_price {
            return done(sigma, cur.f, halley_steps, bisect_steps);
        }

        let mut next = None;
        if halley_steps < controls.max_halley {
            let denom = c::<T>(2.0) * cur.vega * cur.vega - cur.f * cur.vomma;
            let candidate = sigma - c::<T>(2.0) * cur.f * cur.vega / denom;
            if candidate.is_finite() && candidate >= lo && candidate <= hi {
                halley_steps += 1;
                if (candidate - sigma).abs() <= step_tol && cur.f.abs() <= tol_price {
                    return done(candidate, residual.value(candidate), halley_steps, bisect_steps);
                }
                let trial = residual.eval(candidate);
                if trial.f.abs() < cur.f.abs() {
                    next = Some((candidate, trial));
                } else if cur.f.abs() <= tol_price {
                    // Residual is already at its rounding floor.
                    return done(sigma, cur.f, halley_steps, bisect_steps);
                } else if trial.f < T::zero() {
                    lo = lo.max(candidate);
                } else {
                    hi = hi.min(candidate);
                }
            }
        }

        let (s, e) = match next {
            Some(accepted) => accepted,
            None => {
                if bisect_steps >= controls.max_bisect {
                    return Ok(SolverResult::failed(SolveStatus::MaxIterations, halley_steps + bisect_steps));
                }
                bisect_steps += 1;
                let mid = c::<T>(0.5) * (lo + hi);
                (mid, residual.eval(mid))
            }
        };
        sigma = s;
        cur = e;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::price;
    use OptionFlag::{Call, Put};

    fn solve(target: f64, flag: OptionFlag, inputs: &PricingInputs<f64>) -> SolverResult<f64> {
        implied_vol_halley(target, flag, inputs, &HalleyControls::default()).unwrap()
    }

    #[test]
    fn recovers_atm_call_quote() {
        let inputs = PricingInputs::black_scholes(100.0, 100.0, 0.25, 0.05, f64::NAN);
        let target = price(Call, &inputs.with_sigma(0.2)).unwrap();
        let res = solve(target, Call, &inputs);
        assert_eq!(res.status, SolveStatus::Converged);
        assert!((res.sigma - 0.2).abs() <= 1e-10, "{res:?}");
        assert!(res.residual.abs() <= 1e-12 * 100.0);
    }

    #[test]
    fn boundary_quotes() {
        let inputs = PricingInputs::black_scholes(100.0, 90.0, 0.5, 0.02, 0.0);
        let intrinsic = price(Call, &inputs).unwrap();
        let res = solve(intrinsic, Call, &inputs);
        assert_eq!(res.status, SolveStatus::BelowIntrinsic);
        assert!(res.sigma.is_nan());
        assert_eq!(solve(intrinsic - 1.0, Call, &inputs).status, SolveStatus::BelowIntrinsic);
        assert_eq!(solve(1.2 * 100.0, Call, &inputs).status, SolveStatus::AboveUpperBound);
        let put_cap = 90.0 * (-0.01f64).exp();
        assert_eq!(solve(1.2 * put_cap, Put, &inputs).status, SolveStatus::AboveUpperBound);
    }

    #[test]
    fn expired_contract_cannot_bracket() {
        let inputs = PricingInputs::black76(100.0, 100.0, 0.0, 0.0, 0.0);
        assert_eq!(solve(1.0, Call, &inputs).status, SolveStatus::MaxIterations);
    }

    #[test]
    fn high_vol_needs_bracket_expansion() {
        let inputs = PricingInputs::black76(100.0, 100.0, 0.01, 0.0, 0.0);
        let target = price(Call, &inputs.with_sigma(30.0)).unwrap();
        let res = solve(target, Call, &inputs);
        assert!(res.status.is_success(), "{res:?}");
        assert!((res.sigma - 30.0).abs() / 30.0 <= 1e-8);
    }

    #[test]
    fn rejects_non_finite_target() {
        let inputs = PricingInputs::black76(100.0, 100.0, 1.0, 0.0, 0.0);
        assert!(implied_vol_halley(f64::NAN, Call, &inputs, &HalleyControls::default()).is_err());
    }

    #[test]
    fn f32_solve() {
        let inputs = PricingInputs::black76(100.0f32, 110.0, 1.0, 0.01, 0.0);
        let target = price(Put, &inputs.with_sigma(0.3)).unwrap();
        let res = implied_vol_halley(target, Put, &inputs, &HalleyControls::default()).unwrap();
        assert!(res.status.is_success());
        assert!((res.sigma - 0.3).abs() < 1e-3);
    }
}
