use crate::error::PricingError;
use crate::float::{c, Float};
use crate::model::OptionFlag;
use crate::normal::{inv_norm_cdf, FRAC_1_SQRT_2PI, SQRT_2PI};
use crate::special::{erf, erfcx};

use super::normalized::{normalize_quote, normalized_black, normalized_black_complement, normalized_vega};
use super::{SolveStatus, SolverResult};

/// Ratio between the interior anchors and the central total volatility.
const ANCHOR_RATIO: f64 = 0.5;
/// Below this |x| the quote is treated as at-the-money.
const ATM_X: f64 = 1e-12;
const STEP_TOL: f64 = 1e-14;
const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_251_2;

/// Initial-guess regimes, ordered by normalized price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionId {
    FarLow,
    NearLow,
    NearHigh,
    FarHigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Low,
    Middle,
    High,
}

impl RegionId {
    fn branch(self) -> Branch {
        match self {
            RegionId::FarLow => Branch::Low,
            RegionId::NearLow | RegionId::NearHigh => Branch::Middle,
            RegionId::FarHigh => Branch::High,
        }
    }
}

/// Anchor volatilities and prices around `s_c = sqrt(2|x|)` for a working
/// quote with `x < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchors<T> {
    pub x: T,
    pub s_lo: T,
    pub s_c: T,
    pub s_hi: T,
    pub b_lo: T,
    pub b_c: T,
    pub b_hi: T,
    pub b_max: T,
}

impl<T: Float> Anchors<T> {
    pub fn new(x: T) -> Self {
        let x = -x.abs();
        let s_c = (c::<T>(-2.0) * x).sqrt();
        let s_lo = s_c * c(ANCHOR_RATIO);
        let s_hi = s_c / c(ANCHOR_RATIO);
        Self {
            x,
            s_lo,
            s_c,
            s_hi,
            b_lo: normalized_black(x, s_lo),
            b_c: normalized_black(x, s_c),
            b_hi: normalized_black(x, s_hi),
            b_max: (c::<T>(0.5) * x).exp(),
        }
    }

    pub fn region(&self, beta: T) -> RegionId {
        if beta < self.b_lo {
            RegionId::FarLow
        } else if beta < self.b_c {
            RegionId::NearLow
        } else if beta < self.b_hi {
            RegionId::NearHigh
        } else {
            RegionId::FarHigh
        }
    }

    /// Volatility interval containing every root in `region`.
    pub fn bracket(&self, region: RegionId) -> (T, T) {
        match region {
            RegionId::FarLow => (T::zero(), self.s_lo),
            RegionId::NearLow => (self.s_lo, self.s_c),
            RegionId::NearHigh => (self.s_c, self.s_hi),
            RegionId::FarHigh => (self.s_hi, T::infinity()),
        }
    }

    fn guess(&self, beta: T, region: RegionId) -> T {
        let s0 = match region {
            RegionId::FarLow => self.far_low_guess(beta),
            RegionId::NearLow => self.near_low_guess(beta),
            RegionId::NearHigh => self.near_high_guess(beta),
            RegionId::FarHigh => self.far_high_guess(beta),
        };
        let (lo, hi) = self.bracket(region);
        if !(s0 > T::zero()) {
            if hi.is_finite() {
                c::<T>(0.5) * (lo + hi)
            } else {
                c::<T>(2.0) * lo
            }
        } else {
            s0.max(lo).min(hi)
        }
    }

    /// Solves the small-vol model `ln(s psi(x/s)) - s^2/8` calibrated at the
    /// lower anchor, where `psi(h) = phi(h) + h Phi(h)`.
    fn far_low_guess(&self, beta: T) -> T {
        let x = self.x;
        let model = |s: T| -> T {
            let h = x / s;
            (s * c::<T>(FRAC_1_SQRT_2PI) * shortfall_ratio(h)).ln() - c::<T>(0.5) * h * h - c::<T>(0.125) * s * s
        };
        let calib = self.b_lo.ln() - model(self.s_lo);
        let target = beta.ln();
        let asymptotic = -x / (c::<T>(-2.0) * target).sqrt();
        let mut hi = self.s_lo.ln();
        let mut lo = T::neg_infinity();
        let mut u = asymptotic.min(self.s_lo).ln();
        for _ in 0..32 {
            let s = u.exp();
            let w = (s / self.s_lo) * (s / self.s_lo);
            let f = model(s) + calib * w - target;
            if f.abs() < c(1e-4) {
                break;
            }
            if f < T::zero() {
                lo = u;
            } else {
                hi = u;
            }
            let slope = shortfall_ratio(x / s).recip() - c::<T>(0.25) * s * s + c::<T>(2.0) * calib * w;
            let next = u - f / slope;
            u = if next < hi && next > lo {
                next
            } else if lo.is_finite() {
                c::<T>(0.5) * (lo + hi)
            } else {
                hi - T::one()
            };
        }
        u.exp()
    }

    /// Cubic Hermite interpolation of `1/s` against `ln b` between the lower
    /// and central anchors.
    fn near_low_guess(&self, beta: T) -> T {
        let slope = |s: T, b: T| -(b / normalized_vega(self.x, s)) / (s * s);
        let y = hermite(
            (self.b_lo.ln(), self.s_lo.recip(), slope(self.s_lo, self.b_lo)),
            (self.b_c.ln(), self.s_c.recip(), slope(self.s_c, self.b_c)),
            beta.ln(),
        );
        y.recip()
    }

    /// Large-s tail inversion with a correction factor interpolated between
    /// the central and upper anchors.
    fn near_high_guess(&self, beta: T) -> T {
        let a_c = tail_vol(normalized_black_complement(self.x, self.s_c));
        let a_hi = tail_vol(normalized_black_complement(self.x, self.s_hi));
        let a = tail_vol(self.b_max - beta);
        let (r_c, r_hi) = (self.s_c / a_c, self.s_hi / a_hi);
        let w = (a - a_c) / (a_hi - a_c);
        a * (r_c + (r_hi - r_c) * w)
    }

    fn far_high_guess(&self, beta: T) -> T {
        let a_hi = tail_vol(normalized_black_complement(self.x, self.s_hi));
        let a = tail_vol(self.b_max - beta);
        let rho = self.s_hi / a_hi;
        let q = a_hi / a;
        a * (T::one() + (rho - T::one()) * q * q)
    }
}

/// `psi(h) / phi(h) = 1 + h Y(h)` with `Y = Phi / phi`.
fn shortfall_ratio<T: Float>(h: T) -> T {
    if h < c(-10.0) {
        let z = (h * h).recip();
        z * (T::one() + z * (c::<T>(-3.0) + z * (c::<T>(15.0) + z * c::<T>(-105.0))))
    } else {
        T::one() + h * c::<T>(SQRT_HALF_PI) * erfcx(-h * T::FRAC_1_SQRT_2())
    }
}

/// Inverse of the large-s asymptotic `b_max - b ~ 2 Phi(-s/2)`.
fn tail_vol<T: Float>(complement: T) -> T {
    match inv_norm_cdf(c::<T>(0.5) * complement) {
        Ok(z) => c::<T>(-2.0) * z,
        Err(_) => T::infinity(),
    }
}

fn hermite<T: Float>(p0: (T, T, T), p1: (T, T, T), u: T) -> T {
    let (u0, y0, d0) = p0;
    let (u1, y1, d1) = p1;
    let h = u1 - u0;
    let w = (u - u0) / h;
    let w2 = w * w;
    let w3 = w2 * w;
    let two = c::<T>(2.0);
    let three = c::<T>(3.0);
    (two * w3 - three * w2 + T::one()) * y0
        + (w3 - two * w2 + w) * h * d0
        + (three * w2 - two * w3) * y1
        + (w3 - w2) * h * d1
}

/// Region of a working quote `x < 0`, `beta` in `(0, e^{x/2})`.
pub fn select_region<T: Float>(x: T, beta: T) -> RegionId {
    Anchors::new(x).region(beta)
}

/// Starting total volatility for the Householder iteration.
///
/// At `|x| < 1e-12` this is the exact at-the-money inverse.
pub fn initial_guess<T: Float>(x: T, beta: T, region: RegionId) -> T {
    if x.abs() < c(ATM_X) {
        return atm_inverse(beta).unwrap_or_else(|_| T::nan());
    }
    Anchors::new(x).guess(beta, region)
}

/// Inverse of `b(0, s) = 2 Phi(s/2) - 1`.
pub fn atm_inverse<T: Float>(beta: T) -> Result<T, PricingError> {
    if !(beta > T::zero() && beta < T::one()) {
        return Err(PricingError::domain(format!("at-the-money beta must lie in (0, 1), got {beta}")));
    }
    if beta > c(0.5) {
        return Ok(c::<T>(-2.0) * inv_norm_cdf(c::<T>(0.5) * (T::one() - beta))?);
    }
    let s = if beta < c(1e-8) {
        beta * c(SQRT_2PI)
    } else {
        c::<T>(2.0) * inv_norm_cdf(c::<T>(0.5) * (T::one() + beta))?
    };
    // (1 + beta) / 2 rounds away relative precision of small beta.
    let f = erf(s * c::<T>(0.5) * T::FRAC_1_SQRT_2()) - beta;
    Ok(s - f / normalized_vega(T::zero(), s))
}

/// Transformed objective and its first three derivatives in `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective<T> {
    pub g: T,
    pub g1: T,
    pub g2: T,
    pub g3: T,
}

struct Evaluation<T> {
    objective: Objective<T>,
    /// Whether `s` lies above the root.
    above: bool,
}

fn evaluate<T: Float>(branch: Branch, x: T, s: T, beta: T, b_max: T) -> Evaluation<T> {
    let b1 = normalized_vega(x, s);
    let k = x * x / (s * s * s) - c::<T>(0.25) * s;
    let b2 = b1 * k;
    let b3 = b1 * (k * k - c::<T>(3.0) * x * x / (s * s * s * s) - c::<T>(0.25));
    match branch {
        Branch::Middle => {
            let b = normalized_black(x, s);
            Evaluation { objective: Objective { g: b - beta, g1: b1, g2: b2, g3: b3 }, above: b > beta }
        }
        Branch::Low => {
            let b = normalized_black(x, s);
            let l = b.ln();
            let (l1, r2, r3) = (b1 / b, b2 / b, b3 / b);
            let l2 = r2 - l1 * l1;
            let l3 = r3 - c::<T>(3.0) * l1 * r2 + c::<T>(2.0) * l1 * l1 * l1;
            let inv = l.recip();
            let inv2 = inv * inv;
            let objective = Objective {
                g: inv - beta.ln().recip(),
                g1: -l1 * inv2,
                g2: (c::<T>(2.0) * l1 * l1 * inv - l2) * inv2,
                g3: (c::<T>(6.0) * l1 * inv * (l2 - l1 * l1 * inv) - l3) * inv2,
            };
            Evaluation { objective, above: b > beta }
        }
        Branch::High => {
            let cmp = normalized_black_complement(x, s);
            let cmp_beta = b_max - beta;
            let (q1, q2, q3) = (b1 / cmp, b2 / cmp, b3 / cmp);
            let objective = Objective {
                g: (cmp_beta / cmp).ln(),
                g1: q1,
                g2: q2 + q1 * q1,
                g3: q3 + c::<T>(3.0) * q1 * q2 + c::<T>(2.0) * q1 * q1 * q1,
            };
            Evaluation { objective, above: cmp < cmp_beta }
        }
    }
}

/// Objective of `region` at total volatility `s` for the working quote
/// `(x, beta)`, `x <= 0`.
pub fn objective_branch<T: Float>(x: T, s: T, beta: T, region: RegionId) -> Objective<T> {
    let x = -x.abs();
    evaluate(region.branch(), x, s, beta, (c::<T>(0.5) * x).exp()).objective
}

/// Householder(3) correction. `None` when `g1 = 0` or the step is not finite.
pub fn householder3_step<T: Float>(g: T, g1: T, g2: T, g3: T) -> Option<T> {
    if g == T::zero() {
        return Some(T::zero());
    }
    if g1 == T::zero() {
        return None;
    }
    let nu = -g / g1;
    let eta = g2 / g1;
    let gamma = g3 / (c::<T>(6.0) * g1);
    let ds = nu * (T::one() + c::<T>(0.5) * nu * eta) / (T::one() + nu * (eta + nu * gamma));
    ds.is_finite().then_some(ds)
}

/// Iteration limits for [`implied_vol_lbr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LbrControls {
    pub max_iter: u32,
}

impl Default for LbrControls {
    fn default() -> Self {
        Self { max_iter: 8 }
    }
}

/// Implied volatility of a Black quote on forward `forward` via normalized
/// coordinates, region-wise initial guesses and Householder(3) steps.
///
/// `iterations` counts Householder steps. The status is
/// `FellBackToBisection` when some step had to be clipped to the bracket.
pub fn implied_vol_lbr<T: Float>(
    target: T,
    flag: OptionFlag,
    forward: T,
    strike: T,
    t: T,
    r: T,
    controls: &LbrControls,
) -> Result<SolverResult<T>, PricingError> {
    let quote = match normalize_quote(flag, forward, strike, t, r, target) {
        Ok(q) => q,
        Err(PricingError::BelowIntrinsic) => return Ok(SolverResult::failed(SolveStatus::BelowIntrinsic, 0)),
        Err(PricingError::AboveUpperBound) => return Ok(SolverResult::failed(SolveStatus::AboveUpperBound, 0)),
        Err(e) => return Err(e),
    };
    let x = quote.working_x;
    let beta = quote.working_beta;
    let b_max = quote.working_b_max();

    let (branch, s0, (mut lo, mut hi)) = if x.abs() < c(ATM_X) {
        let branch = if beta < c::<T>(0.5) * b_max { Branch::Middle } else { Branch::High };
        (branch, atm_inverse(beta)?, (T::zero(), T::infinity()))
    } else {
        let anchors = Anchors::new(x);
        let region = anchors.region(beta);
        (region.branch(), anchors.guess(beta, region), anchors.bracket(region))
    };

    let mut s = s0;
    let mut steps = 0u32;
    let mut clipped = false;
    // An anchor bound may sit within rounding of the root; the first step
    // across it lands on the anchor instead of the midpoint.
    let (mut lo_seen, mut hi_seen) = (lo == T::zero(), !hi.is_finite());
    let finish = |s: T, steps: u32, clipped: bool| {
        let scale = (forward * strike).sqrt() * (-r * t).exp();
        let status = if clipped { SolveStatus::FellBackToBisection } else { SolveStatus::Converged };
        Ok(SolverResult {
            sigma: s / t.sqrt(),
            iterations: steps,
            status,
            residual: (normalized_black(x, s) - beta) * scale,
        })
    };

    loop {
        let eval = evaluate(branch, x, s, beta, b_max);
        if eval.above {
            hi = hi.min(s);
        } else {
            lo = lo.max(s);
        }
        lo_seen |= s == lo;
        hi_seen |= s == hi;
        let obj = eval.objective;
        if obj.g == T::zero() {
            return finish(s, steps, clipped);
        }
        if steps >= controls.max_iter {
            return Ok(SolverResult::failed(SolveStatus::MaxIterations, steps));
        }
        steps += 1;
        let candidate = householder3_step(obj.g, obj.g1, obj.g2, obj.g3).map(|ds| s + ds);
        let next = match candidate {
            Some(n) if n >= lo && n <= hi && n > T::zero() => n,
            Some(n) if n > hi && !hi_seen => hi,
            Some(n) if n < lo && !lo_seen => lo,
            _ => {
                clipped = true;
                if hi.is_finite() {
                    c::<T>(0.5) * (lo + hi)
                } else {
                    c::<T>(2.0) * s.max(lo)
                }
            }
        };
        if (next - s).abs() <= c::<T>(STEP_TOL) * s.max(T::one()) {
            return finish(next, steps, clipped);
        }
        s = next;
    }
}
