//! Row-wise application of the scalar pricing, Greek and implied-volatility
//! routines over broadcast columns.
//!
//! Every column is a slice of length 1 (a scalar) or `N`. A failing row never
//! aborts the batch: its outputs are NaN and, for implied volatility, its
//! status records why.

use crate::error::BatchError;
use crate::pool::{default_workers, fill};
use crate::shape::{at, broadcast_named};
use vol_core::{
    all_greeks, implied_vol_halley, implied_vol_lbr, price, GreekConventions64, GreeksRecord64, HalleyControls64,
    IvMethod, LbrControls, Model, OptionFlag, PricingInputs64, SolveStatus, SolverResult64,
};

/// Contract columns shared by every batch operation.
#[derive(Debug, Clone, Copy)]
pub struct Contracts<'a> {
    pub flag: &'a [OptionFlag],
    /// Spot for the spot models, forward for Black-76.
    pub underlying: &'a [f64],
    pub strike: &'a [f64],
    pub t: &'a [f64],
    pub r: &'a [f64],
    /// Dividend yield; an empty slice means zero.
    pub q: &'a [f64],
}

#[derive(Debug, Clone, Copy)]
pub struct BatchOptions {
    pub workers: usize,
    pub halley: HalleyControls64,
    pub lbr: LbrControls,
    pub greeks: GreekConventions64,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            workers: default_workers(),
            halley: HalleyControls64::default(),
            lbr: LbrControls::default(),
            greeks: GreekConventions64::default(),
        }
    }
}

impl BatchOptions {
    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers: workers.max(1), ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IvColumns {
    pub iv: Vec<f64>,
    pub status: Vec<SolveStatus>,
    pub iterations: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GreekColumns {
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub theta: Vec<f64>,
    pub rho: Vec<f64>,
    pub vega: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Rule {
    Positive,
    NonNegative,
    Any,
}

impl<'a> Contracts<'a> {
    fn q_column(&self) -> &'a [f64] {
        if self.q.is_empty() {
            &[0.0]
        } else {
            self.q
        }
    }

    fn numeric(&self, extra: (&'static str, &'a [f64], Rule)) -> [(&'static str, &'a [f64], Rule); 6] {
        [
            ("underlying", self.underlying, Rule::Positive),
            ("strike", self.strike, Rule::Positive),
            ("t", self.t, Rule::NonNegative),
            ("r", self.r, Rule::Any),
            ("q", self.q_column(), Rule::Any),
            extra,
        ]
    }

    /// Broadcast length and full validation, with `extra` as the sigma or
    /// price column.
    fn check(&self, extra: (&'static str, &'a [f64], Rule)) -> Result<usize, BatchError> {
        let numeric = self.numeric(extra);
        let mut shapes = vec![("flag", self.flag.len())];
        shapes.extend(numeric.iter().map(|&(name, col, _)| (name, col.len())));
        let n = broadcast_named(&shapes)?;
        for i in 0..n {
            for &(name, col, rule) in &numeric {
                let v = at(col, i);
                if !v.is_finite() {
                    return Err(BatchError::NonFiniteInput { index: i, column: name.to_owned(), value: v });
                }
                let detail = match rule {
                    Rule::Positive if v <= 0.0 => "must be positive",
                    Rule::NonNegative if v < 0.0 => "must be non-negative",
                    _ => continue,
                };
                return Err(BatchError::Domain { index: i, column: name.to_owned(), detail: format!("{detail}, got {v}") });
            }
        }
        Ok(n)
    }

    fn inputs(&self, model: Model, i: usize, sigma: f64) -> PricingInputs64 {
        PricingInputs64 {
            model,
            underlying: at(self.underlying, i),
            strike: at(self.strike, i),
            t: at(self.t, i),
            r: at(self.r, i),
            q: at(self.q_column(), i),
            sigma,
        }
    }

    /// Validates the contract columns plus a volatility column.
    pub fn validate_with_sigma(&self, sigma: &'a [f64]) -> Result<usize, BatchError> {
        self.check(("sigma", sigma, Rule::NonNegative))
    }

    /// Validates the contract columns plus a price column. Prices only need to
    /// be finite; quotes outside the no-arbitrage band fail per row.
    pub fn validate_with_price(&self, price: &'a [f64]) -> Result<usize, BatchError> {
        self.check(("price", price, Rule::Any))
    }
}

pub fn price_columns(model: Model, c: &Contracts, sigma: &[f64], opts: &BatchOptions) -> Result<Vec<f64>, BatchError> {
    let n = c.validate_with_sigma(sigma)?;
    let mut out = vec![0.0; n];
    fill(&mut out, opts.workers, |i| price(at(c.flag, i), &c.inputs(model, i, at(sigma, i))).unwrap_or(f64::NAN));
    Ok(out)
}

/// One implied-volatility solve, exactly as the batch performs it.
pub fn iv_row(method: IvMethod, flag: OptionFlag, inputs: &PricingInputs64, target: f64, opts: &BatchOptions) -> SolverResult64 {
    let res = match method {
        IvMethod::Halley => implied_vol_halley(target, flag, inputs, &opts.halley),
        IvMethod::Lbr => implied_vol_lbr(target, flag, inputs.forward(), inputs.strike, inputs.t, inputs.r, &opts.lbr),
    };
    match res {
        Ok(r) if r.status.is_success() => r,
        Ok(r) => SolverResult64 { sigma: f64::NAN, ..r },
        // only a zero expiry reaches here after validation
        Err(_) => SolverResult64 { sigma: f64::NAN, iterations: 0, status: SolveStatus::MaxIterations, residual: f64::NAN },
    }
}

pub fn iv_columns(
    model: Model,
    method: IvMethod,
    c: &Contracts,
    price: &[f64],
    opts: &BatchOptions,
) -> Result<IvColumns, BatchError> {
    let n = c.validate_with_price(price)?;
    let blank = SolverResult64 { sigma: 0.0, iterations: 0, status: SolveStatus::Converged, residual: 0.0 };
    let mut rows = vec![blank; n];
    fill(&mut rows, opts.workers, |i| iv_row(method, at(c.flag, i), &c.inputs(model, i, 0.0), at(price, i), opts));
    Ok(IvColumns {
        iv: rows.iter().map(|r| r.sigma).collect(),
        status: rows.iter().map(|r| r.status).collect(),
        iterations: rows.iter().map(|r| r.iterations).collect(),
    })
}

/// Greeks per row. Rows at zero time or zero volatility, where the sensitivities
/// are undefined, come back as NaN in all five columns.
pub fn greeks_columns(model: Model, c: &Contracts, sigma: &[f64], opts: &BatchOptions) -> Result<GreekColumns, BatchError> {
    let n = c.validate_with_sigma(sigma)?;
    let nan = GreeksRecord64 { delta: f64::NAN, gamma: f64::NAN, theta: f64::NAN, rho: f64::NAN, vega: f64::NAN };
    let mut rows = vec![nan; n];
    fill(&mut rows, opts.workers, |i| {
        all_greeks(at(c.flag, i), &c.inputs(model, i, at(sigma, i)), &opts.greeks).unwrap_or(nan)
    });
    Ok(GreekColumns {
        delta: rows.iter().map(|g| g.delta).collect(),
        gamma: rows.iter().map(|g| g.gamma).collect(),
        theta: rows.iter().map(|g| g.theta).collect(),
        rho: rows.iter().map(|g| g.rho).collect(),
        vega: rows.iter().map(|g| g.vega).collect(),
    })
}
