use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vol_batch::{
    greeks_columns, iv_columns, iv_row, price_columns, BatchOptions, Contracts, GreekColumns, IvColumns,
};
use vol_core::{all_greeks, price, IvMethod, Model, OptionFlag, PricingInputs64};

struct Chain {
    flag: Vec<OptionFlag>,
    underlying: Vec<f64>,
    strike: Vec<f64>,
    t: Vec<f64>,
    r: Vec<f64>,
    q: Vec<f64>,
    sigma: Vec<f64>,
}

impl Chain {
    /// Deterministic pseudo-random chain, including a few degenerate rows.
    fn synthetic(n: usize) -> Self {
        let mut rng = StdRng::seed_from_u64(17);
        let mut next = move || rng.random::<f64>();
        let mut c = Chain {
            flag: Vec::with_capacity(n),
            underlying: Vec::with_capacity(n),
            strike: Vec::with_capacity(n),
            t: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            sigma: Vec::with_capacity(n),
        };
        for i in 0..n {
            c.flag.push(if next() < 0.5 { OptionFlag::Call } else { OptionFlag::Put });
            c.underlying.push(50.0 + 100.0 * next());
            c.strike.push(40.0 + 120.0 * next());
            c.t.push(if i % 997 == 0 { 0.0 } else { 0.01 + 3.0 * next() });
            c.r.push(-0.01 + 0.08 * next());
            c.q.push(0.04 * next());
            c.sigma.push(if i % 991 == 0 { 0.0 } else { 0.05 + 1.5 * next() });
        }
        c
    }

    fn contracts(&self) -> Contracts<'_> {
        Contracts { flag: &self.flag, underlying: &self.underlying, strike: &self.strike, t: &self.t, r: &self.r, q: &self.q }
    }

    fn inputs(&self, model: Model, i: usize) -> PricingInputs64 {
        PricingInputs64 {
            model,
            underlying: self.underlying[i],
            strike: self.strike[i],
            t: self.t[i],
            r: self.r[i],
            q: self.q[i],
            sigma: self.sigma[i],
        }
    }
}

const MODELS: [Model; 3] = [Model::Black76, Model::BlackScholes, Model::BlackScholesMerton];

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn greek_bits(g: &GreekColumns) -> Vec<Vec<u64>> {
    vec![bits(&g.delta), bits(&g.gamma), bits(&g.theta), bits(&g.rho), bits(&g.vega)]
}

fn iv_bits(c: &IvColumns) -> (Vec<u64>, Vec<vol_core::SolveStatus>, Vec<u32>) {
    (bits(&c.iv), c.status.clone(), c.iterations.clone())
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let chain = Chain::synthetic(40_000);
    let c = chain.contracts();
    for model in MODELS {
        let run = |w: usize| {
            let opts = BatchOptions::default().with_workers(w);
            let p = price_columns(model, &c, &chain.sigma, &opts).unwrap();
            let h = iv_columns(model, IvMethod::Halley, &c, &p, &opts).unwrap();
            let l = iv_columns(model, IvMethod::Lbr, &c, &p, &opts).unwrap();
            let g = greeks_columns(model, &c, &chain.sigma, &opts).unwrap();
            (bits(&p), iv_bits(&h), iv_bits(&l), greek_bits(&g))
        };
        let serial = run(1);
        for w in [2, 3, 8] {
            assert!(run(w) == serial, "{model} differs at W={w}");
        }
    }
}

#[test]
fn batch_matches_scalar_bit_for_bit() {
    let chain = Chain::synthetic(5_000);
    let c = chain.contracts();
    let opts = BatchOptions::default().with_workers(4);
    for model in MODELS {
        let p = price_columns(model, &c, &chain.sigma, &opts).unwrap();
        let g = greeks_columns(model, &c, &chain.sigma, &opts).unwrap();
        let ivs = [IvMethod::Halley, IvMethod::Lbr].map(|m| (m, iv_columns(model, m, &c, &p, &opts).unwrap()));
        for i in 0..chain.flag.len() {
            let inp = chain.inputs(model, i);
            let flag = chain.flag[i];
            assert_eq!(p[i].to_bits(), price(flag, &inp).unwrap().to_bits(), "price row {i}");
            match all_greeks(flag, &inp, &opts.greeks) {
                Ok(s) => {
                    let row = [g.delta[i], g.gamma[i], g.theta[i], g.rho[i], g.vega[i]];
                    assert_eq!(bits(&row), bits(&[s.delta, s.gamma, s.theta, s.rho, s.vega]), "greeks row {i}");
                }
                Err(_) => assert!(g.delta[i].is_nan() && g.vega[i].is_nan(), "row {i}"),
            }
            for (method, iv) in &ivs {
                let s = iv_row(*method, flag, &inp, p[i], &opts);
                assert_eq!((iv.iv[i].to_bits(), iv.status[i]), (s.sigma.to_bits(), s.status), "{method} row {i}");
            }
        }
    }
}

#[test]
fn well_posed_rows_recover_sigma() {
    let chain = Chain::synthetic(5_000);
    let c = chain.contracts();
    let opts = BatchOptions::default();
    let p = price_columns(Model::BlackScholesMerton, &c, &chain.sigma, &opts).unwrap();
    let iv = iv_columns(Model::BlackScholesMerton, IvMethod::Lbr, &c, &p, &opts).unwrap();
    let mut checked = 0;
    for i in 0..p.len() {
        let inp = chain.inputs(Model::BlackScholesMerton, i);
        let vega = vol_core::vega(&inp, &vol_core::GreekConventions::raw()).unwrap_or(0.0);
        // skip rows whose price carries no information about sigma at this precision
        if vega < 1e-3 * inp.underlying {
            continue;
        }
        checked += 1;
        assert!((iv.iv[i] - chain.sigma[i]).abs() <= 1e-8, "row {i}: {} vs {}", iv.iv[i], chain.sigma[i]);
    }
    assert!(checked > 3_000, "{checked}");
}
