use proptest::prelude::*;
use vol_core::{all_greeks, delta, price, GreekConventions, Model, OptionFlag, PricingInputs64};

const REL_TOL: f64 = 1e-6;

fn step(v: f64) -> f64 {
    1e-5 * v.abs().max(1.0)
}

/// Central difference and the rounding floor of that difference.
fn central(f: impl Fn(f64) -> f64, at: f64) -> (f64, f64) {
    let h = step(at);
    let (up, dn) = (f(at + h), f(at - h));
    ((up - dn) / (2.0 * h), 4.0 * f64::EPSILON * up.abs().max(dn.abs()) / h)
}

fn close(analytic: f64, (fd, floor): (f64, f64)) -> bool {
    (analytic - fd).abs() <= REL_TOL * analytic.abs().max(fd.abs()) + floor
}

fn scaled((fd, floor): (f64, f64), k: f64) -> (f64, f64) {
    (fd * k, floor * k.abs())
}

fn contract() -> impl Strategy<Value = (OptionFlag, PricingInputs64)> {
    (
        prop_oneof![Just(OptionFlag::Call), Just(OptionFlag::Put)],
        prop_oneof![Just(Model::Black76), Just(Model::BlackScholes), Just(Model::BlackScholesMerton)],
        50.0f64..150.0,
        -2.5f64..2.5,
        0.1f64..3.0,
        -0.01f64..0.08,
        0.0f64..0.05,
        0.1f64..0.6,
    )
        .prop_map(|(flag, model, underlying, z, t, r, q, sigma)| {
            let q = if model == Model::BlackScholesMerton { q } else { 0.0 };
            let inputs = PricingInputs64 { model, underlying, strike: underlying, t, r, q, sigma };
            // strike placed z standard deviations from the forward
            let strike = inputs.forward() * (z * sigma * t.sqrt()).exp();
            (flag, PricingInputs64 { strike, ..inputs })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn greeks_match_central_differences((flag, inp) in contract()) {
        let conv = GreekConventions::default();
        let g = all_greeks(flag, &inp, &conv).unwrap();
        let pv = |i: PricingInputs64| price(flag, &i).unwrap();

        let fd_delta = central(|s| pv(PricingInputs64 { underlying: s, ..inp }), inp.underlying);
        prop_assert!(close(g.delta, fd_delta), "delta {} vs {:?}", g.delta, fd_delta);

        let fd_gamma = central(|s| delta(flag, &PricingInputs64 { underlying: s, ..inp }).unwrap(), inp.underlying);
        prop_assert!(close(g.gamma, fd_gamma), "gamma {} vs {:?}", g.gamma, fd_gamma);

        let fd_theta = scaled(central(|t| pv(PricingInputs64 { t, ..inp }), inp.t), -1.0 / 365.0);
        prop_assert!(close(g.theta, fd_theta), "theta {} vs {:?}", g.theta, fd_theta);

        let fd_rho = scaled(central(|r| pv(PricingInputs64 { r, ..inp }), inp.r), 0.01);
        prop_assert!(close(g.rho, fd_rho), "rho {} vs {:?}", g.rho, fd_rho);

        let fd_vega = scaled(central(|sigma| pv(inp.with_sigma(sigma)), inp.sigma), 0.01);
        prop_assert!(close(g.vega, fd_vega), "vega {} vs {:?}", g.vega, fd_vega);
    }
}
