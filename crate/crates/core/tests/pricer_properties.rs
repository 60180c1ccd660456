use gaugefin::gauge::{GaugeFieldA, GaugeScalar, RateSeries, TimeGrid};
use gaugefin::pricer::{bs_closed_form, solve_gauge_bs, Boundary, Payoff, PdeProblem, PriceGrid};

fn call(strike: f64, sigma: f64) -> PdeProblem {
    PdeProblem::european(Payoff::Call { strike }, sigma, 1.0).unwrap()
}

#[test]
fn put_call_parity_in_zero_rate_gauge() {
    let c = solve_gauge_bs(&call(100.0, 0.3)).unwrap();
    let p = solve_gauge_bs(&PdeProblem::european(Payoff::Put { strike: 100.0 }, 0.3, 1.0).unwrap())
        .unwrap();
    for (k, s) in c.s.iter().enumerate() {
        if (50.0..=200.0).contains(s) {
            let gap = c.values[(0, k)] - p.values[(0, k)] - (s - 100.0);
            assert!(gap.abs() < 1e-6, "s = {s}: {gap}");
        }
    }
}

#[test]
fn convex_payoffs_increase_with_volatility() {
    let mut last = bs_closed_form(100.0, 100.0, 0.0, 1.0);
    for sigma in [0.05, 0.1, 0.2, 0.4] {
        let v = solve_gauge_bs(&call(100.0, sigma)).unwrap().price(100.0);
        assert!(v > last, "σ = {sigma}: {v} <= {last}");
        last = v;
    }
}

#[test]
fn error_falls_at_second_order() {
    let exact = bs_closed_form(100.0, 100.0, 0.2, 1.0);
    let err = |n| {
        let p = PdeProblem::european_on(Payoff::Call { strike: 100.0 }, 0.2, 1.0, n, n).unwrap();
        (solve_gauge_bs(&p).unwrap().price(100.0) - exact).abs()
    };
    let ratio = err(200) / err(400);
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
}

#[test]
fn deterministic_price_gauge_is_covariant() {
    // Under s' = e^φ s the surface maps as V'(s', t) = e^{φ(t)} V(e^{−φ(t)} s', t)
    // when A' = A − φ̇ and the strike becomes e^{φ(T)} E.
    let base = call(100.0, 0.25);
    let grid = *base.t_grid();
    let a = GaugeFieldA::constant(grid, -0.03).unwrap();
    let phi = GaugeScalar::from_fn(grid, |t| 0.1 + 0.15 * t - 0.05 * (4.0 * t).sin()).unwrap();
    let phi_t = phi.values()[grid.steps()];
    let a2 = GaugeFieldA::new(
        grid,
        a.values()
            .iter()
            .zip(phi.rate())
            .map(|(a, p)| a - p)
            .collect(),
    )
    .unwrap();

    let v = solve_gauge_bs(&base.clone().with_a(&a).unwrap()).unwrap();
    let moved = call(100.0 * phi_t.exp(), 0.25).with_a(&a2).unwrap();
    let v2 = solve_gauge_bs(&moved).unwrap();
    let phi0 = phi.values()[0];
    for s in [80.0, 100.0, 125.0] {
        let lhs = v2.price(s * phi0.exp());
        let rhs = phi0.exp() * v.price(s);
        assert!((lhs / rhs - 1.0).abs() < 1e-3, "s = {s}: {lhs} vs {rhs}");
    }
}

#[test]
fn custom_payoff_matches_builtin_call() {
    let custom = Payoff::custom(|s| (s - 100.0f64).max(0.0), Boundary::Absorbing);
    let t_grid = TimeGrid::over(1.0, 400).unwrap();
    let problem = PdeProblem::new(
        PriceGrid::centered(100.0, 8.0, 400).unwrap(),
        t_grid,
        RateSeries::constant(t_grid, 0.2).unwrap(),
        custom,
    )
    .unwrap();
    let a = solve_gauge_bs(&problem).unwrap();
    let b = solve_gauge_bs(&call(100.0, 0.2)).unwrap();
    assert!((a.price(100.0) - b.price(100.0)).abs() < 1e-9);
}
