// Read the market gauge `A(t)` and trade-unit field `B_N` off a
// rebalanced portfolio, check the self-financing balances, and fix the
// gauge by expressing prices in units of that portfolio.

use gaugefin::gauge::{real_return, TimeGrid};
use gaugefin::riskfree::{
    balance_residuals, extract_market_gauge, to_riskfree_units, WeightVector,
};
use gaugefin::sim::{simulate, EnvironmentSeries, ProcessSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = TimeGrid::over(2.0, 104)?;
    let spec = ProcessSpec::homogeneous(20, 0.05, 0.2)?;
    let paths = simulate(&spec, &EnvironmentSeries::flat(grid, 1), &grid, 1, 3)?;
    let panel = paths.panel(0, (0..20).map(|i| format!("x{i}")).collect())?;
    let w = WeightVector::equal(20)?;

    let market = extract_market_gauge(&panel, &w)?;
    let mean_a = market.a.values().iter().sum::<f64>() / grid.steps() as f64;
    println!(
        "mean A = {mean_a:.4} per year; max |B_N| = {:.4}",
        market.b_n.max_abs()
    );

    let balance = balance_residuals(&panel, &market.quantities, &market.a, &market.b_n)?;
    println!(
        "largest balance residual: {:.2e}",
        balance.max_relative(&market.portfolio_value_series)
    );

    let rf_real = real_return(&grid, &market.portfolio_value_series, &market.a)?;
    println!(
        "risk-free real return max |r| = {:.2e}",
        rf_real.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    );

    let fixed = to_riskfree_units(&panel, &market.portfolio_value_series)?;
    let again = extract_market_gauge(&fixed, &w)?;
    println!(
        "after gauge fixing max |A'| = {:.2e}",
        again.a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    );
    Ok(())
}
