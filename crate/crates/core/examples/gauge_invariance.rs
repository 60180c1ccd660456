// Observables that survive a price gauge `s → e^{φ(t)} s`: real returns
// and the gauge-invariant discount factor. The textbook discount factor
// picks up `e^{φ(0)−φ(T)}`.

use gaugefin::discount::{gauge_discount, textbook_discount};
use gaugefin::gauge::{
    real_return, transform_gauge_a, GaugeFieldA, GaugeScalar, RateSeries, TimeGrid,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = TimeGrid::over(5.0, 60)?;
    let prices: Vec<f64> = grid
        .times()
        .iter()
        .map(|t| (0.04 * t + 0.1 * (2.0 * t).sin()).exp())
        .collect();
    let a = GaugeFieldA::constant(grid, -0.03)?;
    let phi = GaugeScalar::from_fn(grid, |t| 0.2 * t + 0.05 * (3.0 * t).cos())?;

    let shifted: Vec<f64> = prices
        .iter()
        .zip(phi.values())
        .map(|(s, p)| s * p.exp())
        .collect();
    let a_shifted = transform_gauge_a(&a, &phi)?;
    let before = real_return(&grid, &prices, &a)?;
    let after = real_return(&grid, &shifted, &a_shifted)?;
    let drift = before
        .values()
        .iter()
        .zip(after.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    println!("real return moves by at most {drift:.1e}");

    let mu = RateSeries::constant(grid, 0.05)?;
    let sigma = RateSeries::constant(grid, 0.2)?;
    let mu_shifted = mu.zip_with(&phi.rate_series(), |m, p| m + p)?;
    println!(
        "gauge discount: {:.12} vs {:.12}",
        gauge_discount(&mu, &sigma, &a, 5.0)?,
        gauge_discount(&mu_shifted, &sigma, &a_shifted, 5.0)?
    );

    let r = RateSeries::constant(grid, 0.0406)?;
    let r_shifted = r.zip_with(&phi.rate_series(), |x, p| x + p)?;
    let ratio = textbook_discount(&r_shifted, 5.0)? / textbook_discount(&r, 5.0)?;
    let phi_t = phi.values()[grid.steps()];
    println!(
        "textbook ratio {ratio:.12} = e^(φ(0)−φ(T)) = {:.12}",
        (phi.values()[0] - phi_t).exp()
    );
    Ok(())
}
