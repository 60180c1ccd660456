// Simulate a small heterogeneous universe and compare the realized
// volatility of the equal-weight portfolio with `σ̂ = √(Σ wᵢ²σᵢ²)`.

use gaugefin::gauge::TimeGrid;
use gaugefin::sim::{
    portfolio_dynamics, simulate, EnvironmentSeries, Functional, NoiseKind, ProcessSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 32;
    let vols: Vec<f64> = (0..n)
        .map(|i| 0.1 + 0.3 * i as f64 / (n - 1) as f64)
        .collect();
    let spec = ProcessSpec::new(
        n,
        Functional::uniform(n, 0.06),
        Functional::Constant(vols.clone()),
        NoiseKind::Normal,
    )?;
    let grid = TimeGrid::over(1.0, 52)?;
    let env = EnvironmentSeries::flat(grid, 1);

    let paths = simulate(&spec, &env, &grid, 2000, 11)?;
    let mean_terminal: f64 = paths.terminal(0).iter().sum::<f64>() / paths.n_paths() as f64;
    println!(
        "asset 0: E[s(T)] = {mean_terminal:.4} (exact {:.4})",
        0.06f64.exp()
    );

    let w = vec![1.0 / n as f64; n];
    let dynamics = portfolio_dynamics(&paths, &w, Some(&vols))?;
    println!(
        "equal-weight σ̂: realized {:.5}, analytic {:.5}",
        dynamics.realized_sigma,
        dynamics.analytic_sigma.unwrap()
    );
    Ok(())
}
