//! Weighted-portfolio dynamics on simulated paths.

use rayon::prelude::*;

use super::process::{EnvironmentSeries, PathSet, ProcessSpec, Simulator};
use crate::error::{Error, Result};
use crate::gauge::{ReturnSeries, TimeGrid};

/// Realized returns of a constant-weight portfolio plus its volatility.
#[derive(Debug, Clone)]
pub struct PortfolioDynamics {
    /// Portfolio value per path, starting at `Σ wᵢ sᵢ(0)`.
    pub values: Vec<Vec<f64>>,
    /// Realized log-return rate per path.
    pub returns: Vec<ReturnSeries>,
    /// Volatility estimated from the cross-path dispersion of returns.
    pub realized_sigma: f64,
    /// `σ̂ = √(Σ wᵢ² σᵢ²)` when the asset volatilities are constant.
    pub analytic_sigma: Option<f64>,
}

/// `σ̂ = √(Σ wᵢ² σᵢ²)`.
pub fn analytic_sigma_hat(weights: &[f64], sigmas: &[f64]) -> f64 {
    weights
        .iter()
        .zip(sigmas)
        .map(|(w, s)| (w * s).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn check_weights(weights: &[f64], n_assets: usize) -> Result<()> {
    if weights.len() != n_assets {
        return Err(Error::Dimension {
            what: "weight vector",
            expected: n_assets,
            got: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "weights sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Portfolio rebalanced to `weights` at every step: `dΠ/Π = Σ wᵢ dsᵢ/sᵢ`.
pub fn portfolio_dynamics(
    paths: &PathSet,
    weights: &[f64],
    constant_sigmas: Option<&[f64]>,
) -> Result<PortfolioDynamics> {
    check_weights(weights, paths.n_assets())?;
    let grid = *paths.grid();
    let n = paths.n_assets();
    let values: Vec<Vec<f64>> = (0..paths.n_paths())
        .into_par_iter()
        .map(|p| {
            let mut v = Vec::with_capacity(grid.len());
            let mut pi: f64 = (0..n).map(|i| weights[i] * paths.price(p, 0, i)).sum();
            v.push(pi);
            for k in 0..grid.steps() {
                let growth: f64 = (0..n)
                    .map(|i| weights[i] * paths.price(p, k + 1, i) / paths.price(p, k, i))
                    .sum();
                pi *= growth;
                v.push(pi);
            }
            v
        })
        .collect();
    let returns = values
        .iter()
        .map(|v| crate::gauge::nominal_return(&grid, v))
        .collect::<Result<Vec<_>>>()?;
    let log_returns: Vec<Vec<f64>> = returns
        .iter()
        .map(|r| r.values().iter().map(|x| x * grid.dt()).collect())
        .collect();
    let realized_sigma = pooled_sigma(&log_returns, &grid);
    let analytic_sigma = match constant_sigmas {
        Some(s) => {
            if s.len() != n {
                return Err(Error::Dimension {
                    what: "volatility vector",
                    expected: n,
                    got: s.len(),
                });
            }
            Some(analytic_sigma_hat(weights, s))
        }
        None => None,
    };
    Ok(PortfolioDynamics {
        values,
        returns,
        realized_sigma,
        analytic_sigma,
    })
}

/// Volatility per √year from per-interval log returns `[path][step]`.
///
/// With several paths the variance at each step is taken across paths
/// (removing any time-varying drift); a single path falls back to the
/// time-series variance.
pub fn pooled_sigma(log_returns: &[Vec<f64>], grid: &TimeGrid) -> f64 {
    let n_paths = log_returns.len();
    let steps = grid.steps();
    if n_paths >= 2 {
        let mut total = 0.0;
        for k in 0..steps {
            let col: Vec<f64> = log_returns.iter().map(|r| r[k]).collect();
            total += sample_variance(&col);
        }
        (total / steps as f64 / grid.dt()).sqrt()
    } else if steps >= 2 {
        (sample_variance(&log_returns[0]) / grid.dt()).sqrt()
    } else {
        0.0
    }
}

pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Per-interval log returns of rebalanced portfolios over nested prefixes
/// of the asset universe, simulated without materializing price paths.
///
/// For each entry of `sizes` the portfolio holds the first `size` assets
/// with `weights[..size]` renormalized to one. Output is
/// `[size][path][step]`.
pub fn prefix_portfolio_log_returns(
    spec: &ProcessSpec,
    env: &EnvironmentSeries,
    grid: &TimeGrid,
    weights: &[f64],
    sizes: &[usize],
    n_paths: usize,
    seed: u64,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let largest = sizes.iter().copied().max().unwrap_or(0);
    if largest == 0 || largest > weights.len() || largest > spec.n_assets() {
        return Err(Error::InvalidInput(format!(
            "prefix sizes must lie in 1..={} (weights {}, assets {})",
            weights.len().min(spec.n_assets()),
            weights.len(),
            spec.n_assets()
        )));
    }
    if n_paths == 0 {
        return Err(Error::InvalidInput("n_paths must be >= 1".into()));
    }
    let sim = Simulator::new(spec, env, grid, seed)?;
    let steps = grid.steps();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&j| sizes[j]);

    let per_path: Vec<Vec<Vec<f64>>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut acc = vec![0.0; steps];
            let mut wsum = 0.0;
            let mut incr = vec![0.0; steps];
            let mut out = vec![Vec::new(); sizes.len()];
            let mut next = 0;
            for (i, &w) in weights.iter().enumerate().take(largest) {
                sim.log_increments(p, i, &mut incr);
                wsum += w;
                for (a, x) in acc.iter_mut().zip(&incr) {
                    *a += w * x.exp();
                }
                while next < order.len() && sizes[order[next]] == i + 1 {
                    out[order[next]] = acc.iter().map(|a| (a / wsum).ln()).collect();
                    next += 1;
                }
            }
            out
        })
        .collect();

    let mut by_size = vec![Vec::with_capacity(n_paths); sizes.len()];
    for path in per_path {
        for (j, r) in path.into_iter().enumerate() {
            by_size[j].push(r);
        }
    }
    Ok(by_size)
}

/// Sample standard deviation of a set of returns.
pub fn return_volatility(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 return samples, got {}",
            samples.len()
        )));
    }
    Ok(sample_variance(samples).sqrt())
}

/// Volatility of a return series (in its own units, 1/years).
pub fn series_volatility(series: &ReturnSeries) -> Result<f64> {
    return_volatility(series.values())
}
