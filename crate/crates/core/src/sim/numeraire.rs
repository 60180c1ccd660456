//! Stochastic rescalings `s' = Y s` and their cross terms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise::{NoiseKind, NoiseStream, RESIDUAL_STREAM};
use super::process::PathSet;
use crate::error::{Error, Result};
use crate::gauge::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumeraireMode {
    Stochastic,
    Deterministic,
}

/// Law of the rescaling factor `Y`: `dY/Y = φ_μ dt + φ_σ dZ_φ` with
/// `dZ_φ = Σ ρᵢ dZᵢ + √(1 − Σρᵢ²) dW`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumeraireSpec {
    phi_mu: f64,
    phi_sigma: f64,
    rho: Vec<f64>,
    mode: NumeraireMode,
}

impl NumeraireSpec {
    pub fn stochastic(phi_mu: f64, phi_sigma: f64, rho: Vec<f64>) -> Result<Self> {
        if !phi_mu.is_finite() || !(phi_sigma >= 0.0) || !phi_sigma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "numeraire drift/vol must be finite with vol >= 0 (got {phi_mu}, {phi_sigma})"
            )));
        }
        if let Some(i) = rho.iter().position(|r| !(r.abs() <= 1.0)) {
            return Err(Error::InvalidInput(format!(
                "correlation {} for asset {i} outside [-1, 1]",
                rho[i]
            )));
        }
        let total: f64 = rho.iter().map(|r| r * r).sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "correlations are jointly infeasible: Σρ² = {total} > 1"
            )));
        }
        Ok(Self {
            phi_mu,
            phi_sigma,
            rho,
            mode: NumeraireMode::Stochastic,
        })
    }

    /// Non-stochastic rescaling at constant rate `φ̇ = phi_mu`.
    pub fn deterministic(phi_mu: f64, n_assets: usize) -> Result<Self> {
        if !phi_mu.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite drift {phi_mu}")));
        }
        Ok(Self {
            phi_mu,
            phi_sigma: 0.0,
            rho: vec![0.0; n_assets],
            mode: NumeraireMode::Deterministic,
        })
    }

    /// Makes asset `asset` (with constant `μ`, `σ`) the numeraire: `φ_σ = σ`,
    /// `dZ_φ = −dZ_asset`, `φ_μ = −μ − ρσφ_σ` with `ρ = −1`.
    pub fn select_asset(asset: usize, n_assets: usize, mu: f64, sigma: f64) -> Result<Self> {
        let mut rho = vec![0.0; n_assets];
        rho[asset] = -1.0;
        Self::stochastic(-mu + sigma * sigma, sigma, rho)
    }

    pub fn phi_mu(&self) -> f64 {
        self.phi_mu
    }

    pub fn phi_sigma(&self) -> f64 {
        self.phi_sigma
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn mode(&self) -> NumeraireMode {
        self.mode
    }

    /// Drift and volatility of `s' = Y s` for an asset with `(μ, σ)`
    /// correlated `ρ` with `Y`.
    pub fn primed_moments(&self, mu: f64, sigma: f64, rho: f64) -> (f64, f64) {
        let drift = mu + self.phi_mu + rho * sigma * self.phi_sigma;
        let var =
            sigma * sigma + self.phi_sigma * self.phi_sigma + 2.0 * rho * sigma * self.phi_sigma;
        (drift, var.max(0.0).sqrt())
    }
}

/// Samples `Y` along every path of `paths`, `[path][step]`, with `Y(0) = 1`.
///
/// Asset noises are regenerated from the path set's seed; the independent
/// residual comes from `seed2`.
pub fn sample_numeraire(paths: &PathSet, y: &NumeraireSpec, seed2: u64) -> Result<Vec<Vec<f64>>> {
    if y.rho.len() != paths.n_assets() {
        return Err(Error::Dimension {
            what: "numeraire correlation vector",
            expected: paths.n_assets(),
            got: y.rho.len(),
        });
    }
    let grid = *paths.grid();
    let steps = grid.steps();
    let dt = grid.dt();
    let drift = (y.phi_mu - 0.5 * y.phi_sigma * y.phi_sigma) * dt;
    let vol = y.phi_sigma * dt.sqrt();
    let rho_sq: f64 = y.rho.iter().map(|r| r * r).sum();
    let residual = (1.0 - rho_sq).max(0.0).sqrt();
    let correlated: Vec<(usize, f64)> = y
        .rho
        .iter()
        .enumerate()
        .filter(|(_, r)| **r != 0.0)
        .map(|(i, r)| (i, *r))
        .collect();

    let out = (0..paths.n_paths())
        .into_par_iter()
        .map(|p| {
            let mut z_phi = vec![0.0; steps];
            if vol != 0.0 {
                for &(i, r) in &correlated {
                    for (z, zi) in z_phi.iter_mut().zip(paths.noises(p, i)) {
                        *z += r * zi;
                    }
                }
                if residual > 0.0 {
                    let mut rng = NoiseStream::new(seed2, p as u64, RESIDUAL_STREAM);
                    for z in z_phi.iter_mut() {
                        *z += residual * NoiseKind::Normal.sample(&mut rng);
                    }
                }
            }
            let mut ys = Vec::with_capacity(grid.len());
            let mut log_y = 0.0;
            ys.push(1.0);
            for z in z_phi {
                log_y += drift + vol * z;
                ys.push(log_y.exp());
            }
            ys
        })
        .collect();
    Ok(out)
}

/// `s' = Y s` on every path, with `Y` from [`sample_numeraire`].
pub fn apply_numeraire(paths: &PathSet, y: &NumeraireSpec, seed2: u64) -> Result<PathSet> {
    let ys = sample_numeraire(paths, y, seed2)?;
    let grid = *paths.grid();
    let n = paths.n_assets();
    let mut data = paths.as_slice().to_vec();
    for (p, yp) in ys.iter().enumerate() {
        for (k, yk) in yp.iter().enumerate() {
            let base = (p * grid.len() + k) * n;
            for v in &mut data[base..base + n] {
                *v *= yk;
            }
        }
    }
    if data.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "rescaled prices left the positive reals".into(),
        ));
    }
    Ok(PathSet::from_parts(
        grid,
        paths.seed(),
        paths.noise(),
        paths.n_paths(),
        n,
        data,
    ))
}

/// Monte Carlo estimate of a cross term with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTermEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

impl CrossTermEstimate {
    /// `|estimate − target| ≤ k·SE`, with a floor of `1e-12` for
    /// degenerate zero-variance cases.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.std_error + 1e-12
    }
}

/// Quadratic covariation of `ln Y` and `ln Π` per unit time.
///
/// Each path contributes `Σ_k (ΔlnY_k − m^Y_k)(ΔlnΠ_k − m^Π_k) / T` where
/// `m_k` are cross-path mean increments, so deterministic drifts drop out.
pub fn cross_term(
    grid: &TimeGrid,
    paths_y: &[Vec<f64>],
    paths_pi: &[Vec<f64>],
) -> Result<CrossTermEstimate> {
    if paths_y.len() != paths_pi.len() {
        return Err(Error::Dimension {
            what: "cross-term path count",
            expected: paths_y.len(),
            got: paths_pi.len(),
        });
    }
    let n_paths = paths_y.len();
    if n_paths < 2 {
        return Err(Error::InvalidInput(
            "cross term needs at least 2 paths".into(),
        ));
    }
    let steps = grid.steps();
    for (y, pi) in paths_y.iter().zip(paths_pi) {
        if y.len() != grid.len() || pi.len() != grid.len() {
            return Err(Error::GridMismatch(
                "cross-term series length differs from grid".into(),
            ));
        }
        if y.iter().chain(pi).any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput(
                "cross-term inputs must be positive".into(),
            ));
        }
    }
    let incr = |series: &[Vec<f64>]| -> Vec<Vec<f64>> {
        series
            .iter()
            .map(|s| s.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
            .collect()
    };
    let dy = incr(paths_y);
    let dpi = incr(paths_pi);
    let n = n_paths as f64;
    let mean_y: Vec<f64> = (0..steps)
        .map(|k| dy.iter().map(|r| r[k]).sum::<f64>() / n)
        .collect();
    let mean_pi: Vec<f64> = (0..steps)
        .map(|k| dpi.iter().map(|r| r[k]).sum::<f64>() / n)
        .collect();
    let horizon = grid.horizon();
    let per_path: Vec<f64> = dy
        .iter()
        .zip(&dpi)
        .map(|(a, b)| {
            (0..steps)
                .map(|k| (a[k] - mean_y[k]) * (b[k] - mean_pi[k]))
                .sum::<f64>()
                / horizon
        })
        .collect();
    // n/(n−1) removes the bias from estimating the per-step means
    let correction = n / (n - 1.0);
    let mean = per_path.iter().sum::<f64>() / n;
    let var = per_path.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(CrossTermEstimate {
        estimate: mean * correction,
        std_error: (var / n).sqrt() * correction,
        n_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate, EnvironmentSeries, ProcessSpec};

    #[test]
    fn correlation_bounds() {
        assert!(NumeraireSpec::stochastic(0.0, 0.1, vec![1.5]).is_err());
        assert!(NumeraireSpec::stochastic(0.0, 0.1, vec![0.8, 0.8]).is_err());
        assert!(NumeraireSpec::stochastic(0.0, 0.1, vec![0.6, 0.8]).is_ok());
        let d = NumeraireSpec::deterministic(0.02, 3).unwrap();
        assert_eq!(d.phi_sigma(), 0.0);
    }

    #[test]
    fn zero_deterministic_rescaling_is_identity() {
        let grid = TimeGrid::over(1.0, 10).unwrap();
        let spec = ProcessSpec::homogeneous(2, 0.05, 0.2).unwrap();
        let paths = simulate(&spec, &EnvironmentSeries::flat(grid, 1), &grid, 5, 3).unwrap();
        let out =
            apply_numeraire(&paths, &NumeraireSpec::deterministic(0.0, 2).unwrap(), 4).unwrap();
        assert_eq!(out, paths);
    }

    #[test]
    fn deterministic_rescaling_matches_price_gauge() {
        let grid = TimeGrid::over(1.0, 10).unwrap();
        let spec = ProcessSpec::homogeneous(2, 0.05, 0.2).unwrap();
        let paths = simulate(&spec, &EnvironmentSeries::flat(grid, 1), &grid, 2, 3).unwrap();
        let out =
            apply_numeraire(&paths, &NumeraireSpec::deterministic(0.3, 2).unwrap(), 4).unwrap();
        let phi = crate::gauge::GaugeScalar::from_fn(grid, |t| 0.3 * t).unwrap();
        let ids = vec!["a".to_string(), "b".to_string()];
        let gauged = paths
            .panel(1, ids.clone())
            .unwrap()
            .apply_price_gauge(&phi)
            .unwrap();
        let direct = out.panel(1, ids).unwrap();
        for (x, y) in gauged.prices().iter().zip(direct.prices().iter()) {
            assert!((x / y - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn deterministic_y_has_no_cross_term() {
        let grid = TimeGrid::over(1.0, 10).unwrap();
        let ys: Vec<Vec<f64>> = (0..50)
            .map(|_| grid.times().iter().map(|t| (0.1 * t).exp()).collect())
            .collect();
        let pis: Vec<Vec<f64>> = (0..50)
            .map(|p| {
                grid.times()
                    .iter()
                    .map(|t| 1.0 + 0.01 * (p as f64 + t).sin().abs())
                    .collect()
            })
            .collect();
        let est = cross_term(&grid, &ys, &pis).unwrap();
        assert!(est.within(0.0, 3.0));
    }
}
