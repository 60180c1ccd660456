//! Diversification studies: the `σ̂ ∝ N^{-1/2}` scaling law and the shared
//! limit of positive-weight averages.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weights::WeightVector;
use crate::error::{Error, Result};
use crate::gauge::TimeGrid;
use crate::sim::{
    analytic_sigma_hat, pooled_sigma, prefix_portfolio_log_returns, EnvironmentSeries, ProcessSpec,
};

/// Monte Carlo settings shared by the studies.
#[derive(Debug, Clone, Copy)]
pub struct StudySettings {
    pub grid: TimeGrid,
    pub n_paths: usize,
    pub seed: u64,
}

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits a line through the finite `(x, y)` pairs.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (*a, *b))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!(
            "line fit needs at least 3 finite points, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Realized and analytic `σ̂` of equal-weight portfolios versus `N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub sizes: Vec<usize>,
    pub realized_sigma: Vec<f64>,
    pub fit: LineFit,
    /// Present when every asset has a constant volatility.
    pub analytic_sigma: Option<Vec<f64>>,
    pub analytic_fit: Option<LineFit>,
}

fn check_sizes(sizes: &[usize], n_assets: usize) -> Result<()> {
    if sizes.len() < 4 {
        return Err(Error::Degenerate(format!(
            "scaling study needs at least 4 portfolio sizes, got {}",
            sizes.len()
        )));
    }
    if sizes[0] == 0 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "portfolio sizes must be positive and strictly increasing".into(),
        ));
    }
    if *sizes.last().unwrap() > n_assets {
        return Err(Error::InvalidInput(format!(
            "largest size {} exceeds the {n_assets} simulated assets",
            sizes.last().unwrap()
        )));
    }
    Ok(())
}

/// Simulates equal-weight portfolios over nested prefixes of the universe
/// and fits `ln σ̂` against `ln N`.
pub fn convergence_study(
    spec: &ProcessSpec,
    env: &EnvironmentSeries,
    sizes: &[usize],
    settings: &StudySettings,
) -> Result<ScalingReport> {
    check_sizes(sizes, spec.n_assets())?;
    let largest = *sizes.last().unwrap();
    // Uniform weights on the largest prefix renormalize to 1/N on each prefix.
    let weights = vec![1.0 / largest as f64; largest];
    let returns = prefix_portfolio_log_returns(
        spec,
        env,
        &settings.grid,
        &weights,
        sizes,
        settings.n_paths,
        settings.seed,
    )?;
    let realized_sigma: Vec<f64> = returns
        .par_iter()
        .map(|r| pooled_sigma(r, &settings.grid))
        .collect();
    let logn: Vec<f64> = sizes.iter().map(|n| (*n as f64).ln()).collect();
    let fit = fit_line(
        &logn,
        &realized_sigma.iter().map(|s| s.ln()).collect::<Vec<_>>(),
    )?;

    let (analytic_sigma, analytic_fit) = match spec.constant_vols() {
        Some(vols) => {
            let a = analytic_scaling(&vols, sizes);
            let f = fit_line(&logn, &a.iter().map(|s| s.ln()).collect::<Vec<_>>())?;
            (Some(a), Some(f))
        }
        None => (None, None),
    };
    Ok(ScalingReport {
        sizes: sizes.to_vec(),
        realized_sigma,
        fit,
        analytic_sigma,
        analytic_fit,
    })
}

/// `σ̂_N = √(Σ_{i<N} σᵢ²)/N` for equal weights on each prefix.
pub fn analytic_scaling(vols: &[f64], sizes: &[usize]) -> Vec<f64> {
    sizes
        .iter()
        .map(|&n| analytic_sigma_hat(&vec![1.0 / n as f64; n], &vols[..n]))
        .collect()
}

/// Divergence between two weightings as the universe grows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtemadiReport {
    pub sizes: Vec<usize>,
    /// RMS over paths of `|R_a − R_b|`, with `R` the cumulative log return.
    pub divergence: Vec<f64>,
    pub terminal: f64,
}

impl EtemadiReport {
    /// Divergence at the largest size relative to the smallest.
    pub fn decay_ratio(&self) -> f64 {
        self.terminal / self.divergence[0]
    }
}

/// Compares cumulative returns of two positive weightings over nested
/// prefixes of one simulated universe (common random numbers). Each prefix
/// uses the leading weights renormalized to one.
pub fn etemadi_check(
    spec: &ProcessSpec,
    env: &EnvironmentSeries,
    weight_a: &WeightVector,
    weight_b: &WeightVector,
    sizes: &[usize],
    settings: &StudySettings,
) -> Result<EtemadiReport> {
    for w in [weight_a, weight_b] {
        if let Some(i) = w.as_slice().iter().position(|v| *v <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "weight {i} is {}: leverage and shorts are not available in risk-free portfolios",
                w.as_slice()[i]
            )));
        }
    }
    if weight_a.len() != weight_b.len() {
        return Err(Error::Dimension {
            what: "weight vector",
            expected: weight_a.len(),
            got: weight_b.len(),
        });
    }
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "portfolio sizes must be positive and strictly increasing".into(),
        ));
    }
    let run = |w: &WeightVector| {
        prefix_portfolio_log_returns(
            spec,
            env,
            &settings.grid,
            w.as_slice(),
            sizes,
            settings.n_paths,
            settings.seed,
        )
    };
    let ra = run(weight_a)?;
    let rb = run(weight_b)?;
    let divergence: Vec<f64> = ra
        .iter()
        .zip(&rb)
        .map(|(pa, pb)| {
            let ms: f64 = pa
                .iter()
                .zip(pb)
                .map(|(a, b)| (a.iter().sum::<f64>() - b.iter().sum::<f64>()).powi(2))
                .sum::<f64>()
                / pa.len() as f64;
            ms.sqrt()
        })
        .collect();
    Ok(EtemadiReport {
        sizes: sizes.to_vec(),
        terminal: *divergence.last().unwrap(),
        divergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(n_paths: usize) -> StudySettings {
        StudySettings {
            grid: TimeGrid::over(1.0, 4).unwrap(),
            n_paths,
            seed: 5,
        }
    }

    #[test]
    fn homogeneous_analytic_slope_is_minus_half() {
        let spec = ProcessSpec::homogeneous(64, 0.05, 0.3).unwrap();
        let s = settings(50);
        let env = EnvironmentSeries::flat(s.grid, 1);
        let r = convergence_study(&spec, &env, &[4, 8, 16, 32, 64], &s).unwrap();
        let f = r.analytic_fit.unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!(r.fit.slope < -0.3 && r.fit.slope > -0.7);
    }

    #[test]
    fn degenerate_inputs() {
        let spec = ProcessSpec::homogeneous(8, 0.0, 0.2).unwrap();
        let s = settings(10);
        let env = EnvironmentSeries::flat(s.grid, 1);
        assert!(matches!(
            convergence_study(&spec, &env, &[8], &s),
            Err(Error::Degenerate(_))
        ));
        assert!(convergence_study(&spec, &env, &[1, 4, 2, 8], &s).is_err());
        assert!(fit_line(&[1.0, 2.0, 3.0], &[0.0, f64::NEG_INFINITY, 1.0]).is_err());
    }

    #[test]
    fn identical_weights_never_diverge_and_shorts_rejected() {
        let spec = ProcessSpec::homogeneous(16, 0.0, 0.2).unwrap();
        let s = settings(20);
        let env = EnvironmentSeries::flat(s.grid, 1);
        let w = WeightVector::equal(16).unwrap();
        let r = etemadi_check(&spec, &env, &w, &w, &[4, 16], &s).unwrap();
        assert!(r.divergence.iter().all(|d| *d == 0.0));
        let mut raw = vec![1.0; 16];
        raw[0] = -1.0;
        let short = WeightVector::normalized(&raw).unwrap();
        assert!(etemadi_check(&spec, &env, &w, &short, &[4, 16], &s).is_err());
    }
}
