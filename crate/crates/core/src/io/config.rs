//! Run configuration (TOML). Every section is optional and defaults to a
//! small, fast run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::TimeGrid;
use crate::pricer::Payoff;
use crate::riskfree::{Rebalance, DEFAULT_CAP_CONSTANT};
use crate::sim::{EnvironmentSeries, Functional, NoiseKind, ProcessSpec};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub simulate: SimulateConfig,
    pub gauge: GaugeConfig,
    pub riskfree: RiskfreeConfig,
    pub pde: PdeConfig,
    pub discount: DiscountConfig,
    pub sensitivity: SensitivityConfig,
}

/// Drift and volatility functionals, by catalog name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionalConfig {
    /// Same value for every asset.
    Constant { value: f64 },
    /// Values spaced evenly from `low` (first asset) to `high` (last).
    Linspace { low: f64, high: f64 },
    /// `base + Σ_f slope_f ξ_f`, identical for every asset.
    Affine { base: f64, slope: Vec<f64> },
    /// Asset `i` takes sector `i mod sectors`: `base[s] + Σ_f slope[s][f] ξ_f`.
    SectorBlock {
        base: Vec<f64>,
        slope: Vec<Vec<f64>>,
    },
}

impl FunctionalConfig {
    pub fn build(&self, n_assets: usize) -> Result<Functional> {
        Ok(match self {
            FunctionalConfig::Constant { value } => Functional::uniform(n_assets, *value),
            FunctionalConfig::Linspace { low, high } => {
                let step = if n_assets > 1 {
                    (high - low) / (n_assets - 1) as f64
                } else {
                    0.0
                };
                Functional::Constant((0..n_assets).map(|i| low + step * i as f64).collect())
            }
            FunctionalConfig::Affine { base, slope } => Functional::Affine {
                base: vec![*base; n_assets],
                slope: vec![slope.clone(); n_assets],
            },
            FunctionalConfig::SectorBlock { base, slope } => {
                if base.is_empty() {
                    return Err(Error::Config(
                        "sector_block needs at least one sector".into(),
                    ));
                }
                if !slope.is_empty() && slope.len() != base.len() {
                    return Err(Error::Config(format!(
                        "sector_block: {} slope rows for {} sectors",
                        slope.len(),
                        base.len()
                    )));
                }
                Functional::SectorBlock {
                    base: base.clone(),
                    slope: slope.clone(),
                }
            }
        })
    }
}

/// Environment factors `ξ(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentConfig {
    /// `ξ ≡ 0`.
    Flat { factors: usize },
    /// `ξ_f(t) = rate_f · t`.
    Trend { rates: Vec<f64> },
}

impl EnvironmentConfig {
    pub fn build(&self, grid: TimeGrid) -> Result<EnvironmentSeries> {
        match self {
            EnvironmentConfig::Flat { factors } => Ok(EnvironmentSeries::flat(grid, *factors)),
            EnvironmentConfig::Trend { rates } => {
                let rates = rates.clone();
                EnvironmentSeries::from_fn(grid, move |t| rates.iter().map(|r| r * t).collect())
            }
        }
    }

    pub fn n_factors(&self) -> usize {
        match self {
            EnvironmentConfig::Flat { factors } => *factors,
            EnvironmentConfig::Trend { rates } => rates.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub n_assets: usize,
    pub n_paths: usize,
    pub seed: u64,
    pub horizon: f64,
    pub steps: usize,
    pub noise: NoiseKind,
    pub drift: FunctionalConfig,
    pub vol: FunctionalConfig,
    pub environment: EnvironmentConfig,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n_assets: 16,
            n_paths: 1000,
            seed: 42,
            horizon: 1.0,
            steps: 52,
            noise: NoiseKind::Normal,
            drift: FunctionalConfig::Constant { value: 0.05 },
            vol: FunctionalConfig::Linspace {
                low: 0.1,
                high: 0.4,
            },
            environment: EnvironmentConfig::Flat { factors: 1 },
        }
    }
}

impl SimulateConfig {
    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::over(self.horizon, self.steps)
    }

    pub fn process(&self) -> Result<ProcessSpec> {
        ProcessSpec::new(
            self.n_assets,
            self.drift.build(self.n_assets)?,
            self.vol.build(self.n_assets)?,
            self.noise,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSchemeConfig {
    Equal,
    /// Positive weights `u + ½`, `u` uniform, normalized; seeded.
    Random,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaugeConfig {
    /// Panel to analyse; defaults to the first simulated path.
    pub panel: Option<PathBuf>,
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiskfreeConfig {
    pub weights: WeightSchemeConfig,
    pub cap_constant: f64,
    /// Rebalance every this many steps; 0 means buy-and-hold.
    pub rebalance_every: usize,
    /// Portfolio sizes for the scaling and Etemadi studies.
    pub sizes: Vec<usize>,
}

impl Default for RiskfreeConfig {
    fn default() -> Self {
        Self {
            weights: WeightSchemeConfig::Equal,
            cap_constant: DEFAULT_CAP_CONSTANT,
            rebalance_every: 1,
            sizes: vec![1, 2, 4, 8, 16],
        }
    }
}

impl RiskfreeConfig {
    pub fn rebalance(&self) -> Rebalance {
        match self.rebalance_every {
            0 => Rebalance::BuyAndHold,
            n => Rebalance::Every(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffKind {
    Call,
    Put,
    Digital,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeConfig {
    pub payoff: PayoffKind,
    pub strike: f64,
    pub spot: f64,
    pub sigma: f64,
    pub tau: f64,
    /// Constant gauge field `A`.
    pub a: f64,
    /// Constant option trade-unit rate `B`.
    pub b: f64,
    /// Residual portfolio volatility; nonzero solves in the primed gauge.
    pub sigma_hat: f64,
    pub space_intervals: usize,
    pub time_steps: usize,
    /// Nodes on each side of the spot in the reported slice.
    pub slice_half_width: usize,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            payoff: PayoffKind::Call,
            strike: 100.0,
            spot: 100.0,
            sigma: 0.2,
            tau: 1.0,
            a: 0.0,
            b: 0.0,
            sigma_hat: 0.0,
            space_intervals: crate::pricer::DEFAULT_SPACE_INTERVALS,
            time_steps: crate::pricer::DEFAULT_TIME_STEPS,
            slice_half_width: 10,
        }
    }
}

impl PdeConfig {
    pub fn payoff(&self) -> Payoff {
        match self.payoff {
            PayoffKind::Call => Payoff::Call {
                strike: self.strike,
            },
            PayoffKind::Put => Payoff::Put {
                strike: self.strike,
            },
            PayoffKind::Digital => Payoff::Digital {
                strike: self.strike,
            },
            PayoffKind::Linear => Payoff::Linear { scale: 1.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscountConfig {
    /// Panel with a `#cash` column; defaults to the bundled synthetic fixture.
    pub panel: Option<PathBuf>,
    pub normalize: bool,
    pub window: usize,
    /// Rebalance every this many steps; 0 means buy-and-hold.
    pub rebalance_every: usize,
    /// Flat yield for a textbook comparison factor over the panel horizon.
    pub textbook_rate: Option<f64>,
}

impl Default for DiscountConfig {
    fn default() -> Self {
        Self {
            panel: None,
            normalize: false,
            window: crate::discount::DEFAULT_WINDOW,
            rebalance_every: 1,
            textbook_rate: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientSource {
    /// `dμᵢ/dξ` of the simulate section's drift functional at `ξ(0)`.
    Drift,
    /// Independent standard normal entries, seeded.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityConfig {
    pub source: GradientSource,
    /// Sizes used by the random source.
    pub n_assets: usize,
    pub n_factors: usize,
    pub seed: u64,
    pub cap_constant: f64,
    pub floor_fraction: f64,
    pub tolerance: f64,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self {
            source: GradientSource::Random,
            n_assets: 256,
            n_factors: 3,
            seed: 7,
            cap_constant: DEFAULT_CAP_CONSTANT,
            floor_fraction: crate::riskfree::DEFAULT_FLOOR_FRACTION,
            tolerance: crate::riskfree::DEFAULT_NEUTRALITY_TOLERANCE,
        }
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Range checks applied at load time.
    pub fn validate(&self) -> Result<()> {
        let s = &self.simulate;
        if s.n_assets == 0 || s.n_paths == 0 || s.steps == 0 {
            return Err(Error::Config(
                "simulate: n_assets, n_paths and steps must be >= 1".into(),
            ));
        }
        positive("simulate.horizon", s.horizon)?;
        if let FunctionalConfig::SectorBlock { base, .. } = &s.drift {
            if base.is_empty() {
                return Err(Error::Config("simulate.drift: no sectors".into()));
            }
        }
        let r = &self.riskfree;
        if r.cap_constant < 1.0 {
            return Err(Error::Config(format!(
                "riskfree.cap_constant must be >= 1 (equal weights must be admissible), got {}",
                r.cap_constant
            )));
        }
        if r.sizes.iter().any(|n| *n == 0 || *n > s.n_assets)
            || r.sizes.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Config(format!(
                "riskfree.sizes must increase strictly within 1..={}",
                s.n_assets
            )));
        }
        let p = &self.pde;
        positive("pde.strike", p.strike)?;
        positive("pde.spot", p.spot)?;
        positive("pde.tau", p.tau)?;
        if !(p.sigma >= 0.0) || !(p.sigma_hat >= 0.0) {
            return Err(Error::Config(
                "pde.sigma and pde.sigma_hat must be >= 0".into(),
            ));
        }
        if p.space_intervals < 4 || p.time_steps == 0 {
            return Err(Error::Config(
                "pde grid needs >= 4 space intervals and >= 1 time step".into(),
            ));
        }
        if self.discount.window < 2 {
            return Err(Error::Config("discount.window must be >= 2".into()));
        }
        let q = &self.sensitivity;
        if q.n_factors >= q.n_assets {
            return Err(Error::Config(
                "sensitivity: need fewer factors than assets".into(),
            ));
        }
        positive("sensitivity.tolerance", q.tolerance)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let back = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn catalog_and_validation() {
        let cfg = RunConfig::from_toml(
            r#"
            [simulate]
            n_assets = 4
            drift = { kind = "sector_block", base = [0.01, 0.02], slope = [[0.1], [-0.1]] }
            vol = { kind = "constant", value = 0.2 }
            environment = { kind = "trend", rates = [0.5] }
            [riskfree]
            sizes = [1, 2, 4]
            "#,
        )
        .unwrap();
        let spec = cfg.simulate.process().unwrap();
        assert_eq!(spec.drift().eval(3, &[1.0]), 0.02 - 0.1);
        assert!(RunConfig::from_toml("[simulate]\ndrift = { kind = \"quadratic\" }").is_err());
        assert!(RunConfig::from_toml("[pde]\nstrike = -1.0").is_err());
        assert!(RunConfig::from_toml("[nonsense]\nx = 1").is_err());
    }
}
