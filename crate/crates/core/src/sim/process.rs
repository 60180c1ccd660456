//! Environment-driven log-normal price processes.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise::{NoiseKind, NoiseStream};
use crate::error::{Error, Result};
use crate::gauge::{PricePanel, TimeGrid};

/// Market-environment factors `ξ(t)`, shared by every Monte Carlo path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSeries {
    grid: TimeGrid,
    xi: Vec<Vec<f64>>,
}

impl EnvironmentSeries {
    pub fn new(grid: TimeGrid, xi: Vec<Vec<f64>>) -> Result<Self> {
        if xi.len() != grid.len() {
            return Err(Error::Dimension {
                what: "environment length",
                expected: grid.len(),
                got: xi.len(),
            });
        }
        let width = xi[0].len();
        for (k, row) in xi.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Dimension {
                    what: "environment factor count",
                    expected: width,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite factor at index {k}"
                )));
            }
        }
        Ok(Self { grid, xi })
    }

    /// `n_factors` factors held at zero.
    pub fn flat(grid: TimeGrid, n_factors: usize) -> Self {
        Self {
            grid,
            xi: vec![vec![0.0; n_factors]; grid.len()],
        }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        Self::new(grid, grid.times().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_factors(&self) -> usize {
        self.xi[0].len()
    }

    pub fn at(&self, k: usize) -> &[f64] {
        &self.xi[k]
    }
}

type CustomFn = Arc<dyn Fn(usize, &[f64]) -> f64 + Send + Sync>;

/// A parameter functional `f(i, ξ)` for drift or volatility.
#[derive(Clone)]
pub enum Functional {
    /// Per-asset constants, ignoring `ξ`.
    Constant(Vec<f64>),
    /// `base_i + Σ_f slope_{i,f} ξ_f`.
    Affine {
        base: Vec<f64>,
        slope: Vec<Vec<f64>>,
    },
    /// Assets share sector parameters; asset `i` belongs to sector `i % sectors`.
    SectorBlock {
        base: Vec<f64>,
        slope: Vec<Vec<f64>>,
    },
    Custom(CustomFn),
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Functional::Affine { base, slope } => f
                .debug_struct("Affine")
                .field("base", base)
                .field("slope", slope)
                .finish(),
            Functional::SectorBlock { base, slope } => f
                .debug_struct("SectorBlock")
                .field("base", base)
                .field("slope", slope)
                .finish(),
            Functional::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Functional {
    pub fn uniform(n_assets: usize, value: f64) -> Self {
        Functional::Constant(vec![value; n_assets])
    }

    pub fn custom(f: impl Fn(usize, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Functional::Custom(Arc::new(f))
    }

    pub fn eval(&self, asset: usize, xi: &[f64]) -> f64 {
        let affine = |base: &[f64], slope: &[Vec<f64>], idx: usize| {
            let row = slope.get(idx).map(|r| r.as_slice()).unwrap_or(&[]);
            base[idx] + row.iter().zip(xi).map(|(s, x)| s * x).sum::<f64>()
        };
        match self {
            Functional::Constant(v) => v[asset],
            Functional::Affine { base, slope } => affine(base, slope, asset),
            Functional::SectorBlock { base, slope } => affine(base, slope, asset % base.len()),
            Functional::Custom(f) => f(asset, xi),
        }
    }

    /// Per-asset constants when the functional ignores `ξ`.
    pub fn constants(&self, n_assets: usize) -> Option<Vec<f64>> {
        match self {
            Functional::Constant(v) => Some(v[..n_assets.min(v.len())].to_vec()),
            Functional::SectorBlock { base, slope }
                if slope.iter().all(|r| r.iter().all(|s| *s == 0.0)) =>
            {
                Some((0..n_assets).map(|i| base[i % base.len()]).collect())
            }
            Functional::Affine { base, slope }
                if slope.iter().all(|r| r.iter().all(|s| *s == 0.0)) =>
            {
                Some(base[..n_assets.min(base.len())].to_vec())
            }
            _ => None,
        }
    }

    /// The functional's slope with respect to each factor, by asset.
    ///
    /// Custom functionals are differentiated by central differences at `xi`.
    pub fn gradient(&self, asset: usize, xi: &[f64]) -> Vec<f64> {
        match self {
            Functional::Constant(_) => vec![0.0; xi.len()],
            Functional::Affine { slope, .. } => padded(slope.get(asset), xi.len()),
            Functional::SectorBlock { base, slope } => {
                padded(slope.get(asset % base.len()), xi.len())
            }
            Functional::Custom(f) => (0..xi.len())
                .map(|j| {
                    let h = 1e-6 * (1.0 + xi[j].abs());
                    let mut up = xi.to_vec();
                    let mut dn = xi.to_vec();
                    up[j] += h;
                    dn[j] -= h;
                    (f(asset, &up) - f(asset, &dn)) / (2.0 * h)
                })
                .collect(),
        }
    }

    fn check_len(&self, n_assets: usize, what: &'static str) -> Result<()> {
        let len = match self {
            Functional::Constant(v) => v.len(),
            Functional::Affine { base, .. } => base.len(),
            Functional::SectorBlock { base, .. } => {
                if base.is_empty() {
                    return Err(Error::InvalidInput(format!("{what}: no sectors")));
                }
                return Ok(());
            }
            Functional::Custom(_) => return Ok(()),
        };
        if len < n_assets {
            return Err(Error::Dimension {
                what,
                expected: n_assets,
                got: len,
            });
        }
        Ok(())
    }
}

fn padded(row: Option<&Vec<f64>>, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if let Some(r) = row {
        for (o, v) in out.iter_mut().zip(r) {
            *o = *v;
        }
    }
    out
}

/// Drift and volatility functionals plus the noise law of
/// `ds_i = μ_i(ξ) s_i dt + σ_i(ξ) s_i dZ_i`.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    n_assets: usize,
    drift: Functional,
    vol: Functional,
    noise: NoiseKind,
    initial: Vec<f64>,
}

impl ProcessSpec {
    pub fn new(
        n_assets: usize,
        drift: Functional,
        vol: Functional,
        noise: NoiseKind,
    ) -> Result<Self> {
        if n_assets == 0 {
            return Err(Error::InvalidInput("need at least one asset".into()));
        }
        drift.check_len(n_assets, "drift functional")?;
        vol.check_len(n_assets, "volatility functional")?;
        if noise != NoiseKind::Normal {
            noise.verify_moments()?;
        }
        Ok(Self {
            n_assets,
            drift,
            vol,
            noise,
            initial: vec![1.0; n_assets],
        })
    }

    /// Same `μ` and `σ` for every asset.
    pub fn homogeneous(n_assets: usize, mu: f64, sigma: f64) -> Result<Self> {
        Self::new(
            n_assets,
            Functional::uniform(n_assets, mu),
            Functional::uniform(n_assets, sigma),
            NoiseKind::Normal,
        )
    }

    pub fn with_initial_prices(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.n_assets {
            return Err(Error::Dimension {
                what: "initial prices",
                expected: self.n_assets,
                got: initial.len(),
            });
        }
        if let Some(i) = initial.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::NonPositive {
                index: 0,
                column: i,
                value: initial[i],
            });
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    pub fn drift(&self) -> &Functional {
        &self.drift
    }

    pub fn vol(&self) -> &Functional {
        &self.vol
    }

    pub fn noise(&self) -> NoiseKind {
        self.noise
    }

    pub fn initial_prices(&self) -> &[f64] {
        &self.initial
    }

    /// Volatilities when they do not depend on `ξ`.
    pub fn constant_vols(&self) -> Option<Vec<f64>> {
        self.vol.constants(self.n_assets)
    }
}

/// Drift/volatility tables evaluated on the grid, ready for sampling.
#[derive(Debug, Clone)]
pub struct Simulator {
    grid: TimeGrid,
    n_assets: usize,
    noise: NoiseKind,
    seed: u64,
    initial: Vec<f64>,
    /// `(μ − σ²/2)·dt`, indexed `[step * n_assets + asset]`.
    drift_dt: Vec<f64>,
    /// `σ·√dt`, same layout.
    vol_sqrt_dt: Vec<f64>,
}

impl Simulator {
    pub fn new(
        spec: &ProcessSpec,
        env: &EnvironmentSeries,
        grid: &TimeGrid,
        seed: u64,
    ) -> Result<Self> {
        grid.ensure_same(env.grid(), "environment")?;
        let n = spec.n_assets;
        let dt = grid.dt();
        let mut drift_dt = Vec::with_capacity(grid.steps() * n);
        let mut vol_sqrt_dt = Vec::with_capacity(grid.steps() * n);
        for k in 0..grid.steps() {
            let xi = env.at(k);
            for i in 0..n {
                let mu = spec.drift.eval(i, xi);
                let sigma = spec.vol.eval(i, xi);
                if !(sigma >= 0.0) || !sigma.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "volatility functional returned {sigma} for asset {i} at step {k}"
                    )));
                }
                if !mu.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "drift functional returned {mu} for asset {i} at step {k}"
                    )));
                }
                drift_dt.push((mu - 0.5 * sigma * sigma) * dt);
                vol_sqrt_dt.push(sigma * dt.sqrt());
            }
        }
        Ok(Self {
            grid: *grid,
            n_assets: n,
            noise: spec.noise,
            seed,
            initial: spec.initial.clone(),
            drift_dt,
            vol_sqrt_dt,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn noise(&self) -> NoiseKind {
        self.noise
    }

    pub fn initial_price(&self, asset: usize) -> f64 {
        self.initial[asset]
    }

    /// Log-price increments of one asset on one path.
    pub fn log_increments(&self, path: usize, asset: usize, out: &mut [f64]) {
        let mut rng = NoiseStream::new(self.seed, path as u64, asset as u64);
        let n = self.n_assets;
        for (k, slot) in out.iter_mut().enumerate().take(self.grid.steps()) {
            let z = self.noise.sample(&mut rng);
            let idx = k * n + asset;
            *slot = self.drift_dt[idx] + self.vol_sqrt_dt[idx] * z;
        }
    }

    /// Standardized noises `z_{k}` of one asset on one path.
    pub fn noises(&self, path: usize, asset: usize) -> Vec<f64> {
        regenerate_noise(self.seed, self.noise, path, asset, self.grid.steps())
    }
}

pub(crate) fn regenerate_noise(
    seed: u64,
    noise: NoiseKind,
    path: usize,
    asset: usize,
    steps: usize,
) -> Vec<f64> {
    let mut rng = NoiseStream::new(seed, path as u64, asset as u64);
    (0..steps).map(|_| noise.sample(&mut rng)).collect()
}

/// Simulated prices, `[path][step][asset]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    grid: TimeGrid,
    seed: u64,
    noise: NoiseKind,
    n_paths: usize,
    n_assets: usize,
    data: Vec<f64>,
}

impl PathSet {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn noise(&self) -> NoiseKind {
        self.noise
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    pub fn price(&self, path: usize, step: usize, asset: usize) -> f64 {
        self.data[(path * self.grid.len() + step) * self.n_assets + asset]
    }

    /// Raw storage, `[path][step][asset]` row-major.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// One asset's price series on one path.
    pub fn series(&self, path: usize, asset: usize) -> Vec<f64> {
        (0..self.grid.len())
            .map(|k| self.price(path, k, asset))
            .collect()
    }

    pub fn terminal(&self, asset: usize) -> Vec<f64> {
        let last = self.grid.steps();
        (0..self.n_paths)
            .map(|p| self.price(p, last, asset))
            .collect()
    }

    /// One path as a price panel.
    pub fn panel(&self, path: usize, asset_ids: Vec<String>) -> Result<PricePanel> {
        let rows: Vec<Vec<f64>> = (0..self.grid.len())
            .map(|k| (0..self.n_assets).map(|i| self.price(path, k, i)).collect())
            .collect();
        PricePanel::from_rows(self.grid, &rows, asset_ids)
    }

    /// Standardized noise that drove `asset` on `path`.
    pub fn noises(&self, path: usize, asset: usize) -> Vec<f64> {
        regenerate_noise(self.seed, self.noise, path, asset, self.grid.steps())
    }

    pub(crate) fn from_parts(
        grid: TimeGrid,
        seed: u64,
        noise: NoiseKind,
        n_paths: usize,
        n_assets: usize,
        data: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(data.len(), n_paths * grid.len() * n_assets);
        Self {
            grid,
            seed,
            noise,
            n_paths,
            n_assets,
            data,
        }
    }
}

/// Samples `n_paths` price paths with exact log-normal steps
/// `s_{k+1} = s_k exp[(μ − σ²/2)dt + σ√dt z]`, parameters taken at `ξ(t_k)`.
pub fn simulate(
    spec: &ProcessSpec,
    env: &EnvironmentSeries,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathSet> {
    if n_paths == 0 {
        return Err(Error::InvalidInput("n_paths must be >= 1".into()));
    }
    let sim = Simulator::new(spec, env, grid, seed)?;
    let n = spec.n_assets;
    let points = grid.len();
    let blocks: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut block = vec![0.0; points * n];
            let mut incr = vec![0.0; grid.steps()];
            for i in 0..n {
                sim.log_increments(p, i, &mut incr);
                let mut s = sim.initial[i];
                block[i] = s;
                for (k, x) in incr.iter().enumerate() {
                    s *= x.exp();
                    block[(k + 1) * n + i] = s;
                }
            }
            block
        })
        .collect();
    let data = blocks.concat();
    Ok(PathSet::from_parts(
        *grid, seed, spec.noise, n_paths, n, data,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_limit_is_exponential() {
        let grid = TimeGrid::over(2.0, 50).unwrap();
        let spec = ProcessSpec::homogeneous(3, 0.08, 0.0)
            .unwrap()
            .with_initial_prices(vec![1.0, 2.0, 5.0])
            .unwrap();
        let paths = simulate(&spec, &EnvironmentSeries::flat(grid, 1), &grid, 4, 11).unwrap();
        for p in 0..4 {
            for i in 0..3 {
                let s0 = spec.initial_prices()[i];
                for (k, t) in grid.times().iter().enumerate() {
                    let expect = s0 * (0.08 * t).exp();
                    assert!((paths.price(p, k, i) / expect - 1.0).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn negative_vol_is_rejected() {
        let grid = TimeGrid::over(1.0, 4).unwrap();
        let spec = ProcessSpec::new(
            2,
            Functional::uniform(2, 0.0),
            Functional::Affine {
                base: vec![0.1, 0.1],
                slope: vec![vec![1.0], vec![1.0]],
            },
            NoiseKind::Normal,
        )
        .unwrap();
        let env = EnvironmentSeries::from_fn(grid, |t| vec![-t]).unwrap();
        assert!(simulate(&spec, &env, &grid, 1, 0).is_err());
    }

    #[test]
    fn sector_block_and_affine_eval() {
        let f = Functional::SectorBlock {
            base: vec![0.1, 0.2],
            slope: vec![vec![1.0], vec![-1.0]],
        };
        assert!((f.eval(3, &[0.5]) - (0.2 - 0.5)).abs() < 1e-15);
        assert_eq!(f.gradient(2, &[0.5]), vec![1.0]);
        let g = Functional::custom(|i, xi| i as f64 * xi[0] * xi[0]);
        let d = g.gradient(2, &[3.0]);
        assert!((d[0] - 12.0).abs() < 1e-6);
    }

    #[test]
    fn path_count_and_grid_checks() {
        let grid = TimeGrid::over(1.0, 4).unwrap();
        let spec = ProcessSpec::homogeneous(1, 0.0, 0.2).unwrap();
        let env = EnvironmentSeries::flat(grid, 1);
        assert!(simulate(&spec, &env, &grid, 0, 1).is_err());
        let other = TimeGrid::over(1.0, 5).unwrap();
        assert!(simulate(&spec, &env, &other, 1, 1).is_err());
    }
}
