//! Uniform time grids and rate series sampled on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `t0 + k·dt`, `k = 0..=steps`, times in years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, steps: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "dt must be finite and > 0, got {dt}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidGrid(format!("t0 must be finite, got {t0}")));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("steps must be >= 1".into()));
        }
        Ok(Self { t0, dt, steps })
    }

    /// Grid starting at zero with `steps` intervals spanning `horizon` years.
    pub fn over(horizon: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidGrid("steps must be >= 1".into()));
        }
        Self::new(0.0, horizon / steps as f64, steps)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of grid points, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }

    pub fn ensure_same(&self, other: &TimeGrid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: ({}, {}, {}) vs ({}, {}, {})",
                self.t0, self.dt, self.steps, other.t0, other.dt, other.steps
            )))
        }
    }
}

/// Where the values of a [`RateSeries`] live on its grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// One value per interval `[t_k, t_{k+1})`, piecewise constant.
    Interval,
    /// One value per grid point, linear between points.
    Point,
}

/// A rate-valued time series (1/years, or 1/√years for volatilities).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSeries {
    grid: TimeGrid,
    sampling: Sampling,
    values: Vec<f64>,
}

impl RateSeries {
    pub fn new(grid: TimeGrid, sampling: Sampling, values: Vec<f64>) -> Result<Self> {
        let expected = match sampling {
            Sampling::Interval => grid.steps(),
            Sampling::Point => grid.len(),
        };
        if values.len() != expected {
            return Err(Error::Dimension {
                what: "rate series length",
                expected,
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite rate at index {k}")));
        }
        Ok(Self {
            grid,
            sampling,
            values,
        })
    }

    pub fn constant(grid: TimeGrid, value: f64) -> Result<Self> {
        Self::new(grid, Sampling::Interval, vec![value; grid.steps()])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn sampling(&self) -> Sampling {
        self.sampling
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise map, keeping grid and sampling.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.grid,
            self.sampling,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Pointwise combination of two series on the same grid and sampling.
    pub fn zip_with(&self, other: &RateSeries, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "rate series")?;
        if self.sampling != other.sampling {
            return Err(Error::GridMismatch("rate series sampling differs".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, self.sampling, values)
    }

    /// Integral over `[0, horizon]`.
    ///
    /// Interval-sampled series integrate exactly as step functions; point
    /// samples use the trapezoid rule. A partial last interval is
    /// integrated up to `horizon`.
    pub fn integrate_to(&self, horizon: f64) -> Result<f64> {
        let g = &self.grid;
        let eps = 1e-9 * g.dt();
        if !(horizon > 0.0) {
            return Err(Error::InvalidInput(format!(
                "horizon must be > 0, got {horizon}"
            )));
        }
        if g.t0().abs() > eps {
            return Err(Error::Coverage {
                horizon,
                detail: format!("series starts at {} rather than 0", g.t0()),
            });
        }
        if horizon > g.end() + eps {
            return Err(Error::Coverage {
                horizon,
                detail: format!("series ends at {}", g.end()),
            });
        }
        let dt = g.dt();
        let pos = horizon / dt;
        let mut full = pos.floor() as usize;
        let mut frac = pos - full as f64;
        if frac < 1e-9 {
            frac = 0.0;
        } else if frac > 1.0 - 1e-9 {
            full += 1;
            frac = 0.0;
        }
        let full = full.min(g.steps());
        let mut total = 0.0;
        match self.sampling {
            Sampling::Interval => {
                for v in &self.values[..full] {
                    total += v * dt;
                }
                if frac > 0.0 {
                    total += self.values[full] * frac * dt;
                }
            }
            Sampling::Point => {
                for k in 0..full {
                    total += 0.5 * (self.values[k] + self.values[k + 1]) * dt;
                }
                if frac > 0.0 {
                    let left = self.values[full];
                    let right = left + frac * (self.values[full + 1] - left);
                    total += 0.5 * (left + right) * frac * dt;
                }
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(0.0, 0.0, 3).is_err());
        assert!(TimeGrid::new(0.0, -1.0, 3).is_err());
        assert!(TimeGrid::new(0.0, 0.1, 0).is_err());
        let g = TimeGrid::new(1.0, 0.25, 4).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.time(4), 2.0);
    }

    #[test]
    fn step_and_trapezoid_integrals() {
        let g = TimeGrid::over(2.0, 4).unwrap();
        let step = RateSeries::new(g, Sampling::Interval, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((step.integrate_to(2.0).unwrap() - 5.0).abs() < 1e-15);
        assert!((step.integrate_to(0.75).unwrap() - (0.5 + 0.25 * 2.0)).abs() < 1e-15);

        let pts = RateSeries::new(g, Sampling::Point, vec![0.0, 0.5, 1.0, 1.5, 2.0]).unwrap();
        // linear data: trapezoid is exact
        assert!((pts.integrate_to(2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((pts.integrate_to(1.25).unwrap() - 1.25 * 1.25 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn coverage_gaps_are_errors() {
        let g = TimeGrid::new(0.5, 0.5, 4).unwrap();
        let s = RateSeries::constant(g, 0.1).unwrap();
        assert!(matches!(s.integrate_to(1.0), Err(Error::Coverage { .. })));
        let g = TimeGrid::over(1.0, 4).unwrap();
        let s = RateSeries::constant(g, 0.1).unwrap();
        assert!(matches!(s.integrate_to(1.5), Err(Error::Coverage { .. })));
    }
}
