//! Nominal and real (gauge-invariant) returns.

use serde::{Deserialize, Serialize};

use super::field::GaugeFieldA;
use super::grid::{RateSeries, Sampling, TimeGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnKind {
    Nominal,
    Real,
}

/// Log-returns per unit time, one per grid interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    grid: TimeGrid,
    values: Vec<f64>,
    kind: ReturnKind,
}

impl ReturnSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>, kind: ReturnKind) -> Result<Self> {
        if values.len() != grid.steps() {
            return Err(Error::Dimension {
                what: "return series length",
                expected: grid.steps(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values, kind })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ReturnKind {
        self.kind
    }

    pub fn as_rate_series(&self) -> Result<RateSeries> {
        RateSeries::new(self.grid, Sampling::Interval, self.values.clone())
    }
}

/// `(ln v_{k+1} − ln v_k)/dt` on every interval.
pub fn nominal_return(grid: &TimeGrid, values: &[f64]) -> Result<ReturnSeries> {
    if values.len() != grid.len() {
        return Err(Error::Dimension {
            what: "value series length",
            expected: grid.len(),
            got: values.len(),
        });
    }
    if let Some(k) = values.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositive {
            index: k,
            column: 0,
            value: values[k],
        });
    }
    let dt = grid.dt();
    let r = values
        .windows(2)
        .map(|w| (w[1].ln() - w[0].ln()) / dt)
        .collect();
    ReturnSeries::new(*grid, r, ReturnKind::Nominal)
}

/// Real return `μ = π̇/π + A`: the excess over the risk-free rate.
pub fn real_return(grid: &TimeGrid, values: &[f64], a: &GaugeFieldA) -> Result<ReturnSeries> {
    grid.ensure_same(a.grid(), "real return")?;
    let nominal = nominal_return(grid, values)?;
    let mu = nominal
        .values
        .iter()
        .zip(a.values())
        .map(|(r, a)| r + a)
        .collect();
    ReturnSeries::new(*grid, mu, ReturnKind::Real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_exponential_series() {
        let g = TimeGrid::over(2.0, 8).unwrap();
        let r = nominal_return(&g, &[3.0; 9]).unwrap();
        assert!(r.values().iter().all(|v| *v == 0.0));
        assert_eq!(r.kind(), ReturnKind::Nominal);

        let vals: Vec<f64> = g.times().iter().map(|t| (0.37 * t).exp()).collect();
        let r = nominal_return(&g, &vals).unwrap();
        assert!(r.values().iter().all(|v| (v - 0.37).abs() < 1e-13));
    }

    #[test]
    fn riskfree_growth_has_zero_real_return() {
        let g = TimeGrid::over(1.0, 12).unwrap();
        let vals: Vec<f64> = g.times().iter().map(|t| (0.05 * t).exp()).collect();
        let a = GaugeFieldA::constant(g, -0.05).unwrap();
        let mu = real_return(&g, &vals, &a).unwrap();
        assert_eq!(mu.kind(), ReturnKind::Real);
        assert!(mu.values().iter().all(|v| v.abs() < 1e-13));

        let flat = real_return(&g, &[1.0; 13], &GaugeFieldA::constant(g, 0.0).unwrap()).unwrap();
        assert!(flat.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_nonpositive_and_mismatch() {
        let g = TimeGrid::over(1.0, 2).unwrap();
        assert!(nominal_return(&g, &[1.0, 0.0, 1.0]).is_err());
        assert!(nominal_return(&g, &[1.0, 1.0]).is_err());
        let other = TimeGrid::over(2.0, 2).unwrap();
        let a = GaugeFieldA::constant(other, 0.0).unwrap();
        assert!(matches!(
            real_return(&g, &[1.0; 3], &a),
            Err(Error::GridMismatch(_))
        ));
    }
}
