use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{GaugeFieldA, RateSeries};

/// Textbook discount factor `d(0,T) = e^{−∫₀ᵀ r dt}`.
pub fn textbook_discount(r: &RateSeries, horizon: f64) -> Result<f64> {
    Ok((-r.integrate_to(horizon)?).exp())
}

/// `n₀/n_T = e^{∫₀ᵀ (μ − σ²/2 + A) dt}`.
///
/// The exponent pairs a return with the gauge field, so simultaneous
/// shifts `μ → μ + φ̇`, `A → A − φ̇` leave it unchanged.
pub fn gauge_discount(
    mu: &RateSeries,
    sigma: &RateSeries,
    a: &GaugeFieldA,
    horizon: f64,
) -> Result<f64> {
    let drift = mu.integrate_to(horizon)?;
    let variance = sigma.map(|s| 0.5 * s * s)?.integrate_to(horizon)?;
    let field = a.as_rate_series().integrate_to(horizon)?;
    Ok((drift - variance + field).exp())
}

/// `n_T = n₀ s(0)/s(T)`: the same value held in units of the asset at `T`.
pub fn forward_translate(n0: f64, s0: f64, s_t: f64) -> Result<f64> {
    for (what, v) in [("s(0)", s0), ("s(T)", s_t)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{what} must be positive, got {v}"
            )));
        }
    }
    Ok(n0 * s0 / s_t)
}

/// Inverse of [`forward_translate`].
pub fn backward_translate(n_t: f64, s0: f64, s_t: f64) -> Result<f64> {
    forward_translate(n_t, s_t, s0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DiscountMode {
    Textbook {
        r: RateSeries,
    },
    Gauge {
        mu: RateSeries,
        sigma: RateSeries,
        a: GaugeFieldA,
    },
}

/// Everything needed to discount one asset over `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountSpec {
    pub label: String,
    pub horizon: f64,
    pub mode: DiscountMode,
}

impl DiscountSpec {
    pub fn factor(&self) -> Result<f64> {
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidInput(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        match &self.mode {
            DiscountMode::Textbook { r } => textbook_discount(r, self.horizon),
            DiscountMode::Gauge { mu, sigma, a } => gauge_discount(mu, sigma, a, self.horizon),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::TimeGrid;

    #[test]
    fn textbook_values() {
        let g = TimeGrid::over(10.0, 120).unwrap();
        let zero = RateSeries::constant(g, 0.0).unwrap();
        assert_eq!(textbook_discount(&zero, 10.0).unwrap(), 1.0);
        let r = RateSeries::constant(g, 0.0406).unwrap();
        assert!((textbook_discount(&r, 10.0).unwrap() - 0.666).abs() < 1e-3);
        let r = RateSeries::constant(g, 0.1).unwrap();
        assert!((textbook_discount(&r, 10.0).unwrap() - (-1.0f64).exp()).abs() < 1e-14);
        assert!(textbook_discount(&r, 11.0).is_err());
    }

    #[test]
    fn gauge_reduces_to_textbook() {
        let g = TimeGrid::over(5.0, 50).unwrap();
        let r = RateSeries::new(
            g,
            crate::gauge::Sampling::Interval,
            (0..50).map(|k| 0.01 + 0.001 * k as f64).collect(),
        )
        .unwrap();
        let zero = RateSeries::constant(g, 0.0).unwrap();
        let a = GaugeFieldA::new(g, r.values().iter().map(|v| -v).collect()).unwrap();
        assert_eq!(
            gauge_discount(&zero, &zero, &a, 5.0).unwrap(),
            textbook_discount(&r, 5.0).unwrap()
        );
    }

    #[test]
    fn translation() {
        assert_eq!(forward_translate(3.0, 2.0, 2.0).unwrap(), 3.0);
        assert_eq!(forward_translate(3.0, 1.0, 2.0).unwrap(), 1.5);
        let n_t = forward_translate(0.7, 1.3, 0.9).unwrap();
        assert!((backward_translate(n_t, 1.3, 0.9).unwrap() - 0.7).abs() < 1e-15);
        assert!(forward_translate(1.0, 0.0, 1.0).is_err());
    }
}
