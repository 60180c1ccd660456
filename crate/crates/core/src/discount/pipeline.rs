//! Final asset values in units of an approximately risk-free portfolio.

use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::rates::gauge_discount;
use crate::error::{Error, Result};
use crate::gauge::{PricePanel, RateSeries, Sampling, TimeGrid};
use crate::riskfree::{extract_market_gauge_with, to_riskfree_units, Rebalance, WeightVector};

pub const DEFAULT_WINDOW: usize = 63;
const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub rebalance: Rebalance,
    /// Rolling window, in grid steps, for the drift and volatility estimates.
    pub window: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            rebalance: Rebalance::Every(1),
            window: DEFAULT_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetValue {
    pub label: String,
    /// `s(T)` in units of the risk-free portfolio, with `s(0) = 1`.
    pub final_value: f64,
    /// `n₀/n_T` read off the data: equal to the final value.
    pub discount_factor: f64,
    /// `e^{∫(μ̂ − σ̂²/2 + A)}` with rolling estimates of `μ`, `σ`.
    pub model_discount_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountMetadata {
    pub steps: usize,
    pub dt: f64,
    pub horizon: f64,
    pub start_date: Option<NaiveDate>,
    pub end_date: Option<NaiveDate>,
    pub portfolio_labels: Vec<String>,
    pub weights: Vec<f64>,
    pub rebalance: Rebalance,
    pub window: usize,
    /// Values are reported in the gauge where `A′ = 0`.
    pub a_prime_gauge: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountReport {
    /// One row per panel column, in panel order.
    pub assets: Vec<AssetValue>,
    /// The risk-free portfolio's own final value, 1 by construction.
    pub riskfree_final_value: f64,
    pub cash_label: String,
    /// `n₀` for `n_T = 1` unit of cash.
    pub cash_discount_factor: f64,
    pub metadata: DiscountMetadata,
}

impl DiscountReport {
    /// Aligned plain-text table of final values.
    pub fn table(&self) -> String {
        let title = "Final Asset Values";
        let width = self
            .assets
            .iter()
            .map(|a| a.label.chars().count())
            .max()
            .unwrap_or(0)
            .max(title.len() - 8);
        let rule = format!("+{}+{}+", "-".repeat(width + 2), "-".repeat(9));
        let mut out = String::new();
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(out, "| {:^w$} |", title, w = width + 10);
        let _ = writeln!(out, "{rule}");
        for a in &self.assets {
            let _ = writeln!(out, "| {:<width$} | {:>7.3} |", a.label, a.final_value);
        }
        let _ = writeln!(out, "{rule}");
        out
    }
}

/// Cash column of a panel in risk-free units, ready to plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub dates: Option<Vec<NaiveDate>>,
    pub values: Vec<f64>,
}

struct Prepared {
    converted: PricePanel,
    a: crate::gauge::GaugeFieldA,
    cash: usize,
    portfolio: Vec<usize>,
}

fn prepare(panel: &PricePanel, weights: &WeightVector, rebalance: Rebalance) -> Result<Prepared> {
    let cash = panel.cash_column().ok_or_else(|| {
        Error::InvalidInput("panel has no cash column (tag one label with `#cash`)".into())
    })?;
    for i in 0..panel.n_assets() {
        let v = panel.price(0, i);
        if (v - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "column {i} ({}) starts at {v}, not 1; rescale every series to 1 at inception \
                 (ingest with normalization enabled)",
                panel.asset_ids()[i]
            )));
        }
    }
    let portfolio: Vec<usize> = (0..panel.n_assets()).filter(|&i| i != cash).collect();
    if portfolio.is_empty() {
        return Err(Error::InvalidInput(
            "no non-cash columns to build a portfolio from".into(),
        ));
    }
    if weights.len() != portfolio.len() {
        return Err(Error::Dimension {
            what: "weights over non-cash columns",
            expected: portfolio.len(),
            got: weights.len(),
        });
    }
    let grid = *panel.grid();
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .map(|k| portfolio.iter().map(|&i| panel.price(k, i)).collect())
        .collect();
    let ids = portfolio
        .iter()
        .map(|&i| panel.asset_ids()[i].clone())
        .collect();
    let sub = PricePanel::from_rows(grid, &rows, ids)?;
    let market = extract_market_gauge_with(&sub, weights, rebalance)?;
    let converted = to_riskfree_units(panel, &market.portfolio_value_series)?;
    Ok(Prepared {
        converted,
        a: market.a,
        cash,
        portfolio,
    })
}

/// Trailing-window estimates of `μ` and `σ` per interval from a price
/// series. Windows shorter than two returns extend forward.
pub fn rolling_moments(
    grid: &TimeGrid,
    prices: &[f64],
    window: usize,
) -> Result<(RateSeries, RateSeries)> {
    if window < 2 {
        return Err(Error::InvalidInput(format!(
            "window must be >= 2, got {window}"
        )));
    }
    let dt = grid.dt();
    let logs: Vec<f64> = prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let steps = logs.len();
    let mut mu = Vec::with_capacity(steps);
    let mut sigma = Vec::with_capacity(steps);
    for k in 0..steps {
        let start = (k + 1).saturating_sub(window);
        let end = (k + 1).max(window.min(steps));
        let sample = &logs[start..end];
        let n = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let var = if sample.len() > 1 {
            sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let s2 = var / dt;
        mu.push(mean / dt + 0.5 * s2);
        sigma.push(s2.sqrt());
    }
    Ok((
        RateSeries::new(*grid, Sampling::Interval, mu)?,
        RateSeries::new(*grid, Sampling::Interval, sigma)?,
    ))
}

/// Builds the risk-free portfolio from the non-cash columns, extracts
/// `A(t)`, and reports every column's final value in risk-free units.
pub fn empirical_pipeline(panel: &PricePanel, weights: &WeightVector) -> Result<DiscountReport> {
    empirical_pipeline_with(panel, weights, PipelineOptions::default())
}

pub fn empirical_pipeline_with(
    panel: &PricePanel,
    weights: &WeightVector,
    options: PipelineOptions,
) -> Result<DiscountReport> {
    let prep = prepare(panel, weights, options.rebalance)?;
    let grid = *panel.grid();
    let last = grid.steps();
    let horizon = grid.horizon();
    let mut assets = Vec::with_capacity(panel.n_assets());
    for i in 0..panel.n_assets() {
        let final_value = prep.converted.price(last, i);
        let (mu, sigma) = rolling_moments(&grid, &panel.column(i), options.window)?;
        let model = gauge_discount(&mu, &sigma, &prep.a, horizon)?;
        assets.push(AssetValue {
            label: panel.asset_ids()[i].clone(),
            final_value,
            discount_factor: final_value,
            model_discount_factor: model,
        });
    }
    let cash_discount_factor = assets[prep.cash].discount_factor;
    Ok(DiscountReport {
        cash_label: panel.asset_ids()[prep.cash].clone(),
        cash_discount_factor,
        riskfree_final_value: 1.0,
        metadata: DiscountMetadata {
            steps: last,
            dt: grid.dt(),
            horizon,
            start_date: panel.dates().map(|d| d[0]),
            end_date: panel.dates().map(|d| d[d.len() - 1]),
            portfolio_labels: prep
                .portfolio
                .iter()
                .map(|&i| panel.asset_ids()[i].clone())
                .collect(),
            weights: weights.as_slice().to_vec(),
            rebalance: options.rebalance,
            window: options.window,
            a_prime_gauge: true,
        },
        assets,
    })
}

/// The cash column in the gauge where `A′ = 0`.
pub fn fig1_series(panel: &PricePanel, weights: &WeightVector) -> Result<LabeledSeries> {
    let prep = prepare(panel, weights, Rebalance::Every(1))?;
    Ok(LabeledSeries {
        label: panel.asset_ids()[prep.cash].clone(),
        times: panel.grid().times(),
        dates: panel.dates().map(|d| d.to_vec()),
        values: prep.converted.column(prep.cash),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(rows: Vec<Vec<f64>>, labels: &[&str]) -> PricePanel {
        let grid = TimeGrid::over(1.0, rows.len() - 1).unwrap();
        PricePanel::from_rows(grid, &rows, labels.iter().map(|s| s.to_string()).collect())
            .unwrap()
            .with_cash_column(labels.len() - 1)
            .unwrap()
    }

    #[test]
    fn identical_assets_give_unit_values() {
        let path = [1.0, 1.1, 0.95, 1.2];
        let rows: Vec<Vec<f64>> = path.iter().map(|p| vec![*p, *p, *p]).collect();
        let p = panel(rows, &["a", "b", "usd"]);
        // cash follows the same path here
        let r = empirical_pipeline(&p, &WeightVector::equal(2).unwrap()).unwrap();
        for a in &r.assets {
            assert!((a.final_value - 1.0).abs() < 1e-15);
        }
        assert_eq!(r.riskfree_final_value, 1.0);
        let f = fig1_series(&p, &WeightVector::equal(2).unwrap()).unwrap();
        assert!(f.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn cash_declines_when_portfolio_grows() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|k| {
                let g = (0.05 * k as f64).exp();
                vec![g, g * (1.0 + 0.01 * (k as f64).sin()), 1.0]
            })
            .collect();
        let p = panel(rows, &["a", "b", "usd"]);
        let r = empirical_pipeline(&p, &WeightVector::equal(2).unwrap()).unwrap();
        assert!(r.cash_discount_factor < 1.0);
        // cash has μ̂ = σ̂ = 0 in its own units, so the model factor is e^{∫A}
        assert!((r.assets[2].model_discount_factor - r.cash_discount_factor).abs() < 1e-12);
        assert!(r.table().contains("Final Asset Values"));
        let f = fig1_series(&p, &WeightVector::equal(2).unwrap()).unwrap();
        assert_eq!(f.values[0], 1.0);
    }

    #[test]
    fn rejects_unnormalized_and_cashless() {
        let grid = TimeGrid::over(1.0, 1).unwrap();
        let p = PricePanel::from_rows(
            grid,
            &[vec![2.0, 1.0], vec![2.0, 1.0]],
            vec!["a".into(), "c".into()],
        )
        .unwrap();
        assert!(empirical_pipeline(&p, &WeightVector::equal(1).unwrap()).is_err());
        let p = p.with_cash_column(1).unwrap();
        let err = empirical_pipeline(&p, &WeightVector::equal(1).unwrap()).unwrap_err();
        assert!(err.to_string().contains("inception"));
    }
}
