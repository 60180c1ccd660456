//! Market-gauge extraction and the discrete self-financing balances.
//!
//! The covariant derivatives act on prices and quantities through interval
//! transporters: `(D_P s)_k = (e^{A_k dt} e^{B_k dt}ᵀ s_{k+1} − s_k)/dt` and
//! `(D_K q)_k = (e^{−B_k dt} q_{k+1} − q_k)/dt`. To first order in `dt` these
//! are `ṡ + As + Bᵀs` and `q̇ − Bq`; with `A` and `B_N` taken as log forward
//! differences both balances vanish exactly.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::weights::WeightVector;
use crate::error::{Error, Result};
use crate::gauge::{GaugeFieldA, GaugeFieldB, PricePanel};

/// How holdings follow the target weights over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rebalance {
    /// Restore target weights every `n` grid steps (`n = 1`: every step).
    Every(usize),
    BuyAndHold,
}

impl Default for Rebalance {
    fn default() -> Self {
        Rebalance::Every(1)
    }
}

/// Market gauge fields read off an approximately risk-free portfolio.
#[derive(Debug, Clone)]
pub struct MarketGaugeResult {
    pub a: GaugeFieldA,
    pub b_n: GaugeFieldB,
    /// Portfolio value `s·q`, starting at 1.
    pub portfolio_value_series: Vec<f64>,
    /// Holdings `qⁱ(t_k)`, rows are grid points.
    pub quantities: DMatrix<f64>,
}

/// Holdings of a self-financing portfolio with initial value 1.
pub fn build_holdings(
    panel: &PricePanel,
    w: &WeightVector,
    rebalance: Rebalance,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = panel.n_assets();
    if w.len() != n {
        return Err(Error::Dimension {
            what: "weight vector",
            expected: n,
            got: w.len(),
        });
    }
    if let Rebalance::Every(0) = rebalance {
        return Err(Error::InvalidInput("rebalance period must be >= 1".into()));
    }
    let rows = panel.grid().len();
    let wts = w.as_slice();
    let mut q = DMatrix::zeros(rows, n);
    let mut values = Vec::with_capacity(rows);
    let mut value = 1.0;
    for i in 0..n {
        q[(0, i)] = wts[i] * value / panel.price(0, i);
    }
    values.push(value);
    for k in 1..rows {
        value = (0..n).map(|i| panel.price(k, i) * q[(k - 1, i)]).sum();
        if value == 0.0 || !value.is_finite() {
            return Err(Error::ZeroDivisor(k));
        }
        let rebalance_now = match rebalance {
            Rebalance::Every(m) => k % m == 0,
            Rebalance::BuyAndHold => false,
        };
        for i in 0..n {
            q[(k, i)] = if rebalance_now {
                wts[i] * value / panel.price(k, i)
            } else {
                q[(k - 1, i)]
            };
        }
        values.push(value);
    }
    Ok((q, values))
}

/// `A(t) = −d/dt ln(s·q)` and the diagonal `B_N` with entries `d/dt ln qⁱ`.
pub fn extract_market_gauge(panel: &PricePanel, w: &WeightVector) -> Result<MarketGaugeResult> {
    extract_market_gauge_with(panel, w, Rebalance::default())
}

pub fn extract_market_gauge_with(
    panel: &PricePanel,
    w: &WeightVector,
    rebalance: Rebalance,
) -> Result<MarketGaugeResult> {
    let (q, values) = build_holdings(panel, w, rebalance)?;
    let grid = *panel.grid();
    let dt = grid.dt();
    let a: Vec<f64> = values
        .windows(2)
        .map(|v| -(v[1] / v[0]).ln() / dt)
        .collect();
    let n = panel.n_assets();
    let mut diag = Vec::with_capacity(grid.steps());
    for k in 0..grid.steps() {
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let (q0, q1) = (q[(k, i)], q[(k + 1, i)]);
            let beta = if q0 == q1 {
                0.0
            } else if q0 != 0.0 && q1 / q0 > 0.0 {
                (q1 / q0).ln() / dt
            } else {
                return Err(Error::InvalidInput(format!(
                    "holding {i} changes sign or leaves zero at step {k}; B_N is undefined"
                )));
            };
            row.push(beta);
        }
        diag.push(row);
    }
    Ok(MarketGaugeResult {
        a: GaugeFieldA::new(grid, a)?,
        b_n: GaugeFieldB::diagonal(grid, diag)?,
        portfolio_value_series: values,
        quantities: q,
    })
}

/// Prices divided pointwise by the risk-free portfolio's value: the gauge
/// in which the background field `A'` vanishes.
pub fn to_riskfree_units(panel: &PricePanel, riskfree_values: &[f64]) -> Result<PricePanel> {
    let rows = panel.grid().len();
    if riskfree_values.len() != rows {
        return Err(Error::Dimension {
            what: "risk-free value series",
            expected: rows,
            got: riskfree_values.len(),
        });
    }
    if let Some(k) = riskfree_values.iter().position(|v| *v == 0.0) {
        return Err(Error::ZeroDivisor(k));
    }
    if let Some(k) = riskfree_values
        .iter()
        .position(|v| !(*v > 0.0) || !v.is_finite())
    {
        return Err(Error::NonPositive {
            index: k,
            column: 0,
            value: riskfree_values[k],
        });
    }
    let mut prices = panel.prices().clone();
    for (k, v) in riskfree_values.iter().enumerate() {
        prices.row_mut(k).scale_mut(1.0 / v);
    }
    let mut out = PricePanel::new(*panel.grid(), prices, panel.asset_ids().to_vec())?;
    if let Some(c) = panel.cash_column() {
        out = out.with_cash_column(c)?;
    }
    if let Some(d) = panel.dates() {
        out = out.with_dates(d.to_vec())?;
    }
    Ok(out)
}

/// Residuals of the two self-financing conditions on every interval.
#[derive(Debug, Clone)]
pub struct BalanceResiduals {
    /// `(D_P s)·q`, per interval.
    pub price: Vec<f64>,
    /// `s·(D_K q)`, per interval.
    pub quantity: Vec<f64>,
}

impl BalanceResiduals {
    /// Largest residual relative to the portfolio value on its interval.
    pub fn max_relative(&self, values: &[f64]) -> f64 {
        self.price
            .iter()
            .chain(&self.quantity)
            .zip(values.iter().chain(values))
            .map(|(r, v)| r.abs() / v.abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates both balances for holdings `q` against fields `A`, `B_N`.
pub fn balance_residuals(
    panel: &PricePanel,
    quantities: &DMatrix<f64>,
    a: &GaugeFieldA,
    b_n: &GaugeFieldB,
) -> Result<BalanceResiduals> {
    let grid = panel.grid();
    grid.ensure_same(a.grid(), "balance: A")?;
    grid.ensure_same(b_n.grid(), "balance: B_N")?;
    if quantities.shape() != panel.prices().shape() {
        return Err(Error::Dimension {
            what: "quantity matrix",
            expected: panel.prices().nrows(),
            got: quantities.nrows(),
        });
    }
    let dt = grid.dt();
    let mut price = Vec::with_capacity(grid.steps());
    let mut quantity = Vec::with_capacity(grid.steps());
    for k in 0..grid.steps() {
        let s0 = panel.price_row(k);
        let s1 = panel.price_row(k + 1);
        let q0: DVector<f64> = quantities.row(k).transpose();
        let q1: DVector<f64> = quantities.row(k + 1).transpose();
        let b = b_n.matrix(k);
        let forward = (b * dt).exp();
        let backward = (b * -dt).exp();
        let moved_s = forward.transpose() * &s1 * (a.values()[k] * dt).exp();
        price.push((moved_s - &s0).dot(&q0) / dt);
        let moved_q = backward * q1;
        quantity.push(s1.dot(&(moved_q - q0)) / dt);
    }
    Ok(BalanceResiduals { price, quantity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::TimeGrid;

    fn panel(rows: &[Vec<f64>]) -> PricePanel {
        let n = rows[0].len();
        let grid = TimeGrid::over(1.0, rows.len() - 1).unwrap();
        PricePanel::from_rows(grid, rows, (0..n).map(|i| format!("x{i}")).collect()).unwrap()
    }

    #[test]
    fn constant_prices_give_zero_fields() {
        let p = panel(&vec![vec![2.0, 5.0, 1.0]; 6]);
        let w = WeightVector::equal(3).unwrap();
        for reb in [Rebalance::Every(1), Rebalance::BuyAndHold] {
            let r = extract_market_gauge_with(&p, &w, reb).unwrap();
            assert!(r.a.values().iter().all(|v| *v == 0.0));
            assert_eq!(r.b_n.max_abs(), 0.0);
        }
    }

    #[test]
    fn exponential_growth_gives_constant_a() {
        let g = 0.07;
        let grid = TimeGrid::over(2.0, 10).unwrap();
        let rows: Vec<Vec<f64>> = grid
            .times()
            .iter()
            .map(|t| vec![(g * t).exp(), 3.0 * (g * t).exp()])
            .collect();
        let p = PricePanel::from_rows(grid, &rows, vec!["a".into(), "b".into()]).unwrap();
        let r = extract_market_gauge(&p, &WeightVector::new(vec![0.3, 0.7]).unwrap()).unwrap();
        assert!(r.a.values().iter().all(|v| (v + g).abs() < 1e-12));
    }

    #[test]
    fn buy_and_hold_has_no_trade_unit_field() {
        let p = panel(&[vec![1.0, 1.0], vec![1.2, 0.9], vec![1.1, 1.3]]);
        let r =
            extract_market_gauge_with(&p, &WeightVector::equal(2).unwrap(), Rebalance::BuyAndHold)
                .unwrap();
        assert_eq!(r.b_n.max_abs(), 0.0);
        let r = extract_market_gauge(&p, &WeightVector::equal(2).unwrap()).unwrap();
        assert!(r.b_n.max_abs() > 0.0);
    }

    #[test]
    fn rebalanced_balances_vanish() {
        let p = panel(&[
            vec![1.0, 1.0, 1.0],
            vec![1.1, 0.95, 1.02],
            vec![1.05, 1.1, 0.9],
            vec![1.2, 1.0, 1.1],
        ]);
        let w = WeightVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let r = extract_market_gauge(&p, &w).unwrap();
        let res = balance_residuals(&p, &r.quantities, &r.a, &r.b_n).unwrap();
        assert!(res.max_relative(&r.portfolio_value_series) < 1e-12);
    }

    #[test]
    fn riskfree_units_and_zero_divisor() {
        let p = panel(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let out = to_riskfree_units(&p, &[1.0, 2.0]).unwrap();
        assert_eq!(out.column(0), vec![1.0, 1.0]);
        assert!(matches!(
            to_riskfree_units(&p, &[1.0, 0.0]),
            Err(Error::ZeroDivisor(1))
        ));
    }
}
