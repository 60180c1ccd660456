//! Gridded price/quantity panels.

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use super::field::GaugeScalar;
use super::grid::TimeGrid;
use super::trade_unit::TradeUnitMap;
use crate::error::{Error, Result};

/// Prices `s_i(t_k)` (and optionally holdings `q^i(t_k)`) for `N` instruments
/// on a uniform time grid. Rows are grid points, columns are instruments.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    grid: TimeGrid,
    prices: DMatrix<f64>,
    quantities: Option<DMatrix<f64>>,
    asset_ids: Vec<String>,
    cash: Option<usize>,
    dates: Option<Vec<NaiveDate>>,
}

impl PricePanel {
    pub fn new(grid: TimeGrid, prices: DMatrix<f64>, asset_ids: Vec<String>) -> Result<Self> {
        if prices.nrows() != grid.len() {
            return Err(Error::Dimension {
                what: "panel rows",
                expected: grid.len(),
                got: prices.nrows(),
            });
        }
        if prices.ncols() != asset_ids.len() {
            return Err(Error::Dimension {
                what: "panel columns",
                expected: asset_ids.len(),
                got: prices.ncols(),
            });
        }
        if prices.ncols() == 0 {
            return Err(Error::InvalidInput("panel needs at least one asset".into()));
        }
        for k in 0..prices.nrows() {
            for i in 0..prices.ncols() {
                let v = prices[(k, i)];
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::NonPositive {
                        index: k,
                        column: i,
                        value: v,
                    });
                }
            }
        }
        Ok(Self {
            grid,
            prices,
            quantities: None,
            asset_ids,
            cash: None,
            dates: None,
        })
    }

    /// Builds a panel from row-major price rows.
    pub fn from_rows(grid: TimeGrid, rows: &[Vec<f64>], asset_ids: Vec<String>) -> Result<Self> {
        let n = asset_ids.len();
        if let Some((k, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension {
                what: "panel row width",
                expected: n,
                got: rows[k].len().max(r.len()),
            });
        }
        let prices = DMatrix::from_fn(rows.len(), n, |k, i| rows[k][i]);
        Self::new(grid, prices, asset_ids)
    }

    pub fn with_quantities(mut self, quantities: DMatrix<f64>) -> Result<Self> {
        if quantities.shape() != self.prices.shape() {
            return Err(Error::Dimension {
                what: "quantity matrix rows",
                expected: self.prices.nrows(),
                got: quantities.nrows(),
            });
        }
        if quantities.iter().any(|q| !q.is_finite()) {
            return Err(Error::InvalidInput("non-finite quantity".into()));
        }
        self.quantities = Some(quantities);
        Ok(self)
    }

    /// Holds the same quantities at every grid point.
    pub fn with_constant_quantities(self, q: &[f64]) -> Result<Self> {
        if q.len() != self.n_assets() {
            return Err(Error::Dimension {
                what: "quantity vector",
                expected: self.n_assets(),
                got: q.len(),
            });
        }
        let rows = self.grid.len();
        let m = DMatrix::from_fn(rows, q.len(), |_, i| q[i]);
        self.with_quantities(m)
    }

    pub fn with_cash_column(mut self, column: usize) -> Result<Self> {
        if column >= self.n_assets() {
            return Err(Error::InvalidInput(format!(
                "cash column {column} out of range"
            )));
        }
        self.cash = Some(column);
        Ok(self)
    }

    pub fn with_dates(mut self, dates: Vec<NaiveDate>) -> Result<Self> {
        if dates.len() != self.grid.len() {
            return Err(Error::Dimension {
                what: "date count",
                expected: self.grid.len(),
                got: dates.len(),
            });
        }
        self.dates = Some(dates);
        Ok(self)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn prices(&self) -> &DMatrix<f64> {
        &self.prices
    }

    pub fn quantities(&self) -> Option<&DMatrix<f64>> {
        self.quantities.as_ref()
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn cash_column(&self) -> Option<usize> {
        self.cash
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    pub fn n_assets(&self) -> usize {
        self.prices.ncols()
    }

    pub fn price(&self, k: usize, i: usize) -> f64 {
        self.prices[(k, i)]
    }

    pub fn price_row(&self, k: usize) -> DVector<f64> {
        self.prices.row(k).transpose()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.prices.column(i).iter().copied().collect()
    }

    /// Portfolio value `Π = P·K` at grid point `k`.
    pub fn portfolio_value(&self, k: usize) -> Result<f64> {
        let q = self.quantities.as_ref().ok_or(Error::MissingHoldings)?;
        if k > self.grid.steps() {
            return Err(Error::InvalidInput(format!(
                "time index {k} beyond grid ({} steps)",
                self.grid.steps()
            )));
        }
        Ok(self.prices.row(k).dot(&q.row(k)))
    }

    /// Portfolio value at every grid point.
    pub fn portfolio_values(&self) -> Result<Vec<f64>> {
        (0..self.grid.len())
            .map(|k| self.portfolio_value(k))
            .collect()
    }

    /// Global price rescaling `s → e^{φ(t)} s`; quantities untouched.
    pub fn apply_price_gauge(&self, phi: &GaugeScalar) -> Result<Self> {
        self.grid.ensure_same(phi.grid(), "price gauge")?;
        let mut out = self.clone();
        for (k, &p) in phi.values().iter().enumerate() {
            let scale = p.exp();
            out.prices.row_mut(k).scale_mut(scale);
        }
        for (k, row) in out.prices.row_iter().enumerate() {
            if let Some(i) = row.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(Error::NonPositive {
                    index: k,
                    column: i,
                    value: row[i],
                });
            }
        }
        Ok(out)
    }

    /// Trade-unit redefinition `q → b q`, `s → (b⁻¹)ᵀ s` at every grid point.
    ///
    /// The transformed prices need not stay positive for a general `b`
    /// (a unit made of a long/short basket has no positive price), so the
    /// result is returned without the positivity check.
    pub fn apply_trade_unit_gauge(&self, b: &TradeUnitMap) -> Result<Self> {
        self.grid.ensure_same(b.grid(), "trade-unit gauge")?;
        if b.dim() != self.n_assets() {
            return Err(Error::Dimension {
                what: "trade-unit map size",
                expected: self.n_assets(),
                got: b.dim(),
            });
        }
        let mut out = self.clone();
        for k in 0..self.grid.len() {
            let s = self.price_row(k);
            let s_new = b.inverse(k).transpose() * s;
            out.prices.set_row(k, &s_new.transpose());
            if let (Some(q), Some(qo)) = (self.quantities.as_ref(), out.quantities.as_mut()) {
                let q_new = b.matrix(k) * q.row(k).transpose();
                qo.set_row(k, &q_new.transpose());
            }
        }
        Ok(out)
    }
}
