//! Prices, quantities, portfolios and the gauge transformation algebra.
//!
//! Two global symmetries act on an economy: a deterministic rescaling of
//! every price by `e^{φ(t)}`, and a redefinition of trade units by an
//! invertible `b(t)`. Their background fields `A` and `𝓑` live here along
//! with the transformation rules.

mod field;
mod grid;
mod panel;
mod returns;
mod trade_unit;

pub use field::{transform_gauge_a, transform_gauge_b, GaugeFieldA, GaugeFieldB, GaugeScalar};
pub use grid::{RateSeries, Sampling, TimeGrid};
pub use panel::PricePanel;
pub use returns::{nominal_return, real_return, ReturnKind, ReturnSeries};
pub use trade_unit::{condition_estimate, matrix_log, TradeUnitMap, MAX_CONDITION};
