//! Gauge-invariant portfolio analytics.
//!
//! Builds approximately risk-free portfolios out of many assets, extracts
//! the market gauge field `A(t)` they define, prices options under the
//! gauge-field Black–Scholes equation, and discounts cash flows with a
//! gauge-invariant discount factor.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discount;
pub mod error;
pub mod gauge;
pub mod io;
pub mod pricer;
pub mod riskfree;
pub mod sim;

pub use error::{Error, Result};
