//! Asymptotically risk-free portfolios and the market gauge they define.

mod convergence;
mod insensitivity;
mod market;
mod sensitivity;
mod weights;

pub use convergence::{
    analytic_scaling, convergence_study, etemadi_check, fit_line, EtemadiReport, LineFit,
    ScalingReport, StudySettings,
};
pub use insensitivity::{
    default_tolerance, delta_hedge, holdings_residual, insensitivity_residual,
    is_price_insensitive, INSENSITIVITY_RTOL,
};
pub use market::{
    balance_residuals, build_holdings, extract_market_gauge, extract_market_gauge_with,
    to_riskfree_units, BalanceResiduals, MarketGaugeResult, Rebalance,
};
pub use sensitivity::{
    project_capped_simplex, sensitivity_neutral_weights, SensitivityProblem, SensitivityResult,
    DEFAULT_FLOOR_FRACTION, DEFAULT_NEUTRALITY_TOLERANCE,
};
pub use weights::{WeightScheme, WeightVector, DEFAULT_CAP_CONSTANT};
