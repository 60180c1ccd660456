//! Seeded Monte Carlo for environment-driven price processes, diversified
//! portfolios and numeraire rescalings.

mod noise;
mod numeraire;
mod portfolio;
mod process;

pub use noise::{NoiseKind, NoiseStream};
pub use numeraire::{
    apply_numeraire, cross_term, sample_numeraire, CrossTermEstimate, NumeraireMode, NumeraireSpec,
};
pub use portfolio::{
    analytic_sigma_hat, pooled_sigma, portfolio_dynamics, prefix_portfolio_log_returns,
    return_volatility, series_volatility, PortfolioDynamics,
};
pub use process::{simulate, EnvironmentSeries, Functional, PathSet, ProcessSpec, Simulator};
