//! Option pricing under the gauge-field Black–Scholes equation.

mod closed_form;
mod merton;
mod pde;
mod tridiag;

pub use closed_form::{
    bs_call_delta, bs_call_with_rate, bs_closed_form, bs_put_with_rate, effective_vol, EffectiveVol,
};
pub use merton::{
    finite_difference_point, hedge_ratio, merton_fd_check, merton_residual, MertonPoint,
    ResidualCheck,
};
pub use pde::{
    solve_gauge_bs, solve_primed_gauge, Boundary, OptionSurface, Payoff, PdeProblem, PriceGrid,
    DEFAULT_GRID_SPAN, DEFAULT_SPACE_INTERVALS, DEFAULT_TIME_STEPS,
};
pub use tridiag::solve_tridiagonal;
