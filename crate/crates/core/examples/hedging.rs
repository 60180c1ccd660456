// Delta hedging as price insensitivity, and the gauge-invariant
// two-price pricing equation evaluated on candidate solutions.

use gaugefin::pricer::{
    bs_closed_form, merton_fd_check, merton_residual, solve_gauge_bs, MertonPoint, Payoff,
    PdeProblem,
};
use gaugefin::riskfree::{default_tolerance, delta_hedge, holdings_residual, is_price_insensitive};
use nalgebra::DMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let surface = solve_gauge_bs(&PdeProblem::european(
        Payoff::Call { strike: 100.0 },
        0.2,
        1.0,
    )?)?;
    let delta = surface.delta(100.0);
    let q = delta_hedge(delta, 1.0);
    let deltas = DMatrix::from_row_slice(2, 1, &[1.0, delta]);
    let holdings = [q, 1.0];
    let residual = holdings_residual(&holdings, &deltas)?;
    println!(
        "hedge {q:.4} shares per option; residual {:.1e}; insensitive: {}",
        residual[0],
        is_price_insensitive(&residual, default_tolerance(&holdings, &deltas))
    );

    let share = MertonPoint {
        v: 50.0,
        dv_dt: 0.0,
        dv_ds: 1.0,
        dv_dh: 0.0,
        d2v_ds2: 0.0,
        d2v_dh2: 0.0,
        s: 50.0,
        h: 2.0,
    };
    println!(
        "one share: residual {} for any A, B",
        merton_residual(&share, 0.3, 0.05, -0.4, 1.7)
    );

    let check = merton_fd_check(
        |s, _h, t| bs_closed_form(s, 100.0, 0.2, 1.0 - t),
        110.0,
        1.0,
        0.25,
        1e-3,
        0.2,
        0.0,
        0.0,
        0.0,
    );
    println!(
        "call candidate: residual {:.2e} within truncation bound {:.2e}",
        check.residual, check.bound
    );
    Ok(())
}
