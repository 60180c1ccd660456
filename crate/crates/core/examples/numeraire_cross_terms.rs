// Changing numeraire to a stochastic `Y` adds the cross term
// `⟨dY dΠ⟩/dt`: zero for deterministic or independent `Y`, `ρσ_Yσ_Π`
// when correlated.

use gaugefin::gauge::TimeGrid;
use gaugefin::sim::{
    cross_term, portfolio_dynamics, sample_numeraire, simulate, EnvironmentSeries, NumeraireSpec,
    ProcessSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = TimeGrid::over(1.0, 12)?;
    let spec = ProcessSpec::homogeneous(1, 0.05, 0.2)?;
    let paths = simulate(&spec, &EnvironmentSeries::flat(grid, 1), &grid, 20_000, 8)?;
    let pi = portfolio_dynamics(&paths, &[1.0], None)?.values;

    let cases = [
        ("deterministic", NumeraireSpec::deterministic(0.03, 1)?, 0.0),
        (
            "independent",
            NumeraireSpec::stochastic(0.0, 0.3, vec![0.0])?,
            0.0,
        ),
        (
            "correlated",
            NumeraireSpec::stochastic(0.0, 0.3, vec![0.6])?,
            0.6 * 0.3 * 0.2,
        ),
    ];
    for (name, y, expected) in cases {
        let ys = sample_numeraire(&paths, &y, 77)?;
        let c = cross_term(&grid, &ys, &pi)?;
        println!(
            "{name:>13}: {:+.5} ± {:.5} (expected {expected:+.5})",
            c.estimate, c.std_error
        );
    }
    Ok(())
}
