// Final values of the bundled synthetic index panel in units of an
// equal-weight portfolio, the cash series in the `A′ = 0` gauge, and the
// textbook factor for a flat 4.06% yield over ten years.

use gaugefin::discount::{empirical_pipeline, fig1_series, textbook_discount};
use gaugefin::gauge::{RateSeries, TimeGrid};
use gaugefin::io::bundled_panel;
use gaugefin::riskfree::WeightVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let panel = bundled_panel()?;
    let w = WeightVector::equal(panel.n_assets() - 1)?;
    let report = empirical_pipeline(&panel, &w)?;
    print!("{}", report.table());
    println!(
        "cash discount factor n0 = {:.3}",
        report.cash_discount_factor
    );

    let fig1 = fig1_series(&panel, &w)?;
    let dates = fig1.dates.as_ref().unwrap();
    for k in (0..fig1.values.len()).step_by(104) {
        println!("{}  {:.4}", dates[k], fig1.values[k]);
    }

    let grid = TimeGrid::over(10.0, 120)?;
    println!(
        "textbook 4.06% over 10y: {:.3}",
        textbook_discount(&RateSeries::constant(grid, 0.0406)?, 10.0)?
    );
    Ok(())
}
