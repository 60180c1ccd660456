// The stochastic term of a diversified portfolio fades as `N^{-1/2}`,
// and any two positive weightings converge to the same limit.

use gaugefin::gauge::TimeGrid;
use gaugefin::io::random_positive_weights;
use gaugefin::riskfree::{convergence_study, etemadi_check, StudySettings, WeightVector};
use gaugefin::sim::{EnvironmentSeries, Functional, NoiseKind, ProcessSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 1024;
    let vols = (0..n)
        .map(|i| 0.1 + 0.3 * ((i * 37) % n) as f64 / n as f64)
        .collect();
    let spec = ProcessSpec::new(
        n,
        Functional::uniform(n, 0.05),
        Functional::Constant(vols),
        NoiseKind::Normal,
    )?;
    let settings = StudySettings {
        grid: TimeGrid::over(1.0, 4)?,
        n_paths: 2000,
        seed: 1,
    };
    let env = EnvironmentSeries::flat(settings.grid, 1);
    let sizes = [16, 64, 256, 1024];

    let scaling = convergence_study(&spec, &env, &sizes, &settings)?;
    for (n, s) in scaling.sizes.iter().zip(&scaling.realized_sigma) {
        println!("N = {n:5}: σ̂ = {s:.5}");
    }
    println!(
        "fitted slope {:.3} (analytic {:.3})",
        scaling.fit.slope,
        scaling.analytic_fit.unwrap().slope
    );

    let equal = WeightVector::equal(n)?;
    let random = random_positive_weights(n, 99)?;
    let etemadi = etemadi_check(&spec, &env, &equal, &random, &sizes, &settings)?;
    println!("divergence of cumulative returns: {:?}", etemadi.divergence);
    println!(
        "decay from N = 16 to N = 1024: {:.3}",
        etemadi.decay_ratio()
    );
    Ok(())
}
