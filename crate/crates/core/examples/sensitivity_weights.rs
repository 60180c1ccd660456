// Weights whose portfolio drift does not respond to small errors in the
// environment forecast: `Σ wᵢ dμᵢ/dξ = 0` on the capped simplex.

use gaugefin::riskfree::{sensitivity_neutral_weights, SensitivityProblem};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = StdRng::seed_from_u64(5);
    let gradients = DMatrix::from_fn(256, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
    let problem = SensitivityProblem::new(gradients)?.with_cap(2.0)?;
    let result = sensitivity_neutral_weights(&problem)?;
    let (lo, hi) = problem.bounds();
    let w = result.weights.as_slice();
    println!("equal-weight residual {:.4}", result.base_residual);
    println!(
        "optimized residual    {:.2e} (neutral: {})",
        result.residual, result.neutral
    );
    println!(
        "weights in [{:.5}, {:.5}], bounds [{lo:.5}, {hi:.5}]",
        w.iter().cloned().fold(f64::INFINITY, f64::min),
        result.weights.max()
    );
    Ok(())
}
