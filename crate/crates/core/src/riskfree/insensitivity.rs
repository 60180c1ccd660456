use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gauge::PricePanel;

/// Relative scale of the default insensitivity tolerance.
pub const INSENSITIVITY_RTOL: f64 = 1e-8;

/// `residualᵢ = Σ_α K^α ∂P_α/∂sᵢ` for the holdings at grid point `k`.
///
/// The panel's columns are the instruments `P_α` and its quantities are the
/// holdings `K^α`; `deltas` is `[n_instruments × n_assets]`.
pub fn insensitivity_residual(
    panel: &PricePanel,
    k: usize,
    deltas: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    let q = panel.quantities().ok_or(Error::MissingHoldings)?;
    if k >= q.nrows() {
        return Err(Error::Dimension {
            what: "evaluation index",
            expected: q.nrows(),
            got: k,
        });
    }
    let holdings: Vec<f64> = q.row(k).iter().copied().collect();
    holdings_residual(&holdings, deltas)
}

/// [`insensitivity_residual`] for a bare holdings vector.
pub fn holdings_residual(holdings: &[f64], deltas: &DMatrix<f64>) -> Result<Vec<f64>> {
    if deltas.nrows() != holdings.len() {
        return Err(Error::Dimension {
            what: "delta matrix rows (instruments)",
            expected: holdings.len(),
            got: deltas.nrows(),
        });
    }
    Ok((0..deltas.ncols())
        .map(|i| {
            holdings
                .iter()
                .enumerate()
                .map(|(a, k)| k * deltas[(a, i)])
                .sum()
        })
        .collect())
}

/// `1e-8·‖K‖·‖∂P‖` with Euclidean / Frobenius norms.
pub fn default_tolerance(holdings: &[f64], deltas: &DMatrix<f64>) -> f64 {
    let k_norm = holdings.iter().map(|v| v * v).sum::<f64>().sqrt();
    INSENSITIVITY_RTOL * k_norm * deltas.norm()
}

/// Price-insensitive when `max|residual| ≤ tolerance`.
pub fn is_price_insensitive(residual: &[f64], tolerance: f64) -> bool {
    residual.iter().all(|r| r.abs() <= tolerance)
}

/// Asset holding that neutralizes `option_qty` options: `q = −Q ∂V/∂s`.
pub fn delta_hedge(option_delta: f64, option_qty: f64) -> f64 {
    -option_qty * option_delta
}
