//! Time-dependent trade-unit redefinitions `b(t) ∈ GL(N)`.

use nalgebra::DMatrix;

use super::grid::TimeGrid;
use crate::error::{Error, Result};

/// Matrices with a condition estimate above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// A trade-unit map: one invertible `N×N` matrix per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeUnitMap {
    grid: TimeGrid,
    b: Vec<DMatrix<f64>>,
    b_inv: Vec<DMatrix<f64>>,
}

impl TradeUnitMap {
    pub fn new(grid: TimeGrid, b: Vec<DMatrix<f64>>) -> Result<Self> {
        if b.len() != grid.len() {
            return Err(Error::Dimension {
                what: "trade-unit map length",
                expected: grid.len(),
                got: b.len(),
            });
        }
        let n = b[0].nrows();
        let mut b_inv = Vec::with_capacity(b.len());
        for (k, m) in b.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension {
                    what: "trade-unit matrix size",
                    expected: n,
                    got: m.nrows().max(m.ncols()),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite trade-unit entry at {k}"
                )));
            }
            let condition = condition_estimate(m);
            if !(condition <= MAX_CONDITION) {
                return Err(Error::Singular {
                    index: k,
                    condition,
                });
            }
            let inv = m.clone().try_inverse().ok_or(Error::Singular {
                index: k,
                condition: f64::INFINITY,
            })?;
            b_inv.push(inv);
        }
        Ok(Self { grid, b, b_inv })
    }

    pub fn constant(grid: TimeGrid, b: DMatrix<f64>) -> Result<Self> {
        Self::new(grid, vec![b; grid.len()])
    }

    pub fn identity(grid: TimeGrid, n: usize) -> Result<Self> {
        Self::constant(grid, DMatrix::identity(n, n))
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> DMatrix<f64>) -> Result<Self> {
        Self::new(grid, grid.times().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.b[0].nrows()
    }

    pub fn matrix(&self, k: usize) -> &DMatrix<f64> {
        &self.b[k]
    }

    pub fn inverse(&self, k: usize) -> &DMatrix<f64> {
        &self.b_inv[k]
    }

    /// Pointwise product `(self · other)(t) = self(t) other(t)`: applying
    /// `other` first, then `self`.
    pub fn compose(&self, other: &TradeUnitMap) -> Result<Self> {
        self.grid
            .ensure_same(&other.grid, "trade-unit composition")?;
        let b = self.b.iter().zip(&other.b).map(|(x, y)| x * y).collect();
        Self::new(self.grid, b)
    }

    /// True when every matrix has zero blocks mixing the first `split`
    /// coordinates with the rest.
    pub fn is_block_diagonal(&self, split: usize) -> bool {
        self.b.iter().all(|m| off_blocks_zero(m, split))
    }
}

pub(crate) fn off_blocks_zero(m: &DMatrix<f64>, split: usize) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| (i < split) == (j < split) || m[(i, j)] == 0.0))
}

/// Ratio of extreme singular values.
pub fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Square roots come from the Denman–Beavers iteration until the argument
/// is within 0.05 of the identity; the remainder uses the Mercator series.
pub fn matrix_log(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut x = m.clone();
    let mut squarings = 0u32;
    while (&x - &eye).norm() > 0.05 {
        x = sqrt_denman_beavers(&x)?;
        squarings += 1;
        if squarings > 60 {
            return Err(Error::InvalidInput(
                "matrix logarithm did not converge (eigenvalue on the negative axis?)".into(),
            ));
        }
    }
    let d = &x - &eye;
    let mut term = d.clone();
    let mut sum = d.clone();
    for j in 2..60 {
        term = &term * &d;
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        let add = &term * (sign / j as f64);
        let size = add.norm();
        sum += add;
        if size < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    Ok(sum * 2f64.powi(squarings as i32))
}

fn sqrt_denman_beavers(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse();
        let z_inv = z.clone().try_inverse();
        let (y_inv, z_inv) = match (y_inv, z_inv) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::InvalidInput(
                    "matrix square root hit a singular iterate".into(),
                ))
            }
        };
        let y_next = (&y + &z_inv) * 0.5;
        let z_next = (&z + &y_inv) * 0.5;
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * y.norm() {
            return Ok(y);
        }
    }
    if y.iter().all(|v| v.is_finite()) {
        Ok(y)
    } else {
        Err(Error::InvalidInput("matrix square root diverged".into()))
    }
}
