//! Gauge parameters and background gauge fields.
//!
//! All time derivatives follow one rule: a forward difference of
//! log-quantities over `[t_k, t_{k+1}]`, assigned to that interval. For
//! the scalar field this is `φ̇_k = (φ_{k+1} − φ_k)/dt`; for matrices it is
//! the logarithm of the interval transporter divided by `dt`. Under this
//! rule the gauge identities hold exactly in discrete arithmetic rather
//! than to `O(dt)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::grid::{RateSeries, Sampling, TimeGrid};
use super::trade_unit::{matrix_log, off_blocks_zero, TradeUnitMap};
use crate::error::{Error, Result};

/// Deterministic log-scale gauge parameter `φ(t)`, one value per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeScalar {
    grid: TimeGrid,
    phi: Vec<f64>,
}

impl GaugeScalar {
    pub fn new(grid: TimeGrid, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(Error::Dimension {
                what: "gauge parameter length",
                expected: grid.len(),
                got: phi.len(),
            });
        }
        if let Some(k) = phi.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite φ at index {k}")));
        }
        Ok(Self { grid, phi })
    }

    pub fn zero(grid: TimeGrid) -> Self {
        Self {
            grid,
            phi: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.times().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.phi
    }

    pub fn negate(&self) -> Self {
        Self {
            grid: self.grid,
            phi: self.phi.iter().map(|p| -p).collect(),
        }
    }

    /// `φ̇` on every interval.
    pub fn rate(&self) -> Vec<f64> {
        let dt = self.grid.dt();
        self.phi.windows(2).map(|w| (w[1] - w[0]) / dt).collect()
    }

    pub fn rate_series(&self) -> RateSeries {
        RateSeries::new(self.grid, Sampling::Interval, self.rate())
            .expect("rate of a finite gauge parameter is finite")
    }
}

/// Background field `A(t)` of the price-rescaling symmetry, one value per
/// interval (1/years).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeFieldA {
    grid: TimeGrid,
    a: Vec<f64>,
}

impl GaugeFieldA {
    pub fn new(grid: TimeGrid, a: Vec<f64>) -> Result<Self> {
        if a.len() != grid.steps() {
            return Err(Error::Dimension {
                what: "gauge field A length",
                expected: grid.steps(),
                got: a.len(),
            });
        }
        if let Some(k) = a.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite A at interval {k}")));
        }
        Ok(Self { grid, a })
    }

    pub fn constant(grid: TimeGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.steps()])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.a
    }

    pub fn as_rate_series(&self) -> RateSeries {
        RateSeries::new(self.grid, Sampling::Interval, self.a.clone())
            .expect("gauge field values are finite")
    }

    /// The gauge parameter `φ(t) = ∫₀ᵗ A` that moves this field to zero.
    pub fn integrated(&self) -> GaugeScalar {
        let dt = self.grid.dt();
        let mut phi = Vec::with_capacity(self.grid.len());
        let mut acc = 0.0;
        phi.push(0.0);
        for a in &self.a {
            acc += a * dt;
            phi.push(acc);
        }
        GaugeScalar {
            grid: self.grid,
            phi,
        }
    }
}

/// `A → A − φ̇`.
pub fn transform_gauge_a(a: &GaugeFieldA, phi: &GaugeScalar) -> Result<GaugeFieldA> {
    a.grid.ensure_same(&phi.grid, "gauge field A")?;
    let shifted = a.a.iter().zip(phi.rate()).map(|(a, d)| a - d).collect();
    GaugeFieldA::new(a.grid, shifted)
}

/// Background field `𝓑(t)` of the trade-unit symmetry: one `N×N` rate
/// matrix per interval, optionally block-diagonal with an
/// `(options, assets)` split.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFieldB {
    grid: TimeGrid,
    bfield: Vec<DMatrix<f64>>,
    block_split: Option<usize>,
}

impl GaugeFieldB {
    pub fn new(
        grid: TimeGrid,
        bfield: Vec<DMatrix<f64>>,
        block_split: Option<usize>,
    ) -> Result<Self> {
        if bfield.len() != grid.steps() {
            return Err(Error::Dimension {
                what: "gauge field B length",
                expected: grid.steps(),
                got: bfield.len(),
            });
        }
        let n = bfield[0].nrows();
        for (k, m) in bfield.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension {
                    what: "gauge field B matrix size",
                    expected: n,
                    got: m.nrows().max(m.ncols()),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite B entry at interval {k}"
                )));
            }
            if let Some(split) = block_split {
                if split > n {
                    return Err(Error::InvalidInput(format!(
                        "block split {split} exceeds size {n}"
                    )));
                }
                if !off_blocks_zero(m, split) {
                    return Err(Error::InvalidInput(format!(
                        "off-diagonal block of B is nonzero at interval {k}"
                    )));
                }
            }
        }
        Ok(Self {
            grid,
            bfield,
            block_split,
        })
    }

    pub fn zero(grid: TimeGrid, n: usize) -> Self {
        Self {
            grid,
            bfield: vec![DMatrix::zeros(n, n); grid.steps()],
            block_split: None,
        }
    }

    /// Diagonal field with the given entries per interval.
    pub fn diagonal(grid: TimeGrid, entries: Vec<Vec<f64>>) -> Result<Self> {
        let mats = entries
            .iter()
            .map(|d| DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
            .collect();
        Self::new(grid, mats, None)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.bfield[0].nrows()
    }

    pub fn block_split(&self) -> Option<usize> {
        self.block_split
    }

    pub fn matrix(&self, k: usize) -> &DMatrix<f64> {
        &self.bfield[k]
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.bfield
    }

    /// Largest absolute entry over all intervals.
    pub fn max_abs(&self) -> f64 {
        self.bfield
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// `𝓑 → b𝓑b⁻¹ − ḃb⁻¹`.
///
/// Discretely the field is carried by its interval transporter
/// `U_k = exp(−𝓑_k dt)`, which transforms as `U'_k = b_{k+1} U_k b_k⁻¹`;
/// the new field is `−log(U'_k)/dt`. Composition of two maps therefore
/// equals the map of their product exactly, and `b = e^{ct}·I` shifts the
/// field by exactly `−c·I`.
pub fn transform_gauge_b(bf: &GaugeFieldB, b: &TradeUnitMap) -> Result<GaugeFieldB> {
    bf.grid.ensure_same(b.grid(), "gauge field B")?;
    if b.dim() != bf.dim() {
        return Err(Error::Dimension {
            what: "trade-unit map size",
            expected: bf.dim(),
            got: b.dim(),
        });
    }
    if let Some(split) = bf.block_split {
        if !b.is_block_diagonal(split) {
            return Err(Error::InvalidInput(
                "trade-unit map mixes option and asset units; only the block-diagonal subgroup is supported"
                    .into(),
            ));
        }
    }
    let dt = bf.grid.dt();
    let mut out = Vec::with_capacity(bf.bfield.len());
    for (k, field) in bf.bfield.iter().enumerate() {
        let next = b.matrix(k + 1);
        let mut m = if next == b.matrix(k) {
            next * field * b.inverse(k)
        } else {
            let transporter = (field * -dt).exp();
            let moved = next * transporter * b.inverse(k);
            matrix_log(&moved)? * (-1.0 / dt)
        };
        if let Some(split) = bf.block_split {
            let n = m.nrows();
            for i in 0..n {
                for j in 0..n {
                    if (i < split) != (j < split) {
                        m[(i, j)] = 0.0;
                    }
                }
            }
        }
        out.push(m);
    }
    GaugeFieldB::new(bf.grid, out, bf.block_split)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::over(1.0, 10).unwrap()
    }

    #[test]
    fn zero_phi_leaves_a() {
        let a = GaugeFieldA::new(grid(), (0..10).map(|k| 0.01 * k as f64).collect()).unwrap();
        let out = transform_gauge_a(&a, &GaugeScalar::zero(grid())).unwrap();
        assert_eq!(out, a);
    }

    #[test]
    fn linear_phi_shifts_by_constant() {
        let a = GaugeFieldA::constant(grid(), 0.0).unwrap();
        let phi = GaugeScalar::from_fn(grid(), |t| 0.7 * t).unwrap();
        let out = transform_gauge_a(&a, &phi).unwrap();
        for v in out.values() {
            assert!((v + 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn integrated_field_gauges_a_away() {
        let a = GaugeFieldA::new(grid(), (0..10).map(|k| (k as f64).sin()).collect()).unwrap();
        let out = transform_gauge_a(&a, &a.integrated()).unwrap();
        assert!(out.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn identity_map_leaves_b() {
        let mats = (0..10)
            .map(|k| DMatrix::from_fn(3, 3, |i, j| (i as f64 - j as f64) * 0.1 + k as f64 * 0.01))
            .collect();
        let bf = GaugeFieldB::new(grid(), mats, None).unwrap();
        let out = transform_gauge_b(&bf, &TradeUnitMap::identity(grid(), 3).unwrap()).unwrap();
        assert_eq!(out, bf);
    }

    #[test]
    fn exponential_scaling_shifts_b() {
        let c = 0.35;
        let bf = GaugeFieldB::zero(grid(), 2);
        let b = TradeUnitMap::from_fn(grid(), |t| DMatrix::identity(2, 2) * (c * t).exp()).unwrap();
        let out = transform_gauge_b(&bf, &b).unwrap();
        for m in out.matrices() {
            assert!((m + DMatrix::identity(2, 2) * c).norm() < 1e-12);
        }
    }

    #[test]
    fn block_structure_enforced() {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 2)] = 1.0;
        assert!(GaugeFieldB::new(grid(), vec![m; 10], Some(1)).is_err());

        let bf =
            GaugeFieldB::new(grid(), vec![DMatrix::identity(3, 3) * 0.1; 10], Some(1)).unwrap();
        let mut mixing = DMatrix::identity(3, 3);
        mixing[(0, 1)] = 0.5;
        let b = TradeUnitMap::constant(grid(), mixing).unwrap();
        assert!(transform_gauge_b(&bf, &b).is_err());

        let mut ok = DMatrix::identity(3, 3);
        ok[(1, 2)] = 0.5;
        let b = TradeUnitMap::from_fn(grid(), |t| &ok * (1.0 + t)).unwrap();
        let out = transform_gauge_b(&bf, &b).unwrap();
        assert_eq!(out.block_split(), Some(1));
    }
}
