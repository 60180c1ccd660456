use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default `c` in the diversification cap `max wᵢ ≤ c/N`.
pub const DEFAULT_CAP_CONSTANT: f64 = 4.0;

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    Equal,
    Custom,
}

/// Portfolio weights `wⁱ` summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    w: Vec<f64>,
    scheme: WeightScheme,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidInput("empty weight vector".into()));
        }
        if let Some(i) = w.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite weight at {i}")));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            w,
            scheme: WeightScheme::Custom,
        })
    }

    pub fn equal(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("empty weight vector".into()));
        }
        Ok(Self {
            w: vec![1.0 / n as f64; n],
            scheme: WeightScheme::Equal,
        })
    }

    /// Rescales raw nonzero-sum weights to sum to one.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        let total: f64 = raw.iter().sum();
        if total == 0.0 || !total.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cannot normalize weights summing to {total}"
            )));
        }
        Self::new(raw.iter().map(|v| v / total).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn max(&self) -> f64 {
        self.w.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Positive, unlevered and capped at `c/N`.
    pub fn is_riskfree_candidate(&self, cap_constant: f64) -> bool {
        self.ensure_riskfree_candidate(cap_constant).is_ok()
    }

    pub fn ensure_riskfree_candidate(&self, cap_constant: f64) -> Result<()> {
        if let Some(i) = self.w.iter().position(|v| *v <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "weight {i} is {}: risk-free portfolios hold only positive, unlevered positions",
                self.w[i]
            )));
        }
        let cap = cap_constant / self.w.len() as f64;
        if self.max() > cap * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "largest weight {} exceeds the diversification cap {cap}",
                self.max()
            )));
        }
        Ok(())
    }
}
