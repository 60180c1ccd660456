//! Weights whose drift is insensitive to small forecasting errors:
//! minimize `‖Gᵀw‖₂`, `G = dμ/dξ`, over the capped simplex
//! `{Σw = 1, f/N ≤ wᵢ ≤ c/N}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::weights::{WeightVector, DEFAULT_CAP_CONSTANT};
use crate::error::{Error, Result};

/// Default floor fraction `f`: each weight at least `f/N`, keeping weights
/// strictly positive.
pub const DEFAULT_FLOOR_FRACTION: f64 = 0.1;
pub const DEFAULT_NEUTRALITY_TOLERANCE: f64 = 1e-10;

const MAX_GRADIENT_ITERATIONS: usize = 20_000;

#[derive(Debug, Clone)]
pub struct SensitivityProblem {
    dmu_dxi: DMatrix<f64>,
    base: WeightVector,
    cap_constant: f64,
    floor_fraction: f64,
    tolerance: f64,
}

impl SensitivityProblem {
    /// `dmu_dxi` is `[N × n_factors]`; starts from equal weights.
    pub fn new(dmu_dxi: DMatrix<f64>) -> Result<Self> {
        let n = dmu_dxi.nrows();
        if n == 0 {
            return Err(Error::InvalidInput("no assets in gradient matrix".into()));
        }
        if dmu_dxi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite drift gradient".into()));
        }
        if dmu_dxi.ncols() >= n {
            return Err(Error::InvalidInput(format!(
                "need fewer factors ({}) than assets ({n})",
                dmu_dxi.ncols()
            )));
        }
        let p = Self {
            dmu_dxi,
            base: WeightVector::equal(n)?,
            cap_constant: DEFAULT_CAP_CONSTANT,
            floor_fraction: DEFAULT_FLOOR_FRACTION,
            tolerance: DEFAULT_NEUTRALITY_TOLERANCE,
        };
        p.check_feasible()?;
        Ok(p)
    }

    pub fn with_cap(mut self, cap_constant: f64) -> Result<Self> {
        self.cap_constant = cap_constant;
        self.check_feasible()?;
        Ok(self)
    }

    pub fn with_floor(mut self, floor_fraction: f64) -> Result<Self> {
        self.floor_fraction = floor_fraction;
        self.check_feasible()?;
        Ok(self)
    }

    pub fn with_base(mut self, base: WeightVector) -> Result<Self> {
        if base.len() != self.n_assets() {
            return Err(Error::Dimension {
                what: "base weights",
                expected: self.n_assets(),
                got: base.len(),
            });
        }
        self.base = base;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn check_feasible(&self) -> Result<()> {
        let (f, c) = (self.floor_fraction, self.cap_constant);
        if !(f.is_finite() && c.is_finite()) || f <= 0.0 || f > 1.0 || c < 1.0 {
            return Err(Error::Infeasible(format!(
                "need 0 < floor fraction ≤ 1 ≤ cap constant, got floor {f}, cap {c}"
            )));
        }
        Ok(())
    }

    pub fn n_assets(&self) -> usize {
        self.dmu_dxi.nrows()
    }

    pub fn gradients(&self) -> &DMatrix<f64> {
        &self.dmu_dxi
    }

    pub fn bounds(&self) -> (f64, f64) {
        let n = self.n_assets() as f64;
        (self.floor_fraction / n, self.cap_constant / n)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `‖Gᵀw‖₂`, the drift response to a unit forecasting error.
    pub fn residual(&self, w: &[f64]) -> f64 {
        (self.dmu_dxi.transpose() * DVector::from_column_slice(w)).norm()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub weights: WeightVector,
    pub residual: f64,
    /// Residual of the starting weights.
    pub base_residual: f64,
    /// `residual ≤ tolerance`.
    pub neutral: bool,
    pub iterations: usize,
}

/// Euclidean projection onto `{Σw = 1, lo ≤ wᵢ ≤ hi}` by bisection on the
/// shift `τ` in `wᵢ = clamp(vᵢ − τ, lo, hi)`.
pub fn project_capped_simplex(v: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let total = |tau: f64| v.iter().map(|x| (x - tau).clamp(lo, hi)).sum::<f64>();
    let mut a = v.iter().cloned().fold(f64::INFINITY, f64::min) - hi;
    let mut b = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - lo;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if total(m) > 1.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let tau = 0.5 * (a + b);
    v.iter().map(|x| (x - tau).clamp(lo, hi)).collect()
}

/// Projected (accelerated) gradient descent from the base weights, then an
/// active-set least-squares polish on the free coordinates. Never returns a
/// worse residual than the base weights.
pub fn sensitivity_neutral_weights(problem: &SensitivityProblem) -> Result<SensitivityResult> {
    let (lo, hi) = problem.bounds();
    let base = problem.base.as_slice().to_vec();
    let base_residual = problem.residual(&base);
    let start = project_capped_simplex(&base, lo, hi);
    let mut best = (problem.residual(&start), start.clone());
    let mut iterations = 0;

    let g = problem.gradients();
    let gram = g.transpose() * g;
    let lipschitz = gram.symmetric_eigenvalues().max();
    if best.0 > problem.tolerance && lipschitz > 0.0 {
        let mut w = DVector::from_vec(start);
        let mut y = w.clone();
        let mut t = 1.0_f64;
        while iterations < MAX_GRADIENT_ITERATIONS {
            iterations += 1;
            let grad = g * (g.transpose() * &y);
            let stepped: Vec<f64> = (&y - grad / lipschitz).iter().copied().collect();
            let w_next = DVector::from_vec(project_capped_simplex(&stepped, lo, hi));
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = &w_next + (&w_next - &w) * ((t - 1.0) / t_next);
            let moved = (&w_next - &w).norm();
            w = w_next;
            t = t_next;
            let r = problem.residual(w.as_slice());
            if r < best.0 {
                best = (r, w.as_slice().to_vec());
            }
            if r <= problem.tolerance || moved < 1e-16 {
                break;
            }
        }
        let polished = polish(problem, best.1.clone(), lo, hi);
        let r = problem.residual(&polished);
        if r < best.0 {
            best = (r, polished);
        }
    }
    if base_residual < best.0 && base.iter().all(|w| (lo..=hi).contains(w)) {
        best = (base_residual, base);
    }
    let (residual, w) = best;
    Ok(SensitivityResult {
        weights: WeightVector::new(w)?,
        residual,
        base_residual,
        neutral: residual <= problem.tolerance,
        iterations,
    })
}

/// Least-squares steps on the free coordinates, holding the sum fixed and
/// stopping at the first bound each step meets.
fn polish(problem: &SensitivityProblem, mut w: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    let g = problem.gradients();
    let n_factors = g.ncols();
    for _ in 0..2 * w.len() {
        let free: Vec<usize> = (0..w.len()).filter(|&i| w[i] > lo && w[i] < hi).collect();
        if free.is_empty() {
            break;
        }
        let m = free.len();
        let r = g.transpose() * DVector::from_column_slice(&w);
        // KKT system for min ‖M δ + r‖² s.t. Σδ = 1 − Σw.
        let mut kkt = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = DVector::zeros(m + 1);
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                kkt[(a, b)] = (0..n_factors).map(|f| g[(i, f)] * g[(j, f)]).sum();
            }
            kkt[(a, m)] = 1.0;
            kkt[(m, a)] = 1.0;
            rhs[a] = -(0..n_factors).map(|f| g[(i, f)] * r[f]).sum::<f64>();
        }
        rhs[m] = 1.0 - w.iter().sum::<f64>();
        let svd = kkt.svd(true, true);
        let eps = 1e-13 * svd.singular_values.max();
        let Ok(sol) = svd.solve(&rhs, eps) else { break };
        let delta: Vec<f64> = sol.iter().take(m).copied().collect();
        if delta.iter().all(|d| d.abs() < 1e-18) {
            break;
        }
        let mut alpha = 1.0_f64;
        let mut blocking = None;
        for (a, &i) in free.iter().enumerate() {
            let d = delta[a];
            let limit = if d > 0.0 {
                (hi - w[i]) / d
            } else if d < 0.0 {
                (lo - w[i]) / d
            } else {
                f64::INFINITY
            };
            if limit < alpha {
                alpha = limit;
                blocking = Some((i, if d > 0.0 { hi } else { lo }));
            }
        }
        for (a, &i) in free.iter().enumerate() {
            w[i] = (w[i] + alpha * delta[a]).clamp(lo, hi);
        }
        match blocking {
            Some((i, bound)) => w[i] = bound,
            None => break,
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradients_keep_equal_weights() {
        let p = SensitivityProblem::new(DMatrix::zeros(5, 2)).unwrap();
        let r = sensitivity_neutral_weights(&p).unwrap();
        assert_eq!(r.weights.as_slice(), &[0.2; 5]);
        assert_eq!(r.residual, 0.0);
        assert!(r.neutral);
    }

    #[test]
    fn symmetric_gradients() {
        let g = DMatrix::from_column_slice(4, 1, &[1.0, -1.0, 1.0, -1.0]);
        let p = SensitivityProblem::new(g).unwrap().with_cap(2.0).unwrap();
        let r = sensitivity_neutral_weights(&p).unwrap();
        assert_eq!(r.weights.as_slice(), &[0.25; 4]);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn reaches_neutrality_when_feasible() {
        let g = DMatrix::from_column_slice(5, 1, &[1.0, 2.0, -0.5, 0.3, 0.1]);
        let p = SensitivityProblem::new(g).unwrap().with_cap(2.5).unwrap();
        let r = sensitivity_neutral_weights(&p).unwrap();
        assert!(r.residual <= 1e-10, "{}", r.residual);
        let (lo, hi) = p.bounds();
        assert!(r.weights.as_slice().iter().all(|w| *w >= lo && *w <= hi));
    }

    #[test]
    fn infeasible_constraints() {
        let g = DMatrix::zeros(4, 1);
        assert!(matches!(
            SensitivityProblem::new(g.clone()).unwrap().with_cap(0.5),
            Err(Error::Infeasible(_))
        ));
        assert!(SensitivityProblem::new(DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn projection_lands_in_set() {
        let w = project_capped_simplex(&[3.0, -1.0, 0.2, 0.2], 0.05, 0.5);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(w.iter().all(|x| (0.05..=0.5).contains(x)));
        assert_eq!(w[0], 0.5);
    }
}
