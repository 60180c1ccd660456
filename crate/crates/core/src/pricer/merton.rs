//! Residual of the gauge-invariant two-price pricing equation
//! `V_t + ½σ₁²s²V_ss + ½σ̂²H²V_HH + (V − sV_s − HV_H)(A+B) = 0`,
//! with `H` the risk-free portfolio's price.

use serde::{Deserialize, Serialize};

/// A candidate value and its partial derivatives at one point `(s, H, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MertonPoint {
    pub v: f64,
    pub dv_dt: f64,
    pub dv_ds: f64,
    pub dv_dh: f64,
    pub d2v_ds2: f64,
    pub d2v_dh2: f64,
    pub s: f64,
    pub h: f64,
}

/// Left-hand side per unit option quantity; zero on solutions.
pub fn merton_residual(p: &MertonPoint, sigma1: f64, sigma_hat: f64, a: f64, b: f64) -> f64 {
    p.dv_dt
        + 0.5 * sigma1 * sigma1 * p.s * p.s * p.d2v_ds2
        + 0.5 * sigma_hat * sigma_hat * p.h * p.h * p.d2v_dh2
        + (p.v - p.s * p.dv_ds - p.h * p.dv_dh) * (a + b)
}

/// Risk-free-portfolio holding that removes the `H` exposure: `δ = −∂V/∂H`.
pub fn hedge_ratio(dv_dh: f64) -> f64 {
    -dv_dh
}

/// Derivatives of `f(s, H, t)` by central differences with relative steps
/// `rel_s`, `rel_h` and absolute time step `dt`.
pub fn finite_difference_point(
    f: impl Fn(f64, f64, f64) -> f64,
    s: f64,
    h: f64,
    t: f64,
    rel_s: f64,
    rel_h: f64,
    dt: f64,
) -> MertonPoint {
    let ds = rel_s * s;
    let dh = rel_h * h;
    let v = f(s, h, t);
    MertonPoint {
        v,
        dv_dt: (f(s, h, t + dt) - f(s, h, t - dt)) / (2.0 * dt),
        dv_ds: (f(s + ds, h, t) - f(s - ds, h, t)) / (2.0 * ds),
        dv_dh: (f(s, h + dh, t) - f(s, h - dh, t)) / (2.0 * dh),
        d2v_ds2: (f(s + ds, h, t) - 2.0 * v + f(s - ds, h, t)) / (ds * ds),
        d2v_dh2: (f(s, h + dh, t) - 2.0 * v + f(s, h - dh, t)) / (dh * dh),
        s,
        h,
    }
}

/// Residual from finite-difference derivatives at step `step` together
/// with a truncation bound. Central differences err at `O(step²)`, so the
/// change between `2·step` and `step` (three times the error at `step`)
/// bounds it; a rounding floor covers the second differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    pub residual: f64,
    pub bound: f64,
}

impl ResidualCheck {
    pub fn passes(&self) -> bool {
        self.residual.abs() <= self.bound
    }
}

#[allow(clippy::too_many_arguments)]
pub fn merton_fd_check(
    f: impl Fn(f64, f64, f64) -> f64,
    s: f64,
    h: f64,
    t: f64,
    step: f64,
    sigma1: f64,
    sigma_hat: f64,
    a: f64,
    b: f64,
) -> ResidualCheck {
    let at = |rel: f64| {
        let p = finite_difference_point(&f, s, h, t, rel, rel, rel);
        (merton_residual(&p, sigma1, sigma_hat, a, b), p.v)
    };
    let (fine, v) = at(step);
    let (coarse, _) = at(2.0 * step);
    let rounding = 64.0 * f64::EPSILON * v.abs().max(1.0) / (step * step);
    ResidualCheck {
        residual: fine,
        bound: (coarse - fine).abs() + rounding,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_functions_vanish() {
        for (a, b) in [(0.0, 0.0), (-0.3, 0.7), (2.0, -1.0)] {
            let share = MertonPoint {
                v: 3.0,
                dv_dt: 0.0,
                dv_ds: 1.0,
                dv_dh: 0.0,
                d2v_ds2: 0.0,
                d2v_dh2: 0.0,
                s: 3.0,
                h: 5.0,
            };
            assert_eq!(merton_residual(&share, 0.2, 0.1, a, b), 0.0);
            let bond = MertonPoint {
                v: 5.0,
                dv_ds: 0.0,
                dv_dh: 1.0,
                ..share
            };
            assert_eq!(merton_residual(&bond, 0.2, 0.1, a, b), 0.0);
        }
        assert_eq!(hedge_ratio(0.4), -0.4);
    }
}
