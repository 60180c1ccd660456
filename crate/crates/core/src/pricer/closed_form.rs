use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

fn phi(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Zero-rate Black–Scholes call: `s Φ(d₁) − e Φ(d₂)`.
///
/// `τ ≤ 0` gives the intrinsic value; `σ ≤ 0` the deterministic limit.
pub fn bs_closed_form(s: f64, e: f64, sigma: f64, tau: f64) -> f64 {
    bs_call_with_rate(s, e, sigma, tau, 0.0)
}

/// Textbook Black–Scholes call with continuously compounded rate `r`.
pub fn bs_call_with_rate(s: f64, e: f64, sigma: f64, tau: f64, r: f64) -> f64 {
    if tau <= 0.0 {
        return (s - e).max(0.0);
    }
    let pv = e * (-r * tau).exp();
    if sigma <= 0.0 {
        return (s - pv).max(0.0);
    }
    let sd = sigma * tau.sqrt();
    let d1 = ((s / e).ln() + (r + 0.5 * sigma * sigma) * tau) / sd;
    s * phi(d1) - pv * phi(d1 - sd)
}

/// Put by parity with [`bs_call_with_rate`].
pub fn bs_put_with_rate(s: f64, e: f64, sigma: f64, tau: f64, r: f64) -> f64 {
    if tau <= 0.0 {
        return (e - s).max(0.0);
    }
    bs_call_with_rate(s, e, sigma, tau, r) - s + e * (-r * tau).exp()
}

/// `Φ(d₁)`, the call delta with rate `r`.
pub fn bs_call_delta(s: f64, e: f64, sigma: f64, tau: f64, r: f64) -> f64 {
    if tau <= 0.0 || sigma <= 0.0 {
        return if s > e * (-r * tau.max(0.0)).exp() {
            1.0
        } else {
            0.0
        };
    }
    let sd = sigma * tau.sqrt();
    phi(((s / e).ln() + (r + 0.5 * sigma * sigma) * tau) / sd)
}

/// Volatility after the residual portfolio noise is folded in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveVol {
    pub sigma1: f64,
    pub sigma_hat: f64,
    /// `Σ = √(σ₁² + σ̂²)`.
    pub sigma: f64,
}

pub fn effective_vol(sigma1: f64, sigma_hat: f64) -> EffectiveVol {
    EffectiveVol {
        sigma1,
        sigma_hat,
        sigma: sigma1.hypot(sigma_hat),
    }
}
