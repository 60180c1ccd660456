//! Crank–Nicolson solver for
//! `∂V/∂t + ½σ²s²V_ss − sV_s A + V(A+B) = 0` on a log-spaced price grid.
//!
//! Derivatives in `s` use three-point formulas on the nonuniform grid, so
//! payoffs linear in `s` are reproduced exactly. The first backward step
//! is replaced by two implicit-Euler half steps to damp the payoff kink.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::closed_form::effective_vol;
use super::tridiag::solve_tridiagonal;
use crate::error::{Error, Result};
use crate::gauge::{GaugeFieldA, RateSeries, Sampling, TimeGrid};

pub const DEFAULT_SPACE_INTERVALS: usize = 400;
pub const DEFAULT_TIME_STEPS: usize = 400;
/// Grid spans `[e/8, 8e]` around the strike by default.
pub const DEFAULT_GRID_SPAN: f64 = 8.0;

/// Log-spaced price nodes `s_min·e^{jh}`, `j = 0..=intervals`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceGrid {
    nodes: Vec<f64>,
}

impl PriceGrid {
    pub fn log_spaced(s_min: f64, s_max: f64, intervals: usize) -> Result<Self> {
        if !(s_min > 0.0 && s_max > s_min && s_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < s_min < s_max, got [{s_min}, {s_max}]"
            )));
        }
        if intervals < 4 {
            return Err(Error::InvalidGrid(format!(
                "grid too coarse: {intervals} intervals leave fewer than 3 interior nodes"
            )));
        }
        let h = (s_max / s_min).ln() / intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals)
            .map(|j| s_min * (j as f64 * h).exp())
            .collect();
        nodes[intervals] = s_max;
        Ok(Self { nodes })
    }

    /// `[center/span, center·span]`; `center` is a node when `intervals` is even.
    pub fn centered(center: f64, span: f64, intervals: usize) -> Result<Self> {
        if !(span > 1.0) {
            return Err(Error::InvalidGrid(format!(
                "span must exceed 1, got {span}"
            )));
        }
        let mut g = Self::log_spaced(center / span, center * span, intervals)?;
        if intervals.is_multiple_of(2) {
            g.nodes[intervals / 2] = center;
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// Behaviour at a grid edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `V = 0`.
    Absorbing,
    /// `V_ss = 0`: the equation loses its diffusion term.
    Linear,
}

/// Terminal condition `V(s, T)`.
#[derive(Clone)]
pub enum Payoff {
    Call {
        strike: f64,
    },
    Put {
        strike: f64,
    },
    /// `scale·s`.
    Linear {
        scale: f64,
    },
    /// Pays 1 when `s > strike`.
    Digital {
        strike: f64,
    },
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        lower: Boundary,
        continuous: bool,
    },
}

impl fmt::Debug for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payoff::Call { strike } => write!(f, "Call({strike})"),
            Payoff::Put { strike } => write!(f, "Put({strike})"),
            Payoff::Linear { scale } => write!(f, "Linear({scale})"),
            Payoff::Digital { strike } => write!(f, "Digital({strike})"),
            Payoff::Custom { lower, .. } => write!(f, "Custom(lower: {lower:?})"),
        }
    }
}

impl Payoff {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static, lower: Boundary) -> Self {
        Payoff::Custom {
            f: Arc::new(f),
            lower,
            continuous: true,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            Payoff::Call { strike } => (s - strike).max(0.0),
            Payoff::Put { strike } => (strike - s).max(0.0),
            Payoff::Linear { scale } => scale * s,
            Payoff::Digital { strike } => {
                if s > *strike {
                    1.0
                } else {
                    0.0
                }
            }
            Payoff::Custom { f, .. } => f(s),
        }
    }

    fn lower_boundary(&self) -> Boundary {
        match self {
            Payoff::Call { .. } | Payoff::Digital { .. } => Boundary::Absorbing,
            Payoff::Put { .. } | Payoff::Linear { .. } => Boundary::Linear,
            Payoff::Custom { lower, .. } => *lower,
        }
    }

    fn is_continuous(&self) -> bool {
        match self {
            Payoff::Digital { .. } => false,
            Payoff::Custom { continuous, .. } => *continuous,
            _ => true,
        }
    }

    /// Natural grid center: the strike, or 1 for linear payoffs.
    pub fn reference_price(&self) -> f64 {
        match self {
            Payoff::Call { strike } | Payoff::Put { strike } | Payoff::Digital { strike } => {
                *strike
            }
            _ => 1.0,
        }
    }
}

/// A European claim under the gauge-field pricing equation, per unit of
/// option quantity.
#[derive(Debug, Clone)]
pub struct PdeProblem {
    s_grid: PriceGrid,
    t_grid: TimeGrid,
    sigma: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    payoff: Payoff,
    lower: Boundary,
    upper: Boundary,
}

fn interval_values(series: &RateSeries) -> Vec<f64> {
    match series.sampling() {
        Sampling::Interval => series.values().to_vec(),
        Sampling::Point => series
            .values()
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect(),
    }
}

impl PdeProblem {
    /// Constant-volatility problem with `A = B = 0` on the default grids.
    pub fn european(payoff: Payoff, sigma: f64, tau: f64) -> Result<Self> {
        Self::european_on(
            payoff,
            sigma,
            tau,
            DEFAULT_SPACE_INTERVALS,
            DEFAULT_TIME_STEPS,
        )
    }

    pub fn european_on(
        payoff: Payoff,
        sigma: f64,
        tau: f64,
        space_intervals: usize,
        time_steps: usize,
    ) -> Result<Self> {
        let s_grid =
            PriceGrid::centered(payoff.reference_price(), DEFAULT_GRID_SPAN, space_intervals)?;
        let t_grid = TimeGrid::over(tau, time_steps)?;
        Self::new(s_grid, t_grid, RateSeries::constant(t_grid, sigma)?, payoff)
    }

    pub fn new(
        s_grid: PriceGrid,
        t_grid: TimeGrid,
        sigma: RateSeries,
        payoff: Payoff,
    ) -> Result<Self> {
        t_grid.ensure_same(sigma.grid(), "volatility series")?;
        let sigma = interval_values(&sigma);
        if let Some(k) = sigma.iter().position(|s| *s < 0.0) {
            return Err(Error::InvalidInput(format!(
                "negative volatility on interval {k}"
            )));
        }
        if let Some(j) = s_grid
            .nodes()
            .iter()
            .position(|s| !payoff.value(*s).is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "payoff not finite at node {j}"
            )));
        }
        let steps = t_grid.steps();
        Ok(Self {
            lower: payoff.lower_boundary(),
            upper: Boundary::Linear,
            s_grid,
            t_grid,
            sigma,
            a: vec![0.0; steps],
            b: vec![0.0; steps],
            payoff,
        })
    }

    pub fn with_a(mut self, a: &GaugeFieldA) -> Result<Self> {
        self.t_grid.ensure_same(a.grid(), "gauge field A")?;
        self.a = a.values().to_vec();
        Ok(self)
    }

    /// Rate `B(t)` from a trade-unit redefinition of the option itself.
    pub fn with_b(mut self, b: &RateSeries) -> Result<Self> {
        self.t_grid
            .ensure_same(b.grid(), "option trade-unit rate")?;
        self.b = interval_values(b);
        Ok(self)
    }

    pub fn with_sigma(mut self, sigma: &RateSeries) -> Result<Self> {
        self.t_grid.ensure_same(sigma.grid(), "volatility series")?;
        self.sigma = interval_values(sigma);
        Ok(self)
    }

    pub fn with_boundaries(mut self, lower: Boundary, upper: Boundary) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn s_grid(&self) -> &PriceGrid {
        &self.s_grid
    }

    pub fn t_grid(&self) -> &TimeGrid {
        &self.t_grid
    }

    pub fn payoff(&self) -> &Payoff {
        &self.payoff
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }
}

/// Option values and deltas; rows follow the time grid, columns the
/// price grid.
#[derive(Debug, Clone)]
pub struct OptionSurface {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub values: DMatrix<f64>,
    pub deltas: DMatrix<f64>,
}

impl OptionSurface {
    /// Value at time row `k`, quadratic interpolation between nodes.
    pub fn value_at(&self, k: usize, s: f64) -> f64 {
        let row: Vec<f64> = self.values.row(k).iter().copied().collect();
        interpolate(&self.s, &row, s)
    }

    pub fn delta_at(&self, k: usize, s: f64) -> f64 {
        let row: Vec<f64> = self.deltas.row(k).iter().copied().collect();
        interpolate(&self.s, &row, s)
    }

    /// Value today (first time row).
    pub fn price(&self, s: f64) -> f64 {
        self.value_at(0, s)
    }

    pub fn delta(&self, s: f64) -> f64 {
        self.delta_at(0, s)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if let Ok(j) = xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        return ys[j];
    }
    let upper = xs.partition_point(|v| *v < x).clamp(1, n - 1);
    let j = if upper + 1 < n && (upper < 2 || x - xs[upper - 1] > xs[upper] - x) {
        upper
    } else {
        upper - 1
    };
    let (x0, x1, x2) = (xs[j - 1], xs[j], xs[j + 1]);
    let l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    l0 * ys[j - 1] + l1 * ys[j] + l2 * ys[j + 1]
}

/// Three-point derivative weights at interior node `j`.
fn stencil(s: &[f64], j: usize) -> ([f64; 3], [f64; 3]) {
    let hm = s[j] - s[j - 1];
    let hp = s[j + 1] - s[j];
    let d1 = [
        -hp / (hm * (hm + hp)),
        (hp - hm) / (hm * hp),
        hm / (hp * (hm + hp)),
    ];
    let d2 = [
        2.0 / (hm * (hm + hp)),
        -2.0 / (hm * hp),
        2.0 / (hp * (hm + hp)),
    ];
    (d1, d2)
}

/// Spatial operator `L` as tridiagonal bands for one interval's coefficients.
fn operator(p: &PdeProblem, sigma: f64, a: f64, b: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let s = p.s_grid.nodes();
    let n = s.len();
    let (mut lo, mut di, mut up) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for j in 1..n - 1 {
        let (d1, d2) = stencil(s, j);
        let diff = 0.5 * sigma * sigma * s[j] * s[j];
        let conv = -a * s[j];
        lo[j] = diff * d2[0] + conv * d1[0];
        di[j] = diff * d2[1] + conv * d1[1] + (a + b);
        up[j] = diff * d2[2] + conv * d1[2];
    }
    if p.lower == Boundary::Linear {
        let h = s[1] - s[0];
        di[0] = a * s[0] / h + (a + b);
        up[0] = -a * s[0] / h;
    }
    if p.upper == Boundary::Linear {
        let h = s[n - 1] - s[n - 2];
        lo[n - 1] = a * s[n - 1] / h;
        di[n - 1] = -a * s[n - 1] / h + (a + b);
    }
    (lo, di, up)
}

/// One θ-step backward in time over `dt`: `(I − θ dt L) V⁺ = (I + (1−θ) dt L) V`.
fn theta_step(
    p: &PdeProblem,
    v: &mut [f64],
    bands: &(Vec<f64>, Vec<f64>, Vec<f64>),
    dt: f64,
    theta: f64,
) -> Result<()> {
    let (lo, di, up) = bands;
    let n = v.len();
    let explicit = (1.0 - theta) * dt;
    let mut rhs = vec![0.0; n];
    for j in 0..n {
        let mut lv = di[j] * v[j];
        if j > 0 {
            lv += lo[j] * v[j - 1];
        }
        if j + 1 < n {
            lv += up[j] * v[j + 1];
        }
        rhs[j] = v[j] + explicit * lv;
    }
    let ml: Vec<f64> = lo.iter().map(|x| -theta * dt * x).collect();
    let mut md: Vec<f64> = di.iter().map(|x| 1.0 - theta * dt * x).collect();
    let mut mu: Vec<f64> = up.iter().map(|x| -theta * dt * x).collect();
    let mut ml = ml;
    if p.lower == Boundary::Absorbing {
        md[0] = 1.0;
        mu[0] = 0.0;
        rhs[0] = 0.0;
    }
    if p.upper == Boundary::Absorbing {
        md[n - 1] = 1.0;
        ml[n - 1] = 0.0;
        rhs[n - 1] = 0.0;
    }
    solve_tridiagonal(&ml, &md, &mu, &mut rhs)
        .ok_or_else(|| Error::Degenerate("singular time-step matrix".into()))?;
    v.copy_from_slice(&rhs);
    Ok(())
}

fn deltas_of(s: &[f64], v: &[f64]) -> Vec<f64> {
    let n = s.len();
    let mut d = vec![0.0; n];
    for j in 1..n - 1 {
        let (d1, _) = stencil(s, j);
        d[j] = d1[0] * v[j - 1] + d1[1] * v[j] + d1[2] * v[j + 1];
    }
    d[0] = (v[1] - v[0]) / (s[1] - s[0]);
    d[n - 1] = (v[n - 1] - v[n - 2]) / (s[n - 1] - s[n - 2]);
    d
}

/// Backward Crank–Nicolson solve with Rannacher start-up.
pub fn solve_gauge_bs(problem: &PdeProblem) -> Result<OptionSurface> {
    if !problem.payoff.is_continuous() && problem.sigma.iter().all(|s| *s == 0.0) {
        return Err(Error::Degenerate(
            "zero volatility with a discontinuous payoff has no smooth solution".into(),
        ));
    }
    let s = problem.s_grid.nodes().to_vec();
    let grid = problem.t_grid;
    let steps = grid.steps();
    let n = s.len();
    let mut values = DMatrix::zeros(steps + 1, n);
    let mut deltas = DMatrix::zeros(steps + 1, n);
    let mut v: Vec<f64> = s.iter().map(|x| problem.payoff.value(*x)).collect();
    if problem.lower == Boundary::Absorbing {
        v[0] = 0.0;
    }
    if problem.upper == Boundary::Absorbing {
        v[n - 1] = 0.0;
    }
    let store = |v: &[f64], k: usize, values: &mut DMatrix<f64>, deltas: &mut DMatrix<f64>| {
        for (j, x) in v.iter().enumerate() {
            values[(k, j)] = *x;
        }
        for (j, x) in deltas_of(&s, v).iter().enumerate() {
            deltas[(k, j)] = *x;
        }
    };
    store(&v, steps, &mut values, &mut deltas);
    let dt = grid.dt();
    for k in (0..steps).rev() {
        let bands = operator(problem, problem.sigma[k], problem.a[k], problem.b[k]);
        if k == steps - 1 {
            theta_step(problem, &mut v, &bands, 0.5 * dt, 1.0)?;
            theta_step(problem, &mut v, &bands, 0.5 * dt, 1.0)?;
        } else {
            theta_step(problem, &mut v, &bands, dt, 0.5)?;
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Degenerate(format!(
                "non-finite option value at step {k}"
            )));
        }
        store(&v, k, &mut values, &mut deltas);
    }
    Ok(OptionSurface {
        s,
        t: grid.times(),
        values,
        deltas,
    })
}

/// Solves in the gauge where the risk-free portfolio is the unit (`A′ = 0`)
/// with volatility bumped to `Σ = √(σ₁² + σ̂²)`. The residual portfolio
/// noise only enters through this `O(1/√N)` bump.
pub fn solve_primed_gauge(problem: &PdeProblem, sigma_hat: f64) -> Result<OptionSurface> {
    if !(sigma_hat >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "σ̂ must be >= 0, got {sigma_hat}"
        )));
    }
    let mut primed = problem.clone();
    primed.a = vec![0.0; primed.a.len()];
    primed.sigma = primed
        .sigma
        .iter()
        .map(|s| effective_vol(*s, sigma_hat).sigma)
        .collect();
    solve_gauge_bs(&primed)
}
