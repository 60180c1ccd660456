//! The six batch commands behind the `gaugefin` binary.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{GradientSource, RunConfig, WeightSchemeConfig};
use super::panel_csv::{export, ingest, ingest_reader, IngestOptions};
use super::report::ReportFile;
use crate::discount::{empirical_pipeline_with, fig1_series, textbook_discount, PipelineOptions};
use crate::error::{Error, Result};
use crate::gauge::GaugeFieldA;
use crate::gauge::{real_return, PricePanel, RateSeries};
use crate::pricer::{
    bs_call_with_rate, bs_put_with_rate, solve_gauge_bs, solve_primed_gauge, PdeProblem,
};
use crate::riskfree::{
    balance_residuals, convergence_study, etemadi_check, extract_market_gauge_with,
    sensitivity_neutral_weights, to_riskfree_units, SensitivityProblem, StudySettings,
    WeightVector,
};
use crate::sim::{portfolio_dynamics, simulate};

/// Synthetic weekly index panel bundled with the crate (12 columns,
/// cash last). Default input of the `discount` command.
pub const BUNDLED_PANEL: &str = include_str!("../../fixtures/synthetic_indices.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Gauge,
    Riskfree,
    Price,
    Discount,
    Sensitivity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Gauge => "gauge",
            Command::Riskfree => "riskfree",
            Command::Price => "price",
            Command::Discount => "discount",
            Command::Sensitivity => "sensitivity",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "simulate" => Command::Simulate,
            "gauge" => Command::Gauge,
            "riskfree" => Command::Riskfree,
            "price" => Command::Price,
            "discount" => Command::Discount,
            "sensitivity" => Command::Sensitivity,
            other => return Err(Error::Config(format!("unknown subcommand {other:?}"))),
        })
    }
}

/// Per-invocation switches that are not part of the reproducible config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Omit the timestamp so repeated runs are byte-identical.
    pub canonical: bool,
    /// Panel input overriding the config.
    pub panel: Option<PathBuf>,
    /// `simulate`: write the first path as a panel file.
    pub export_panel: Option<PathBuf>,
}

/// Loads the bundled synthetic panel.
pub fn bundled_panel() -> Result<PricePanel> {
    ingest_reader(
        BUNDLED_PANEL.as_bytes(),
        Path::new("<bundled>"),
        IngestOptions::default(),
    )
}

pub fn run(command: Command, config: &RunConfig, options: &RunOptions) -> Result<ReportFile> {
    config.validate()?;
    let (seed, body) = match command {
        Command::Simulate => (config.simulate.seed, run_simulate(config, options)?),
        Command::Gauge => (config.simulate.seed, run_gauge(config, options)?),
        Command::Riskfree => (config.simulate.seed, run_riskfree(config)?),
        Command::Price => (0, run_price(config)?),
        Command::Discount => (0, run_discount(config, options)?),
        Command::Sensitivity => (config.sensitivity.seed, run_sensitivity(config)?),
    };
    ReportFile::new(command.name(), config, seed, body, options.canonical)
}

fn weights_for(config: &RunConfig, n: usize, seed: u64) -> Result<WeightVector> {
    match config.riskfree.weights {
        WeightSchemeConfig::Equal => WeightVector::equal(n),
        WeightSchemeConfig::Random => random_positive_weights(n, seed),
    }
}

/// Positive weights `(uᵢ + ½)/Σ`, `u` uniform on `[0, 1)`.
pub fn random_positive_weights(n: usize, seed: u64) -> Result<WeightVector> {
    let mut rng = StdRng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.5).collect();
    WeightVector::normalized(&raw)
}

fn run_simulate(config: &RunConfig, options: &RunOptions) -> Result<Value> {
    let s = &config.simulate;
    let grid = s.grid()?;
    let spec = s.process()?;
    let env = s.environment.build(grid)?;
    let paths = simulate(&spec, &env, &grid, s.n_paths, s.seed)?;
    let n = s.n_assets;
    let log_growth: Vec<f64> = (0..n)
        .map(|i| {
            let t = paths.terminal(i);
            t.iter()
                .map(|v| (v / spec.initial_prices()[i]).ln())
                .sum::<f64>()
                / t.len() as f64
        })
        .collect();
    let dynamics = portfolio_dynamics(
        &paths,
        WeightVector::equal(n)?.as_slice(),
        spec.constant_vols().as_deref(),
    )?;
    if let Some(path) = &options.export_panel {
        let ids = (0..n).map(|i| format!("asset{i}")).collect();
        export(&paths.panel(0, ids)?, path)?;
    }
    Ok(json!({
        "n_assets": n,
        "n_paths": s.n_paths,
        "steps": grid.steps(),
        "dt": grid.dt(),
        "mean_log_growth": log_growth,
        "equal_weight_sigma_realized": dynamics.realized_sigma,
        "equal_weight_sigma_analytic": dynamics.analytic_sigma,
        "exported_panel": options.export_panel,
    }))
}

fn panel_from(path: Option<&PathBuf>, normalize: bool) -> Result<Option<PricePanel>> {
    path.map(|p| ingest(p, IngestOptions { normalize }))
        .transpose()
}

fn non_cash(panel: &PricePanel) -> Result<PricePanel> {
    let Some(cash) = panel.cash_column() else {
        return Ok(panel.clone());
    };
    let keep: Vec<usize> = (0..panel.n_assets()).filter(|&i| i != cash).collect();
    let rows: Vec<Vec<f64>> = (0..panel.grid().len())
        .map(|k| keep.iter().map(|&i| panel.price(k, i)).collect())
        .collect();
    PricePanel::from_rows(
        *panel.grid(),
        &rows,
        keep.iter().map(|&i| panel.asset_ids()[i].clone()).collect(),
    )
}

fn run_gauge(config: &RunConfig, options: &RunOptions) -> Result<Value> {
    let given = panel_from(
        options.panel.as_ref().or(config.gauge.panel.as_ref()),
        config.gauge.normalize,
    )?;
    let panel = match given {
        Some(p) => non_cash(&p)?,
        None => {
            let s = &config.simulate;
            let grid = s.grid()?;
            let paths = simulate(&s.process()?, &s.environment.build(grid)?, &grid, 1, s.seed)?;
            paths.panel(0, (0..s.n_assets).map(|i| format!("asset{i}")).collect())?
        }
    };
    let w = weights_for(config, panel.n_assets(), config.simulate.seed)?;
    let market = extract_market_gauge_with(&panel, &w, config.riskfree.rebalance())?;
    let residuals = balance_residuals(&panel, &market.quantities, &market.a, &market.b_n)?;
    let converted = to_riskfree_units(&panel, &market.portfolio_value_series)?;
    let again = extract_market_gauge_with(&converted, &w, config.riskfree.rebalance())?;
    let round_trip = again.a.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rf_real = real_return(panel.grid(), &market.portfolio_value_series, &market.a)?;
    let b_diag: Vec<Vec<f64>> = market
        .b_n
        .matrices()
        .iter()
        .map(|m| m.diagonal().iter().copied().collect())
        .collect();
    Ok(json!({
        "assets": panel.asset_ids(),
        "weights": w.as_slice(),
        "rebalance": config.riskfree.rebalance(),
        "a": market.a.values(),
        "b_n_diagonal": b_diag,
        "portfolio_value": market.portfolio_value_series,
        "max_balance_residual": residuals.max_relative(&market.portfolio_value_series),
        "round_trip_max_abs_a": round_trip,
        "riskfree_real_return_max_abs": rf_real.values().iter().fold(0.0_f64, |m, v| m.max(v.abs())),
    }))
}

fn run_riskfree(config: &RunConfig) -> Result<Value> {
    let s = &config.simulate;
    let grid = s.grid()?;
    let spec = s.process()?;
    let env = s.environment.build(grid)?;
    let settings = StudySettings {
        grid,
        n_paths: s.n_paths,
        seed: s.seed,
    };
    let sizes = &config.riskfree.sizes;
    let scaling = if sizes.len() >= 4 {
        Some(convergence_study(&spec, &env, sizes, &settings)?)
    } else {
        None
    };
    let equal = WeightVector::equal(s.n_assets)?;
    let random = random_positive_weights(s.n_assets, s.seed ^ 0x5eed)?;
    let etemadi = etemadi_check(&spec, &env, &equal, &random, sizes, &settings)?;
    Ok(json!({
        "scaling": scaling,
        "scaling_skipped": scaling.is_none().then_some("needs at least 4 sizes"),
        "etemadi": etemadi,
        "etemadi_decay_ratio": etemadi.decay_ratio(),
    }))
}

fn run_price(config: &RunConfig) -> Result<Value> {
    let p = &config.pde;
    let base =
        PdeProblem::european_on(p.payoff(), p.sigma, p.tau, p.space_intervals, p.time_steps)?;
    let grid = *base.t_grid();
    let problem = base
        .with_a(&GaugeFieldA::constant(grid, p.a)?)?
        .with_b(&RateSeries::constant(grid, p.b)?)?;
    let surface = if p.sigma_hat > 0.0 {
        solve_primed_gauge(&problem, p.sigma_hat)?
    } else {
        solve_gauge_bs(&problem)?
    };
    let value = surface.price(p.spot);
    let rate = -p.a;
    let sigma = if p.sigma_hat > 0.0 {
        p.sigma.hypot(p.sigma_hat)
    } else {
        p.sigma
    };
    let closed_form = if p.b == 0.0 && (p.sigma_hat == 0.0 || p.a == 0.0) {
        match p.payoff {
            super::config::PayoffKind::Call => {
                Some(bs_call_with_rate(p.spot, p.strike, sigma, p.tau, rate))
            }
            super::config::PayoffKind::Put => {
                Some(bs_put_with_rate(p.spot, p.strike, sigma, p.tau, rate))
            }
            _ => None,
        }
    } else {
        None
    };
    let centre = surface.s.partition_point(|s| *s < p.spot);
    let lo = centre.saturating_sub(p.slice_half_width);
    let hi = (centre + p.slice_half_width + 1).min(surface.s.len());
    Ok(json!({
        "spot": p.spot,
        "strike": p.strike,
        "value": value,
        "delta": surface.delta(p.spot),
        "closed_form": closed_form,
        "relative_error": closed_form.map(|c| (value - c) / c),
        "effective_sigma": sigma,
        "slice": {
            "s": &surface.s[lo..hi],
            "value": surface.values.row(0).iter().skip(lo).take(hi - lo).collect::<Vec<_>>(),
            "delta": surface.deltas.row(0).iter().skip(lo).take(hi - lo).collect::<Vec<_>>(),
        },
    }))
}

fn run_discount(config: &RunConfig, options: &RunOptions) -> Result<Value> {
    let d = &config.discount;
    let panel = match panel_from(options.panel.as_ref().or(d.panel.as_ref()), d.normalize)? {
        Some(p) => p,
        None => bundled_panel()?,
    };
    let n = panel.n_assets() - usize::from(panel.cash_column().is_some());
    let w = weights_for(config, n, config.simulate.seed)?;
    let rebalance = match d.rebalance_every {
        0 => crate::riskfree::Rebalance::BuyAndHold,
        k => crate::riskfree::Rebalance::Every(k),
    };
    let report = empirical_pipeline_with(
        &panel,
        &w,
        PipelineOptions {
            rebalance,
            window: d.window,
        },
    )?;
    let fig1 = fig1_series(&panel, &w)?;
    let textbook = match d.textbook_rate {
        Some(r) => {
            let grid = *panel.grid();
            Some(textbook_discount(
                &RateSeries::constant(grid, r)?,
                grid.horizon(),
            )?)
        }
        None => None,
    };
    Ok(json!({
        "table": report.table(),
        "report": report,
        "fig1": fig1,
        "textbook_factor": textbook,
    }))
}

/// `[N × F]` drift gradients per the sensitivity section.
pub fn sensitivity_gradients(config: &RunConfig) -> Result<DMatrix<f64>> {
    let q = &config.sensitivity;
    match q.source {
        GradientSource::Random => {
            let mut rng = StdRng::seed_from_u64(q.seed);
            Ok(DMatrix::from_fn(q.n_assets, q.n_factors, |_, _| {
                rng.sample(StandardNormal)
            }))
        }
        GradientSource::Drift => {
            let s = &config.simulate;
            let grid = s.grid()?;
            let env = s.environment.build(grid)?;
            let spec = s.process()?;
            let xi = env.at(0);
            let rows: Vec<Vec<f64>> = (0..s.n_assets)
                .map(|i| spec.drift().gradient(i, xi))
                .collect();
            Ok(DMatrix::from_fn(s.n_assets, xi.len(), |i, f| rows[i][f]))
        }
    }
}

fn run_sensitivity(config: &RunConfig) -> Result<Value> {
    let q = &config.sensitivity;
    let problem = SensitivityProblem::new(sensitivity_gradients(config)?)?
        .with_cap(q.cap_constant)?
        .with_floor(q.floor_fraction)?
        .with_tolerance(q.tolerance);
    let result = sensitivity_neutral_weights(&problem)?;
    let (lo, hi) = problem.bounds();
    Ok(json!({
        "n_assets": problem.n_assets(),
        "n_factors": problem.gradients().ncols(),
        "bounds": [lo, hi],
        "result": result,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in [
            Command::Simulate,
            Command::Gauge,
            Command::Riskfree,
            Command::Price,
            Command::Discount,
            Command::Sensitivity,
        ] {
            assert_eq!(Command::parse(c.name()).unwrap(), c);
        }
        assert!(Command::parse("frobnicate").is_err());
    }

    #[test]
    fn random_weights_positive() {
        let w = random_positive_weights(50, 3).unwrap();
        assert!(w.as_slice().iter().all(|v| *v > 0.0));
        assert!(w.max() < 3.0 / 50.0);
    }
}
