//! Panel files, run configuration, reports and the batch commands.

mod config;
mod panel_csv;
mod report;
mod run;

pub use config::{
    DiscountConfig, EnvironmentConfig, FunctionalConfig, GaugeConfig, GradientSource, PayoffKind,
    PdeConfig, RiskfreeConfig, RunConfig, SensitivityConfig, SimulateConfig, WeightSchemeConfig,
};
pub use panel_csv::{export, grid_for_dates, ingest, ingest_reader, IngestOptions, CASH_TAG};
pub use report::{config_hash, Provenance, ReportFile};
pub use run::{
    bundled_panel, random_positive_weights, run, sensitivity_gradients, Command, RunOptions,
    BUNDLED_PANEL,
};
