//! Textbook versus gauge-invariant discounting, and the empirical
//! final-value pipeline.

mod pipeline;
mod rates;

pub use pipeline::{
    empirical_pipeline, empirical_pipeline_with, fig1_series, rolling_moments, AssetValue,
    DiscountMetadata, DiscountReport, LabeledSeries, PipelineOptions, DEFAULT_WINDOW,
};
pub use rates::{
    backward_translate, forward_translate, gauge_discount, textbook_discount, DiscountMode,
    DiscountSpec,
};
