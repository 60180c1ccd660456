//! The bundled synthetic index panel and its frozen pipeline baseline.
//!
//! Regenerate both with
//! `GAUGEFIN_REGENERATE=1 cargo test --test fixture_regression -- --ignored`.

use std::fmt::Write as _;
use std::path::PathBuf;

use chrono::{Days, NaiveDate};
use gaugefin::discount::{empirical_pipeline, fig1_series, DiscountReport};
use gaugefin::gauge::TimeGrid;
use gaugefin::io::{bundled_panel, ingest, IngestOptions};
use gaugefin::riskfree::WeightVector;
use gaugefin::sim::{simulate, EnvironmentSeries, Functional, NoiseKind, ProcessSpec};

const LABELS: [(&str, f64, f64); 11] = [
    ("MSCI Emerging Market Stock", 0.09, 0.25),
    ("S&P 500", 0.07, 0.17),
    ("MSCI EAFE", 0.05, 0.18),
    ("Barclays High Yield", 0.065, 0.10),
    ("JPMorgan Emerging Markets Bond", 0.065, 0.09),
    ("iBoxx Liquid Investment Grade", 0.05, 0.07),
    ("Barclays Broad Bond", 0.04, 0.04),
    ("Barclays Inflation Linked Bond", 0.04, 0.06),
    ("DJ US Real Estate", 0.07, 0.25),
    ("DJ Global ex-US Select Real Estate", 0.05, 0.22),
    ("S&P GSCI Commodities", -0.02, 0.24),
];
const CASH_LABEL: &str = "US Dollar";
const WEEKS: usize = 520;
const SEED: u64 = 20050701;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn baseline() -> DiscountReport {
    let text =
        std::fs::read_to_string(fixture_dir().join("synthetic_indices_baseline.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
#[ignore = "rewrites the bundled fixture"]
fn regenerate_fixture() {
    if std::env::var("GAUGEFIN_REGENERATE").as_deref() != Ok("1") {
        return;
    }
    let grid = TimeGrid::over(WEEKS as f64 * 7.0 / 365.25, WEEKS).unwrap();
    let spec = ProcessSpec::new(
        LABELS.len(),
        Functional::Constant(LABELS.iter().map(|l| l.1).collect()),
        Functional::Constant(LABELS.iter().map(|l| l.2).collect()),
        NoiseKind::Normal,
    )
    .unwrap();
    let paths = simulate(&spec, &EnvironmentSeries::flat(grid, 1), &grid, 1, SEED).unwrap();
    let start = NaiveDate::from_ymd_opt(2005, 7, 1).unwrap();
    let mut csv = String::from("date");
    for (label, _, _) in LABELS {
        write!(csv, ",{label}").unwrap();
    }
    writeln!(csv, ",{CASH_LABEL}#cash").unwrap();
    for k in 0..=WEEKS {
        write!(
            csv,
            "{}",
            (start + Days::new(7 * k as u64)).format("%Y-%m-%d")
        )
        .unwrap();
        for i in 0..LABELS.len() {
            write!(csv, ",{:.8}", paths.price(0, k, i)).unwrap();
        }
        csv.push_str(",1\n");
    }
    let path = fixture_dir().join("synthetic_indices.csv");
    std::fs::write(&path, csv).unwrap();
    let panel = ingest(&path, IngestOptions::default()).unwrap();
    let report = empirical_pipeline(&panel, &WeightVector::equal(LABELS.len()).unwrap()).unwrap();
    let mut json = serde_json::to_string_pretty(&report).unwrap();
    json.push('\n');
    std::fs::write(fixture_dir().join("synthetic_indices_baseline.json"), json).unwrap();
}

#[test]
fn pipeline_matches_frozen_baseline() {
    let panel = bundled_panel().unwrap();
    let report = empirical_pipeline(&panel, &WeightVector::equal(11).unwrap()).unwrap();
    let frozen = baseline();
    assert_eq!(report.assets.len(), 12);
    assert_eq!(report.assets.len(), frozen.assets.len());
    for (a, b) in report.assets.iter().zip(&frozen.assets) {
        assert_eq!(a.label, b.label);
        assert!(
            (a.final_value - b.final_value).abs() <= 1e-12,
            "{}",
            a.label
        );
        assert!(
            (a.model_discount_factor - b.model_discount_factor).abs() <= 1e-12,
            "{}",
            a.label
        );
    }
    assert_eq!(report.riskfree_final_value, 1.0);
    assert!(report
        .assets
        .iter()
        .all(|a| a.final_value > 0.0 && a.discount_factor > 0.0));
    assert_eq!(report.cash_label, CASH_LABEL);
}

#[test]
fn fig1_declines_from_one() {
    let panel = bundled_panel().unwrap();
    let s = fig1_series(&panel, &WeightVector::equal(11).unwrap()).unwrap();
    assert_eq!(s.values[0], 1.0);
    let last = *s.values.last().unwrap();
    assert!(last < 1.0);
    assert!((last - baseline().cash_discount_factor).abs() <= 1e-12);
    assert_eq!(s.dates.as_ref().unwrap().len(), WEEKS + 1);
}

#[test]
fn table_has_expected_shape() {
    let report = baseline();
    let table = report.table();
    assert!(table.contains("Final Asset Values"));
    for (label, _, _) in LABELS {
        assert!(table.contains(label));
    }
    assert!(table.contains(CASH_LABEL));
}
