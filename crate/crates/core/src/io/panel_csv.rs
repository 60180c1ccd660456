//! Price panels as CSV: a `date` column followed by one column per asset.
//! A label ending in `#cash` marks the cash column.

use std::path::Path;

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gauge::{PricePanel, TimeGrid};

pub const CASH_TAG: &str = "#cash";
const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Rescale every column to 1 at the first date.
    pub normalize: bool,
}

fn parse_err(path: &Path, row: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        row,
        column,
        message: message.into(),
    }
}

/// Reads a panel file. Rows and columns in errors are 1-based; row 1 is
/// the first data row after the header.
pub fn ingest(path: &Path, options: IngestOptions) -> Result<PricePanel> {
    let file = std::fs::File::open(path).map_err(|e| parse_err(path, 0, 0, e.to_string()))?;
    ingest_reader(file, path, options)
}

/// [`ingest`] from any reader; `source` names it in errors.
pub fn ingest_reader(
    input: impl std::io::Read,
    source: &Path,
    options: IngestOptions,
) -> Result<PricePanel> {
    let path = source;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| parse_err(path, 0, 0, e.to_string()))?
        .clone();
    if header.len() < 2 {
        return Err(parse_err(
            path,
            0,
            0,
            "header needs a date column and at least one asset",
        ));
    }
    let mut labels = Vec::with_capacity(header.len() - 1);
    let mut cash = None;
    for (c, raw) in header.iter().enumerate().skip(1) {
        let label = match raw.strip_suffix(CASH_TAG) {
            Some(base) => {
                if cash.is_some() {
                    return Err(parse_err(
                        path,
                        0,
                        c + 1,
                        "more than one column tagged #cash",
                    ));
                }
                cash = Some(c - 1);
                base.trim_end().to_string()
            }
            None => raw.to_string(),
        };
        labels.push(label);
    }

    let width = header.len();
    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| parse_err(path, row, 0, e.to_string()))?;
        if record.len() != width {
            return Err(parse_err(
                path,
                row,
                record.len().min(width) + 1,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let date = NaiveDate::parse_from_str(record[0].trim(), "%Y-%m-%d").map_err(|e| {
            parse_err(
                path,
                row,
                1,
                format!("bad ISO-8601 date {:?}: {e}", &record[0]),
            )
        })?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(parse_err(
                    path,
                    row,
                    1,
                    format!("date {date} does not follow {prev}; dates must strictly increase"),
                ));
            }
        }
        dates.push(date);
        for c in 1..width {
            let v: f64 = record[c].trim().parse().map_err(|_| {
                parse_err(path, row, c + 1, format!("not a number: {:?}", &record[c]))
            })?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(parse_err(
                    path,
                    row,
                    c + 1,
                    format!("price must be positive, got {v}"),
                ));
            }
            values.push(v);
        }
    }
    if dates.len() < 2 {
        return Err(parse_err(
            path,
            dates.len(),
            0,
            "need at least two dated rows",
        ));
    }
    let n = width - 1;
    let mut prices = DMatrix::from_row_slice(dates.len(), n, &values);
    if options.normalize {
        for i in 0..n {
            let first = prices[(0, i)];
            prices.column_mut(i).scale_mut(1.0 / first);
        }
    }
    let grid = grid_for_dates(&dates)?;
    let mut panel = PricePanel::new(grid, prices, labels)?.with_dates(dates)?;
    if let Some(c) = cash {
        panel = panel.with_cash_column(c)?;
    }
    Ok(panel)
}

/// Uniform grid whose step is the mean date spacing in 365.25-day years.
pub fn grid_for_dates(dates: &[NaiveDate]) -> Result<TimeGrid> {
    let steps = dates.len() - 1;
    let days = (dates[steps] - dates[0]).num_days() as f64;
    TimeGrid::new(0.0, days / DAYS_PER_YEAR / steps as f64, steps)
}

/// Writes a panel with shortest round-trip float formatting. Panels
/// without dates get consecutive daily dates from 2000-01-01.
pub fn export(panel: &PricePanel, path: &Path) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let mut header = vec!["date".to_string()];
    for (i, label) in panel.asset_ids().iter().enumerate() {
        if panel.cash_column() == Some(i) {
            header.push(format!("{label}{CASH_TAG}"));
        } else {
            header.push(label.clone());
        }
    }
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    writer.write_record(&header).map_err(csv_err)?;
    let fallback = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
    for k in 0..panel.grid().len() {
        let date = match panel.dates() {
            Some(d) => d[k],
            None => fallback + chrono::Days::new(k as u64),
        };
        let mut record = vec![date.format("%Y-%m-%d").to_string()];
        record.extend((0..panel.n_assets()).map(|i| format!("{:?}", panel.price(k, i))));
        writer.write_record(&record).map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn well_formed() {
        let f = file("date,a,usd#cash\n2020-01-01,1,1\n2020-01-08,1.5,1\n2020-01-15,2,1\n");
        let p = ingest(f.path(), IngestOptions::default()).unwrap();
        assert_eq!(p.prices().shape(), (3, 2));
        assert_eq!(p.cash_column(), Some(1));
        assert_eq!(p.asset_ids()[1], "usd");
        assert!((p.grid().dt() - 7.0 / 365.25).abs() < 1e-15);
    }

    #[test]
    fn zero_price_names_row() {
        let mut s = String::from("date,a,b\n");
        for d in 1..=9 {
            let b = if d == 7 { "0" } else { "2.0" };
            s.push_str(&format!("2021-03-{d:02},1.0,{b}\n"));
        }
        let err = ingest(file(&s).path(), IngestOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 7") && msg.contains("column 3"), "{msg}");
    }

    #[test]
    fn ragged_and_decreasing() {
        let err = ingest(
            file("date,a,b\n2020-01-01,1,1\n2020-01-02,1\n").path(),
            IngestOptions::default(),
        );
        assert!(err.unwrap_err().to_string().contains("row 2"));
        let err = ingest(
            file("date,a\n2020-01-02,1\n2020-01-01,1\n").path(),
            IngestOptions::default(),
        );
        assert!(err.unwrap_err().to_string().contains("strictly increase"));
        let err = ingest(
            file("date,a#cash,b#cash\n2020-01-01,1,1\n2020-01-02,1,1\n").path(),
            IngestOptions::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn normalization_flag() {
        let f = file("date,a\n2020-01-01,4\n2020-01-02,5\n");
        let p = ingest(f.path(), IngestOptions { normalize: true }).unwrap();
        assert_eq!(p.column(0), vec![1.0, 1.25]);
    }

    #[test]
    fn export_round_trip() {
        let f = file("date,a,usd#cash\n2020-01-01,1.0,1.0\n2020-01-08,1.1000000000000001,0.3333333333333333\n");
        let p = ingest(f.path(), IngestOptions::default()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        export(&p, out.path()).unwrap();
        let q = ingest(out.path(), IngestOptions::default()).unwrap();
        assert_eq!(p, q);
    }
}
