use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use super::ExperimentRow;
use crate::error::{Error, Result};

/// Column order of the CSV form, matching the row's field order.
pub const COLUMNS: [&str; 10] = [
    "dataset",
    "algorithm",
    "k",
    "alpha_sup",
    "beta_min",
    "social_cost_kmeans",
    "social_cost_kmedians",
    "wall_time_ms",
    "seed",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::Parse(format!("unknown table format `{other}`"))),
        }
    }
}

/// Writes rows as CSV (header always present) or a JSON array. `+∞` is
/// written as `inf`.
pub fn emit_table(rows: &[ExperimentRow], path: impl AsRef<Path>, format: TableFormat) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
            w.write_record(COLUMNS)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            let mut file = file;
            serde_json::to_writer_pretty(&mut file, rows)?;
            writeln!(file)?;
            file.flush()?;
        }
    }
    Ok(())
}

/// Reads a table written by [`emit_table`].
pub fn read_table(path: impl AsRef<Path>, format: TableFormat) -> Result<Vec<ExperimentRow>> {
    let file = File::open(path)?;
    match format {
        TableFormat::Csv => csv::Reader::from_reader(file)
            .deserialize()
            .map(|r| r.map_err(Error::from))
            .collect(),
        TableFormat::Json => Ok(serde_json::from_reader(file)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize, beta: f64) -> ExperimentRow {
        ExperimentRow {
            dataset: "d".into(),
            algorithm: "greedy".into(),
            k,
            alpha_sup: 1.25,
            beta_min: beta,
            social_cost_kmeans: 10.5,
            social_cost_kmedians: 3.0,
            wall_time_ms: 1.5,
            seed: u64::MAX,
            error: String::new(),
        }
    }

    #[test]
    fn csv_shape_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let rows: Vec<_> = (0..20).map(|k| row(k, if k == 3 { f64::INFINITY } else { 2.0 })).collect();
        emit_table(&rows, &path, TableFormat::Csv).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 21);
        assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
        assert!(text.lines().nth(4).unwrap().contains(",inf,"));
        assert_eq!(read_table(&path, TableFormat::Csv).unwrap(), rows);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.json");
        let rows = vec![row(2, f64::INFINITY), row(3, 1.5)];
        emit_table(&rows, &path, TableFormat::Json).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().contains("\"inf\""));
        assert_eq!(read_table(&path, TableFormat::Json).unwrap(), rows);
    }

    #[test]
    fn empty_csv_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        emit_table(&[], &path, TableFormat::Csv).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().trim_end(), COLUMNS.join(","));
        assert!(read_table(&path, TableFormat::Csv).unwrap().is_empty());
    }
}
