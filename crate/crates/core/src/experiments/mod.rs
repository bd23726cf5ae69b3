//! Batch experiments: configuration, sweeps, result records and plots.

pub mod config;
pub mod plot;
pub mod sweeps;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{parse_key_values, SweepConfig};
pub use plot::{render_svg, series_from_records, PlotSpec, Series};
pub use sweeps::{run_concentration, run_constant_time_sweep, run_delta_sweep, run_oracle_check, DEGENERACY_THRESHOLD};

/// Column order of the results CSV.
pub const CSV_HEADER: &str = "experiment,p,n,delta,T,metric,value,stderr,instances,base_seed";

/// One `(cell, metric)` result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub p: usize,
    pub n: usize,
    pub delta: f64,
    #[serde(rename = "T")]
    pub total_time: f64,
    pub metric: String,
    pub value: f64,
    pub stderr: f64,
    pub instances: usize,
    pub base_seed: u64,
}

impl ExperimentRecord {
    fn key(&self) -> (String, usize, usize, u64, String) {
        (
            self.experiment.clone(),
            self.p,
            self.n,
            self.delta.to_bits(),
            self.metric.clone(),
        )
    }
}

/// Rejects record sets with a repeated `(experiment, p, n, delta, metric)` key.
pub fn check_unique_keys(records: &[ExperimentRecord]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in records {
        if !seen.insert(r.key()) {
            return Err(Error::InvalidArgument(format!(
                "duplicate record key ({}, p={}, n={}, delta={}, {})",
                r.experiment, r.p, r.n, r.delta, r.metric
            )));
        }
    }
    Ok(())
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        writer.serialize(r).expect("in-memory CSV write");
    }
    let bytes = writer.into_inner().expect("in-memory CSV flush");
    out.push_str(std::str::from_utf8(&bytes).expect("CSV output is UTF-8"));
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header '{CSV_HEADER}'"),
        });
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                msg: e.to_string(),
            })
        })
        .collect()
}

/// Writes the CSV and an SVG plot of `spec.metric`.
pub fn emit_outputs(
    records: &[ExperimentRecord],
    csv_path: &std::path::Path,
    svg_path: &std::path::Path,
    spec: &PlotSpec,
) -> std::io::Result<()> {
    std::fs::write(csv_path, records_to_csv(records))?;
    std::fs::write(svg_path, render_svg(spec, &series_from_records(records, &spec.metric)))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_records() -> Vec<ExperimentRecord> {
        let mut out = Vec::new();
        for (n, scale) in [(8usize, 1.0), (12, 1.3)] {
            for p in [8usize, 16, 32] {
                out.push(ExperimentRecord {
                    experiment: "constant_time".into(),
                    p,
                    n,
                    delta: 17.0 / p as f64,
                    total_time: 17.0,
                    metric: "abs_error".into(),
                    value: scale * 0.04 / p as f64,
                    stderr: 1e-4,
                    instances: 100,
                    base_seed: 1,
                });
            }
        }
        out
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let recs = sample_records();
        let csv = records_to_csv(&recs);
        assert!(csv.starts_with(CSV_HEADER));
        let back = records_from_csv(&csv).unwrap();
        assert_eq!(back, recs);
        assert_eq!(records_to_csv(&back), csv);
    }

    #[test]
    fn empty_records_give_header_only() {
        assert_eq!(records_to_csv(&[]), format!("{CSV_HEADER}\n"));
        assert!(records_from_csv(&records_to_csv(&[])).unwrap().is_empty());
    }

    #[test]
    fn nan_values_survive() {
        let mut r = sample_records().remove(0);
        r.value = f64::NAN;
        let back = records_from_csv(&records_to_csv(&[r])).unwrap();
        assert!(back[0].value.is_nan());
    }

    #[test]
    fn bad_csv_is_rejected() {
        assert!(records_from_csv("a,b\n1,2\n").is_err());
        let bad_row = format!("{CSV_HEADER}\nx,notanumber,8,1,17,m,0,0,1,1\n");
        assert!(matches!(records_from_csv(&bad_row), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn duplicate_keys_detected() {
        let mut recs = sample_records();
        check_unique_keys(&recs).unwrap();
        recs.push(recs[0].clone());
        assert!(check_unique_keys(&recs).is_err());
    }
}
