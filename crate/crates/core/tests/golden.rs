//! Byte-identity of CSV and SVG outputs against checked-in fixtures.
//! Set `SKQA_BLESS=1` to regenerate after an intentional format change.

use std::path::PathBuf;

use skqa_core::experiments::{
    records_from_csv, records_to_csv, render_svg, series_from_records, ExperimentRecord, PlotSpec,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn check(name: &str, actual: &str) {
    let path = fixture(name);
    if std::env::var_os("SKQA_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{name} differs from fixture");
}

fn records() -> Vec<ExperimentRecord> {
    let mut out = Vec::new();
    for (n, scale) in [(8usize, 1.0), (10, 1.1), (12, 0.95)] {
        for p in [8usize, 16, 32, 64] {
            out.push(ExperimentRecord {
                experiment: "constant_time".into(),
                p,
                n,
                delta: 17.0 / p as f64,
                total_time: 17.0,
                metric: "abs_error".into(),
                value: scale * 0.11 / p as f64,
                stderr: scale * 1e-4,
                instances: 100,
                base_seed: 1,
            });
        }
    }
    out
}

#[test]
fn csv_matches_fixture_and_round_trips() {
    let csv = records_to_csv(&records());
    check("records.csv", &csv);
    let parsed = records_from_csv(&csv).unwrap();
    assert_eq!(parsed, records());
    assert_eq!(records_to_csv(&parsed), csv);
}

#[test]
fn svg_matches_fixture() {
    let recs = records_from_csv(&std::fs::read_to_string(fixture("records.csv")).unwrap()).unwrap();
    let spec = PlotSpec::decay("abs_error");
    let svg = render_svg(&spec, &series_from_records(&recs, &spec.metric));
    assert_eq!(svg.matches(r#"class="legend-entry""#).count(), 3);
    check("records.svg", &svg);
}
