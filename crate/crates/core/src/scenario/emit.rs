use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::config::OutputFormat;
use super::report::{CheckOutcome, RunReport};
use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::lab::ModulusTable;

/// Seventeen significant digits: enough for every `f64` to parse back exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i), _) if !n.is_f64() => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Pretty JSON with struct field order preserved and floats in `{:.16e}` form.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(value_to_json(&v))
}

pub fn value_to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

/// Drops the `timing` key, leaving the deterministic part of a report.
pub fn strip_timing(json: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(json).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        map.shift_remove("timing");
    }
    Ok(value_to_json(&v))
}

pub fn parse_report(json: &str) -> Result<RunReport> {
    serde_json::from_str(json).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn join_mu(mu: &[f64]) -> String {
    mu.iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(";")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

const BOUND_HEADER: [&str; 7] = ["bound_name", "mu1", "mu2", "theoretical", "empirical", "margin", "passed"];

fn bound_row(r: &BoundReport) -> Vec<String> {
    vec![
        r.bound_name.clone(),
        join_mu(&r.mu1),
        r.mu2.as_deref().map(join_mu).unwrap_or_default(),
        format_float(r.theoretical),
        format_float(r.empirical),
        format_float(r.margin),
        r.passed.to_string(),
    ]
}

fn modulus_rows(t: &ModulusTable) -> Vec<Vec<String>> {
    t.delta_ladder.iter().zip(&t.omega).map(|(d, w)| vec![format_float(*d), format_float(*w)]).collect()
}

/// Writes one CSV per check: bound tables, `(delta, omega)` plot data, or witness rows.
pub fn write_csv(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for result in &report.results {
        let name = result.check.as_str();
        let Some(outcome) = &result.outcome else { continue };
        match outcome {
            CheckOutcome::Bounds { reports, .. } => {
                let path = dir.join(format!("{name}.csv"));
                write_rows(&path, &BOUND_HEADER, reports.iter().map(bound_row).collect())?;
                written.push(path);
            }
            CheckOutcome::Budget { checks, .. } => {
                let path = dir.join(format!("{name}.csv"));
                let mut header = vec!["eps"];
                header.extend(BOUND_HEADER);
                let rows = checks
                    .iter()
                    .flat_map(|c| {
                        c.reports.iter().map(move |r| {
                            let mut row = vec![format_float(c.budget.eps)];
                            row.extend(bound_row(r));
                            row
                        })
                    })
                    .collect();
                write_rows(&path, &header, rows)?;
                written.push(path);
            }
            CheckOutcome::Modulus { table } => {
                let path = dir.join(format!("{name}.csv"));
                write_rows(&path, &["delta", "omega"], modulus_rows(table))?;
                written.push(path);
            }
            CheckOutcome::IntegralUc { a, f } => {
                for (suffix, t) in [("a", a), ("f", f)] {
                    let path = dir.join(format!("{name}-{suffix}.csv"));
                    write_rows(&path, &["delta", "omega"], modulus_rows(t))?;
                    written.push(path);
                }
            }
            CheckOutcome::Witnesses { pairs } => {
                let path = dir.join(format!("{name}.csv"));
                let rows = pairs
                    .iter()
                    .map(|w| {
                        vec![
                            w.n.to_string(),
                            join_mu(&w.pair.mu1),
                            join_mu(&w.pair.mu2),
                            format_float(w.pair.separation),
                            format_float(w.pair.gap),
                        ]
                    })
                    .collect();
                write_rows(&path, &["n", "mu1", "mu2", "separation", "gap"], rows)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

/// Writes `report.json` and/or the per-check CSV files under `dir`.
pub fn emit(report: &RunReport, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format.json() {
        let path = dir.join("report.json");
        std::fs::write(&path, to_json_string(report)?)?;
        written.push(path);
    }
    if format.csv() {
        written.extend(write_csv(report, dir)?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{run, CheckKind, ScenarioConfig};

    fn sample_report() -> RunReport {
        let mut cfg = ScenarioConfig::for_family("scalar-exp");
        cfg.checks = vec![CheckKind::Domination, CheckKind::Modulus];
        cfg.pairs.list = vec![[vec![1.0], vec![0.5]]];
        cfg.sampler.seed = Some(3);
        cfg.sampler.pairs_per_rung = 8;
        run(&cfg).unwrap()
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        for v in [std::f64::consts::PI, 1e-300, -2.5e17, f64::MIN_POSITIVE, 5e-324] {
            assert_eq!(format_float(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn empty_report_is_a_json_object() {
        let report = run(&ScenarioConfig::for_family("sin-inv")).unwrap();
        let json = to_json_string(&report).unwrap();
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["results"], Value::Array(vec![]));
        assert_eq!(v["warnings"], Value::Array(vec![]));
        assert_eq!(v["config"]["family"]["name"], "sin-inv");
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["tool", "version", "config", "results", "summary", "warnings", "timing"]);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let report = sample_report();
        let json = to_json_string(&report).unwrap();
        let back = parse_report(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(to_json_string(&back).unwrap(), json);
    }

    #[test]
    fn config_echo_reruns_identically() {
        let report = sample_report();
        let again = run(&report.config).unwrap();
        assert_eq!(
            strip_timing(&to_json_string(&again).unwrap()).unwrap(),
            strip_timing(&to_json_string(&report).unwrap()).unwrap()
        );
    }

    #[test]
    fn witness_csv_first_row() {
        let mut cfg = ScenarioConfig::for_family("sin-inv");
        cfg.checks = vec![CheckKind::Witness];
        let report = run(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = emit(&report, dir.path(), OutputFormat::Both).unwrap();
        assert_eq!(files.len(), 2);
        let mut rd = csv::Reader::from_path(dir.path().join("witness.csv")).unwrap();
        assert_eq!(rd.headers().unwrap(), vec!["n", "mu1", "mu2", "separation", "gap"]);
        let row = rd.records().next().unwrap().unwrap();
        assert_eq!(&row[0], "1");
        let sep: f64 = row[3].parse().unwrap();
        let gap: f64 = row[4].parse().unwrap();
        assert!((sep - 0.1061033).abs() < 1e-7);
        assert!((gap - 1.0).abs() < 1e-7);
    }

    #[test]
    fn bound_csv_header() {
        let report = sample_report();
        let dir = tempfile::tempdir().unwrap();
        emit(&report, dir.path(), OutputFormat::Csv).unwrap();
        let mut rd = csv::Reader::from_path(dir.path().join("domination.csv")).unwrap();
        assert_eq!(rd.headers().unwrap(), BOUND_HEADER.to_vec());
        assert_eq!(rd.records().count(), crate::lab::DOMINATION_CHECKS.len());
        let mut rd = csv::Reader::from_path(dir.path().join("modulus.csv")).unwrap();
        assert_eq!(rd.headers().unwrap(), vec!["delta", "omega"]);
    }
}
