//! Function specification files and CSV output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cells::{jf_2d, PiecewiseCell2D};
use crate::energy::{jf_1d, EnergyBreakdown, Interval, Params1D, Params2D, PureJump1D};
use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::report::SuiteReport;

/// A function with its window, and optionally its own parameters.
///
/// ```text
/// {"pure_jump_1d": {"window": [-3, 3], "function": {"base": -2, "jumps": [
///     {"position": -1, "height": 2}, {"position": 1, "height": 2}]}}}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    #[serde(rename = "pure_jump_1d")]
    PureJump1d {
        window: Interval,
        function: PureJump1D,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<Params1D>,
    },
    #[serde(rename = "cells_2d")]
    Cells2d {
        window: Polygon,
        cells: PiecewiseCell2D,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<Params2D>,
    },
}

/// Parses a specification; errors carry the JSON path, line and column.
pub fn parse_function_spec(text: &str) -> Result<FunctionSpec> {
    let mut de = serde_json::Deserializer::from_str(text);
    let spec: FunctionSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Schema {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| Error::Schema {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(spec)
}

impl FunctionSpec {
    /// Energy with the spec's own parameters, falling back to the given
    /// defaults.
    pub fn energy(&self, p1: &Params1D, p2: &Params2D) -> Result<EnergyBreakdown> {
        match self {
            FunctionSpec::PureJump1d {
                window,
                function,
                params,
            } => jf_1d(*window, function, params.as_ref().unwrap_or(p1)),
            FunctionSpec::Cells2d {
                window,
                cells,
                params,
            } => jf_2d(window, cells, params.as_ref().unwrap_or(p2)),
        }
    }
}

/// Writes a header and rows of numbers with 17 significant digits.
pub fn write_csv<W: Write>(
    out: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io {
        path: "csv".into(),
        message: e.to_string(),
    };
    w.write_record(header).map_err(io)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::param(
                "csv",
                format!("row of {} values for {} columns", row.len(), header.len()),
            ));
        }
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "csv".into(),
        message: e.to_string(),
    })
}

/// Reads back a numeric CSV written by [`write_csv`].
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let io = |e: csv::Error| Error::Io {
        path: "csv".into(),
        message: e.to_string(),
    };
    let header = r
        .headers()
        .map_err(io)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io)?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::param("csv", format!("{s}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

#[derive(Serialize)]
struct ReportRow<'a> {
    suite: &'a str,
    kind: &'static str,
    name: &'a str,
    value: String,
    tolerance: String,
    samples: u64,
    pass: bool,
    exploratory: bool,
}

fn collect_rows<'a>(r: &'a SuiteReport, out: &mut Vec<ReportRow<'a>>) {
    for c in &r.checks {
        out.push(ReportRow {
            suite: &r.suite,
            kind: "check",
            name: &c.check_name,
            value: format!("{:.16e}", c.max_violation),
            tolerance: format!("{:.16e}", c.tolerance),
            samples: c.samples,
            pass: c.pass,
            exploratory: c.exploratory,
        });
    }
    for t in &r.trials {
        out.push(ReportRow {
            suite: &r.suite,
            kind: "trials",
            name: &t.name,
            value: format!("{:.16e}", t.min_excess),
            tolerance: format!("{:.16e}", t.tolerance),
            samples: t.trials,
            pass: t.pass,
            exploratory: false,
        });
        for (k, v) in &t.residuals {
            out.push(ReportRow {
                suite: &r.suite,
                kind: "residual",
                name: k,
                value: format!("{v:.16e}"),
                tolerance: format!("{:.16e}", t.tolerance),
                samples: t.trials,
                pass: *v <= t.tolerance,
                exploratory: false,
            });
        }
    }
    for c in &r.children {
        collect_rows(c, out);
    }
}

/// One row per check, trial batch and residual, children flattened.
/// Timings and the manifest are left out.
pub fn write_report_csv<W: Write>(out: W, report: &SuiteReport) -> Result<()> {
    let mut rows = Vec::new();
    collect_rows(report, &mut rows);
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io {
        path: "csv".into(),
        message: e.to_string(),
    };
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "csv".into(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const STAIRCASE: &str = r#"{"pure_jump_1d": {"window": [-3, 3], "function": {"base": -2, "jumps": [
        {"position": -1, "height": 2}, {"position": 1, "height": 2}]}}}"#;

    #[test]
    fn staircase_spec_energy() {
        let spec = parse_function_spec(STAIRCASE).unwrap();
        let e = spec
            .energy(
                &Params1D::normalized(0.0).unwrap(),
                &Params2D::normalized(0.0).unwrap(),
            )
            .unwrap();
        assert!((e.total - 14.0).abs() < 1e-13);
    }

    #[test]
    fn square_spec_energy() {
        let text = r#"{"cells_2d": {"window": [{"x":0,"y":0},{"x":1,"y":0},{"x":1,"y":1},{"x":0,"y":1}],
            "cells": {"regions": [{"outer": [{"x":0,"y":0},{"x":1,"y":0},{"x":1,"y":1},{"x":0,"y":1}], "value": 0}],
                      "interfaces": []}}}"#;
        let spec = parse_function_spec(text).unwrap();
        let e = spec
            .energy(
                &Params1D::normalized(0.0).unwrap(),
                &Params2D::normalized(0.0).unwrap(),
            )
            .unwrap();
        assert!((e.total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn schema_errors_have_locations() {
        let bad = r#"{"pure_jump_1d": {"window": [-3, 3],
            "function": {"base": -2, "jumps": [{"position": -1, "height": "two"}]}}}"#;
        match parse_function_spec(bad) {
            Err(Error::Schema { path, line, .. }) => {
                assert_eq!(path, "pure_jump_1d.function.jumps[0].height");
                assert_eq!(line, 2);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_function_spec(
                r#"{"pure_jump_1d": {"window": [3, -3], "function": {"base": 0}}}"#
            ),
            Err(Error::Schema { .. })
        ));
        assert!(parse_function_spec(
            r#"{"pure_jump_1d": {"window": [0, 1], "function": {"base": 0}, "extra": 1}}"#
        )
        .is_err());
    }

    #[test]
    fn round_trip_spec() {
        let spec = parse_function_spec(STAIRCASE).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(parse_function_spec(&text).unwrap(), spec);
    }

    #[test]
    fn report_csv_flattens_children() {
        use crate::report::{CheckReport, Manifest, MaxTracker, TrialReport};
        let mut t = MaxTracker::default();
        t.observe(0.5, &[1.0]);
        let mut child = SuiteReport::new("child", Manifest::new("test", 0));
        child.push_check(CheckReport::from_tracker("c", "g", t, 1.0));
        let mut trials = TrialReport::empty("t", 1e-9);
        trials.trials = 3;
        trials.min_excess = 0.25;
        trials.residuals.insert("gap".into(), 1e-12);
        let mut top = SuiteReport::new("top", Manifest::new("test", 0));
        top.push_trials(trials.finish());
        top.push_child(child);
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &top).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "suite,kind,name,value,tolerance,samples,pass,exploratory"
        );
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("child,check,c,5.0000000000000000e-1,"));
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let rows = vec![vec![0.1, 1.0 / 3.0], vec![-2.5e-300, std::f64::consts::PI]];
        let mut buf = Vec::new();
        write_csv(&mut buf, &["x", "f"], rows.clone()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,f\n"));
        let (header, back) = read_csv(&text).unwrap();
        assert_eq!(header, vec!["x", "f"]);
        assert_eq!(back, rows);
        assert!(write_csv(Vec::new(), &["x"], vec![vec![1.0, 2.0]]).is_err());
    }
}
