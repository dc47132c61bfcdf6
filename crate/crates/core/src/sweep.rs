//! Entanglement surfaces over the rotation parameter λ and the input
//! parameter α.
//!
//! Every grid point uses U = `base_u` (σ_z by default) and Ũ = R_y(2λ) on all
//! targets, with input |η⟩^⊗n, |η⟩ = √α|0⟩ + √(1−α)|1⟩. Grid points are
//! evaluated in parallel; records come back ordered by λ, then α, then outcome.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::format::{g12, to_json_string};
use crate::gates::{pauli, ry, Axis, UnitaryPair};
use crate::metrics::{evaluate, MetricKind};
use crate::parallel::map_ordered;
use crate::qla::{ComplexMatrix, StateVector};
use crate::switch::{run, Protocol, SwitchSpec};

pub const DEFAULT_STEPS: usize = 33;
pub const CSV_HEADER: [&str; 6] = ["lambda", "alpha", "outcome", "probability", "metric", "reachable"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    protocol: Protocol,
    lambda_grid: Vec<f64>,
    alpha_grid: Vec<f64>,
    base_u: ComplexMatrix,
    metric: MetricKind,
}

/// `k` evenly spaced points from `lo` to `hi` inclusive; a single point sits at `lo`.
pub fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..k)
            .map(|i| {
                if i == k - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (k - 1) as f64
                }
            })
            .collect(),
    }
}

/// Concurrence for Bell, GME concurrence for everything larger.
pub fn auto_metric(protocol: Protocol) -> MetricKind {
    protocol.default_metric().unwrap_or(MetricKind::GmeConcurrence)
}

impl SweepPlan {
    /// `metric = None` picks [`auto_metric`].
    pub fn new(
        protocol: Protocol,
        lambda_grid: Vec<f64>,
        alpha_grid: Vec<f64>,
        metric: Option<MetricKind>,
    ) -> Result<Self> {
        protocol.validate().map_err(|e| Error::InvalidPlan(e.to_string()))?;
        if protocol == Protocol::Single {
            return Err(Error::InvalidPlan(
                "a single target has no entanglement to sweep".into(),
            ));
        }
        check_grid("lambda", &lambda_grid, std::f64::consts::FRAC_PI_2)?;
        check_grid("alpha", &alpha_grid, 1.0)?;
        let metric = metric.unwrap_or_else(|| auto_metric(protocol));
        match metric {
            MetricKind::Concurrence if protocol != Protocol::Bell => {
                return Err(Error::InvalidPlan(
                    "concurrence is defined for the Bell protocol only".into(),
                ))
            }
            MetricKind::Purity => return Err(Error::InvalidPlan("purity is not a sweep metric".into())),
            _ => {}
        }
        Ok(Self {
            protocol,
            lambda_grid,
            alpha_grid,
            base_u: pauli(Axis::Z),
            metric,
        })
    }

    /// `lambda_steps` points over [0, π/2] and `alpha_steps` over [0, 1].
    pub fn uniform(
        protocol: Protocol,
        lambda_steps: usize,
        alpha_steps: usize,
        metric: Option<MetricKind>,
    ) -> Result<Self> {
        Self::new(
            protocol,
            linspace(0.0, std::f64::consts::FRAC_PI_2, lambda_steps),
            linspace(0.0, 1.0, alpha_steps),
            metric,
        )
    }

    pub fn with_base_u(mut self, u: ComplexMatrix) -> Result<Self> {
        UnitaryPair::new(u.clone(), ComplexMatrix::identity(2)).map_err(|e| Error::InvalidPlan(e.to_string()))?;
        self.base_u = u;
        Ok(self)
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn lambda_grid(&self) -> &[f64] {
        &self.lambda_grid
    }

    pub fn alpha_grid(&self) -> &[f64] {
        &self.alpha_grid
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    /// Switch spec at one grid point.
    pub fn spec_at(&self, lambda: f64, alpha: f64) -> Result<SwitchSpec> {
        let n = self.protocol.num_targets();
        let pair = UnitaryPair::new(self.base_u.clone(), ry(2.0 * lambda))?;
        SwitchSpec::new(self.protocol, vec![pair; n], vec![StateVector::eta(alpha)?; n])
    }

    pub fn num_points(&self) -> usize {
        self.lambda_grid.len() * self.alpha_grid.len()
    }
}

fn check_grid(name: &str, grid: &[f64], hi: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidPlan(format!("{name} grid is empty")));
    }
    if let Some(x) = grid.iter().find(|x| !(0.0..=hi).contains(*x)) {
        return Err(Error::InvalidPlan(format!("{name} value {x} outside [0, {hi}]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidPlan(format!("{name} grid is not strictly increasing")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub lambda: f64,
    pub alpha: f64,
    pub outcome: String,
    pub probability: f64,
    /// Absent exactly when the outcome is unreachable.
    pub metric: Option<f64>,
}

impl SweepRecord {
    pub fn reachable(&self) -> bool {
        self.metric.is_some()
    }
}

/// One record per (λ, α, outcome).
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRecord>> {
    let points: Vec<(f64, f64)> = plan
        .lambda_grid
        .iter()
        .flat_map(|&l| plan.alpha_grid.iter().map(move |&a| (l, a)))
        .collect();
    let per_point = map_ordered(points, |(lambda, alpha)| -> Result<Vec<SweepRecord>> {
        let ensemble = run(&plan.spec_at(lambda, alpha)?);
        ensemble
            .outcomes
            .into_iter()
            .map(|o| {
                let metric = o.state.as_ref().map(|s| evaluate(plan.metric, s)).transpose()?;
                Ok(SweepRecord {
                    lambda,
                    alpha,
                    outcome: o.label,
                    probability: o.probability,
                    metric,
                })
            })
            .collect()
    });
    let mut records = Vec::with_capacity(per_point.len() * 4);
    for chunk in per_point {
        records.extend(chunk?);
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        })
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Parse {
                input: other.into(),
                reason: "expected csv or json".into(),
            }),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn export(records: &[SweepRecord], format: ExportFormat, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    match format {
        ExportFormat::Csv => write_csv(records, &mut out),
        ExportFormat::Json => write_json(records, &mut out),
    }
    .map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })?;
    out.flush().map_err(io_err(path))
}

fn csv_io(e: csv::Error) -> Error {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    Error::Io {
        path: "<stream>".into(),
        source,
    }
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_io)?;
    for r in records {
        let metric = r.metric.map(g12).unwrap_or_default();
        let reachable = if r.reachable() { "true" } else { "false" };
        w.write_record([
            g12(r.lambda),
            g12(r.alpha),
            r.outcome.clone(),
            g12(r.probability),
            metric,
            reachable.into(),
        ])
        .map_err(csv_io)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<stream>".into(),
        source,
    })
}

pub fn records_to_json(records: &[SweepRecord]) -> Value {
    Value::Array(
        records
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("lambda".into(), json!(r.lambda));
                m.insert("alpha".into(), json!(r.alpha));
                m.insert("outcome".into(), json!(r.outcome));
                m.insert("probability".into(), json!(r.probability));
                if let Some(x) = r.metric {
                    m.insert("metric".into(), json!(x));
                }
                m.insert("reachable".into(), json!(r.reachable()));
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn write_json<W: Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    let text = to_json_string(records_to_json(records));
    writeln!(out, "{text}").map_err(|source| Error::Io {
        path: "<stream>".into(),
        source,
    })
}

fn parse_f64(field: &str, text: &str) -> Result<f64> {
    text.parse().map_err(|_| Error::Parse {
        input: text.into(),
        reason: format!("bad {field}"),
    })
}

/// Reads records written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_io)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            input: header.iter().collect::<Vec<_>>().join(","),
            reason: "bad header".into(),
        });
    }
    rdr.records()
        .map(|row| {
            let row = row.map_err(csv_io)?;
            let reachable = match &row[5] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(Error::Parse {
                        input: other.into(),
                        reason: "bad reachable flag".into(),
                    })
                }
            };
            let metric = if reachable {
                Some(parse_f64("metric", &row[4])?)
            } else {
                None
            };
            Ok(SweepRecord {
                lambda: parse_f64("lambda", &row[0])?,
                alpha: parse_f64("alpha", &row[1])?,
                outcome: row[2].to_string(),
                probability: parse_f64("probability", &row[3])?,
                metric,
            })
        })
        .collect()
}

/// Reads records written by [`write_json`].
pub fn read_json<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let value: Value = serde_json::from_reader(input).map_err(|e| Error::Parse {
        input: "<json>".into(),
        reason: e.to_string(),
    })?;
    let rows = value.as_array().ok_or_else(|| Error::Parse {
        input: "<json>".into(),
        reason: "expected an array".into(),
    })?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let num = |key: &str| {
                row.get(key).and_then(Value::as_f64).ok_or_else(|| Error::Field {
                    pointer: format!("/{i}/{key}"),
                    reason: "expected a number".into(),
                })
            };
            let outcome = row.get("outcome").and_then(Value::as_str).ok_or_else(|| Error::Field {
                pointer: format!("/{i}/outcome"),
                reason: "expected a string".into(),
            })?;
            Ok(SweepRecord {
                lambda: num("lambda")?,
                alpha: num("alpha")?,
                outcome: outcome.into(),
                probability: num("probability")?,
                metric: if row.get("metric").is_some() {
                    Some(num("metric")?)
                } else {
                    None
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    fn records_at(protocol: Protocol, lambda: f64, alpha: f64) -> Vec<SweepRecord> {
        run_sweep(&SweepPlan::new(protocol, vec![lambda], vec![alpha], None).unwrap()).unwrap()
    }

    #[test]
    fn bell_ridge_plus_is_maximal() {
        for alpha in [0.0, 0.3, 1.0] {
            let recs = records_at(Protocol::Bell, FRAC_PI_4, alpha);
            assert!((recs[0].metric.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_minus_plateau() {
        let recs = records_at(Protocol::Bell, FRAC_PI_8, 0.3);
        assert_eq!(recs[1].outcome, "-");
        assert!((recs[1].metric.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_edge_vanishes() {
        for r in records_at(Protocol::Ghz(3), 0.0, 0.6) {
            assert!(r.metric.is_none_or(|m| m < 1e-12));
        }
    }

    #[test]
    fn ordering_and_counts() {
        let plan = SweepPlan::uniform(Protocol::W(3), 3, 2, None).unwrap();
        let recs = run_sweep(&plan).unwrap();
        assert_eq!(recs.len(), 3 * 2 * 4);
        let keys: Vec<(f64, f64, String)> = recs.iter().map(|r| (r.lambda, r.alpha, r.outcome.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert_eq!(plan.lambda_grid().last(), Some(&FRAC_PI_2));
    }

    #[test]
    fn plan_validation() {
        assert!(SweepPlan::new(Protocol::Bell, vec![], vec![0.5], None).is_err());
        assert!(SweepPlan::new(Protocol::Bell, vec![0.2, 0.1], vec![0.5], None).is_err());
        assert!(SweepPlan::new(Protocol::Bell, vec![2.0], vec![0.5], None).is_err());
        assert!(SweepPlan::new(Protocol::Bell, vec![0.1], vec![1.5], None).is_err());
        assert!(SweepPlan::new(Protocol::Ghz(3), vec![0.1], vec![0.5], Some(MetricKind::Concurrence)).is_err());
        assert!(SweepPlan::new(Protocol::Single, vec![0.1], vec![0.5], None).is_err());
        assert!(SweepPlan::new(Protocol::W(2), vec![0.1], vec![0.5], None).is_err());
        assert_eq!(
            SweepPlan::uniform(Protocol::Ghz(4), 2, 2, None).unwrap().metric(),
            MetricKind::GmeConcurrence
        );
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "lambda,alpha,outcome,probability,metric,reachable\n"
        );
    }

    #[test]
    fn unreachable_rows_have_empty_metric() {
        let recs = records_at(Protocol::Bell, 0.0, 0.5);
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with("0,0.5,-,0,,false\n"), "{text}");
        let json = records_to_json(&recs);
        assert!(json[1].get("metric").is_none());
        assert_eq!(json[1]["reachable"], false);
    }

    #[test]
    fn csv_and_json_reload() {
        let recs = run_sweep(&SweepPlan::uniform(Protocol::Bell, 5, 4, None).unwrap()).unwrap();
        let mut csv_buf = Vec::new();
        write_csv(&recs, &mut csv_buf).unwrap();
        let mut json_buf = Vec::new();
        write_json(&recs, &mut json_buf).unwrap();
        for back in [
            read_csv(csv_buf.as_slice()).unwrap(),
            read_json(json_buf.as_slice()).unwrap(),
        ] {
            assert_eq!(back.len(), recs.len());
            for (a, b) in back.iter().zip(&recs) {
                assert_eq!(a.outcome, b.outcome);
                assert_eq!(a.reachable(), b.reachable());
                // 12 significant digits: relative error on the grid, absolute on values in [0, 1].
                assert!((a.lambda - b.lambda).abs() <= 1e-11 * b.lambda.abs());
                assert!((a.alpha - b.alpha).abs() <= 1e-11 * b.alpha.abs());
                assert!((a.probability - b.probability).abs() < 1e-12);
                if let (Some(x), Some(y)) = (a.metric, b.metric) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn export_reports_path_on_failure() {
        let err = export(&[], ExportFormat::Csv, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 1), vec![0.0]);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
