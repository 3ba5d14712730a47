//! Long-format report: one `(algorithm, predictor_set, fold, metric, value)`
//! row per number.
//!
//! `fold` is a test-fold number, `mean` (averaged over folds) or `pooled`
//! (counted over both folds). Metrics:
//!
//! | metric | folds |
//! |---|---|
//! | `n_test`, `med_se` | per fold |
//! | `raw_relative_{same_set,set1}`, `improvement_{same_set,set1}` | per fold, `mean` |
//! | `mean_rank`, `collective_mean_rank` | per fold, `mean` |
//! | `rank_freq_<p>`, `collective_rank_freq_<p>` | `pooled` |

use std::str::FromStr;

use serde_json::{json, Value};

use super::{CliError, RunConfig};
use crate::evaluate::{EvaluationReport, ReferenceMode};
use crate::ingest::PredictorSet;
use crate::learners::Algorithm;

pub const REPORT_HEADER: [&str; 5] = ["algorithm", "predictor_set", "fold", "metric", "value"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub algorithm: String,
    pub predictor_set: String,
    pub fold: String,
    pub metric: String,
    /// Kept verbatim so rendering never reformats numbers.
    pub value: String,
}

impl ReportRow {
    fn new(a: Algorithm, s: PredictorSet, fold: impl ToString, metric: impl ToString, value: f64) -> Self {
        Self {
            algorithm: a.key().to_string(),
            predictor_set: s.number().to_string(),
            fold: fold.to_string(),
            metric: metric.to_string(),
            value: value.to_string(),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm.parse().expect("validated on parse")
    }

    pub fn predictor_set(&self) -> PredictorSet {
        self.predictor_set.parse().expect("validated on parse")
    }
}

/// Structured view of a metric name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    NTest,
    MedSe,
    RawRelative(ReferenceMode),
    Improvement(ReferenceMode),
    MeanRank { collective: bool },
    RankFreq { collective: bool, position: usize },
}

impl FromStr for Metric {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let mode = |m: &str| match m {
            "same_set" => Ok(ReferenceMode::SameSet),
            "set1" => Ok(ReferenceMode::Set1),
            _ => Err(()),
        };
        let position = |p: &str| p.parse::<usize>().ok().filter(|&p| p >= 1).ok_or(());
        if let Some(m) = s.strip_prefix("raw_relative_") {
            return Ok(Metric::RawRelative(mode(m)?));
        }
        if let Some(m) = s.strip_prefix("improvement_") {
            return Ok(Metric::Improvement(mode(m)?));
        }
        if let Some(p) = s.strip_prefix("collective_rank_freq_") {
            return Ok(Metric::RankFreq {
                collective: true,
                position: position(p)?,
            });
        }
        if let Some(p) = s.strip_prefix("rank_freq_") {
            return Ok(Metric::RankFreq {
                collective: false,
                position: position(p)?,
            });
        }
        match s {
            "n_test" => Ok(Metric::NTest),
            "med_se" => Ok(Metric::MedSe),
            "mean_rank" => Ok(Metric::MeanRank { collective: false }),
            "collective_mean_rank" => Ok(Metric::MeanRank { collective: true }),
            _ => Err(()),
        }
    }
}

pub fn report_rows(report: &EvaluationReport) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for (cell, pred) in report.cells.iter().zip(&report.predictions) {
        let (a, s, f) = (cell.algorithm, cell.predictor_set, cell.test_fold);
        rows.push(ReportRow::new(a, s, f, "n_test", pred.predictions.len() as f64));
        rows.push(ReportRow::new(a, s, f, "med_se", cell.med_se));
    }
    for (mode, r) in &report.relative {
        let m = mode.key();
        rows.push(ReportRow::new(
            r.algorithm,
            r.predictor_set,
            r.test_fold,
            format!("raw_relative_{m}"),
            r.raw_relative,
        ));
        rows.push(ReportRow::new(
            r.algorithm,
            r.predictor_set,
            r.test_fold,
            format!("improvement_{m}"),
            r.improvement,
        ));
    }
    for &(mode, a, s, raw) in &report.mean_relative {
        let m = mode.key();
        rows.push(ReportRow::new(a, s, "mean", format!("raw_relative_{m}"), raw));
        rows.push(ReportRow::new(a, s, "mean", format!("improvement_{m}"), 0.0 - raw));
    }
    for summary in &report.rankings {
        let prefix = if summary.predictor_set.is_none() {
            "collective_"
        } else {
            ""
        };
        let t = &summary.table;
        for (c, &(a, s)) in summary.contenders.iter().enumerate() {
            for (f, fold_ranks) in t.fold_mean_rank.iter().enumerate() {
                rows.push(ReportRow::new(a, s, f + 1, format!("{prefix}mean_rank"), fold_ranks[c]));
            }
            rows.push(ReportRow::new(
                a,
                s,
                "mean",
                format!("{prefix}mean_rank"),
                t.mean_rank[c],
            ));
            for (p, &freq) in t.frequency[c].iter().enumerate() {
                rows.push(ReportRow::new(
                    a,
                    s,
                    "pooled",
                    format!("{prefix}rank_freq_{}", p + 1),
                    freq,
                ));
            }
        }
    }
    rows
}

pub fn write_report_csv(rows: &[ReportRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([&r.algorithm, &r.predictor_set, &r.fold, &r.metric, &r.value])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Parse and validate a long-format report. Errors name the line and field.
pub fn parse_report_csv(data: &[u8]) -> Result<Vec<ReportRow>, CliError> {
    let schema = |line: u64, field: &str, msg: String| CliError::Schema(format!("line {line}, field `{field}`: {msg}"));
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(data);
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| CliError::Schema("empty report: missing header".into()))?
        .map_err(|e| CliError::Schema(format!("header: {e}")))?;
    if header.len() != REPORT_HEADER.len() {
        return Err(CliError::Schema(format!(
            "header has {} fields, expected {}",
            header.len(),
            REPORT_HEADER.len()
        )));
    }
    for (i, (got, want)) in header.iter().zip(REPORT_HEADER).enumerate() {
        if got != want {
            return Err(CliError::Schema(format!(
                "header field {}: expected `{want}`, found `{got}`",
                i + 1
            )));
        }
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| CliError::Schema(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != REPORT_HEADER.len() {
            return Err(CliError::Schema(format!(
                "line {line}: {} fields, expected 5",
                rec.len()
            )));
        }
        let row = ReportRow {
            algorithm: rec[0].to_string(),
            predictor_set: rec[1].to_string(),
            fold: rec[2].to_string(),
            metric: rec[3].to_string(),
            value: rec[4].to_string(),
        };
        Algorithm::from_str(&row.algorithm).map_err(|e| schema(line, "algorithm", e))?;
        PredictorSet::from_str(&row.predictor_set).map_err(|e| schema(line, "predictor_set", e))?;
        let metric = Metric::from_str(&row.metric)
            .map_err(|_| schema(line, "metric", format!("unknown metric {:?}", row.metric)))?;
        let fold_ok = match (metric, row.fold.as_str()) {
            (Metric::RankFreq { .. }, f) => f == "pooled",
            (Metric::NTest | Metric::MedSe, f) => f.parse::<usize>().is_ok_and(|f| f >= 1),
            (_, "mean") => true,
            (_, f) => f.parse::<usize>().is_ok_and(|f| f >= 1),
        };
        if !fold_ok {
            return Err(schema(
                line,
                "fold",
                format!("{:?} not valid for metric {}", row.fold, row.metric),
            ));
        }
        match row.value.parse::<f64>() {
            Ok(v) if v.is_finite() => {}
            _ => return Err(schema(line, "value", format!("{:?} is not a finite number", row.value))),
        }
        rows.push(row);
    }
    Ok(rows)
}

/// JSON summary of a run.
pub fn report_json(report: &EvaluationReport, config: &RunConfig) -> String {
    let cells: Vec<Value> = report
        .cells
        .iter()
        .zip(&report.predictions)
        .map(|(c, p)| {
            json!({
                "algorithm": c.algorithm.key(),
                "predictor_set": c.predictor_set.number(),
                "fold": c.test_fold,
                "n_test": p.predictions.len(),
                "med_se": c.med_se,
            })
        })
        .collect();
    let improvements: Vec<Value> = report
        .mean_relative
        .iter()
        .map(|&(mode, a, s, raw)| {
            json!({
                "reference": mode.key(),
                "algorithm": a.key(),
                "predictor_set": s.number(),
                "raw_relative": raw,
                "improvement": 0.0 - raw,
            })
        })
        .collect();
    let rankings: Vec<Value> = report
        .rankings
        .iter()
        .map(|r| {
            let contenders: Vec<Value> = r
                .contenders
                .iter()
                .enumerate()
                .map(|(c, &(a, s))| {
                    json!({
                        "algorithm": a.key(),
                        "predictor_set": s.number(),
                        "mean_rank": r.table.mean_rank[c],
                        "frequency": r.table.frequency[c],
                    })
                })
                .collect();
            json!({
                "predictor_set": r.predictor_set.map(|s| s.number()),
                "contenders": contenders,
            })
        })
        .collect();
    let doc = json!({
        "n_samples": report.n_samples,
        "n_stations": report.n_stations,
        "fold_sizes": report.fold_sizes(),
        "seed": config.seed,
        "split_unit": config.cv.split_unit,
        "cells": cells,
        "mean_relative": improvements,
        "rankings": rankings,
        "config": serde_json::to_value(config).expect("config is serializable"),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "algorithm,predictor_set,fold,metric,value\nxgboost,1,mean,improvement_same_set,12.5\n";

    #[test]
    fn parses_valid_rows() {
        let rows = parse_report_csv(GOOD.as_bytes()).unwrap();
        assert_eq!(rows[0].value, "12.5");
        assert_eq!(rows[0].algorithm(), Algorithm::Xgboost);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            ("algorithm,predictor_set,fold,metrik,value\n", "header field 4"),
            (
                "algorithm,predictor_set,fold,metric,value\nlasso,1,1,med_se,1\n",
                "field `algorithm`",
            ),
            (
                "algorithm,predictor_set,fold,metric,value\ngbm,7,1,med_se,1\n",
                "field `predictor_set`",
            ),
            (
                "algorithm,predictor_set,fold,metric,value\ngbm,1,1,mse,1\n",
                "field `metric`",
            ),
            (
                "algorithm,predictor_set,fold,metric,value\ngbm,1,mean,rank_freq_1,1\n",
                "field `fold`",
            ),
            (
                "algorithm,predictor_set,fold,metric,value\ngbm,1,1,med_se,abc\n",
                "field `value`",
            ),
        ];
        for (text, needle) in cases {
            let err = parse_report_csv(text.as_bytes()).unwrap_err().to_string();
            assert!(err.contains(needle), "{err} lacks {needle}");
        }
    }
}
