//! Tables and SVG heatmaps built from report rows. Cell labels are the
//! report's value strings, untouched.

use std::fmt::Write as _;

use serde_json::{json, Value};

use super::report::{Metric, ReportRow};
use crate::evaluate::ReferenceMode;

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// `cells[r][c]`, verbatim value strings.
    pub cells: Vec<Vec<Option<String>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub name: String,
    pub title: String,
    pub panels: Vec<Panel>,
}

fn first_seen<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn improvement_figure(rows: &[ReportRow], mode: ReferenceMode, name: &str, title: &str) -> Option<Figure> {
    let sel: Vec<&ReportRow> = rows
        .iter()
        .filter(|r| r.fold == "mean" && r.metric.parse() == Ok(Metric::Improvement(mode)))
        .collect();
    if sel.is_empty() {
        return None;
    }
    let algs = first_seen(sel.iter().map(|r| r.algorithm.clone()));
    let mut sets = first_seen(sel.iter().map(|r| r.predictor_set.clone()));
    sets.sort();
    let cells = algs
        .iter()
        .map(|a| {
            sets.iter()
                .map(|s| {
                    sel.iter()
                        .find(|r| &r.algorithm == a && &r.predictor_set == s)
                        .map(|r| r.value.clone())
                })
                .collect()
        })
        .collect();
    Some(Figure {
        name: name.to_string(),
        title: title.to_string(),
        panels: vec![Panel {
            title: title.to_string(),
            row_labels: algs.iter().map(|a| label(a)).collect(),
            col_labels: sets.iter().map(|s| format!("predictor set {s}")).collect(),
            cells,
        }],
    })
}

fn label(key: &str) -> String {
    key.parse::<crate::learners::Algorithm>()
        .map(|a| a.label().to_string())
        .unwrap_or_else(|_| key.to_string())
}

fn frequency_panel(sel: &[&ReportRow], title: String, row_key: impl Fn(&ReportRow) -> String) -> Panel {
    let keys = first_seen(sel.iter().map(|r| row_key(r)));
    let position = |r: &ReportRow| match r.metric.parse() {
        Ok(Metric::RankFreq { position, .. }) => position,
        _ => unreachable!("filtered to rank frequencies"),
    };
    let k = sel.iter().map(|r| position(r)).max().unwrap_or(0);
    let cells = keys
        .iter()
        .map(|key| {
            (1..=k)
                .map(|p| {
                    sel.iter()
                        .find(|r| &row_key(r) == key && position(r) == p)
                        .map(|r| r.value.clone())
                })
                .collect()
        })
        .collect();
    Panel {
        title,
        row_labels: keys,
        col_labels: (1..=k).map(|p| p.to_string()).collect(),
        cells,
    }
}

fn rank_freq_rows(rows: &[ReportRow], collective: bool) -> Vec<&ReportRow> {
    rows.iter()
        .filter(|r| matches!(r.metric.parse(), Ok(Metric::RankFreq { collective: c, .. }) if c == collective))
        .collect()
}

/// Heatmap figures for every metric family present in `rows`.
pub fn build_figures(rows: &[ReportRow]) -> Vec<Figure> {
    let mut out = Vec::new();
    out.extend(improvement_figure(
        rows,
        ReferenceMode::SameSet,
        "improvement_same_set",
        "Relative improvement (%) in median squared error over linear regression with the same predictor set, mean of two folds",
    ));
    let per_set = rank_freq_rows(rows, false);
    if !per_set.is_empty() {
        let mut sets = first_seen(per_set.iter().map(|r| r.predictor_set.clone()));
        sets.sort();
        let panels = sets
            .iter()
            .map(|s| {
                let sel: Vec<&ReportRow> = per_set.iter().copied().filter(|r| &r.predictor_set == s).collect();
                frequency_panel(&sel, format!("predictor set {s}"), |r| label(&r.algorithm))
            })
            .collect();
        out.push(Figure {
            name: "rank_frequency".into(),
            title: "Percentage (%) of cases in which each algorithm was ranked at each position".into(),
            panels,
        });
    }
    out.extend(improvement_figure(
        rows,
        ReferenceMode::Set1,
        "improvement_set1",
        "Relative improvement (%) in median squared error over linear regression with predictor set 1, mean of two folds",
    ));
    let collective = rank_freq_rows(rows, true);
    if !collective.is_empty() {
        out.push(Figure {
            name: "collective_rank_frequency".into(),
            title: "Percentage (%) of cases in which each {algorithm, predictor set} was ranked at each position"
                .into(),
            panels: vec![frequency_panel(&collective, "all predictor sets".into(), |r| {
                format!("{}, predictor set {}", label(&r.algorithm), r.predictor_set)
            })],
        });
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn color(t: f64) -> String {
    // white to a blue at t = 1
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(255.0, 33.0),
        lerp(255.0, 102.0),
        lerp(255.0, 172.0)
    )
}

const CELL_W: usize = 96;
const CELL_H: usize = 26;
const LABEL_W: usize = 240;
const PANEL_GAP: usize = 30;

pub fn render_svg(fig: &Figure) -> String {
    let max_cols = fig.panels.iter().map(|p| p.col_labels.len()).max().unwrap_or(0);
    let width = LABEL_W + CELL_W * max_cols + 20;
    let panel_h = |p: &Panel| 50 + CELL_H * p.row_labels.len() + PANEL_GAP;
    let height = 40 + fig.panels.iter().map(panel_h).sum::<usize>();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="10" y="22" font-size="13" font-weight="bold">{}</text>"#,
        escape(&fig.title)
    );
    let mut y0 = 40;
    for p in &fig.panels {
        let _ = writeln!(
            s,
            r#"<text x="10" y="{}" font-weight="bold">{}</text>"#,
            y0 + 16,
            escape(&p.title)
        );
        for (c, col) in p.col_labels.iter().enumerate() {
            let x = LABEL_W + c * CELL_W + CELL_W / 2;
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
                y0 + 40,
                escape(col)
            );
        }
        let nums: Vec<f64> = p
            .cells
            .iter()
            .flatten()
            .flatten()
            .filter_map(|v| v.parse().ok())
            .collect();
        let lo = nums.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = nums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (r, row) in p.cells.iter().enumerate() {
            let y = y0 + 50 + r * CELL_H;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                LABEL_W - 8,
                y + CELL_H / 2 + 4,
                escape(&p.row_labels[r])
            );
            for (c, cell) in row.iter().enumerate() {
                let x = LABEL_W + c * CELL_W;
                let fill = match cell.as_deref().and_then(|v| v.parse::<f64>().ok()) {
                    Some(v) if hi > lo => color((v - lo) / (hi - lo)),
                    Some(_) => color(0.5),
                    None => "#dddddd".to_string(),
                };
                let _ = writeln!(
                    s,
                    r##"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{fill}" stroke="#ffffff"/>"##
                );
                let text = cell.as_deref().unwrap_or("NA");
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">{}</text>"#,
                    x + CELL_W / 2,
                    y + CELL_H / 2 + 4,
                    escape(text)
                );
            }
        }
        y0 += panel_h(p);
    }
    s.push_str("</svg>\n");
    s
}

/// Horizontal bars, longest first as given.
pub fn render_bars(title: &str, items: &[(String, f64)]) -> String {
    let bar_max = 400.0;
    let hi = items.iter().map(|i| i.1).fold(0.0, f64::max);
    let height = 50 + items.len() * 22;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{height}" font-family="sans-serif" font-size="12">"#,
        LABEL_W + 520
    );
    let _ = writeln!(
        s,
        r#"<text x="10" y="22" font-size="13" font-weight="bold">{}</text>"#,
        escape(title)
    );
    for (i, (name, v)) in items.iter().enumerate() {
        let y = 40 + i * 22;
        let w = if hi > 0.0 { bar_max * v / hi } else { 0.0 };
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LABEL_W - 8,
            y + 14,
            escape(name)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{LABEL_W}" y="{y}" width="{w:.3}" height="18" fill="#2166ac"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{}">{v}</text>"#,
            LABEL_W as f64 + w + 6.0,
            y + 14
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_markdown(figs: &[Figure]) -> String {
    let mut s = String::new();
    for fig in figs {
        let _ = writeln!(s, "## {}\n\n{}\n", fig.name, fig.title);
        for p in &fig.panels {
            let _ = writeln!(s, "### {}\n", p.title);
            let _ = writeln!(s, "| | {} |", p.col_labels.join(" | "));
            let _ = writeln!(s, "|---|{}", "---|".repeat(p.col_labels.len()));
            for (label, row) in p.row_labels.iter().zip(&p.cells) {
                let vals: Vec<&str> = row.iter().map(|c| c.as_deref().unwrap_or("NA")).collect();
                let _ = writeln!(s, "| {label} | {} |", vals.join(" | "));
            }
            s.push('\n');
        }
    }
    s
}

/// Wide CSV: one line per panel row.
pub fn render_wide_csv(fig: &Figure) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let cols = fig.panels.iter().map(|p| p.col_labels.len()).max().unwrap_or(0);
    let mut header = vec!["panel".to_string(), "row".to_string()];
    if let Some(p) = fig.panels.iter().max_by_key(|p| p.col_labels.len()) {
        header.extend(p.col_labels.iter().cloned());
    }
    w.write_record(&header).expect("in-memory write");
    for p in &fig.panels {
        for (label, row) in p.row_labels.iter().zip(&p.cells) {
            let mut rec = vec![p.title.clone(), label.clone()];
            rec.extend((0..cols).map(|c| row.get(c).cloned().flatten().unwrap_or_else(|| "NA".into())));
            w.write_record(&rec).expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

pub fn figures_json(figs: &[Figure]) -> String {
    let doc: Vec<Value> = figs
        .iter()
        .map(|f| {
            json!({
                "name": f.name,
                "title": f.title,
                "panels": f.panels.iter().map(|p| json!({
                    "title": p.title,
                    "rows": p.row_labels,
                    "columns": p.col_labels,
                    "cells": p.cells,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}
