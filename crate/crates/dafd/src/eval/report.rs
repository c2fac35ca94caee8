//! Report tables: SEN/SPE/PRE/F1 x training mode, one column per scenario
//! group, percentages with significance markers against Source-only
//! (`*` for DAFD_adl, `†` for DAFD).

use std::collections::BTreeMap;

use super::metrics::MetricName;
use super::pairs::Scenario;
use super::runner::PairResult;
use super::stats::ttest;
use crate::dann::TrainMode;
use crate::error::Result;

/// The finished report in both output forms.
#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub csv: String,
}

fn column_key(r: &PairResult) -> String {
    match r.pair.scenario {
        Scenario::CrossPosition => format!("cross-position {}", r.pair.source.dataset),
        Scenario::CrossConfig => format!(
            "cross-config {}->{}",
            r.pair.source.dataset, r.pair.target.dataset
        ),
    }
}

struct Column<'a> {
    results: Vec<&'a PairResult>,
}

impl<'a> Column<'a> {
    fn of_mode(&self, mode: TrainMode) -> Vec<&'a PairResult> {
        self.results.iter().copied().filter(|r| r.mode == mode).collect()
    }

    /// Unweighted mean over pair means, as a percentage.
    fn cell_value(&self, mode: TrainMode, metric: MetricName) -> Option<f64> {
        let rs = self.of_mode(mode);
        if rs.is_empty() {
            return None;
        }
        let sum: f64 = rs.iter().map(|r| r.mean.get(metric).value).sum();
        Some(100.0 * sum / rs.len() as f64)
    }

    /// Per-fold scores pooled across the column's pairs.
    fn fold_scores(&self, mode: TrainMode, metric: MetricName) -> Vec<f64> {
        self.of_mode(mode)
            .iter()
            .flat_map(|r| r.folds.iter().map(move |f| f.metrics.get(metric).value))
            .collect()
    }

    fn marker(&self, mode: TrainMode, metric: MetricName) -> Result<&'static str> {
        let symbol = match mode {
            TrainMode::DafdAdl => "*",
            TrainMode::Dafd => "\u{2020}",
            _ => return Ok(""),
        };
        let baseline = self.fold_scores(TrainMode::SourceOnly, metric);
        let scores = self.fold_scores(mode, metric);
        if baseline.len() < 2 || scores.len() < 2 {
            return Ok("");
        }
        Ok(if ttest(&scores, &baseline)?.significant {
            symbol
        } else {
            ""
        })
    }

    fn cell(&self, mode: TrainMode, metric: MetricName) -> Result<String> {
        match self.cell_value(mode, metric) {
            Some(v) => Ok(format!("{v:.2}{}", self.marker(mode, metric)?)),
            None => Ok(String::new()),
        }
    }
}

/// Builds the aligned-text and CSV report over the given results.
pub fn build_report(results: &[PairResult]) -> Result<Report> {
    let mut columns: BTreeMap<String, Column> = BTreeMap::new();
    for r in results {
        columns
            .entry(column_key(r))
            .or_insert_with(|| Column { results: Vec::new() })
            .results
            .push(r);
    }
    let column_names: Vec<&String> = columns.keys().collect();

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["metric".to_string(), "mode".to_string()];
    header.extend(column_names.iter().map(|s| s.to_string()));
    rows.push(header);
    for metric in MetricName::ALL {
        for mode in TrainMode::ALL {
            let mut row = vec![metric.label().to_string(), mode.display().to_string()];
            for name in &column_names {
                row.push(columns[*name].cell(mode, metric)?);
            }
            rows.push(row);
        }
    }

    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut text = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<width$}", width = w))
            .collect();
        text.push_str(line.join("  ").trim_end());
        text.push('\n');
        if i == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            text.push_str(&"-".repeat(total));
            text.push('\n');
        }
    }
    text.push_str("* p < 0.05 vs Source-only (DAFD_adl)   \u{2020} p < 0.05 vs Source-only (DAFD)\n");

    let mut csv = String::new();
    for row in &rows {
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    Ok(Report { text, csv })
}
