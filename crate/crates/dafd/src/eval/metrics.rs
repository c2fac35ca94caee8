//! Confusion counts and the SEN/SPE/PRE/F1 metric set, Fall as the positive
//! class. F1 is the harmonic mean of sensitivity and precision.

use crate::error::{DafdError, Result};
use crate::ingest::Class;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// One metric value plus a flag marking a zero denominator (the value is then
/// reported as 0 rather than failing the run).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metric {
    pub value: f64,
    pub degenerate: bool,
}

impl Metric {
    fn ratio(num: u64, den: u64) -> Metric {
        if den == 0 {
            Metric {
                value: 0.0,
                degenerate: true,
            }
        } else {
            Metric {
                value: num as f64 / den as f64,
                degenerate: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricSet {
    pub sen: Metric,
    pub spe: Metric,
    pub pre: Metric,
    pub f1: Metric,
}

impl MetricSet {
    pub fn get(&self, name: MetricName) -> Metric {
        match name {
            MetricName::Sen => self.sen,
            MetricName::Spe => self.spe,
            MetricName::Pre => self.pre,
            MetricName::F1 => self.f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricName {
    Sen,
    Spe,
    Pre,
    F1,
}

impl MetricName {
    pub const ALL: [MetricName; 4] = [
        MetricName::Sen,
        MetricName::Spe,
        MetricName::Pre,
        MetricName::F1,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MetricName::Sen => "SEN",
            MetricName::Spe => "SPE",
            MetricName::Pre => "PRE",
            MetricName::F1 => "F1",
        }
    }
}

/// Tallies predictions against labels.
pub fn confusion(predictions: &[Class], labels: &[Class]) -> Result<ConfusionCounts> {
    if predictions.len() != labels.len() {
        return Err(DafdError::InvalidArgument(format!(
            "{} predictions vs {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let mut c = ConfusionCounts::default();
    for (p, l) in predictions.iter().zip(labels) {
        match (p, l) {
            (Class::Fall, Class::Fall) => c.true_pos += 1,
            (Class::Adl, Class::Adl) => c.true_neg += 1,
            (Class::Fall, Class::Adl) => c.false_pos += 1,
            (Class::Adl, Class::Fall) => c.false_neg += 1,
        }
    }
    Ok(c)
}

/// SEN = TP/(TP+FN), SPE = TN/(TN+FP), PRE = TP/(TP+FP),
/// F1 = 2*SEN*PRE/(SEN+PRE). Zero denominators yield 0 with the flag set.
pub fn metrics(c: &ConfusionCounts) -> MetricSet {
    let sen = Metric::ratio(c.true_pos, c.true_pos + c.false_neg);
    let spe = Metric::ratio(c.true_neg, c.true_neg + c.false_pos);
    let pre = Metric::ratio(c.true_pos, c.true_pos + c.false_pos);
    let denom = sen.value + pre.value;
    let f1 = if denom > 0.0 {
        Metric {
            value: 2.0 * sen.value * pre.value / denom,
            degenerate: false,
        }
    } else {
        Metric {
            value: 0.0,
            degenerate: true,
        }
    };
    MetricSet { sen, spe, pre, f1 }
}
