//! Residual reports: named per-record residual arrays with summary statistics.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Gauge under which a report was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeDescriptor {
    Canonical,
    Random { seed: u64 },
    /// Explicit caller-supplied angles.
    Fixed,
}

/// One named residual column, one value per record (hyper-site, site, or sample).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualSeries {
    pub name: String,
    pub values: Vec<f64>,
}

impl ResidualSeries {
    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            pairwise_sum(&self.values) / self.values.len() as f64
        }
    }

    pub fn rms(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let squares: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        (pairwise_sum(&squares) / self.values.len() as f64).sqrt()
    }

    pub fn summary(&self) -> Summary {
        Summary { max: self.max(), mean: self.mean(), rms: self.rms() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max: f64,
    pub mean: f64,
    pub rms: f64,
}

/// Structural problems found by the partition validator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    OrphanSite,
    DoubleAssignment,
    LabelArity,
    BondLength,
    Geometry,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

/// Named residual arrays plus the gauge they were evaluated in.
///
/// Summaries are always recomputed from the stored arrays, so the two can
/// never drift apart.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    /// What one record indexes: "hyper_site", "site", or "sample".
    pub index_label: String,
    pub gauge: GaugeDescriptor,
    pub entries: Vec<ResidualSeries>,
    pub violations: Vec<Violation>,
}

impl ResidualReport {
    pub fn new(index_label: &str, gauge: GaugeDescriptor) -> Self {
        ResidualReport {
            index_label: index_label.to_string(),
            gauge,
            entries: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, values: Vec<f64>) {
        self.entries.push(ResidualSeries { name: name.to_string(), values });
    }

    pub fn entry(&self, name: &str) -> Option<&ResidualSeries> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn max_residual(&self, name: &str) -> f64 {
        self.entry(name).map(|e| e.max()).unwrap_or(f64::NAN)
    }

    /// Largest residual over every column in the report.
    pub fn max_over_all(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, e| m.max(e.max()))
    }

    pub fn summaries(&self) -> BTreeMap<String, Summary> {
        self.entries.iter().map(|e| (e.name.clone(), e.summary())).collect()
    }

    pub fn violation_count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn record_count(&self) -> usize {
        self.entries.first().map(|e| e.values.len()).unwrap_or(0)
    }
}

/// Pairwise summation; order-insensitive to about 1e-13 relative even for
/// long arrays, which keeps summaries stable across thread counts.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summaries_recomputable() {
        let mut report = ResidualReport::new("sample", GaugeDescriptor::Canonical);
        report.push("a", vec![1.0, -2.0, 3.0]);
        let s = report.summaries()["a"];
        assert_eq!(s.max, 3.0);
        assert!((s.mean - (2.0 / 3.0)).abs() < 1e-15);
        assert!((s.rms - (14.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs = [0.1, 0.2, 0.3, 0.4, 0.5];
        assert!((pairwise_sum(&xs) - 1.5).abs() < 1e-15);
    }
}
