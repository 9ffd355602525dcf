use super::{summarize, ConfigSummary, HarnessError, ScenarioReport, CSV_COLUMNS};
use crate::graph::{AnalysisConfig, Precision};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Differences between two configurations, `to` minus `from`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairComparison {
    pub from: String,
    pub to: String,
    /// `exceptions` or `precision` when the pair differs on that axis only;
    /// `from` is then the configuration expected to find fewer flows.
    pub axis: Option<&'static str>,
    /// Scenarios annotatable under both configurations.
    pub common_scenarios: usize,
    /// Scenarios where `from` reports a direct flow that `to` lacks or more
    /// direct flows than `to`. Only checked along a single axis.
    pub violations: Option<usize>,
    pub delta_flow_frequency: Option<f64>,
    pub delta_median_nodes: Option<f64>,
    pub delta_median_edges: Option<f64>,
    pub delta_creation_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub configs: Vec<ConfigSummary>,
    pub pairs: Vec<PairComparison>,
}

fn parse_rows(csv_text: &str) -> Result<Vec<ScenarioReport>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_text.as_bytes());
    let header = reader.headers().map_err(|e| HarnessError::Schema(e.to_string()))?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(HarnessError::Schema(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, record) in reader.deserialize::<ScenarioReport>().enumerate() {
        let row = record.map_err(|e| HarnessError::Schema(format!("row {}: {e}", i + 1)))?;
        if seen.insert((row.scenario_id.clone(), row.config_id.clone()), ()).is_some() {
            return Err(HarnessError::Schema(format!("row {}: duplicate ({}, {})", i + 1, row.scenario_id, row.config_id)));
        }
        if row.direct_flow_found.unwrap_or(false) != (row.direct_flow_count.unwrap_or(0) > 0) {
            return Err(HarnessError::Schema(format!("row {}: direct_flow_found disagrees with direct_flow_count", i + 1)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Orders a pair so that a single-axis pair reads weaker to stronger.
fn orient(a: &str, b: &str) -> (String, String, Option<&'static str>) {
    if let (Some(ca), Some(cb)) = (AnalysisConfig::from_id(a), AnalysisConfig::from_id(b)) {
        let weaker_first = |x: &str, y: &str, axis| (x.to_string(), y.to_string(), Some(axis));
        if ca.precision == cb.precision && ca.exceptions != cb.exceptions {
            return if cb.exceptions { weaker_first(a, b, "exceptions") } else { weaker_first(b, a, "exceptions") };
        }
        if ca.exceptions == cb.exceptions && ca.precision != cb.precision {
            return if ca.precision == Precision::InstanceBased {
                weaker_first(a, b, "precision")
            } else {
                weaker_first(b, a, "precision")
            };
        }
    }
    (a.to_string(), b.to_string(), None)
}

fn delta(to: Option<f64>, from: Option<f64>) -> Option<f64> {
    Some(to? - from?)
}

/// Compares every pair of configurations found in a corpus CSV.
pub fn compare_configs(csv_text: &str) -> Result<Comparison, HarnessError> {
    let rows = parse_rows(csv_text)?;
    let summary = summarize(&rows, &[]);
    let by_id: BTreeMap<&str, &ConfigSummary> = summary.configs.iter().map(|c| (c.config_id.as_str(), c)).collect();
    let mut by_key: BTreeMap<(&str, &str), &ScenarioReport> = BTreeMap::new();
    for r in &rows {
        by_key.insert((r.config_id.as_str(), r.scenario_id.as_str()), r);
    }

    let ids: Vec<&str> = by_id.keys().copied().collect();
    let mut pairs = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            let (from, to, axis) = orient(a, b);
            let (sf, st) = (by_id[from.as_str()], by_id[to.as_str()]);
            let mut common = 0;
            let mut violations = 0;
            for r in rows.iter().filter(|r| r.config_id == from && r.annotatable()) {
                let Some(other) = by_key.get(&(to.as_str(), r.scenario_id.as_str())).filter(|o| o.annotatable()) else { continue };
                common += 1;
                let found = |x: &ScenarioReport| x.direct_flow_found == Some(true);
                if (found(r) && !found(other)) || r.direct_flow_count > other.direct_flow_count {
                    violations += 1;
                }
            }
            let median = |s: &ConfigSummary, nodes: bool| if nodes { s.nodes } else { s.edges }.map(|q| q.median);
            pairs.push(PairComparison {
                from: from.clone(),
                to: to.clone(),
                axis,
                common_scenarios: common,
                violations: axis.map(|_| violations),
                delta_flow_frequency: delta(st.flow_frequency, sf.flow_frequency),
                delta_median_nodes: delta(median(st, true), median(sf, true)),
                delta_median_edges: delta(median(st, false), median(sf, false)),
                delta_creation_rate: delta(st.creation_rate, sf.creation_rate),
            });
        }
    }
    Ok(Comparison { configs: summary.configs, pairs })
}

impl Comparison {
    /// Plain-text table, one line per configuration pair.
    pub fn to_table(&self) -> String {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:+.3}")).unwrap_or_else(|| "-".into());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:<16} {:<10} {:>6} {:>10} {:>8} {:>8} {:>8} {:>8}",
            "from", "to", "axis", "common", "violations", "d_freq", "d_nodes", "d_edges", "d_rate"
        );
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{:<16} {:<16} {:<10} {:>6} {:>10} {:>8} {:>8} {:>8} {:>8}",
                p.from,
                p.to,
                p.axis.unwrap_or("-"),
                p.common_scenarios,
                p.violations.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                cell(p.delta_flow_frequency),
                cell(p.delta_median_nodes),
                cell(p.delta_median_edges),
                cell(p.delta_creation_rate),
            );
        }
        out
    }
}
