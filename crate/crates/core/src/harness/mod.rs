//! End-to-end pipeline over merge scenarios: merge, same-method detection,
//! graph construction and flow analysis, reported as one CSV row per
//! scenario and configuration plus a JSON detail document.

mod compare;
mod corpus;

pub use compare::{compare_configs, Comparison, PairComparison};
pub use corpus::{read_scenario_dirs, run_corpus, summarize, write_csv, ConfigSummary, CorpusRun, CorpusSummary, Quartiles};

use crate::graph::{build_sdg_until, AnalysisConfig, GraphError, LimitKind, Precision, Sdg};
use crate::ifc::{analyze_edit, MethodResult, MethodStatus};
use crate::lang::{lexer::line_tokens, FrontendError};
use crate::merge::{merge_members, DroppedMethod, MergeConflict, MergeError, MergeOutcome, MergeScenario, MethodEdit};
use log::{debug, info};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};
use thiserror::Error;

pub const CSV_COLUMNS: [&str; 15] = [
    "scenario_id",
    "config_id",
    "merged_ok",
    "conflict_count",
    "same_method_count",
    "sdg_created",
    "failure_reason",
    "nodes",
    "edges",
    "direct_flow_found",
    "direct_flow_count",
    "indirect_found",
    "indirect_count",
    "elapsed_ms",
    "flags",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailureReason {
    None,
    TooHeavyNodes,
    TooHeavyEdges,
    NoSourceOrSink,
    ParseError,
    ResolveError,
    Timeout,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::None => "NONE",
            FailureReason::TooHeavyNodes => "TOO_HEAVY_NODES",
            FailureReason::TooHeavyEdges => "TOO_HEAVY_EDGES",
            FailureReason::NoSourceOrSink => "NO_SOURCE_OR_SINK",
            FailureReason::ParseError => "PARSE_ERROR",
            FailureReason::ResolveError => "RESOLVE_ERROR",
            FailureReason::Timeout => "TIMEOUT",
        })
    }
}

pub const FLAG_FORMATTING_SUSPECT: &str = "FORMATTING_SUSPECT";
pub const FLAG_REMOVED_LINES_IGNORED: &str = "REMOVED_LINES_IGNORED";

/// One CSV row. Graph and flow fields are `None` (empty cells) when the
/// graph was not built or no method could be annotated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario_id: String,
    pub config_id: String,
    pub merged_ok: bool,
    pub conflict_count: usize,
    pub same_method_count: usize,
    pub sdg_created: bool,
    pub failure_reason: FailureReason,
    pub nodes: Option<usize>,
    pub edges: Option<usize>,
    pub direct_flow_found: Option<bool>,
    pub direct_flow_count: Option<usize>,
    pub indirect_found: Option<bool>,
    pub indirect_count: Option<usize>,
    pub elapsed_ms: u64,
    /// `|`-separated.
    pub flags: String,
}

impl ScenarioReport {
    fn empty(scenario_id: &str, config_id: String) -> Self {
        Self {
            scenario_id: scenario_id.to_string(),
            config_id,
            merged_ok: false,
            conflict_count: 0,
            same_method_count: 0,
            sdg_created: false,
            failure_reason: FailureReason::None,
            nodes: None,
            edges: None,
            direct_flow_found: None,
            direct_flow_count: None,
            indirect_found: None,
            indirect_count: None,
            elapsed_ms: 0,
            flags: String::new(),
        }
    }

    /// Scenarios counted in flow frequencies.
    pub fn annotatable(&self) -> bool {
        self.sdg_created && self.failure_reason == FailureReason::None
    }

    pub fn flags(&self) -> impl Iterator<Item = &str> {
        self.flags.split('|').filter(|f| !f.is_empty())
    }
}

/// Everything behind one report row.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioDetail {
    pub report: ScenarioReport,
    pub error: Option<String>,
    pub conflicts: Vec<MergeConflict>,
    pub method_edits: Vec<MethodEdit>,
    pub dropped: Vec<DroppedMethod>,
    pub deletion_only: Vec<String>,
    pub formatting_suspect_lines: Vec<u32>,
    pub methods: Vec<MethodResult>,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub detail: ScenarioDetail,
    pub merged_text: Option<String>,
    pub sdg: Option<Sdg>,
}

impl ScenarioRun {
    pub fn report(&self) -> &ScenarioReport {
        &self.detail.report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Wall-clock budget for graph construction of one scenario and config.
    pub time_limit: Option<Duration>,
    /// Record real elapsed times instead of 0.
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { time_limit: Some(Duration::from_secs(60)), timings: false }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("SCHEMA_ERROR: {0}")]
    Schema(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }
}

/// Named configuration sets for corpus runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matrix {
    Default,
    Full,
}

impl Matrix {
    pub fn configs(self) -> Vec<AnalysisConfig> {
        match self {
            Matrix::Default => vec![AnalysisConfig::default()],
            Matrix::Full => [Precision::TypeBased, Precision::InstanceBased]
                .into_iter()
                .flat_map(|p| [false, true].map(|e| AnalysisConfig::new(e, p)))
                .collect(),
        }
    }
}

/// The three texts of a scenario.
#[derive(Debug, Clone)]
pub struct ScenarioSources {
    pub base: String,
    pub left: String,
    pub right: String,
}

impl ScenarioSources {
    /// Reads `base.mj`, `left.mj` and `right.mj`.
    pub fn read(dir: &Path) -> Result<Self, HarnessError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))
        };
        Ok(Self { base: read("base.mj")?, left: read("left.mj")?, right: read("right.mj")? })
    }
}

/// Merge result shared by every configuration of one scenario.
pub(crate) struct Prepared {
    scenario: Option<MergeScenario>,
    merge: Result<MergeOutcome, MergeError>,
    merge_time: Duration,
}

pub(crate) fn prepare(sources: &ScenarioSources) -> Prepared {
    let start = Instant::now();
    let parsed = MergeScenario::from_sources(&sources.base, &sources.left, &sources.right);
    let (scenario, merge) = match parsed {
        Ok(s) => {
            let m = merge_members(&s);
            (Some(s), m)
        }
        Err(e) => (None, Err(e)),
    };
    Prepared { scenario, merge, merge_time: start.elapsed() }
}

fn frontend_reason(error: &MergeError) -> FailureReason {
    match error {
        MergeError::Frontend { error: FrontendError::Resolve(_), .. } => FailureReason::ResolveError,
        MergeError::Frontend { error: FrontendError::Parse(_), .. } | MergeError::Layout { .. } => FailureReason::ParseError,
    }
}

/// Attributed lines of the edit methods whose tokens equal a line of the
/// same base method while the text differs.
fn formatting_suspects(scenario: &MergeScenario, outcome: &MergeOutcome) -> Vec<u32> {
    let merged: Vec<&str> = outcome.merged_text.lines().collect();
    let base: Vec<&str> = scenario.base.text.lines().collect();
    let mut out = BTreeSet::new();
    for edit in &outcome.method_edits {
        let Some((class, name)) = edit.method.split_once('.') else { continue };
        let Some(decl) = scenario.base.program.methods().find(|m| m.owner == class && m.name == name) else { continue };
        let base_lines: Vec<(&str, Vec<String>)> = (decl.span.first..=decl.span.last)
            .filter_map(|l| base.get(l as usize - 1))
            .filter_map(|t| line_tokens(t).filter(|toks| !toks.is_empty()).map(|toks| (t.trim(), toks)))
            .collect();
        for &line in edit.left_lines.iter().chain(&edit.right_lines) {
            let Some(text) = merged.get(line as usize - 1) else { continue };
            let Some(tokens) = line_tokens(text) else { continue };
            if base_lines.iter().any(|(raw, toks)| *toks == tokens && *raw != text.trim()) {
                out.insert(line);
            }
        }
    }
    out.into_iter().collect()
}

pub(crate) fn analyze_prepared(id: &str, prepared: &Prepared, config: &AnalysisConfig, options: &RunOptions) -> ScenarioRun {
    let start = Instant::now();
    let mut report = ScenarioReport::empty(id, config.id());
    let detail = |report: ScenarioReport| ScenarioDetail {
        report,
        error: None,
        conflicts: Vec::new(),
        method_edits: Vec::new(),
        dropped: Vec::new(),
        deletion_only: Vec::new(),
        formatting_suspect_lines: Vec::new(),
        methods: Vec::new(),
    };
    let finish = |mut d: ScenarioDetail, merged_text: Option<String>, sdg: Option<Sdg>| {
        if options.timings {
            d.report.elapsed_ms = (prepared.merge_time + start.elapsed()).as_millis() as u64;
        }
        ScenarioRun { detail: d, merged_text, sdg }
    };

    let outcome = match &prepared.merge {
        Ok(o) => o,
        Err(e) => {
            report.failure_reason = frontend_reason(e);
            let mut d = detail(report);
            d.error = Some(e.to_string());
            return finish(d, None, None);
        }
    };
    report.merged_ok = true;
    report.conflict_count = outcome.conflicts.len();
    report.same_method_count = outcome.method_edits.len();
    let mut flags = Vec::new();
    let suspects = prepared.scenario.as_ref().map(|s| formatting_suspects(s, outcome)).unwrap_or_default();
    if !suspects.is_empty() {
        flags.push(FLAG_FORMATTING_SUSPECT);
    }
    if !outcome.deletion_only.is_empty() {
        flags.push(FLAG_REMOVED_LINES_IGNORED);
    }
    report.flags = flags.join("|");
    let mut d = detail(report);
    d.conflicts = outcome.conflicts.clone();
    d.method_edits = outcome.method_edits.clone();
    d.dropped = outcome.dropped.clone();
    d.deletion_only = outcome.deletion_only.clone();
    d.formatting_suspect_lines = suspects;
    let merged_text = Some(outcome.merged_text.clone());

    let program = match (&outcome.merged, outcome.conflicts.is_empty()) {
        (Some(p), true) => p,
        _ => {
            debug!("{id}: {} conflict(s), not analyzed", outcome.conflicts.len());
            return finish(d, merged_text, None);
        }
    };
    if outcome.method_edits.is_empty() {
        if !outcome.dropped.is_empty() {
            d.report.failure_reason = FailureReason::NoSourceOrSink;
        }
        return finish(d, merged_text, None);
    }

    let entries: BTreeSet<_> = outcome.method_edits.iter().filter_map(|e| program.method_named(&e.method)).collect();
    let deadline = options.time_limit.map(|t| start + t);
    let sdg = match build_sdg_until(program, &entries, config, deadline) {
        Ok(sdg) => sdg,
        Err(e) => {
            d.report.failure_reason = match e {
                GraphError::TooHeavy { kind: LimitKind::Nodes, .. } => FailureReason::TooHeavyNodes,
                GraphError::TooHeavy { kind: LimitKind::Edges, .. } => FailureReason::TooHeavyEdges,
                GraphError::Timeout => FailureReason::Timeout,
                GraphError::NoEntryPoints => FailureReason::NoSourceOrSink,
            };
            d.error = Some(e.to_string());
            info!("{id} [{}]: {e}", config.id());
            return finish(d, merged_text, None);
        }
    };
    d.report.sdg_created = true;
    d.report.nodes = Some(sdg.node_count());
    d.report.edges = Some(sdg.edge_count());

    d.methods = outcome.method_edits.iter().map(|e| analyze_edit(&sdg, e, &outcome.attribution)).collect();
    let annotated: Vec<&MethodResult> = d.methods.iter().filter(|m| m.status != MethodStatus::NoSourceOrSink).collect();
    if annotated.is_empty() {
        d.report.failure_reason = FailureReason::NoSourceOrSink;
    } else {
        let direct: usize = annotated.iter().map(|m| m.left_to_right + m.right_to_left).sum();
        let indirect: usize = annotated.iter().map(|m| m.indirect).sum();
        d.report.direct_flow_found = Some(direct > 0);
        d.report.direct_flow_count = Some(direct);
        d.report.indirect_found = Some(indirect > 0);
        d.report.indirect_count = Some(indirect);
    }
    finish(d, merged_text, Some(sdg))
}

/// Runs the whole pipeline on in-memory sources.
pub fn analyze_sources(id: &str, sources: &ScenarioSources, config: &AnalysisConfig, options: &RunOptions) -> ScenarioRun {
    analyze_prepared(id, &prepare(sources), config, options)
}

/// Runs the whole pipeline on a scenario directory; the scenario id is the
/// directory name.
pub fn analyze_scenario(dir: &Path, config: &AnalysisConfig, options: &RunOptions) -> Result<ScenarioRun, HarnessError> {
    let sources = ScenarioSources::read(dir)?;
    Ok(analyze_sources(&scenario_id(dir), &sources, config, options))
}

pub(crate) fn scenario_id(dir: &Path) -> String {
    dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| dir.display().to_string())
}
