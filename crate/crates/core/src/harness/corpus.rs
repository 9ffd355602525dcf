use super::{analyze_prepared, prepare, scenario_id, FailureReason, HarnessError, RunOptions, ScenarioReport, ScenarioSources, CSV_COLUMNS};
use crate::graph::AnalysisConfig;
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Five-number summary with linearly interpolated quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quartiles {
    pub fn of(values: &[usize]) -> Option<Self> {
        let mut v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let at = |q: f64| {
            let pos = q * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Self { min: v[0], q1: at(0.25), median: at(0.5), q3: at(0.75), max: v[v.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub config_id: String,
    pub scenarios: usize,
    pub merged_clean: usize,
    pub with_same_method: usize,
    pub sdg_created: usize,
    /// `sdg_created / with_same_method`.
    pub creation_rate: Option<f64>,
    /// Created graphs whose edit methods could be annotated.
    pub annotatable: usize,
    pub direct_flow: usize,
    /// `direct_flow / annotatable`.
    pub flow_frequency: Option<f64>,
    pub indirect_only: usize,
    /// `indirect_only / annotatable`.
    pub indirect_only_frequency: Option<f64>,
    pub nodes: Option<Quartiles>,
    pub edges: Option<Quartiles>,
    pub failures: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub scenarios: usize,
    pub configs: Vec<ConfigSummary>,
}

#[derive(Debug, Clone)]
pub struct CorpusRun {
    /// Sorted by scenario id, then config id.
    pub rows: Vec<ScenarioReport>,
    pub summary: CorpusSummary,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Per-config aggregates. Every id in `config_ids` gets an entry, even
/// without rows.
pub fn summarize(rows: &[ScenarioReport], config_ids: &[String]) -> CorpusSummary {
    let scenarios: BTreeSet<&str> = rows.iter().map(|r| r.scenario_id.as_str()).collect();
    let mut ids: BTreeSet<String> = config_ids.iter().cloned().collect();
    ids.extend(rows.iter().map(|r| r.config_id.clone()));
    let configs = ids
        .into_iter()
        .map(|config_id| {
            let rs: Vec<&ScenarioReport> = rows.iter().filter(|r| r.config_id == config_id).collect();
            let count = |p: &dyn Fn(&ScenarioReport) -> bool| rs.iter().filter(|r| p(r)).count();
            let with_same_method = count(&|r| r.same_method_count > 0);
            let sdg_created = count(&|r| r.sdg_created);
            let annotatable = count(&|r| r.annotatable());
            let direct_flow = count(&|r| r.annotatable() && r.direct_flow_found == Some(true));
            let indirect_only =
                count(&|r| r.annotatable() && r.direct_flow_found != Some(true) && r.indirect_found == Some(true));
            let sizes = |f: fn(&ScenarioReport) -> Option<usize>| Quartiles::of(&rs.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
            let mut failures = BTreeMap::new();
            for r in &rs {
                if r.failure_reason != FailureReason::None {
                    *failures.entry(r.failure_reason.to_string()).or_default() += 1;
                }
            }
            ConfigSummary {
                config_id,
                scenarios: rs.len(),
                merged_clean: count(&|r| r.merged_ok && r.conflict_count == 0),
                with_same_method,
                sdg_created,
                creation_rate: ratio(sdg_created, with_same_method),
                annotatable,
                direct_flow,
                flow_frequency: ratio(direct_flow, annotatable),
                indirect_only,
                indirect_only_frequency: ratio(indirect_only, annotatable),
                nodes: sizes(|r| r.nodes),
                edges: sizes(|r| r.edges),
                failures,
            }
        })
        .collect();
    CorpusSummary { scenarios: scenarios.len(), configs }
}

/// Subdirectories of `root` holding a `base.mj`, sorted by name.
pub fn read_scenario_dirs(root: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let entries = std::fs::read_dir(root).map_err(|e| HarnessError::io(root, e))?;
    let mut dirs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| HarnessError::io(root, e))?.path();
        if path.is_dir() && path.join("base.mj").is_file() {
            dirs.push(path);
        } else if path.is_dir() {
            warn!("skipping {}: no base.mj", path.display());
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Analyzes every scenario under `root` with every config on a pool of
/// `jobs` threads. Row order and content do not depend on `jobs`.
pub fn run_corpus(root: &Path, configs: &[AnalysisConfig], options: &RunOptions, jobs: usize) -> Result<CorpusRun, HarnessError> {
    let dirs = read_scenario_dirs(root)?;
    info!("{} scenario(s) under {}", dirs.len(), root.display());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let mut rows: Vec<ScenarioReport> = pool.install(|| {
        dirs.par_iter()
            .flat_map_iter(|dir| {
                let id = scenario_id(dir);
                match ScenarioSources::read(dir) {
                    Ok(sources) => {
                        let prepared = prepare(&sources);
                        configs.iter().map(|c| analyze_prepared(&id, &prepared, c, options).detail.report).collect::<Vec<_>>()
                    }
                    Err(e) => {
                        warn!("{id}: {e}");
                        configs
                            .iter()
                            .map(|c| {
                                let mut r = ScenarioReport::empty(&id, c.id());
                                r.failure_reason = FailureReason::ParseError;
                                r
                            })
                            .collect()
                    }
                }
            })
            .collect()
    });
    rows.sort_by(|a, b| (&a.scenario_id, &a.config_id).cmp(&(&b.scenario_id, &b.config_id)));
    let ids: Vec<String> = configs.iter().map(AnalysisConfig::id).collect();
    let summary = summarize(&rows, &ids);
    Ok(CorpusRun { rows, summary })
}

/// Header line followed by one line per row.
pub fn write_csv<W: Write>(rows: &[ScenarioReport], out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}
