//! Python bindings: parse and merge MJ programs, analyze scenarios, run a
//! corpus and compare configurations.

use mergeifc::graph::dot::to_dot;
use mergeifc::graph::{AnalysisConfig, Precision};
use mergeifc::harness::{self, HarnessError, Matrix, RunOptions, ScenarioRun, ScenarioSources};
use mergeifc::merge::{merge_members, MergeOutcome, MergeScenario, Origin};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use std::path::PathBuf;
use std::time::Duration;

create_exception!(mergeifc_py, MergeIfcError, PyException);
create_exception!(mergeifc_py, FrontendError, MergeIfcError);
create_exception!(mergeifc_py, SchemaError, MergeIfcError);

fn harness_err(e: HarnessError) -> PyErr {
    match e {
        HarnessError::Schema(_) => SchemaError::new_err(e.to_string()),
        HarnessError::Io { .. } => pyo3::exceptions::PyOSError::new_err(e.to_string()),
        other => MergeIfcError::new_err(other.to_string()),
    }
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| MergeIfcError::new_err(e.to_string()))
}

/// Analysis configuration.
#[pyclass(frozen, module = "mergeifc_py")]
struct Config {
    inner: AnalysisConfig,
}

#[pymethods]
impl Config {
    #[new]
    #[pyo3(signature = (exceptions = false, call_graph = "instance", node_limit = None, edge_limit = None))]
    fn new(exceptions: bool, call_graph: &str, node_limit: Option<usize>, edge_limit: Option<usize>) -> PyResult<Self> {
        let precision = match call_graph {
            "type" => Precision::TypeBased,
            "instance" => Precision::InstanceBased,
            other => return Err(PyValueError::new_err(format!("call_graph must be 'type' or 'instance', not {other:?}"))),
        };
        let mut inner = AnalysisConfig::new(exceptions, precision);
        inner.node_limit = node_limit.unwrap_or(inner.node_limit);
        inner.edge_limit = edge_limit.unwrap_or(inner.edge_limit);
        Ok(Self { inner })
    }

    /// Parses an id such as `type_exc`.
    #[staticmethod]
    fn from_id(id: &str) -> PyResult<Self> {
        AnalysisConfig::from_id(id).map(|inner| Self { inner }).ok_or_else(|| PyValueError::new_err(format!("unknown config id {id:?}")))
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id()
    }

    #[getter]
    fn exceptions(&self) -> bool {
        self.inner.exceptions
    }

    #[getter]
    fn call_graph(&self) -> &'static str {
        match self.inner.precision {
            Precision::TypeBased => "type",
            Precision::InstanceBased => "instance",
        }
    }

    #[getter]
    fn node_limit(&self) -> usize {
        self.inner.node_limit
    }

    #[getter]
    fn edge_limit(&self) -> usize {
        self.inner.edge_limit
    }

    fn __repr__(&self) -> String {
        format!("Config(id={:?}, node_limit={}, edge_limit={})", self.inner.id(), self.inner.node_limit, self.inner.edge_limit)
    }
}

fn config_or_default(config: Option<&Config>) -> AnalysisConfig {
    config.map(|c| c.inner).unwrap_or_default()
}

/// Result of a three-way merge.
#[pyclass(frozen, module = "mergeifc_py")]
struct MergeResult {
    outcome: MergeOutcome,
}

#[pymethods]
impl MergeResult {
    #[getter]
    fn merged_text(&self) -> &str {
        &self.outcome.merged_text
    }

    #[getter]
    fn conflict_count(&self) -> usize {
        self.outcome.conflicts.len()
    }

    /// `(method, left_lines, right_lines)` for each method both sides edited.
    #[getter]
    fn method_edits(&self) -> Vec<(String, Vec<u32>, Vec<u32>)> {
        self.outcome
            .method_edits
            .iter()
            .map(|e| (e.method.clone(), e.left_lines.iter().copied().collect(), e.right_lines.iter().copied().collect()))
            .collect()
    }

    /// Origin of each merged line: `"base"`, `"left"` or `"right"`.
    #[getter]
    fn attribution(&self) -> Vec<&'static str> {
        self.outcome
            .attribution
            .origins()
            .iter()
            .map(|o| match o {
                Origin::Base => "base",
                Origin::Left => "left",
                Origin::Right => "right",
            })
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.outcome)
    }
}

/// One analyzed scenario under one configuration.
#[pyclass(frozen, module = "mergeifc_py")]
struct Analysis {
    run: ScenarioRun,
}

#[pymethods]
impl Analysis {
    #[getter]
    fn scenario_id(&self) -> &str {
        &self.run.report().scenario_id
    }

    #[getter]
    fn config_id(&self) -> &str {
        &self.run.report().config_id
    }

    #[getter]
    fn merged_ok(&self) -> bool {
        self.run.report().merged_ok
    }

    #[getter]
    fn sdg_created(&self) -> bool {
        self.run.report().sdg_created
    }

    #[getter]
    fn failure_reason(&self) -> String {
        self.run.report().failure_reason.to_string()
    }

    #[getter]
    fn nodes(&self) -> Option<usize> {
        self.run.report().nodes
    }

    #[getter]
    fn edges(&self) -> Option<usize> {
        self.run.report().edges
    }

    #[getter]
    fn direct_flow_count(&self) -> Option<usize> {
        self.run.report().direct_flow_count
    }

    #[getter]
    fn indirect_count(&self) -> Option<usize> {
        self.run.report().indirect_count
    }

    #[getter]
    fn flags(&self) -> Vec<String> {
        self.run.report().flags().map(String::from).collect()
    }

    /// `(direction, source_line, sink_line, right_line)` for every finding.
    #[getter]
    fn findings(&self) -> Vec<(&'static str, u32, u32, Option<u32>)> {
        self.run
            .detail
            .methods
            .iter()
            .flat_map(|m| &m.findings)
            .map(|f| (f.direction.name(), f.source_line, f.sink_line, f.right_line))
            .collect()
    }

    #[getter]
    fn merged_text(&self) -> Option<&str> {
        self.run.merged_text.as_deref()
    }

    /// The CSV row with its header.
    fn csv(&self) -> PyResult<String> {
        let mut out = Vec::new();
        harness::write_csv(std::slice::from_ref(self.run.report()), &mut out).map_err(harness_err)?;
        Ok(String::from_utf8_lossy(&out).into_owned())
    }

    /// Full detail report as JSON.
    fn to_json(&self) -> PyResult<String> {
        json(&self.run.detail)
    }

    /// The graph in DOT format, if one was built.
    fn dot(&self) -> Option<String> {
        self.run.sdg.as_ref().map(to_dot)
    }

    fn __repr__(&self) -> String {
        let r = self.run.report();
        format!("Analysis({}, {}, failure_reason={})", r.scenario_id, r.config_id, r.failure_reason)
    }
}

/// Rows and per-config summary of a corpus run.
#[pyclass(frozen, module = "mergeifc_py")]
struct CorpusResult {
    run: harness::CorpusRun,
}

#[pymethods]
impl CorpusResult {
    #[getter]
    fn row_count(&self) -> usize {
        self.run.rows.len()
    }

    fn csv(&self) -> PyResult<String> {
        let mut out = Vec::new();
        harness::write_csv(&self.run.rows, &mut out).map_err(harness_err)?;
        Ok(String::from_utf8_lossy(&out).into_owned())
    }

    fn summary_json(&self) -> PyResult<String> {
        json(&self.run.summary)
    }
}

/// Parses and resolves one program; returns its qualified method names.
#[pyfunction]
#[pyo3(signature = (source, name = "input.mj"))]
fn parse(source: &str, name: &str) -> PyResult<Vec<String>> {
    let program = mergeifc::lang::load(source, name).map_err(|e| FrontendError::new_err(e.to_string()))?;
    Ok(program.methods.iter().map(|m| m.qualified_name.clone()).collect())
}

/// Merges three revisions member by member.
#[pyfunction]
fn merge(base: &str, left: &str, right: &str) -> PyResult<MergeResult> {
    let scenario = MergeScenario::from_sources(base, left, right).map_err(|e| FrontendError::new_err(e.to_string()))?;
    let outcome = merge_members(&scenario).map_err(|e| FrontendError::new_err(e.to_string()))?;
    Ok(MergeResult { outcome })
}

/// Runs the whole pipeline on three source texts.
#[pyfunction]
#[pyo3(signature = (base, left, right, config = None, scenario_id = "scenario"))]
fn analyze(py: Python<'_>, base: &str, left: &str, right: &str, config: Option<&Config>, scenario_id: &str) -> Analysis {
    let sources = ScenarioSources { base: base.into(), left: left.into(), right: right.into() };
    let config = config_or_default(config);
    let run = py.detach(|| harness::analyze_sources(scenario_id, &sources, &config, &RunOptions::default()));
    Analysis { run }
}

/// Runs the whole pipeline on a directory holding base.mj, left.mj and right.mj.
#[pyfunction]
#[pyo3(signature = (path, config = None))]
fn analyze_dir(py: Python<'_>, path: PathBuf, config: Option<&Config>) -> PyResult<Analysis> {
    let config = config_or_default(config);
    let run = py.detach(|| harness::analyze_scenario(&path, &config, &RunOptions::default())).map_err(harness_err)?;
    Ok(Analysis { run })
}

/// Analyzes every scenario directory under `root`.
#[pyfunction]
#[pyo3(signature = (root, matrix = "default", jobs = 1, time_limit_secs = 60))]
fn run_corpus(py: Python<'_>, root: PathBuf, matrix: &str, jobs: usize, time_limit_secs: u64) -> PyResult<CorpusResult> {
    let matrix = match matrix {
        "default" => Matrix::Default,
        "full" => Matrix::Full,
        other => return Err(PyValueError::new_err(format!("matrix must be 'default' or 'full', not {other:?}"))),
    };
    let options = RunOptions { time_limit: (time_limit_secs > 0).then(|| Duration::from_secs(time_limit_secs)), timings: false };
    let run = py.detach(|| harness::run_corpus(&root, &matrix.configs(), &options, jobs)).map_err(harness_err)?;
    Ok(CorpusResult { run })
}

/// Compares the configurations of a corpus CSV; returns the comparison as JSON.
#[pyfunction]
fn compare(csv_text: &str) -> PyResult<String> {
    let comparison = harness::compare_configs(csv_text).map_err(harness_err)?;
    json(&comparison)
}

#[pymodule]
fn mergeifc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MergeIfcError", m.py().get_type::<MergeIfcError>())?;
    m.add("FrontendError", m.py().get_type::<FrontendError>())?;
    m.add("SchemaError", m.py().get_type::<SchemaError>())?;
    m.add("CSV_COLUMNS", harness::CSV_COLUMNS.to_vec())?;
    m.add_class::<Config>()?;
    m.add_class::<MergeResult>()?;
    m.add_class::<Analysis>()?;
    m.add_class::<CorpusResult>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(merge, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_dir, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
