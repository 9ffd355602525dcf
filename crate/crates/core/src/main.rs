use clap::{Parser, Subcommand, ValueEnum};
use log::{debug, warn};
use mergeifc::graph::{dot::to_dot, AnalysisConfig, Precision};
use mergeifc::harness::{
    analyze_sources, compare_configs, run_corpus, write_csv, HarnessError, Matrix, RunOptions, ScenarioSources,
};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "mergeifc", version, about = "Merge MJ revisions and look for information flow between the two contributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum CallGraph {
    Type,
    Instance,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixArg {
    Default,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one scenario and print its CSV row.
    Analyze {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, value_enum, default_value = "off")]
        exceptions: Switch,
        #[arg(long = "call-graph", value_enum, default_value = "instance")]
        call_graph: CallGraph,
        #[arg(long = "node-limit")]
        node_limit: Option<usize>,
        #[arg(long = "edge-limit")]
        edge_limit: Option<usize>,
        /// Write the graph in DOT format.
        #[arg(long = "dump-sdg")]
        dump_sdg: Option<PathBuf>,
        /// Write the detailed JSON report.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the merged program.
        #[arg(long = "emit-merged")]
        emit_merged: Option<PathBuf>,
        #[arg(long = "time-limit-secs", default_value_t = 60)]
        time_limit_secs: u64,
    },
    /// Analyze every scenario directory under ROOT.
    Corpus {
        root: PathBuf,
        #[arg(long, value_enum, default_value = "default")]
        matrix: MatrixArg,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long = "time-limit-secs", default_value_t = 60)]
        time_limit_secs: u64,
        /// Record wall-clock times in elapsed_ms.
        #[arg(long)]
        timings: bool,
    },
    /// Compare the configurations of a corpus CSV.
    Compare { csv: PathBuf },
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

fn read_file(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

fn time_limit(secs: u64) -> Option<Duration> {
    (secs > 0).then(|| Duration::from_secs(secs))
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Analyze {
            base,
            left,
            right,
            exceptions,
            call_graph,
            node_limit,
            edge_limit,
            dump_sdg,
            json,
            emit_merged,
            time_limit_secs,
        } => {
            let sources = ScenarioSources { base: read_file(&base)?, left: read_file(&left)?, right: read_file(&right)? };
            let precision = match call_graph {
                CallGraph::Type => Precision::TypeBased,
                CallGraph::Instance => Precision::InstanceBased,
            };
            let mut config = AnalysisConfig::new(matches!(exceptions, Switch::On), precision);
            config.node_limit = node_limit.unwrap_or(config.node_limit);
            config.edge_limit = edge_limit.unwrap_or(config.edge_limit);
            let id = base.parent().and_then(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
            let options = RunOptions { time_limit: time_limit(time_limit_secs), timings: false };
            let run = analyze_sources(&id, &sources, &config, &options);
            write_csv(std::slice::from_ref(run.report()), std::io::stdout().lock())?;
            if let Some(path) = json {
                write_file(&path, serde_json::to_string_pretty(&run.detail)?.as_bytes())?;
            }
            if let Some(path) = dump_sdg {
                match &run.sdg {
                    Some(sdg) => write_file(&path, to_dot(sdg).as_bytes())?,
                    None => warn!("no graph was built; {} not written", path.display()),
                }
            }
            if let Some(path) = emit_merged {
                match &run.merged_text {
                    Some(text) => write_file(&path, text.as_bytes())?,
                    None => warn!("no merged program; {} not written", path.display()),
                }
            }
            Ok(())
        }
        Command::Corpus { root, matrix, out, summary, jobs, time_limit_secs, timings } => {
            let configs = match matrix {
                MatrixArg::Default => Matrix::Default.configs(),
                MatrixArg::Full => Matrix::Full.configs(),
            };
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
            let options = RunOptions { time_limit: time_limit(time_limit_secs), timings };
            let run = run_corpus(&root, &configs, &options, jobs)?;
            match out {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_csv(&run.rows, &mut buf)?;
                    write_file(&path, &buf)?;
                }
                None => write_csv(&run.rows, std::io::stdout().lock())?,
            }
            if let Some(path) = summary {
                write_file(&path, serde_json::to_string_pretty(&run.summary)?.as_bytes())?;
            }
            Ok(())
        }
        Command::Compare { csv } => {
            let comparison = compare_configs(&read_file(&csv)?)?;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(comparison.to_table().as_bytes()).map_err(|source| HarnessError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(seed) = std::env::var("MERGEIFC_SEED") {
        debug!("MERGEIFC_SEED={seed} (the pipeline is deterministic and does not use it)");
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
