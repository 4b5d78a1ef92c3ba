//! The `cct-lens` command line.
//!
//! Reports go to standard output and diagnostics to standard error. [`run`]
//! takes both streams so the commands can be driven in-process.

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{analyze, AnalysisConfig, Tables};
use crate::cct::{
    folded_stacks, merge_ccts, project_call_graph, serialize_cct, serialize_forest, BuildOptions,
    CctForest,
};
use crate::components::{default_hr_catalog, ComponentCatalog};
use crate::filters::{apply_filter, FilterMode, FilterPattern, FilterSet};
use crate::report::{self, ReportFormat};
use crate::snapshot::{diff, Snapshot, SNAPSHOT_SCHEMA};
use crate::trace_model::{digest_bytes, read_trace, ParseMode};
use crate::workload_sim::{load_preset, preset, simulate, WorkloadFile};

#[derive(Debug, Parser)]
#[command(
    name = "cct-lens",
    version,
    about = "Calling context tree profiling for component-level interactions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic HR Portal trace
    Simulate(SimulateArgs),
    /// Hot-spot, total-time and component tables for a trace
    Analyze(AnalyzeArgs),
    /// Compare two snapshots written by `analyze --snapshot-out`
    Diff(DiffArgs),
    /// Caller/callee edges or folded stacks for a trace
    Callgraph(CallgraphArgs),
    /// Convert a trace to another representation
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Built-in workload (`figure8`)
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// Workload spec file (TOML)
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of concurrent users (threads)
    #[arg(long)]
    users: Option<u32>,
    #[arg(long)]
    jitter: Option<f64>,
    /// Output trace file; standard output when omitted
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Keep only methods matching a pattern (repeatable)
    #[arg(long = "include", value_name = "PATTERN")]
    include: Vec<String>,
    /// Drop methods matching a pattern (repeatable)
    #[arg(long = "exclude", value_name = "PATTERN")]
    exclude: Vec<String>,
    /// How filtered frames are treated: attribute | drop
    #[arg(long = "filter-mode", default_value = "attribute")]
    filter_mode: FilterMode,
    /// Component catalog file replacing the built-in HR catalog
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Repair truncated traces instead of rejecting them
    #[arg(long)]
    lenient: bool,
    /// Limit calling-context depth
    #[arg(long)]
    max_depth: Option<usize>,
}

impl PipelineArgs {
    fn config(&self) -> anyhow::Result<AnalysisConfig> {
        let patterns = |list: &[String]| -> anyhow::Result<Vec<FilterPattern>> {
            list.iter()
                .map(|p| FilterPattern::new(p.as_str()).map_err(anyhow::Error::from))
                .collect()
        };
        let catalog = match &self.catalog {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading catalog {}", path.display()))?;
                ComponentCatalog::parse(&text)?
            }
            None => default_hr_catalog(),
        };
        Ok(AnalysisConfig {
            build: BuildOptions {
                mode: if self.lenient {
                    ParseMode::Lenient
                } else {
                    ParseMode::Strict
                },
                max_depth: self.max_depth,
            },
            filters: FilterSet::new(patterns(&self.include)?, patterns(&self.exclude)?),
            filter_mode: self.filter_mode,
            catalog,
        })
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    trace: PathBuf,
    #[arg(long, default_value = "text")]
    format: ReportFormat,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// One report section per thread instead of the merged view
    #[arg(long)]
    per_thread: bool,
    /// Also persist the analysis as a snapshot document
    #[arg(long)]
    snapshot_out: Option<PathBuf>,
    /// Snapshot label; defaults to the trace file stem
    #[arg(long)]
    label: Option<String>,
    /// User count recorded in the snapshot
    #[arg(long, default_value_t = 0)]
    users: u32,
}

#[derive(Debug, Args)]
struct DiffArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value = "text")]
    format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum GraphFormat {
    Edges,
    Folded,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CallgraphArgs {
    trace: PathBuf,
    #[arg(long, value_enum, default_value = "edges")]
    format: GraphFormat,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ExportFormat {
    /// Calling context tree document (JSON)
    Cct,
    /// Folded stacks for flame-graph renderers
    Folded,
    /// JSON-lines events
    Jsonl,
    /// Canonical tab-separated events
    Tsv,
}

#[derive(Debug, Args)]
struct ExportArgs {
    trace: PathBuf,
    #[arg(long, value_enum, default_value = "cct")]
    format: ExportFormat,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Export one tree per thread (cct format only)
    #[arg(long)]
    per_thread: bool,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args, out, err),
        Command::Analyze(args) => cmd_analyze(&args, out, err),
        Command::Diff(args) => cmd_diff(&args, out),
        Command::Callgraph(args) => cmd_callgraph(&args, out, err),
        Command::Export(args) => cmd_export(&args, out, err),
    };
    match result {
        Ok(()) => 0,
        // The reader went away (e.g. `| head`); nothing left to report to.
        Err(e) if is_broken_pipe(&e) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        cause
            .downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || matches!(
                cause.downcast_ref::<crate::Error>(),
                Some(crate::Error::Io(io)) if io.kind() == std::io::ErrorKind::BrokenPipe
            )
    })
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn warn_all(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

fn cmd_simulate(
    args: &SimulateArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<()> {
    let mut spec = match (&args.preset, &args.spec) {
        (Some(name), None) => {
            let mut spec = preset(name)?;
            if let Some(users) = args.users {
                spec = load_preset(users, spec.latency.jitter, spec.seed);
            }
            spec
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading spec {}", path.display()))?;
            let mut spec = WorkloadFile::parse(&text)?.into_spec()?;
            if let Some(users) = args.users {
                spec.thread_count = users;
            }
            spec
        }
        _ => bail!("one of --preset or --spec is required"),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(jitter) = args.jitter {
        spec.latency.jitter = jitter;
    }
    let trace = simulate(&spec)?;
    let events = trace.lines().filter(|l| !l.starts_with('#')).count();
    let summary = format!(
        "events: {events}\ndigest: {}\n",
        digest_bytes(trace.as_bytes())
    );
    match &args.output {
        Some(path) => {
            fs::write(path, &trace).with_context(|| format!("writing {}", path.display()))?;
            out.write_all(summary.as_bytes())?;
        }
        None => {
            out.write_all(trace.as_bytes())?;
            err.write_all(summary.as_bytes())?;
        }
    }
    Ok(())
}

fn tables_json(tables: &Tables) -> serde_json::Value {
    json!({
        "hotspots": report::hotspot_json(&tables.hotspots),
        "totals": report::total_json(&tables.totals),
        "components": report::component_json(&tables.components),
        "unattributed_ns": tables.unattributed,
    })
}

fn tables_text(tables: &Tables) -> String {
    let mut s = String::new();
    s.push_str("== Hot spots ==\n");
    s.push_str(&report::hotspot_text(&tables.hotspots));
    if tables.unattributed > 0 {
        s.push_str(&format!(
            "(unattributed root time: {})\n",
            report::format_ms_int(tables.unattributed)
        ));
    }
    s.push_str("\n== Total time ==\n");
    s.push_str(&report::total_text(&tables.totals));
    s.push_str("\n== Components ==\n");
    s.push_str(&report::component_text(&tables.components));
    s
}

fn tables_csv(tables: &Tables) -> String {
    let mut s = String::new();
    s.push_str("# hotspots\n");
    s.push_str(&report::hotspot_csv(&tables.hotspots));
    s.push_str("# totals\n");
    s.push_str(&report::total_csv(&tables.totals));
    s.push_str("# components\n");
    s.push_str(&report::component_csv(&tables.components));
    s
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    let config = args.pipeline.config()?;
    let analysis = analyze(open(&args.trace)?, &config)
        .with_context(|| format!("analyzing {}", args.trace.display()))?;
    warn_all(err, &analysis.event_warnings);

    let body = if args.per_thread {
        let sections = analysis.per_thread(&config)?;
        match args.format {
            ReportFormat::Json => {
                let threads: Vec<serde_json::Value> = sections
                    .iter()
                    .map(|(tid, (_, tables))| {
                        let mut v = tables_json(tables);
                        v["tid"] = json!(tid);
                        v
                    })
                    .collect();
                let doc = json!({ "trace_digest": analysis.digest, "view": "per_thread", "threads": threads });
                serde_json::to_string_pretty(&doc)? + "\n"
            }
            ReportFormat::Text => sections
                .iter()
                .map(|(tid, (_, tables))| format!("#### thread {tid}\n{}", tables_text(tables)))
                .collect::<Vec<_>>()
                .join("\n"),
            ReportFormat::Csv => sections
                .iter()
                .map(|(tid, (_, tables))| format!("# thread {tid}\n{}", tables_csv(tables)))
                .collect(),
        }
    } else {
        match args.format {
            ReportFormat::Json => {
                let mut doc = tables_json(&analysis.tables);
                doc["trace_digest"] = json!(analysis.digest);
                doc["view"] = json!("merged");
                serde_json::to_string_pretty(&doc)? + "\n"
            }
            ReportFormat::Text => tables_text(&analysis.tables),
            ReportFormat::Csv => tables_csv(&analysis.tables),
        }
    };
    out.write_all(body.as_bytes())?;

    if let Some(path) = &args.snapshot_out {
        let label = args.label.clone().unwrap_or_else(|| {
            args.trace
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        let snapshot = Snapshot {
            schema: SNAPSHOT_SCHEMA.to_string(),
            label,
            user_count: args.users,
            hotspot_table: analysis.tables.hotspots.clone(),
            component_table: analysis.tables.components.clone(),
            source_trace_digest: analysis.digest.clone(),
        };
        fs::write(path, snapshot.to_json() + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn load_snapshot(path: &Path) -> anyhow::Result<Snapshot> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Snapshot::from_json(&text).with_context(|| format!("loading snapshot {}", path.display()))
}

fn cmd_diff(args: &DiffArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let a = load_snapshot(&args.a)?;
    let b = load_snapshot(&args.b)?;
    let rows = diff(&a, &b);
    let body = match args.format {
        ReportFormat::Text => format!("# {} vs {}\n{}", a.label, b.label, report::diff_text(&rows)),
        ReportFormat::Csv => report::diff_csv(&rows),
        ReportFormat::Json => {
            let doc = json!({ "a": a.label, "b": b.label, "rows": report::diff_json(&rows) });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    out.write_all(body.as_bytes())?;
    Ok(())
}

fn cmd_callgraph(
    args: &CallgraphArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<()> {
    let config = args.pipeline.config()?;
    let analysis = analyze(open(&args.trace)?, &config)
        .with_context(|| format!("analyzing {}", args.trace.display()))?;
    warn_all(err, &analysis.event_warnings);
    let body = match args.format {
        GraphFormat::Folded => {
            let mut s = folded_stacks(&analysis.merged).join("\n");
            if !s.is_empty() {
                s.push('\n');
            }
            s
        }
        GraphFormat::Edges => report::edges_text(&project_call_graph(&analysis.merged)),
        GraphFormat::Csv => report::edges_csv(&project_call_graph(&analysis.merged)),
        GraphFormat::Json => {
            serde_json::to_string_pretty(&project_call_graph(&analysis.merged))? + "\n"
        }
    };
    out.write_all(body.as_bytes())?;
    Ok(())
}

fn cmd_export(args: &ExportArgs, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    let config = args.pipeline.config()?;
    match args.format {
        ExportFormat::Jsonl | ExportFormat::Tsv => {
            let trace = read_trace(open(&args.trace)?, config.build.mode)?;
            warn_all(err, &trace.warnings);
            let mut events: Vec<_> = trace.threads.values().flatten().collect();
            // Stable: per-thread order survives.
            events.sort_by_key(|e| (e.ts, e.tid));
            for e in events {
                let line = if args.format == ExportFormat::Jsonl {
                    e.to_json_line()
                } else {
                    e.to_string()
                };
                writeln!(out, "{line}")?;
            }
        }
        ExportFormat::Cct | ExportFormat::Folded => {
            let forest = CctForest::read(open(&args.trace)?, config.build)?;
            warn_all(err, &forest.warnings);
            if args.per_thread && args.format == ExportFormat::Cct {
                let mut filtered = CctForest::default();
                for (&tid, root) in &forest.roots {
                    filtered.roots.insert(
                        tid,
                        apply_filter(root, &config.filters, config.filter_mode)?,
                    );
                }
                writeln!(out, "{}", serialize_forest(&filtered))?;
            } else {
                let merged =
                    apply_filter(&merge_ccts(&forest), &config.filters, config.filter_mode)?;
                if args.format == ExportFormat::Cct {
                    writeln!(out, "{}", serialize_cct(&merged))?;
                } else {
                    for line in folded_stacks(&merged) {
                        writeln!(out, "{line}")?;
                    }
                }
            }
        }
    }
    Ok(())
}
