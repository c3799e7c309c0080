use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use daisen_core::api::{Api, Params};
use daisen_core::collector::{Collector, CollectorOptions, JsonlSink};
use daisen_core::jsonl;
use daisen_core::metrics::Expectations;
use daisen_core::sim::{self, SimConfig};
use daisen_core::{validate_trace, Error, Mode, Result, StoreWriter, TraceStore};
use serde_json::json;

use crate::server::{self, BIND_ENV, DEFAULT_BIND};

pub const STORE_ENV: &str = "DAISEN_STORE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "daisen", version, about = "Record, store, query and render hierarchical hardware execution traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Validate a JSONL trace and build an indexed store from it.
    Ingest {
        /// Input trace, one JSON task per line.
        input: PathBuf,
        /// Store to create (`run` or `run.dtrace`).
        #[arg(short, long, default_value = "run.dtrace")]
        out: PathBuf,
        /// Keep going past validation errors, recording them as warnings.
        #[arg(long)]
        lenient: bool,
    },
    /// Run the GPU model and record its trace.
    Gen {
        /// TOML simulator configuration; defaults to the dispatch-bound preset.
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Output store, or a `.jsonl` file for a raw trace.
        #[arg(short, long, default_value = "run.dtrace")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dispatch_rate: Option<usize>,
        #[arg(long)]
        work_groups: Option<usize>,
    },
    /// Serve the JSON query API over HTTP.
    Serve {
        #[command(flatten)]
        store: StoreArg,
        /// Listen address.
        #[arg(long, env = BIND_ENV, default_value = DEFAULT_BIND)]
        bind: String,
        /// TOML table of `"pattern" = value` reference lines.
        #[arg(long)]
        expectations: Option<PathBuf>,
    },
    /// Write one view as SVG.
    Render(RenderArgs),
    /// Check a JSONL trace and print every finding.
    Validate {
        input: PathBuf,
        /// Downgrade recoverable findings to warnings.
        #[arg(long)]
        lenient: bool,
    },
    /// Print trace metadata and the component list as JSON.
    Stats {
        #[command(flatten)]
        store: StoreArg,
    },
}

#[derive(Debug, Args)]
struct StoreArg {
    /// Trace store to read.
    #[arg(long = "store", env = STORE_ENV, default_value = "run.dtrace")]
    path: PathBuf,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    store: StoreArg,
    /// overview, component or task; inferred from --component/--task.
    #[arg(long)]
    kind: Option<String>,
    /// Component name or unique suffix, e.g. `L1_0`.
    #[arg(long)]
    component: Option<String>,
    #[arg(long = "task")]
    task_id: Option<String>,
    /// Window start in seconds.
    #[arg(long = "from", allow_negative_numbers = true)]
    t0: Option<f64>,
    /// Window end in seconds.
    #[arg(long = "to", allow_negative_numbers = true)]
    t1: Option<f64>,
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    metric2: Option<String>,
    /// Component name regex for the overview.
    #[arg(long)]
    filter: Option<String>,
    #[arg(long)]
    page: Option<usize>,
    #[arg(long)]
    page_size: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    /// Bars narrower than this many pixels are not drawn.
    #[arg(long)]
    min_px: Option<f64>,
    #[arg(long)]
    expectations: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Parse { .. } => EXIT_INVALID,
        Error::Io(_) | Error::Bind(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            if let Error::Validation(report) = &e {
                for f in &report.errors {
                    eprintln!("  {} {}: {}", f.code.as_str(), f.task_id, f.message);
                }
            }
            exit_code(&e)
        }
    }
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn load_expectations(path: Option<&Path>) -> Result<Expectations> {
    path.map_or_else(|| Ok(Expectations::default()), Expectations::load)
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Ingest { input, out, lenient } => {
            let mode = if lenient { Mode::Lenient } else { Mode::Strict };
            let (store, warnings) = TraceStore::ingest_file(&input, &out, mode)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            for f in &store.report().warnings {
                eprintln!("warning: {} {}: {}", f.code.as_str(), f.task_id, f.message);
            }
            print_json(&json!({ "meta": store.meta(), "mode": store.mode(), "warnings": warnings.len() + store.report().warnings.len() }))?;
            Ok(EXIT_OK)
        }
        Command::Gen { config, out, seed, dispatch_rate, work_groups } => {
            let mut cfg = match config {
                Some(p) => SimConfig::from_toml_str(&fs::read_to_string(p)?)?,
                None => sim::default_config(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = dispatch_rate {
                cfg.dispatch_rate = r;
            }
            if let Some(n) = work_groups {
                cfg.kernel.work_groups = n;
            }
            cfg.validate()?;
            let options = CollectorOptions { seed: Some(cfg.seed), ..Default::default() };
            let result = if out.extension().is_some_and(|e| e == "jsonl") {
                if out.exists() {
                    fs::remove_file(&out)?;
                }
                let collector = Collector::new(JsonlSink::append(&out)?, options);
                let r = sim::simulate(&cfg, &collector)?;
                collector.finish()?;
                r
            } else {
                let collector = Collector::new(StoreWriter::create(&out)?, options);
                let r = sim::simulate(&cfg, &collector)?;
                collector.finish()?.commit(Mode::Strict)?;
                r
            };
            print_json(&json!({ "total_time": result.total_time, "cycles": result.cycles, "tasks_emitted": result.tasks_emitted, "out": out }))?;
            Ok(EXIT_OK)
        }
        Command::Serve { store, bind, expectations } => {
            let expectations = load_expectations(expectations.as_deref())?;
            let store = TraceStore::open(&store.path)?;
            let api = Arc::new(Api::new(Arc::new(store), expectations));
            let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            runtime.block_on(server::serve(api, &bind))?;
            Ok(EXIT_OK)
        }
        Command::Render(args) => {
            let expectations = load_expectations(args.expectations.as_deref())?;
            let api = Api::new(Arc::new(TraceStore::open(&args.store.path)?), expectations);
            let kind = args.kind.clone().unwrap_or_else(|| {
                if args.task_id.is_some() {
                    "task".into()
                } else if args.component.is_some() {
                    "component".into()
                } else {
                    "overview".into()
                }
            });
            let mut p = Params::new();
            p.insert("kind".into(), kind);
            let mut put = |k: &str, v: Option<String>| {
                if let Some(v) = v {
                    p.insert(k.into(), v);
                }
            };
            put("component", args.component);
            put("task_id", args.task_id);
            put("t0", args.t0.map(|v| v.to_string()));
            put("t1", args.t1.map(|v| v.to_string()));
            put("metric_primary", args.metric);
            put("metric_secondary", args.metric2);
            put("filter", args.filter);
            put("page", args.page.map(|v| v.to_string()));
            put("page_size", args.page_size.map(|v| v.to_string()));
            put("bins", args.bins.map(|v| v.to_string()));
            put("width_px", args.width.map(|v| v.to_string()));
            put("height_px", args.height.map(|v| v.to_string()));
            put("min_px", args.min_px.map(|v| v.to_string()));
            let svg = api.render(&api.view_spec(&p)?)?;
            match args.out {
                Some(path) => fs::write(path, svg)?,
                None => io::stdout().lock().write_all(svg.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Validate { input, lenient } => {
            let outcome = jsonl::read_tasks(BufReader::new(File::open(&input)?))?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let report = validate_trace(&outcome.tasks, !lenient);
            for f in &report.errors {
                println!("error {} {}: {}", f.code.as_str(), f.task_id, f.message);
            }
            for f in &report.warnings {
                println!("warning {} {}: {}", f.code.as_str(), f.task_id, f.message);
            }
            println!(
                "{} task(s), {} error(s), {} warning(s)",
                outcome.tasks.len(),
                report.errors.len(),
                report.warnings.len()
            );
            Ok(if report.passes() { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Stats { store } => {
            let store = TraceStore::open(&store.path)?;
            print_json(&json!({
                "meta": store.meta(),
                "mode": store.mode(),
                "bucket_width": store.bucket_width(),
                "components": store.components(),
            }))?;
            Ok(EXIT_OK)
        }
    }
}
