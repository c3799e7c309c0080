//! Indexed, persistent storage for one trace corpus.
//!
//! On disk a store is a pair of files: `<name>.dtrace`, the append-only
//! `daisen-jsonl v1` record log, and `<name>.dtidx`, a small versioned
//! sidecar holding the corpus summary. The sidecar is regenerable: if it is
//! missing or does not describe the log, it is rebuilt from the log.
//!
//! In memory every location gets a multi-level bucket index. Level 0 splits
//! the trace extent into 4096 buckets; each further level is 8x coarser. A
//! task lives at the finest level where it touches at most
//! [`MAX_SPAN_BUCKETS`] buckets and is listed in each of those buckets, so
//! window queries cost roughly `O(results + buckets touched)`.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::collector::TraceSink;
use crate::error::{Error, Result};
use crate::jsonl;
use crate::model::{validate_trace, Task, TaskId, ValidationReport};
use crate::natural::natural_cmp;

pub const INDEX_FORMAT: &str = "dtidx v1";
pub const LOG_EXT: &str = "dtrace";
pub const INDEX_EXT: &str = "dtidx";

const BASE_BUCKETS: f64 = 4096.0;
const MIN_BUCKET_WIDTH: f64 = 1e-9;
const LEVEL_FANOUT: usize = 8;
pub const MAX_SPAN_BUCKETS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Lenient,
}

impl Mode {
    pub fn is_strict(self) -> bool {
        self == Mode::Strict
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub task_count: u64,
    pub time_min: f64,
    pub time_max: f64,
    pub component_count: u64,
    pub format_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub name: String,
    pub task_count: u64,
    pub first_start: f64,
    pub last_end: f64,
}

/// Bucket geometry shared by every location of a store.
#[derive(Debug, Clone, Copy)]
struct Grid {
    origin: f64,
    base_width: f64,
    base_count: usize,
}

impl Grid {
    fn new(time_min: f64, time_max: f64) -> Self {
        let extent = (time_max - time_min).max(0.0);
        let base_width = (extent / BASE_BUCKETS).max(MIN_BUCKET_WIDTH);
        let base_count = ((extent / base_width).ceil() as usize).max(1) + 1;
        Grid { origin: time_min, base_width, base_count }
    }

    fn levels(&self) -> usize {
        let mut n = 1;
        let mut count = self.base_count;
        while count > MAX_SPAN_BUCKETS {
            count = count.div_ceil(LEVEL_FANOUT);
            n += 1;
        }
        n
    }

    fn width(&self, level: usize) -> f64 {
        self.base_width * (LEVEL_FANOUT.pow(level as u32) as f64)
    }

    fn count(&self, level: usize) -> usize {
        self.base_count.div_ceil(LEVEL_FANOUT.pow(level as u32)).max(1)
    }

    fn bucket(&self, level: usize, t: f64) -> usize {
        let q = ((t - self.origin) / self.width(level)).floor();
        (q.max(0.0) as usize).min(self.count(level) - 1)
    }

    /// Buckets overlapped by `[start, end)`; a zero-length task occupies the
    /// bucket containing `start`.
    fn span(&self, level: usize, start: f64, end: f64) -> (usize, usize) {
        let first = self.bucket(level, start);
        if end <= start {
            return (first, first);
        }
        let q = (end - self.origin) / self.width(level);
        let last = if q.fract() == 0.0 { q - 1.0 } else { q.floor() };
        let last = (last.max(0.0) as usize).min(self.count(level) - 1);
        (first, last.max(first))
    }

    fn level_for(&self, start: f64, end: f64) -> usize {
        let levels = self.levels();
        (0..levels)
            .find(|&l| {
                let (f, e) = self.span(l, start, end);
                e - f < MAX_SPAN_BUCKETS
            })
            .unwrap_or(levels - 1)
    }
}

#[derive(Debug, Default)]
struct LocationIndex {
    /// `levels[l][b]` lists task indices.
    levels: Vec<Vec<Vec<u32>>>,
    tasks: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    format: String,
    log_bytes: u64,
    mode: Mode,
    bucket_width: f64,
    meta: TraceMeta,
    warnings: usize,
}

/// The two files backing a store.
#[derive(Debug, Clone)]
pub struct StorePaths {
    pub log: PathBuf,
    pub index: PathBuf,
}

impl StorePaths {
    /// Accepts `run`, `run.dtrace` or `run.dtidx`.
    pub fn new(path: impl AsRef<Path>) -> Self {
        let path = path.as_ref();
        let base = match path.extension().and_then(|e| e.to_str()) {
            Some(LOG_EXT) | Some(INDEX_EXT) => path.with_extension(""),
            _ => path.to_path_buf(),
        };
        StorePaths { log: with_ext(&base, LOG_EXT), index: with_ext(&base, INDEX_EXT) }
    }
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn tmp_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".tmp");
    PathBuf::from(s)
}

/// An immutable, fully indexed trace.
#[derive(Debug)]
pub struct TraceStore {
    tasks: Vec<Task>,
    by_id: HashMap<TaskId, u32>,
    children: Vec<Vec<u32>>,
    locations: HashMap<String, LocationIndex>,
    components: Vec<ComponentInfo>,
    grid: Grid,
    meta: TraceMeta,
    mode: Mode,
    report: ValidationReport,
}

impl TraceStore {
    /// Validates and indexes `records` in memory. In strict mode any
    /// validation error aborts with [`Error::Validation`].
    pub fn ingest(records: impl IntoIterator<Item = Task>, mode: Mode) -> Result<Self> {
        let tasks: Vec<Task> = records.into_iter().collect();
        let report = validate_trace(&tasks, mode.is_strict());
        if mode.is_strict() && !report.passes() {
            return Err(Error::Validation(Box::new(report)));
        }
        Ok(Self::index(tasks, mode, report))
    }

    /// Ingests and persists to `<path>.dtrace` / `<path>.dtidx`.
    pub fn ingest_to(path: impl AsRef<Path>, records: impl IntoIterator<Item = Task>, mode: Mode) -> Result<Self> {
        let store = Self::ingest(records, mode)?;
        store.save(path)?;
        Ok(store)
    }

    /// Reads a `daisen-jsonl v1` file, ingests it and persists the store.
    /// Returns the store plus warnings about unknown keys.
    pub fn ingest_file(input: impl AsRef<Path>, out: impl AsRef<Path>, mode: Mode) -> Result<(Self, Vec<String>)> {
        let read = jsonl::read_tasks(BufReader::new(File::open(input)?))?;
        let store = Self::ingest_to(out, read.tasks, mode)?;
        Ok((store, read.warnings))
    }

    /// Writes the canonical log and the sidecar. Both files are published by
    /// rename so a reader never sees a half-written store.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let paths = StorePaths::new(path);
        let tmp = tmp_path(&paths.log);
        {
            let mut out = BufWriter::with_capacity(1 << 20, File::create(&tmp)?);
            for t in &self.tasks {
                jsonl::write_task(&mut out, t)?;
            }
            out.flush()?;
            out.get_ref().sync_all()?;
        }
        let _ = fs::remove_file(&paths.index);
        fs::rename(&tmp, &paths.log)?;
        self.write_sidecar(&paths)
    }

    fn write_sidecar(&self, paths: &StorePaths) -> Result<()> {
        let sidecar = Sidecar {
            format: INDEX_FORMAT.to_owned(),
            log_bytes: fs::metadata(&paths.log)?.len(),
            mode: self.mode,
            bucket_width: self.grid.base_width,
            meta: self.meta.clone(),
            warnings: self.report.warnings.len(),
        };
        let tmp = tmp_path(&paths.index);
        fs::write(&tmp, serde_json::to_vec_pretty(&sidecar).map_err(std::io::Error::other)?)?;
        fs::rename(&tmp, &paths.index)?;
        Ok(())
    }

    /// Opens a persisted store, regenerating the sidecar when it is missing
    /// or stale.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let paths = StorePaths::new(path);
        let log_bytes = fs::metadata(&paths.log)?.len();
        let sidecar: Option<Sidecar> = fs::read(&paths.index)
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .filter(|s: &Sidecar| s.format == INDEX_FORMAT && s.log_bytes == log_bytes);

        let mut tasks = Vec::new();
        for (i, line) in BufReader::with_capacity(1 << 20, File::open(&paths.log)?).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            tasks.push(jsonl::parse_line(&line, i + 1)?.0);
        }

        match sidecar {
            Some(s) if s.meta.task_count == tasks.len() as u64 => {
                Ok(Self::index(tasks, s.mode, ValidationReport::default()))
            }
            _ => {
                let report = validate_trace(&tasks, false);
                let store = Self::index(tasks, Mode::Lenient, report);
                store.write_sidecar(&paths)?;
                Ok(store)
            }
        }
    }

    fn index(tasks: Vec<Task>, mode: Mode, report: ValidationReport) -> Self {
        assert!(tasks.len() < u32::MAX as usize, "trace too large for 32-bit task indices");
        let (time_min, time_max) = if tasks.is_empty() {
            (0.0, 0.0)
        } else {
            tasks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t.start), hi.max(t.end))
            })
        };
        let grid = Grid::new(time_min, time_max);

        let mut by_id = HashMap::with_capacity(tasks.len());
        for (i, t) in tasks.iter().enumerate() {
            by_id.entry(t.id.clone()).or_insert(i as u32);
        }

        let mut children = vec![Vec::new(); tasks.len()];
        for (i, t) in tasks.iter().enumerate() {
            if let Some(&p) = t.parent_id.as_ref().and_then(|p| by_id.get(p)) {
                children[p as usize].push(i as u32);
            }
        }
        for list in &mut children {
            sort_by_start_id(list, &tasks);
        }

        let levels = grid.levels();
        let mut locations: HashMap<String, LocationIndex> = HashMap::new();
        for (i, t) in tasks.iter().enumerate() {
            let loc = locations.entry(t.location.clone()).or_insert_with(|| LocationIndex {
                levels: (0..levels).map(|l| vec![Vec::new(); grid.count(l)]).collect(),
                tasks: Vec::new(),
            });
            let level = grid.level_for(t.start, t.end);
            let (first, last) = grid.span(level, t.start, t.end);
            for b in first..=last {
                loc.levels[level][b].push(i as u32);
            }
            loc.tasks.push(i as u32);
        }

        let mut components: Vec<ComponentInfo> = locations
            .iter()
            .map(|(name, idx)| {
                let mut first_start = f64::INFINITY;
                let mut last_end = f64::NEG_INFINITY;
                for &i in &idx.tasks {
                    first_start = first_start.min(tasks[i as usize].start);
                    last_end = last_end.max(tasks[i as usize].end);
                }
                ComponentInfo { name: name.clone(), task_count: idx.tasks.len() as u64, first_start, last_end }
            })
            .collect();
        components.sort_by(|a, b| natural_cmp(&a.name, &b.name));

        let meta = TraceMeta {
            task_count: tasks.len() as u64,
            time_min,
            time_max,
            component_count: components.len() as u64,
            format_version: jsonl::FORMAT_VERSION.to_owned(),
        };
        TraceStore { tasks, by_id, children, locations, components, grid, meta, mode, report }
    }

    pub fn meta(&self) -> &TraceMeta {
        &self.meta
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Findings recorded at ingest (empty for stores reopened from a valid
    /// sidecar).
    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn bucket_width(&self) -> f64 {
        self.grid.base_width
    }

    pub fn components(&self) -> &[ComponentInfo] {
        &self.components
    }

    pub fn has_location(&self, location: &str) -> bool {
        self.locations.contains_key(location)
    }

    /// Resolves a user-supplied component name: an exact match wins, then a
    /// unique component whose name ends in `.name`. `L1_0` thus finds
    /// `GPU1.L1_0`.
    pub fn resolve_component(&self, name: &str) -> Result<&str> {
        if let Some((loc, _)) = self.locations.get_key_value(name) {
            return Ok(loc);
        }
        let suffix = format!(".{name}");
        let mut hits = self.components.iter().filter(|c| c.name.ends_with(&suffix));
        match (hits.next(), hits.next()) {
            (Some(c), None) => Ok(&c.name),
            (Some(a), Some(b)) => Err(Error::BadRequest(format!(
                "component `{name}` is ambiguous: `{}`, `{}`, ...",
                a.name, b.name
            ))),
            (None, _) => Err(Error::UnknownId(name.to_owned())),
        }
    }

    /// Every task at `location`, in ingest order.
    pub fn tasks_at(&self, location: &str) -> impl Iterator<Item = &Task> + '_ {
        self.locations
            .get(location)
            .into_iter()
            .flat_map(|l| l.tasks.iter().map(|&i| &self.tasks[i as usize]))
    }

    /// Tasks at `location` overlapping the half-open window `[t0, t1)`,
    /// sorted by `(start, id)`. Unknown locations yield an empty list.
    pub fn query_window(&self, location: &str, t0: f64, t1: f64) -> Result<Vec<&Task>> {
        if t0.is_nan() || t1.is_nan() || t0 > t1 {
            return Err(Error::BadRange(format!("window start {t0} is after end {t1}")));
        }
        let Some(loc) = self.locations.get(location) else {
            return Ok(Vec::new());
        };
        if t0 == t1 {
            return Ok(Vec::new());
        }
        let mut hits: Vec<u32> = Vec::new();
        for (level, buckets) in loc.levels.iter().enumerate() {
            // One bucket of slack on the left absorbs rounding in `span`.
            let qf = self.grid.bucket(level, t0).saturating_sub(1);
            let ql = self.grid.bucket(level, t1);
            for (b, bucket) in buckets.iter().enumerate().take(ql + 1).skip(qf) {
                for &i in bucket {
                    let t = &self.tasks[i as usize];
                    let (first, _) = self.grid.span(level, t.start, t.end);
                    if b == first.max(qf) && t.overlaps(t0, t1) {
                        hits.push(i);
                    }
                }
            }
        }
        sort_by_start_id(&mut hits, &self.tasks);
        Ok(hits.into_iter().map(|i| &self.tasks[i as usize]).collect())
    }

    pub fn get_task(&self, id: &str) -> Result<&Task> {
        self.index_of(id).map(|i| &self.tasks[i])
    }

    fn index_of(&self, id: &str) -> Result<usize> {
        self.by_id.get(id).map(|&i| i as usize).ok_or_else(|| Error::UnknownId(id.to_owned()))
    }

    /// Direct subtasks at any location, sorted by `(start, id)`.
    pub fn children(&self, id: &str) -> Result<Vec<&Task>> {
        let i = self.index_of(id)?;
        Ok(self.children[i].iter().map(|&c| &self.tasks[c as usize]).collect())
    }

    /// The task followed by its ancestors up to the root. A parent id that
    /// is not in the store ends the chain.
    pub fn parent_chain(&self, id: &str) -> Result<Vec<&Task>> {
        let mut chain = vec![self.get_task(id)?];
        while let Some(pid) = chain.last().and_then(|t| t.parent_id.as_ref()) {
            let Ok(parent) = self.get_task(pid.as_str()) else { break };
            if chain.len() > self.tasks.len() {
                return Err(Error::Cycle(id.to_owned()));
            }
            chain.push(parent);
        }
        Ok(chain)
    }

    /// Components whose name matches `filter` (unanchored search), in
    /// natural order, sliced to one page. Returns the total match count too.
    pub fn list_components(&self, filter: &str, page: usize, page_size: usize) -> Result<(usize, Vec<ComponentInfo>)> {
        if page_size == 0 {
            return Err(Error::BadRange("page_size must be at least 1".into()));
        }
        let re = Regex::new(filter)?;
        let matches: Vec<&ComponentInfo> = self.components.iter().filter(|c| re.is_match(&c.name)).collect();
        let total = matches.len();
        let items = matches
            .into_iter()
            .skip(page.saturating_mul(page_size))
            .take(page_size)
            .cloned()
            .collect();
        Ok((total, items))
    }
}

fn sort_by_start_id(list: &mut [u32], tasks: &[Task]) {
    list.sort_by(|&a, &b| {
        let (x, y) = (&tasks[a as usize], &tasks[b as usize]);
        x.start.total_cmp(&y.start).then_with(|| x.id.cmp(&y.id))
    });
}

/// Collector sink that builds a persisted store: records are appended to a
/// temporary log, and [`commit`](StoreWriter::commit) validates, indexes and
/// publishes it.
pub struct StoreWriter {
    paths: StorePaths,
    tmp: PathBuf,
    out: BufWriter<File>,
    tasks: Vec<Task>,
}

impl StoreWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let paths = StorePaths::new(path);
        let tmp = tmp_path(&paths.log);
        let out = BufWriter::with_capacity(1 << 20, File::create(&tmp)?);
        Ok(StoreWriter { paths, tmp, out, tasks: Vec::new() })
    }

    pub fn commit(mut self, mode: Mode) -> Result<TraceStore> {
        self.out.flush()?;
        self.out.get_ref().sync_all()?;
        let report = validate_trace(&self.tasks, mode.is_strict());
        if mode.is_strict() && !report.passes() {
            let _ = fs::remove_file(&self.tmp);
            return Err(Error::Validation(Box::new(report)));
        }
        let _ = fs::remove_file(&self.paths.index);
        fs::rename(&self.tmp, &self.paths.log)?;
        let store = TraceStore::index(std::mem::take(&mut self.tasks), mode, report);
        store.write_sidecar(&self.paths)?;
        Ok(store)
    }
}

impl TraceSink for StoreWriter {
    fn write_batch(&mut self, tasks: &[Task]) -> std::io::Result<()> {
        for t in tasks {
            jsonl::write_task(&mut self.out, t)?;
        }
        self.tasks.extend_from_slice(tasks);
        Ok(())
    }

    fn sync(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}
