//! Instrumentation API for simulators.
//!
//! A [`Collector`] exposes seven calls: [`begin_task`](Collector::begin_task)
//! and [`end_task`](Collector::end_task) for ordinary work, the request
//! quartet ([`initiate_request`](Collector::initiate_request),
//! [`receive_request`](Collector::receive_request),
//! [`complete_request`](Collector::complete_request),
//! [`receive_response`](Collector::receive_response)) for cross-component
//! communication, and [`flush`](Collector::flush).
//!
//! Only completed tasks become records. Completed records are batched and
//! handed to a background writer thread over a bounded queue; a full queue
//! blocks the caller, so nothing is ever silently dropped.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::JoinHandle;

use crossbeam_channel::{bounded, Sender};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jsonl;
use crate::model::{Details, Task, TaskId, TaskKind, REQUEST_IN, REQUEST_OUT};

pub const TRACE_PATH_ENV: &str = "DAISEN_TRACE_PATH";
pub const DEFAULT_BATCH: usize = 4096;
const ID_LEN: usize = 8;
const ID_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

/// Destination for completed task records.
pub trait TraceSink: Send + 'static {
    fn write_batch(&mut self, tasks: &[Task]) -> io::Result<()>;
    /// Makes everything written so far durable.
    fn sync(&mut self) -> io::Result<()>;
}

/// Appends `daisen-jsonl v1` lines to a file.
pub struct JsonlSink {
    out: BufWriter<File>,
}

impl JsonlSink {
    pub fn append(path: impl AsRef<Path>) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(JsonlSink { out: BufWriter::with_capacity(1 << 20, file) })
    }
}

impl TraceSink for JsonlSink {
    fn write_batch(&mut self, tasks: &[Task]) -> io::Result<()> {
        for t in tasks {
            jsonl::write_task(&mut self.out, t)?;
        }
        Ok(())
    }

    fn sync(&mut self) -> io::Result<()> {
        self.out.flush()?;
        self.out.get_ref().sync_data()
    }
}

/// In-memory sink; clones share the same buffer.
#[derive(Clone, Default)]
pub struct MemorySink {
    tasks: Arc<Mutex<Vec<Task>>>,
}

impl MemorySink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tasks(&self) -> Vec<Task> {
        self.tasks.lock().unwrap().clone()
    }

    pub fn into_tasks(self) -> Vec<Task> {
        match Arc::try_unwrap(self.tasks) {
            Ok(m) => m.into_inner().unwrap(),
            Err(shared) => shared.lock().unwrap().clone(),
        }
    }
}

impl TraceSink for MemorySink {
    fn write_batch(&mut self, tasks: &[Task]) -> io::Result<()> {
        self.tasks.lock().unwrap().extend_from_slice(tasks);
        Ok(())
    }

    fn sync(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Source of fresh task ids.
pub enum IdSource {
    Random(Box<ChaCha8Rng>),
    /// Hands out a fixed sequence; used to replay existing traces.
    Scripted(VecDeque<TaskId>),
}

impl IdSource {
    pub fn seeded(seed: u64) -> Self {
        IdSource::Random(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn from_entropy() -> Self {
        IdSource::Random(Box::new(ChaCha8Rng::from_entropy()))
    }

    pub fn scripted(ids: impl IntoIterator<Item = TaskId>) -> Self {
        IdSource::Scripted(ids.into_iter().collect())
    }

    fn next_id(&mut self) -> Result<TaskId> {
        match self {
            IdSource::Random(rng) => {
                let token: String = (0..ID_LEN)
                    .map(|_| ID_ALPHABET[rng.gen_range(0..ID_ALPHABET.len())] as char)
                    .collect();
                Ok(TaskId::new(token))
            }
            IdSource::Scripted(queue) => queue
                .pop_front()
                .ok_or_else(|| Error::Config("scripted id source exhausted".into())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CollectorOptions {
    /// Enforce request containment at collection time.
    pub strict: bool,
    pub batch_size: usize,
    /// Number of batches the writer queue holds before callers block.
    pub queue_depth: usize,
    /// Deterministic ids when set.
    pub seed: Option<u64>,
}

impl Default for CollectorOptions {
    fn default() -> Self {
        CollectorOptions { strict: true, batch_size: DEFAULT_BATCH, queue_depth: 8, seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FlushStats {
    /// Records that reached the sink since the previous flush.
    pub records_written: u64,
    /// Records lost to sink errors over the whole session.
    pub dropped_count: u64,
}

enum Msg {
    Batch(Vec<Task>),
    Flush(Sender<WriterReport>),
}

struct WriterReport {
    written: u64,
    dropped: u64,
    error: Option<String>,
}

struct OpenTask {
    task: Task,
    open_children: Vec<TaskId>,
    latest_child_end: f64,
}

struct State {
    closed: bool,
    strict: bool,
    ids: IdSource,
    issued: HashSet<TaskId>,
    open: HashMap<TaskId, OpenTask>,
    batch: Vec<Task>,
    batch_size: usize,
}

/// A collection session writing completed tasks to a [`TraceSink`].
///
/// All methods take `&self`; the session can be shared across simulator
/// threads. Each call is atomic with respect to the others.
pub struct Collector<S: TraceSink> {
    state: Mutex<State>,
    tx: Option<Sender<Msg>>,
    writer: Option<JoinHandle<S>>,
}

impl Collector<JsonlSink> {
    /// Session writing to the file named by `DAISEN_TRACE_PATH`.
    pub fn from_env(options: CollectorOptions) -> Result<Self> {
        let path = std::env::var_os(TRACE_PATH_ENV)
            .ok_or_else(|| Error::Config(format!("{TRACE_PATH_ENV} is not set")))?;
        Ok(Collector::new(JsonlSink::append(path)?, options))
    }
}

impl<S: TraceSink> Collector<S> {
    pub fn new(sink: S, options: CollectorOptions) -> Self {
        let ids = match options.seed {
            Some(seed) => IdSource::seeded(seed),
            None => IdSource::from_entropy(),
        };
        Self::with_ids(sink, options, ids)
    }

    pub fn with_ids(mut sink: S, options: CollectorOptions, ids: IdSource) -> Self {
        let (tx, rx) = bounded::<Msg>(options.queue_depth.max(1));
        let writer = std::thread::Builder::new()
            .name("daisen-writer".into())
            .spawn(move || {
                let mut written = 0u64;
                let mut dropped = 0u64;
                let mut error: Option<String> = None;
                for msg in rx {
                    match msg {
                        Msg::Batch(tasks) => match sink.write_batch(&tasks) {
                            Ok(()) => written += tasks.len() as u64,
                            Err(e) => {
                                dropped += tasks.len() as u64;
                                error.get_or_insert_with(|| e.to_string());
                            }
                        },
                        Msg::Flush(reply) => {
                            if let Err(e) = sink.sync() {
                                error.get_or_insert_with(|| e.to_string());
                            }
                            let _ = reply.send(WriterReport {
                                written: std::mem::take(&mut written),
                                dropped,
                                error: error.take(),
                            });
                        }
                    }
                }
                let _ = sink.sync();
                sink
            })
            .expect("spawn trace writer thread");

        Collector {
            state: Mutex::new(State {
                closed: false,
                strict: options.strict,
                ids,
                issued: HashSet::new(),
                open: HashMap::new(),
                batch: Vec::with_capacity(options.batch_size.max(1)),
                batch_size: options.batch_size.max(1),
            }),
            tx: Some(tx),
            writer: Some(writer),
        }
    }

    fn lock(&self) -> Result<MutexGuard<'_, State>> {
        let guard = self.state.lock().unwrap_or_else(|p| p.into_inner());
        if guard.closed {
            return Err(Error::SessionClosed);
        }
        Ok(guard)
    }

    pub fn begin_task(
        &self,
        parent_id: Option<&TaskId>,
        category: &str,
        action: &str,
        location: &str,
        time: f64,
        details: Option<Details>,
    ) -> Result<TaskId> {
        let mut st = self.lock()?;
        st.open_task(parent_id.cloned(), category, action, location, time, details)
    }

    pub fn end_task(&self, id: &TaskId, time: f64) -> Result<()> {
        let mut st = self.lock()?;
        let done = st.close_task(id, time, None)?;
        self.emit(&mut st, done);
        Ok(())
    }

    /// Opens a `Request Out` task at the component issuing the request.
    pub fn initiate_request(
        &self,
        parent_id: Option<&TaskId>,
        action: &str,
        source_location: &str,
        time: f64,
        details: Option<Details>,
    ) -> Result<TaskId> {
        let mut st = self.lock()?;
        st.open_task(parent_id.cloned(), REQUEST_OUT, action, source_location, time, details)
    }

    /// Opens the `Request In` child of an open `Request Out` at the
    /// receiving component.
    pub fn receive_request(
        &self,
        request_out_id: &TaskId,
        dest_location: &str,
        time: f64,
        details: Option<Details>,
    ) -> Result<TaskId> {
        let mut st = self.lock()?;
        let (action, source) = match st.open.get(request_out_id) {
            Some(o) if o.task.kind() == TaskKind::RequestOut => {
                if time < o.task.start {
                    return Err(Error::time_order(format!(
                        "request received at {time} before it was sent at {}",
                        o.task.start
                    )));
                }
                (o.task.action.clone(), o.task.location.clone())
            }
            _ => return Err(Error::UnknownId(request_out_id.to_string())),
        };
        if source == dest_location {
            return Err(Error::SameLocation(request_out_id.to_string(), source));
        }
        let id = st.open_task(
            Some(request_out_id.clone()),
            REQUEST_IN,
            &action,
            dest_location,
            time,
            details,
        )?;
        let parent = st.open.get_mut(request_out_id).expect("checked above");
        parent.open_children.push(id.clone());
        Ok(id)
    }

    pub fn complete_request(&self, request_in_id: &TaskId, time: f64) -> Result<()> {
        let mut st = self.lock()?;
        let done = st.close_task(request_in_id, time, Some(TaskKind::RequestIn))?;
        self.emit(&mut st, done);
        Ok(())
    }

    pub fn receive_response(&self, request_out_id: &TaskId, time: f64) -> Result<()> {
        let mut st = self.lock()?;
        let done = st.close_task(request_out_id, time, Some(TaskKind::RequestOut))?;
        self.emit(&mut st, done);
        Ok(())
    }

    /// Drains buffered records to the sink and waits until they are durable.
    /// Open tasks are kept.
    pub fn flush(&self) -> Result<FlushStats> {
        let mut st = self.state.lock().unwrap_or_else(|p| p.into_inner());
        let tx = self.tx.as_ref().ok_or(Error::SessionClosed)?;
        if !st.batch.is_empty() {
            let batch = std::mem::take(&mut st.batch);
            tx.send(Msg::Batch(batch)).map_err(writer_gone)?;
        }
        let (reply_tx, reply_rx) = bounded(1);
        tx.send(Msg::Flush(reply_tx)).map_err(writer_gone)?;
        drop(st);
        let report = reply_rx.recv().map_err(writer_gone)?;
        if let Some(e) = report.error {
            return Err(Error::Io(io::Error::other(format!(
                "trace sink failed ({} record(s) dropped): {e}",
                report.dropped
            ))));
        }
        Ok(FlushStats { records_written: report.written, dropped_count: report.dropped })
    }

    /// Rejects further task calls. Buffered records can still be flushed.
    pub fn close(&self) {
        self.state.lock().unwrap_or_else(|p| p.into_inner()).closed = true;
    }

    pub fn open_task_count(&self) -> usize {
        self.state.lock().unwrap_or_else(|p| p.into_inner()).open.len()
    }

    /// Closes the session, flushes, stops the writer and returns the sink.
    pub fn finish(mut self) -> Result<S> {
        self.close();
        self.flush()?;
        drop(self.tx.take());
        let handle = self.writer.take().expect("writer present until finish");
        handle.join().map_err(|_| Error::Io(io::Error::other("trace writer panicked")))
    }

    fn emit(&self, st: &mut State, task: Task) {
        st.batch.push(task);
        if st.batch.len() >= st.batch_size {
            let batch = std::mem::replace(&mut st.batch, Vec::with_capacity(st.batch_size));
            if let Some(tx) = &self.tx {
                // Blocks while the writer is behind.
                let _ = tx.send(Msg::Batch(batch));
            }
        }
    }
}

impl<S: TraceSink> Drop for Collector<S> {
    fn drop(&mut self) {
        if let Some(tx) = self.tx.take() {
            let batch = std::mem::take(&mut self.state.lock().unwrap_or_else(|p| p.into_inner()).batch);
            if !batch.is_empty() {
                let _ = tx.send(Msg::Batch(batch));
            }
            drop(tx);
        }
        if let Some(handle) = self.writer.take() {
            let _ = handle.join();
        }
    }
}

fn writer_gone<E>(_: E) -> Error {
    Error::Io(io::Error::other("trace writer thread has stopped"))
}

impl State {
    fn open_task(
        &mut self,
        parent_id: Option<TaskId>,
        category: &str,
        action: &str,
        location: &str,
        time: f64,
        details: Option<Details>,
    ) -> Result<TaskId> {
        if !time.is_finite() || time < 0.0 {
            return Err(Error::time_order(format!("start time {time} must be finite and >= 0")));
        }
        let id = loop {
            let id = self.ids.next_id()?;
            if !self.issued.contains(&id) {
                break id;
            }
            if matches!(self.ids, IdSource::Scripted(_)) {
                return Err(Error::Config(format!("scripted id `{id}` issued twice")));
            }
        };
        self.issued.insert(id.clone());
        let task = Task {
            id: id.clone(),
            parent_id,
            category: category.to_owned(),
            action: action.to_owned(),
            location: location.to_owned(),
            start: time,
            end: time,
            details: details.unwrap_or_default(),
        };
        self.open.insert(
            id.clone(),
            OpenTask { task, open_children: Vec::new(), latest_child_end: f64::NEG_INFINITY },
        );
        Ok(id)
    }

    fn close_task(&mut self, id: &TaskId, time: f64, expect: Option<TaskKind>) -> Result<Task> {
        let open = self.open.get(id).ok_or_else(|| Error::UnknownId(id.to_string()))?;
        if let Some(kind) = expect {
            if open.task.kind() != kind {
                return Err(Error::UnknownId(format!("{id} (open, but not a {kind:?})")));
            }
        }
        if !time.is_finite() || time < open.task.start {
            return Err(Error::time_order(format!(
                "end {time} precedes start {} of `{id}`",
                open.task.start
            )));
        }
        if self.strict && open.task.kind() == TaskKind::RequestOut {
            if let Some(child) = open.open_children.first() {
                return Err(Error::ChildOpen(id.to_string(), child.to_string()));
            }
            if time < open.latest_child_end {
                return Err(Error::time_order(format!(
                    "response at {time} precedes request in completion at {}",
                    open.latest_child_end
                )));
            }
        }

        let mut open = self.open.remove(id).expect("present");
        open.task.end = time;
        if open.task.kind() == TaskKind::RequestIn {
            if let Some(parent) = open.task.parent_id.as_ref().and_then(|p| self.open.get_mut(p)) {
                parent.open_children.retain(|c| c != id);
                parent.latest_child_end = parent.latest_child_end.max(time);
            }
        }
        Ok(open.task)
    }
}

/// Drives a strict-valid trace back through a fresh collector, reusing the
/// original ids, and returns the sink once everything is flushed.
pub fn replay<S: TraceSink>(tasks: &[Task], sink: S, mut options: CollectorOptions) -> Result<S> {
    let index: HashMap<&TaskId, usize> = tasks.iter().enumerate().map(|(i, t)| (&t.id, i)).collect();
    let mut depth = vec![usize::MAX; tasks.len()];
    for i in 0..tasks.len() {
        let mut chain = Vec::new();
        let mut cur = i;
        let mut base = 0;
        loop {
            if depth[cur] != usize::MAX {
                base = depth[cur] + 1;
                break;
            }
            chain.push(cur);
            if chain.len() > tasks.len() {
                return Err(Error::Cycle(tasks[i].id.to_string()));
            }
            match tasks[cur].parent_id.as_ref().and_then(|p| index.get(p)) {
                Some(&p) => cur = p,
                None => break,
            }
        }
        for (k, &node) in chain.iter().rev().enumerate() {
            depth[node] = base + k;
        }
    }

    // (time, phase, depth key, idx): opens before closes at equal times,
    // parents open before children and children close before parents.
    let mut events: Vec<(f64, u8, i64, usize)> = Vec::with_capacity(tasks.len() * 2);
    for (i, t) in tasks.iter().enumerate() {
        events.push((t.start, 0, depth[i] as i64, i));
        events.push((t.end, 1, -(depth[i] as i64), i));
    }
    events.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then_with(|| tasks[a.3].id.cmp(&tasks[b.3].id))
    });

    let ids = events.iter().filter(|e| e.1 == 0).map(|e| tasks[e.3].id.clone());
    options.seed = None;
    let collector = Collector::with_ids(sink, options, IdSource::scripted(ids.collect::<Vec<_>>()));
    for &(_, phase, _, i) in &events {
        let t = &tasks[i];
        let details = (!t.details.is_empty()).then(|| t.details.clone());
        match (phase, t.kind()) {
            (0, TaskKind::RequestOut) => {
                collector.initiate_request(t.parent_id.as_ref(), &t.action, &t.location, t.start, details)?;
            }
            (0, TaskKind::RequestIn) => {
                let parent = t.parent_id.as_ref().ok_or_else(|| Error::UnknownId(t.id.to_string()))?;
                collector.receive_request(parent, &t.location, t.start, details)?;
            }
            (0, TaskKind::Other) => {
                collector.begin_task(t.parent_id.as_ref(), &t.category, &t.action, &t.location, t.start, details)?;
            }
            (_, TaskKind::RequestOut) => collector.receive_response(&t.id, t.end)?,
            (_, TaskKind::RequestIn) => collector.complete_request(&t.id, t.end)?,
            (_, TaskKind::Other) => collector.end_task(&t.id, t.end)?,
        }
    }
    collector.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session() -> (Collector<MemorySink>, MemorySink) {
        let sink = MemorySink::new();
        let opts = CollectorOptions { seed: Some(7), ..Default::default() };
        (Collector::new(sink.clone(), opts), sink)
    }

    #[test]
    fn begin_and_end() {
        let (c, sink) = session();
        let k = c.begin_task(None, "Kernel", "Run", "GPU1.CommandProcessor", 0.0, None).unwrap();
        assert!(k.as_str().len() >= 6 && k.as_str().chars().all(|ch| ch.is_ascii_alphanumeric()));
        let wg = c.begin_task(Some(&k), "Work-Group", "Exec", "GPU1.CU01", 1e-6, None).unwrap();
        c.end_task(&wg, 2e-6).unwrap();
        let stats = c.flush().unwrap();
        assert_eq!(stats.records_written, 1);
        let tasks = sink.tasks();
        assert_eq!(tasks[0].parent_id.as_ref(), Some(&k));
        assert_eq!((tasks[0].start, tasks[0].end), (1e-6, 2e-6));
        assert_eq!(c.open_task_count(), 1);
    }

    #[test]
    fn end_task_errors() {
        let (c, _) = session();
        assert!(matches!(c.end_task(&"nope".into(), 1.0), Err(Error::UnknownId(_))));
        let t = c.begin_task(None, "K", "R", "L", 2.0, None).unwrap();
        assert!(matches!(c.end_task(&t, 1.0), Err(Error::TimeOrder(_))));
        c.end_task(&t, 2.0).unwrap();
        assert!(matches!(c.end_task(&t, 3.0), Err(Error::UnknownId(_))));
    }

    #[test]
    fn closed_session_rejects_calls() {
        let (c, _) = session();
        c.close();
        assert!(matches!(
            c.begin_task(None, "K", "R", "L", 0.0, None),
            Err(Error::SessionClosed)
        ));
        assert!(matches!(c.initiate_request(None, "R", "L", 0.0, None), Err(Error::SessionClosed)));
    }

    #[test]
    fn request_quartet() {
        let (c, sink) = session();
        let ro = c.initiate_request(None, "Read Memory", "CU0", 0.0, None).unwrap();
        let ri = c.receive_request(&ro, "L1_0", 2.0, None).unwrap();
        c.complete_request(&ri, 8.0).unwrap();
        c.receive_response(&ro, 10.0).unwrap();
        c.flush().unwrap();
        let tasks = sink.tasks();
        assert_eq!(tasks.len(), 2);
        assert_eq!(tasks[0].category, REQUEST_IN);
        assert_eq!((tasks[0].start, tasks[0].end), (2.0, 8.0));
        assert_eq!(tasks[0].parent_id.as_ref(), Some(&ro));
        assert_eq!(tasks[0].action, "Read Memory");
        assert_eq!(tasks[1].category, REQUEST_OUT);
        assert_eq!((tasks[1].start, tasks[1].end), (0.0, 10.0));
        assert!(crate::model::validate_trace(&tasks, true).is_clean());
    }

    #[test]
    fn request_errors() {
        let (c, _) = session();
        let ro = c.initiate_request(None, "Read Memory", "CU0", 1.0, None).unwrap();
        assert!(matches!(c.receive_request(&ro, "CU0", 2.0, None), Err(Error::SameLocation(..))));
        assert!(matches!(c.receive_request(&ro, "L1_0", 0.5, None), Err(Error::TimeOrder(_))));
        assert!(matches!(c.receive_request(&"zz".into(), "L1_0", 2.0, None), Err(Error::UnknownId(_))));

        let ri = c.receive_request(&ro, "L1_0", 2.0, None).unwrap();
        assert!(matches!(c.receive_response(&ro, 9.0), Err(Error::ChildOpen(..))));
        c.complete_request(&ri, 8.0).unwrap();
        assert!(matches!(c.complete_request(&ri, 8.0), Err(Error::UnknownId(_))));
        assert!(matches!(c.receive_response(&ro, 7.0), Err(Error::TimeOrder(_))));
        c.receive_response(&ro, 8.0).unwrap();
    }

    #[test]
    fn zero_duration_request_in() {
        let (c, _) = session();
        let ro = c.initiate_request(None, "Read Memory", "CU0", 1.0, None).unwrap();
        let ri = c.receive_request(&ro, "L1_0", 3.0, None).unwrap();
        c.complete_request(&ri, 3.0).unwrap();
        c.receive_response(&ro, 3.0).unwrap();
    }

    #[test]
    fn distinct_ids_at_same_time() {
        let (c, _) = session();
        let a = c.initiate_request(None, "Read Memory", "CU0", 5.0, None).unwrap();
        let b = c.initiate_request(None, "Read Memory", "CU0", 5.0, None).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn flush_is_idempotent_and_keeps_open_tasks() {
        let (c, sink) = session();
        let root = c.begin_task(None, "K", "R", "L", 0.0, None).unwrap();
        for i in 0..3 {
            let t = c.begin_task(Some(&root), "X", "Y", "L", i as f64, None).unwrap();
            c.end_task(&t, i as f64 + 0.5).unwrap();
        }
        assert_eq!(c.flush().unwrap().records_written, 3);
        assert_eq!(c.flush().unwrap().records_written, 0);
        assert_eq!(sink.tasks().len(), 3);
        assert_eq!(c.open_task_count(), 1);
    }

    #[test]
    fn small_batches_and_finish() {
        let sink = MemorySink::new();
        let c = Collector::new(
            sink.clone(),
            CollectorOptions { batch_size: 2, queue_depth: 1, seed: Some(1), ..Default::default() },
        );
        for i in 0..11 {
            let t = c.begin_task(None, "K", "R", "L", i as f64, None).unwrap();
            c.end_task(&t, i as f64).unwrap();
        }
        let sink = c.finish().unwrap();
        assert_eq!(sink.tasks().len(), 11);
    }

    #[test]
    fn sink_failure_surfaces_as_io() {
        struct Broken;
        impl TraceSink for Broken {
            fn write_batch(&mut self, _: &[Task]) -> io::Result<()> {
                Err(io::Error::other("disk full"))
            }
            fn sync(&mut self) -> io::Result<()> {
                Ok(())
            }
        }
        let c = Collector::new(Broken, CollectorOptions { seed: Some(1), ..Default::default() });
        let t = c.begin_task(None, "K", "R", "L", 0.0, None).unwrap();
        c.end_task(&t, 1.0).unwrap();
        let err = c.flush().unwrap_err();
        assert_eq!(err.code(), "E_IO");
        assert!(err.to_string().contains("disk full"));
    }

    #[test]
    fn seeded_sessions_repeat() {
        let run = || {
            let (c, sink) = session();
            let r = c.begin_task(None, "K", "R", "L", 0.0, None).unwrap();
            let x = c.initiate_request(Some(&r), "Read Memory", "CU0", 0.5, None).unwrap();
            c.receive_response(&x, 0.7).unwrap();
            c.end_task(&r, 1.0).unwrap();
            c.finish().unwrap();
            sink.tasks().iter().map(jsonl::to_line).collect::<Vec<_>>().join("\n")
        };
        assert_eq!(run(), run());
    }
}
