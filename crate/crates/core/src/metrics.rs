//! Component-agnostic metrics binned over a time window.
//!
//! Bin `k` of a window `[t0, t1)` split into `n` bins covers
//! `[t0 + k·w, t0 + (k+1)·w)` with `w = (t1 - t0) / n`; the last edge is
//! pinned to `t1` exactly.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{Task, TaskKind};
use crate::store::TraceStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    /// Request In arrivals per second.
    ReqInRate,
    /// Request In completions per second.
    ReqCompleteRate,
    /// Mean duration of Request In tasks completing in the bin, seconds.
    AvgReqLatency,
    /// Time-averaged number of tasks in flight.
    ConcurrentTasks,
    /// Time-averaged number of in-flight Request In tasks.
    BufferPressure,
    /// Time-averaged number of in-flight Request Out tasks.
    PendingReqOut,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::ReqInRate,
        MetricKind::ReqCompleteRate,
        MetricKind::AvgReqLatency,
        MetricKind::ConcurrentTasks,
        MetricKind::BufferPressure,
        MetricKind::PendingReqOut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::ReqInRate => "ReqInRate",
            MetricKind::ReqCompleteRate => "ReqCompleteRate",
            MetricKind::AvgReqLatency => "AvgReqLatency",
            MetricKind::ConcurrentTasks => "ConcurrentTasks",
            MetricKind::BufferPressure => "BufferPressure",
            MetricKind::PendingReqOut => "PendingReqOut",
        }
    }

    pub fn is_occupancy(self) -> bool {
        matches!(self, MetricKind::ConcurrentTasks | MetricKind::BufferPressure | MetricKind::PendingReqOut)
    }

    pub fn unit(self) -> &'static str {
        match self {
            MetricKind::ReqInRate | MetricKind::ReqCompleteRate => "1/s",
            MetricKind::AvgReqLatency => "s",
            _ => "",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name().to_ascii_lowercase() == norm)
            .ok_or_else(|| Error::BadRequest(format!("unknown metric `{s}`")))
    }
}

/// Uniform partition of `[t0, t1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bins {
    pub t0: f64,
    pub t1: f64,
    pub count: usize,
}

impl Bins {
    pub fn new(t0: f64, t1: f64, count: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t0 >= t1 {
            return Err(Error::BadRange(format!("need t0 < t1, got [{t0}, {t1})")));
        }
        if count == 0 {
            return Err(Error::BadRange("bins must be at least 1".into()));
        }
        Ok(Bins { t0, t1, count })
    }

    pub fn edge(&self, k: usize) -> f64 {
        if k >= self.count {
            self.t1
        } else {
            self.t0 + k as f64 * ((self.t1 - self.t0) / self.count as f64)
        }
    }

    pub fn width(&self, k: usize) -> f64 {
        self.edge(k + 1) - self.edge(k)
    }

    /// Bin containing `t`, if `t` lies in `[t0, t1)`.
    pub fn bin_of(&self, t: f64) -> Option<usize> {
        if !(t >= self.t0 && t < self.t1) {
            return None;
        }
        let w = (self.t1 - self.t0) / self.count as f64;
        let mut k = (((t - self.t0) / w).floor() as usize).min(self.count - 1);
        while k > 0 && t < self.edge(k) {
            k -= 1;
        }
        while k + 1 < self.count && t >= self.edge(k + 1) {
            k += 1;
        }
        Some(k)
    }

    /// Adds the overlap of `[start, end)` with every bin to `acc`.
    fn accumulate_overlap(&self, start: f64, end: f64, acc: &mut [f64]) {
        let s = start.max(self.t0);
        let e = end.min(self.t1);
        if e <= s {
            return;
        }
        let mut k = self.bin_of(s).expect("clipped start is inside the window");
        while k < self.count && self.edge(k) < e {
            let lo = s.max(self.edge(k));
            let hi = e.min(self.edge(k + 1));
            if hi > lo {
                acc[k] += hi - lo;
            }
            k += 1;
        }
    }
}

/// Σ |[start, end) ∩ [a, b)| / (b - a).
pub fn time_average_count<I>(intervals: I, a: f64, b: f64) -> Result<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(Error::BadRange(format!("need a < b, got [{a}, {b})")));
    }
    let covered: f64 = intervals
        .into_iter()
        .map(|(s, e)| (e.min(b) - s.max(a)).max(0.0))
        .sum();
    Ok(covered / (b - a))
}

/// Time-averaged count per bin for a set of intervals.
pub fn occupancy<I>(intervals: I, bins: &Bins) -> Vec<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut acc = vec![0.0; bins.count];
    for (s, e) in intervals {
        bins.accumulate_overlap(s, e, &mut acc);
    }
    for (k, v) in acc.iter_mut().enumerate() {
        *v /= bins.width(k);
    }
    acc
}

/// Maximum number of simultaneously open half-open intervals.
pub fn peak_concurrency<I>(intervals: I) -> usize
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut events: Vec<(f64, i32)> = Vec::new();
    for (s, e) in intervals {
        if e > s {
            events.push((s, 1));
            events.push((e, -1));
        }
    }
    // Ends sort before starts at equal times.
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (mut cur, mut peak) = (0i64, 0i64);
    for (_, d) in events {
        cur += d as i64;
        peak = peak.max(cur);
    }
    peak as usize
}

fn nan_as_null<S: Serializer>(values: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|v| if v.is_finite() { Some(*v) } else { None }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries {
    pub component: String,
    pub metric: MetricKind,
    pub t0: f64,
    pub t1: f64,
    pub bins: usize,
    /// `null` in JSON where undefined.
    #[serde(serialize_with = "nan_as_null")]
    pub values: Vec<f64>,
}

impl MetricSeries {
    /// Bin-width weighted mean over defined values.
    pub fn weighted_mean(&self) -> f64 {
        let bins = Bins { t0: self.t0, t1: self.t1, count: self.bins };
        let (mut num, mut den) = (0.0, 0.0);
        for (k, v) in self.values.iter().enumerate() {
            if v.is_finite() {
                num += v * bins.width(k);
                den += bins.width(k);
            }
        }
        if den > 0.0 { num / den } else { f64::NAN }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(f64::NAN, f64::max)
    }
}

/// Computes one metric over tasks that all live at `component`.
pub fn series_from_tasks<'a, I>(component: &str, metric: MetricKind, tasks: I, bins: &Bins) -> MetricSeries
where
    I: IntoIterator<Item = &'a Task>,
{
    let tasks = tasks.into_iter();
    let values = match metric {
        MetricKind::ConcurrentTasks => occupancy(tasks.map(|t| (t.start, t.end)), bins),
        MetricKind::BufferPressure => occupancy(
            tasks.filter(|t| t.kind() == TaskKind::RequestIn).map(|t| (t.start, t.end)),
            bins,
        ),
        MetricKind::PendingReqOut => occupancy(
            tasks.filter(|t| t.kind() == TaskKind::RequestOut).map(|t| (t.start, t.end)),
            bins,
        ),
        MetricKind::ReqInRate | MetricKind::ReqCompleteRate => {
            let mut counts = vec![0.0; bins.count];
            for t in tasks.filter(|t| t.kind() == TaskKind::RequestIn) {
                let at = if metric == MetricKind::ReqInRate { t.start } else { t.end };
                if let Some(k) = bins.bin_of(at) {
                    counts[k] += 1.0;
                }
            }
            counts.iter().enumerate().map(|(k, c)| c / bins.width(k)).collect()
        }
        MetricKind::AvgReqLatency => {
            let mut sum = vec![0.0; bins.count];
            let mut n = vec![0u64; bins.count];
            for t in tasks.filter(|t| t.kind() == TaskKind::RequestIn) {
                if let Some(k) = bins.bin_of(t.end) {
                    sum[k] += t.end - t.start;
                    n[k] += 1;
                }
            }
            sum.iter().zip(&n).map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 }).collect()
        }
    };
    MetricSeries { component: component.to_owned(), metric, t0: bins.t0, t1: bins.t1, bins: bins.count, values }
}

/// Binned metric for one component of a store. Unknown components give an
/// all-zero (or all-NaN for latency) series.
pub fn compute_series(
    store: &TraceStore,
    component: &str,
    metric: MetricKind,
    t0: f64,
    t1: f64,
    bins: usize,
) -> Result<MetricSeries> {
    let bins = Bins::new(t0, t1, bins)?;
    // Widened on the left so tasks ending exactly at t0 are seen by the
    // completion-based metrics.
    let tasks = store.query_window(component, t0 - store.bucket_width(), t1)?;
    Ok(series_from_tasks(component, metric, tasks, &bins))
}

/// Anticipated values users compare metrics against, loaded from a TOML
/// table of `"pattern" = value` pairs. Patterns are regular expressions
/// matched against a hint such as `"GPU1.CU00.SIMD0:ConcurrentTasks"`.
#[derive(Debug, Clone, Default)]
pub struct Expectations {
    entries: Vec<(String, Regex, f64)>,
}

impl Expectations {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut entries = Vec::new();
        for (key, value) in table {
            let v = match value {
                toml::Value::Float(f) => f,
                toml::Value::Integer(i) => i as f64,
                other => return Err(Error::Config(format!("expectation `{key}` must be a number, got {other}"))),
            };
            let re = Regex::new(&key)?;
            entries.push((key, re, v));
        }
        // Longest pattern first so specific rules win; ties by text.
        entries.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(Expectations { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact key match first, otherwise the most specific matching pattern.
    pub fn peak_reference(&self, hint: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == hint)
            .or_else(|| self.entries.iter().find(|(_, re, _)| re.is_match(hint)))
            .map(|(_, _, v)| *v)
    }

    pub fn for_series(&self, component: &str, metric: MetricKind) -> Option<f64> {
        self.peak_reference(&format!("{component}:{metric}"))
    }
}
