//! Request handling behind the HTTP endpoints.
//!
//! Every handler is a pure function of the store and the query parameters,
//! so the HTTP layer only routes and serializes. Unknown parameters are
//! ignored, which lets clients attach a `gen` token for stale-response
//! detection.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::color::{build_color_key, ColorKeyMap, DEFAULT_MAX_COLORS};
use crate::error::{Error, Result};
use crate::layout::{layout_window, Culling, LayoutBar, Viewport, DEFAULT_MIN_PX};
use crate::metrics::{compute_series, Expectations, MetricKind, MetricSeries};
use crate::model::Task;
use crate::store::{ComponentInfo, TraceMeta, TraceStore};
use crate::svg::{render_svg, ViewKind, ViewSpec, DEFAULT_BINS, DEFAULT_PAGE_SIZE};

pub type Params = BTreeMap<String, String>;

/// Query parameter echoed back so clients can drop stale responses.
pub const GEN_PARAM: &str = "gen";
/// Response header carrying the echoed token.
pub const GEN_HEADER: &str = "x-daisen-gen";
/// Pixel width assumed when a layout request does not say.
pub const DEFAULT_VIEW_PX: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    pub http_status: u16,
}

pub fn http_status(err: &Error) -> u16 {
    match err {
        Error::UnknownId(_) => 404,
        Error::Io(_) | Error::Bind(_) => 500,
        _ => 400,
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError { code: e.code().to_owned(), message: e.to_string(), http_status: http_status(&e) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentPage {
    pub total: usize,
    pub page: usize,
    pub page_size: usize,
    pub items: Vec<ComponentInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReply {
    #[serde(flatten)]
    pub series: MetricSeries,
    /// Anticipated value from the expectations file, if any matches.
    pub peak_reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TasksLayout {
    pub component: String,
    pub t0: f64,
    pub t1: f64,
    pub bars: Vec<LayoutBar>,
    pub level_heights: Vec<f64>,
    pub color_key: ColorKeyMap,
}

fn param<'a>(p: &'a Params, key: &str) -> Option<&'a str> {
    p.get(key).map(String::as_str).filter(|v| !v.is_empty())
}

fn parse<T: std::str::FromStr>(p: &Params, key: &str) -> Result<Option<T>> {
    param(p, key)
        .map(|v| v.parse::<T>().map_err(|_| Error::BadRequest(format!("cannot parse `{key}` value `{v}`"))))
        .transpose()
}

fn required<'a>(p: &'a Params, key: &str) -> Result<&'a str> {
    param(p, key).ok_or_else(|| Error::BadRequest(format!("missing parameter `{key}`")))
}

/// Read-only query façade over one published store.
pub struct Api {
    store: Arc<TraceStore>,
    colors: ColorKeyMap,
    expectations: Expectations,
}

impl Api {
    pub fn new(store: Arc<TraceStore>, expectations: Expectations) -> Self {
        let colors = build_color_key(store.tasks(), DEFAULT_MAX_COLORS);
        Api { store, colors, expectations }
    }

    pub fn store(&self) -> &TraceStore {
        &self.store
    }

    pub fn colors(&self) -> &ColorKeyMap {
        &self.colors
    }

    pub fn expectations(&self) -> &Expectations {
        &self.expectations
    }

    /// The full trace extent, widened to a unit interval when degenerate.
    pub fn default_window(&self) -> (f64, f64) {
        let m = self.store.meta();
        if m.time_max > m.time_min {
            (m.time_min, m.time_max)
        } else {
            (m.time_min, m.time_min + 1.0)
        }
    }

    fn window(&self, p: &Params, start: &str, end: &str) -> Result<(f64, f64)> {
        let (d0, d1) = self.default_window();
        let t0 = parse(p, start)?.unwrap_or(d0);
        let t1 = parse(p, end)?.unwrap_or(d1);
        Viewport::new(t0, t1)?;
        Ok((t0, t1))
    }

    pub fn meta(&self) -> TraceMeta {
        self.store.meta().clone()
    }

    pub fn components(&self, p: &Params) -> Result<ComponentPage> {
        let page = parse(p, "page")?.unwrap_or(0);
        let page_size = parse(p, "page_size")?.unwrap_or(DEFAULT_PAGE_SIZE);
        let (total, items) = self.store.list_components(param(p, "filter").unwrap_or(""), page, page_size)?;
        Ok(ComponentPage { total, page, page_size, items })
    }

    /// One series, or two when `metric2` is given.
    pub fn metrics(&self, p: &Params) -> Result<Vec<SeriesReply>> {
        let component = self.store.resolve_component(required(p, "component")?)?;
        let (t0, t1) = self.window(p, "start", "end")?;
        let bins = parse(p, "bins")?.unwrap_or(DEFAULT_BINS);
        let mut metrics = vec![parse(p, "metric")?.unwrap_or(MetricKind::ConcurrentTasks)];
        metrics.extend(parse::<MetricKind>(p, "metric2")?);
        metrics
            .into_iter()
            .map(|m| {
                Ok(SeriesReply {
                    series: compute_series(&self.store, component, m, t0, t1, bins)?,
                    peak_reference: self.expectations.for_series(component, m),
                })
            })
            .collect()
    }

    pub fn tasks_layout(&self, p: &Params) -> Result<TasksLayout> {
        let component = self.store.resolve_component(required(p, "component")?)?;
        let (t0, t1) = self.window(p, "start", "end")?;
        let min_px = parse(p, "min_px")?.unwrap_or(DEFAULT_MIN_PX);
        let px_per_second = parse(p, "px_per_s")?.unwrap_or(DEFAULT_VIEW_PX / (t1 - t0));
        if !(min_px >= 0.0 && px_per_second > 0.0 && px_per_second.is_finite()) {
            return Err(Error::BadRange("min_px must be >= 0 and px_per_s > 0".into()));
        }
        let layout = layout_window(&self.store, component, Viewport::new(t0, t1)?, Culling { min_px, px_per_second }, &self.colors)?;
        Ok(TasksLayout {
            component: component.to_owned(),
            t0,
            t1,
            bars: layout.bars,
            level_heights: layout.level_heights,
            color_key: self.colors.clone(),
        })
    }

    pub fn task(&self, id: &str) -> Result<Task> {
        self.store.get_task(id).cloned()
    }

    pub fn children(&self, id: &str) -> Result<Vec<Task>> {
        Ok(self.store.children(id)?.into_iter().cloned().collect())
    }

    /// The task itself followed by its ancestors up to the root.
    pub fn parents(&self, id: &str) -> Result<Vec<Task>> {
        Ok(self.store.parent_chain(id)?.into_iter().cloned().collect())
    }

    /// Builds a scene from query parameters named like the [`ViewSpec`]
    /// fields. A task view defaults to the extent of the task's parent.
    pub fn view_spec(&self, p: &Params) -> Result<ViewSpec> {
        let kind = parse(p, "kind")?.unwrap_or(ViewKind::Overview);
        let task_id = param(p, "task_id").map(str::to_owned);
        let (d0, d1) = match (&kind, &task_id) {
            (ViewKind::Task, Some(id)) => {
                let t = self.store.get_task(id)?;
                let outer = t.parent_id.as_ref().and_then(|p| self.store.get_task(p.as_str()).ok()).unwrap_or(t);
                if outer.end > outer.start { (outer.start, outer.end) } else { self.default_window() }
            }
            _ => self.default_window(),
        };
        let mut spec = ViewSpec::new(kind, parse(p, "t0")?.unwrap_or(d0), parse(p, "t1")?.unwrap_or(d1));
        spec.component = param(p, "component").map(str::to_owned);
        spec.task_id = task_id;
        spec.metric_primary = parse(p, "metric_primary")?;
        spec.metric_secondary = parse(p, "metric_secondary")?;
        spec.filter = param(p, "filter").map(str::to_owned);
        if let Some(v) = parse(p, "bins")? {
            spec.bins = v;
        }
        if let Some(v) = parse(p, "width_px")? {
            spec.width_px = v;
        }
        if let Some(v) = parse(p, "height_px")? {
            spec.height_px = v;
        }
        if let Some(v) = parse(p, "page")? {
            spec.page = v;
        }
        if let Some(v) = parse(p, "page_size")? {
            spec.page_size = v;
        }
        if let Some(v) = parse(p, "min_px")? {
            spec.min_px = v;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn render(&self, spec: &ViewSpec) -> Result<String> {
        render_svg(&self.store, &self.colors, &self.expectations, spec)
    }
}
