//! Deterministic SVG export of the overview, component and task views.
//!
//! Identical inputs produce identical bytes: elements are written in layout
//! order and every coordinate is printed with three fractional digits.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::color::{ColorKeyMap, Rgb};
use crate::error::{Error, Result};
use crate::layout::{layout_task_view, layout_window, Culling, LayoutBar, Viewport, DEFAULT_MIN_PX};
use crate::metrics::{compute_series, Expectations, MetricKind, MetricSeries};
use crate::store::TraceStore;

pub const DEFAULT_BINS: usize = 100;
pub const DEFAULT_WIDTH_PX: u32 = 960;
pub const DEFAULT_HEIGHT_PX: u32 = 540;
pub const DEFAULT_PAGE_SIZE: usize = 16;

const PAD: f64 = 10.0;
const TITLE_H: f64 = 24.0;
const AXIS_H: f64 = 36.0;
const LEGEND_W: f64 = 270.0;
const LEGEND_ROW: f64 = 16.0;
const FALLBACK_FILL: Rgb = Rgb(0x99, 0x99, 0x99);
const PRIMARY_STROKE: &str = "#1f77b4";
const SECONDARY_STROKE: &str = "#ff7f0e";
const REFERENCE_STROKE: &str = "#d62728";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewKind {
    Overview,
    Component,
    Task,
}

impl ViewKind {
    pub fn name(self) -> &'static str {
        match self {
            ViewKind::Overview => "overview",
            ViewKind::Component => "component",
            ViewKind::Task => "task",
        }
    }
}

impl FromStr for ViewKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overview" => Ok(ViewKind::Overview),
            "component" => Ok(ViewKind::Component),
            "task" => Ok(ViewKind::Task),
            _ => Err(Error::BadRequest(format!("unknown view kind `{s}`"))),
        }
    }
}

/// Everything needed to reproduce one scene.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewSpec {
    pub kind: ViewKind,
    pub component: Option<String>,
    pub task_id: Option<String>,
    pub t0: f64,
    pub t1: f64,
    pub metric_primary: Option<MetricKind>,
    pub metric_secondary: Option<MetricKind>,
    pub bins: usize,
    pub width_px: u32,
    pub height_px: u32,
    pub filter: Option<String>,
    pub page: usize,
    pub page_size: usize,
    pub min_px: f64,
}

impl ViewSpec {
    pub fn new(kind: ViewKind, t0: f64, t1: f64) -> Self {
        ViewSpec {
            kind,
            component: None,
            task_id: None,
            t0,
            t1,
            metric_primary: None,
            metric_secondary: None,
            bins: DEFAULT_BINS,
            width_px: DEFAULT_WIDTH_PX,
            height_px: DEFAULT_HEIGHT_PX,
            filter: None,
            page: 0,
            page_size: DEFAULT_PAGE_SIZE,
            min_px: DEFAULT_MIN_PX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Viewport::new(self.t0, self.t1)?;
        match self.kind {
            ViewKind::Component if self.component.is_none() => {
                Err(Error::BadRequest("component view needs `component`".into()))
            }
            ViewKind::Task if self.task_id.is_none() => Err(Error::BadRequest("task view needs `task_id`".into())),
            _ if self.bins == 0 || self.page_size == 0 => {
                Err(Error::BadRange("bins and page_size must be at least 1".into()))
            }
            _ if self.width_px == 0 || self.height_px == 0 => Err(Error::BadRange("canvas must not be empty".into())),
            _ if self.min_px.is_nan() || self.min_px < 0.0 => Err(Error::BadRange("min_px must be non-negative".into())),
            _ => Ok(()),
        }
    }
}

pub fn render_svg(store: &TraceStore, colors: &ColorKeyMap, expectations: &Expectations, spec: &ViewSpec) -> Result<String> {
    spec.validate()?;
    match spec.kind {
        ViewKind::Component => render_component(store, colors, spec),
        ViewKind::Task => render_task(store, colors, spec),
        ViewKind::Overview => render_overview(store, expectations, spec),
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Rect {
    fn checked(self) -> Result<Self> {
        if self.w > 0.0 && self.h > 0.0 {
            Ok(self)
        } else {
            Err(Error::BadRange("canvas too small for this view".into()))
        }
    }
}

/// Fixed three-digit formatting without a negative zero.
fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" { "0.000".into() } else { s }
}

fn short(x: f64) -> String {
    if x != 0.0 && (x.abs() >= 1e4 || x.abs() < 1e-2) {
        return format!("{x:.2e}");
    }
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn time_unit(span: f64) -> (f64, &'static str) {
    if span >= 1.0 {
        (1.0, "s")
    } else if span >= 1e-3 {
        (1e-3, "ms")
    } else if span >= 1e-6 {
        (1e-6, "us")
    } else {
        (1e-9, "ns")
    }
}

fn time_label(t: f64, span: f64) -> String {
    let (scale, unit) = time_unit(span);
    let s = format!("{:.3}", t / scale);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    let s = if s == "-0" { "0" } else { s };
    format!("{s}{unit}")
}

/// Round tick positions covering `[t0, t1]`, about `target` of them.
fn ticks(t0: f64, t1: f64, target: usize) -> Vec<f64> {
    let raw = (t1 - t0) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (t0 / step).ceil();
    (0..)
        .map(|k| (first + k as f64) * step)
        .take_while(|v| *v <= t1 + step * 1e-9)
        .take(64)
        .collect()
}

struct Doc {
    out: String,
}

impl Doc {
    fn new(width: u32, height: u32, title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, "<title>{}</title>", esc(title));
        let _ = writeln!(out, r##"<rect class="background" x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>"##);
        let _ = writeln!(out, r##"<text class="view-title" x="{}" y="{}" font-size="13" fill="#202020">{}</text>"##, num(PAD), num(16.0), esc(title));
        Doc { out }
    }

    fn line(&mut self, s: std::fmt::Arguments<'_>) {
        let _ = self.out.write_fmt(s);
        self.out.push('\n');
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }

    fn time_axis(&mut self, plot: Rect, t0: f64, t1: f64) {
        let y = plot.y + plot.h;
        let pps = plot.w / (t1 - t0);
        self.line(format_args!(r#"<g class="axis">"#));
        self.line(format_args!(
            r##"<line class="axis-line" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#202020"/>"##,
            num(plot.x),
            num(y),
            num(plot.x + plot.w),
            num(y)
        ));
        let target = ((plot.w / 100.0) as usize).clamp(2, 12);
        for t in ticks(t0, t1, target) {
            let x = plot.x + (t - t0) * pps;
            self.line(format_args!(
                r##"<line class="tick" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#202020"/>"##,
                num(x),
                num(y),
                num(x),
                num(y + 5.0)
            ));
            self.line(format_args!(
                r##"<text class="tick-label" x="{}" y="{}" text-anchor="middle" fill="#202020">{}</text>"##,
                num(x),
                num(y + 18.0),
                esc(&time_label(t, t1 - t0))
            ));
        }
        self.line(format_args!("</g>"));
    }

    fn legend<'a>(&mut self, x: f64, y: f64, colors: &ColorKeyMap, used: impl IntoIterator<Item = &'a str>) {
        let used: BTreeSet<&str> = used.into_iter().collect();
        self.line(format_args!(r#"<g class="legend">"#));
        self.line(format_args!(r##"<text class="legend-title" x="{}" y="{}" fill="#202020">Legend</text>"##, num(x), num(y + 11.0)));
        let mut row = 1.0;
        for key in colors.keys.iter().filter(|k| used.contains(k.as_str())) {
            let ry = y + row * LEGEND_ROW;
            let fill = colors.color_of(key).unwrap_or(FALLBACK_FILL);
            self.line(format_args!(
                r##"<rect class="legend-swatch" x="{}" y="{}" width="12" height="12" fill="{}" stroke="#202020" stroke-width="0.5"/>"##,
                num(x),
                num(ry),
                fill.hex()
            ));
            self.line(format_args!(
                r##"<text class="legend-key" x="{}" y="{}" fill="#202020">{}</text>"##,
                num(x + 18.0),
                num(ry + 10.0),
                esc(key)
            ));
            row += 1.0;
        }
        self.line(format_args!("</g>"));
    }

    fn bar(&mut self, b: &LayoutBar, region: Rect, t0: f64, pps: f64, colors: &ColorKeyMap) {
        let fill = colors.color_of(&b.color_key).unwrap_or(FALLBACK_FILL);
        self.line(format_args!(
            r##"<rect class="task" data-id="{}" data-level="{}" x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="#202020" stroke-width="0.5"/>"##,
            esc(b.task_id.as_str()),
            b.level,
            num(region.x + (b.x0 - t0) * pps),
            num(region.y + b.y * region.h),
            num((b.x1 - b.x0) * pps),
            num(b.h * region.h),
            fill.hex()
        ));
    }
}

fn main_plot(spec: &ViewSpec) -> Result<Rect> {
    let legend = LEGEND_W.min(spec.width_px as f64 * 0.3);
    Rect {
        x: PAD,
        y: TITLE_H + PAD,
        w: spec.width_px as f64 - 2.0 * PAD - legend,
        h: spec.height_px as f64 - TITLE_H - PAD - AXIS_H,
    }
    .checked()
}

fn render_component(store: &TraceStore, colors: &ColorKeyMap, spec: &ViewSpec) -> Result<String> {
    let name = store.resolve_component(spec.component.as_deref().unwrap_or_default())?.to_owned();
    let plot = main_plot(spec)?;
    let viewport = Viewport::new(spec.t0, spec.t1)?;
    let pps = plot.w / (spec.t1 - spec.t0);
    let layout = layout_window(store, &name, viewport, Culling { min_px: spec.min_px, px_per_second: pps }, colors)?;

    let mut doc = Doc::new(spec.width_px, spec.height_px, &format!("Component: {name}"));
    doc.line(format_args!(
        r##"<text class="watermark" x="{}" y="{}" font-size="28" fill="#000000" fill-opacity="0.12">{}</text>"##,
        num(plot.x + 6.0),
        num(plot.y + 30.0),
        esc(&name)
    ));
    doc.line(format_args!(r#"<g class="bars" data-count="{}">"#, layout.bars.len()));
    for b in &layout.bars {
        doc.bar(b, plot, spec.t0, pps, colors);
    }
    doc.line(format_args!("</g>"));
    doc.time_axis(plot, spec.t0, spec.t1);
    doc.legend(plot.x + plot.w + PAD, plot.y, colors, layout.bars.iter().map(|b| b.color_key.as_str()));
    Ok(doc.finish())
}

fn render_task(store: &TraceStore, colors: &ColorKeyMap, spec: &ViewSpec) -> Result<String> {
    let id = spec.task_id.as_deref().unwrap_or_default();
    let current = store.get_task(id)?;
    let parent = current.parent_id.as_ref().and_then(|p| store.get_task(p.as_str()).ok());
    let children = store.children(id)?;
    let plot = main_plot(spec)?;
    let viewport = Viewport::new(spec.t0, spec.t1)?;
    let pps = plot.w / (spec.t1 - spec.t0);
    let view = layout_task_view(current, parent, &children, viewport, colors)?;

    // Parent and current task get a fifth of the height each.
    let band = plot.h * 0.2;
    let regions = [
        ("parent", Rect { x: plot.x, y: plot.y, w: plot.w, h: band * 0.8 }),
        ("task", Rect { x: plot.x, y: plot.y + band, w: plot.w, h: band * 0.8 }),
        ("subtasks", Rect { x: plot.x, y: plot.y + 2.0 * band, w: plot.w, h: plot.h - 2.0 * band }),
    ];

    let mut doc = Doc::new(spec.width_px, spec.height_px, &format!("Task: {}", current.id));
    let mut used = Vec::new();
    for (name, region) in regions {
        doc.line(format_args!(r#"<g class="region" data-region="{name}">"#));
        doc.line(format_args!(
            r##"<text class="region-label" x="{}" y="{}" fill="#606060">{name}</text>"##,
            num(region.x + 2.0),
            num(region.y - 2.0)
        ));
        let bars: Vec<&LayoutBar> = match name {
            "parent" => view.parent.iter().collect(),
            "task" => vec![&view.current],
            _ => view.children.iter().collect(),
        };
        for b in bars {
            doc.bar(b, region, spec.t0, pps, colors);
            used.push(b.color_key.as_str());
        }
        doc.line(format_args!("</g>"));
    }
    doc.time_axis(plot, spec.t0, spec.t1);
    doc.legend(plot.x + plot.w + PAD, plot.y, colors, used);
    Ok(doc.finish())
}

fn values_attr(s: &MetricSeries) -> String {
    let parts: Vec<String> = s.values.iter().map(|v| v.to_string()).collect();
    parts.join(" ")
}

fn series_path(s: &MetricSeries, plot: Rect, ymax: f64) -> String {
    let pps = plot.w / (s.t1 - s.t0);
    let width = (s.t1 - s.t0) / s.bins as f64;
    let mut d = String::new();
    // Points in the current run; a lone point becomes a round-capped dot.
    let mut run = 0;
    for (k, v) in s.values.iter().enumerate() {
        if !v.is_finite() {
            if run == 1 {
                d.push_str("h 0 ");
            }
            run = 0;
            continue;
        }
        let x = plot.x + (k as f64 + 0.5) * width * pps;
        let y = plot.y + plot.h * (1.0 - v / ymax);
        let _ = write!(d, "{}{} {} ", if run > 0 { "L" } else { "M" }, num(x), num(y));
        run += 1;
    }
    if run == 1 {
        d.push_str("h 0");
    }
    d.trim_end().to_owned()
}

fn axis_max(s: &MetricSeries, reference: Option<f64>) -> f64 {
    let m = s.max().max(reference.unwrap_or(f64::NAN));
    if m.is_finite() && m > 0.0 { m * 1.1 } else { 1.0 }
}

fn render_overview(store: &TraceStore, expectations: &Expectations, spec: &ViewSpec) -> Result<String> {
    let primary = spec.metric_primary.unwrap_or(MetricKind::ConcurrentTasks);
    let filter = spec.filter.as_deref().unwrap_or("");
    let (total, items) = store.list_components(filter, spec.page, spec.page_size)?;
    let pages = total.div_ceil(spec.page_size).max(1);
    let title = match spec.metric_secondary {
        Some(m2) => format!("Overview: {primary} / {m2} (page {} of {pages})", spec.page + 1),
        None => format!("Overview: {primary} (page {} of {pages})", spec.page + 1),
    };
    let mut doc = Doc::new(spec.width_px, spec.height_px, &title);

    let n = items.len();
    let cols = n.clamp(1, 4);
    let rows = n.div_ceil(cols).max(1);
    let cell_w = (spec.width_px as f64 - 2.0 * PAD) / cols as f64;
    let cell_h = (spec.height_px as f64 - TITLE_H - PAD) / rows as f64;
    let right = if spec.metric_secondary.is_some() { 48.0 } else { 12.0 };

    for (i, info) in items.iter().enumerate() {
        let cell = Rect { x: PAD + (i % cols) as f64 * cell_w, y: TITLE_H + (i / cols) as f64 * cell_h, w: cell_w, h: cell_h };
        let plot = Rect { x: cell.x + 48.0, y: cell.y + 18.0, w: cell.w - 48.0 - right, h: cell.h - 18.0 - 22.0 }.checked()?;
        let s1 = compute_series(store, &info.name, primary, spec.t0, spec.t1, spec.bins)?;
        let reference = expectations.for_series(&info.name, primary);
        let y1 = axis_max(&s1, reference);

        doc.line(format_args!(r#"<g class="chart" data-component="{}">"#, esc(&info.name)));
        doc.line(format_args!(
            r##"<text class="chart-title" x="{}" y="{}" fill="#202020">{}</text>"##,
            num(plot.x),
            num(cell.y + 12.0),
            esc(&info.name)
        ));
        doc.line(format_args!(
            r##"<rect class="chart-frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#c0c0c0"/>"##,
            num(plot.x),
            num(plot.y),
            num(plot.w),
            num(plot.h)
        ));
        y_axis(&mut doc, plot, plot.x, "end", -4.0, y1, primary, "primary");
        if let Some(r) = reference {
            let y = plot.y + plot.h * (1.0 - r / y1);
            doc.line(format_args!(
                r#"<line class="reference" data-value="{r}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{REFERENCE_STROKE}" stroke-dasharray="4 3"/>"#,
                num(plot.x),
                num(y),
                num(plot.x + plot.w),
                num(y)
            ));
        }
        doc.line(format_args!(
            r#"<path class="series primary" data-metric="{primary}" data-mean="{}" data-values="{}" d="{}" fill="none" stroke="{PRIMARY_STROKE}" stroke-width="1.5" stroke-linecap="round"/>"#,
            s1.weighted_mean(),
            values_attr(&s1),
            series_path(&s1, plot, y1)
        ));
        if let Some(m2) = spec.metric_secondary {
            let s2 = compute_series(store, &info.name, m2, spec.t0, spec.t1, spec.bins)?;
            let y2 = axis_max(&s2, None);
            y_axis(&mut doc, plot, plot.x + plot.w, "start", 4.0, y2, m2, "secondary");
            doc.line(format_args!(
                r#"<path class="series secondary" data-metric="{m2}" data-mean="{}" data-values="{}" d="{}" fill="none" stroke="{SECONDARY_STROKE}" stroke-width="2" stroke-linecap="round"/>"#,
                s2.weighted_mean(),
                values_attr(&s2),
                series_path(&s2, plot, y2)
            ));
        }
        let span = spec.t1 - spec.t0;
        for (t, x, anchor) in [(spec.t0, plot.x, "start"), (spec.t1, plot.x + plot.w, "end")] {
            doc.line(format_args!(
                r##"<text class="tick-label" x="{}" y="{}" text-anchor="{anchor}" fill="#202020">{}</text>"##,
                num(x),
                num(plot.y + plot.h + 14.0),
                esc(&time_label(t, span))
            ));
        }
        doc.line(format_args!("</g>"));
    }
    Ok(doc.finish())
}

#[allow(clippy::too_many_arguments)]
fn y_axis(doc: &mut Doc, plot: Rect, x: f64, anchor: &str, dx: f64, ymax: f64, metric: MetricKind, class: &str) {
    let unit = metric.unit();
    doc.line(format_args!(r#"<g class="y-axis {class}">"#));
    doc.line(format_args!(
        r##"<line class="axis-line" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#202020"/>"##,
        num(x),
        num(plot.y),
        num(x),
        num(plot.y + plot.h)
    ));
    for (v, y) in [(0.0, plot.y + plot.h), (ymax, plot.y + 8.0)] {
        let label = if unit.is_empty() { short(v) } else { format!("{}{unit}", short(v)) };
        let y = if v == 0.0 { y } else { y.min(plot.y + plot.h) };
        doc.line(format_args!(
            r##"<text class="tick-label" x="{}" y="{}" text-anchor="{anchor}" fill="#202020">{}</text>"##,
            num(x + dx),
            num(y),
            esc(&label)
        ));
    }
    doc.line(format_args!("</g>"));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::build_color_key;
    use crate::model::{Task, REQUEST_IN, REQUEST_OUT};
    use crate::store::Mode;

    fn quartet() -> TraceStore {
        TraceStore::ingest(
            vec![
                Task::new("ro", None, REQUEST_OUT, "Read Memory", "GPU1.CU00", 0.0, 10.0),
                Task::new("ri", Some("ro".into()), REQUEST_IN, "Read Memory", "GPU1.L1_0", 2.0, 8.0),
            ],
            Mode::Strict,
        )
        .unwrap()
    }

    #[test]
    fn formatting() {
        assert_eq!(num(-0.0001), "0.000");
        assert_eq!(num(1.23456), "1.235");
        assert_eq!(short(0.5), "0.5");
        assert_eq!(short(2.0), "2");
        assert_eq!(esc("a<b&\"c\""), "a&lt;b&amp;&quot;c&quot;");
        assert_eq!(time_label(2.5e-6, 1e-5), "2.5us");
        assert_eq!(ticks(0.0, 10.0, 5), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn component_view_of_quartet() {
        let store = quartet();
        let colors = build_color_key(store.tasks(), 16);
        let mut spec = ViewSpec::new(ViewKind::Component, 0.0, 10.0);
        spec.component = Some("L1_0".into());
        let svg = render_svg(&store, &colors, &Expectations::default(), &spec).unwrap();
        assert_eq!(svg.matches(r#"class="task""#).count(), 1);
        assert!(svg.contains(r#"class="axis""#));
        assert!(svg.contains(">Request In-Read Memory</text>"));
        assert!(!svg.contains(">Request Out-Read Memory</text>"));
        assert_eq!(svg, render_svg(&store, &colors, &Expectations::default(), &spec).unwrap());
    }

    #[test]
    fn task_and_overview_views() {
        let store = quartet();
        let colors = build_color_key(store.tasks(), 16);
        let mut spec = ViewSpec::new(ViewKind::Task, 0.0, 10.0);
        spec.task_id = Some("ri".into());
        let svg = render_svg(&store, &colors, &Expectations::default(), &spec).unwrap();
        assert_eq!(svg.matches(r#"class="task""#).count(), 2);

        let mut spec = ViewSpec::new(ViewKind::Overview, 0.0, 10.0);
        spec.metric_primary = Some(MetricKind::BufferPressure);
        spec.metric_secondary = Some(MetricKind::PendingReqOut);
        spec.bins = 10;
        let exp = Expectations::from_toml_str("\"L1\" = 1.0").unwrap();
        let svg = render_svg(&store, &colors, &exp, &spec).unwrap();
        assert_eq!(svg.matches(r#"class="chart""#).count(), 2);
        assert_eq!(svg.matches(r#"class="reference""#).count(), 1);
        assert_eq!(svg.matches(r#"class="series secondary""#).count(), 2);
        assert!(svg.contains(r#"data-mean="0.6""#));
    }

    #[test]
    fn view_spec_validation() {
        let spec = ViewSpec::new(ViewKind::Component, 0.0, 1.0);
        assert!(matches!(spec.validate(), Err(Error::BadRequest(_))));
        let spec = ViewSpec::new(ViewKind::Overview, 1.0, 1.0);
        assert!(matches!(spec.validate(), Err(Error::BadRange(_))));
        let mut spec = ViewSpec::new(ViewKind::Overview, 0.0, 1.0);
        spec.width_px = 40;
        let store = quartet();
        let colors = build_color_key(store.tasks(), 16);
        assert!(render_svg(&store, &colors, &Expectations::default(), &spec).is_err());
    }
}
