//! Recording, storage, analysis and layout of hierarchical hardware
//! execution traces.

pub mod api;
pub mod collector;
pub mod color;
pub mod error;
pub mod jsonl;
pub mod layout;
pub mod metrics;
pub mod model;
pub mod natural;
pub mod sim;
pub mod store;
pub mod svg;
pub mod synth;

pub use collector::{Collector, CollectorOptions, FlushStats, JsonlSink, MemorySink, TraceSink};
pub use color::{build_color_key, cubehelix_palette, ColorKeyMap, ColorMode, Rgb};
pub use error::{Error, Result};
pub use layout::{assign_rows, layout_component, layout_task_view, layout_window, Culling, LayoutBar, Viewport};
pub use metrics::{compute_series, time_average_count, Expectations, MetricKind, MetricSeries};
pub use model::{classify_kind, validate_task, validate_trace, Details, Task, TaskId, TaskKind, ValidationReport};
pub use sim::{default_config, dispatch_experiment, simulate, SimConfig, SimResult};
pub use store::{ComponentInfo, Mode, StoreWriter, TraceMeta, TraceStore};
pub use svg::{render_svg, ViewKind, ViewSpec};
pub use api::{Api, ApiError};
