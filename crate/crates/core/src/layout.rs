//! Bar layout for the component and task timelines.
//!
//! Rows are assigned by the up-floating rule: intervals are taken in
//! `(start, end, id)` order and each goes to the top-most row where it
//! overlaps nothing already placed. For interval graphs this first-fit order
//! is optimal, so the row count equals the maximum overlap depth.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use crate::color::ColorKeyMap;
use crate::error::{Error, Result};
use crate::model::{Task, TaskId};
use crate::store::TraceStore;

/// Fraction of a parent bar's height kept for the parent itself above its
/// nested children.
pub const PARENT_TOP_INSET: f64 = 0.15;
pub const DEFAULT_MIN_PX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub t0: f64,
    pub t1: f64,
}

impl Viewport {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t0 >= t1 {
            return Err(Error::BadRange(format!("viewport needs t0 < t1, got [{t0}, {t1})")));
        }
        Ok(Viewport { t0, t1 })
    }

    fn clip(&self, start: f64, end: f64) -> (f64, f64) {
        (start.clamp(self.t0, self.t1), end.clamp(self.t0, self.t1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutBar {
    pub task_id: TaskId,
    /// Nesting depth, 0 for layout roots.
    pub level: usize,
    /// 0 is the top-most row.
    pub row: usize,
    pub x0: f64,
    pub x1: f64,
    /// Vertical position and height, normalized to the owning region.
    pub y: f64,
    pub h: f64,
    pub color_key: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct End(f64);

impl Eq for End {}

impl PartialOrd for End {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for End {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Up-floating row assignment. Returns one row per input, aligned with
/// `items`. Intervals are half-open, so touching intervals share a row, and
/// zero-length intervals overlap nothing and land on row 0.
pub fn assign_rows<K: Ord>(items: &[(K, f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&items[a], &items[b]);
        x.1.total_cmp(&y.1).then(x.2.total_cmp(&y.2)).then_with(|| x.0.cmp(&y.0))
    });

    let mut rows = vec![0; items.len()];
    // Rows still busy, keyed by the end of their last interval.
    let mut busy: BinaryHeap<Reverse<(End, usize)>> = BinaryHeap::new();
    let mut free: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
    let mut row_count = 0;
    for i in order {
        let (_, start, end) = items[i];
        if end <= start {
            continue;
        }
        while let Some(Reverse((End(e), r))) = busy.peek().copied() {
            if e > start {
                break;
            }
            busy.pop();
            free.push(Reverse(r));
        }
        let row = match free.pop() {
            Some(Reverse(r)) => r,
            None => {
                row_count += 1;
                row_count - 1
            }
        };
        rows[i] = row;
        busy.push(Reverse((End(end), row)));
    }
    rows
}

/// Bars for one component plus the uniform height used at each level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentLayout {
    pub bars: Vec<LayoutBar>,
    pub level_heights: Vec<f64>,
}

impl ComponentLayout {
    /// Smallest bar height in pixels for a region `region_px` tall.
    pub fn min_row_px(&self, region_px: f64) -> f64 {
        self.level_heights.iter().copied().fold(f64::INFINITY, f64::min) * region_px
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Culling {
    pub min_px: f64,
    pub px_per_second: f64,
}

impl Culling {
    fn keeps(&self, x0: f64, x1: f64) -> bool {
        (x1 - x0) * self.px_per_second >= self.min_px
    }
}

/// Lays out every task at one component.
///
/// Layout roots are tasks whose parent is not in `tasks` or sits at a
/// different location. Each root's same-location descendants are nested in
/// the lower part of their parent's bar. Bars narrower than `min_px` are
/// dropped together with their subtrees before rows are assigned.
pub fn layout_component(
    tasks: &[&Task],
    viewport: Viewport,
    culling: Culling,
    colors: &ColorKeyMap,
) -> Result<ComponentLayout> {
    let mut index: HashMap<&TaskId, usize> = HashMap::with_capacity(tasks.len());
    for (i, t) in tasks.iter().enumerate() {
        index.entry(&t.id).or_insert(i);
    }
    layout_with(tasks, viewport, culling, colors, |t| t.parent_id.as_ref().and_then(|p| index.get(p).copied()))
}

/// Same result as [`layout_component`] over `store.query_window(location,
/// viewport.t0, viewport.t1)`, but parents are found through the store's id
/// index and only for bars that survive culling.
pub fn layout_window(
    store: &TraceStore,
    location: &str,
    viewport: Viewport,
    culling: Culling,
    colors: &ColorKeyMap,
) -> Result<ComponentLayout> {
    let tasks = store.query_window(location, viewport.t0, viewport.t1)?;
    layout_with(&tasks, viewport, culling, colors, |t| {
        let parent = store.get_task(t.parent_id.as_ref()?.as_str()).ok()?;
        if parent.location != location || !parent.overlaps(viewport.t0, viewport.t1) {
            return None;
        }
        // The window is sorted by (start, id).
        tasks
            .binary_search_by(|x| x.start.total_cmp(&parent.start).then_with(|| x.id.cmp(&parent.id)))
            .ok()
    })
}

/// `parent_index` maps a task to the position of its parent in `tasks`, if
/// present. It is only consulted for bars wide enough to draw.
fn layout_with<F>(
    tasks: &[&Task],
    viewport: Viewport,
    culling: Culling,
    colors: &ColorKeyMap,
    parent_index: F,
) -> Result<ComponentLayout>
where
    F: Fn(&Task) -> Option<usize>,
{
    Viewport::new(viewport.t0, viewport.t1)?;
    let n = tasks.len();
    let clipped: Vec<(f64, f64)> = tasks.iter().map(|t| viewport.clip(t.start, t.end)).collect();
    let wide: Vec<bool> = clipped
        .iter()
        .zip(tasks)
        .map(|(&(x0, x1), t)| t.overlaps(viewport.t0, viewport.t1) && culling.keeps(x0, x1))
        .collect();

    let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut roots = Vec::new();
    for i in 0..n {
        if !wide[i] {
            continue;
        }
        match parent_index(tasks[i]).filter(|&p| tasks[p].location == tasks[i].location) {
            None => roots.push(i),
            Some(p) if wide[p] => children.entry(p).or_default().push(i),
            Some(_) => {}
        }
    }

    let key = |i: usize| (tasks[i].id.clone(), tasks[i].start, tasks[i].end);
    let sort_level = |v: &mut Vec<usize>| {
        v.sort_by(|&a, &b| {
            let (x, y) = (tasks[a], tasks[b]);
            x.start.total_cmp(&y.start).then(x.end.total_cmp(&y.end)).then_with(|| x.id.cmp(&y.id))
        })
    };

    let mut bars = Vec::new();
    let mut level_heights = Vec::new();
    let mut seen = vec![false; n];

    // (task index, row, y) for the current level.
    let mut level: Vec<(usize, usize, f64)> = Vec::new();
    {
        let items: Vec<_> = roots.iter().map(|&i| key(i)).collect();
        let rows = assign_rows(&items);
        let h = 1.0 / (rows.iter().max().map_or(0, |m| m + 1).max(1)) as f64;
        level_heights.push(h);
        for (&i, &r) in roots.iter().zip(&rows) {
            seen[i] = true;
            level.push((i, r, r as f64 * h));
        }
        sort_level_entries(&mut level, tasks);
    }

    let mut depth = 0;
    while !level.is_empty() {
        let h = level_heights[depth];
        for &(i, row, y) in &level {
            let (x0, x1) = clipped[i];
            bars.push(LayoutBar {
                task_id: tasks[i].id.clone(),
                level: depth,
                row,
                x0,
                x1,
                y,
                h,
                color_key: colors.key_for(tasks[i]),
            });
        }

        // Row-assign each parent's children, then size the whole level by
        // the most crowded parent.
        let mut groups = Vec::new();
        let mut max_rows = 0;
        for &(p, _, py) in &level {
            let mut kids: Vec<usize> = children.get(&p).into_iter().flatten().copied().filter(|&c| !seen[c]).collect();
            if kids.is_empty() {
                continue;
            }
            sort_level(&mut kids);
            let items: Vec<_> = kids.iter().map(|&c| key(c)).collect();
            let rows = assign_rows(&items);
            max_rows = max_rows.max(rows.iter().max().map_or(0, |m| m + 1).max(1));
            for &c in &kids {
                seen[c] = true;
            }
            groups.push((py, kids, rows));
        }
        if groups.is_empty() {
            break;
        }
        let child_h = h * (1.0 - PARENT_TOP_INSET) / max_rows as f64;
        level_heights.push(child_h);
        let mut next = Vec::new();
        for (py, kids, rows) in groups {
            let top = py + h * PARENT_TOP_INSET;
            for (c, r) in kids.into_iter().zip(rows) {
                next.push((c, r, top + r as f64 * child_h));
            }
        }
        sort_level_entries(&mut next, tasks);
        level = next;
        depth += 1;
    }

    Ok(ComponentLayout { bars, level_heights })
}

fn sort_level_entries(level: &mut [(usize, usize, f64)], tasks: &[&Task]) {
    level.sort_by(|a, b| {
        let (x, y) = (tasks[a.0], tasks[b.0]);
        x.start.total_cmp(&y.start).then(x.end.total_cmp(&y.end)).then_with(|| x.id.cmp(&y.id))
    });
}

/// The three stacked regions of the task view. Each region is normalized to
/// `[0, 1]` on its own.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskViewLayout {
    pub parent: Option<LayoutBar>,
    pub current: LayoutBar,
    pub children: Vec<LayoutBar>,
    pub child_rows: usize,
}

pub fn layout_task_view(
    current: &Task,
    parent: Option<&Task>,
    children: &[&Task],
    viewport: Viewport,
    colors: &ColorKeyMap,
) -> Result<TaskViewLayout> {
    Viewport::new(viewport.t0, viewport.t1)?;
    let bar = |t: &Task, level: usize, row: usize, y: f64, h: f64| {
        let (x0, x1) = viewport.clip(t.start, t.end);
        LayoutBar { task_id: t.id.clone(), level, row, x0, x1, y, h, color_key: colors.key_for(t) }
    };
    let items: Vec<_> = children.iter().map(|t| (t.id.clone(), t.start, t.end)).collect();
    let rows = assign_rows(&items);
    let child_rows = rows.iter().max().map_or(0, |m| m + 1).max(usize::from(!children.is_empty()));
    let h = 1.0 / child_rows.max(1) as f64;
    let mut order: Vec<usize> = (0..children.len())
        .filter(|&i| children[i].overlaps(viewport.t0, viewport.t1))
        .collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (children[a], children[b]);
        x.start.total_cmp(&y.start).then(x.end.total_cmp(&y.end)).then_with(|| x.id.cmp(&y.id))
    });
    let kids: Vec<LayoutBar> = order
        .into_iter()
        .map(|i| bar(children[i], 2, rows[i], rows[i] as f64 * h, h))
        .collect();
    Ok(TaskViewLayout {
        parent: parent.map(|p| bar(p, 0, 0, 0.0, 1.0)),
        current: bar(current, 1, 0, 0.0, 1.0),
        children: kids,
        child_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::build_color_key;
    use crate::model::{REQUEST_IN, REQUEST_OUT};

    fn rows_of(items: &[(&str, f64, f64)]) -> HashMap<String, usize> {
        let rows = assign_rows(items);
        items.iter().zip(rows).map(|(i, r)| (i.0.to_owned(), r)).collect()
    }

    #[test]
    fn up_floating_examples() {
        let r = rows_of(&[("a", 0.0, 10.0), ("b", 5.0, 15.0), ("c", 12.0, 20.0)]);
        assert_eq!((r["a"], r["b"], r["c"]), (0, 1, 0));
        let r = rows_of(&[("a", 0.0, 10.0), ("b", 10.0, 20.0)]);
        assert_eq!((r["a"], r["b"]), (0, 0));
        assert!(assign_rows::<&str>(&[]).is_empty());
    }

    #[test]
    fn input_order_does_not_matter() {
        let a = rows_of(&[("c", 12.0, 20.0), ("b", 5.0, 15.0), ("a", 0.0, 10.0)]);
        let b = rows_of(&[("a", 0.0, 10.0), ("b", 5.0, 15.0), ("c", 12.0, 20.0)]);
        assert_eq!(a, b);
    }

    #[test]
    fn reuses_lowest_free_row() {
        // Rows 0 and 1 free up at different times; the next interval takes 0.
        let r = rows_of(&[("a", 0.0, 5.0), ("b", 1.0, 3.0), ("c", 2.0, 9.0), ("d", 6.0, 7.0)]);
        assert_eq!((r["a"], r["b"], r["c"], r["d"]), (0, 1, 2, 0));
    }

    fn all_visible() -> Culling {
        Culling { min_px: 0.0, px_per_second: 1.0 }
    }

    #[test]
    fn cross_location_parent_makes_a_root() {
        let ro = Task::new("ro", None, REQUEST_OUT, "Read Memory", "CU0", 0.0, 10.0);
        let ri = Task::new("ri", Some("ro".into()), REQUEST_IN, "Read Memory", "L1_0", 2.0, 8.0);
        let colors = build_color_key([&ro, &ri], 16);
        let l = layout_component(&[&ri], Viewport::new(0.0, 10.0).unwrap(), all_visible(), &colors).unwrap();
        assert_eq!(l.bars.len(), 1);
        let b = &l.bars[0];
        assert_eq!((b.level, b.row, b.y, b.h), (0, 0, 0.0, 1.0));
        assert_eq!((b.x0, b.x1), (2.0, 8.0));
        assert_eq!(b.color_key, "Request In-Read Memory");
    }

    #[test]
    fn nested_children() {
        let p = Task::new("p", None, "WG", "Exec", "CU", 0.0, 10.0);
        let a = Task::new("a", Some("p".into()), "WF", "Exec", "CU", 1.0, 4.0);
        let b = Task::new("b", Some("p".into()), "WF", "Exec", "CU", 3.0, 7.0);
        let colors = build_color_key([&p, &a, &b], 16);
        let l = layout_component(&[&b, &p, &a], Viewport::new(0.0, 10.0).unwrap(), all_visible(), &colors).unwrap();
        assert_eq!(l.bars.len(), 3);
        assert_eq!(l.bars[0].task_id.as_str(), "p");
        let kids = &l.bars[1..];
        assert!(kids.iter().all(|k| k.level == 1));
        assert_eq!(kids.iter().map(|k| k.row).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(kids[0].h, kids[1].h);
        for k in kids {
            assert!(k.y >= l.bars[0].y + PARENT_TOP_INSET - 1e-12);
            assert!(k.y + k.h <= l.bars[0].y + l.bars[0].h + 1e-12);
            assert!(k.x0 >= l.bars[0].x0 && k.x1 <= l.bars[0].x1);
        }
    }

    #[test]
    fn narrow_bars_are_culled() {
        let t = Task::new("t", None, "X", "Y", "L", 0.0, 1.5);
        let colors = build_color_key([&t], 16);
        let l = layout_component(
            &[&t],
            Viewport::new(0.0, 10.0).unwrap(),
            Culling { min_px: 2.0, px_per_second: 1.0 },
            &colors,
        )
        .unwrap();
        assert!(l.bars.is_empty());
    }

    #[test]
    fn culled_parent_takes_children_along() {
        let p = Task::new("p", None, "X", "Y", "L", 0.0, 1.0);
        let c = Task::new("c", Some("p".into()), "X", "Y", "L", 0.0, 1.0);
        let colors = build_color_key([&p], 16);
        let culling = Culling { min_px: 2.0, px_per_second: 1.0 };
        let l = layout_component(&[&p, &c], Viewport::new(0.0, 10.0).unwrap(), culling, &colors).unwrap();
        assert!(l.bars.is_empty());
    }

    #[test]
    fn bad_viewport() {
        let colors = build_color_key(std::iter::empty(), 16);
        assert!(matches!(
            layout_component(&[], Viewport { t0: 1.0, t1: 1.0 }, all_visible(), &colors),
            Err(Error::BadRange(_))
        ));
    }

    #[test]
    fn task_view_regions() {
        let ro = Task::new("ro", None, REQUEST_OUT, "Read Memory", "CU0", 0.0, 10.0);
        let ri = Task::new("ri", Some("ro".into()), REQUEST_IN, "Read Memory", "L1_0", 2.0, 8.0);
        let colors = build_color_key([&ro, &ri], 16);
        let v = layout_task_view(&ri, Some(&ro), &[], Viewport::new(0.0, 10.0).unwrap(), &colors).unwrap();
        assert_eq!(v.parent.as_ref().unwrap().task_id.as_str(), "ro");
        assert_eq!(v.current.task_id.as_str(), "ri");
        assert!(v.children.is_empty());

        let root = layout_task_view(&ro, None, &[&ri], Viewport::new(0.0, 10.0).unwrap(), &colors).unwrap();
        assert!(root.parent.is_none());
        assert_eq!(root.children.len(), 1);

        let kids: Vec<Task> = (0..3).map(|i| Task::new(format!("k{i}"), Some("ro".into()), "X", "Y", "L", i as f64, 9.0)).collect();
        let refs: Vec<&Task> = kids.iter().collect();
        let v = layout_task_view(&ro, None, &refs, Viewport::new(0.0, 10.0).unwrap(), &colors).unwrap();
        let mut rows: Vec<usize> = v.children.iter().map(|b| b.row).collect();
        rows.sort();
        assert_eq!(rows, vec![0, 1, 2]);
        assert_eq!(v.child_rows, 3);
    }
}
