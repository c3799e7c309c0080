//! Task records, request pairing and trace validation.
//!
//! A trace is a flat list of [`Task`]s linked into a forest by `parent_id`.
//! Two categories are special: a `"Request Out"` task is opened by the
//! component that asks for work, and the `"Request In"` task created by the
//! receiving component is its child. Validation checks the structural rules
//! that make such traces safe to lay out and aggregate.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

pub const REQUEST_IN: &str = "Request In";
pub const REQUEST_OUT: &str = "Request Out";

/// Opaque per-task annotations. Never interpreted by analysis code.
pub type Details = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(String);

impl TaskId {
    pub fn new(value: impl Into<String>) -> Self {
        TaskId(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for TaskId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for TaskId {
    fn from(s: &str) -> Self {
        TaskId(s.to_owned())
    }
}

impl From<String> for TaskId {
    fn from(s: String) -> Self {
        TaskId(s)
    }
}

/// One completed unit of hardware work at a single component.
///
/// Times are seconds. The task occupies the half-open interval
/// `[start, end)`; zero-duration tasks are legal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub parent_id: Option<TaskId>,
    pub category: String,
    pub action: String,
    pub location: String,
    pub start: f64,
    pub end: f64,
    #[serde(default)]
    pub details: Details,
}

impl Task {
    pub fn new(
        id: impl Into<TaskId>,
        parent_id: Option<TaskId>,
        category: impl Into<String>,
        action: impl Into<String>,
        location: impl Into<String>,
        start: f64,
        end: f64,
    ) -> Self {
        Task {
            id: id.into(),
            parent_id,
            category: category.into(),
            action: action.into(),
            location: location.into(),
            start,
            end,
            details: Details::new(),
        }
    }

    pub fn kind(&self) -> TaskKind {
        classify_kind(&self.category)
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// Half-open overlap with `[t0, t1)`. A zero-duration task at `t`
    /// overlaps the window iff `t0 <= t < t1`.
    pub fn overlaps(&self, t0: f64, t1: f64) -> bool {
        if self.start == self.end {
            t0 <= self.start && self.start < t1
        } else {
            self.start < t1 && self.end > t0
        }
    }

    /// Legend key in `Category-Action` form.
    pub fn category_action(&self) -> String {
        format!("{}-{}", self.category, self.action)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    RequestIn,
    RequestOut,
    Other,
}

/// Exact, case-sensitive category match.
pub fn classify_kind(category: &str) -> TaskKind {
    match category {
        REQUEST_IN => TaskKind::RequestIn,
        REQUEST_OUT => TaskKind::RequestOut,
        _ => TaskKind::Other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleCode {
    #[serde(rename = "E_EMPTY_ID")]
    EmptyId,
    #[serde(rename = "E_NO_LOCATION")]
    NoLocation,
    #[serde(rename = "E_NO_CATEGORY")]
    NoCategory,
    #[serde(rename = "E_NO_ACTION")]
    NoAction,
    #[serde(rename = "E_BAD_TIME")]
    BadTime,
    #[serde(rename = "E_TIME_ORDER")]
    TimeOrder,
    #[serde(rename = "E_DUP_ID")]
    DuplicateId,
    #[serde(rename = "E_UNKNOWN_PARENT")]
    UnknownParent,
    #[serde(rename = "E_MULTI_ROOT")]
    MultipleRoots,
    #[serde(rename = "E_NO_ROOT")]
    NoRoot,
    #[serde(rename = "E_REQ_PARENT")]
    RequestParent,
    #[serde(rename = "E_SAME_LOCATION")]
    SameLocation,
    #[serde(rename = "E_NOT_CONTAINED")]
    NotContained,
    #[serde(rename = "E_CYCLE")]
    Cycle,
}

impl RuleCode {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleCode::EmptyId => "E_EMPTY_ID",
            RuleCode::NoLocation => "E_NO_LOCATION",
            RuleCode::NoCategory => "E_NO_CATEGORY",
            RuleCode::NoAction => "E_NO_ACTION",
            RuleCode::BadTime => "E_BAD_TIME",
            RuleCode::TimeOrder => "E_TIME_ORDER",
            RuleCode::DuplicateId => "E_DUP_ID",
            RuleCode::UnknownParent => "E_UNKNOWN_PARENT",
            RuleCode::MultipleRoots => "E_MULTI_ROOT",
            RuleCode::NoRoot => "E_NO_ROOT",
            RuleCode::RequestParent => "E_REQ_PARENT",
            RuleCode::SameLocation => "E_SAME_LOCATION",
            RuleCode::NotContained => "E_NOT_CONTAINED",
            RuleCode::Cycle => "E_CYCLE",
        }
    }
}

impl fmt::Display for RuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub task_id: String,
    pub code: RuleCode,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }

    pub fn passes(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, task: &str, code: RuleCode, message: impl Into<String>) {
        self.errors.push(Finding { task_id: task.to_owned(), code, message: message.into() });
    }

    fn warning(&mut self, task: &str, code: RuleCode, message: impl Into<String>) {
        self.warnings.push(Finding { task_id: task.to_owned(), code, message: message.into() });
    }

    /// Error in strict mode, warning otherwise.
    fn report(&mut self, strict: bool, task: &str, code: RuleCode, message: impl Into<String>) {
        if strict {
            self.error(task, code, message)
        } else {
            self.warning(task, code, message)
        }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }

    fn normalize(&mut self) {
        self.errors.sort();
        self.warnings.sort();
    }
}

/// Per-record checks that need no other task.
pub fn validate_task(task: &Task, strict: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_task(task, strict, &mut report);
    report.normalize();
    report
}

fn check_task(task: &Task, strict: bool, report: &mut ValidationReport) {
    let id = task.id.as_str();
    if task.id.is_empty() {
        report.error(id, RuleCode::EmptyId, "task id is empty");
    }
    if task.location.is_empty() {
        report.error(id, RuleCode::NoLocation, "task has no location");
    }
    if task.category.is_empty() {
        report.report(strict, id, RuleCode::NoCategory, "task has no category");
    }
    if task.action.is_empty() {
        report.report(strict, id, RuleCode::NoAction, "task has no action");
    }
    if !task.start.is_finite() || task.start < 0.0 || !task.end.is_finite() {
        report.error(
            id,
            RuleCode::BadTime,
            format!("times must be finite with start >= 0 (start={}, end={})", task.start, task.end),
        );
    } else if task.end < task.start {
        report.error(
            id,
            RuleCode::TimeOrder,
            format!("end {} precedes start {}", task.end, task.start),
        );
    }
}

/// Whole-trace validation. The returned findings are sorted, so any
/// permutation of `tasks` yields an identical report.
pub fn validate_trace(tasks: &[Task], strict: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    for task in tasks {
        check_task(task, strict, &mut report);
    }

    let mut by_id: HashMap<&str, Vec<usize>> = HashMap::with_capacity(tasks.len());
    for (i, task) in tasks.iter().enumerate() {
        by_id.entry(task.id.as_str()).or_default().push(i);
    }
    for (id, idxs) in &by_id {
        if idxs.len() > 1 {
            report.error(id, RuleCode::DuplicateId, format!("id used by {} tasks", idxs.len()));
        }
    }

    // Parent resolution: `Some(Some(i))` unique parent, `Some(None)` parent id
    // is duplicated (ambiguous, relation checks skipped), `None` no parent.
    let lookup = |id: &TaskId| -> Option<Option<usize>> {
        by_id.get(id.as_str()).map(|v| if v.len() == 1 { Some(v[0]) } else { None })
    };

    let mut parent_of: Vec<Option<usize>> = vec![None; tasks.len()];
    let mut roots = Vec::new();
    for (i, task) in tasks.iter().enumerate() {
        let id = task.id.as_str();
        let Some(pid) = &task.parent_id else {
            roots.push(i);
            if task.kind() == TaskKind::RequestIn {
                report.error(id, RuleCode::RequestParent, "request in has no parent request out");
            }
            continue;
        };
        match lookup(pid) {
            None => report.report(
                strict,
                id,
                RuleCode::UnknownParent,
                format!("parent `{pid}` is not in the trace"),
            ),
            Some(None) => {}
            Some(Some(p)) => {
                parent_of[i] = Some(p);
                if task.kind() == TaskKind::RequestIn {
                    check_request_pair(task, &tasks[p], strict, &mut report);
                }
            }
        }
    }

    if !tasks.is_empty() {
        if roots.is_empty() {
            report.report(strict, "", RuleCode::NoRoot, "trace has no parentless task");
        } else if roots.len() > 1 {
            for &r in &roots {
                report.report(
                    strict,
                    tasks[r].id.as_str(),
                    RuleCode::MultipleRoots,
                    format!("one of {} parentless tasks", roots.len()),
                );
            }
        }
    }

    for i in tasks_on_cycles(&parent_of) {
        report.error(tasks[i].id.as_str(), RuleCode::Cycle, "parent chain loops back on itself");
    }

    report.normalize();
    report
}

fn check_request_pair(req_in: &Task, parent: &Task, strict: bool, report: &mut ValidationReport) {
    let id = req_in.id.as_str();
    if parent.kind() != TaskKind::RequestOut {
        report.error(
            id,
            RuleCode::RequestParent,
            format!("parent `{}` has category `{}`, expected `{REQUEST_OUT}`", parent.id, parent.category),
        );
        return;
    }
    if parent.location == req_in.location {
        report.error(
            id,
            RuleCode::SameLocation,
            format!("request in shares location `{}` with its request out", req_in.location),
        );
    }
    if req_in.start < parent.start || req_in.end > parent.end {
        report.report(
            strict,
            id,
            RuleCode::NotContained,
            format!(
                "[{}, {}) not contained in request out [{}, {})",
                req_in.start, req_in.end, parent.start, parent.end
            ),
        );
    }
}

/// Indices of every task that lies on a parent cycle.
fn tasks_on_cycles(parent_of: &[Option<usize>]) -> Vec<usize> {
    const UNSEEN: u8 = 0;
    const ON_PATH: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![UNSEEN; parent_of.len()];
    let mut on_cycle = Vec::new();
    let mut path = Vec::new();
    for start in 0..parent_of.len() {
        if state[start] != UNSEEN {
            continue;
        }
        let mut cur = Some(start);
        while let Some(i) = cur {
            match state[i] {
                UNSEEN => {
                    state[i] = ON_PATH;
                    path.push(i);
                    cur = parent_of[i];
                }
                ON_PATH => {
                    let pos = path.iter().position(|&p| p == i).expect("node on current path");
                    on_cycle.extend_from_slice(&path[pos..]);
                    break;
                }
                _ => break,
            }
        }
        for i in path.drain(..) {
            state[i] = DONE;
        }
    }
    on_cycle
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(id: &str, parent: Option<&str>, cat: &str, loc: &str, s: f64, e: f64) -> Task {
        Task::new(id, parent.map(TaskId::from), cat, "Read Memory", loc, s, e)
    }

    fn codes(findings: &[Finding]) -> Vec<RuleCode> {
        findings.iter().map(|f| f.code).collect()
    }

    #[test]
    fn classify_is_exact() {
        assert_eq!(classify_kind("Request In"), TaskKind::RequestIn);
        assert_eq!(classify_kind("Request Out"), TaskKind::RequestOut);
        assert_eq!(classify_kind("request in"), TaskKind::Other);
        assert_eq!(classify_kind("Instruction"), TaskKind::Other);
    }

    #[test]
    fn per_task_rules() {
        let r = validate_task(&task("a", None, "X", "L", 2.0, 1.0), true);
        assert_eq!(codes(&r.errors), vec![RuleCode::TimeOrder]);

        let r = validate_task(&task("a", None, "X", "L", 1.0, 1.0), true);
        assert!(r.is_clean());

        let r = validate_task(&task("a", None, "X", "", 0.0, 1.0), true);
        assert_eq!(codes(&r.errors), vec![RuleCode::NoLocation]);

        let r = validate_task(&task("", None, "X", "L", 0.0, 1.0), true);
        assert_eq!(codes(&r.errors), vec![RuleCode::EmptyId]);

        let mut t = task("a", None, "", "L", 0.0, 1.0);
        t.action.clear();
        let strict = validate_task(&t, true);
        assert_eq!(codes(&strict.errors), vec![RuleCode::NoCategory, RuleCode::NoAction]);
        let lenient = validate_task(&t, false);
        assert!(lenient.errors.is_empty());
        assert_eq!(lenient.warnings.len(), 2);

        let r = validate_task(&task("a", None, "X", "L", -1.0, 1.0), true);
        assert_eq!(codes(&r.errors), vec![RuleCode::BadTime]);
    }

    #[test]
    fn canonical_pairing_is_clean() {
        let tasks = vec![
            task("A", None, REQUEST_OUT, "CU0", 0.0, 10.0),
            task("B", Some("A"), REQUEST_IN, "L1_0", 2.0, 8.0),
        ];
        assert!(validate_trace(&tasks, true).is_clean());
    }

    #[test]
    fn containment_is_strict_error_lenient_warning() {
        let tasks = vec![
            task("A", None, REQUEST_OUT, "CU0", 0.0, 10.0),
            task("B", Some("A"), REQUEST_IN, "L1_0", 2.0, 12.0),
        ];
        let strict = validate_trace(&tasks, true);
        assert_eq!(codes(&strict.errors), vec![RuleCode::NotContained]);
        let lenient = validate_trace(&tasks, false);
        assert!(lenient.errors.is_empty());
        assert_eq!(codes(&lenient.warnings), vec![RuleCode::NotContained]);
    }

    #[test]
    fn request_pair_rules() {
        let same_loc = vec![
            task("A", None, REQUEST_OUT, "CU0", 0.0, 10.0),
            task("B", Some("A"), REQUEST_IN, "CU0", 2.0, 8.0),
        ];
        assert_eq!(codes(&validate_trace(&same_loc, false).errors), vec![RuleCode::SameLocation]);

        let wrong_parent = vec![
            task("A", None, "Instruction", "CU0", 0.0, 10.0),
            task("B", Some("A"), REQUEST_IN, "L1", 2.0, 8.0),
        ];
        assert_eq!(
            codes(&validate_trace(&wrong_parent, false).errors),
            vec![RuleCode::RequestParent]
        );
    }

    #[test]
    fn duplicate_ids() {
        let tasks = vec![
            task("root", None, "Kernel", "CP", 0.0, 10.0),
            task("5C9dX8", Some("root"), "X", "L", 0.0, 1.0),
            task("5C9dX8", Some("root"), "X", "L", 1.0, 2.0),
        ];
        let r = validate_trace(&tasks, true);
        assert_eq!(codes(&r.errors), vec![RuleCode::DuplicateId]);
        assert_eq!(r.errors[0].task_id, "5C9dX8");
    }

    #[test]
    fn unknown_parent_and_roots() {
        let tasks = vec![
            task("r", None, "Kernel", "CP", 0.0, 10.0),
            task("a", Some("ghost"), "X", "L", 0.0, 1.0),
        ];
        assert_eq!(codes(&validate_trace(&tasks, true).errors), vec![RuleCode::UnknownParent]);
        let lenient = validate_trace(&tasks, false);
        assert!(lenient.passes());
        assert_eq!(codes(&lenient.warnings), vec![RuleCode::UnknownParent]);

        let two_roots = vec![task("r", None, "K", "CP", 0.0, 1.0), task("s", None, "K", "CP", 0.0, 1.0)];
        assert_eq!(validate_trace(&two_roots, true).errors.len(), 2);
        assert!(validate_trace(&two_roots, false).passes());
    }

    #[test]
    fn cycles_are_reported() {
        let tasks = vec![
            task("r", None, "K", "CP", 0.0, 10.0),
            task("a", Some("b"), "X", "L", 0.0, 1.0),
            task("b", Some("a"), "X", "L", 0.0, 1.0),
            task("c", Some("a"), "X", "L", 0.0, 1.0),
            task("s", Some("s"), "X", "L", 0.0, 1.0),
        ];
        let r = validate_trace(&tasks, false);
        let cyc: Vec<&str> = r
            .errors
            .iter()
            .filter(|f| f.code == RuleCode::Cycle)
            .map(|f| f.task_id.as_str())
            .collect();
        assert_eq!(cyc, vec!["a", "b", "s"]);
    }

    #[test]
    fn empty_trace_is_clean() {
        assert!(validate_trace(&[], true).is_clean());
    }
}
