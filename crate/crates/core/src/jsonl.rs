//! The `daisen-jsonl v1` on-disk dialect: one JSON object per line with keys
//! `id`, `parent_id`, `kind`, `what`, `where`, `start`, `end`, `detail`.

use std::io::{BufRead, Write};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::{Details, Task, TaskId};

pub const FORMAT_VERSION: &str = "daisen-jsonl v1";

const KNOWN_KEYS: [&str; 8] = ["id", "parent_id", "kind", "what", "where", "start", "end", "detail"];

#[derive(Serialize)]
struct Record<'a> {
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    parent_id: Option<&'a str>,
    kind: &'a str,
    what: &'a str,
    #[serde(rename = "where")]
    location: &'a str,
    start: f64,
    end: f64,
    #[serde(skip_serializing_if = "Details::is_empty")]
    detail: &'a Details,
}

/// Serializes one task as a single line (without the trailing newline).
pub fn to_line(task: &Task) -> String {
    let record = Record {
        id: task.id.as_str(),
        parent_id: task.parent_id.as_ref().map(TaskId::as_str),
        kind: &task.category,
        what: &task.action,
        location: &task.location,
        start: task.start,
        end: task.end,
        detail: &task.details,
    };
    serde_json::to_string(&record).expect("task records always serialize")
}

pub fn write_task<W: Write>(out: &mut W, task: &Task) -> std::io::Result<()> {
    out.write_all(to_line(task).as_bytes())?;
    out.write_all(b"\n")
}

/// Parses one line. Unknown keys are returned by name so callers can warn.
pub fn parse_line(line: &str, line_no: usize) -> Result<(Task, Vec<String>)> {
    let err = |message: String| Error::Parse { line: line_no, message };
    let map: Map<String, Value> =
        serde_json::from_str(line).map_err(|e| err(e.to_string()))?;

    let text = |key: &str| -> Result<String> {
        match map.get(key) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(err(format!("`{key}` must be a string"))),
            None => Err(err(format!("missing `{key}`"))),
        }
    };
    let number = |key: &str| -> Result<f64> {
        match map.get(key) {
            Some(Value::Number(n)) => n.as_f64().ok_or_else(|| err(format!("`{key}` out of range"))),
            Some(_) => Err(err(format!("`{key}` must be a number"))),
            None => Err(err(format!("missing `{key}`"))),
        }
    };

    let parent_id = match map.get("parent_id") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(TaskId::new(s.clone())),
        Some(_) => return Err(err("`parent_id` must be a string or null".into())),
    };

    let mut details = Details::new();
    match map.get("detail") {
        None | Some(Value::Null) => {}
        Some(Value::Object(obj)) => {
            for (k, v) in obj {
                let v = match v {
                    Value::String(s) => s.clone(),
                    Value::Number(_) | Value::Bool(_) | Value::Null => v.to_string(),
                    _ => return Err(err(format!("detail `{k}` must be a scalar"))),
                };
                details.insert(k.clone(), v);
            }
        }
        Some(_) => return Err(err("`detail` must be an object".into())),
    }

    let task = Task {
        id: TaskId::new(text("id")?),
        parent_id,
        category: text("kind")?,
        action: text("what")?,
        location: text("where")?,
        start: number("start")?,
        end: number("end")?,
        details,
    };
    let unknown = map.keys().filter(|k| !KNOWN_KEYS.contains(&k.as_str())).cloned().collect();
    Ok((task, unknown))
}

#[derive(Debug, Default)]
pub struct ReadOutcome {
    pub tasks: Vec<Task>,
    /// One message per line that carried keys outside the format.
    pub warnings: Vec<String>,
}

/// Reads a whole stream. Blank lines are skipped.
pub fn read_tasks<R: BufRead>(reader: R) -> Result<ReadOutcome> {
    let mut out = ReadOutcome::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (task, unknown) = parse_line(&line, i + 1)?;
        if !unknown.is_empty() {
            out.warnings.push(format!("line {}: ignoring unknown key(s) {}", i + 1, unknown.join(", ")));
        }
        out.tasks.push(task);
    }
    Ok(out)
}
