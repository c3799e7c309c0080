//! Random but strictly valid traces for tests and benchmarks.
//!
//! Each new task picks a uniformly random existing task as its parent and a
//! random sub-interval of it, so every trace has a single root, properly
//! nested times and request pairs at distinct locations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Task, TaskId, REQUEST_IN, REQUEST_OUT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthOptions {
    pub tasks: usize,
    pub components: usize,
    /// Duration of the root task in seconds.
    pub span: f64,
    /// Share of new tasks created as Request Out/Request In pairs.
    pub request_fraction: f64,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { tasks: 1000, components: 16, span: 1e-3, request_fraction: 0.3, seed: 0 }
    }
}

pub fn component_name(i: usize) -> String {
    format!("GPU1.Unit{i:03}")
}

const ACTIONS: [&str; 3] = ["Exec", "Copy", "Wait"];

pub fn synthetic_trace(opts: SynthOptions) -> Vec<Task> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let components = opts.components.max(2);
    let mut tasks = Vec::with_capacity(opts.tasks);
    if opts.tasks == 0 {
        return tasks;
    }
    tasks.push(Task::new("t0", None, "Kernel", "Run", "Host", 0.0, opts.span));
    while tasks.len() < opts.tasks {
        let p = rng.gen_range(0..tasks.len());
        let (ps, pe) = (tasks[p].start, tasks[p].end);
        let s = (ps + rng.gen::<f64>() * (pe - ps)).min(pe);
        let e = (s + rng.gen::<f64>() * (pe - s)).min(pe);
        let parent = TaskId::new(format!("t{p}"));
        let id = TaskId::new(format!("t{}", tasks.len()));
        let here = if tasks[p].location == "Host" {
            component_name(rng.gen_range(0..components))
        } else {
            tasks[p].location.clone()
        };
        if tasks.len() + 2 <= opts.tasks && rng.gen_bool(opts.request_fraction) {
            let mut there = component_name(rng.gen_range(0..components));
            while there == here {
                there = component_name(rng.gen_range(0..components));
            }
            let (is, ie) = {
                let a = (s + rng.gen::<f64>() * (e - s)).min(e);
                (a, (a + rng.gen::<f64>() * (e - a)).min(e))
            };
            let out_id = id.clone();
            tasks.push(Task::new(id, Some(parent), REQUEST_OUT, "Read Memory", &here, s, e));
            let in_id = TaskId::new(format!("t{}", tasks.len()));
            tasks.push(Task::new(in_id, Some(out_id), REQUEST_IN, "Read Memory", &there, is, ie));
        } else {
            let loc = if rng.gen_bool(0.7) { here } else { component_name(rng.gen_range(0..components)) };
            let action = ACTIONS[rng.gen_range(0..ACTIONS.len())];
            tasks.push(Task::new(id, Some(parent), "Work", action, &loc, s, e));
        }
    }
    tasks
}
