//! A small deterministic GPU model that emits traces through a
//! [`Collector`].
//!
//! The Command Processor dispatches work-groups to Compute Units with free
//! wavefront slots, at most `dispatch_rate` per cycle, round-robin over CUs.
//! Each wavefront is pinned to one SIMD unit. SIMD units issue one
//! instruction per cycle from their ready wavefronts in round-robin order; a
//! compute instruction keeps the SIMD busy for `ceil(64 / simd_width)`
//! cycles. A memory instruction takes one issue cycle and sends a read to the
//! CU's L1; misses travel on to the L2 and then DRAM as nested request
//! pairs. A wavefront waits for its own memory response before issuing
//! again.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collector::{Collector, CollectorOptions, MemorySink, TraceSink};
use crate::error::{Error, Result};
use crate::model::{Details, Task, TaskId};

pub const WAVEFRONT_SIZE: usize = 64;
pub const COMMAND_PROCESSOR: &str = "GPU1.CommandProcessor";
pub const L2: &str = "GPU1.L2_0";
pub const DRAM: &str = "GPU1.DRAM0";

const COMPUTE_OPS: [&str; 4] = ["ADD", "MUL", "FMA", "MOV"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub work_groups: usize,
    pub wavefronts_per_wg: usize,
    pub insts_per_wavefront: usize,
    pub mem_inst_fraction: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        // Many short work-groups with few memory instructions: the dispatcher
        // cannot keep the CUs busy.
        KernelConfig { work_groups: 2048, wavefronts_per_wg: 1, insts_per_wavefront: 3, mem_inst_fraction: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemoryConfig {
    /// Latencies in cycles.
    pub l1_latency: u64,
    pub l2_latency: u64,
    pub dram_latency: u64,
    pub l1_hit_rate: f64,
    pub l2_hit_rate: f64,
}

impl Default for MemoryConfig {
    fn default() -> Self {
        MemoryConfig { l1_latency: 10, l2_latency: 40, dram_latency: 150, l1_hit_rate: 0.9, l2_hit_rate: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub cu_count: usize,
    pub simd_per_cu: usize,
    /// Work-items processed per SIMD cycle.
    pub simd_width: usize,
    pub max_wavefronts_per_cu: usize,
    /// Work-groups the Command Processor can dispatch per cycle.
    pub dispatch_rate: usize,
    /// Seconds per cycle.
    pub clock_period: f64,
    pub kernel: KernelConfig,
    pub memory: MemoryConfig,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            cu_count: 8,
            simd_per_cu: 4,
            simd_width: 16,
            max_wavefronts_per_cu: 40,
            dispatch_rate: 1,
            clock_period: 1e-9,
            kernel: KernelConfig::default(),
            memory: MemoryConfig::default(),
            seed: 1,
        }
    }
}

/// The default, dispatch-bound configuration.
pub fn default_config() -> SimConfig {
    SimConfig::default()
}

/// One large work-group: dispatch is off the critical path.
pub fn compute_bound_config() -> SimConfig {
    SimConfig {
        kernel: KernelConfig { work_groups: 1, wavefronts_per_wg: 8, insts_per_wavefront: 400, mem_inst_fraction: 0.05 },
        ..SimConfig::default()
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        let k = &self.kernel;
        let m = &self.memory;
        if self.cu_count == 0 || self.simd_per_cu == 0 || self.simd_width == 0 {
            return fail("cu_count, simd_per_cu and simd_width must be positive".into());
        }
        if self.dispatch_rate == 0 {
            return fail("dispatch_rate must be positive".into());
        }
        if !(self.clock_period.is_finite() && self.clock_period > 0.0) {
            return fail(format!("clock_period must be positive, got {}", self.clock_period));
        }
        if !(1..=8).contains(&k.wavefronts_per_wg) {
            return fail(format!("wavefronts_per_wg must be in 1..=8, got {}", k.wavefronts_per_wg));
        }
        if self.max_wavefronts_per_cu < k.wavefronts_per_wg {
            return fail("max_wavefronts_per_cu is smaller than one work-group".into());
        }
        for (name, p) in [
            ("mem_inst_fraction", k.mem_inst_fraction),
            ("l1_hit_rate", m.l1_hit_rate),
            ("l2_hit_rate", m.l2_hit_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must be in [0, 1], got {p}"));
            }
        }
        Ok(())
    }

    pub fn simd_cycles(&self) -> u64 {
        WAVEFRONT_SIZE.div_ceil(self.simd_width) as u64
    }
}

pub fn cu_name(cu: usize) -> String {
    format!("GPU1.CU{cu:02}")
}

pub fn simd_name(cu: usize, simd: usize) -> String {
    format!("GPU1.CU{cu:02}.SIMD{simd}")
}

pub fn l1_name(cu: usize) -> String {
    format!("GPU1.L1_{cu}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub total_time: f64,
    pub cycles: u64,
    pub tasks_emitted: u64,
}

#[derive(Debug, Clone, Copy)]
enum Inst {
    Compute(&'static str),
    Memory { l1_hit: bool, l2_hit: bool },
}

struct Wavefront {
    task: TaskId,
    wg: usize,
    cu: usize,
    simd: usize,
    label: String,
    program: Vec<Inst>,
    pc: usize,
    /// Open tasks of the in-flight memory access, innermost last.
    pending: Vec<(TaskId, Close)>,
}

#[derive(Clone, Copy)]
enum Close {
    Task,
    RequestIn,
    RequestOut,
}

struct WorkGroup {
    task: TaskId,
    live_wavefronts: usize,
}

struct Simd {
    location: String,
    ready: VecDeque<usize>,
    busy_until: u64,
    tick_pending: bool,
}

struct ComputeUnit {
    location: String,
    l1: String,
    free_slots: usize,
    next_simd: usize,
    simds: Vec<Simd>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Event {
    Dispatch,
    Arrive { wf: usize },
    SimdTick { cu: usize, simd: usize },
    ComputeDone { wf: usize },
    MemoryDone { wf: usize },
}

struct Gpu<'a, S: TraceSink> {
    cfg: &'a SimConfig,
    out: &'a Collector<S>,
    rng: ChaCha8Rng,
    queue: BinaryHeap<Reverse<(u64, u64, Event)>>,
    seq: u64,
    cus: Vec<ComputeUnit>,
    wavefronts: Vec<Wavefront>,
    groups: Vec<WorkGroup>,
    inst_tasks: Vec<Option<TaskId>>,
    kernel: TaskId,
    next_wg: usize,
    next_cu: usize,
    finished_wgs: usize,
    dispatch_waiting: bool,
    last_dispatch: Option<u64>,
    emitted: u64,
    end_cycle: u64,
}

impl<'a, S: TraceSink> Gpu<'a, S> {
    fn time(&self, cycle: u64) -> f64 {
        cycle as f64 * self.cfg.clock_period
    }

    fn schedule(&mut self, cycle: u64, ev: Event) {
        self.seq += 1;
        self.queue.push(Reverse((cycle, self.seq, ev)));
    }

    fn wake_simd(&mut self, cu: usize, simd: usize, now: u64) {
        let s = &mut self.cus[cu].simds[simd];
        if !s.tick_pending {
            s.tick_pending = true;
            let at = now.max(s.busy_until);
            self.schedule(at, Event::SimdTick { cu, simd });
        }
    }

    fn draw_program(&mut self) -> Vec<Inst> {
        let k = &self.cfg.kernel;
        let m = &self.cfg.memory;
        (0..k.insts_per_wavefront)
            .map(|_| {
                if self.rng.gen_bool(k.mem_inst_fraction) {
                    Inst::Memory { l1_hit: self.rng.gen_bool(m.l1_hit_rate), l2_hit: self.rng.gen_bool(m.l2_hit_rate) }
                } else {
                    Inst::Compute(COMPUTE_OPS[self.rng.gen_range(0..COMPUTE_OPS.len())])
                }
            })
            .collect()
    }

    fn dispatch(&mut self, now: u64) -> Result<()> {
        self.last_dispatch = Some(now);
        let per_wg = self.cfg.kernel.wavefronts_per_wg;
        let mut placed = 0;
        while placed < self.cfg.dispatch_rate && self.next_wg < self.cfg.kernel.work_groups {
            let n = self.cus.len();
            let Some(cu) = (0..n).map(|i| (self.next_cu + i) % n).find(|&c| self.cus[c].free_slots >= per_wg) else {
                break;
            };
            self.next_cu = (cu + 1) % n;
            let wg = self.next_wg;
            self.next_wg += 1;
            placed += 1;

            let location = self.cus[cu].location.clone();
            let wg_task = self.out.begin_task(Some(&self.kernel), "Work-Group", "Exec", &location, self.time(now), None)?;
            self.cus[cu].free_slots -= per_wg;
            self.groups.push(WorkGroup { task: wg_task.clone(), live_wavefronts: per_wg });
            for w in 0..per_wg {
                let simd = self.cus[cu].next_simd;
                self.cus[cu].next_simd = (simd + 1) % self.cfg.simd_per_cu;
                let task = self.out.begin_task(Some(&wg_task), "Wavefront", "Exec", &location, self.time(now + 1), None)?;
                let program = self.draw_program();
                let id = self.wavefronts.len();
                self.wavefronts.push(Wavefront {
                    task,
                    wg,
                    cu,
                    simd,
                    label: format!("{wg}.{w}"),
                    program,
                    pc: 0,
                    pending: Vec::new(),
                });
                self.inst_tasks.push(None);
                self.schedule(now + 1, Event::Arrive { wf: id });
            }
        }
        if self.next_wg < self.cfg.kernel.work_groups {
            if self.cus.iter().any(|c| c.free_slots >= per_wg) {
                self.schedule(now + 1, Event::Dispatch);
            } else {
                self.dispatch_waiting = true;
            }
        }
        Ok(())
    }

    fn issue(&mut self, cu: usize, simd: usize, now: u64) -> Result<()> {
        self.cus[cu].simds[simd].tick_pending = false;
        if self.cus[cu].simds[simd].busy_until > now {
            self.wake_simd(cu, simd, now);
            return Ok(());
        }
        let Some(wf) = self.cus[cu].simds[simd].ready.pop_front() else {
            return Ok(());
        };
        let inst = self.wavefronts[wf].program[self.wavefronts[wf].pc];
        self.wavefronts[wf].pc += 1;
        let w = &self.wavefronts[wf];
        let (wf_task, label, wg) = (w.task.clone(), w.label.clone(), w.wg);
        let mut details = Details::new();
        details.insert("wf".into(), label);
        details.insert("wg".into(), wg.to_string());
        let t = self.time(now);

        match inst {
            Inst::Compute(op) => {
                details.insert("op".into(), op.to_ascii_lowercase());
                let loc = self.cus[cu].simds[simd].location.clone();
                let action = format!("Execute {op} Instruction");
                let task = self.out.begin_task(Some(&wf_task), "Instruction", &action, &loc, t, Some(details))?;
                self.inst_tasks[wf] = Some(task);
                let done = now + self.cfg.simd_cycles();
                self.cus[cu].simds[simd].busy_until = done;
                self.schedule(done, Event::ComputeDone { wf });
            }
            Inst::Memory { l1_hit, l2_hit } => {
                details.insert("op".into(), "load".into());
                let m = &self.cfg.memory;
                let (l1_lat, l2_lat, dram_lat) = (m.l1_latency, m.l2_latency, m.dram_latency);
                let cu_loc = self.cus[cu].location.clone();
                let l1_loc = self.cus[cu].l1.clone();
                let mut pending = Vec::new();

                let inst_task = self.out.begin_task(Some(&wf_task), "Instruction", "Execute LOAD Instruction", &cu_loc, t, Some(details))?;
                pending.push((inst_task.clone(), Close::Task));
                let out = self.out.initiate_request(Some(&inst_task), "Read Memory", &cu_loc, t, None)?;
                pending.push((out.clone(), Close::RequestOut));
                let l1_in = self.out.receive_request(&out, &l1_loc, t, None)?;
                pending.push((l1_in.clone(), Close::RequestIn));
                let mut respond = now + l1_lat;
                if !l1_hit {
                    let l1_out = self.out.initiate_request(Some(&l1_in), "Read Memory", &l1_loc, self.time(respond), None)?;
                    pending.push((l1_out.clone(), Close::RequestOut));
                    let l2_in = self.out.receive_request(&l1_out, L2, self.time(respond), None)?;
                    pending.push((l2_in.clone(), Close::RequestIn));
                    respond += l2_lat;
                    if !l2_hit {
                        let l2_out = self.out.initiate_request(Some(&l2_in), "Read Memory", L2, self.time(respond), None)?;
                        pending.push((l2_out.clone(), Close::RequestOut));
                        let dram_in = self.out.receive_request(&l2_out, DRAM, self.time(respond), None)?;
                        pending.push((dram_in, Close::RequestIn));
                        respond += dram_lat;
                    }
                }
                self.wavefronts[wf].pending = pending;
                self.cus[cu].simds[simd].busy_until = now + 1;
                self.schedule(respond, Event::MemoryDone { wf });
            }
        }
        if !self.cus[cu].simds[simd].ready.is_empty() {
            self.wake_simd(cu, simd, now);
        }
        Ok(())
    }

    fn close(&mut self, id: &TaskId, how: Close, t: f64) -> Result<()> {
        match how {
            Close::Task => self.out.end_task(id, t)?,
            Close::RequestIn => self.out.complete_request(id, t)?,
            Close::RequestOut => self.out.receive_response(id, t)?,
        }
        self.emitted += 1;
        Ok(())
    }

    /// The wavefront's current instruction has finished at `now`.
    fn advance(&mut self, wf: usize, now: u64) -> Result<()> {
        let w = &self.wavefronts[wf];
        let (cu, simd) = (w.cu, w.simd);
        if w.pc < w.program.len() {
            self.cus[cu].simds[simd].ready.push_back(wf);
            self.wake_simd(cu, simd, now);
            return Ok(());
        }
        let t = self.time(now);
        let task = w.task.clone();
        let wg = w.wg;
        self.close(&task, Close::Task, t)?;
        self.cus[cu].free_slots += 1;
        self.groups[wg].live_wavefronts -= 1;
        if self.groups[wg].live_wavefronts == 0 {
            let g = self.groups[wg].task.clone();
            self.close(&g, Close::Task, t)?;
            self.finished_wgs += 1;
            if self.finished_wgs == self.cfg.kernel.work_groups {
                self.end_cycle = now;
            }
        }
        if self.dispatch_waiting && self.cus[cu].free_slots >= self.cfg.kernel.wavefronts_per_wg {
            self.dispatch_waiting = false;
            let at = self.last_dispatch.map_or(now, |d| now.max(d + 1));
            self.schedule(at, Event::Dispatch);
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        if self.cfg.kernel.work_groups > 0 {
            self.schedule(0, Event::Dispatch);
        }
        while let Some(Reverse((now, _, ev))) = self.queue.pop() {
            match ev {
                Event::Dispatch => self.dispatch(now)?,
                Event::Arrive { wf } => {
                    if self.wavefronts[wf].program.is_empty() {
                        self.advance(wf, now)?;
                    } else {
                        let (cu, simd) = (self.wavefronts[wf].cu, self.wavefronts[wf].simd);
                        self.cus[cu].simds[simd].ready.push_back(wf);
                        self.wake_simd(cu, simd, now);
                    }
                }
                Event::SimdTick { cu, simd } => self.issue(cu, simd, now)?,
                Event::ComputeDone { wf } => {
                    let task = self.inst_tasks[wf].take().expect("compute instruction in flight");
                    self.close(&task, Close::Task, self.time(now))?;
                    self.advance(wf, now)?;
                }
                Event::MemoryDone { wf } => {
                    let t = self.time(now);
                    let pending = std::mem::take(&mut self.wavefronts[wf].pending);
                    for (id, how) in pending.into_iter().rev() {
                        self.close(&id, how, t)?;
                    }
                    self.advance(wf, now)?;
                }
            }
        }
        Ok(())
    }
}

/// Runs the kernel described by `config`, emitting every task into
/// `session`. The session is flushed before returning.
pub fn simulate<S: TraceSink>(config: &SimConfig, session: &Collector<S>) -> Result<SimResult> {
    config.validate()?;
    let kernel = session.begin_task(None, "Kernel", "Run", COMMAND_PROCESSOR, 0.0, None)?;
    let cus = (0..config.cu_count)
        .map(|cu| ComputeUnit {
            location: cu_name(cu),
            l1: l1_name(cu),
            free_slots: config.max_wavefronts_per_cu,
            next_simd: 0,
            simds: (0..config.simd_per_cu)
                .map(|s| Simd { location: simd_name(cu, s), ready: VecDeque::new(), busy_until: 0, tick_pending: false })
                .collect(),
        })
        .collect();
    let mut gpu = Gpu {
        cfg: config,
        out: session,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        queue: BinaryHeap::new(),
        seq: 0,
        cus,
        wavefronts: Vec::new(),
        groups: Vec::new(),
        inst_tasks: Vec::new(),
        kernel: kernel.clone(),
        next_wg: 0,
        next_cu: 0,
        finished_wgs: 0,
        dispatch_waiting: false,
        last_dispatch: None,
        emitted: 0,
        end_cycle: 0,
    };
    gpu.run()?;
    let end = gpu.end_cycle;
    gpu.close(&kernel, Close::Task, gpu.time(end))?;
    session.flush()?;
    Ok(SimResult { total_time: gpu.time(end), cycles: end, tasks_emitted: gpu.emitted })
}

/// Simulates into memory with ids seeded from the config seed.
pub fn simulate_to_memory(config: &SimConfig) -> Result<(SimResult, Vec<Task>)> {
    let sink = MemorySink::new();
    let collector = Collector::new(sink.clone(), CollectorOptions { seed: Some(config.seed), ..Default::default() });
    let result = simulate(config, &collector)?;
    collector.finish()?;
    Ok((result, sink.into_tasks()))
}

#[derive(Debug, Clone)]
pub struct DispatchExperiment {
    pub single: SimResult,
    pub double: SimResult,
    /// `total_time(rate 1) / total_time(rate 2)`.
    pub speedup: f64,
    pub single_trace: Vec<Task>,
    pub double_trace: Vec<Task>,
}

/// Runs `base` at dispatch rates 1 and 2, all else equal.
pub fn dispatch_experiment(base: &SimConfig) -> Result<DispatchExperiment> {
    let (single, single_trace) = simulate_to_memory(&SimConfig { dispatch_rate: 1, ..base.clone() })?;
    let (double, double_trace) = simulate_to_memory(&SimConfig { dispatch_rate: 2, ..base.clone() })?;
    Ok(DispatchExperiment { single, double, speedup: single.total_time / double.total_time, single_trace, double_trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsonl;
    use crate::model::{validate_trace, TaskKind};

    fn tiny() -> SimConfig {
        SimConfig {
            kernel: KernelConfig { work_groups: 1, wavefronts_per_wg: 1, insts_per_wavefront: 1, mem_inst_fraction: 0.0 },
            ..SimConfig::default()
        }
    }

    #[test]
    fn defaults() {
        let c = default_config();
        assert_eq!(c.simd_per_cu, 4);
        assert_eq!(c.max_wavefronts_per_cu, 40);
        assert_eq!(c.cu_count, 8);
        assert_eq!(c.simd_width, 16);
        assert_eq!(c.dispatch_rate, 1);
        c.validate().unwrap();
    }

    #[test]
    fn single_instruction_schedule() {
        // Dispatch in cycle 0, the wavefront starts in cycle 1 and its one
        // compute instruction holds the SIMD for 64 / 16 = 4 cycles.
        let (r, tasks) = simulate_to_memory(&tiny()).unwrap();
        assert_eq!(r.cycles, 5);
        assert!((r.total_time - 5e-9).abs() < 1e-21);
        let count = |cat: &str| tasks.iter().filter(|t| t.category == cat).count();
        assert_eq!(tasks.len(), 4);
        assert_eq!((count("Kernel"), count("Work-Group"), count("Wavefront"), count("Instruction")), (1, 1, 1, 1));
        let inst = tasks.iter().find(|t| t.category == "Instruction").unwrap();
        assert_eq!((inst.start, inst.end), (1e-9, 5e-9));
        assert_eq!(inst.location, "GPU1.CU00.SIMD0");
        assert!(inst.details.contains_key("op") && inst.details.contains_key("wf") && inst.details.contains_key("wg"));
        assert!(validate_trace(&tasks, true).is_clean());
    }

    #[test]
    fn l1_hits_stay_at_l1() {
        let mut cfg = tiny();
        cfg.kernel = KernelConfig { work_groups: 16, wavefronts_per_wg: 2, insts_per_wavefront: 5, mem_inst_fraction: 1.0 };
        cfg.memory.l1_hit_rate = 1.0;
        let (_, tasks) = simulate_to_memory(&cfg).unwrap();
        let insts = tasks.iter().filter(|t| t.category == "Instruction").count();
        let outs: Vec<_> = tasks.iter().filter(|t| t.kind() == TaskKind::RequestOut).collect();
        let ins: Vec<_> = tasks.iter().filter(|t| t.kind() == TaskKind::RequestIn).collect();
        assert_eq!(insts, 16 * 2 * 5);
        assert_eq!(outs.len(), insts);
        assert_eq!(ins.len(), insts);
        assert!(ins.iter().all(|t| t.location.starts_with("GPU1.L1_")));
        assert!(outs.iter().all(|t| t.location.starts_with("GPU1.CU")));
        assert!(validate_trace(&tasks, true).is_clean());
    }

    #[test]
    fn misses_reach_dram() {
        let mut cfg = tiny();
        cfg.kernel = KernelConfig { work_groups: 4, wavefronts_per_wg: 1, insts_per_wavefront: 2, mem_inst_fraction: 1.0 };
        cfg.memory.l1_hit_rate = 0.0;
        cfg.memory.l2_hit_rate = 0.0;
        let (r, tasks) = simulate_to_memory(&cfg).unwrap();
        assert_eq!(tasks.iter().filter(|t| t.location == DRAM).count(), 8);
        assert!(validate_trace(&tasks, true).is_clean());
        // The fourth work-group is dispatched in cycle 3 and its wavefront
        // starts in cycle 4, then waits out two full DRAM round trips.
        assert_eq!(r.cycles, 3 + 1 + 2 * (10 + 40 + 150));
    }

    #[test]
    fn same_seed_same_bytes() {
        let render = || {
            let (_, tasks) = simulate_to_memory(&SimConfig { kernel: KernelConfig { work_groups: 64, ..Default::default() }, ..Default::default() }).unwrap();
            tasks.iter().map(jsonl::to_line).collect::<Vec<_>>().join("\n")
        };
        assert_eq!(render(), render());
    }

    #[test]
    fn config_validation() {
        let mut c = default_config();
        c.kernel.wavefronts_per_wg = 9;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = default_config();
        c.memory.l1_hit_rate = 1.5;
        assert!(c.validate().is_err());
        let mut c = default_config();
        c.dispatch_rate = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_config() {
        let cfg = SimConfig::from_toml_str("dispatch_rate = 2\nseed = 9\n[kernel]\nwork_groups = 10\n[memory]\nl1_latency = 4\n").unwrap();
        assert_eq!(cfg.dispatch_rate, 2);
        assert_eq!(cfg.kernel.work_groups, 10);
        assert_eq!(cfg.kernel.wavefronts_per_wg, 1);
        assert_eq!(cfg.memory.l1_latency, 4);
        assert!(SimConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn empty_kernel() {
        let mut c = tiny();
        c.kernel.work_groups = 0;
        let (r, tasks) = simulate_to_memory(&c).unwrap();
        assert_eq!(r.total_time, 0.0);
        assert_eq!(tasks.len(), 1);
    }
}
