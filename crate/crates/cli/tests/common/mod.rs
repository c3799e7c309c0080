//! Fixed scenes rendered by the golden-file and acceptance tests.

use std::path::PathBuf;
use std::sync::Arc;

use daisen_core::api::{Api, Params};
use daisen_core::metrics::Expectations;
use daisen_core::sim::{self, KernelConfig, SimConfig};
use daisen_core::{Mode, TraceStore};

pub fn golden_api() -> Api {
    let cfg = SimConfig {
        seed: 7,
        kernel: KernelConfig { work_groups: 24, wavefronts_per_wg: 2, insts_per_wavefront: 6, mem_inst_fraction: 0.4 },
        ..SimConfig::default()
    };
    let (_, tasks) = sim::simulate_to_memory(&cfg).unwrap();
    let store = TraceStore::ingest(tasks, Mode::Strict).unwrap();
    let exp = Expectations::from_toml_str("\"SIMD\\\\d+:ConcurrentTasks\" = 1.0\n\"L1_\\\\d+:BufferPressure\" = 1.0\n").unwrap();
    Api::new(Arc::new(store), exp)
}

fn first_instruction(api: &Api) -> String {
    let mut insts: Vec<_> = api.store().tasks().iter().filter(|t| t.category == "Instruction").collect();
    insts.sort_by(|a, b| a.start.total_cmp(&b.start).then_with(|| a.id.cmp(&b.id)));
    insts[0].id.to_string()
}

pub fn scenes(api: &Api) -> Vec<(&'static str, Params)> {
    let p = |pairs: &[(&str, &str)]| pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect::<Params>();
    let wf = api.store().get_task(&first_instruction(api)).unwrap().parent_id.clone().unwrap().to_string();
    vec![
        ("component_cu00", p(&[("kind", "component"), ("component", "CU00")])),
        ("component_l1_0_zoom", p(&[("kind", "component"), ("component", "L1_0"), ("t0", "0"), ("t1", "1.5e-7")])),
        (
            "overview_simd",
            p(&[("kind", "overview"), ("filter", "CU0[01]\\.SIMD"), ("metric_primary", "ConcurrentTasks"), ("bins", "40")]),
        ),
        (
            "overview_l1_dual",
            p(&[
                ("kind", "overview"),
                ("filter", "L1_"),
                ("metric_primary", "BufferPressure"),
                ("metric_secondary", "AvgReqLatency"),
                ("page_size", "4"),
                ("page", "1"),
            ]),
        ),
        ("task_wavefront", p(&[("kind", "task"), ("task_id", &wf)])),
    ]
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Compares every scene with its golden file, or rewrites the files when
/// `bless` is set. Returns the names that differ.
pub fn check_golden(api: &Api, bless: bool) -> Vec<String> {
    let mut mismatched = Vec::new();
    for (name, params) in scenes(api) {
        let svg = api.render(&api.view_spec(&params).unwrap()).unwrap();
        let path = golden_dir().join(format!("{name}.svg"));
        if bless {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &svg).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(expected) if expected == svg => {}
            Ok(_) => mismatched.push(format!("{name}: differs")),
            Err(e) => mismatched.push(format!("{name}: {e}")),
        }
    }
    mismatched
}
