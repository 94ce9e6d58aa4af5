//! Benchmark runner.
//!
//! Every (instance, engine) pair runs under a wall-clock limit, either on a
//! worker thread of this process or in a child `moco solve --stream`
//! process with an address-space cap. The child streams archive snapshots,
//! so a killed run still reports its last archive. Per instance, the fronts
//! of all runs form the reference front that hypervolumes are measured
//! against.

use std::io::{BufRead, BufReader, Read};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use moco_core::metrics::{hypervolume, reference_front, relative_hypervolume, ReferenceFront};
use moco_core::model::{MocoInstance, ObjVec, Status};
use moco_core::{EngineConfig, EngineKind, Event, Limits};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::opb::{parse_mo_opb, render_mo_opb, OpbError};
use crate::report::{DocStats, StreamLine};

/// Fixed CSV header of [`SuiteReport::to_csv`].
pub const CSV_HEADER: &str = "instance,engine,status,wall_ms,sat_calls,cores,front_size,hv,hv_box";

/// Extra time a child gets past its own deadline before it is killed.
const KILL_GRACE: Duration = Duration::from_secs(2);

fn default_timeout() -> f64 {
    3600.0
}

fn default_memory() -> u64 {
    10 * 1024
}

fn default_jobs() -> usize {
    1
}

/// Suite description, read from TOML.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub engines: Vec<String>,
    /// Relative paths resolve against the config file's directory.
    pub instances: Vec<PathBuf>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    /// Address-space cap per run; only enforced when `isolate` is set.
    #[serde(default = "default_memory")]
    pub memory_mb: u64,
    #[serde(default)]
    pub isolate: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub anytime_strict: bool,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {err}")]
    Instance { path: PathBuf, err: OpbError },
    #[error("{path}: {err}")]
    Io { path: PathBuf, err: std::io::Error },
}

impl BenchError {
    pub fn is_parse_error(&self) -> bool {
        matches!(self, BenchError::Config(_) | BenchError::Instance { .. })
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub engines: Vec<EngineKind>,
    pub timeout: Duration,
    pub memory_mb: u64,
    /// Run each pair in a child process of this executable.
    pub isolate_exe: Option<PathBuf>,
    pub seed: u64,
    pub jobs: usize,
    pub anytime_strict: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            engines: EngineKind::ALL.to_vec(),
            timeout: Duration::from_secs_f64(default_timeout()),
            memory_mb: default_memory(),
            isolate_exe: None,
            seed: 0,
            jobs: 1,
            anytime_strict: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub name: String,
    pub instance: MocoInstance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Complete,
    TimeoutPartial,
    Error,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Complete => "complete",
            RunStatus::TimeoutPartial => "timeout-partial",
            RunStatus::Error => "error",
        }
    }
}

impl From<Status> for RunStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Complete => RunStatus::Complete,
            Status::TimeoutPartial => RunStatus::TimeoutPartial,
        }
    }
}

/// Outcome of one run before hypervolumes are known.
#[derive(Debug, Clone)]
struct RawRun {
    status: RunStatus,
    error: Option<String>,
    wall: Duration,
    stats: DocStats,
    front: Vec<ObjVec>,
    /// Archive snapshots on every change.
    trace: Vec<(Duration, Vec<ObjVec>)>,
}

impl RawRun {
    fn failed(msg: String, wall: Duration) -> Self {
        RawRun {
            status: RunStatus::Error,
            error: Some(msg),
            wall,
            stats: DocStats::default(),
            front: Vec::new(),
            trace: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub t_ms: f64,
    pub hv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub engine: String,
    pub status: String,
    pub wall_ms: f64,
    pub sat_calls: u64,
    pub cores: u64,
    pub iterations: u64,
    pub front_size: usize,
    /// Hypervolume relative to the reference front's own, in `[0, 1]`.
    pub hv: f64,
    /// Hypervolume normalized by the ideal/reference-point box.
    pub hv_box: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Internal units.
    pub img_front: Vec<Vec<u64>>,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    engine: &'a str,
    status: &'a str,
    wall_ms: f64,
    sat_calls: u64,
    cores: u64,
    front_size: usize,
    hv: f64,
    hv_box: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceReference {
    pub instance: String,
    pub front: Vec<Vec<u64>>,
    pub ideal: Vec<u64>,
    pub reference: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub runs: Vec<RunReport>,
    pub references: Vec<InstanceReference>,
}

impl SuiteReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.runs {
            w.serialize(CsvRow {
                instance: &r.instance,
                engine: &r.engine,
                status: &r.status,
                wall_ms: r.wall_ms,
                sat_calls: r.sat_calls,
                cores: r.cores,
                front_size: r.front_size,
                hv: r.hv,
                hv_box: r.hv_box,
            })
            .expect("in-memory write");
        }
        if self.runs.is_empty() {
            return format!("{CSV_HEADER}\n");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

fn engine_config(opts: &RunOptions) -> EngineConfig {
    EngineConfig {
        seed: opts.seed,
        anytime_strict: opts.anytime_strict,
        limits: Limits::timeout(opts.timeout),
        ..EngineConfig::default()
    }
}

fn run_in_process(inst: &MocoInstance, kind: EngineKind, opts: &RunOptions) -> RawRun {
    let cfg = engine_config(opts);
    let start = Instant::now();
    let mut trace = Vec::new();
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let mut obs = |e: &Event<'_>| {
            if let Event::ArchiveChanged { archive } = e {
                trace.push((start.elapsed(), archive.vectors().cloned().collect()));
            }
        };
        moco_core::solve(kind, inst, &cfg, &mut obs)
    }));
    let wall = start.elapsed();
    match outcome {
        Ok(Ok(res)) => RawRun {
            status: res.status.into(),
            error: None,
            wall,
            stats: DocStats {
                sat_calls: res.stats.sat_calls,
                cores: res.stats.cores,
                iterations: res.stats.iterations,
            },
            front: res.img_front,
            trace,
        },
        Ok(Err(e)) => RawRun::failed(e.to_string(), wall),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "engine panicked".to_string());
            RawRun::failed(msg, wall)
        }
    }
}

fn limit_address_space(cmd: &mut Command, memory_mb: u64) {
    use std::os::unix::process::CommandExt;
    if memory_mb == 0 {
        return;
    }
    let bytes = (memory_mb as libc::rlim_t).saturating_mul(1024 * 1024);
    // SAFETY: setrlimit is async-signal-safe and touches no shared state.
    unsafe {
        cmd.pre_exec(move || {
            let lim = libc::rlimit {
                rlim_cur: bytes,
                rlim_max: bytes,
            };
            if libc::setrlimit(libc::RLIMIT_AS, &lim) != 0 {
                return Err(std::io::Error::last_os_error());
            }
            Ok(())
        });
    }
}

fn run_isolated(exe: &Path, inst: &MocoInstance, kind: EngineKind, opts: &RunOptions) -> RawRun {
    let start = Instant::now();
    let file = match tempfile::NamedTempFile::new()
        .and_then(|mut f| std::io::Write::write_all(&mut f, render_mo_opb(inst).as_bytes()).map(|_| f))
    {
        Ok(f) => f,
        Err(e) => return RawRun::failed(format!("temp file: {e}"), start.elapsed()),
    };
    let mut cmd = Command::new(exe);
    cmd.arg("solve")
        .args(["--engine", kind.name()])
        .args(["--timeout", &opts.timeout.as_secs_f64().to_string()])
        .args(["--seed", &opts.seed.to_string()])
        .arg("--stream")
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if opts.anytime_strict {
        cmd.arg("--anytime-strict");
    }
    limit_address_space(&mut cmd, opts.memory_mb);
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return RawRun::failed(format!("spawn {}: {e}", exe.display()), start.elapsed()),
    };

    let (tx, rx) = mpsc::channel();
    let stdout = child.stdout.take().expect("piped");
    let reader = thread::spawn(move || {
        for line in BufReader::new(stdout).lines().map_while(Result::ok) {
            if let Ok(l) = serde_json::from_str::<StreamLine>(&line) {
                if tx.send(l).is_err() {
                    break;
                }
            }
        }
    });
    let mut stderr = child.stderr.take().expect("piped");
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let deadline = start + opts.timeout + KILL_GRACE;
    let mut killed = false;
    let exit = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                killed = true;
                break child.wait().ok();
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(_) => break None,
        }
    };
    let _ = reader.join();
    let err_text = err_reader.join().unwrap_or_default();
    let wall = start.elapsed();

    let mut trace = Vec::new();
    let mut result = None;
    for line in rx.try_iter() {
        match line {
            StreamLine::Archive { t_us, img_front } => trace.push((
                Duration::from_micros(t_us),
                img_front.into_iter().map(ObjVec::new).collect::<Vec<_>>(),
            )),
            StreamLine::Result { doc, .. } => result = Some(doc),
        }
    }
    match result {
        Some(doc) => RawRun {
            status: match doc.status.as_str() {
                "complete" => RunStatus::Complete,
                _ => RunStatus::TimeoutPartial,
            },
            error: None,
            wall,
            stats: doc.stats.clone(),
            front: doc.internal_front(),
            trace,
        },
        None if killed => RawRun {
            status: RunStatus::TimeoutPartial,
            error: None,
            wall,
            stats: DocStats::default(),
            front: trace.last().map(|t| t.1.clone()).unwrap_or_default(),
            trace,
        },
        None => {
            let tail: String = err_text.lines().last().unwrap_or("").to_string();
            let code = exit.map_or("unknown".to_string(), |s| s.to_string());
            RawRun::failed(format!("child exited ({code}): {tail}"), wall)
        }
    }
}

fn run_pair(inst: &MocoInstance, kind: EngineKind, opts: &RunOptions) -> RawRun {
    match &opts.isolate_exe {
        Some(exe) => run_isolated(exe, inst, kind, opts),
        None => run_in_process(inst, kind, opts),
    }
}

fn round_ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

fn build_reports(name: &str, kinds: &[EngineKind], raws: Vec<RawRun>) -> (Vec<RunReport>, InstanceReference) {
    let ok: Vec<&[ObjVec]> = raws
        .iter()
        .filter(|r| r.status != RunStatus::Error)
        .map(|r| r.front.as_slice())
        .collect();
    let rf: ReferenceFront = reference_front(ok);
    let hv_box = |front: &[ObjVec]| {
        if rf.front.is_empty() {
            relative_hypervolume(front, &rf)
        } else {
            hypervolume(front, &rf.ideal, &rf.reference).normalized
        }
    };
    let reports = kinds
        .iter()
        .zip(raws)
        .map(|(kind, raw)| RunReport {
            instance: name.to_string(),
            engine: kind.name().to_string(),
            status: raw.status.as_str().to_string(),
            wall_ms: round_ms(raw.wall),
            sat_calls: raw.stats.sat_calls,
            cores: raw.stats.cores,
            iterations: raw.stats.iterations,
            front_size: raw.front.len(),
            hv: if raw.status == RunStatus::Error {
                0.0
            } else {
                relative_hypervolume(&raw.front, &rf)
            },
            hv_box: if raw.status == RunStatus::Error {
                0.0
            } else {
                hv_box(&raw.front)
            },
            error: raw.error,
            img_front: raw.front.iter().map(|y| y.values().to_vec()).collect(),
            trace: raw
                .trace
                .iter()
                .map(|(t, f)| TracePoint {
                    t_ms: round_ms(*t),
                    hv: relative_hypervolume(f, &rf),
                })
                .collect(),
        })
        .collect();
    let reference = InstanceReference {
        instance: name.to_string(),
        front: rf.front.iter().map(|y| y.values().to_vec()).collect(),
        ideal: rf.ideal,
        reference: rf.reference,
    };
    (reports, reference)
}

/// Runs every engine on every instance and scores the results.
pub fn run_instances(instances: &[BenchInstance], opts: &RunOptions) -> SuiteReport {
    let pairs: Vec<(usize, EngineKind)> = (0..instances.len())
        .flat_map(|i| opts.engines.iter().map(move |&k| (i, k)))
        .collect();
    let results: Mutex<Vec<Option<RawRun>>> = Mutex::new(vec![None; pairs.len()]);
    let next = AtomicUsize::new(0);
    thread::scope(|s| {
        for _ in 0..opts.jobs.max(1) {
            s.spawn(|| loop {
                let at = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, kind)) = pairs.get(at) else {
                    break;
                };
                let raw = run_pair(&instances[i].instance, kind, opts);
                results.lock().unwrap()[at] = Some(raw);
            });
        }
    });
    let mut results = results.into_inner().unwrap().into_iter().map(|r| r.expect("every pair ran"));
    let mut runs = Vec::new();
    let mut references = Vec::new();
    for inst in instances {
        let raws: Vec<RawRun> = results.by_ref().take(opts.engines.len()).collect();
        let (r, rf) = build_reports(&inst.name, &opts.engines, raws);
        runs.extend(r);
        references.push(rf);
    }
    SuiteReport { runs, references }
}

pub fn load_config(path: &Path) -> Result<SuiteConfig, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|err| BenchError::Io {
        path: path.to_path_buf(),
        err,
    })?;
    toml::from_str(&text).map_err(|e| BenchError::Config(e.to_string()))
}

pub fn load_instance(path: &Path) -> Result<MocoInstance, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|err| BenchError::Io {
        path: path.to_path_buf(),
        err,
    })?;
    parse_mo_opb(&text).map_err(|err| BenchError::Instance {
        path: path.to_path_buf(),
        err,
    })
}

/// Loads the instances of a suite and turns it into run options.
pub fn prepare_suite(
    cfg: &SuiteConfig,
    base_dir: &Path,
    exe: Option<PathBuf>,
) -> Result<(Vec<BenchInstance>, RunOptions), BenchError> {
    let engines = cfg
        .engines
        .iter()
        .map(|e| e.parse::<EngineKind>().map_err(|e| BenchError::Config(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if !(cfg.timeout_secs >= 0.0 && cfg.timeout_secs.is_finite()) {
        return Err(BenchError::Config(format!("bad timeout {}", cfg.timeout_secs)));
    }
    let instances = cfg
        .instances
        .iter()
        .map(|p| {
            let full = base_dir.join(p);
            Ok(BenchInstance {
                name: p.display().to_string(),
                instance: load_instance(&full)?,
            })
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    let opts = RunOptions {
        engines,
        timeout: Duration::from_secs_f64(cfg.timeout_secs),
        memory_mb: cfg.memory_mb,
        isolate_exe: if cfg.isolate { exe } else { None },
        seed: cfg.seed,
        jobs: cfg.jobs,
        anytime_strict: cfg.anytime_strict,
    };
    if cfg.isolate && opts.isolate_exe.is_none() {
        return Err(BenchError::Config("isolation needs the moco executable".into()));
    }
    Ok((instances, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gen_set_cover;

    fn small_suite() -> Vec<BenchInstance> {
        vec![BenchInstance {
            name: "sc".into(),
            instance: gen_set_cover(5, 6, 2, 0.5, 5, 1).unwrap(),
        }]
    }

    #[test]
    fn exact_engines_score_one() {
        let opts = RunOptions {
            engines: vec![EngineKind::CoreGuided, EngineKind::HittingSets],
            timeout: Duration::from_secs(60),
            ..RunOptions::default()
        };
        let rep = run_instances(&small_suite(), &opts);
        assert_eq!(rep.runs.len(), 2);
        for r in &rep.runs {
            assert_eq!(r.status, "complete");
            assert_eq!(r.hv, 1.0);
            assert!(r.hv_box > 0.0 && r.hv_box <= 1.0);
        }
    }

    #[test]
    fn zero_timeout_is_partial() {
        let opts = RunOptions {
            timeout: Duration::ZERO,
            ..RunOptions::default()
        };
        let rep = run_instances(&small_suite(), &opts);
        assert_eq!(rep.runs.len(), 4);
        assert!(rep.runs.iter().all(|r| r.status == "timeout-partial"));
    }

    #[test]
    fn csv_header_is_fixed() {
        let rep = run_instances(&small_suite(), &RunOptions::default());
        assert_eq!(rep.to_csv().lines().next(), Some(CSV_HEADER));
        let empty = SuiteReport {
            runs: vec![],
            references: vec![],
        };
        assert_eq!(empty.to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn parallel_jobs_keep_row_order() {
        let mut insts = small_suite();
        insts.push(BenchInstance {
            name: "sc2".into(),
            instance: gen_set_cover(4, 5, 3, 0.6, 4, 2).unwrap(),
        });
        let one = run_instances(&insts, &RunOptions::default());
        let four = run_instances(&insts, &RunOptions { jobs: 4, ..RunOptions::default() });
        let key = |r: &SuiteReport| -> Vec<(String, String, String, Vec<Vec<u64>>)> {
            r.runs
                .iter()
                .map(|x| (x.instance.clone(), x.engine.clone(), x.status.clone(), x.img_front.clone()))
                .collect()
        };
        assert_eq!(key(&one), key(&four));
    }

    #[test]
    fn config_defaults() {
        let cfg: SuiteConfig = toml::from_str("engines = [\"p-minimal\"]\ninstances = [\"a.opb\"]\n").unwrap();
        assert_eq!(cfg.timeout_secs, 3600.0);
        assert_eq!(cfg.memory_mb, 10240);
        assert!(!cfg.isolate);
        assert!(toml::from_str::<SuiteConfig>("engines = []\ninstances = []\nbogus = 1\n").is_err());
    }
}
