//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use moco_core::engine::{FenceBump, InnerEngine, Stratification};
use moco_core::metrics::{hypervolume, reference_front, relative_hypervolume};
use moco_core::model::{MocoInstance, ObjVec};
use moco_core::oracle::{exact_front, DEFAULT_CAP};
use moco_core::{EngineConfig, EngineKind, Event, Limits};
use serde::Serialize;

use crate::bench::{load_config, load_instance, prepare_suite, run_instances, BenchError};
use crate::gen::{gen_random_pb, gen_set_cover};
use crate::opb::render_mo_opb;
use crate::report::{FrontDocument, StreamLine};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "moco", version, about = "Exact multi-objective PB optimization")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Compute the Pareto front of an MO-OPB instance.
    Solve(SolveArgs),
    /// Exhaustive Pareto front of a small instance.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded instance.
    Gen {
        #[command(subcommand)]
        family: GenCmd,
    },
    /// Run a benchmark suite described by a TOML file.
    Bench {
        config: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the full JSON report.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Hypervolume of front documents against their combined reference.
    Hv(HvArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BumpArg {
    BlockedValue,
    SingleStep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InnerArg {
    CoreGuided,
    PMinimal,
}

#[derive(Debug, Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(short, long, default_value = "core-guided", value_parser = parse_engine)]
    engine: EngineKind,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Only report solutions proven optimal.
    #[arg(long)]
    anytime_strict: bool,
    #[arg(long, value_enum, default_value = "blocked-value")]
    fence_bump: BumpArg,
    #[arg(long, default_value_t = 8)]
    strat_ratio: u64,
    #[arg(long, default_value_t = 16)]
    strat_max: usize,
    /// Solver for relaxed formulas of the hitting-sets engine.
    #[arg(long, value_enum, default_value = "core-guided")]
    inner: InnerArg,
    /// Keep feasibility cores of the hitting-sets engine unminimized.
    #[arg(long)]
    raw_cores: bool,
    /// Emit JSON lines: one archive snapshot per change, then the result.
    #[arg(long)]
    stream: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenCmd {
    /// Multi-objective set cover.
    Sc {
        #[arg(long)]
        elements: usize,
        #[arg(long)]
        sets: usize,
        #[arg(short, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        #[arg(long, default_value_t = 10)]
        weight_max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random PB constraints with two weight bands.
    Pb {
        #[arg(long)]
        vars: usize,
        #[arg(short, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct HvArgs {
    #[arg(required = true)]
    fronts: Vec<PathBuf>,
    /// Reference point in reported units; defaults to the combined front's
    /// maximum plus one.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    reference: Option<Vec<i64>>,
    /// Ideal point in reported units; defaults to the combined front's
    /// minimum.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ideal: Option<Vec<i64>>,
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    s.parse().map_err(|e: moco_core::Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        if e.is_parse_error() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Internal(e.into())
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<MocoInstance, Failure> {
    load_instance(path).map_err(Failure::from)
}

fn solve_cmd(a: SolveArgs) -> Result<(), Failure> {
    let inst = read_instance(&a.file)?;
    let cfg = EngineConfig {
        anytime_strict: a.anytime_strict,
        stratification: Stratification {
            ratio: a.strat_ratio,
            max_partition: a.strat_max,
        },
        fence_bump: match a.fence_bump {
            BumpArg::BlockedValue => FenceBump::BlockedValue,
            BumpArg::SingleStep => FenceBump::SingleStep,
        },
        seed: a.seed,
        limits: match a.timeout {
            Some(t) if t.is_finite() && t >= 0.0 => Limits::timeout(Duration::from_secs_f64(t)),
            Some(t) => return Err(Failure::Usage(format!("bad timeout {t}"))),
            None => Limits::none(),
        },
        minimize_cores: !a.raw_cores,
        inner: match a.inner {
            InnerArg::CoreGuided => InnerEngine::CoreGuided,
            InnerArg::PMinimal => InnerEngine::PMinimal,
        },
        ..EngineConfig::default()
    };
    let start = Instant::now();
    let mut sink_err: Option<std::io::Error> = None;
    let mut obs = |e: &Event<'_>| {
        if !a.stream || sink_err.is_some() {
            return;
        }
        if let Event::ArchiveChanged { archive } = e {
            let line = StreamLine::Archive {
                t_us: start.elapsed().as_micros() as u64,
                img_front: archive.vectors().map(|y| y.values().to_vec()).collect(),
            };
            let mut out = std::io::stdout().lock();
            let res = serde_json::to_writer(&mut out, &line)
                .map_err(std::io::Error::from)
                .and_then(|_| out.write_all(b"\n"))
                .and_then(|_| out.flush());
            if let Err(err) = res {
                sink_err = Some(err);
            }
        }
    };
    let res = moco_core::solve(a.engine, &inst, &cfg, &mut obs).map_err(|e| Failure::Internal(e.into()))?;
    if let Some(e) = sink_err {
        return Err(Failure::Internal(e.into()));
    }
    let doc = FrontDocument::from_result(a.engine.name(), &inst, &res);
    if a.stream {
        let line = StreamLine::Result {
            wall_us: start.elapsed().as_micros() as u64,
            doc,
        };
        let text = serde_json::to_string(&line).map_err(anyhow::Error::from)? + "\n";
        emit(a.output.as_deref(), &text)?;
    } else {
        emit(a.output.as_deref(), &doc.to_json())?;
    }
    Ok(())
}

fn oracle_cmd(file: &Path, cap: usize, output: Option<&Path>) -> Result<(), Failure> {
    let inst = read_instance(file)?;
    let res = exact_front(&inst, cap).map_err(|e| Failure::Internal(e.into()))?;
    emit(output, &FrontDocument::from_oracle(&inst, &res).to_json())?;
    Ok(())
}

fn gen_cmd(family: GenCmd) -> Result<(), Failure> {
    let (inst, output) = match family {
        GenCmd::Sc {
            elements,
            sets,
            m,
            density,
            weight_max,
            seed,
            output,
        } => (gen_set_cover(elements, sets, m, density, weight_max, seed), output),
        GenCmd::Pb { vars, m, seed, output } => (gen_random_pb(vars, m, seed), output),
    };
    let inst = inst.map_err(|e| Failure::Usage(e.to_string()))?;
    emit(output.as_deref(), &render_mo_opb(&inst))?;
    Ok(())
}

fn bench_cmd(config: &Path, csv: Option<&Path>, json: Option<&Path>) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let exe = std::env::current_exe().ok();
    let (instances, opts) = prepare_suite(&cfg, base, exe)?;
    let report = run_instances(&instances, &opts);
    emit(csv, &report.to_csv())?;
    if let Some(p) = json {
        emit(Some(p), &report.to_json())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct HvLine<'a> {
    file: &'a str,
    raw: f64,
    normalized: f64,
    relative: f64,
    exact: bool,
}

fn hv_cmd(a: HvArgs) -> Result<(), Failure> {
    let mut docs = Vec::new();
    for p in &a.fronts {
        let text = std::fs::read_to_string(p)
            .with_context(|| format!("reading {}", p.display()))?;
        let doc: FrontDocument = serde_json::from_str(&text)
            .map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))?;
        docs.push(doc);
    }
    let offsets = docs[0].offsets.clone();
    if docs.iter().any(|d| d.offsets != offsets) {
        return Err(Failure::Usage("front documents disagree on objectives".into()));
    }
    let fronts: Vec<Vec<ObjVec>> = docs.iter().map(FrontDocument::internal_front).collect();
    let rf = reference_front(fronts.iter().map(Vec::as_slice));
    let to_internal = |v: &[i64], name: &str| -> Result<Vec<u64>, Failure> {
        if v.len() != offsets.len() {
            return Err(Failure::Usage(format!("{name} needs {} coordinates", offsets.len())));
        }
        Ok(v.iter().zip(&offsets).map(|(x, o)| (x - o).max(0) as u64).collect())
    };
    let reference = match &a.reference {
        Some(r) => to_internal(r, "--reference")?,
        None if rf.front.is_empty() => vec![1; offsets.len()],
        None => rf.reference.clone(),
    };
    let ideal = match &a.ideal {
        Some(i) => to_internal(i, "--ideal")?,
        None if rf.front.is_empty() => vec![0; offsets.len()],
        None => rf.ideal.clone(),
    };
    let mut text = String::new();
    for (p, f) in a.fronts.iter().zip(&fronts) {
        let h = hypervolume(f, &ideal, &reference);
        let line = HvLine {
            file: &p.display().to_string(),
            raw: h.raw,
            normalized: h.normalized,
            relative: relative_hypervolume(f, &rf),
            exact: h.exact,
        };
        text += &serde_json::to_string(&line).map_err(anyhow::Error::from)?;
        text.push('\n');
    }
    emit(None, &text)?;
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out = match cli.cmd {
        Cmd::Solve(a) => solve_cmd(a),
        Cmd::Oracle { file, cap, output } => oracle_cmd(&file, cap, output.as_deref()),
        Cmd::Gen { family } => gen_cmd(family),
        Cmd::Bench { config, csv, json } => bench_cmd(&config, csv.as_deref(), json.as_deref()),
        Cmd::Hv(a) => hv_cmd(a),
    };
    match out {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Parse(m)) => {
            eprintln!("parse error: {m}");
            EXIT_PARSE
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            EXIT_INTERNAL
        }
    }
}
