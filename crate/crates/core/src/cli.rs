//! The `valdef` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cache::{cache_dir, SessionCache};
use crate::classify::ClassifyResult;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::figure::PolygonFigure;
use crate::plateau::DefectReport;
use crate::run::{analyze_config, classify_config, default_stage, expand_config};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MATH: i32 = 3;
pub const EXIT_CACHE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "valdef", version, about = "Key-polynomial defect decomposition of valued field extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dependent/independent verdict for a degree-p defect extension.
    Classify(Common),
    /// Full plateau decomposition report.
    Analyze(Common),
    /// Newton polygon figure at member rho of a cached run.
    Polygon(Common),
    /// Q-expansion, truncation and polygon of the [expand] f and q.
    Expand(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Run configuration (TOML); may be repeated.
    #[arg(long = "config", required = true)]
    pub configs: Vec<PathBuf>,
    /// Family member used for figures.
    #[arg(long)]
    pub rho: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Configs processed in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CacheMissing(_) | Error::CacheMismatch(_) => EXIT_CACHE,
        Error::Stage { source, .. } if matches!(**source, Error::CacheMissing(_)) => EXIT_CACHE,
        e if e.is_input_error() => EXIT_INPUT,
        _ => EXIT_MATH,
    }
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    name: &'a str,
    p: u64,
    backend: &'a str,
    g: &'a str,
    #[serde(flatten)]
    result: &'a ClassifyResult,
}

struct Job<'a> {
    kind: &'a Command,
    common: &'a Common,
}

/// Output of one config: lines for stdout and stderr.
#[derive(Default)]
struct Outcome {
    out: Vec<String>,
    err: Vec<String>,
    code: i32,
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

impl Job<'_> {
    fn out_dir(&self, cfg: &RunConfig) -> PathBuf {
        self.common.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
    }

    fn rho(&self, cfg: &RunConfig) -> usize {
        self.common.rho.or(cfg.output.rho).unwrap_or(2)
    }

    fn cache(&self, cfg: &RunConfig) -> PathBuf {
        let dir = cache_dir(cfg.cache.as_deref(), &self.out_dir(cfg));
        SessionCache::file_for(&dir, &cfg.input_hash())
    }

    fn sync_cache(&self, cfg: &RunConfig, report: &DefectReport, o: &mut Outcome) -> Result<()> {
        let mut cache = SessionCache::open(&self.cache(cfg))?;
        let st = cache.sync(&cfg.input_hash(), report)?;
        o.err.push(format!("{}: cache {} ({} verified, {} new)", cfg.name(), cache.path().display(), st.verified, st.appended));
        Ok(())
    }

    fn figure(&self, cfg: &RunConfig, fig: &PolygonFigure, stem: &str, o: &mut Outcome) -> Result<()> {
        let dir = self.out_dir(cfg);
        let ppu = cfg.output.pixels_per_unit.unwrap_or(80);
        write(&dir.join(format!("{stem}.svg")), &fig.to_svg(ppu)?)?;
        write(&dir.join(format!("{stem}.json")), &json(fig))?;
        write(&dir.join(format!("{stem}.txt")), &fig.to_ascii())?;
        o.err.push(format!("{}: wrote {}", cfg.name(), dir.join(format!("{stem}.svg")).display()));
        Ok(())
    }

    fn run(&self, path: &Path) -> Outcome {
        let mut o = Outcome::default();
        let res = RunConfig::load(path).and_then(|cfg| self.run_config(&cfg, &mut o));
        if let Err(e) = res {
            o.code = exit_code(&e);
            o.err.push(format!("valdef: {}: {e}", path.display()));
        }
        o
    }

    fn run_config(&self, cfg: &RunConfig, o: &mut Outcome) -> Result<()> {
        let dir = self.out_dir(cfg);
        let name = cfg.name();
        match self.kind {
            Command::Classify(_) => {
                // hash and cache the stage classify actually runs
                let mut eff = cfg.clone();
                if let (true, Some(case)) = (eff.stages.is_empty(), eff.case) {
                    eff.stages.push(default_stage(case));
                }
                let cfg = &eff;
                let (res, report) = classify_config(cfg)?;
                let rep = ClassifyReport { name, p: report.p, backend: &report.backend, g: &report.g, result: &res };
                write(&dir.join(format!("{name}.classify.json")), &json(&rep))?;
                let pl = &report.plateaus[0];
                let fig = stage_figure(name, pl.stage, self.rho(cfg), pl)?;
                self.figure(cfg, &fig, &format!("{name}.polygon"), o)?;
                self.sync_cache(cfg, &report, o)?;
                o.out.push(format!(
                    "{name}: {} (gamma = {}, I_1 = {:?}, routes agree)",
                    res.verdict.as_str(),
                    res.gamma,
                    res.i1
                ));
            }
            Command::Analyze(_) => {
                let report = analyze_config(cfg)?;
                write(&dir.join(format!("{name}.report.json")), &json(&report))?;
                let rho = self.rho(cfg);
                for pl in &report.plateaus {
                    let fig = stage_figure(name, pl.stage, rho, pl)?;
                    self.figure(cfg, &fig, &format!("{name}.stage{}.rho{rho}", pl.stage), o)?;
                }
                self.sync_cache(cfg, &report, o)?;
                let ds: Vec<u32> = report.plateaus.iter().map(|p| p.d).collect();
                o.out.push(format!("{name}: d = {} (per plateau {ds:?}), defect {}", report.d, report.defect));
            }
            Command::Polygon(_) => {
                let cache = SessionCache::open_existing(&self.cache(cfg))?;
                let rho = self.rho(cfg);
                let stages: std::collections::BTreeSet<usize> = cache.records().iter().map(|r| r.stage).collect();
                if stages.is_empty() {
                    return Err(Error::CacheMissing(cache.path().display().to_string()));
                }
                for stage in stages {
                    let rec = cache.lookup(stage, rho).ok_or_else(|| {
                        Error::CacheMissing(format!("{} has no member rho = {rho} for stage {stage}", cache.path().display()))
                    })?;
                    let b = rec.b.finite().cloned().ok_or_else(|| Error::Invariant("B must be finite".into()))?;
                    let points = rec.nu_coeffs.iter().cloned().enumerate().collect();
                    let title = format!("{name} stage {stage} rho {rho}");
                    let fig = PolygonFigure::new(title, points, rec.defect_degree, b, rec.gamma.clone());
                    self.figure(cfg, &fig, &format!("{name}.stage{stage}.rho{rho}"), o)?;
                    o.out.push(fig.to_ascii());
                }
            }
            Command::Expand(_) => {
                let rep = expand_config(cfg)?;
                let text = json(&rep);
                write(&dir.join(format!("{name}.expand.json")), &text)?;
                o.out.push(text.trim_end().to_string());
            }
        }
        Ok(())
    }
}

fn stage_figure(name: &str, stage: usize, rho: usize, pl: &crate::plateau::PlateauRecord) -> Result<PolygonFigure> {
    let r = pl.rhos.get(rho).ok_or_else(|| {
        Error::Config(format!("rho = {rho} is beyond the {} computed members of stage {stage}", pl.rhos.len()))
    })?;
    let b = pl.stats.b.finite().cloned().ok_or_else(|| Error::Invariant("B must be finite".into()))?;
    let points = r.nu_coeffs.iter().cloned().enumerate().collect();
    Ok(PolygonFigure::new(format!("{name} stage {stage} rho {rho}"), points, pl.stats.defect_degree, b, r.gamma.clone()))
}

/// Parses arguments, runs every config and returns the process exit code
/// (the largest over the configs).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let common = match &cli.command {
        Command::Classify(c) | Command::Analyze(c) | Command::Polygon(c) | Command::Expand(c) => c,
    };
    let job = Job { kind: &cli.command, common };
    let outcomes: Vec<Mutex<Option<Outcome>>> = common.configs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..common.jobs.clamp(1, common.configs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = common.configs.get(i) else { break };
                *outcomes[i].lock().unwrap() = Some(job.run(path));
            });
        }
    });
    let mut code = 0;
    for o in outcomes {
        let o = o.into_inner().unwrap().unwrap_or_default();
        for l in &o.err {
            eprintln!("{l}");
        }
        for l in &o.out {
            println!("{l}");
        }
        code = code.max(o.code);
    }
    code
}
