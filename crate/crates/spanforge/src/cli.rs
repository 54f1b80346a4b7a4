//! `spanforge` command line: build, audit, cost and study.
//!
//! Exit status is 0 on success, 1 on a domain error or a failed audit and
//! 2 on bad usage (including a spanner that does not fit its graph).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use spanforge_core::apsp::apsp_report;
use spanforge_core::generate::GraphSpec;
use spanforge_core::oracle::{select_repetition, summarize};
use spanforge_core::spanner::{self, Algorithm};
use spanforge_core::{CostModel, WeightedGraph};

use crate::io::{self, LoadedGraph};
use crate::par;
use crate::report::{
    ApspStudy, AuditReport, AuditSummary, BuildReport, CostReport, EpochOneCheck, GraphInfo,
    RepetitionInfo, RunReport, StudyReport, Timings, REPORT_VERSION,
};
use crate::tables::{self, ApspColumns};

#[derive(Debug, Parser)]
#[command(name = "spanforge", version, about = "Build and check graph spanners")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a spanner and write its JSON report.
    Build(BuildArgs),
    /// Check the stretch of a spanner against its graph.
    Audit(AuditArgs),
    /// Print the analytic round counts.
    Cost(CostArgs),
    /// Repeat a build over seeds and summarize sizes.
    Study(StudyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Bs,
    Merge,
    Twophase,
    General,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Bs => Algorithm::BaswanaSen,
            AlgoArg::Merge => Algorithm::Merge,
            AlgoArg::Twophase => Algorithm::TwoPhase,
            AlgoArg::General => Algorithm::General,
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Edge-list file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generator spec, e.g. gnp:100:0.1:unit or grid:8:8.
    #[arg(long, value_parser = parse_spec)]
    pub gen: Option<GraphSpec>,
}

fn parse_spec(s: &str) -> Result<GraphSpec, String> {
    s.parse()
        .map_err(|e: spanforge_core::GraphError| e.to_string())
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Iterations per epoch; only with --algo general (default 1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed for --gen; defaults to --seed.
    #[arg(long)]
    pub graph_seed: Option<u64>,
    /// JSON report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the spanner as an edge list.
    #[arg(long)]
    pub spanner_out: Option<PathBuf>,
    /// Audit the result at the algorithm's stretch bound.
    #[arg(long)]
    pub verify: bool,
    /// Memory exponent for the cost section.
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Run this many seeded builds and keep one within the slack thresholds.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub repetitions: Option<u32>,
    #[arg(long, default_value_t = 4.0)]
    pub c_clusters: f64,
    #[arg(long, default_value_t = 4.0)]
    pub c_edges: f64,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

/// Where an audit bound comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct AutoBound {
    pub rule: String,
    pub bound: f64,
}

/// Parses `bs:k`, `merge:k`, `twophase:k` or `general:k,t`.
pub fn parse_auto(s: &str) -> Result<AutoBound, String> {
    let (name, params) = s.split_once(':').ok_or("expected <algo>:<params>")?;
    let int = |x: &str| -> Result<u32, String> {
        match x.trim().parse::<u32>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(format!("invalid parameter {x:?}")),
        }
    };
    let bound = match name {
        "bs" => spanner::baswana_sen_stretch_bound(int(params)?),
        "merge" => spanner::merge_stretch_bound(int(params)?),
        "twophase" => spanner::two_phase_hop_bound(int(params)?),
        "general" => {
            let (k, t) = params.split_once(',').ok_or("general needs k,t")?;
            spanner::general_stretch_bound(int(k)?, int(t)?)
        }
        other => return Err(format!("unknown algorithm {other:?}")),
    };
    Ok(AutoBound {
        rule: s.to_string(),
        bound,
    })
}

#[derive(Debug, Args)]
#[group(id = "bound_choice", required = true, multiple = false)]
pub struct BoundChoice {
    #[arg(long)]
    pub bound: Option<f64>,
    /// Bound from an algorithm: bs:k, merge:k, twophase:k or general:k,t.
    #[arg(long, value_parser = parse_auto)]
    pub auto: Option<AutoBound>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Spanner edge list, using the graph's vertex ids.
    #[arg(long)]
    pub spanner: PathBuf,
    #[command(flatten)]
    pub bound: BoundChoice,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-edge CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: u32,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long, value_parser = parse_spec)]
    pub gen: GraphSpec,
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Iterations per epoch; only with --algo general (default 1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub trials: u32,
    /// Trial i uses seed seed0 + i for both graph and build.
    #[arg(long, default_value_t = 0)]
    pub seed0: u64,
    /// Per-trial CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON summary path; standard output when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Also measure the all-pairs approximation of every trial.
    #[arg(long)]
    pub apsp: bool,
    /// Coordinator memory budget constant for --apsp.
    #[arg(long, default_value_t = 1.0)]
    pub budget_c: f64,
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    /// Report already written; the check did not pass.
    Check,
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Runs the tool; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Build(a) => build(a, stdout),
        Command::Audit(a) => audit(a, stdout),
        Command::Cost(a) => cost(a, stdout),
        Command::Study(a) => study(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Check) => 1,
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            let _ = writeln!(stderr, "{}", Cli::command().render_usage());
            2
        }
    }
}

fn emit(report: &RunReport, path: Option<&Path>, stdout: &mut dyn Write) -> Outcome {
    match path {
        Some(p) => report.write_to(BufWriter::new(File::create(p)?))?,
        None => report.write_to(stdout)?,
    }
    Ok(())
}

fn load_file(path: &Path) -> Result<LoadedGraph, Failure> {
    let file = File::open(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    io::load_edge_list(BufReader::new(file))
        .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn load_source(source: &Source, seed: u64) -> Result<(LoadedGraph, GraphInfo), Failure> {
    if let Some(path) = &source.input {
        let loaded = load_file(path)?;
        let info = GraphInfo::new(path.display().to_string(), None, &loaded.graph);
        Ok((loaded, info))
    } else {
        let spec = source.gen.as_ref().expect("clap enforces one source");
        let graph = spec.generate(seed)?;
        let info = GraphInfo::new(spec.to_string(), Some(seed), &graph);
        let labels = (0..graph.n() as i64).collect();
        Ok((LoadedGraph { graph, labels }, info))
    }
}

fn resolve_t(algo: Algorithm, k: u32, t: Option<u32>) -> Result<u32, Failure> {
    match (algo, t) {
        (Algorithm::General, t) => Ok(t.unwrap_or(1)),
        (_, Some(_)) => Err(Failure::Usage(
            "--t is only accepted with --algo general".into(),
        )),
        (other, None) => Ok(other.effective_t(k, 1)),
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn build(a: BuildArgs, stdout: &mut dyn Write) -> Outcome {
    let algo = Algorithm::from(a.algo);
    let t = resolve_t(algo, a.k, a.t)?;
    let cost = CostModel::new(a.k, algo.effective_t(a.k, t), a.gamma)?;
    let (loaded, info) = load_source(&a.source, a.graph_seed.unwrap_or(a.seed))?;
    let g = &loaded.graph;
    let pool = par::pool();
    let mut timings = Timings::new();

    let started = Instant::now();
    let (built, repetition) = match a.repetitions {
        None => (algo.build(g, a.k, t, a.seed)?, None),
        Some(r) => {
            if !(a.c_clusters >= 1.0 && a.c_edges >= 1.0) {
                return Err(Failure::Usage("slack constants must be at least 1".into()));
            }
            let builds = par::repetition_builds(&pool, g, algo, a.k, t, a.seed, r)?;
            let chosen = select_repetition(builds, a.c_clusters, a.c_edges);
            let info = RepetitionInfo {
                repetitions: r,
                selected: chosen.repetition,
                fallback: chosen.fallback,
                passed: chosen.passed,
                sizes: chosen.sizes,
                c_clusters: a.c_clusters,
                c_edges: a.c_edges,
            };
            (chosen.build, Some(info))
        }
    };
    timings.insert("build_ms".into(), ms(started));

    let mut report = BuildReport::new(algo, info, &built, cost);
    report.repetition = repetition;
    if a.verify {
        let started = Instant::now();
        let audit = par::audit_stretch(&pool, g, &built.spanner_mask(), algo.stretch_bound(a.k, t));
        timings.insert("audit_ms".into(), ms(started));
        report.stretch = Some(AuditSummary::new(g, &audit));
    }
    if let Some(path) = &a.spanner_out {
        io::write_spanner(
            g,
            &loaded.labels,
            &built.spanner_edges,
            BufWriter::new(File::create(path)?),
        )?;
    }
    if a.timings {
        report.timings = Some(timings);
    }
    let failed = report.stretch.as_ref().is_some_and(|s| !s.passed);
    emit(&RunReport::Build(report), a.out.as_deref(), stdout)?;
    if failed {
        return Err(Failure::Check);
    }
    Ok(())
}

fn audit(a: AuditArgs, stdout: &mut dyn Write) -> Outcome {
    let started = Instant::now();
    let loaded = load_file(&a.input)?;
    let raw = {
        let file = File::open(&a.spanner)
            .map_err(|e| Failure::Domain(format!("{}: {e}", a.spanner.display())))?;
        io::read_raw(BufReader::new(file))
            .map_err(|e| Failure::Domain(format!("{}: {e}", a.spanner.display())))?
    };
    let ids = io::match_spanner(&loaded, &raw).map_err(|e| Failure::Usage(e.to_string()))?;
    let g = &loaded.graph;
    let mask = spanforge_core::EdgeMask::from_ids(g.m(), &ids);
    let (bound, rule) = match (&a.bound.bound, &a.bound.auto) {
        (Some(b), _) => (*b, "explicit".to_string()),
        (None, Some(auto)) => (auto.bound, auto.rule.clone()),
        (None, None) => unreachable!("clap enforces one bound"),
    };
    let pool = par::pool();
    let audit = par::audit_stretch(&pool, g, &mask, bound);
    if let Some(path) = &a.csv {
        tables::write_audit(g, &mask, &audit, BufWriter::new(File::create(path)?))?;
    }
    let summary = AuditSummary::new(g, &audit);
    let passed = summary.passed;
    let report = AuditReport {
        version: REPORT_VERSION,
        graph: GraphInfo::new(a.input.display().to_string(), None, g),
        spanner_source: a.spanner.display().to_string(),
        spanner_size: ids.len(),
        bound_rule: rule,
        audit: summary,
        timings: a
            .timings
            .then(|| Timings::from([("audit_ms".to_string(), ms(started))])),
    };
    emit(&RunReport::Audit(report), a.out.as_deref(), stdout)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cost(a: CostArgs, stdout: &mut dyn Write) -> Outcome {
    let model = CostModel::new(a.k, a.t, a.gamma).map_err(|e| Failure::Usage(e.to_string()))?;
    let report = RunReport::Cost(CostReport {
        version: REPORT_VERSION,
        model,
    });
    emit(&report, a.out.as_deref(), stdout)
}

fn epoch_one_check(n: f64, k: u32, trials: usize, mean: f64) -> EpochOneCheck {
    let p = spanner::epoch_schedule(k, 1, n as usize)
        .map(|s| s[0].probability)
        .unwrap_or(1.0);
    let expected = n * p;
    let sd_of_mean = (n * p * (1.0 - p) / trials as f64).sqrt();
    let deviation_sigmas = if sd_of_mean > 0.0 {
        (mean - expected).abs() / sd_of_mean
    } else if mean == expected {
        0.0
    } else {
        f64::INFINITY
    };
    EpochOneCheck {
        mean,
        expected,
        sd_of_mean,
        deviation_sigmas,
    }
}

fn study(a: StudyArgs, stdout: &mut dyn Write) -> Outcome {
    let algo = Algorithm::from(a.algo);
    let t = resolve_t(algo, a.k, a.t)?;
    let seeds: Vec<u64> = (0..u64::from(a.trials))
        .map(|i| a.seed0.wrapping_add(i))
        .collect();
    let started = Instant::now();
    let mut builds: Vec<(usize, usize, spanner::SpannerBuild)> = Vec::new();
    let mut graphs: Vec<WeightedGraph> = Vec::new();
    for &seed in &seeds {
        let g = a.gen.generate(seed)?;
        let b = algo.build(&g, a.k, t, seed)?;
        builds.push((g.n(), g.m(), b));
        if a.apsp {
            graphs.push(g);
        }
    }
    let mut timings = Timings::from([("build_ms".to_string(), ms(started))]);
    let stats = summarize(algo, a.k, t, &seeds, &builds);

    let mut apsp_cols = None;
    let mut apsp_summary = None;
    if a.apsp {
        let started = Instant::now();
        let mut cols = Vec::new();
        let mut reports = Vec::new();
        for (g, (_, _, b)) in graphs.iter().zip(&builds) {
            let r = apsp_report(g, b, a.budget_c)?;
            cols.push(ApspColumns {
                max_ratio: r.max_ratio,
                mean_ratio: r.mean_ratio,
            });
            reports.push(r);
        }
        timings.insert("apsp_ms".into(), ms(started));
        let finite = |x: f64| x.is_finite().then_some(x);
        let max = reports.iter().map(|r| r.max_ratio).fold(1.0, f64::max);
        let mean_max = reports.iter().map(|r| r.max_ratio).sum::<f64>() / reports.len() as f64;
        apsp_summary = Some(ApspStudy {
            ratio_bound: reports[0].ratio_bound,
            max_ratio: finite(max),
            mean_max_ratio: finite(mean_max),
            mean_ratio: reports.iter().map(|r| r.mean_ratio).sum::<f64>() / reports.len() as f64,
            dominance_violations: reports.iter().map(|r| r.dominance_violations).sum(),
        });
        apsp_cols = Some(cols);
    }

    tables::write_study(
        &stats,
        apsp_cols.as_deref(),
        BufWriter::new(File::create(&a.out)?),
    )?;
    let epoch_one = (stats.t == 1 && !stats.mean_epoch_clusters.is_empty()).then(|| {
        let n = stats.n.iter().sum::<usize>() as f64 / stats.trials as f64;
        epoch_one_check(n, a.k, stats.trials, stats.mean_epoch_clusters[0])
    });
    let report = RunReport::Study(StudyReport {
        version: REPORT_VERSION,
        graph_spec: a.gen.to_string(),
        seed0: a.seed0,
        stats,
        epoch_one,
        apsp: apsp_summary,
        timings: a.timings.then_some(timings),
    });
    emit(&report, a.summary.as_deref(), stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_bounds() {
        let g = parse_auto("general:4,1").unwrap();
        assert!((g.bound - 2.0 * 4f64.powf(3f64.log2())).abs() < 1e-9);
        assert_eq!(parse_auto("bs:3").unwrap().bound, 5.0);
        assert_eq!(parse_auto("twophase:9").unwrap().bound, 47.0);
        assert!(parse_auto("general:4").is_err());
        assert!(parse_auto("bs:0").is_err());
        assert!(parse_auto("nope:1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn t_requires_general() {
        assert!(resolve_t(Algorithm::BaswanaSen, 3, Some(2)).is_err());
        assert_eq!(resolve_t(Algorithm::General, 3, None).unwrap(), 1);
        assert_eq!(resolve_t(Algorithm::BaswanaSen, 3, None).unwrap(), 3);
    }

    #[test]
    fn epoch_one_sigmas() {
        let c = epoch_one_check(1000.0, 5, 30, 1000f64.powf(0.8));
        assert!(c.deviation_sigmas < 1e-9);
        assert!(c.sd_of_mean > 0.0);
    }
}
