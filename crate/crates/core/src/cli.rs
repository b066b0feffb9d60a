//! `boolskel` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 parse or analysis input error,
//! 3 invariant violation under `--verify`, 4 I/O.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;

use crate::analysis::{
    compression_stats, critical_path, extract_critical_region, parse_path_file, similarity_with, CompressionStats,
    Metric,
};
use crate::depgraph::export::{skeleton_dot, skeleton_graphml, skeleton_json};
use crate::depgraph::SkeletonGraph;
use crate::netcore::{parse_aiger, parse_graphml_network, BooleanNetwork};
use crate::oracle::{self, DEFAULT_SEED};
use crate::reduction::{self, FaninLimit, ReductionConfig, Skeletonization};

/// Random assignments used for fidelity checks on designs with more than 16 inputs.
pub const FIDELITY_SAMPLES: usize = 10_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Verify(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Verify(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Verify(m) | CliError::Io(m) => m,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum InputFormat {
    #[default]
    Auto,
    Aiger,
    Graphml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Graphml,
    Dot,
    Json,
}

impl OutFormat {
    fn extension(self) -> &'static str {
        match self {
            OutFormat::Graphml => "graphml",
            OutFormat::Dot => "dot",
            OutFormat::Json => "json",
        }
    }
}

/// Inclusive range of bounded fanin limits, written `a..b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSweep(pub Vec<FaninLimit>);

impl FromStr for KSweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected `a..b`, found `{s}`"))?;
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: usize = lo.trim().parse().map_err(|e| format!("bad sweep start: {e}"))?;
        let hi: usize = hi.trim().parse().map_err(|e| format!("bad sweep end: {e}"))?;
        if lo == 0 || hi < lo {
            return Err(format!("sweep `{s}` must satisfy 1 <= a <= b"));
        }
        Ok(KSweep((lo..=hi).filter_map(FaninLimit::bounded).collect()))
    }
}

fn parse_k(s: &str) -> Result<FaninLimit, String> {
    s.parse::<FaninLimit>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Input design file, or a directory of designs.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
    /// Fanin limit: a positive integer or `inf` (the default).
    #[arg(long, value_parser = parse_k)]
    pub k: Option<FaninLimit>,
    /// Inclusive range of fanin limits, e.g. `1..10`.
    #[arg(long = "k-sweep")]
    pub k_sweep: Option<KSweep>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long = "out-format", value_enum)]
    pub out_format: Option<OutFormat>,
    /// Run the brute-force oracles after reduction.
    #[arg(long)]
    pub verify: bool,
    /// Seed for sampled equivalence checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Designs processed in parallel.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
}

impl RunConfig {
    pub fn fanin_limit(&self) -> FaninLimit {
        self.k.unwrap_or(FaninLimit::Unlimited)
    }

    fn limits(&self) -> Vec<FaninLimit> {
        match &self.k_sweep {
            Some(KSweep(ks)) => ks.clone(),
            None => vec![self.fanin_limit()],
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "boolskel", version, about = "Boolean network skeletonization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Skeletonize a design and write the skeleton plus a reduction report.
    Reduce(RunConfig),
    /// Print compression statistics as TSV (or JSON lines with `--out-format json`).
    Stats(RunConfig),
    /// Print the unit-delay critical path of the dependency graph, or of the skeleton when `--k` is given.
    Critpath(RunConfig),
    /// Similarity of the critical regions spanned by two path files.
    Similarity {
        #[command(flatten)]
        cfg: RunConfig,
        #[arg(long, value_parser = Metric::from_str, default_value = "jaccard")]
        metric: Metric,
        path_a: PathBuf,
        path_b: PathBuf,
    },
    /// Skeletonize and run every oracle check.
    Verify(RunConfig),
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("boolskel: {}", e.message());
            e.code()
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("BOOLSKEL_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Reduce(cfg) => cmd_reduce(&cfg),
        Command::Stats(cfg) => cmd_stats(&cfg),
        Command::Critpath(cfg) => cmd_critpath(&cfg),
        Command::Similarity { cfg, metric, path_a, path_b } => cmd_similarity(&cfg, metric, &path_a, &path_b),
        Command::Verify(cfg) => cmd_verify(&cfg),
    }
}

fn detect(path: &Path, bytes: &[u8], format: InputFormat) -> InputFormat {
    if format != InputFormat::Auto {
        return format;
    }
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("aag" | "aig") => InputFormat::Aiger,
        Some("graphml" | "xml") => InputFormat::Graphml,
        _ if bytes.starts_with(b"aag") || bytes.starts_with(b"aig") => InputFormat::Aiger,
        _ => InputFormat::Graphml,
    }
}

pub fn load_network(path: &Path, format: InputFormat) -> Result<BooleanNetwork, CliError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let parsed = match detect(path, &bytes, format) {
        InputFormat::Graphml => parse_graphml_network(&bytes).map_err(|e| e.to_string()),
        _ => parse_aiger(&bytes).map_err(|e| e.to_string()),
    };
    parsed.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn is_design_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("aag" | "aig" | "graphml" | "xml")
    )
}

/// The input file itself, or the design files of a directory in name order.
fn inputs(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    if !cfg.input.is_dir() {
        return Ok(vec![cfg.input.clone()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&cfg.input)
        .map_err(|e| io_err(&cfg.input, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_design_file(p))
        .collect();
    files.sort();
    Ok(files)
}

fn design_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn parallel<T, F>(cfg: &RunConfig, files: &[PathBuf], work: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(&Path) -> Result<T, CliError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs as usize)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| files.par_iter().map(|p| work(p)).collect())
}

fn skeletonize(net: &BooleanNetwork, k: FaninLimit) -> Result<Skeletonization, CliError> {
    reduction::run(net, &ReductionConfig::new(k)).map_err(|e| CliError::Parse(e.to_string()))
}

/// Every oracle check on one run, as readable messages.
pub fn verify_run(net: &BooleanNetwork, run: &Skeletonization, seed: u64) -> Vec<String> {
    let mut out: Vec<String> =
        oracle::verify_skeletonization(run).into_iter().map(|v| format!("{}: {}", v.check, v.detail)).collect();
    if let Some(bits) = oracle::recovery_mismatch(net, &run.initial, FIDELITY_SAMPLES, seed) {
        let word: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        out.push(format!("fidelity: dependency graph disagrees with the network on inputs {word}"));
    }
    // PO depth order is not guaranteed by the reduction rule; report, don't fail.
    let bad = oracle::po_rank_violations(&run.initial, &run.skeleton);
    if !bad.is_empty() {
        let disjoint = if oracle::has_disjoint_support_outputs(net) { " (disjoint-support outputs)" } else { "" };
        warn!("{} PO pairs change depth order{disjoint}, first {:?}", bad.len(), bad[0]);
    }
    out
}

fn render(s: &SkeletonGraph, format: OutFormat) -> String {
    match format {
        OutFormat::Graphml => skeleton_graphml(s),
        OutFormat::Dot => skeleton_dot(s),
        OutFormat::Json => skeleton_json(s),
    }
}

/// `dir/adder.k4.graphml` becomes `dir/adder.k4.report.json`.
pub fn report_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.report.json"))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn cmd_reduce(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.k_sweep.is_some() {
        return Err(CliError::Usage("reduce takes a single --k; use stats for sweeps".into()));
    }
    let format = cfg.out_format.unwrap_or(OutFormat::Graphml);
    let files = inputs(cfg)?;
    let batch = cfg.input.is_dir();
    if batch {
        let dir = cfg.output.as_ref().ok_or_else(|| CliError::Usage("directory input needs --output DIR".into()))?;
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let problems = parallel(cfg, &files, |path| {
        let net = load_network(path, cfg.format)?;
        let run = skeletonize(&net, cfg.fanin_limit())?;
        let text = render(&run.skeleton, format);
        let target = match (&cfg.output, batch) {
            (Some(dir), true) => Some(dir.join(format!("{}.{}", design_name(path), format.extension()))),
            (out, _) => out.clone(),
        };
        match target {
            Some(out) => {
                write(&out, &text)?;
                write(&report_path(&out), &run.report.to_json())?;
            }
            None => {
                print!("{text}");
                info!("report: {}", run.report.to_json().trim_end());
            }
        }
        Ok(if cfg.verify { verify_run(&net, &run, cfg.seed) } else { Vec::new() })
    })?;
    fail_on_violations(&files, problems)
}

fn fail_on_violations(files: &[PathBuf], problems: Vec<Vec<String>>) -> Result<(), CliError> {
    let mut count = 0;
    for (path, list) in files.iter().zip(&problems) {
        for p in list {
            eprintln!("{}: {p}", path.display());
            count += 1;
        }
    }
    if count > 0 {
        Err(CliError::Verify(format!("{count} invariant violations")))
    } else {
        Ok(())
    }
}

fn cmd_stats(cfg: &RunConfig) -> Result<(), CliError> {
    let json = match cfg.out_format {
        None => false,
        Some(OutFormat::Json) => true,
        Some(other) => return Err(CliError::Usage(format!("stats cannot emit {}", other.extension()))),
    };
    let files = inputs(cfg)?;
    let limits = cfg.limits();
    let per_file = parallel(cfg, &files, |path| {
        let net = load_network(path, cfg.format)?;
        let name = design_name(path);
        let mut rows = Vec::with_capacity(limits.len());
        let mut problems = Vec::new();
        for &k in &limits {
            let run = skeletonize(&net, k)?;
            if cfg.verify {
                problems.extend(verify_run(&net, &run, cfg.seed).into_iter().map(|p| format!("k={k}: {p}")));
            }
            rows.push(compression_stats(&run.initial, &run.skeleton).labeled(name.clone(), k));
        }
        Ok((rows, problems))
    })?;
    let mut text = String::new();
    if !json {
        text.push_str(CompressionStats::TSV_HEADER);
        text.push('\n');
    }
    let mut problems = Vec::new();
    for (rows, p) in per_file {
        for r in rows {
            text.push_str(&if json { r.to_json() } else { r.tsv_row() });
            text.push('\n');
        }
        problems.push(p);
    }
    match &cfg.output {
        Some(out) => write(out, &text)?,
        None => print!("{text}"),
    }
    fail_on_violations(&files, problems)
}

fn single_input(cfg: &RunConfig) -> Result<BooleanNetwork, CliError> {
    if cfg.input.is_dir() {
        return Err(CliError::Usage("this command takes a single design file".into()));
    }
    load_network(&cfg.input, cfg.format)
}

fn cmd_critpath(cfg: &RunConfig) -> Result<(), CliError> {
    let net = single_input(cfg)?;
    let use_skeleton = cfg.k.is_some();
    let k = cfg.k.unwrap_or(FaninLimit::bounded(1).expect("1 is a valid limit"));
    let run = skeletonize(&net, k)?;
    let path = if use_skeleton {
        critical_path(&run.skeleton).map(|p| p.nodes.iter().map(|&s| run.skeleton.node(s).orig_id).collect())
    } else {
        critical_path(&run.initial).map(|p| p.nodes)
    }
    .map_err(|e| CliError::Parse(format!("{}: {e}", cfg.input.display())))?;
    if cfg.verify {
        let problems = verify_run(&net, &run, cfg.seed);
        fail_on_violations(std::slice::from_ref(&cfg.input), vec![problems])?;
    }
    let ids: Vec<String> = path.iter().map(|&v: &usize| v.to_string()).collect();
    println!("length\t{}", path.len().saturating_sub(1));
    println!("{}", ids.join(" "));
    Ok(())
}

fn cmd_similarity(cfg: &RunConfig, metric: Metric, a: &Path, b: &Path) -> Result<(), CliError> {
    let net = single_input(cfg)?;
    let region = |path: &Path| {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let paths =
            parse_path_file(&text, &net).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        extract_critical_region(&net, &paths).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    };
    let (ra, rb) = (region(a)?, region(b)?);
    println!("{:.4}", similarity_with(&ra, &rb, metric));
    Ok(())
}

fn cmd_verify(cfg: &RunConfig) -> Result<(), CliError> {
    let files = inputs(cfg)?;
    let limits = cfg.limits();
    let problems = parallel(cfg, &files, |path| {
        let net = load_network(path, cfg.format)?;
        let mut problems = Vec::new();
        for &k in &limits {
            let run = skeletonize(&net, k)?;
            if !run.pruned.is_empty() {
                warn!("{}: {} dangling nodes pruned", path.display(), run.pruned.len());
            }
            problems.extend(verify_run(&net, &run, cfg.seed).into_iter().map(|p| format!("k={k}: {p}")));
        }
        Ok(problems)
    })?;
    for (path, list) in files.iter().zip(&problems) {
        if list.is_empty() {
            println!("ok\t{}", path.display());
        }
    }
    fail_on_violations(&files, problems)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        assert_eq!(KSweep::from_str("1..3").unwrap().0.len(), 3);
        assert_eq!(KSweep::from_str("2..=2").unwrap().0, vec![FaninLimit::bounded(2).unwrap()]);
        assert!(KSweep::from_str("0..3").is_err());
        assert!(KSweep::from_str("5..2").is_err());
        assert!(KSweep::from_str("4").is_err());
    }

    #[test]
    fn report_lands_next_to_output() {
        assert_eq!(report_path(Path::new("out/adder.k4.graphml")), PathBuf::from("out/adder.k4.report.json"));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["boolskel", "reduce", "--input", "x.aag", "--k", "0"]), 1);
        assert_eq!(main_with_args(["boolskel", "bogus"]), 1);
        assert_eq!(main_with_args(["boolskel", "stats", "--input", "x", "--jobs", "0"]), 1);
        assert_eq!(main_with_args(["boolskel", "--help"]), 0);
    }

    #[test]
    fn missing_input_is_io_error() {
        assert_eq!(main_with_args(["boolskel", "reduce", "--input", "/nonexistent/none.aag"]), 4);
    }
}
