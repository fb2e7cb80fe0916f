use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use eld::calibration::{self, ModelKind};
use eld::compressor::{DEFAULT_C, DEFAULT_N};
use eld::pipeline::{self, CompareOptions, OriginalSource};
use eld::signature::{read_signatures, write_signatures};
use eld::{levenshtein, Estimator, Params, Preprocess, Signature, DEFAULT_ALPHABET, DEFAULT_MAX_RATIO, DEFAULT_R};
use rayon::prelude::*;
use walkdir::WalkDir;

const EXIT_PARTIAL: u8 = 1;
const EXIT_FATAL: u8 = 2;

/// Estimate Levenshtein distances between large text files from compact
/// signatures.
#[derive(Parser)]
#[command(name = "eld", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one signature per input file.
    Gen(GenArgs),
    /// Compare all signatures of one signature file with each other.
    #[command(alias = "compare")]
    Cmp(CmpArgs),
    /// Compare each source signature with every destination signature.
    Search(SearchArgs),
    /// Exact Levenshtein distance between two files.
    Exact(ExactArgs),
    /// Estimate the expected overlap ratio R for an alphabet model.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct PreprocessArgs {
    /// Lowercase ASCII letters before processing.
    #[arg(long)]
    lowercase: bool,
    /// Collapse whitespace runs into a single space before processing.
    #[arg(long = "collapse-ws")]
    collapse_ws: bool,
}

impl PreprocessArgs {
    fn preprocess(&self) -> Preprocess {
        Preprocess {
            lowercase: self.lowercase,
            collapse_whitespace: self.collapse_ws,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    /// Files or directories (searched recursively).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Nominal compression rate C.
    #[arg(long = "c", default_value_t = DEFAULT_C)]
    c: u64,
    /// Neighborhood size N.
    #[arg(long = "n", default_value_t = DEFAULT_N)]
    n: usize,
    /// File whose bytes (whitespace ignored) form the digest alphabet.
    #[arg(long)]
    alphabet_file: Option<PathBuf>,
    #[command(flatten)]
    pre: PreprocessArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScoringArgs {
    /// Expected overlap ratio.
    #[arg(long = "r", default_value_t = DEFAULT_R)]
    r: f64,
    /// Minimum significance score for a pair to be reported, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Significance is not applicable when one digest is more than this
    /// many times longer than the other.
    #[arg(long, default_value_t = DEFAULT_MAX_RATIO)]
    max_ratio: f64,
    /// Report every pair, ignoring the threshold.
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    pre: PreprocessArgs,
    #[command(flatten)]
    output: OutputArgs,
}

impl ScoringArgs {
    fn options(&self, include_self: bool) -> anyhow::Result<CompareOptions> {
        if !(0.0..=1.0).contains(&self.threshold) {
            bail!("--threshold must be within [0, 1], got {}", self.threshold);
        }
        if !(self.r > -1.0 && self.r.is_finite()) {
            bail!("--r must be a finite value above -1, got {}", self.r);
        }
        if self.max_ratio.is_nan() || self.max_ratio < 1.0 {
            bail!("--max-ratio must be at least 1, got {}", self.max_ratio);
        }
        Ok(CompareOptions {
            estimator: Estimator::new(self.r, self.max_ratio),
            threshold: self.threshold,
            report_all: self.all,
            include_self,
        })
    }
}

#[derive(Args)]
struct CmpArgs {
    /// Signature file.
    signatures: PathBuf,
    /// Also compare every signature with itself.
    #[arg(long)]
    include_self: bool,
    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Args)]
struct SearchArgs {
    /// Signature file with the documents to look for.
    source: PathBuf,
    /// Signature file to search in.
    dest: PathBuf,
    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Args)]
struct ExactArgs {
    a: PathBuf,
    b: PathBuf,
    #[command(flatten)]
    pre: PreprocessArgs,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Alphabet model: random, chars or words.
    #[arg(long, default_value = "random")]
    kind: ModelKind,
    /// Text corpus for the chars and words models.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Length of each test string in bytes.
    #[arg(long, default_value_t = calibration::DEFAULT_LENGTH)]
    length: usize,
    #[arg(long, default_value_t = calibration::DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Cmp(args) => run_compare(args),
        Command::Search(args) => run_search(args),
        Command::Exact(args) => run_exact(args),
        Command::Calibrate(args) => run_calibrate(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_FATAL)
        }
    }
}

fn open_output(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?.install(job))
}

fn load_params(args: &GenArgs) -> anyhow::Result<Params> {
    let alphabet = match &args.alphabet_file {
        Some(path) => {
            let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
            bytes.into_iter().filter(|b| !b.is_ascii_whitespace()).collect()
        }
        None => DEFAULT_ALPHABET.to_vec(),
    };
    Ok(Params::new(args.c, args.n, alphabet)?)
}

/// Regular files under the inputs, sorted by path. Missing inputs are
/// reported and counted.
fn collect_files(inputs: &[PathBuf]) -> (Vec<PathBuf>, usize) {
    let mut files = Vec::new();
    let mut failures = 0;
    for input in inputs {
        for entry in WalkDir::new(input) {
            match entry {
                Ok(e) if e.file_type().is_file() => files.push(e.into_path()),
                Ok(_) => {}
                Err(err) => {
                    eprintln!("warning: {err}");
                    failures += 1;
                }
            }
        }
    }
    files.sort_by(|a, b| a.as_os_str().cmp(b.as_os_str()));
    files.dedup();
    (files, failures)
}

fn signature_for(path: &Path, params: &Params, pre: Preprocess) -> Result<Signature, String> {
    let label = path
        .to_str()
        .ok_or_else(|| format!("{}: path is not valid UTF-8, skipped", path.display()))?;
    let bytes = std::fs::read(path).map_err(|e| format!("{label}: {e}, skipped"))?;
    if bytes.is_empty() {
        return Err(format!("{label}: zero-length file, skipped"));
    }
    let input = pre.apply(&bytes);
    Signature::build(label, &input, params).map_err(|e| format!("{e}, skipped"))
}

fn run_gen(args: GenArgs) -> anyhow::Result<ExitCode> {
    let params = load_params(&args)?;
    let pre = args.pre.preprocess();
    let (files, mut failures) = collect_files(&args.inputs);

    let results: Vec<Result<Signature, String>> = with_pool(args.output.workers, || {
        files.par_iter().map(|f| signature_for(f, &params, pre)).collect()
    })?;

    let mut signatures = Vec::with_capacity(results.len());
    for result in results {
        match result {
            Ok(sig) => {
                if sig.is_low_confidence() {
                    eprintln!(
                        "warning: {}: low confidence, digest length {} for {} bytes at C={}",
                        sig.path(),
                        sig.digest_length(),
                        sig.file_length(),
                        sig.c()
                    );
                }
                signatures.push(sig);
            }
            Err(msg) => {
                eprintln!("warning: {msg}");
                failures += 1;
            }
        }
    }
    if signatures.is_empty() {
        bail!("no readable input files");
    }

    let out = open_output(&args.output.out)?;
    write_signatures(out, &signatures, true)?;
    Ok(if failures > 0 {
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    })
}

fn load_signatures(path: &Path) -> anyhow::Result<Vec<Signature>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_signatures(BufReader::new(file)).with_context(|| format!("{}", path.display()))
}

/// Reads original files from disk for the small-digest fallback.
struct DiskOriginals(Preprocess);

impl OriginalSource for DiskOriginals {
    fn load(&self, path: &str) -> Option<Vec<u8>> {
        let bytes = std::fs::read(path).ok()?;
        Some(self.0.apply(&bytes).into_owned())
    }
}

fn report_incompatible(outcomes: &[pipeline::PairOutcome]) -> ExitCode {
    let bad = outcomes
        .iter()
        .filter(|o| o.score == pipeline::PairScore::Incompatible)
        .count();
    if bad > 0 {
        eprintln!("warning: {bad} pair(s) have incompatible parameters and were not scored");
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_compare(args: CmpArgs) -> anyhow::Result<ExitCode> {
    let opts = args.scoring.options(args.include_self)?;
    let sigs = load_signatures(&args.signatures)?;
    let originals = DiskOriginals(args.scoring.pre.preprocess());
    let outcomes = with_pool(args.scoring.output.workers, || {
        pipeline::compare_all(&sigs, &opts, &originals)
    })?;
    let out = open_output(&args.scoring.output.out)?;
    pipeline::write_compare_report(out, &sigs, &outcomes, &opts)?;
    Ok(report_incompatible(&outcomes))
}

fn run_search(args: SearchArgs) -> anyhow::Result<ExitCode> {
    let opts = args.scoring.options(false)?;
    let sources = load_signatures(&args.source)?;
    let dests = load_signatures(&args.dest)?;
    let originals = DiskOriginals(args.scoring.pre.preprocess());
    let outcomes = with_pool(args.scoring.output.workers, || {
        pipeline::search(&sources, &dests, &opts, &originals)
    })?;
    let out = open_output(&args.scoring.output.out)?;
    pipeline::write_search_report(out, &sources, &dests, &outcomes, &opts)?;
    Ok(report_incompatible(&outcomes))
}

fn run_exact(args: ExactArgs) -> anyhow::Result<ExitCode> {
    let pre = args.pre.preprocess();
    let read = |p: &Path| std::fs::read(p).with_context(|| format!("cannot read {}", p.display()));
    let a = read(&args.a)?;
    let b = read(&args.b)?;
    println!("{}", levenshtein(&pre.apply(&a), &pre.apply(&b)));
    Ok(ExitCode::SUCCESS)
}

fn run_calibrate(args: CalibrateArgs) -> anyhow::Result<ExitCode> {
    let model = calibration::load_model(args.kind, args.corpus.as_deref())?;
    let r = calibration::expected_overlap(&model, args.length, args.runs, args.seed)?;
    let mut out = open_output(&args.output.out)?;
    writeln!(out, "{},{},{},{},{:.6}", args.kind, args.length, args.runs, args.seed, r)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
